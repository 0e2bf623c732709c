// Copyright 2026 The mtlo2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <optional>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mtlo2/dataset.hpp"
#include "mtlo2/errors.hpp"
#include "mtlo2/harness.hpp"
#include "mtlo2/metrics.hpp"
#include "mtlo2/network.hpp"
#include "mtlo2/optimizer.hpp"
#include "mtlo2/physics.hpp"

namespace py = pybind11;
using namespace mtlo2;

namespace {

py::dict summary_dict(const harness::RunSummary& r) {
  py::dict d;
  d["network"] = r.network;
  d["seed"] = r.seed;
  d["mae_o2_train"] = r.mae_o2_train;
  d["mae_t_train"] = r.mae_t_train;
  d["mae_o2_dev"] = r.mae_o2_dev;
  d["mae_t_dev"] = r.mae_t_dev;
  d["initial_loss"] = r.initial_loss;
  d["final_loss"] = r.final_loss;
  d["dir"] = r.dir.string();
  return d;
}

py::tuple dataset_arrays(const dataset::Dataset& ds) {
  Eigen::VectorXd o2(static_cast<Eigen::Index>(ds.size())), temp(o2.size());
  for (std::size_t j = 0; j < ds.size(); ++j) {
    o2(static_cast<Eigen::Index>(j)) = ds.observations[j].o2;
    temp(static_cast<Eigen::Index>(j)) = ds.observations[j].temp;
  }
  return py::make_tuple(ds.feature_matrix(), o2, temp);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-task oxygen and temperature estimation from luminescence phase data";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);
  py::register_exception<TrainingDivergence>(m, "TrainingDivergence", PyExc_ArithmeticError);

  py::class_<physics::PhysicsParams>(m, "PhysicsParams")
      .def(py::init([] { return physics::PhysicsParams::defaults(); }))
      .def_readwrite("omegas", &physics::PhysicsParams::omegas)
      .def_readwrite("tau0_ref", &physics::PhysicsParams::tau0_ref)
      .def_readwrite("tau0_tc", &physics::PhysicsParams::tau0_tc)
      .def_readwrite("f_ref", &physics::PhysicsParams::f_ref)
      .def_readwrite("f_tc", &physics::PhysicsParams::f_tc)
      .def_readwrite("ksv1_ref", &physics::PhysicsParams::ksv1_ref)
      .def_readwrite("ksv1_tc", &physics::PhysicsParams::ksv1_tc)
      .def_readwrite("ksv2_ref", &physics::PhysicsParams::ksv2_ref)
      .def_readwrite("ksv2_tc", &physics::PhysicsParams::ksv2_tc)
      .def_readwrite("t_ref", &physics::PhysicsParams::t_ref)
      .def_readwrite("f_wc", &physics::PhysicsParams::f_wc)
      .def_readwrite("ksv1_wc", &physics::PhysicsParams::ksv1_wc)
      .def_readwrite("ksv2_wc", &physics::PhysicsParams::ksv2_wc)
      .def("validate", &physics::PhysicsParams::validate)
      .def_static("load", &physics::PhysicsParams::load)
      .def("save", &physics::PhysicsParams::save);

  m.def("tan_theta_ratio", &physics::tan_theta_ratio, py::arg("params"), py::arg("omega"),
        py::arg("temp"), py::arg("o2"));
  m.def("feature_vector", &physics::feature_vector, py::arg("params"), py::arg("temp"), py::arg("o2"));

  m.def(
      "generate",
      [](const physics::PhysicsParams& p, std::size_t count, std::uint64_t seed, double noise_sigma) {
        return dataset_arrays(dataset::generate(p, count, seed, noise_sigma));
      },
      py::arg("params"), py::arg("m"), py::arg("seed"), py::arg("noise_sigma") = 0.0,
      "Returns (features m x 16, o2 % air, temperature degC).");

  py::class_<network::NetworkSpec>(m, "NetworkSpec")
      .def_readonly("input_dim", &network::NetworkSpec::input_dim)
      .def_readonly("trunk", &network::NetworkSpec::trunk)
      .def_property_readonly("branch_names",
                             [](const network::NetworkSpec& s) {
                               std::vector<std::string> names;
                               for (const auto& b : s.branches) names.push_back(b.name);
                               return names;
                             })
      .def("parameter_count", &network::NetworkSpec::parameter_count)
      .def_static("load", &network::NetworkSpec::load)
      .def("save", &network::NetworkSpec::save);

  py::class_<network::NetworkParams>(m, "NetworkParams")
      .def("parameter_count", &network::NetworkParams::parameter_count)
      .def("save", [](const network::NetworkParams& p, const std::filesystem::path& path) {
        network::save_checkpoint(path, p);
      });

  m.def("build_architecture", &harness::build_architecture, py::arg("selector"));
  m.def("set_loss_weights", [](network::NetworkSpec spec, const harness::LossWeights& a) {
    harness::apply_loss_weights(spec, a);
    return spec;
  });
  m.def("build", &network::build, py::arg("spec"), py::arg("seed"));
  m.def("predict", &network::predict, py::arg("spec"), py::arg("params"), py::arg("features"),
        "n x 2 normalized (o2, temperature) predictions.");
  m.def(
      "train",
      [](const network::NetworkSpec& spec, network::NetworkParams params, const Eigen::MatrixXd& x,
         const Eigen::MatrixXd& y, int epochs, double learning_rate) {
        optimizer::TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        std::optional<optimizer::TrainResult> result;
        {
          py::gil_scoped_release release;
          result = optimizer::train(spec, std::move(params), x, y, cfg);
        }
        return py::make_tuple(std::move(result->params), result->trace.global_loss);
      },
      py::arg("spec"), py::arg("params"), py::arg("features"), py::arg("targets"),
      py::arg("epochs") = 4000, py::arg("learning_rate") = 1e-3,
      "Full-batch Adam. Returns (trained params, per-epoch global loss).");

  m.def(
      "scott_bandwidth", [](const std::vector<double>& samples) { return metrics::scott_bandwidth(samples); },
      py::arg("samples"));
  m.def(
      "kde",
      [](const std::vector<double>& samples, const std::vector<double>& grid) {
        return metrics::kde(samples, grid);
      },
      py::arg("samples"), py::arg("grid"));
  m.def(
      "five_number_summary",
      [](const std::vector<double>& v) {
        const auto s = metrics::five_number_summary(v);
        return py::make_tuple(s.min, s.q1, s.median, s.q3, s.max);
      },
      py::arg("values"));

  py::class_<harness::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("physics", &harness::ExperimentConfig::physics)
      .def_readwrite("m", &harness::ExperimentConfig::m)
      .def_readwrite("train_fraction", &harness::ExperimentConfig::train_fraction)
      .def_readwrite("noise_sigma", &harness::ExperimentConfig::noise_sigma)
      .def_readwrite("seeds", &harness::ExperimentConfig::seeds)
      .def_readwrite("networks", &harness::ExperimentConfig::networks)
      .def_readwrite("alphas", &harness::ExperimentConfig::alphas)
      .def_readwrite("out_dir", &harness::ExperimentConfig::out_dir)
      .def_readwrite("svg", &harness::ExperimentConfig::svg)
      .def_property(
          "epochs", [](const harness::ExperimentConfig& c) { return c.train.epochs; },
          [](harness::ExperimentConfig& c, int e) { c.train.epochs = e; })
      .def_property(
          "learning_rate", [](const harness::ExperimentConfig& c) { return c.train.learning_rate; },
          [](harness::ExperimentConfig& c, double lr) { c.train.learning_rate = lr; })
      .def("apply_desk", &harness::ExperimentConfig::apply_desk)
      .def("validate", &harness::ExperimentConfig::validate);

  m.def(
      "run_experiment",
      [](const harness::ExperimentConfig& cfg) {
        std::vector<harness::RunSummary> runs;
        {
          py::gil_scoped_release release;
          runs = harness::run_experiment(cfg);
        }
        py::list out;
        for (const auto& r : runs) out.append(summary_dict(r));
        return out;
      },
      py::arg("config"));
  m.def("default_sweep_grid", &harness::default_sweep_grid);
}
