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

#include "mtlo2/network.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mtlo2/errors.hpp"
#include "mtlo2/rng.hpp"

namespace mtlo2::network {
namespace {

Layer make_layer(std::string name, int fan_in, int fan_out) {
  return Layer{std::move(name), Eigen::MatrixXd::Zero(fan_in, fan_out),
               Eigen::RowVectorXd::Zero(fan_out)};
}

// Allocates every layer with zero weights; `build` then fills them.
NetworkParams allocate(const NetworkSpec& spec) {
  NetworkParams p;
  int prev = spec.input_dim;
  for (std::size_t i = 0; i < spec.trunk.size(); ++i) {
    p.trunk.push_back(make_layer("trunk." + std::to_string(i), prev, spec.trunk[i]));
    prev = spec.trunk[i];
  }
  const int shared = prev;
  for (const auto& br : spec.branches) {
    std::vector<Layer> layers;
    int in = shared;
    for (std::size_t i = 0; i < br.hidden.size(); ++i) {
      layers.push_back(make_layer("branch." + br.name + "." + std::to_string(i), in, br.hidden[i]));
      in = br.hidden[i];
    }
    layers.push_back(make_layer("branch." + br.name + "." + std::to_string(br.hidden.size()), in,
                                static_cast<int>(br.outputs.size())));
    p.branches.push_back(std::move(layers));
  }
  return p;
}

void check_batch(const NetworkSpec& spec, const Eigen::MatrixXd& batch) {
  if (batch.cols() != spec.input_dim) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                     std::to_string(spec.input_dim));
  }
}

void check_params(const NetworkSpec& spec, const NetworkParams& params) {
  if (params.trunk.size() != spec.trunk.size() || params.branches.size() != spec.branches.size()) {
    throw ShapeError("parameters do not match the network spec");
  }
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& in, const Layer& layer) {
  Eigen::MatrixXd z(in.rows(), layer.weight.cols());
  z.noalias() = in * layer.weight;
  z.rowwise() += layer.bias;
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

Eigen::MatrixXd select_targets(const Branch& br, const Eigen::MatrixXd& targets) {
  Eigen::MatrixXd sel(targets.rows(), static_cast<Eigen::Index>(br.outputs.size()));
  for (std::size_t k = 0; k < br.outputs.size(); ++k) {
    sel.col(static_cast<Eigen::Index>(k)) = targets.col(static_cast<int>(br.outputs[k]));
  }
  return sel;
}

void activate_into(const Eigen::MatrixXd& in, const Layer& layer, Eigen::MatrixXd& out) {
  out.resize(in.rows(), layer.weight.cols());
  out.noalias() = in * layer.weight;
  out.rowwise() += layer.bias;
  out.array() = (1.0 + (-out.array()).exp()).inverse();
}

// Back-propagates `d_out` (gradient w.r.t. the last activation of a chain
// whose input is `input` and whose layer outputs are `acts`). Returns the
// gradient w.r.t. `input`, held in a workspace buffer.
const Eigen::MatrixXd& backprop_chain(const std::vector<Layer>& layers, const Eigen::MatrixXd& input,
                                      const std::vector<Eigen::MatrixXd>& acts,
                                      const Eigen::MatrixXd& d_out, std::vector<Layer>& grads,
                                      std::vector<Eigen::MatrixXd>& deltas,
                                      std::vector<Eigen::MatrixXd>& input_grads) {
  deltas.resize(layers.size());
  input_grads.resize(layers.size());
  const Eigen::MatrixXd* d = &d_out;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Eigen::MatrixXd& a = acts[li];
    const Eigen::MatrixXd& in = li == 0 ? input : acts[li - 1];
    Eigen::MatrixXd& delta = deltas[li];
    delta.resize(a.rows(), a.cols());
    delta.array() = d->array() * a.array() * (1.0 - a.array());
    grads[li].weight.noalias() = in.transpose() * delta;
    grads[li].bias = delta.colwise().sum();
    Eigen::MatrixXd& d_in = input_grads[li];
    d_in.resize(delta.rows(), layers[li].weight.rows());
    d_in.noalias() = delta * layers[li].weight.transpose();
    d = &d_in;
  }
  return *d;
}

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> out;
  const std::string t = trim(text);
  if (t.empty() || t == "-") return out;
  for (const auto& item : split_list(t)) out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

std::string join_widths(const std::vector<int>& widths) {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(widths[i]);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void NetworkSpec::validate(bool require_both_targets) const {
  if (input_dim < 1) throw ShapeError("input_dim must be >= 1");
  for (const int w : trunk) {
    if (w < 1) throw ShapeError("trunk widths must be >= 1");
  }
  if (branches.empty()) throw ShapeError("network needs at least one branch");
  bool has_o2 = false;
  bool has_t = false;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& br = branches[i];
    if (br.name.empty()) throw ShapeError("branch names must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (branches[j].name == br.name) throw ShapeError("duplicate branch name '" + br.name + "'");
    }
    if (br.outputs.empty()) throw ShapeError("branch '" + br.name + "' has no outputs");
    for (const int w : br.hidden) {
      if (w < 1) throw ShapeError("branch '" + br.name + "' has a width < 1");
    }
    if (!(br.loss_weight >= 0.0) || !std::isfinite(br.loss_weight)) {
      throw ShapeError("branch '" + br.name + "' loss weight must be finite and >= 0");
    }
    for (const Target t : br.outputs) {
      has_o2 |= t == Target::kO2;
      has_t |= t == Target::kT;
    }
  }
  if (require_both_targets && !(has_o2 && has_t)) {
    throw ShapeError("branches must emit both O2 and T");
  }
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t count = 0;
  int prev = input_dim;
  for (const int w : trunk) {
    count += static_cast<std::size_t>(prev) * w + w;
    prev = w;
  }
  for (const auto& br : branches) {
    int in = prev;
    for (const int w : br.hidden) {
      count += static_cast<std::size_t>(in) * w + w;
      in = w;
    }
    const auto outs = br.outputs.size();
    count += static_cast<std::size_t>(in) * outs + outs;
  }
  return count;
}

NetworkSpec NetworkSpec::from_config(const KeyValueConfig& cfg) {
  NetworkSpec spec;
  spec.input_dim = static_cast<int>(cfg.get_int("input_dim", spec.input_dim));
  if (const auto trunk = cfg.get("trunk")) spec.trunk = parse_widths(*trunk);
  for (const auto& line : cfg.get_all("branch")) {
    const auto fields = split_list(line, '|');
    if (fields.size() != 4) {
      throw FormatError("branch line needs 'name | hidden | outputs | weight': " + line);
    }
    Branch br;
    br.name = fields[0];
    br.hidden = parse_widths(fields[1]);
    for (const auto& label : split_list(fields[2])) br.outputs.push_back(parse_target(label));
    br.loss_weight = parse_double(fields[3]);
    spec.branches.push_back(std::move(br));
  }
  spec.validate();
  return spec;
}

void NetworkSpec::write_config(KeyValueConfig& cfg) const {
  cfg.set("input_dim", std::to_string(input_dim));
  cfg.set("trunk", join_widths(trunk));
  for (const auto& br : branches) {
    std::string outs;
    for (std::size_t k = 0; k < br.outputs.size(); ++k) {
      if (k) outs += ',';
      outs += target_label(br.outputs[k]);
    }
    cfg.add("branch", br.name + " | " + join_widths(br.hidden) + " | " + outs + " | " +
                          format_double(br.loss_weight));
  }
}

NetworkSpec NetworkSpec::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

void NetworkSpec::save(const std::filesystem::path& path) const {
  KeyValueConfig cfg;
  write_config(cfg);
  cfg.save(path);
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const Layer* l : layers()) n += static_cast<std::size_t>(l->weight.size() + l->bias.size());
  return n;
}

std::vector<Layer*> NetworkParams::layers() {
  std::vector<Layer*> out;
  for (auto& l : trunk) out.push_back(&l);
  for (auto& br : branches) {
    for (auto& l : br) out.push_back(&l);
  }
  return out;
}

std::vector<const Layer*> NetworkParams::layers() const {
  std::vector<const Layer*> out;
  for (const auto& l : trunk) out.push_back(&l);
  for (const auto& br : branches) {
    for (const auto& l : br) out.push_back(&l);
  }
  return out;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z = *this;
  for (Layer* l : z.layers()) {
    l->weight.setZero();
    l->bias.setZero();
  }
  return z;
}

bool NetworkParams::all_finite() const {
  for (const Layer* l : layers()) {
    if (!l->weight.allFinite() || !l->bias.allFinite()) return false;
  }
  return true;
}

NetworkParams build(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate(false);
  NetworkParams p = allocate(spec);
  Rng rng(seed);
  for (Layer* l : p.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l->weight.rows() + l->weight.cols()));
    for (Eigen::Index r = 0; r < l->weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l->weight.cols(); ++c) {
        l->weight(r, c) = rng.uniform(-limit, limit);
      }
    }
  }
  return p;
}

BranchOutputs forward(const NetworkSpec& spec, const NetworkParams& params,
                      const Eigen::MatrixXd& batch) {
  check_batch(spec, batch);
  check_params(spec, params);
  Eigen::MatrixXd shared = batch;
  for (const auto& layer : params.trunk) shared = activate(shared, layer);
  BranchOutputs out;
  out.reserve(params.branches.size());
  for (const auto& br : params.branches) {
    Eigen::MatrixXd h = activate(shared, br.front());
    for (std::size_t i = 1; i < br.size(); ++i) h = activate(h, br[i]);
    out.push_back(std::move(h));
  }
  return out;
}

LossValue loss(const NetworkSpec& spec, const BranchOutputs& outputs,
               const Eigen::MatrixXd& targets) {
  if (outputs.size() != spec.branches.size()) throw ShapeError("one output matrix per branch expected");
  if (targets.cols() != static_cast<Eigen::Index>(kNumTargets)) {
    throw ShapeError("targets must have 2 columns (O2, T)");
  }
  LossValue lv;
  for (std::size_t i = 0; i < spec.branches.size(); ++i) {
    const Branch& br = spec.branches[i];
    const Eigen::MatrixXd& out = outputs[i];
    if (out.rows() != targets.rows() ||
        out.cols() != static_cast<Eigen::Index>(br.outputs.size())) {
      throw ShapeError("branch '" + br.name + "' output shape mismatch");
    }
    const double li = (out - select_targets(br, targets)).squaredNorm() /
                      static_cast<double>(targets.rows());
    lv.per_branch.push_back(li);
    lv.global += br.loss_weight * li;
  }
  return lv;
}

Gradient backward(const NetworkSpec& spec, const NetworkParams& params,
                  const Eigen::MatrixXd& batch, const Eigen::MatrixXd& targets) {
  Workspace ws;
  Gradient g;
  backward(spec, params, batch, targets, ws, g);
  return g;
}

void backward(const NetworkSpec& spec, const NetworkParams& params, const Eigen::MatrixXd& batch,
              const Eigen::MatrixXd& targets, Workspace& ws, Gradient& out) {
  check_batch(spec, batch);
  check_params(spec, params);
  if (targets.rows() != batch.rows() || targets.cols() != static_cast<Eigen::Index>(kNumTargets)) {
    throw ShapeError("targets must be n x 2 and aligned with the batch");
  }
  const double n = static_cast<double>(batch.rows());
  if (out.grad.trunk.size() != params.trunk.size() || out.grad.branches.size() != params.branches.size()) {
    out.grad = params.zeros_like();
  }
  out.loss = {};

  ws.trunk_acts.resize(params.trunk.size());
  for (std::size_t l = 0; l < params.trunk.size(); ++l) {
    activate_into(l == 0 ? batch : ws.trunk_acts[l - 1], params.trunk[l], ws.trunk_acts[l]);
  }
  const Eigen::MatrixXd& shared = params.trunk.empty() ? batch : ws.trunk_acts.back();

  ws.d_shared.setZero(shared.rows(), shared.cols());
  ws.branch_acts.resize(params.branches.size());
  ws.deltas.resize(params.branches.size() + 1);
  ws.input_grads.resize(params.branches.size() + 1);
  for (std::size_t b = 0; b < params.branches.size(); ++b) {
    const Branch& br = spec.branches[b];
    const auto& layers = params.branches[b];
    auto& acts = ws.branch_acts[b];
    acts.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      activate_into(l == 0 ? shared : acts[l - 1], layers[l], acts[l]);
    }

    ws.residual = acts.back() - select_targets(br, targets);
    const double li = ws.residual.squaredNorm() / n;
    out.loss.per_branch.push_back(li);
    out.loss.global += br.loss_weight * li;

    ws.residual *= 2.0 * br.loss_weight / n;
    ws.d_shared += backprop_chain(layers, shared, acts, ws.residual, out.grad.branches[b],
                                  ws.deltas[b], ws.input_grads[b]);
  }
  if (!params.trunk.empty()) {
    backprop_chain(params.trunk, batch, ws.trunk_acts, ws.d_shared, out.grad.trunk,
                   ws.deltas.back(), ws.input_grads.back());
  }
}

std::array<ReportSource, kNumTargets> report_sources(const NetworkSpec& spec) {
  std::array<ReportSource, kNumTargets> out{};
  for (std::size_t t = 0; t < kNumTargets; ++t) {
    bool found = false;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
      const Branch& br = spec.branches[b];
      for (std::size_t k = 0; k < br.outputs.size(); ++k) {
        if (static_cast<std::size_t>(br.outputs[k]) != t) continue;
        const bool better =
            !found || br.hidden.size() > spec.branches[out[t].branch].hidden.size() ||
            (br.hidden.size() == spec.branches[out[t].branch].hidden.size() &&
             br.outputs.size() < spec.branches[out[t].branch].outputs.size());
        if (better) {
          out[t] = ReportSource{b, static_cast<Eigen::Index>(k)};
          found = true;
        }
      }
    }
    if (!found) {
      throw ShapeError("no branch emits target " + std::string(target_label(static_cast<Target>(t))));
    }
  }
  return out;
}

Eigen::MatrixXd predict(const NetworkSpec& spec, const NetworkParams& params,
                        const Eigen::MatrixXd& batch) {
  const auto sources = report_sources(spec);
  const BranchOutputs outs = forward(spec, params, batch);
  Eigen::MatrixXd pred(batch.rows(), static_cast<Eigen::Index>(kNumTargets));
  for (std::size_t t = 0; t < kNumTargets; ++t) {
    pred.col(static_cast<Eigen::Index>(t)) = outs[sources[t].branch].col(sources[t].column);
  }
  return pred;
}

void write_checkpoint(std::ostream& out, const NetworkParams& params) {
  const auto layers = params.layers();
  out << "mtlo2-checkpoint " << kCheckpointVersion << '\n';
  out << "tensors " << 2 * layers.size() << '\n';
  auto write_tensor = [&out](const std::string& name, const auto& m) {
    out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  };
  for (const Layer* l : layers) {
    write_tensor(l->name + ".weight", l->weight);
    write_tensor(l->name + ".bias", l->bias);
  }
  if (!out) throw FormatError("checkpoint write failed");
}

NetworkParams read_checkpoint(std::istream& in, const NetworkSpec& spec) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mtlo2-checkpoint") {
    throw FormatError("not an mtlo2 checkpoint");
  }
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  NetworkParams p = allocate(spec);
  auto layers = p.layers();
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "tensors" || count != 2 * layers.size()) {
    throw FormatError("checkpoint tensor count does not match the network spec");
  }
  auto read_tensor = [&in](const std::string& expected, auto& m) {
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> tag >> name >> rows >> cols) || tag != "tensor") {
      throw FormatError("malformed tensor header, expected " + expected);
    }
    if (name != expected || rows != m.rows() || cols != m.cols()) {
      throw FormatError("checkpoint tensor " + name + " does not match " + expected);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string v;
        if (!(in >> v)) throw FormatError("truncated tensor " + name);
        m(r, c) = parse_double(v);
      }
    }
  };
  for (Layer* l : layers) {
    read_tensor(l->name + ".weight", l->weight);
    read_tensor(l->name + ".bias", l->bias);
  }
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_checkpoint(out, params);
}

NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkSpec& spec) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_checkpoint(in, spec);
}

}  // namespace mtlo2::network
