# Copyright 2026 The mtlo2 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Multi-task MLPs for oxygen and temperature estimation from phase-shift features."""

from ._core import (
    DomainError,
    ExperimentConfig,
    FormatError,
    NetworkParams,
    NetworkSpec,
    PhysicsParams,
    ShapeError,
    TrainingDivergence,
    build,
    build_architecture,
    default_sweep_grid,
    feature_vector,
    five_number_summary,
    generate,
    kde,
    predict,
    run_experiment,
    scott_bandwidth,
    set_loss_weights,
    tan_theta_ratio,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ExperimentConfig",
    "FormatError",
    "NetworkParams",
    "NetworkSpec",
    "PhysicsParams",
    "ShapeError",
    "TrainingDivergence",
    "build",
    "build_architecture",
    "default_sweep_grid",
    "feature_vector",
    "five_number_summary",
    "generate",
    "kde",
    "predict",
    "run_experiment",
    "scott_bandwidth",
    "set_loss_weights",
    "tan_theta_ratio",
    "train",
]
