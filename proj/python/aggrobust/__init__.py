# Copyright 2026 The aggrobust Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Robust equilibria of aggregative games with learned aggregator weights."""

from ._core import (
    Config,
    Dataset,
    DataPoint,
    LearnResult,
    NumericalError,
    RgneResult,
    ValidationError,
    ViolationEstimate,
    VgneResult,
    __version__,
    binomial_tail,
    dataset_from_csv,
    dataset_to_csv,
    estimate_violation,
    generate_dataset,
    learn_weights,
    load_config,
    mee,
    min_samples,
    parse_config,
    run_pipeline,
    solve_rgne,
    solve_vgne,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
