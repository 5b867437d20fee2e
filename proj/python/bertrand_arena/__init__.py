# Copyright 2026 The Bertrand Arena Authors
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

"""Python front end to the Bertrand pricing lab.

Configs are plain dicts with the same layout as the JSON files read by the
``bertrand_arena`` command line tool. Missing keys take their defaults.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Union

from . import _core
from ._core import (
    DomainError,
    FormatError,
    InsufficientData,
    InvalidParameter,
    MarketSpec,
    NonConvergence,
    ShapeMismatch,
    demand,
    delta,
    equilibria,
    price_grid,
    profit,
    rpdi,
)

__all__ = [
    "DomainError",
    "FormatError",
    "InsufficientData",
    "InvalidParameter",
    "MarketSpec",
    "NonConvergence",
    "ShapeMismatch",
    "config_hash",
    "default_config",
    "delta",
    "demand",
    "equilibria",
    "normalize_config",
    "price_grid",
    "profit",
    "rpdi",
    "run_experiment",
    "simulate",
    "with_overrides",
    "write_report",
]

ConfigLike = Union[Mapping[str, Any], str, os.PathLike]


def _as_json(config: ConfigLike) -> str:
    if isinstance(config, Mapping):
        return json.dumps(config)
    with open(config, encoding="utf-8") as handle:
        return handle.read()


def default_config() -> dict:
    return json.loads(_core.default_config())


def normalize_config(config: ConfigLike) -> dict:
    """Full, validated config with every default spelled out."""
    return json.loads(_core.normalize_config(_as_json(config)))


def with_overrides(config: ConfigLike, *assignments: str) -> dict:
    """Applies ``dotted.key=value`` overrides to the full config."""
    text = _core.normalize_config(_as_json(config))
    for assignment in assignments:
        text = _core.apply_override(text, assignment)
    return json.loads(text)


def config_hash(config: ConfigLike) -> str:
    return _core.config_hash(_as_json(config))


def simulate(config: ConfigLike, seed: int = 1) -> dict:
    """One run of ``agents[0]`` against ``agents[1]``."""
    return _core.simulate(_as_json(config), seed)


def run_experiment(config: ConfigLike, out_dir: Union[str, os.PathLike, None] = None,
                   n_workers: int = 1) -> dict:
    return _core.run_experiment(_as_json(config), os.fspath(out_dir or ""), n_workers)


def write_report(directory: Union[str, os.PathLike]) -> dict:
    return _core.write_report(os.fspath(directory))
