# Copyright 2026 The qcrb-locc Authors
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

"""Saturating LOCC and local measurements for single-parameter estimation.

Thin wrappers over the C++ core. Functions that produce reports return
plain dicts decoded from the core's JSON output.
"""

import json as _json

from . import _core
from ._core import ConvergenceError, ValidationError, fisher_info, qfi, sld, zero_diag_basis

__all__ = [
    "ConvergenceError",
    "ValidationError",
    "check_lm",
    "cli",
    "fisher_info",
    "qfi",
    "scenario",
    "scenario_names",
    "simulate",
    "sld",
    "synthesize",
    "verify",
    "zero_diag_basis",
]

__version__ = "0.1.0"


def scenario_names():
    return list(_core.scenario_names())


def scenario(name_or_path):
    return _json.loads(_core.scenario_json(name_or_path))


def synthesize(scenario, theta, order=None):
    """Saturating measurement tree as a dict (tree JSON schema)."""
    return _json.loads(_core.synthesize(scenario, theta, order))


def verify(scenario, tree, theta):
    if not isinstance(tree, str):
        tree = _json.dumps(tree)
    return _json.loads(_core.verify(scenario, tree, theta))


def simulate(scenario, theta, shots=10000, trials=100, seed=1, two_step=False):
    return _json.loads(_core.simulate(scenario, theta, shots, trials, seed, two_step))


def check_lm(a, b, u, v):
    return _json.loads(_core.check_lm(a, b, u, v))


def cli(*args):
    """Run a CLI subcommand in-process. Returns (exit_code, stdout, stderr)."""
    code, (out, err) = _core.cli([str(a) for a in args])
    return code, out, err
