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


import json

import numpy as np
import pytest

import qcrb_locc as q


def test_builtin_names():
    names = q.scenario_names()
    assert "ghz3" in names and "chain4" in names


def test_ghz_qfi():
    assert q.qfi("ghz3", 0.3) == pytest.approx(9.0, rel=1e-10)


def test_sld_single_qubit_phase():
    # |psi> = (|0> + e^{i t}|1>)/sqrt2, pure-state QFI is 1
    t = 0.4
    psi = np.array([1, np.exp(1j * t)]) / np.sqrt(2)
    dpsi = np.array([0, 1j * np.exp(1j * t)]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
    L, j = q.sld(rho, drho)
    assert j == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(L @ rho + rho @ L, 2 * drho, atol=1e-10)


def test_synthesize_verify():
    tree = q.synthesize("ghz3", 0.3)
    rep = q.verify("ghz3", tree, 0.3)
    assert rep["saturating"]
    assert rep["fi"] == pytest.approx(9.0, rel=1e-6)


def test_zero_diag_basis():
    m = np.diag([1.0, -1.0]).astype(complex)
    u = q.zero_diag_basis(m)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    assert np.allclose(np.diag(u.conj().T @ m @ u), 0, atol=1e-12)


def test_simulate_reproducible():
    a = q.simulate("phase", 0.5, shots=500, trials=10, seed=3)
    b = q.simulate("phase", 0.5, shots=500, trials=10, seed=3)
    assert a == b
    assert a["J"] == pytest.approx(1.0, rel=1e-9)


def test_cli_in_process():
    code, out, _ = q.cli("scenario", "list")
    assert code == 0
    assert "ghz3" in out
    code, out, _ = q.cli("qfi", "ghz2", "--theta", "0.1")
    assert code == 0
    assert json.loads(out)["qfi"] == pytest.approx(4.0)
    code, _, err = q.cli("qfi", "bell-mixture", "--theta", "1.0")
    assert code == 1 and err


def test_validation_error():
    with pytest.raises(q.ValidationError):
        q.sld(np.eye(2), np.eye(3))
    with pytest.raises(q.ValidationError):
        q.scenario("no-such-scenario")
