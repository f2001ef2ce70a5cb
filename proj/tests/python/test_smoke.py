import math

import numpy as np
import pytest

import qrecycle


def test_channel_closed_form():
    g = 0.5
    rho = qrecycle.damped_epr_state(g)
    assert rho.shape == (4, 4)
    assert np.allclose(np.diag(rho).real, [0.625, 0.125, 0.125, 0.125])
    assert rho[0, 3].real == pytest.approx(0.25)
    assert np.allclose(qrecycle.apply_channel(qrecycle.epr_state(), g), rho, atol=1e-12)
    assert qrecycle.bell_fidelity(rho) == pytest.approx(1 - g + g * g / 2)


def test_measures():
    bell = qrecycle.epr_state()
    assert qrecycle.fidelity(bell, bell) == pytest.approx(1.0)
    assert qrecycle.concurrence(bell) == pytest.approx(1.0)
    assert qrecycle.ppt_report(bell)["is_entangled"]
    product = np.diag([1.0, 0, 0, 0]).astype(complex)
    assert not qrecycle.ppt_report(product)["is_entangled"]
    pt = qrecycle.partial_transpose_b(bell)
    assert pt[1, 2] == pytest.approx(0.5)
    root = qrecycle.psd_sqrt(qrecycle.damped_epr_state(0.3))
    assert np.allclose(root @ root, qrecycle.damped_epr_state(0.3), atol=1e-10)


def test_unnormalized_ppt_is_scale_invariant():
    rho = qrecycle.damped_epr_state(0.2)
    a = qrecycle.ppt_report(rho)
    b = qrecycle.ppt_report(0.01 * rho, normalized=False)
    assert a["is_entangled"] == b["is_entangled"]
    assert np.allclose(np.array(b["eigenvalues"]), 0.01 * np.array(a["eigenvalues"]))


def test_outcomes_complete():
    full = qrecycle.enumerate_outcomes(0.3, 0.4, alpha2=0.6)
    assert len(full) == 9
    assert sum(o["probability"] for o in full) == pytest.approx(1.0, abs=1e-10)
    partial = qrecycle.enumerate_outcomes(0.3, 0.4, alpha2=0.6, scheme="partial")
    assert [o["label"] for o in partial] == ["T|-", "R|T", "R|R"]


def test_optimize():
    res = qrecycle.optimize(0.38, 0.7)
    assert res["tier1"]["feasible"]
    gain = res["tier2"]["survival"] - res["tier1"]["survival"]
    assert 0.208 <= gain <= 0.313
    assert all(o["fidelity"] >= 0.7 - 1e-9 for o in res["tier2"]["outcomes"])
    assert qrecycle.optimize(0.45, 0.7)["tier2"] is None


def test_sweep():
    rows = qrecycle.run_sweep(gamma_start=0.35, gamma_end=0.42, gamma_step=0.005, threads=2)
    gammas = [r["gamma"] for r in rows]
    assert gammas == sorted(gammas)
    feasible = [r for r in rows if r["status"] == "feasible"]
    assert feasible
    for r in feasible:
        assert math.isclose(r["gain_points"], 100 * (r["recycled_survival"] - r["benchmark_survival"]), abs_tol=1e-9)
        assert sum(r["per_outcome"].values()) == pytest.approx(r["recycled_survival"], abs=1e-10)
    doc = qrecycle.sweep_document(gamma_start=0.35, gamma_end=0.42, gamma_step=0.005)
    assert set(doc) == {"spec", "rows", "summary"}
    assert doc["summary"]["feasible_rows"] == len(feasible)


def test_errors():
    with pytest.raises(qrecycle.Error):
        qrecycle.damped_epr_state(1.5)
    with pytest.raises(ValueError):
        qrecycle.concurrence(np.eye(4, dtype=complex))
    with pytest.raises(ValueError):
        qrecycle.run_sweep(scheme="partial", restricted_rr=True)
    with pytest.raises(ValueError):
        qrecycle.bell_fidelity(np.eye(3))
