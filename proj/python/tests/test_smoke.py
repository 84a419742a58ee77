import json
import math
import os

import numpy as np
import pytest

import acpm

CONFIGS = os.environ.get("ACPM_CONFIGS", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def test_structures_and_alpha_beta():
    q3 = acpm.builtin_manifold("q3", -1)
    assert q3.epsilon == -1
    residuals = acpm.axiom_residuals(q3, probes=50, seed=4)
    assert max(residuals.values()) < 1e-10
    alpha, beta = acpm.alpha_beta(q3, np.array([2.0, 0.3, -1.0]))
    assert alpha == pytest.approx(0.25, abs=1e-9)
    assert abs(beta) < 1e-10
    assert acpm.is_quasi_sasakian(q3)
    n3 = acpm.builtin_manifold("n3", 1)
    assert not acpm.is_quasi_sasakian(n3)
    g = n3.metric(np.array([0.0, 0.5, 0.0]))
    assert g.shape == (3, 3)
    assert np.allclose(g, g.T)


def test_upsilon1_curvature_and_torsion():
    n3 = acpm.builtin_manifold("n3", 1)
    u1 = acpm.builtin_legendre("upsilon1")
    f = acpm.frenet_direct(n3, u1, 1.0)
    lk = acpm.legendre_kappa_tau(n3, u1, 1.0)
    assert f.kappa == pytest.approx(math.sqrt(5), rel=1e-9)
    assert lk.tau == pytest.approx(0.6, rel=1e-8)
    assert abs(f.tau - lk.tau) < 1e-5
    assert acpm.frenet_residual(n3, u1, 1.0) < 1e-6


def test_generator_and_sphericity():
    gen = acpm.generate_legendre_q3("s", 0.1, 3.0)
    for s in (0.5, 1.5, 2.5):
        k = acpm.kappa_tau_k2(gen, s)
        assert k.kappa == pytest.approx(1.5, abs=1e-6)
        assert k.tau == pytest.approx(1 / (2 * math.sin(s)), abs=1e-6)
    q3 = acpm.builtin_manifold("q3", 1)
    report = acpm.classify_spherical(q3, gen.curve, acpm.uniform_grid(0.1, 3.0, 41))
    assert report.verdict == "not_spherical"
    assert report.min_abs_residual > 1e-2
    with pytest.raises(acpm.DomainError):
        acpm.generate_legendre_q3("s", 0.1, 3.2)


def test_theta_profile_is_spherical():
    sol = acpm.theta_solution("spacelike_trig", 1.0, 0.2, lambda s: 1.0, 0.0, -1.0, 1.0)
    report = acpm.classify_solution(sol, acpm.uniform_grid(-1.0, 1.0, 21))
    assert report.verdict == "spherical"
    profile = acpm.classify_profile(lambda s: 2.0, lambda s: 1.0, 1, acpm.uniform_grid(0.0, 1.0, 11))
    assert profile.theta_constant


def test_expressions():
    e = acpm.parse("sin(s)^2 + x")
    assert e.eval(s=0.5, x=1.0) == pytest.approx(math.sin(0.5) ** 2 + 1.0)
    assert e.diff("s").eval(s=0.5, x=0.0) == pytest.approx(math.sin(1.0))
    with pytest.raises(acpm.ParseError):
        acpm.parse("s +")
    with pytest.raises(acpm.ValidationError):
        e.eval(s=0.5)


def test_hypothesis_errors_map_to_python():
    q3 = acpm.builtin_manifold("q3", 1)
    reeb = acpm.expression_curve("reeb", ["1", "0", "s"], -1.0, 1.0)
    with pytest.raises(acpm.GeodesicError):
        acpm.frenet_direct(q3, reeb, 0.2)
    assert issubclass(acpm.GeodesicError, acpm.HypothesisError)


def test_commands():
    r = acpm.run_command("verify-manifold", config=os.path.join(CONFIGS, "verify_q3.toml"))
    assert r.exit_code == 0
    report = json.loads(r.primary)
    assert report["quasi_sasakian"] is True
    again = acpm.run_command("verify-manifold", config=os.path.join(CONFIGS, "verify_q3.toml"))
    assert again.primary == r.primary

    table = acpm.run_command("analyze-curve", curve="upsilon2", lo=1.0, hi=3.0, n=3)
    rows = [line.split(",") for line in table.primary.strip().splitlines()]
    assert rows[2][0] == "2"
    assert float(rows[2][8]) == pytest.approx(0.25, abs=1e-6)

    bad = acpm.run_command("gen-legendre", psi="s", lo=0.1, hi=3.2)
    assert bad.exit_code == 2
    svg = acpm.run_command("plot", curve="upsilon1", n=10)
    assert svg.primary.startswith("<svg")
