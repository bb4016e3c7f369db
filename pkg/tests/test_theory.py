import math

import numpy as np
import pytest

from csflock.dynamics import FlockParams, FlockState, random_initial_state, simulate
from csflock.errors import DimensionError, ParameterError
from csflock.theory import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    CertificateInputs,
    block_length,
    case_two_threshold,
    certificate_constants,
    certify,
    fit_log_slope,
    root_upper_bound,
    measured_decay,
    norm_equivalence_lambda,
    product_decay_bound,
    self_bound_polynomial,
    unique_positive_zero,
    vhat_envelope,
    weight_lower_bound,
)
from csflock.topology import Digraph, constant_signal


def test_lambda_examples(rng):
    assert norm_equivalence_lambda(2, 1) == 1.0
    assert norm_equivalence_lambda(3, 3) == pytest.approx(math.sqrt(6))
    lam = norm_equivalence_lambda(4, 3)
    for _ in range(200):
        w = rng.normal(size=9) * rng.uniform(0, 100)
        inf, two = np.abs(w).max(), np.linalg.norm(w)
        assert inf <= two + 1e-12 and two <= lam * inf + 1e-12
    assert np.linalg.norm(np.ones(9)) == pytest.approx(lam * 1.0)
    with pytest.raises(DimensionError):
        norm_equivalence_lambda(1, 3)


def test_product_decay_bound_examples():
    assert product_decay_bound(2, 0.2, 1.0, 3) == 1.0
    assert product_decay_bound(3, 0.2, 1.0, 3) == pytest.approx(0.9984)
    assert product_decay_bound(9, 0.2, 0.5, 2) == pytest.approx(0.9**10)
    with pytest.raises(ParameterError):
        product_decay_bound(3, 2.0, 1.0, 3)
    with pytest.raises(ValueError):
        product_decay_bound(-1, 0.2, 1.0, 3)


def test_vhat_envelope_examples():
    p = FlockParams(0.2, 0.25, 2, d=1)
    assert vhat_envelope(9, CertificateInputs(p, 0.0, 1.0, 1.0), 0.5) == pytest.approx(2 * 0.9**10)
    assert vhat_envelope(7, CertificateInputs(p, 1.0, 0.0, 0.0), 0.5) == 0.0
    p3 = FlockParams(0.2, 0.25, 3)
    assert vhat_envelope(0, CertificateInputs(p3, 1.0, 2.0, 0.7), 0.9) == pytest.approx(1.4)


def test_weight_lower_bound():
    assert weight_lower_bound(0.0, 3.0) == 1.0
    assert weight_lower_bound(2.0, 0.5) == pytest.approx(1 / 3)


def test_root_golden_ratio():
    z = unique_positive_zero(2, 1, 1, 1)
    assert abs(z - (1 + math.sqrt(5)) / 2) < 1e-12
    assert z <= root_upper_bound(2, 1, 1, 1) == 2.0


def test_root_degenerate_coefficient():
    z = unique_positive_zero(1, 0.5, 1e-12, 1)
    assert z == pytest.approx(1 + 1e-12, abs=1e-14)


def grid_sign_change(r, s, c1, c2, hi, n=200_001):
    z = np.linspace(0, hi, n)
    F = self_bound_polynomial(z, r, s, c1, c2)
    k = int(np.flatnonzero((F[:-1] < 0) & (F[1:] >= 0))[0])
    return z[k], z[k + 1]


def test_root_against_grid_oracle():
    lo, hi = grid_sign_change(1, 0.5, 2, 3, 20.3)
    z = unique_positive_zero(1, 0.5, 2, 3)
    assert lo - 1e-12 <= z <= hi + 1e-12
    assert z == pytest.approx(9.0, rel=1e-14)  # sqrt(z) = 3 solves t^2 - 2t - 3 = 0


def test_root_random_against_grid(rng):
    for _ in range(30):
        s = rng.uniform(0.1, 2)
        r = s + rng.uniform(0.1, 2)
        c1, c2 = rng.uniform(0.1, 5, size=2)
        M = root_upper_bound(r, s, c1, c2)
        lo, hi = grid_sign_change(r, s, c1, c2, M * 1.01, n=20_001)
        assert lo <= unique_positive_zero(r, s, c1, c2) <= hi


def test_root_parameter_errors():
    with pytest.raises(ParameterError):
        unique_positive_zero(1, 2, 1, 1)
    with pytest.raises(ParameterError):
        unique_positive_zero(2, 1, 0, 1)
    with pytest.raises(ParameterError):
        unique_positive_zero(2, 0, 1, 1)


def test_certificate_constants_example():
    p = FlockParams(0.2, 0.25, 3)
    c = certificate_constants(CertificateInputs(p, 0.0, 1.0, 1.0, lam=1.0))
    assert c.a == pytest.approx(1000 * math.sqrt(2))
    assert c.s == 2.0 and c.b == 1.0 and c.m == 4


def test_case_two_threshold_example():
    p = FlockParams(0.2, 1 / 8, 3)
    inputs = CertificateInputs(p, 1.0, 1e-4, 1e-4)
    assert case_two_threshold(inputs) == pytest.approx(0.2**3 / (2 * math.sqrt(2) * 4 * math.sqrt(6)))
    assert case_two_threshold(inputs) == pytest.approx(2.887e-4, rel=1e-3)
    report = certify(inputs)
    assert report.case == CRITICAL and report.hypothesis_holds
    assert not certify(CertificateInputs(p, 1.0, 3e-4, 3e-4)).hypothesis_holds


def test_case_two_equivalent_to_a_below_one(rng):
    for _ in range(2000):
        N = int(rng.integers(2, 7))
        d = int(rng.integers(1, 4))
        h = float(rng.uniform(0.01, 1 / (N + 1)))
        m = block_length(N)
        p = FlockParams(h, 1 / (2 * m), N, d)
        inputs = CertificateInputs(p, 1.0, 0.0, 0.0)
        thr = case_two_threshold(inputs)
        v0 = thr * float(np.exp(rng.uniform(-0.5, 0.5)))
        inputs = CertificateInputs(p, 1.0, v0, v0)
        a = certificate_constants(inputs).a
        if abs(a - 1) < 1e-9:
            continue
        assert (v0 < thr) == (a < 1)


def test_beta_zero_always_subcritical(rng):
    for _ in range(50):
        N = int(rng.integers(2, 6))
        p = FlockParams(0.9 / (N + 1), 0.0, N)
        s = random_initial_state(N, 3, rng, velocity_length=100.0)
        report = certify(CertificateInputs.from_state(s, p))
        assert report.case == SUBCRITICAL and report.hypothesis_holds
        assert report.R == 1.0
        assert report.B0 == pytest.approx(math.sqrt(((report.a + report.b) ** 2 - 1) / 2))


def test_subcritical_b0_uses_root():
    p = FlockParams(0.2, 0.05, 3)
    inputs = CertificateInputs(p, 2.0, 0.1, 0.1)
    r = certify(inputs)
    assert r.case == SUBCRITICAL and r.s == pytest.approx(0.4)
    U0 = math.sqrt(2 * r.B0**2 + 1)
    assert U0 - r.a * U0**r.s - r.b == pytest.approx(0.0, abs=1e-9 * U0)
    assert U0 <= max((2 * r.a) ** (1 / (1 - r.s)), 2 * r.b) + 1e-9


def test_supercritical_examples():
    p = FlockParams(0.2, 0.25, 3)
    big = certify(CertificateInputs(p, 1.0, 1.0, 1.0))
    assert big.case == SUPERCRITICAL and not big.hypothesis_holds
    assert big.B0 is None and big.status == "not certified"
    with pytest.raises(ValueError):
        big.envelope(3, CertificateInputs(p, 1.0, 1.0, 1.0))
    small = certify(CertificateInputs(p, 1.0, 1e-9, 1e-9))
    assert small.hypothesis_holds and small.B0 > 0
    z_star = (1 / (small.s * small.a)) ** (1 / (small.s - 1))
    assert small.B0 == pytest.approx(math.sqrt((z_star**2 - 1) / 2))


def test_zero_velocity_certificate():
    p = FlockParams(0.2, 0.25, 3)
    r = certify(CertificateInputs(p, 3.0, 0.0, 0.0))
    assert r.hypothesis_holds and r.a == 0.0
    assert r.B0 == pytest.approx(math.sqrt(((1 + math.sqrt(2) * 3) ** 2 - 1) / 2))


def test_certify_refuses_large_step():
    with pytest.raises(ParameterError):
        certify(CertificateInputs(FlockParams(0.25, 0.25, 3), 1.0, 1.0, 1.0))


def test_report_invariants_and_dict():
    p = FlockParams(0.2, 0.05, 3)
    r = certify(CertificateInputs(p, 2.0, 0.1, 0.1))
    assert r.b >= 1 and r.a > 0 and 0 <= r.decay_base < 1
    d = r.as_dict()
    assert d["status"] == "certified" and d["bound_source"] == "proof-extracted"
    assert d["block_length"] == 4


def test_inputs_validation():
    p = FlockParams(0.2, 0.25, 3)
    with pytest.raises(ParameterError):
        CertificateInputs(p, 1.0, 1.0, 1.0, lam=0.5)
    with pytest.raises(ParameterError):
        CertificateInputs(p, -1.0, 1.0, 1.0)
    assert CertificateInputs(p, 1.0, 1.0, 1.0).lam == pytest.approx(math.sqrt(6))


def test_fit_log_slope():
    t = np.arange(100)
    assert fit_log_slope(np.exp(-0.3 * t)) == pytest.approx(-0.3)
    assert fit_log_slope(np.zeros(10)) == 0.0


def test_measured_decay_consensus(rotating_signal):
    x = np.arange(9.0).reshape(3, 3)
    v = np.ones((3, 3))
    traj = simulate(FlockState(x, v), rotating_signal, FlockParams(0.2, 0.25, 3), 20)
    m = measured_decay(traj.reference_states())
    assert m.exact_consensus and m.fitted_rate == 0.0
    assert m.sup_xhat == pytest.approx(np.linalg.norm(x[:-1] - x[-1]))
    with pytest.raises(ValueError):
        measured_decay(traj.reference_states()[:1])


def test_measured_rate_within_envelope_two_agents(rng):
    g = Digraph(2, frozenset({(1, 2)}))
    p = FlockParams(0.3, 0.5, 2)
    s = random_initial_state(2, 3, rng)
    traj = simulate(s, constant_signal(g), p, 200)
    m = measured_decay(traj.reference_states())
    R = weight_lower_bound(m.sup_xhat, p.beta)
    predicted = math.log(1 - p.h * R) / block_length(2)
    assert m.fitted_rate <= predicted + 1e-9
    inputs = CertificateInputs.from_state(s, p)
    for t, val in enumerate(m.vhat_inf):
        assert val <= vhat_envelope(t, inputs, R) + 1e-12


def test_section_four_decay(rotating_signal, rng):
    p = FlockParams(0.2, 0.25, 3)
    traj = simulate(random_initial_state(3, 3, rng), rotating_signal, p, 500)
    m = measured_decay(traj.reference_states())
    assert m.fitted_rate < 0 and m.final_vhat_inf < 1e-6
