import cmath
import math

import numpy as np
import pytest

from zerosep.combalg import CombPolynomial, SeparationProblem, build_auxiliary
from zerosep.errors import (DomainError, MarginFailure, MissingPhase,
                            NoZeroFound)
from zerosep.euler import (EvalResult, eval_partial_euler, finite_euler_spec,
                           zeta_spec)
from zerosep.locate import (CombEvaluator, RefineParams, ZeroCertificate,
                            certify_noncoincidence, count_zeros_in_strip,
                            refine_zero, twisted_eval, vertical_drift_log_bound)
from zerosep.pfinite import PFiniteSeries
from zerosep.primes import primes_up_to
from zerosep.steering import PhaseAssignment


def c(x):
    return PFiniteSeries.constant(x)


def test_twisted_equals_pointwise_when_all_shifts_equal():
    z = zeta_spec()
    f = CombPolynomial(1, ((c(1.0), (1,)), (c(-0.4), (0,))))
    sigma, t0, P = 1.4, 2.3, 2000
    ps = primes_up_to(P)
    asg = PhaseAssignment({int(p): t0 for p in ps}, fill_value=t0, y=0)
    tw = twisted_eval(f, [z], sigma, asg, P)
    from zerosep.combalg import comb_eval
    pointwise = comb_eval(f, [z], complex(sigma, t0), P)
    assert abs(tw.value - pointwise.value) < 1e-10 * abs(pointwise.value)
    assert tw.abs_error_bound <= pointwise.abs_error_bound * 1.01


def test_twisted_identity_two_ways():
    # single-variable identity: the twisted product recomputed from logs
    # matches the direct per-prime product
    z = zeta_spec()
    f = CombPolynomial(1, ((c(1.0), (1,)),))
    sigma, P, y = 1.5, 200, 0
    rng = np.random.default_rng(2)
    ps = primes_up_to(P)
    asg = PhaseAssignment({int(p): float(rng.uniform(0, 3)) for p in ps},
                          fill_value=0.0, y=y)
    tw = twisted_eval(f, [z], sigma, asg, P)
    direct = 1.0 + 0.0j
    for p in ps:
        x = float(p) ** (-sigma) * cmath.exp(-1j * asg.shifts[int(p)] * math.log(p))
        direct *= 1.0 / (1.0 - x)
    assert abs(tw.value - direct) < 1e-12 * abs(direct)


def test_twisted_missing_phase():
    z = zeta_spec()
    f = CombPolynomial(1, ((c(1.0), (1,)),))
    asg = PhaseAssignment({2: 0.1}, y=0)
    with pytest.raises(MissingPhase):
        twisted_eval(f, [z], 1.5, asg, 10)


def _toy_evaluator(mu=None, sigma=1.05):
    F1 = finite_euler_spec("lA", {2: 1.0, 3: 1.0})
    F2 = finite_euler_spec("lB", {5: 1.0, 7: 1.0})
    if mu is None:
        v1 = eval_partial_euler(F1, sigma + 0j, 10).value
        v2 = eval_partial_euler(F2, sigma + 0j, 10).value
        mu = 0.95 * v1 * v2
    f = CombPolynomial(2, ((c(1.0), (1, 1)), (c(-mu), (0, 0))))
    g = CombPolynomial(2, ((c(1.0), (1, 0)), (c(-0.5), (0, 1))))
    return f, g, (F1, F2), mu


def test_comb_evaluator_anchored_matches_direct():
    f, g, specs, _ = _toy_evaluator()
    ev = CombEvaluator(f, specs, P=10)
    t = 12345.678
    direct = ev.at(complex(1.2, t))
    anch = ev.anchored(t)
    via_anchor = anch(complex(1.2, 0.0))
    assert abs(direct.value - via_anchor.value) < 1e-9 * max(1, abs(direct.value))


def test_refine_zero_affine():
    target = 1.05 + 3.0j
    H = lambda s: EvalResult(s - target, 0.0)
    cert = refine_zero(H, 1.06 + 2.99j, 0.01)
    assert cert.status == "certified"
    assert cert.winding == 1
    assert abs(cert.center - target) < 1e-12
    assert cert.boundary_min > 0
    assert cert.consistent()


def test_refine_zero_no_zero_on_euler_product():
    # a pure Euler product never vanishes in the half-plane
    z = zeta_spec()
    f = CombPolynomial(1, ((c(1.0), (1,)),))
    ev = CombEvaluator(f, [z], P=2000)
    with pytest.raises(NoZeroFound):
        refine_zero(ev.at, 1.5 + 10.0j, 0.05,
                    RefineParams(newton_iters=12, numeric_tol=1e-12))


def test_refine_zero_domain():
    H = lambda s: EvalResult(s - 1.05, 0.0)
    with pytest.raises(DomainError):
        refine_zero(H, 1.05, 0.2)  # disk would cross Re(s) = 1


def test_certify_noncoincidence_constant_partner():
    target = 1.2 + 1.0j
    Hf = lambda s: EvalResult(s - target, 0.0)
    cert = refine_zero(Hf, 1.2 + 1.01j, 0.05)
    const_g = lambda s: EvalResult(1.0 + 0.0j, 0.0)
    upgraded = certify_noncoincidence(cert, const_g)
    assert upgraded.g_min_on_disk == pytest.approx(1.0, abs=1e-9)
    assert upgraded.status == "certified"


def test_certify_noncoincidence_same_function_fails():
    target = 1.2 + 1.0j
    Hf = lambda s: EvalResult(s - target, 0.0)
    cert = refine_zero(Hf, 1.2 + 1.01j, 0.05)
    with pytest.raises(MarginFailure) as err:
        certify_noncoincidence(cert, Hf)
    assert err.value.margin <= 0


def test_certificate_text_round_trip():
    cert = ZeroCertificate(center=1.05 + 0.25j, radius=0.01, winding=1,
                           boundary_min=1e-3, tail_budget=1e-7,
                           g_min_on_disk=0.2, status="certified",
                           value_at_center=1e-15 + 0j,
                           anchor="123*2^-7", precision_bits=256,
                           meta={"problem": "builtin:toy-finite-pair"})
    again = ZeroCertificate.from_text(cert.to_text())
    assert again == cert
    # byte stability
    assert cert.to_text() == again.to_text()


def test_count_zeros_polynomial():
    H = lambda s: (s - (1.2 + 5j)) * (s - (1.3 + 7j))
    result = count_zeros_in_strip(H, (1.05, 1.6), (4.0, 8.0), subdivision=3)
    assert result.total == 2
    assert result.flagged == ()


def test_count_zeros_euler_product_region():
    z = zeta_spec()
    f = CombPolynomial(1, ((c(1.0), (1,)),))
    ev = CombEvaluator(f, [z], P=1000)
    result = count_zeros_in_strip(ev.at, (1.2, 2.0), (0.0, 8.0), subdivision=2)
    assert result.total == 0
    assert result.flagged == ()


def test_count_zeros_additive_under_subdivision():
    # zeros placed away from every subdivision boundary
    H = lambda s: (s - (1.21 + 4.9j)) * (s - (1.33 + 7.3j))
    r1 = count_zeros_in_strip(H, (1.05, 1.6), (4.0, 8.0), subdivision=1)
    r2 = count_zeros_in_strip(H, (1.05, 1.6), (4.0, 8.0), subdivision=4)
    assert r1.flagged == () and r2.flagged == ()
    assert r1.total == r2.total == 2


def test_strip_domain():
    with pytest.raises(DomainError):
        count_zeros_in_strip(lambda s: s, (0.9, 2.0), (0.0, 1.0))


def test_vertical_drift_bound_dominates():
    # the bound covers the observed shift of log F for aligned phases
    z = zeta_spec()
    sigma, acc, P_align = 1.3, 0.05, 50
    bound = vertical_drift_log_bound(z, sigma, acc, P_align)
    from zerosep.lattice import almost_periods
    taus = almost_periods(0.0, P_align, acc, count=1)
    s = complex(sigma, 5.0)
    v1 = eval_partial_euler(z, s, 50).value
    v2 = eval_partial_euler(z, complex(sigma, 5.0 + float(taus[0])), 50).value
    drift = abs(cmath.log(v2 / v1))
    assert drift <= bound
