import math

import mpmath as mp
import numpy as np
import pytest

from zerosep.errors import ApproxFailure, DomainError
from zerosep.lattice import (almost_periods, babai_nearest_plane,
                             exact_phase_errors, lll_reduce,
                             simultaneous_approx)
from zerosep.precision import circle_distances, phases_for_ints

TWO_PI = 2.0 * math.pi


def test_lll_reduces_norms():
    rng = np.random.default_rng(0)
    basis = (rng.integers(-50, 50, size=(5, 5)) +
             np.diag(rng.integers(500, 900, size=5))).tolist()
    red = lll_reduce(basis)
    n0 = sorted(float(np.linalg.norm(r)) for r in basis)
    n1 = sorted(float(np.linalg.norm(r)) for r in red)
    assert n1[0] <= n0[0] + 1e-9
    # reduced basis spans the same lattice: determinant magnitude preserved
    d0 = abs(round(np.linalg.det(np.array(basis, dtype=float))))
    d1 = abs(round(np.linalg.det(np.array(red, dtype=float))))
    assert d0 == d1


def test_babai_decodes_near_point():
    basis = [[7, 0, 0], [1, 11, 0], [2, 3, 13]]
    rng = np.random.default_rng(1)
    coeffs = rng.integers(-20, 20, size=3)
    point = np.array(basis).T @ coeffs
    target = point + np.array([0.2, -0.3, 0.1])
    got = babai_nearest_plane(basis, [int(round(x)) for x in target])
    rec = np.array(basis).T @ np.array(got)
    assert np.linalg.norm(rec - point) < 1e-9


def test_single_prime_exact():
    res = simultaneous_approx({2: 1.0}, 0.05)
    assert res.method == "brute"
    assert abs(float(res.t) - 1.0 / math.log(2)) < 1e-12
    assert res.max_phase_error < 1e-10


def test_two_primes_vs_brute_oracle():
    rng = np.random.default_rng(12)
    for _ in range(5):
        phases = {2: float(rng.uniform(0, TWO_PI)), 3: float(rng.uniform(0, TWO_PI))}
        res = simultaneous_approx(phases, 0.1)
        assert res.method == "brute"
        assert res.max_phase_error <= 0.1
        # self-verification with extra precision agrees
        assert abs(res.recompute_error() - res.max_phase_error) < 1e-10


def test_ten_primes_lattice():
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    rng = np.random.default_rng(4)
    phases = {p: float(rng.uniform(0, TWO_PI)) for p in primes}
    res = simultaneous_approx(phases, 0.05)
    assert res.method == "lattice"
    assert res.max_phase_error <= 0.05
    # independent recomputation at higher precision confirms the bound
    err = float(np.max(exact_phase_errors(res.t, primes,
                                          [phases[p] for p in primes],
                                          bits=res.precision_bits + 64)))
    assert err <= 0.05
    assert abs(err - res.max_phase_error) < 1e-10


def test_accuracy_domain():
    with pytest.raises(DomainError):
        simultaneous_approx({2: 1.0}, 4.0)
    with pytest.raises(DomainError):
        simultaneous_approx({}, 0.1)


def test_almost_periods_small():
    taus = almost_periods(0.0, 3, 0.1, count=3)
    assert len(taus) == 3
    assert all(t > 0 for t in taus)
    assert taus == sorted(taus)
    for tau in taus:
        err = float(np.max(exact_phase_errors(tau, [2, 3], [0.0, 0.0])))
        assert err <= 0.1


def test_almost_periods_match_brute_scan():
    # brute scan: smallest tau > 0 with both phases within 0.1 of zero
    taus = almost_periods(0.0, 3, 0.1, count=1)
    logs = np.array([math.log(2), math.log(3)])
    # candidates where 2's phase is exactly zero: multiples of 2 pi / log 2
    step = TWO_PI / math.log(2)
    ks = np.arange(1, int(2e5))
    ts = ks * step
    d3 = circle_distances(np.mod(ts * math.log(3), TWO_PI), 0.0)
    hits = ts[d3 <= 0.095]  # tiny slack for the off-comb optimum
    brute_first = float(hits[0]) if len(hits) else math.inf
    assert float(taus[0]) <= brute_first + step


def test_almost_period_shifts_series_little():
    # |F(s + i tau) - F(s)| stays small for an absolutely convergent series
    from zerosep.euler import eval_partial_euler, zeta_spec
    z = zeta_spec()
    taus = almost_periods(0.0, 7, 0.02, count=2)
    s = 1.5 + 2.0j
    base = eval_partial_euler(z, s, 100).value
    for tau in taus:
        shifted = eval_partial_euler(z, complex(s.real, s.imag + float(tau)),
                                     100).value
        # primes up to 7 aligned within 0.02; the rest contribute the tail
        assert abs(shifted - base) < 0.2


def test_phases_for_ints_extended():
    t = mp.mpf(10) ** 30
    ph = phases_for_ints(t, [2, 3, 5])
    assert np.all((0 <= ph) & (ph < TWO_PI))
    # doubling precision does not change the reduced phases
    ph2 = phases_for_ints(t, [2, 3, 5], bits=512)
    assert np.max(np.abs(ph - ph2)) < 1e-12
