"""Certified zero location for combinations of Euler products: twisted
evaluation, Newton polishing with winding certification, non-coincidence
margins, and vertical replication windows."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np

from .combalg import CombPolynomial
from .errors import (ContourTooClose, DomainError, MarginFailure,
                     MissingPhase, NoZeroFound, RefinementExhausted)
from .euler import (EulerProductSpec, EvalResult, local_logs, log_tail_bound)
from .precision import (FLOAT_SAFE_T, mpf_from_text, mpf_to_text, needed_bits,
                        phases_for_ints)
from .pfinite import _prime_factors
from .steering import PhaseAssignment
from .primes import primes_up_to

TWO_PI = 2.0 * math.pi


def _as_eval(v) -> EvalResult:
    if isinstance(v, EvalResult):
        return v
    return EvalResult(complex(v), 0.0)


# --- twisted evaluation -------------------------------------------------------


def twisted_eval(f: CombPolynomial, specs: Sequence[EulerProductSpec],
                 sigma: float, assignment: PhaseAssignment, P: int,
                 K: Optional[int] = None, y: Optional[int] = None) -> EvalResult:
    """Combination value with an independent vertical shift at every prime.

    Primes at or below the fill boundary use the fill shift (which also fixes
    the height at which the prime-finite coefficients are read); primes in
    (y, P] take their assigned shifts.  The error bound covers the dropped
    primes beyond P exactly as in the pointwise evaluator.
    """
    if sigma <= 1:
        raise DomainError("twisted evaluation requires sigma > 1")
    if len(specs) != f.num_vars:
        raise DomainError("one spec per variable")
    y = y if y is not None else assignment.y
    ps = primes_up_to(P)
    shifts = np.array([assignment.shift_for(int(p), y) for p in ps])
    thetas = np.mod(shifts * np.log(ps.astype(np.float64)), TWO_PI)
    vals = np.empty(len(specs), dtype=np.complex128)
    errs = np.empty(len(specs))
    for j, F in enumerate(specs):
        if F.support is not None:
            keep = np.isin(ps, np.array(sorted(F.support), dtype=np.int64))
            logs = local_logs(F, ps[keep], sigma, thetas[keep], K)
        else:
            logs = local_logs(F, ps, sigma, thetas, K)
        vals[j] = np.exp(complex(np.sum(logs)))
        errs[j] = abs(vals[j]) * math.expm1(log_tail_bound(F, P, sigma))
    s0 = complex(sigma, assignment.fill_value)
    total = 0.0 + 0.0j
    bound = 0.0
    for coeff, exps in f.monomials:
        cval = coeff.value(s0)
        prod = 1.0 + 0.0j
        perr = 0.0
        for k, a_k in enumerate(exps):
            if a_k:
                prod *= vals[k] ** a_k
        for k, a_k in enumerate(exps):
            if a_k == 0:
                continue
            term = a_k * errs[k] * (abs(vals[k]) + errs[k]) ** (a_k - 1)
            for j2, a_j in enumerate(exps):
                if j2 != k and a_j:
                    term *= (abs(vals[j2]) + errs[j2]) ** a_j
            perr += term
        total += cval * prod
        bound += abs(cval) * perr
    return EvalResult(total, bound, {"sigma": sigma, "P": int(P), "K": K,
                                     "fill": assignment.fill_value, "y": y})


# --- pointwise combination evaluator with optional anchored height -----------


class CombEvaluator:
    """Evaluates one combination at single points with truncation budgets.

    ``at(s)`` works for moderate heights; ``anchored(t)`` freezes an exact
    large height and returns a callable taking offsets relative to it, with
    all prime phases reduced once in extended precision.
    """

    def __init__(self, f: CombPolynomial, specs: Sequence[EulerProductSpec],
                 P: int, K: Optional[int] = None):
        if len(specs) != f.num_vars:
            raise DomainError("one spec per variable")
        self.f = f
        self.specs = list(specs)
        self.P = int(P)
        self.K = K
        ps = primes_up_to(P)
        self._spec_primes = []
        self._spec_avals = []
        for F in self.specs:
            if F.support is not None:
                sub = ps[np.isin(ps, np.array(sorted(F.support), dtype=np.int64))]
            else:
                sub = ps
            self._spec_primes.append(sub)
            self._spec_avals.append(None)
        coeff_primes: set[int] = set()
        for coeff, _ in f.monomials:
            coeff_primes |= set(coeff.support_primes)
        self._coeff_primes = sorted(coeff_primes)
        parts = [p for p in self._spec_primes if len(p)]
        parts.append(np.array(self._coeff_primes, dtype=np.int64))
        self._all_primes = np.unique(np.concatenate(parts)) if parts \
            else np.array([], dtype=np.int64)

    def _combine(self, sigma: float, coeff_value, spec_logs) -> EvalResult:
        vals = np.empty(len(self.specs), dtype=np.complex128)
        errs = np.empty(len(self.specs))
        for j, F in enumerate(self.specs):
            vals[j] = cmath.exp(spec_logs[j])
            errs[j] = abs(vals[j]) * math.expm1(log_tail_bound(F, self.P, sigma))
        total = 0.0 + 0.0j
        bound = 0.0
        for coeff, exps in self.f.monomials:
            cval = coeff_value(coeff)
            prod = 1.0 + 0.0j
            perr = 0.0
            for k, a_k in enumerate(exps):
                if a_k:
                    prod *= vals[k] ** a_k
            for k, a_k in enumerate(exps):
                if a_k == 0:
                    continue
                term = a_k * errs[k] * (abs(vals[k]) + errs[k]) ** (a_k - 1)
                for j2, a_j in enumerate(exps):
                    if j2 != k and a_j:
                        term *= (abs(vals[j2]) + errs[j2]) ** a_j
                perr += term
            total += cval * prod
            bound += abs(cval) * perr
        return EvalResult(total, bound, {"sigma": sigma, "P": self.P, "K": self.K})

    def at(self, s: complex) -> EvalResult:
        s = complex(s)
        if s.real <= 1:
            raise DomainError("evaluation requires Re(s) > 1")
        logs = []
        for j, F in enumerate(self.specs):
            sub = self._spec_primes[j]
            if len(sub) == 0:
                logs.append(0.0 + 0.0j)
                continue
            thetas = np.mod(s.imag * np.log(sub.astype(np.float64)), TWO_PI) \
                if abs(s.imag) <= FLOAT_SAFE_T else phases_for_ints(s.imag, sub.tolist())
            logs.append(complex(np.sum(local_logs(F, sub, s.real, thetas, self.K))))
        res = self._combine(s.real, lambda c: c.value(s), logs)
        return EvalResult(res.value, res.abs_error_bound,
                          dict(res.params, t=s.imag))

    def anchored(self, t_anchor, bits: Optional[int] = None) -> "AnchoredCombEvaluator":
        return AnchoredCombEvaluator(self, t_anchor, bits)


class AnchoredCombEvaluator:
    """Combination evaluated at s = offset + i*(anchor + Im offset).

    The anchor is an exact extended-precision height; its phases at every
    relevant prime are reduced mod 2*pi once, so subsequent evaluations in a
    unit-size window run in plain float arithmetic.
    """

    def __init__(self, ev: CombEvaluator, t_anchor, bits: Optional[int] = None):
        self.ev = ev
        self.bits = bits or needed_bits(t_anchor)
        with mp.workprec(self.bits):
            self.t_anchor = mp.mpf(t_anchor)
        allp = ev._all_primes
        base = phases_for_ints(self.t_anchor, allp.tolist(), bits=self.bits) \
            if len(allp) else np.array([])
        self._base = {int(p): float(b) for p, b in zip(allp, base)}
        self._logs = {int(p): math.log(int(p)) for p in allp}

    def phase_of(self, p: int, dt: float) -> float:
        return self._base[int(p)] + dt * self._logs[int(p)]

    def __call__(self, offset: complex) -> EvalResult:
        offset = complex(offset)
        sigma = offset.real
        dt = offset.imag
        if sigma <= 1:
            raise DomainError("evaluation requires Re(s) > 1")
        if abs(dt) > 10.0:
            raise DomainError("anchored window is limited to |offset| <= 10")
        logs = []
        for j, F in enumerate(self.ev.specs):
            sub = self.ev._spec_primes[j]
            if len(sub) == 0:
                logs.append(0.0 + 0.0j)
                continue
            base = np.array([self._base[int(p)] for p in sub])
            lg = np.array([self._logs[int(p)] for p in sub])
            thetas = np.mod(base + dt * lg, TWO_PI)
            logs.append(complex(np.sum(local_logs(F, sub, sigma, thetas, self.ev.K))))
        res = self.ev._combine(
            sigma, lambda c: c.value_anchored(sigma, lambda p: self.phase_of(p, dt)),
            logs)
        return EvalResult(res.value, res.abs_error_bound,
                          dict(res.params, anchor=mpf_to_text(self.t_anchor),
                               offset_t=dt))


# --- zero certificates --------------------------------------------------------


@dataclass(frozen=True)
class ZeroCertificate:
    """Disk record for a claimed zero of the first combination.

    ``boundary_min`` is a certified lower bound for the combination modulus on
    the circle net of evaluation error; full certification additionally needs
    the non-coincidence margin ``g_min_on_disk`` from the partner combination.
    Heights beyond float range live in ``anchor`` (exact text form), with
    ``center`` holding the offset relative to it.
    """

    center: complex
    radius: float
    winding: int
    boundary_min: float
    tail_budget: float
    g_min_on_disk: Optional[float]
    status: str  # "certified" | "numeric-only"
    value_at_center: complex
    anchor: Optional[str] = None
    precision_bits: int = 53
    meta: dict = field(default_factory=dict)

    def consistent(self) -> bool:
        if self.status == "certified":
            ok = self.winding >= 1 and self.boundary_min > self.tail_budget
            if self.g_min_on_disk is not None:
                ok = ok and self.g_min_on_disk > self.tail_budget
            return ok
        return True

    def to_text(self) -> str:
        c, v = complex(self.center), complex(self.value_at_center)
        lines = ["zerosep-zero-certificate v1"]
        lines.append(f"status {self.status}")
        lines.append(f"center {float(c.real)!r} {float(c.imag)!r}")
        lines.append(f"radius {float(self.radius)!r}")
        lines.append(f"winding {int(self.winding)}")
        lines.append(f"boundary_min {float(self.boundary_min)!r}")
        lines.append(f"tail_budget {float(self.tail_budget)!r}")
        lines.append(f"g_min_on_disk "
                     f"{'none' if self.g_min_on_disk is None else repr(float(self.g_min_on_disk))}")
        lines.append(f"value_at_center {float(v.real)!r} {float(v.imag)!r}")
        lines.append(f"anchor {self.anchor if self.anchor else 'none'}")
        lines.append(f"precision_bits {int(self.precision_bits)}")
        for k in sorted(self.meta):
            lines.append(f"meta.{k} {self.meta[k]}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "ZeroCertificate":
        lines = text.strip().splitlines()
        if not lines or lines[0] != "zerosep-zero-certificate v1":
            raise DomainError("not a zero certificate record")
        rows = {}
        meta = {}
        for ln in lines[1:]:
            key, rest = ln.split(" ", 1)
            if key.startswith("meta."):
                meta[key[5:]] = rest
            else:
                rows[key] = rest
        cr, ci = (float(x) for x in rows["center"].split())
        vr, vi = (float(x) for x in rows["value_at_center"].split())
        return ZeroCertificate(
            center=complex(cr, ci), radius=float(rows["radius"]),
            winding=int(rows["winding"]), boundary_min=float(rows["boundary_min"]),
            tail_budget=float(rows["tail_budget"]),
            g_min_on_disk=None if rows["g_min_on_disk"] == "none"
            else float(rows["g_min_on_disk"]),
            status=rows["status"],
            value_at_center=complex(vr, vi),
            anchor=None if rows["anchor"] == "none" else rows["anchor"],
            precision_bits=int(rows["precision_bits"]), meta=meta)


@dataclass(frozen=True)
class RefineParams:
    newton_iters: int = 40
    fd_step: float = 1e-6
    numeric_tol: float = 1e-8
    initial_samples: int = 48
    max_samples: int = 4096
    shrink: tuple = (1.0, 0.6, 0.35, 0.2, 0.1)


def _circle_scan(H: Callable, center: complex, radius: float,
                 initial_samples: int, max_samples: int):
    """Adaptive circle sampling: winding count, certified boundary minimum net
    of evaluation error, and the largest evaluation budget on the circle."""
    cache: dict[float, EvalResult] = {}

    def val(t: float) -> EvalResult:
        r = cache.get(t)
        if r is None:
            s = center + radius * cmath.exp(2j * math.pi * t)
            r = _as_eval(H(s))
            if r.value == 0:
                raise ContourTooClose("exact zero sampled on the contour")
            cache[t] = r
        return r

    m0 = max(initial_samples, 8)
    params = [i / m0 for i in range(m0)] + [1.0]
    for t in params:
        val(t)
    work = [(params[i], params[i + 1]) for i in range(len(params) - 1)]
    safe = []
    while work:
        a, b = work.pop()
        ratio = val(b).value / val(a).value
        if abs(cmath.phase(ratio)) < math.pi / 2:
            safe.append((a, b))
            continue
        if len(cache) >= max_samples:
            raise RefinementExhausted("phase refinement exhausted on circle")
        mid = 0.5 * (a + b)
        val(mid)
        work.append((a, mid))
        work.append((mid, b))
    total = sum(cmath.phase(val(b).value / val(a).value) for a, b in safe)
    winding = round(total / TWO_PI)
    if abs(total / TWO_PI - winding) > 0.25:
        raise RefinementExhausted("argument sum not close to an integer")

    ts = sorted(cache)
    vs = [cache[t] for t in ts]
    tail_max = max(v.abs_error_bound for v in vs)
    # slope estimate between neighbors gives a Lipschitz margin for the gaps
    slopes = []
    gaps = []
    for i in range(len(ts) - 1):
        ds = abs(radius * (cmath.exp(2j * math.pi * ts[i + 1])
                           - cmath.exp(2j * math.pi * ts[i])))
        if ds > 0:
            slopes.append(abs(vs[i + 1].value - vs[i].value) / ds)
            gaps.append(ds)
    lip = 1.5 * max(slopes) if slopes else 0.0
    margin = lip * (max(gaps) / 2.0 if gaps else 0.0)
    boundary_min = min(abs(v.value) - v.abs_error_bound for v in vs) - margin
    return int(winding), float(boundary_min), float(tail_max)


def refine_zero(H: Callable, s0: complex, r0: float,
                params: RefineParams = RefineParams()) -> ZeroCertificate:
    """Newton-polish a zero of H near s0 and certify it by winding counts on
    shrinking circles; fall back to numeric-only status when the circles
    cannot be certified against the truncation budget."""
    s0 = complex(s0)
    if s0.real - r0 <= 1.0:
        raise DomainError("certification disk must stay inside Re(s) > 1")
    s = s0
    best_s, best_abs = s0, abs(_as_eval(H(s0)).value)
    scale0 = max(best_abs, 1.0)
    for _ in range(params.newton_iters):
        h = params.fd_step * max(1.0, abs(s.imag) if abs(s.imag) < 10 else 1.0)
        v0 = _as_eval(H(s)).value
        vp = _as_eval(H(s + h)).value
        vm = _as_eval(H(s - h)).value
        d = (vp - vm) / (2.0 * h)
        if abs(v0) < best_abs:
            best_s, best_abs = s, abs(v0)
        if d == 0:
            break
        step = -v0 / d
        if abs(step) > r0:
            step *= r0 / abs(step)
        s_new = s + step
        if s_new.real - 0.25 * r0 <= 1.0:
            s_new = complex(1.0 + 0.3 * r0, s_new.imag)
        s = s_new
        if abs(step) < 1e-14 * max(1.0, abs(s)):
            break
    v = _as_eval(H(s))
    if abs(v.value) < best_abs:
        best_s, best_abs = s, abs(v.value)
    center = best_s
    tail_center = _as_eval(H(center)).abs_error_bound

    found = None
    windings = []
    for frac in params.shrink:
        r = r0 * frac
        if center.real - r <= 1.0:
            continue
        try:
            w, bmin, tmax = _circle_scan(H, center, r, params.initial_samples,
                                         params.max_samples)
        except ContourTooClose:
            continue
        windings.append(w)
        if w >= 1:
            found = (r, w, bmin, tmax)
            if bmin > tmax:
                break
    numeric_ok = best_abs <= params.numeric_tol * scale0 or best_abs <= params.numeric_tol
    if found is None:
        if not numeric_ok and not any(w >= 1 for w in windings):
            raise NoZeroFound(
                f"Newton stalled at |H| = {best_abs:.3e} and no circle wound")
        return ZeroCertificate(center=center, radius=r0 * params.shrink[-1],
                               winding=0, boundary_min=0.0,
                               tail_budget=tail_center, g_min_on_disk=None,
                               status="numeric-only", value_at_center=v.value)
    r, w, bmin, tmax = found
    certified = bmin > tmax and w >= 1
    return ZeroCertificate(center=center, radius=r, winding=w,
                           boundary_min=bmin, tail_budget=tmax,
                           g_min_on_disk=None,
                           status="certified" if certified else "numeric-only",
                           value_at_center=_as_eval(H(center)).value)


def certify_noncoincidence(cert: ZeroCertificate, g_comb: Callable,
                           rings: int = 6, samples: int = 48) -> ZeroCertificate:
    """Lower-bound the partner combination on the closed certificate disk.

    Dense ring sampling plus a finite-difference Lipschitz margin, minus the
    partner's own truncation budget; a non-positive margin raises with the
    achieved value.
    """
    if cert.winding < 1:
        raise DomainError("certificate must carry winding >= 1")
    pts = [cert.center]
    for i in range(1, rings + 1):
        r = cert.radius * i / rings
        for k in range(samples):
            pts.append(cert.center + r * cmath.exp(2j * math.pi * k / samples))
    vals = [_as_eval(g_comb(p)) for p in pts]
    g_tail = max(v.abs_error_bound for v in vals)
    mesh = max(cert.radius / rings,
               math.pi * cert.radius / samples)
    # slope estimate over consecutive ring points
    slopes = []
    for i in range(1, len(pts) - 1):
        ds = abs(pts[i + 1] - pts[i])
        if ds > 1e-15:
            slopes.append(abs(vals[i + 1].value - vals[i].value) / ds)
    lip = 1.5 * max(slopes) if slopes else 0.0
    gmin = min(abs(v.value) for v in vals) - lip * (mesh / 2.0) - g_tail
    if gmin <= 0:
        raise MarginFailure(
            f"non-coincidence margin {gmin:.3e} is not positive", margin=gmin)
    certified = (cert.winding >= 1 and cert.boundary_min > cert.tail_budget
                 and gmin > cert.tail_budget)
    return replace(cert, g_min_on_disk=float(gmin),
                   status="certified" if certified else "numeric-only")


# --- vertical replication ------------------------------------------------------


def vertical_drift_log_bound(F: EulerProductSpec, sigma: float, accuracy: float,
                             P_align: int, depth: int = 40) -> float:
    """Bound for |log F(s + i tau) - log F(s)| when tau*log(p) sits within
    ``accuracy`` of 0 mod 2*pi for every prime p <= P_align."""
    ps = primes_up_to(P_align)
    if F.support is not None:
        ps = ps[np.isin(ps, np.array(sorted(F.support), dtype=np.int64))]
    total = 0.0
    if len(ps):
        pf = ps.astype(np.float64)
        absa = np.abs(F.a_values(ps))
        for k in range(1, depth + 1):
            bk = (absa ** k / k) if F.linear_factor else \
                np.array([abs(F.log_coeffs(int(p), k)) for p in ps])
            total += float(np.sum(bk * pf ** (-k * sigma)
                                  * np.minimum(k * accuracy, 2.0)))
    total += 2.0 * log_tail_bound(F, P_align, sigma)
    return total


def combination_drift_bound(f: CombPolynomial, specs: Sequence[EulerProductSpec],
                            spec_magnitudes: Sequence[float], sigma: float,
                            accuracy: float, P_align: int) -> float:
    """Value-domain bound for |H(s + i tau) - H(s)| near the certificate.

    Combines per-spec log drifts with the coefficient drift of the
    prime-finite coefficients (each smooth index n moves by at most
    Omega(n) * accuracy in phase).  ``spec_magnitudes`` are |F_j| evaluated at
    the certificate center (drift inflates them by the log bound itself).
    """
    spec_logs = [vertical_drift_log_bound(F, sigma, accuracy, P_align)
                 for F in specs]
    total = 0.0
    for coeff, exps in f.monomials:
        cval = abs(coeff.value(complex(sigma, 0.0)))
        coeff_drift = 0.0
        for n, a in (coeff.terms or ((1, 0.0),)):
            if n > 1:
                omega = sum(_prime_factors(n).values())
                coeff_drift += abs(a) * n ** (-sigma) * min(omega * accuracy, 2.0)
        for p, _ in coeff.inverse_factors:
            # inverse factors are zero-free on the closed half-plane, so their
            # drift is controlled by the same phase accuracy at prime p
            coeff_drift += cval * min(accuracy, 2.0)
        prod_mag = 1.0
        log_drift = 0.0
        for j, a_j in enumerate(exps):
            if a_j:
                mag = float(spec_magnitudes[j]) * math.exp(min(spec_logs[j], 50.0))
                prod_mag *= mag ** a_j
                log_drift += a_j * spec_logs[j]
        total += cval * prod_mag * math.expm1(min(log_drift, 700.0)) + \
            coeff_drift * prod_mag
    return total


# --- strip counting -------------------------------------------------------------


@dataclass(frozen=True)
class StripCount:
    total: int
    flagged: tuple  # ((sigma_lo, sigma_hi, t_lo, t_hi), reason) pairs
    cells: int


def count_zeros_in_strip(H: Callable, sigma_range: tuple, t_range: tuple,
                         subdivision=4, initial_samples: int = 32,
                         max_samples: int = 8192, max_depth: int = 2) -> StripCount:
    """Sum of winding numbers over a subdivided rectangle in Re(s) > 1.

    Cells whose boundary cannot be resolved are split up to ``max_depth``
    times and flagged (not fatal) if still unresolved.
    """
    s_lo, s_hi = float(sigma_range[0]), float(sigma_range[1])
    if s_lo <= 1:
        raise DomainError("strip must sit inside Re(s) > 1")
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if isinstance(subdivision, int):
        n_s = n_t = subdivision
    else:
        n_s, n_t = subdivision

    def rect_winding(a, b, c, d):
        # boundary of [a,b] x [c,d] traversed counterclockwise
        cache: dict[complex, complex] = {}

        def val(z: complex) -> complex:
            v = cache.get(z)
            if v is None:
                v = _as_eval(H(z)).value
                if v == 0:
                    raise ContourTooClose("zero on the cell boundary")
                cache[z] = v
            return v

        corners = [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]
        pts: list[complex] = []
        m = max(initial_samples // 4, 4)
        for i in range(4):
            z0, z1 = corners[i], corners[(i + 1) % 4]
            for k in range(m):
                pts.append(z0 + (z1 - z0) * (k / m))
        pts.append(pts[0])
        # adaptive refinement on segments
        segs = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        total = 0.0
        count = [0]

        def phase_step(z0, z1, depth=0):
            ratio = val(z1) / val(z0)
            ph = cmath.phase(ratio)
            if abs(ph) < math.pi / 2:
                return ph
            if count[0] >= max_samples:
                raise RefinementExhausted("cell boundary refinement exhausted")
            count[0] += 1
            zm = 0.5 * (z0 + z1)
            return phase_step(z0, zm) + phase_step(zm, z1)

        for z0, z1 in segs:
            total += phase_step(z0, z1)
        w = round(total / TWO_PI)
        if abs(total / TWO_PI - w) > 0.25:
            raise RefinementExhausted("cell argument sum not integral")
        return int(w)

    total = 0
    flagged = []
    cells = 0
    work = []
    for i in range(n_s):
        for j in range(n_t):
            work.append((s_lo + (s_hi - s_lo) * i / n_s,
                         s_lo + (s_hi - s_lo) * (i + 1) / n_s,
                         t_lo + (t_hi - t_lo) * j / n_t,
                         t_lo + (t_hi - t_lo) * (j + 1) / n_t, 0))
    while work:
        a, b, c, d, depth = work.pop()
        cells += 1
        try:
            total += rect_winding(a, b, c, d)
        except ContourTooClose as exc:
            if depth < max_depth:
                am, cm = 0.5 * (a + b), 0.5 * (c + d)
                work.extend([(a, am, c, cm, depth + 1), (am, b, c, cm, depth + 1),
                             (a, am, cm, d, depth + 1), (am, b, cm, d, depth + 1)])
            else:
                flagged.append(((a, b, c, d), str(exc)))
    return StripCount(total=total, flagged=tuple(flagged), cells=cells)
