"""Degree-2 Rademacher chaos: exact moments, moment ratios, kappa and anti-concentration.

A form is ``x + sum_i a_i e_i + sum_{i != j} b_ij e_i e_j`` with vector-valued
coefficients.  Everything is computed by enumerating all 2^n sign patterns
(up to ``cap``); integer coefficients give integer power sums, so moment
inequalities are decided by exact integer comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import _kernels
from .model import (
    FiniteDistribution,
    ModelError,
    NormSpec,
    exact_key,
    sign_vector,
    to_fraction,
)
from .problab import clopper_pearson
from .rng import uniforms

__all__ = [
    "DEFAULT_ENUM_CAP",
    "L4_L2_THRESHOLD",
    "L2_L1_THRESHOLD",
    "LEMMA2_P_THRESHOLD",
    "EnumerationCapError",
    "ChaosForm",
    "chaos_eval",
    "chaos_values",
    "Moments",
    "chaos_exact_moments",
    "HypercontractivityReport",
    "hypercontractivity_report",
    "KappaEstimate",
    "kappa_of",
    "Prop1Result",
    "proposition1_check",
    "Lemma2Result",
    "lemma2_check",
    "random_chaos_form",
]

DEFAULT_ENUM_CAP = 16
# working constants (empirical choices, not derived): moment ratio c = 3, its square 9,
# and the floor for P(|chaos| >= |constant term|)
L4_L2_THRESHOLD = 3
L2_L1_THRESHOLD = 9
LEMMA2_P_THRESHOLD = Fraction(1, 16)


class EnumerationCapError(RuntimeError):
    def __init__(self, n, cap):
        super().__init__(f"n={n} exceeds the enumeration cap {cap} (2^{n} patterns); "
                         f"use sampling mode")
        self.n = n
        self.cap = cap


@dataclass(frozen=True, eq=False)
class ChaosForm:
    x: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x)
        if x.ndim == 0:
            x = x.reshape(1)
        d = x.shape[0]
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        if a.ndim == 1:
            a = a.reshape(-1, 1) if d == 1 else a.reshape(-1, d)
        n = a.shape[0]
        if b.size == 0:
            b = np.zeros((n, n, d), dtype=a.dtype if a.size else x.dtype)
        if b.ndim == 2:
            b = b[..., None]
        if a.size == 0:
            a = np.zeros((n, d), dtype=x.dtype)
        if a.shape != (n, d) or b.shape != (n, n, d):
            raise ModelError(f"inconsistent chaos shapes x{x.shape} a{a.shape} b{b.shape}")
        if np.any(b[np.arange(n), np.arange(n)] != 0):
            raise ModelError("quadratic coefficients must have a zero diagonal")
        kinds = {arr.dtype.kind for arr in (x, a, b)}
        dtype = np.float64 if "f" in kinds else np.int64
        if not kinds <= {"i", "u", "f", "b"}:
            raise ModelError("chaos coefficients must be real numbers")
        for name, arr in (("x", x), ("a", a), ("b", b)):
            arr = np.ascontiguousarray(arr, dtype=dtype)
            if dtype == np.float64 and not np.all(np.isfinite(arr)):
                raise ModelError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def scalar(cls, x=0, a=(), b=None, n=None):
        a = () if a is None else a
        a = np.asarray(a, dtype=np.int64 if all(float(v).is_integer() for v in np.ravel(a)) else np.float64)
        n = n if n is not None else (a.shape[0] if a.size else (np.asarray(b).shape[0] if b is not None else 0))
        if a.size == 0:
            a = np.zeros(n, dtype=np.int64)
        if b is None:
            b = np.zeros((n, n), dtype=np.int64)
        return cls(np.asarray([x]), a.reshape(n, 1), np.asarray(b).reshape(n, n, 1))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[0]


def chaos_eval(form: ChaosForm, eps) -> np.ndarray:
    """Value of the form at one sign vector."""
    e = sign_vector(eps)
    if e.shape[0] != form.n:
        raise ModelError(f"sign vector has length {e.shape[0]}, form has n={form.n}")
    ee = e.astype(form.x.dtype)
    quad = np.einsum("i,ijc,j->c", ee, form.b, ee)
    return form.x + ee @ form.a + quad


def chaos_values(form: ChaosForm, cap: int = DEFAULT_ENUM_CAP, backend=None) -> np.ndarray:
    """Values on all 2^n patterns, row ``p`` matching ``all_sign_patterns(n)[p]``."""
    if form.n > cap:
        raise EnumerationCapError(form.n, cap)
    return _kernels.chaos_values(form.x, form.a, form.b, backend)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Moments:
    L1: float
    L2: float
    L4: float
    s1: object
    s2: object
    s4: object
    count: int
    exact: bool


def _power_sums(values: np.ndarray, norm: NormSpec):
    """Sums of norm^1, norm^2, norm^4 over rows; Python ints when exact."""
    norm.check_dim(values.shape[1])
    if values.dtype.kind == "i":
        v = [[int(c) for c in row] for row in values.tolist()]
        if norm.kind in ("absolute", "supremum") or (norm.kind == "p" and norm.p == 1):
            r = [max(abs(c) for c in row) if norm.kind != "p" else sum(abs(c) for c in row) for row in v]
            return sum(r), sum(x * x for x in r), sum(x**4 for x in r), True
        if norm.kind == "euclidean":
            sq = [sum(c * c for c in row) for row in v]
            s1 = math.fsum(math.sqrt(s) for s in sq)
            return s1, sum(sq), sum(s * s for s in sq), False
    r = norm.batch(values)
    return math.fsum(r), math.fsum(r**2), math.fsum(r**4), False


def chaos_exact_moments(form: ChaosForm, norm: NormSpec = NormSpec(), cap: int = DEFAULT_ENUM_CAP,
                        backend=None) -> Moments:
    """L1, L2, L4 norms of ``|chaos|`` averaged over all sign patterns."""
    vals = chaos_values(form, cap, backend)
    s1, s2, s4, exact = _power_sums(vals, norm)
    count = vals.shape[0]
    return Moments(float(s1) / count, math.sqrt(float(s2) / count), (float(s4) / count) ** 0.25,
                   s1, s2, s4, count, exact)


@dataclass(frozen=True)
class HypercontractivityReport:
    L4_over_L2: float
    L2_over_L1: float
    holds_L4: bool
    holds_L1: bool
    interpolation_holds: bool
    exact: bool
    moments: Moments


def _all_int(*xs):
    return all(isinstance(x, int) for x in xs)


def _le(lhs, rhs, exact):
    if exact:
        return lhs <= rhs
    return float(lhs) <= float(rhs) * (1 + 1e-12) + 1e-300


def hypercontractivity_report(form: ChaosForm, norm: NormSpec = NormSpec(),
                              cap: int = DEFAULT_ENUM_CAP) -> HypercontractivityReport:
    """Moment ratios of the chaos against the working constants.

    Checks ``L4 <= 3 L2``, ``L2 <= 9 L1`` and the interpolation inequality
    ``E xi^2 <= (E|xi|)^(2/3) (E xi^4)^(1/3)`` (cubed: ``s2^3 <= s1^2 s4``).
    """
    m = chaos_exact_moments(form, norm, cap)
    N = m.count
    c4 = L4_L2_THRESHOLD**4
    c1 = L2_L1_THRESHOLD**2
    holds_l4 = _le(m.s4 * N, c4 * m.s2 * m.s2, _all_int(m.s2, m.s4))
    holds_l1 = _le(m.s2 * N, c1 * m.s1 * m.s1, _all_int(m.s1, m.s2))
    interp = _le(m.s2**3, m.s1 * m.s1 * m.s4, _all_int(m.s1, m.s2, m.s4))
    r42 = m.L4 / m.L2 if m.L2 > 0 else 1.0
    r21 = m.L2 / m.L1 if m.L1 > 0 else 1.0
    return HypercontractivityReport(r42, r21, bool(holds_l4), bool(holds_l1), bool(interp), m.exact, m)


# ---------------------------------------------------------------------------
# kappa and anti-concentration of a shifted mean-zero law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KappaEstimate:
    value: object
    exact: bool
    direction: tuple | None = None


def _require_mean_zero(dist: FiniteDistribution, tol=1e-10):
    if not isinstance(dist, FiniteDistribution) or dist.points is None:
        raise ModelError("need a finite-support distribution over R^d")
    mean = dist.mean()
    if any(abs(float(c)) > tol for c in mean):
        raise ModelError(f"distribution has nonzero mean {tuple(float(c) for c in mean)}")


def _sphere_directions(d: int, budget: int) -> np.ndarray:
    """Deterministic directions: coordinate axes, diagonals, then Halton points."""
    dirs = [np.eye(d)[i] for i in range(d)]
    if d == 2:
        ang = np.pi * (np.arange(budget) + 0.5) / budget
        dirs += list(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    elif d > 2:
        h = qmc.Halton(d, scramble=False).random(budget + 1)[1:]
        g = ndtri(np.clip(h, 1e-12, 1 - 1e-12))
        dirs += list(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.array(dirs)


def kappa_of(dist: FiniteDistribution, norm: NormSpec = NormSpec(), direction_budget: int = 256,
             tol: float = 1e-10) -> KappaEstimate:
    """``inf_u (E|<u,Y>|)^2 / E <u,Y>^2`` over functionals of a mean-zero law.

    Exact (a Fraction) for d=1.  For d>1 the infimum is taken over a fixed
    direction sweep and is therefore an upper bound on the true value.  The
    ratio is scale invariant, so ``norm`` (whose dual ball the functionals
    range over) does not change the result.
    """
    _require_mean_zero(dist, tol)
    probs = dist.probs
    pts = dist.exact_points()
    if dist.dim == 1:
        e1 = sum(p * abs(y[0]) for p, y in zip(probs, pts))
        e2 = sum(p * y[0] * y[0] for p, y in zip(probs, pts))
        if e2 == 0:
            return KappaEstimate(Fraction(1), True)
        return KappaEstimate(e1 * e1 / e2, True, (1.0,))
    Y = dist.points_array()
    P = np.array([float(p) for p in probs])
    best, best_u = math.inf, None
    for u in _sphere_directions(dist.dim, direction_budget):
        proj = Y @ u
        e2 = float(P @ (proj * proj))
        if e2 <= 1e-300:
            continue
        ratio = float(P @ np.abs(proj)) ** 2 / e2
        if ratio < best:
            best, best_u = ratio, tuple(float(c) for c in u)
    if best_u is None:
        return KappaEstimate(1.0, False)
    return KappaEstimate(best, False, best_u)


@dataclass(frozen=True)
class Prop1Result:
    lhs: object
    bound: object
    holds: bool | None
    kappa: KappaEstimate

    @property
    def status(self):
        if self.holds:
            return "holds"
        return "fails" if self.kappa.exact else "inconclusive"


def proposition1_check(a, dist: FiniteDistribution, norm: NormSpec = NormSpec(),
                       direction_budget: int = 256) -> Prop1Result:
    """Exact ``P(|a + Y| >= |a|)`` against ``kappa / 4``.

    With an estimated kappa (d > 1) a pass is still conclusive, since the
    estimate can only overshoot; a miss is reported as inconclusive.
    """
    kappa = kappa_of(dist, norm, direction_budget)
    a_vec = [to_fraction(c) for c in np.ravel(np.asarray(a, dtype=object))]
    if len(a_vec) != dist.dim:
        raise ModelError("a and the distribution have different dimensions")
    ref = exact_key(a_vec, norm)
    lhs = Fraction(0)
    for p, y in zip(dist.probs, dist.exact_points()):
        if _ge_key(exact_key([ai + yi for ai, yi in zip(a_vec, y)], norm), ref):
            lhs += p
    bound = kappa.value / 4 if kappa.exact else kappa.value / 4.0
    holds = lhs >= bound if kappa.exact else float(lhs) >= bound
    return Prop1Result(lhs, bound, bool(holds), kappa)


def _ge_key(key, ref):
    if isinstance(key, float) or isinstance(ref, float):
        return float(key) >= float(ref) * (1 - 1e-12)
    return key >= ref


# ---------------------------------------------------------------------------
# anti-concentration of the chaos around its constant term
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma2Result:
    p: object
    measured_c: float
    exact: bool
    ci: tuple | None = None
    samples: int | None = None


def _keys_ge(vals: np.ndarray, ref_vec, norm: NormSpec) -> np.ndarray:
    keys = norm.keys(vals)
    ref = norm.keys(np.asarray(ref_vec)[None, :])[0]
    if keys.dtype.kind in "iu":
        return keys >= ref
    return keys >= ref * (1 - 1e-12)


def lemma2_check(form: ChaosForm, norm: NormSpec = NormSpec(), cap: int = DEFAULT_ENUM_CAP,
                 samples: int = 10**5, seed: int = 0, confidence: float = 0.95) -> Lemma2Result:
    """``P(|chaos| >= |x|)`` over uniform signs and the implied constant ``1/p``.

    Exact for n up to ``cap``; above it, ``samples`` seeded sign vectors with
    a Clopper-Pearson interval, flagged approximate.
    """
    if form.n <= cap:
        vals = chaos_values(form, cap)
        hits = int(np.count_nonzero(_keys_ge(vals, form.x, norm)))
        p = Fraction(hits, vals.shape[0])
        return Lemma2Result(p, float(1 / p) if p else math.inf, True)
    u = uniforms(seed, 0, 0, samples, form.n)
    eps = np.where(u < 0.5, 1, -1).astype(form.x.dtype)
    vals = form.x[None, :] + eps @ form.a + np.einsum("pi,ijc,pj->pc", eps, form.b, eps)
    hits = int(np.count_nonzero(_keys_ge(vals, form.x, norm)))
    p = hits / samples
    return Lemma2Result(p, 1 / p if p else math.inf, False, clopper_pearson(hits, samples, confidence),
                        samples)


def random_chaos_form(rng: np.random.Generator, n: int, low: int = -5, high: int = 5, dim: int = 1,
                      linear: bool = True, quadratic: bool = True) -> ChaosForm:
    """Integer-coefficient form with entries uniform on ``[low, high]``."""
    x = rng.integers(low, high + 1, size=dim)
    a = rng.integers(low, high + 1, size=(n, dim)) if linear else np.zeros((n, dim), dtype=np.int64)
    b = rng.integers(low, high + 1, size=(n, n, dim)) if quadratic else np.zeros((n, n, dim), dtype=np.int64)
    b[np.arange(n), np.arange(n)] = 0
    return ChaosForm(x, a, b)

