"""Sign-swap coupling and the k=2 decoupling decompositions, checked exactly.

The coupling swaps ``(X_i, Xt_i)`` whenever ``eps_i = -1``.  Conditionally on
both samples, ``4 f_ij(Zt_i, Z_j)`` is a polynomial of degree one in each of
``eps_i, eps_j``; summing over pairs gives a degree-2 Rademacher chaos whose
constant term is the polarized sum.  The tail checks here run on finite
product spaces with integer weights, so every verdict is exact.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chaos import ChaosForm, chaos_values
from .model import (
    FiniteDistribution,
    KernelFamily,
    ModelError,
    NormSpec,
    TableKernel,
    all_sign_patterns,
    exact_key,
    sign_vector,
    values_equal,
)
from .problab import (
    DEFAULT_OUTCOME_CAP,
    NormLaw,
    _q,
    default_t_grid,
    joint_outcome_keys,
    outcome_space,
    params_digest,
    require_symmetric,
)
from .ustat import statistic_values

__all__ = [
    "CoupledPairs",
    "build_coupled_pairs",
    "IdentityVerdict",
    "check_identity_8",
    "check_identity_9",
    "coupling_law_check",
    "CheckRow",
    "lemma1_tail_check",
    "symmetrization_check",
    "universal_symmetrization_falsifier",
    "DecompositionReport",
    "decomposition_4_check",
    "symmetric_reverse_decomposition_check",
    "inequality5_check",
    "inequality6_check",
    "chaos_form_from_coupling",
    "random_table_kernel",
]


@dataclass(frozen=True, eq=False)
class CoupledPairs:
    Z: np.ndarray
    Zt: np.ndarray
    X: np.ndarray
    Xt: np.ndarray
    eps: np.ndarray


def build_coupled_pairs(X, Xt, eps) -> CoupledPairs:
    """``(Z_i, Zt_i) = (X_i, Xt_i)`` if ``eps_i = +1`` and ``(Xt_i, X_i)`` otherwise."""
    X = np.asarray(X)
    Xt = np.asarray(Xt)
    e = sign_vector(eps)
    if X.shape != Xt.shape or X.shape[0] != e.shape[0]:
        raise ModelError(f"length mismatch: X{X.shape}, Xt{Xt.shape}, eps{e.shape}")
    keep = (e == 1).reshape((-1,) + (1,) * (X.ndim - 1))
    return CoupledPairs(np.where(keep, X, Xt), np.where(keep, Xt, X), X, Xt, e)


# ---------------------------------------------------------------------------
# algebraic identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IdentityVerdict:
    holds: bool
    lhs: np.ndarray
    rhs: np.ndarray

    def __bool__(self):
        return self.holds


def _f(kernel, i, j, x, y):
    return np.asarray(kernel.evaluate((i, j), (x, y)))


def check_identity_8(kernel: KernelFamily, X_i, Xt_i, X_j, Xt_j, eps_i, eps_j, i=0, j=1) -> IdentityVerdict:
    """``4 f_ij(Zt_i, Z_j)`` against its four-term sign expansion."""
    ei, ej = (int(v) for v in sign_vector([eps_i, eps_j]))
    zt_i = Xt_i if ei == 1 else X_i
    z_j = X_j if ej == 1 else Xt_j
    lhs = 4 * _f(kernel, i, j, zt_i, z_j)
    rhs = ((1 - ei) * (1 + ej) * _f(kernel, i, j, X_i, X_j)
           + (1 + ei) * (1 + ej) * _f(kernel, i, j, Xt_i, X_j)
           + (1 - ei) * (1 - ej) * _f(kernel, i, j, X_i, Xt_j)
           + (1 + ei) * (1 - ej) * _f(kernel, i, j, Xt_i, Xt_j))
    return IdentityVerdict(values_equal(lhs, rhs), lhs, rhs)


def check_identity_9(kernel: KernelFamily, X_i, Xt_i, X_j, Xt_j, i=0, j=1) -> IdentityVerdict:
    """Conditional mean of ``4 f_ij(Zt_i, Z_j)`` over the four sign pairs.

    The conditional expectation is the exact average over the four
    equiprobable sign combinations; ``4 * (1/4) * sum`` is computed as the
    plain sum of ``f`` so integer kernels stay integer.
    """
    lhs = None
    for ei, ej in itertools.product((1, -1), repeat=2):
        zt_i = Xt_i if ei == 1 else X_i
        z_j = X_j if ej == 1 else Xt_j
        v = _f(kernel, i, j, zt_i, z_j)
        lhs = v if lhs is None else lhs + v
    rhs = (_f(kernel, i, j, X_i, X_j) + _f(kernel, i, j, Xt_i, X_j)
           + _f(kernel, i, j, X_i, Xt_j) + _f(kernel, i, j, Xt_i, Xt_j))
    return IdentityVerdict(values_equal(lhs, rhs), lhs, rhs)


def chaos_form_from_coupling(kernel: KernelFamily, X, Xt) -> ChaosForm:
    """Chaos in the signs equal to ``4 sum_{i != j} f_ij(Zt_i, Z_j)``.

    Expanding the four-term identity gives constant term = polarized sum,
    linear and quadratic coefficients built from
    ``A = f(X_i,X_j), B = f(Xt_i,X_j), C = f(X_i,Xt_j), D = f(Xt_i,Xt_j)``.
    """
    n = kernel.n
    d = kernel.out_dim
    X = list(np.asarray(X))
    Xt = list(np.asarray(Xt))
    vals = {}
    for i, j in itertools.permutations(range(n), 2):
        vals[i, j] = (_f(kernel, i, j, X[i], X[j]), _f(kernel, i, j, Xt[i], X[j]),
                      _f(kernel, i, j, X[i], Xt[j]), _f(kernel, i, j, Xt[i], Xt[j]))
    dtype = np.result_type(*[v.dtype for quad in vals.values() for v in quad]) if vals else np.int64
    x = np.zeros(d, dtype=dtype)
    a = np.zeros((n, d), dtype=dtype)
    b = np.zeros((n, n, d), dtype=dtype)
    for (i, j), (A, B, C, D) in vals.items():
        x += A + B + C + D
        a[i] += -A + B - C + D
        a[j] += A + B - C - D
        b[i, j] = -A + B + C - D
    return ChaosForm(x, a, b)


def _table_chaos_batch(table5, X, Xt):
    """Vectorized ``chaos_form_from_coupling`` for a tabulated kernel.

    ``table5`` has shape (n, n, m, m, d); ``X``/``Xt`` are label rows.
    """
    n = table5.shape[0]
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    off = (ii != jj)[..., None]
    A = table5[ii, jj, X[ii], X[jj]] * off
    B = table5[ii, jj, Xt[ii], X[jj]] * off
    C = table5[ii, jj, X[ii], Xt[jj]] * off
    D = table5[ii, jj, Xt[ii], Xt[jj]] * off
    x = (A + B + C + D).sum(axis=(0, 1))
    a = (-A + B - C + D).sum(axis=1) + (A + B - C - D).sum(axis=0)
    b = -A + B + C - D
    return ChaosForm(x, a, b)


# ---------------------------------------------------------------------------
# law of the coupled pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LawComparison:
    equal: bool
    atoms: int
    n: int
    support: int


def coupling_law_check(dist: FiniteDistribution, n: int, cap: int = DEFAULT_OUTCOME_CAP) -> LawComparison:
    """Compare the joint law of ``(Z, Zt)`` with that of ``(X, Xt)`` atom by atom.

    Enumerates every ``(X, Xt, eps)``; both laws are integer weight vectors
    over the ``m^(2n)`` joint outcomes (the sign factor ``2^n`` is carried
    explicitly), so equality is exact.
    """
    m = dist.size
    count, _, chunks = outcome_space(dist, 2, n, cap)
    if count * 2**n > cap:
        from .problab import ResourceCapError
        raise ResourceCapError(count * 2**n, cap)
    patterns = all_sign_patterns(n)
    powers = m ** np.arange(2 * n - 1, -1, -1, dtype=np.int64)
    law_x = np.zeros(count, dtype=object)
    law_z = np.zeros(count, dtype=object)
    for labels, w in chunks():
        X = labels[:, 0, :]
        Xt = labels[:, 1, :]
        code_x = np.concatenate([X, Xt], axis=1) @ powers
        np.add.at(law_x, code_x, w.astype(object) * 2**n)
        for eps in patterns:
            keep = eps == 1
            Z = np.where(keep, X, Xt)
            Zt = np.where(keep, Xt, X)
            code_z = np.concatenate([Z, Zt], axis=1) @ powers
            np.add.at(law_z, code_z, w.astype(object))
    equal = all(int(a) == int(b) for a, b in zip(law_x, law_z))
    return LawComparison(equal, int(count), n, m)


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------

@dataclass
class CheckRow:
    check: str
    params_digest: str
    t: float
    lhs: object
    rhs: object
    holds: bool
    margin: object
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "check": self.check,
            "params_digest": self.params_digest,
            "t": float(self.t),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "holds": bool(self.holds),
            "margin": float(self.margin),
        }
        for key in ("lhs", "rhs", "margin"):
            v = getattr(self, key)
            if isinstance(v, Fraction):
                d[key + "_exact"] = str(v)
        d.update(self.extra)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _atom_law(atoms_with_probs, norm, exponent=None):
    """NormLaw of ``norm(point)`` for a list of (point, probability) pairs."""
    den = 1
    for _, p in atoms_with_probs:
        den = den * p.denominator // math.gcd(den, p.denominator)
    keys = [exact_key(pt, norm) for pt, _ in atoms_with_probs]
    weights = [int(p * den) for _, p in atoms_with_probs]
    return NormLaw(keys, weights, den, norm.exponent if exponent is None else exponent)


def _sum_law(dist: FiniteDistribution, norm, sign=1):
    pts = dist.exact_points()
    pairs = []
    for (p, x), (q, y) in itertools.product(zip(dist.probs, pts), repeat=2):
        pairs.append((tuple(a + sign * b for a, b in zip(x, y)), p * q))
    return _atom_law(pairs, norm)


def _dist_digest(dist, norm, **extra):
    return params_digest(dist=dist.to_dict(), norm=norm.to_dict(), **extra)


def lemma1_tail_check(dist: FiniteDistribution, norm: NormSpec = NormSpec(), t_grid=None) -> list[CheckRow]:
    """``P(|X| >= t) <= 3 P(|X + Y| >= 2t/3)`` for i.i.d. X, Y, by enumeration."""
    if not isinstance(dist, FiniteDistribution):
        raise ModelError("lemma1_tail_check needs a finite-support distribution; use the mc engine")
    lx = _atom_law(list(zip(dist.exact_points(), dist.probs)), norm)
    ls = _sum_law(dist, norm)
    grid = t_grid if t_grid is not None else default_t_grid(lx)
    digest = _dist_digest(dist, norm, check="lemma1")
    rows = []
    for t in grid:
        tq = _q(t)
        lhs = lx.tail(tq)
        rhs = 3 * ls.tail(2 * tq / 3)
        rows.append(CheckRow("lemma1", digest, float(t), lhs, rhs, lhs <= rhs, rhs - lhs))
    return rows


def symmetrization_check(dist: FiniteDistribution, c, t, norm: NormSpec = NormSpec()) -> CheckRow:
    """Exact ``P(|X| >= t)`` against ``c P(c |X - Y| >= t)``."""
    lx = _atom_law(list(zip(dist.exact_points(), dist.probs)), norm)
    ld = _sum_law(dist, norm, sign=-1)
    cq, tq = _q(c), _q(t)
    lhs = lx.tail(tq)
    rhs = cq * ld.tail(tq, scale=cq)
    return CheckRow("symmetrization", _dist_digest(dist, norm, c=str(c)), float(t), lhs, rhs,
                    lhs <= rhs, rhs - lhs, {"c": float(c)})


def universal_symmetrization_falsifier(c_values=range(1, 11)) -> dict:
    """Exact counterexamples to ``P(|X| >= t) <= c P(c|X - Y| >= t)``.

    Family: X uniform on ``{mu - 1, mu + 1}``.  ``X - Y`` takes values in
    ``{-2, 0, 2}`` whatever ``mu`` is, while ``|X|`` grows with ``mu``; with
    ``mu = 2c + 2`` and ``t = mu - 1 = 2c + 1`` the left side is 1 and the
    right side is 0.  The point mass at 1 (``t = 1``) breaks every c at once.
    """
    witnesses = []
    norm = NormSpec("absolute")
    for c in c_values:
        mu = 2 * c + 2
        dist = FiniteDistribution.uniform([mu - 1, mu + 1])
        row = symmetrization_check(dist, c, mu - 1, norm)
        witnesses.append({
            "c": c, "family": "uniform{mu-1, mu+1}", "mu": mu, "t": mu - 1,
            "lhs": str(row.lhs), "rhs": str(row.rhs), "violated": not row.holds,
            "margin": str(row.lhs - row.rhs),
        })
    point = FiniteDistribution.uniform([1])
    degenerate = [{"c": c, "violated": not symmetrization_check(point, c, 1, norm).holds}
                  for c in c_values]
    return {
        "check": "universal_symmetrization_falsifier",
        "witnesses": witnesses,
        "point_mass": degenerate,
        "all_violated": all(w["violated"] for w in witnesses),
    }


# ---------------------------------------------------------------------------
# tail decompositions on finite product spaces
# ---------------------------------------------------------------------------

@dataclass
class DecompositionReport:
    check: str
    rows: list
    certificates: dict
    holds: bool

    def to_dict(self):
        return {"check": self.check, "holds": self.holds, "certificates": self.certificates,
                "rows": [r.to_dict() for r in self.rows]}


def _key_ge(keys: np.ndarray, thr: Fraction) -> np.ndarray:
    """Exact ``keys >= thr`` for integer or float key arrays."""
    if keys.dtype == object:
        return np.array([_q(k) >= thr for k in keys], dtype=bool)
    if keys.dtype.kind in "iu":
        return keys >= math.ceil(thr)
    f = float(thr)
    if Fraction(f) < thr:
        f = float(np.nextafter(f, np.inf))
    return keys >= f


def _law(keys, weights, total, norm):
    return NormLaw.from_outcomes(keys, weights, total, norm.exponent)


def _thr(t, norm):
    t = _q(t)
    return t**norm.exponent if norm.exponent != 1 else t


def _norms(keys, norm):
    k = keys.astype(np.float64)
    return k if norm.exponent == 1 else k ** (1.0 / norm.exponent)


def _prep(kernel, dist, n, norm, names, cap):
    if kernel.order != 2:
        raise ModelError("decompositions are defined for k=2")
    return joint_outcome_keys(kernel, dist, n, norm, names, rows=2, cap=cap, values=True)


def decomposition_4_check(kernel: KernelFamily, dist: FiniteDistribution, n: int,
                          norm: NormSpec = NormSpec(), t_grid=None,
                          cap: int = DEFAULT_OUTCOME_CAP) -> DecompositionReport:
    """``P(|A + B| >= t) <= P(|T_n| >= t/3) + 2 P(|M| >= t/3)`` exactly.

    ``A``, ``B`` are the coupled sums of the two samples, ``M`` the mixed
    sum ``sum f(X_i, Xt_j)``.  Certificates: ``A + B = T_n - M - M'``
    outcome by outcome, ``M`` and ``M' = sum f(Xt_i, X_j)`` equal in law, and
    on every outcome the left event implies one of the three right events.
    """
    names = ["coupled_pair", "T_n", "mixed_forward", "mixed"]
    keys, w, total, vals = _prep(kernel, dist, n, norm, names, cap)
    ab, tn, m1, m2 = (keys[k] for k in names)
    identity = values_equal(vals["coupled_pair"], vals["T_n"] - vals["mixed_forward"] - vals["mixed"])
    tri = _norms(ab, norm) <= (_norms(tn, norm) + _norms(m1, norm) + _norms(m2, norm)) * (1 + 1e-12) + 1e-12
    law_ab, law_tn, law_m1, law_m2 = (_law(k, w, total, norm) for k in (ab, tn, m1, m2))
    same_law = law_m1.atoms() == law_m2.atoms()
    grid = t_grid if t_grid is not None else default_t_grid(law_ab)
    digest = params_digest(check="decomposition4", kernel=_kdict(kernel), dist=dist.to_dict(), n=n,
                           norm=norm.to_dict())
    rows, implication = [], True
    for t in grid:
        tq = _q(t)
        lhs = law_ab.tail(tq)
        rhs = law_tn.tail(tq / 3) + 2 * law_m1.tail(tq / 3)
        left = _key_ge(ab, _thr(tq, norm))
        right = (_key_ge(tn, _thr(tq / 3, norm)) | _key_ge(m1, _thr(tq / 3, norm))
                 | _key_ge(m2, _thr(tq / 3, norm)))
        ok = bool(np.all(right[left]))
        implication &= ok
        rows.append(CheckRow("decomposition4", digest, float(t), lhs, rhs, lhs <= rhs, rhs - lhs,
                             {"pointwise": ok}))
    certs = {"algebraic_identity": bool(identity), "triangle": bool(np.all(tri)),
             "mixed_equal_in_law": bool(same_law), "pointwise_implication": bool(implication)}
    holds = all(r.holds for r in rows) and all(certs.values())
    return DecompositionReport("decomposition4", rows, certs, holds)


def symmetric_reverse_decomposition_check(kernel: KernelFamily, dist: FiniteDistribution, n: int,
                                          norm: NormSpec = NormSpec(), t_grid=None,
                                          cap: int = DEFAULT_OUTCOME_CAP) -> DecompositionReport:
    """For symmetric kernels: the mixed sum bounded by ``T_n`` and the coupled sums.

    Verifies ``P(|M'| >= t) = P(|M + M'| >= 2t)`` (in fact ``M = M'``
    outcome by outcome) and
    ``P(|M'| >= t) <= P(|T_n| >= 2t/3) + 2 P(|U| >= 2t/3)``.
    """
    require_symmetric(kernel, dist)
    names = ["mixed", "mixed_pair", "T_n", "coupled_first", "coupled_second"]
    keys, w, total, vals = _prep(kernel, dist, n, norm, names, cap)
    mx, mp, tn, u1, u2 = (keys[k] for k in names)
    doubled = values_equal(vals["mixed_pair"], 2 * vals["mixed"])
    identity = values_equal(2 * vals["mixed"],
                            vals["T_n"] - vals["coupled_first"] - vals["coupled_second"])
    law_mx, law_mp, law_tn, law_u1, law_u2 = (_law(k, w, total, norm) for k in (mx, mp, tn, u1, u2))
    grid = t_grid if t_grid is not None else default_t_grid(law_mx)
    digest = params_digest(check="symmetric_reverse", kernel=_kdict(kernel), dist=dist.to_dict(), n=n,
                           norm=norm.to_dict())
    rows, step_ok, implication = [], True, True
    for t in grid:
        tq = _q(t)
        lhs = law_mx.tail(tq)
        step = lhs == law_mp.tail(2 * tq)
        step_ok &= step
        rhs = law_tn.tail(2 * tq / 3) + 2 * law_u1.tail(2 * tq / 3)
        thr = _thr(2 * tq / 3, norm)
        left = _key_ge(mx, _thr(tq, norm))
        right = _key_ge(tn, thr) | _key_ge(u1, thr) | _key_ge(u2, thr)
        ok = bool(np.all(right[left]))
        implication &= ok
        rows.append(CheckRow("symmetric_reverse", digest, float(t), lhs, rhs, lhs <= rhs, rhs - lhs,
                             {"symmetry_step": bool(step), "pointwise": ok}))
    certs = {"mixed_sums_coincide": bool(doubled), "algebraic_identity": bool(identity),
             "symmetry_step": bool(step_ok), "coupled_equal_in_law": law_u1.atoms() == law_u2.atoms(),
             "pointwise_implication": bool(implication)}
    holds = all(r.holds for r in rows) and all(certs.values())
    return DecompositionReport("symmetric_reverse", rows, certs, holds)


def inequality5_check(kernel: KernelFamily, dist: FiniteDistribution, n: int,
                      norm: NormSpec = NormSpec(), t_grid=None,
                      cap: int = DEFAULT_OUTCOME_CAP) -> DecompositionReport:
    """Three-copy bound applied to the i.i.d. pair of coupled sums:
    ``P(|U| >= t) <= 3 P(|U + Ut| >= 2t/3)``."""
    names = ["coupled_first", "coupled_pair"]
    keys, w, total, _ = _prep(kernel, dist, n, norm, names, cap)
    lu, lp = (_law(keys[k], w, total, norm) for k in names)
    grid = t_grid if t_grid is not None else default_t_grid(lu)
    digest = params_digest(check="inequality5", kernel=_kdict(kernel), dist=dist.to_dict(), n=n,
                           norm=norm.to_dict())
    rows = []
    for t in grid:
        tq = _q(t)
        lhs = lu.tail(tq)
        rhs = 3 * lp.tail(2 * tq / 3)
        rows.append(CheckRow("inequality5", digest, float(t), lhs, rhs, lhs <= rhs, rhs - lhs))
    return DecompositionReport("inequality5", rows, {}, all(r.holds for r in rows))


def inequality6_check(kernel: KernelFamily, dist: FiniteDistribution, n: int,
                      norm: NormSpec = NormSpec(), t_grid=None,
                      cap: int = DEFAULT_OUTCOME_CAP) -> DecompositionReport:
    """``P(|T_n| >= t) <= c P(4 |M'| >= t)`` with the measured chaos constant c.

    For every outcome of both samples the coupled mixed sum is a chaos in the
    signs with constant term ``T_n``; its exact probability
    ``p = P(|chaos| >= |T_n|)`` is computed over all 2^n sign patterns and
    ``c = 1 / min p``.  Integrating ``p`` over ``{|T_n| >= t}`` gives a
    lower bound for ``P(4 |sum f(Zt_i, Z_j)| >= t)``, which by the coupling
    equals ``P(4 |M'| >= t)``; both equalities are checked.
    """
    if kernel.order != 2:
        raise ModelError("the chaos reduction is defined for k=2")
    if kernel.n != n:
        raise ModelError(f"kernel has n={kernel.n}, asked for n={n}")
    count, total, chunks = outcome_space(dist, 2, n, cap)
    if count * 2**n > cap:
        from .problab import ResourceCapError
        raise ResourceCapError(count * 2**n, cap)
    m = dist.size
    table = kernel.tabulate(dist)
    d = table.shape[1]
    table5 = table.reshape(n, n, m, m, d)
    patterns = all_sign_patterns(n)
    mixed_map = np.array([[1, 0]], dtype=np.int64)
    tn_keys, p_hits, w_all, coupled_keys, chaos_ok = [], [], [], [], True
    for labels, w in chunks():
        for b in range(labels.shape[0]):
            X, Xt = labels[b, 0], labels[b, 1]
            form = _table_chaos_batch(table5, X, Xt)
            cv = chaos_values(form)
            keep = patterns == 1
            Z = np.where(keep, X[None, :], Xt[None, :])
            Zt = np.where(keep, Xt[None, :], X[None, :])
            direct = 4 * statistic_values(kernel, np.stack([Z, Zt], axis=1), mixed_map, dist=dist,
                                          table=table)
            chaos_ok &= values_equal(cv, direct)
            ck = norm.keys(cv)
            ref = norm.keys(form.x[None, :])[0]
            tn_keys.append(ref)
            p_hits.append(int(np.count_nonzero(ck >= ref)))
            coupled_keys.append(ck)
            w_all.append(int(w[b]))
    N = 2**n
    tn_keys = np.array(tn_keys)
    min_p = Fraction(min(p_hits), N)
    c = 1 / min_p if min_p else math.inf
    keys, w2, total2, _ = _prep(kernel, dist, n, norm, ["mixed", "T_n"], cap)
    law_mixed = _law(keys["mixed"], w2, total2, norm)
    law_tn = _law(keys["T_n"], w2, total2, norm)
    zk = np.concatenate(coupled_keys)
    zw = np.repeat(np.array(w_all, dtype=object), N)
    law_coupled4 = _law(zk, zw, total * N, norm)  # law of |4 sum f(Zt_i, Z_j)|
    grid = t_grid if t_grid is not None else default_t_grid(law_tn)
    digest = params_digest(check="inequality6", kernel=_kdict(kernel), dist=dist.to_dict(), n=n,
                           norm=norm.to_dict())
    rows, coupling_ok, integrated_ok = [], True, True
    for t in grid:
        tq = _q(t)
        lhs = law_tn.tail(tq)
        via_mixed = law_mixed.tail(tq, scale=4)
        via_coupling = law_coupled4.tail(tq)
        coupling_ok &= via_mixed == via_coupling
        hit = _key_ge(tn_keys, _thr(tq, norm))
        integrated = sum(Fraction(wb * ph, total * N) for wb, ph, h in zip(w_all, p_hits, hit) if h)
        integrated_ok &= integrated <= via_coupling and lhs / c <= integrated
        rhs = c * via_mixed if via_mixed else Fraction(0)
        rows.append(CheckRow("inequality6", digest, float(t), lhs, rhs, lhs <= rhs, rhs - lhs,
                             {"integrated_lower_bound": float(integrated)}))
    certs = {"chaos_expansion": bool(chaos_ok), "coupling_preserves_law": bool(coupling_ok),
             "integration_step": bool(integrated_ok), "measured_c": float(c),
             "min_conditional_p": str(min_p)}
    holds = all(r.holds for r in rows) and chaos_ok and coupling_ok and integrated_ok
    return DecompositionReport("inequality6", rows, certs, holds)


def _kdict(kernel):
    try:
        return kernel.to_dict()
    except ModelError:
        return {"kind": kernel.kind, "n": kernel.n, "order": kernel.order}


def random_table_kernel(rng: np.random.Generator, n: int, m: int = 2, low: int = -5, high: int = 5,
                        order: int = 2, dim: int = 1) -> TableKernel:
    """Integer lookup-table kernel with entries uniform on ``[low, high]``."""
    table = rng.integers(low, high + 1, size=(n,) * order + (m,) * order + (dim,))
    return TableKernel(n=n, order=order, table=table)

