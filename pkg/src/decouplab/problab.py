"""Tail probabilities of U-statistic norms: exact enumeration and Monte Carlo.

Exact laws are built by enumerating every outcome of a finite product space
with integer weights, so tail values are exact rationals.  Monte Carlo laws
use per-replicate counter-based streams; the replicate range is cut into
fixed chunks, so the result does not depend on how many workers ran them.
"""

from __future__ import annotations

import bisect
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .model import (
    FiniteDistribution,
    KernelFamily,
    ModelError,
    NormSpec,
    check_kernel_symmetry,
    to_fraction,
)
from .rng import uniforms
from .ustat import statistic_maps, statistic_values

__all__ = [
    "ResourceCapError",
    "HypothesisError",
    "DEFAULT_OUTCOME_CAP",
    "SCHEMA_VERSION",
    "NormLaw",
    "MCLaw",
    "outcome_space",
    "joint_outcome_keys",
    "exact_law",
    "mc_law",
    "clopper_pearson",
    "default_t_grid",
    "default_c_grid",
    "TailCurve",
    "exact_tail",
    "mc_tail",
    "ConstantReport",
    "find_constant",
    "TwoSidedReport",
    "two_sided_comparison",
    "params_digest",
]

DEFAULT_OUTCOME_CAP = 2**24
SCHEMA_VERSION = 1
MC_CHUNK = 4096
_ENUM_CHUNK = 1 << 15


class ResourceCapError(RuntimeError):
    """Exact enumeration would exceed the configured outcome cap."""

    def __init__(self, needed: int, cap: int):
        super().__init__(f"exact enumeration needs {needed} outcomes, cap is {cap}; "
                         f"raise the cap to at least {needed} or use the mc engine")
        self.needed = needed
        self.cap = cap


class HypothesisError(ModelError):
    """An inequality was requested for a kernel violating its hypothesis."""


def params_digest(**params) -> str:
    blob = json.dumps(params, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# exact laws
# ---------------------------------------------------------------------------

def _q(x) -> Fraction:
    """Exact rational value of a number (floats keep their binary value)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


class NormLaw:
    """Exact law of ``norm(S)`` stored as sorted distinct keys (``norm**e``)
    with integer weights out of ``total``."""

    exact = True

    def __init__(self, keys, weights, total: int, exponent):
        order = sorted(range(len(keys)), key=lambda i: keys[i])
        self.keys = [keys[i] for i in order]
        self.fkeys = [_q(k) for k in self.keys]
        self.weights = [int(weights[i]) for i in order]
        self.total = int(total)
        self.exponent = exponent
        suffix = [0] * (len(self.keys) + 1)
        for i in range(len(self.keys) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + self.weights[i]
        self._suffix = suffix
        if suffix[0] != self.total:
            raise ValueError("law weights do not add up to the total")

    @classmethod
    def from_outcomes(cls, keys: np.ndarray, weights: np.ndarray, total: int, exponent):
        uniq, inv = np.unique(keys, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=weights.dtype)
        np.add.at(acc, inv.ravel(), weights)
        return cls([k.item() if hasattr(k, "item") else k for k in uniq],
                   [int(w) for w in acc], total, exponent)

    def _key_threshold(self, t, scale):
        thr = _q(t) / _q(scale)
        return thr**self.exponent if self.exponent != 1 else thr

    def tail(self, t, scale=1) -> Fraction:
        """Exact ``P(scale * norm(S) >= t)``."""
        if _q(t) <= 0:
            return Fraction(1)
        pos = bisect.bisect_left(self.fkeys, self._key_threshold(t, scale))
        return Fraction(self._suffix[pos], self.total)

    def bounds(self, t, scale=1):
        p = self.tail(t, scale)
        return p, p, p

    def norms(self) -> list[float]:
        e = self.exponent
        return [float(k) ** (1.0 / e) if e != 1 else float(k) for k in self.keys]

    def quantile(self, q: float) -> float:
        target = Fraction(q).limit_denominator(10**9) * self.total
        acc = 0
        for k, w in zip(self.norms(), self.weights):
            acc += w
            if acc >= target:
                return k
        return self.norms()[-1]

    def min_positive(self):
        pos = [v for v in self.norms() if v > 0]
        return min(pos) if pos else None

    def max_norm(self) -> float:
        return self.norms()[-1]

    def atoms(self):
        return [(v, Fraction(w, self.total)) for v, w in zip(self.norms(), self.weights)]


def outcome_space(dist: FiniteDistribution, rows: int, n: int, cap: int = DEFAULT_OUTCOME_CAP):
    """Size check and chunk generator for the product space of ``rows * n`` draws.

    Returns ``(count, total, chunks)`` where ``chunks`` yields
    ``(labels (N, rows, n), weights (N,))``; probabilities are
    ``weights / total`` exactly.
    """
    m = dist.size
    cells = rows * n
    count = m**cells
    if count > cap:
        raise ResourceCapError(count, cap)
    w, q = dist.integer_weights()
    total = q**cells
    big = cells * math.log2(max(max(w), 2)) >= 62
    w_arr = np.array(w, dtype=object if big else np.int64)
    powers = m ** np.arange(cells - 1, -1, -1, dtype=np.int64)

    def chunks():
        for start in range(0, count, _ENUM_CHUNK):
            idx = np.arange(start, min(count, start + _ENUM_CHUNK), dtype=np.int64)
            labels = (idx[:, None] // powers[None, :]) % m
            weights = np.prod(w_arr[labels], axis=1) if not big else np.array(
                [math.prod(int(w[a]) for a in row) for row in labels], dtype=object)
            yield labels.reshape(-1, rows, n), weights

    return count, total, chunks


def joint_outcome_keys(kernel: KernelFamily, dist: FiniteDistribution, n: int, norm: NormSpec,
                       statistics, rows=None, cap=DEFAULT_OUTCOME_CAP, values=False):
    """Norm keys of several statistics on every outcome of one shared space.

    All statistics read the same rows (``rows`` defaults to the maximum any of
    them needs), so per-outcome relations between them can be certified.
    Returns ``(keys: dict name -> array, weights, total)`` and, if
    ``values`` is set, also the raw statistic values.
    """
    if not isinstance(dist, FiniteDistribution):
        raise ModelError("exact enumeration needs a finite-support distribution")
    if kernel.n != n:
        raise ModelError(f"kernel has n={kernel.n}, asked for n={n}")
    k = kernel.order
    specs = {name: statistic_maps(name, k) for name in statistics}
    rows = rows or max(r for r, _ in specs.values())
    _, total, chunks = outcome_space(dist, rows, n, cap)
    table = kernel.tabulate(dist)
    keys = {name: [] for name in statistics}
    vals = {name: [] for name in statistics}
    weights = []
    for labels, w in chunks():
        for name, (_, maps) in specs.items():
            v = statistic_values(kernel, labels, maps, dist=dist, table=table)
            keys[name].append(norm.keys(v))
            if values:
                vals[name].append(v)
        weights.append(w)
    keys = {name: np.concatenate(parts) for name, parts in keys.items()}
    weights = np.concatenate(weights)
    if values:
        return keys, weights, total, {name: np.concatenate(p) for name, p in vals.items()}
    return keys, weights, total


def exact_law(statistic: str, kernel: KernelFamily, dist: FiniteDistribution, n: int,
              norm: NormSpec, cap: int = DEFAULT_OUTCOME_CAP) -> NormLaw:
    keys, weights, total = joint_outcome_keys(kernel, dist, n, norm, [statistic], cap=cap)
    return NormLaw.from_outcomes(keys[statistic], weights, total, norm.exponent)


# ---------------------------------------------------------------------------
# Monte Carlo laws
# ---------------------------------------------------------------------------

def clopper_pearson(k: int, n: int, confidence: float = 0.95):
    """Exact two-sided binomial interval for ``k`` successes in ``n`` trials."""
    if not 0 <= k <= n or n <= 0:
        raise ValueError(f"need 0 <= k <= n, n > 0 (k={k}, n={n})")
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


class MCLaw:
    """Empirical law of ``norm(S)`` from ``replicates`` independent draws."""

    exact = False

    def __init__(self, keys: np.ndarray, exponent, confidence: float = 0.95, seed=None):
        self.raw_keys = np.asarray(keys, dtype=np.float64)
        self.sorted = np.sort(self.raw_keys)
        self.exponent = exponent
        self.confidence = confidence
        self.seed = seed

    @property
    def replicates(self) -> int:
        return self.sorted.size

    def count(self, t, scale=1) -> int:
        t = float(t)
        if t <= 0:
            return self.replicates
        thr = (t / float(scale)) ** self.exponent
        return int(self.replicates - np.searchsorted(self.sorted, thr, side="left"))

    def tail(self, t, scale=1) -> float:
        return self.count(t, scale) / self.replicates

    def bounds(self, t, scale=1):
        c = self.count(t, scale)
        lo, hi = clopper_pearson(c, self.replicates, self.confidence)
        return c / self.replicates, lo, hi

    def norms(self) -> np.ndarray:
        e = self.exponent
        return self.sorted if e == 1 else self.sorted ** (1.0 / e)

    def quantile(self, q: float) -> float:
        v = self.norms()
        idx = min(len(v) - 1, max(0, math.ceil(q * len(v)) - 1))
        return float(v[idx])

    def min_positive(self):
        v = self.norms()
        pos = v[v > 0]
        return float(pos[0]) if pos.size else None

    def max_norm(self) -> float:
        return float(self.norms()[-1])


def mc_keys(statistic: str, kernel: KernelFamily, dist, n: int, norm: NormSpec,
            replicates: int, seed: int, workers: int = 1, stream: int = 0,
            backend=None) -> np.ndarray:
    """Norm keys of ``replicates`` fresh realizations, in replicate order."""
    if kernel.n != n:
        raise ModelError(f"kernel has n={kernel.n}, asked for n={n}")
    rows, maps = statistic_maps(statistic, kernel.order)
    per_point = dist.draws_per_point()
    count = rows * n * per_point
    finite = isinstance(dist, FiniteDistribution)
    table = kernel.tabulate(dist) if finite else None

    def work(start):
        size = min(MC_CHUNK, replicates - start)
        u = uniforms(seed, stream, start, size, count)
        if finite:
            blocks = dist.transform(u).reshape(size, rows, n)
        else:
            blocks = dist.transform(u.reshape(size, rows, n, per_point))
        vals = statistic_values(kernel, blocks, maps, dist=dist if finite else None,
                                table=table, backend=backend)
        return norm.keys(vals).astype(np.float64)

    starts = range(0, replicates, MC_CHUNK)
    if workers <= 1:
        parts = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, starts))
    return np.concatenate(parts) if parts else np.zeros(0)


def mc_law(statistic, kernel, dist, n, norm, replicates, seed, confidence=0.95, workers=1,
           stream=0, backend=None) -> MCLaw:
    keys = mc_keys(statistic, kernel, dist, n, norm, replicates, seed, workers, stream, backend)
    return MCLaw(keys, norm.exponent, confidence, seed)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def default_t_grid(law, points: int = 64, lo_q: float = 0.01, hi_q: float = 0.999) -> list[float]:
    """Geometric grid spanning the ``lo_q`` and ``hi_q`` quantiles of ``law``.

    A zero lower quantile is replaced by the smallest positive norm value; a
    law concentrated at 0 gets the single point ``[1.0]``.
    """
    lo = law.quantile(lo_q)
    hi = law.quantile(hi_q)
    if lo <= 0:
        lo = law.min_positive()
    if lo is None:
        return [1.0]
    hi = max(hi, lo)
    if hi == lo:
        return [float(lo)]
    return [float(v) for v in np.geomspace(lo, hi, points)]


def default_c_grid() -> list[float]:
    return [2.0 ** (j / 4) for j in range(29)]


# ---------------------------------------------------------------------------
# tail curves
# ---------------------------------------------------------------------------

@dataclass
class TailCurve:
    grid: list
    values: list
    mode: str
    statistic: str = ""
    ci: list | None = None
    exact_values: list | None = None
    replicates: int | None = None
    seed: int | None = None
    confidence: float | None = None
    params_digest: str = ""

    def __post_init__(self):
        if any(b < a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("tail grid must be ascending")

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "kind": "tail_curve",
            "mode": self.mode,
            "statistic": self.statistic,
            "params_digest": self.params_digest,
            "grid": [float(t) for t in self.grid],
            "values": [float(v) for v in self.values],
        }
        if self.exact_values is not None:
            d["exact_values"] = [str(v) for v in self.exact_values]
        if self.ci is not None:
            d["ci"] = [[float(lo), float(hi)] for lo, hi in self.ci]
            d["confidence"] = self.confidence
        if self.replicates is not None:
            d["replicates"] = self.replicates
            d["seed"] = self.seed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "p", "ci_lo", "ci_hi"])
        for i, (t, p) in enumerate(zip(self.grid, self.values)):
            lo, hi = self.ci[i] if self.ci is not None else (p, p)
            w.writerow([repr(float(t)), repr(float(p)), repr(float(lo)), repr(float(hi))])
        return buf.getvalue()


def _digest(statistic, kernel, dist, n, norm, **extra):
    try:
        kd = kernel.to_dict()
    except ModelError:
        kd = {"kind": kernel.kind, "n": kernel.n, "order": kernel.order}
    return params_digest(statistic=statistic, kernel=kd, dist=dist.to_dict(), n=n,
                         norm=norm.to_dict(), **extra)


def exact_tail(statistic, kernel, dist, n, norm, t_grid=None, cap=DEFAULT_OUTCOME_CAP) -> TailCurve:
    """Exact tail curve ``t -> P(norm(S) >= t)`` by full enumeration."""
    law = exact_law(statistic, kernel, dist, n, norm, cap)
    grid = sorted(t_grid) if t_grid is not None else default_t_grid(law)
    exact = [law.tail(t) for t in grid]
    return TailCurve(grid=list(grid), values=[float(v) for v in exact], mode="exact",
                     statistic=statistic, exact_values=exact,
                     params_digest=_digest(statistic, kernel, dist, n, norm))


def mc_tail(statistic, kernel, dist, n, norm, t_grid=None, replicates=10**5, seed=0,
            confidence=0.95, workers=1, stream=0) -> TailCurve:
    """Monte Carlo tail curve with Clopper-Pearson intervals at ``confidence``."""
    if replicates < 100:
        raise ValueError("mc_tail needs at least 100 replicates")
    law = mc_law(statistic, kernel, dist, n, norm, replicates, seed, confidence, workers, stream)
    grid = sorted(t_grid) if t_grid is not None else default_t_grid(law)
    vals, ci = [], []
    for t in grid:
        p, lo, hi = law.bounds(t)
        vals.append(p)
        ci.append((lo, hi))
    return TailCurve(grid=list(grid), values=vals, mode="estimated", statistic=statistic, ci=ci,
                     replicates=replicates, seed=seed, confidence=confidence,
                     params_digest=_digest(statistic, kernel, dist, n, norm, stream=stream))


# ---------------------------------------------------------------------------
# empirical decoupling constants
# ---------------------------------------------------------------------------

DIRECTIONS = {"1": "decoupling", "decoupling": "decoupling", "2": "reverse", "reverse": "reverse"}


@dataclass
class ConstantReport:
    direction: str
    C_empirical: float
    C_grid: list
    witness: dict
    engine: str
    t_grid: list
    rows: list = field(default_factory=list)
    inconclusive: bool = False
    note: str = ("per-instance empirical constant; it only lower-bounds the universal "
                 "constant, which ranges over all kernels and laws")

    @property
    def found(self) -> bool:
        return math.isfinite(self.C_empirical)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "constant_report",
            "direction": self.direction,
            "C_empirical": self.C_empirical if self.found else "inf",
            "C_grid": self.C_grid,
            "witness": self.witness,
            "engine": self.engine,
            "t_grid": self.t_grid,
            "rows": self.rows,
            "inconclusive": self.inconclusive,
            "note": self.note,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "lhs", "rhs", "status"])
        for r in self.rows:
            w.writerow([r["t"], r["lhs"], r["rhs"], r["status"]])
        return buf.getvalue()


def _compare(direction, lhs_law, rhs_law, C, t):
    """Status of one inequality instance: 'holds', 'fails' or 'inconclusive'.

    decoupling: P(|U| >= t) <= C P(C |D| >= t)
    reverse:    P(|U| >= t) >= (1/C) P(|D| / C >= t)
    Under Monte Carlo the lhs upper bound is compared with the rhs lower
    bound (and vice versa for certifying a failure).
    """
    exact = lhs_law.exact and rhs_law.exact
    Cq = _q(C) if exact else float(C)
    p, lo, hi = lhs_law.bounds(t)
    if direction == "decoupling":
        q, qlo, qhi = rhs_law.bounds(t, scale=Cq)
        rhs, rlo, rhi = Cq * q, Cq * qlo, Cq * qhi
        if hi <= rlo:
            status = "holds"
        elif lo > rhi:
            status = "fails"
        else:
            status = "inconclusive"
        margin = rhs - p
    else:
        q, qlo, qhi = rhs_law.bounds(t, scale=1 / Cq)
        rhs, rlo, rhi = q / Cq, qlo / Cq, qhi / Cq
        if lo >= rhi:
            status = "holds"
        elif hi < rlo:
            status = "fails"
        else:
            status = "inconclusive"
        margin = p - rhs
    return status, p, rhs, margin


def _row(t, status, lhs, rhs, margin):
    return {"t": float(t), "lhs": float(lhs), "rhs": float(rhs), "margin": float(margin),
            "status": status}


def _search_constant(direction, lhs_law, rhs_law, t_grid, C_grid):
    C_grid = sorted(C_grid)
    last_rows = []
    any_inconclusive = False
    for C in C_grid:
        rows = [_row(t, *_compare(direction, lhs_law, rhs_law, C, t)) for t in t_grid]
        if all(r["status"] == "holds" for r in rows):
            worst = min(rows, key=lambda r: r["margin"])
            return C, {"t": worst["t"], "margin": worst["margin"], "C": C}, rows, False
        any_inconclusive = any_inconclusive or any(r["status"] == "inconclusive" for r in rows)
        last_rows = rows
    bad = [r for r in last_rows if r["status"] != "holds"]
    worst = min(bad, key=lambda r: r["margin"]) if bad else None
    witness = {"t": worst["t"], "margin": worst["margin"], "C": C_grid[-1] if C_grid else None,
               "status": worst["status"]} if worst else {}
    return math.inf, witness, last_rows, any_inconclusive


def _laws_for(kernel, dist, n, norm, engine, replicates, seed, confidence, workers, cap,
              statistics=("coupled", "decoupled")):
    if engine == "exact":
        return [exact_law(s, kernel, dist, n, norm, cap) for s in statistics]
    if engine == "mc":
        return [mc_law(s, kernel, dist, n, norm, replicates, seed, confidence, workers, stream=i)
                for i, s in enumerate(statistics)]
    raise ValueError(f"unknown engine {engine!r}")


def require_symmetric(kernel, dist=None, trials=1000, seed=0):
    verdict = check_kernel_symmetry(kernel, trials, seed, dist)
    if not verdict:
        raise HypothesisError(
            f"kernel is not permutation-symmetric (index tuple {verdict.idx}, "
            f"permutation {verdict.perm}); the reverse inequality needs a symmetric kernel")
    return verdict


def find_constant(direction, kernel, dist, n, norm, t_grid=None, C_grid=None, engine="exact",
                  replicates=10**5, seed=0, confidence=0.95, workers=1,
                  cap=DEFAULT_OUTCOME_CAP, laws=None) -> ConstantReport:
    """Smallest grid constant for which the chosen inequality holds at every grid t.

    ``direction`` is ``"decoupling"`` (or 1) for coupled <= C * decoupled and
    ``"reverse"`` (or 2) for the converse, which requires a symmetric kernel.
    ``C_empirical`` is ``inf`` when no grid constant works.
    """
    direction = DIRECTIONS.get(str(direction))
    if direction is None:
        raise ValueError("direction must be 1/'decoupling' or 2/'reverse'")
    if direction == "reverse":
        require_symmetric(kernel, dist)
    coupled, decoupled = laws or _laws_for(kernel, dist, n, norm, engine, replicates, seed,
                                           confidence, workers, cap)
    t_grid = sorted(t_grid) if t_grid is not None else default_t_grid(coupled)
    C_grid = sorted(C_grid) if C_grid is not None else default_c_grid()
    C, witness, rows, inconclusive = _search_constant(direction, coupled, decoupled, t_grid, C_grid)
    return ConstantReport(direction, C, C_grid, witness, engine, t_grid, rows,
                          inconclusive and not math.isfinite(C))


@dataclass
class TwoSidedReport:
    C2: float
    holds: bool
    t_grid: list
    coupled_curve: TailCurve
    decoupled_curve: TailCurve
    decoupling: ConstantReport
    reverse: ConstantReport
    rows: list
    engine: str

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "two_sided_report",
            "C2": self.C2 if math.isfinite(self.C2) else "inf",
            "holds": self.holds,
            "engine": self.engine,
            "t_grid": self.t_grid,
            "rows": self.rows,
            "coupled_curve": self.coupled_curve.to_dict(),
            "decoupled_curve": self.decoupled_curve.to_dict(),
            "decoupling": self.decoupling.to_dict(),
            "reverse": self.reverse.to_dict(),
        }


def _sandwich_rows(coupled, decoupled, C, t_grid):
    """Both sides of C^-1 P(|U| >= C t) <= P(|D| >= t) <= C P(|U| >= t / C)."""
    exact = coupled.exact and decoupled.exact
    Cq = _q(C) if exact else float(C)
    rows = []
    for t in t_grid:
        d, dlo, dhi = decoupled.bounds(t)
        u_hi_side = coupled.bounds(t, scale=1 / Cq)  # P(|U| >= Cq t)
        u_lo_side = coupled.bounds(t, scale=Cq)      # P(|U| >= t / Cq)
        lower = u_hi_side[0] / Cq
        upper = Cq * u_lo_side[0]
        ok_lower = u_hi_side[2] / Cq <= dlo
        ok_upper = dhi <= Cq * u_lo_side[1]
        rows.append({"t": float(t), "lower": float(lower), "middle": float(d), "upper": float(upper),
                     "status": "holds" if ok_lower and ok_upper else "not certified"})
    return rows


def two_sided_comparison(kernel, dist, n, norm, t_grid=None, engine="exact", C_grid=None,
                         replicates=10**5, seed=0, confidence=0.95, workers=1,
                         cap=DEFAULT_OUTCOME_CAP) -> TwoSidedReport:
    """Certify the two-sided tail sandwich between coupled and decoupled sums."""
    require_symmetric(kernel, dist)
    coupled, decoupled = _laws_for(kernel, dist, n, norm, engine, replicates, seed, confidence,
                                   workers, cap)
    # t thresholds the middle (decoupled) tail, so the default grid follows its law
    t_grid = sorted(t_grid) if t_grid is not None else default_t_grid(decoupled)
    C_grid = sorted(C_grid) if C_grid is not None else default_c_grid()
    dec = find_constant("decoupling", kernel, dist, n, norm, t_grid, C_grid, laws=(coupled, decoupled),
                        engine=engine)
    rev = find_constant("reverse", kernel, dist, n, norm, t_grid, C_grid, laws=(coupled, decoupled),
                        engine=engine)
    C2, rows = math.inf, []
    for C in C_grid:
        rows = _sandwich_rows(coupled, decoupled, C, t_grid)
        if all(r["status"] == "holds" for r in rows):
            C2 = C
            break
    curves = []
    for name, law in (("coupled", coupled), ("decoupled", decoupled)):
        if law.exact:
            vals = [law.tail(t) for t in t_grid]
            curves.append(TailCurve(list(t_grid), [float(v) for v in vals], "exact", name,
                                    exact_values=vals))
        else:
            b = [law.bounds(t) for t in t_grid]
            curves.append(TailCurve(list(t_grid), [x[0] for x in b], "estimated", name,
                                    ci=[(x[1], x[2]) for x in b], replicates=law.replicates,
                                    seed=seed, confidence=confidence))
    return TwoSidedReport(C2, math.isfinite(C2), list(t_grid), curves[0], curves[1], dec, rev,
                          rows, engine)
