"""Shared domain types: norms, kernel families, distributions, sample blocks.

Values of the normed space are plain 1-D numpy arrays.  Integer-valued inputs
stay integer all the way through so identity checks can be exact; floats are
compared with an explicit relative tolerance instead.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

__all__ = [
    "ModelError",
    "NormSpec",
    "norm_of",
    "exact_norm",
    "exact_key",
    "as_vector",
    "sign_vector",
    "all_sign_patterns",
    "KernelFamily",
    "TableKernel",
    "ProductKernel",
    "DistanceKernel",
    "PolynomialKernel",
    "ConstantKernel",
    "CallbackKernel",
    "FiniteDistribution",
    "GeneratorDistribution",
    "SampleBlock",
    "SymmetryVerdict",
    "check_kernel_symmetry",
    "kernel_from_dict",
    "distribution_from_dict",
    "to_fraction",
    "values_equal",
]

FLOAT_RTOL = 1e-12


class ModelError(ValueError):
    """Invalid model object (dimension mismatch, bad probabilities, ...)."""


def to_fraction(x) -> Fraction:
    """Exact rational for ints, Fractions, ``"p/q"`` strings and floats.

    Floats go through their shortest decimal repr, so ``0.1`` becomes 1/10
    rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise ModelError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    xf = float(x)
    if not math.isfinite(xf):
        raise ModelError(f"non-finite value {x!r}")
    return Fraction(repr(xf))


def as_vector(v) -> np.ndarray:
    """Coerce ``v`` to a 1-D value vector, rejecting NaN/Inf."""
    arr = np.asarray(v)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise ModelError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
        raise ModelError("vector has non-finite coordinates")
    return arr


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

_NORM_ALIASES = {
    "absolute": "absolute", "abs": "absolute",
    "euclidean": "euclidean", "l2": "euclidean", "2": "euclidean",
    "supremum": "supremum", "sup": "supremum", "max": "supremum", "linf": "supremum",
    "p": "p",
}


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^d: ``absolute`` (d=1), ``euclidean``, ``supremum`` or ``p``."""

    kind: str = "absolute"
    p: float | None = None

    def __post_init__(self):
        kind = _NORM_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ModelError(f"unknown norm kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "p":
            if self.p is None or not float(self.p) >= 1:
                raise ModelError("p-norm needs p >= 1")
            pv = float(self.p)
            object.__setattr__(self, "p", int(pv) if pv.is_integer() else pv)
        elif self.p is not None:
            raise ModelError(f"norm kind {kind!r} takes no p")

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        """Parse ``abs``, ``l2``, ``sup`` or ``p=3`` style strings."""
        text = text.strip().lower()
        if text.startswith("p=") or text.startswith("l") and text[1:].replace(".", "").isdigit():
            pv = float(text[2:] if text.startswith("p=") else text[1:])
            if pv == 2:
                return cls("euclidean")
            return cls("p", pv)
        return cls(text)

    @property
    def exponent(self):
        """Power ``e`` such that ``key = norm**e`` is computed exactly.

        Comparisons between norms are done on keys: for the euclidean norm the
        key is the squared norm, which stays an integer on integer data.
        """
        if self.kind == "euclidean":
            return 2
        if self.kind == "p" and isinstance(self.p, int):
            return self.p
        return 1

    def check_dim(self, d: int):
        if self.kind == "absolute" and d != 1:
            raise ModelError(f"absolute-value norm requires d=1, got d={d}")

    def keys(self, values: np.ndarray) -> np.ndarray:
        """Norm keys (``norm**exponent``) of a batch ``values`` of shape (B, d)."""
        values = np.asarray(values)
        if values.ndim == 1:
            values = values[:, None]
        self.check_dim(values.shape[1])
        if values.dtype == object:
            return np.array([exact_key(row, self) for row in values], dtype=object)
        a = np.abs(values)
        if self.kind in ("absolute", "supremum"):
            return a.max(axis=1)
        if self.kind == "euclidean":
            return (values * values).sum(axis=1)
        if isinstance(self.p, int):
            return (a ** self.p).sum(axis=1)
        return (a ** self.p).sum(axis=1) ** (1.0 / self.p)

    def batch(self, values: np.ndarray) -> np.ndarray:
        """Norms of a batch of shape (B, d) as float64."""
        k = self.keys(values).astype(np.float64)
        e = self.exponent
        return k if e == 1 else k ** (1.0 / e)

    def key_of_threshold(self, t):
        """Exact key threshold for ``norm >= t`` (``t`` any rational-able)."""
        return to_fraction(t) ** self.exponent if to_fraction(t) >= 0 else Fraction(-1)

    def __call__(self, v) -> float:
        return norm_of(v, self)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "p":
            d["p"] = self.p
        return d

    @classmethod
    def from_dict(cls, d) -> "NormSpec":
        if isinstance(d, str):
            return cls.parse(d)
        return cls(d.get("kind", "absolute"), d.get("p"))


def norm_of(v, norm: NormSpec) -> float:
    """The norm of a single vector as a float."""
    vec = as_vector(v)
    if vec.dtype == object:
        return float(exact_norm(vec, norm))
    return float(norm.batch(vec[None, :])[0])


def exact_norm(v, norm: NormSpec):
    """Norm of a vector with rational coordinates.

    Returns a Fraction whenever the value is rational (absolute, supremum,
    p=1, and perfect squares under the euclidean norm); otherwise a float.
    """
    coords = [to_fraction(c) for c in np.asarray(v, dtype=object).ravel()]
    norm.check_dim(len(coords))
    if norm.kind in ("absolute", "supremum"):
        return max(abs(c) for c in coords)
    if norm.kind == "p" and norm.p == 1:
        return sum(abs(c) for c in coords)
    e = norm.exponent
    key = sum(abs(c) ** e for c in coords) if isinstance(e, int) and e > 1 else None
    if key is not None:
        num = _int_root(key.numerator, e)
        den = _int_root(key.denominator, e)
        if num is not None and den is not None:
            return Fraction(num, den)
        return float(key) ** (1.0 / e)
    return float(sum(abs(float(c)) ** norm.p for c in coords) ** (1.0 / norm.p))


def exact_key(v, norm: NormSpec):
    """``norm(v) ** norm.exponent`` computed without rounding where possible."""
    coords = [to_fraction(c) for c in np.asarray(v, dtype=object).ravel()]
    norm.check_dim(len(coords))
    if norm.kind in ("absolute", "supremum"):
        return max(abs(c) for c in coords)
    e = norm.exponent
    if isinstance(e, int) and (norm.kind != "p" or isinstance(norm.p, int)):
        return sum(abs(c) ** e for c in coords)
    return exact_norm(coords, norm)


def _int_root(x: int, e: int):
    r = round(x ** (1.0 / e))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**e == x:
            return cand
    return None


def values_equal(a, b, rtol: float = FLOAT_RTOL) -> bool:
    """Exact equality for integer/rational data, relative tolerance for floats."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    if a.dtype.kind in "iub" and b.dtype.kind in "iub":
        return bool(np.array_equal(a, b))
    if a.dtype == object or b.dtype == object:
        try:
            return all(to_fraction(x) == to_fraction(y) for x, y in zip(a.ravel(), b.ravel()))
        except (ModelError, TypeError, ValueError):
            pass
    af = a.astype(np.float64)
    bf = b.astype(np.float64)
    scale = max(1.0, float(np.max(np.abs(af), initial=0.0)), float(np.max(np.abs(bf), initial=0.0)))
    return bool(np.all(np.abs(af - bf) <= rtol * scale))


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------

def sign_vector(signs) -> np.ndarray:
    arr = np.asarray(signs, dtype=np.int64).ravel()
    if not np.all((arr == 1) | (arr == -1)):
        raise ModelError("sign vectors may only contain +1 and -1")
    return arr


def all_sign_patterns(n: int) -> np.ndarray:
    """All 2**n sign vectors; bit ``i`` of the row index set means eps_i = -1."""
    idx = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return 1 - 2 * bits


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _check_weights(weights, k, n):
    if weights is None:
        return None
    w = np.asarray(weights)
    if w.shape != (n,) * k:
        raise ModelError(f"index weights must have shape {(n,) * k}, got {w.shape}")
    return w


def _weights_symmetric(w, k) -> bool:
    if w is None:
        return True
    return all(np.array_equal(w, np.transpose(w, perm)) for perm in itertools.permutations(range(k)))


@dataclass(frozen=True, eq=False, kw_only=True)
class KernelFamily:
    """Base class for an indexed kernel family ``f_{i1..ik}``.

    ``point_dim`` is the dimension of points the kernel consumes, or ``None``
    for kernels acting on atom labels of a finite distribution.
    """

    n: int
    order: int = 2

    kind = "abstract"

    def __post_init__(self):
        if self.order < 1 or self.n < 1:
            raise ModelError("kernel order and n must be positive")

    @property
    def out_dim(self) -> int:
        raise NotImplementedError

    @property
    def point_dim(self):
        return None

    @property
    def symmetric(self) -> bool:
        raise NotImplementedError

    def evaluate(self, idx: Sequence[int], points: Sequence[Any]) -> np.ndarray:
        raise NotImplementedError

    def tabulate(self, dist: "FiniteDistribution") -> np.ndarray:
        """Kernel values on every (index tuple, atom tuple), shape ``(n^k m^k, d)``.

        Rows are ordered C-style over ``(i1..ik, a1..ak)``; entries for
        index tuples with repeats are never read by the engines.
        """
        k, n, m = self.order, self.n, dist.size
        pts = dist.kernel_points()
        rows = []
        for idx in itertools.product(range(n), repeat=k):
            distinct = len(set(idx)) == k
            for atoms in itertools.product(range(m), repeat=k):
                if distinct:
                    rows.append(as_vector(self.evaluate(idx, [pts[a] for a in atoms])))
                else:
                    rows.append(None)
        d = self.out_dim
        sample = next(r for r in rows if r is not None)
        dtype = np.int64 if sample.dtype.kind in "iub" else np.float64
        table = np.zeros((len(rows), d), dtype=dtype)
        for r, val in enumerate(rows):
            if val is not None:
                table[r] = val
        return table

    def sample_points(self, rng: np.random.Generator, size: int):
        dim = self.point_dim or 1
        return [rng.integers(-5, 6, size=dim) for _ in range(size)]

    def to_dict(self) -> dict:
        raise ModelError(f"kernel kind {self.kind!r} is not serializable")


@dataclass(frozen=True, eq=False, kw_only=True)
class TableKernel(KernelFamily):
    """Lookup table over atom labels: ``table[i1..ik, a1..ak, :]``."""

    table: np.ndarray = None
    symmetric_decl: bool | None = None

    kind = "table"

    def __post_init__(self):
        super().__post_init__()
        t = np.asarray(self.table)
        if t.dtype.kind == "b":
            t = t.astype(np.int64)
        k, n = self.order, self.n
        if t.ndim == 2 * k:
            t = t[..., None]
        if t.ndim != 2 * k + 1 or t.shape[:k] != (n,) * k or len(set(t.shape[k:2 * k])) != 1:
            raise ModelError(f"table shape {np.asarray(self.table).shape} does not fit order={k}, n={n}")
        if t.dtype.kind in "iu":
            t = t.astype(np.int64)
        elif t.dtype.kind == "f":
            if not np.all(np.isfinite(t)):
                raise ModelError("table has non-finite entries")
        else:
            raise ModelError(f"unsupported table dtype {t.dtype}")
        t = np.ascontiguousarray(t)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n_labels(self) -> int:
        return self.table.shape[self.order]

    @property
    def out_dim(self) -> int:
        return self.table.shape[-1]

    @property
    def symmetric(self) -> bool:
        if self.symmetric_decl is not None:
            return bool(self.symmetric_decl)
        return self.is_exactly_symmetric()

    def is_exactly_symmetric(self) -> bool:
        k = self.order
        for perm in itertools.permutations(range(k)):
            axes = list(perm) + [k + p for p in perm] + [2 * k]
            if not values_equal(self.table, np.transpose(self.table, axes)):
                return False
        return True

    def evaluate(self, idx, points):
        labels = tuple(int(np.asarray(p).ravel()[0]) for p in points)
        return self.table[tuple(idx) + labels].copy()

    def tabulate(self, dist):
        if dist.size != self.n_labels:
            raise ModelError(f"table kernel has {self.n_labels} labels, distribution has {dist.size} atoms")
        return self.table.reshape(-1, self.out_dim)

    def sample_points(self, rng, size):
        return [int(v) for v in rng.integers(0, self.n_labels, size=size)]

    def to_dict(self):
        d = {"kind": "table", "order": self.order, "n": self.n, "table": self.table.tolist()}
        if self.symmetric_decl is not None:
            d["symmetric"] = bool(self.symmetric_decl)
        return d


@dataclass(frozen=True, eq=False, kw_only=True)
class _PointKernel(KernelFamily):
    weights: np.ndarray | None = None
    dim: int = 1

    def __post_init__(self):
        super().__post_init__()
        w = _check_weights(self.weights, self.order, self.n)
        if w is not None:
            w = np.ascontiguousarray(w)
            w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.dim < 1:
            raise ModelError("point dimension must be >= 1")

    @property
    def point_dim(self):
        return self.dim

    def weight(self, idx):
        return 1 if self.weights is None else self.weights[tuple(idx)]

    def weights_flat(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n**self.order, dtype=np.float64)
        return self.weights.astype(np.float64).ravel()

    def _base_dict(self):
        d = {"kind": self.kind, "order": self.order, "n": self.n, "dim": self.dim}
        if self.weights is not None:
            d["weights"] = self.weights.tolist()
        return d


@dataclass(frozen=True, eq=False, kw_only=True)
class ProductKernel(_PointKernel):
    """``f_{i1..ik}(s1..sk) = w_{i1..ik} * (s1 * ... * sk)`` coordinatewise."""

    kind = "product"
    code = 1

    @property
    def out_dim(self):
        return self.dim

    @property
    def symmetric(self):
        return _weights_symmetric(self.weights, self.order)

    def evaluate(self, idx, points):
        out = np.asarray(points[0])
        for p in points[1:]:
            out = out * np.asarray(p)
        return as_vector(self.weight(idx) * out)

    def to_dict(self):
        return self._base_dict()


@dataclass(frozen=True, eq=False, kw_only=True)
class DistanceKernel(_PointKernel):
    """``f_ij(x, y) = w_ij * |x - y|_2`` (order 2, scalar output)."""

    kind = "distance"
    code = 2

    def __post_init__(self):
        if self.order != 2:
            raise ModelError("distance kernel has order 2")
        super().__post_init__()

    @property
    def out_dim(self):
        return 1

    @property
    def symmetric(self):
        return _weights_symmetric(self.weights, 2)

    def evaluate(self, idx, points):
        x, y = (np.asarray(p, dtype=np.float64) for p in points)
        return as_vector(self.weight(idx) * math.sqrt(float(np.sum((x - y) ** 2))))

    def to_dict(self):
        d = self._base_dict()
        d.pop("order")
        return d


@dataclass(frozen=True, eq=False, kw_only=True)
class PolynomialKernel(_PointKernel):
    """``f_ij(x, y) = w_ij * sum_{p,q} coef[p, q] x^p y^q`` on scalar points."""

    coef: np.ndarray = None
    kind = "polynomial"
    code = 3

    def __post_init__(self):
        if self.order != 2 or self.dim != 1:
            raise ModelError("polynomial kernel has order 2 and scalar points")
        super().__post_init__()
        c = np.asarray(self.coef)
        if c.ndim != 2:
            raise ModelError("polynomial coefficients must be a matrix")
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "coef", c)

    @property
    def out_dim(self):
        return 1

    @property
    def symmetric(self):
        c = self.coef
        return (c.shape[0] == c.shape[1] and np.array_equal(c, c.T)
                and _weights_symmetric(self.weights, 2))

    def evaluate(self, idx, points):
        x, y = (np.asarray(p).ravel()[0] for p in points)
        total = 0
        for p in range(self.coef.shape[0]):
            for q in range(self.coef.shape[1]):
                if self.coef[p, q]:
                    total = total + self.coef[p, q] * x**p * y**q
        return as_vector(self.weight(idx) * total)

    def to_dict(self):
        d = self._base_dict()
        d.pop("order")
        d.pop("dim")
        d["coef"] = self.coef.tolist()
        return d


@dataclass(frozen=True, eq=False, kw_only=True)
class ConstantKernel(_PointKernel):
    """``f_{i1..ik} = w_{i1..ik} * value`` regardless of the points."""

    value: Any = 1
    kind = "constant"
    code = 0

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "value", as_vector(self.value))

    @property
    def out_dim(self):
        return self.value.shape[0]

    @property
    def symmetric(self):
        return _weights_symmetric(self.weights, self.order)

    def evaluate(self, idx, points):
        return self.weight(idx) * self.value

    def sample_points(self, rng, size):
        return [rng.integers(-5, 6, size=self.dim) for _ in range(size)]

    def to_dict(self):
        d = self._base_dict()
        d["value"] = self.value.tolist()
        return d


@dataclass(frozen=True, eq=False, kw_only=True)
class CallbackKernel(KernelFamily):
    """Opaque kernel ``func(idx_tuple, points_tuple) -> vector``.

    The symmetry flag is whatever the caller declares; engines evaluate it
    through plain Python loops, so keep it for small instances.
    """

    func: Callable = None
    out_dimension: int = 1
    symmetric_decl: bool = False
    dim: int | None = 1

    kind = "callback"

    @property
    def out_dim(self):
        return self.out_dimension

    @property
    def point_dim(self):
        return self.dim

    @property
    def symmetric(self):
        return bool(self.symmetric_decl)

    def evaluate(self, idx, points):
        return as_vector(self.func(tuple(idx), tuple(points)))


_KERNEL_KINDS = {
    "table": TableKernel,
    "product": ProductKernel,
    "distance": DistanceKernel,
    "polynomial": PolynomialKernel,
    "constant": ConstantKernel,
}


def kernel_from_dict(d: dict) -> KernelFamily:
    """Build a kernel from its JSON form (see README for the schema)."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ModelError("kernel must be an object with a 'kind' field")
    kind = d["kind"]
    if kind not in _KERNEL_KINDS:
        raise ModelError(f"unknown kernel kind {kind!r}; expected one of {sorted(_KERNEL_KINDS)}")
    n = int(d["n"])
    weights = d.get("weights")
    if kind == "table":
        table = np.asarray(d["table"])
        return TableKernel(order=int(d.get("order", 2)), n=n, table=table, symmetric_decl=d.get("symmetric"))
    if kind == "distance":
        return DistanceKernel(n=n, weights=weights, dim=int(d.get("dim", 1)))
    if kind == "polynomial":
        return PolynomialKernel(n=n, weights=weights, coef=np.asarray(d["coef"]))
    if kind == "constant":
        return ConstantKernel(order=int(d.get("order", 2)), n=n, weights=weights,
                              dim=int(d.get("dim", 1)), value=d.get("value", 1))
    return ProductKernel(order=int(d.get("order", 2)), n=n, weights=weights, dim=int(d.get("dim", 1)))


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Finite-support law: atoms (points in R^m, or bare labels) with probabilities.

    Probabilities are kept as exact rationals; float inputs are read through
    their decimal representation.
    """

    probs: tuple
    points: tuple | None = None
    kind = "finite"

    def __post_init__(self):
        probs = tuple(to_fraction(p) for p in self.probs)
        if not probs:
            raise ModelError("finite distribution needs at least one atom")
        if any(p <= 0 for p in probs):
            raise ModelError("atom probabilities must be positive")
        if abs(float(sum(probs)) - 1.0) > 1e-12:
            raise ModelError(f"probabilities sum to {float(sum(probs))!r}, not 1")
        if sum(probs) != 1:
            # within tolerance: renormalize so exact arithmetic stays consistent
            total = sum(probs)
            probs = tuple(p / total for p in probs)
        object.__setattr__(self, "probs", probs)
        if self.points is not None:
            pts = []
            for p in self.points:
                arr = np.asarray(p, dtype=object).ravel() if not np.isscalar(p) else np.asarray([p], dtype=object)
                pts.append(tuple(to_fraction(c) for c in arr))
            if len(pts) != len(probs):
                raise ModelError("number of points and probabilities differ")
            if len({len(p) for p in pts}) != 1:
                raise ModelError("all atoms must share one dimension")
            object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def uniform(cls, points=None, size=None):
        if points is not None:
            size = len(points)
        return cls(tuple(Fraction(1, size) for _ in range(size)), points)

    @classmethod
    def rademacher(cls, dim: int = 1):
        """Uniform on {-1, +1}^dim, as an explicit atom list."""
        pts = list(itertools.product((-1, 1), repeat=dim))
        return cls.uniform(pts)

    @property
    def size(self) -> int:
        return len(self.probs)

    @property
    def dim(self):
        return None if self.points is None else len(self.points[0])

    def points_array(self) -> np.ndarray:
        """Atoms as a float (m, dim) array; labels become 0..m-1."""
        if self.points is None:
            return np.arange(self.size, dtype=np.float64)[:, None]
        return np.array([[float(c) for c in p] for p in self.points], dtype=np.float64)

    def exact_points(self) -> list:
        if self.points is None:
            return [(Fraction(i),) for i in range(self.size)]
        return [tuple(p) for p in self.points]

    def kernel_points(self) -> list:
        """Atoms in the form kernels consume: labels, ints, or float arrays."""
        if self.points is None:
            return list(range(self.size))
        out = []
        for p in self.points:
            if all(c.denominator == 1 for c in p):
                out.append(np.array([int(c) for c in p], dtype=np.int64))
            else:
                out.append(np.array([float(c) for c in p], dtype=np.float64))
        return out

    def integer_weights(self):
        """``(w, Q)`` with ``probs[a] == w[a] / Q`` and integer ``w``."""
        q = 1
        for p in self.probs:
            q = q * p.denominator // math.gcd(q, p.denominator)
        return [int(p * q) for p in self.probs], q

    def cdf(self) -> np.ndarray:
        c = np.cumsum([float(p) for p in self.probs])
        c[-1] = 1.0
        return c

    def mean(self) -> tuple:
        pts = self.exact_points()
        dim = len(pts[0])
        return tuple(sum(p * pt[j] for p, pt in zip(self.probs, pts)) for j in range(dim))

    def draws_per_point(self) -> int:
        return 1

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms of shape (..., ) to atom labels of the same shape."""
        return np.searchsorted(self.cdf(), u, side="right").astype(np.int64)

    def to_dict(self):
        d = {"kind": "finite", "probs": [str(p) for p in self.probs]}
        if self.points is not None:
            d["points"] = [[str(c) for c in p] for p in self.points]
        return d


_GENERATOR_KINDS = ("uniform_cube", "gaussian", "rademacher", "point_cloud")


@dataclass(frozen=True, eq=False)
class GeneratorDistribution:
    """Parametric law sampled from uniform draws.

    kinds: ``uniform_cube`` (``low``, ``high``), ``gaussian`` (``scale``),
    ``rademacher`` (independent signs per coordinate), ``point_cloud``
    (uniformly chosen ``centers`` plus gaussian noise of size ``sigma``).
    """

    gen: str
    dim: int = 1
    params: dict = field(default_factory=dict)
    kind = "generator"

    def __post_init__(self):
        if self.gen not in _GENERATOR_KINDS:
            raise ModelError(f"unknown generator {self.gen!r}; expected one of {_GENERATOR_KINDS}")
        if self.dim < 1:
            raise ModelError("dimension must be >= 1")
        if self.gen == "point_cloud":
            c = np.asarray(self.params.get("centers"), dtype=np.float64)
            if c.ndim != 2 or c.shape[1] != self.dim:
                raise ModelError("point_cloud needs centers of shape (K, dim)")

    def draws_per_point(self) -> int:
        if self.gen == "gaussian":
            return 2 * self.dim
        if self.gen == "point_cloud":
            return 1 + 2 * self.dim
        return self.dim

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Uniforms of shape (..., draws_per_point) to points (..., dim)."""
        if self.gen == "uniform_cube":
            lo = float(self.params.get("low", 0.0))
            hi = float(self.params.get("high", 1.0))
            return lo + (hi - lo) * u
        if self.gen == "rademacher":
            return np.where(u < 0.5, -1.0, 1.0)
        if self.gen == "gaussian":
            return float(self.params.get("scale", 1.0)) * _box_muller(u)
        centers = np.asarray(self.params["centers"], dtype=np.float64)
        which = np.minimum((u[..., 0] * len(centers)).astype(np.int64), len(centers) - 1)
        noise = _box_muller(u[..., 1:])
        return centers[which] + float(self.params.get("sigma", 0.1)) * noise

    def to_dict(self):
        return {"kind": "generator", "gen": self.gen, "dim": self.dim, "params": self.params}


def _box_muller(u):
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def distribution_from_dict(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise ModelError("distribution must be an object with a 'kind' field")
    if d["kind"] == "finite":
        return FiniteDistribution(tuple(d["probs"]), d.get("points"))
    if d["kind"] == "rademacher":
        return FiniteDistribution.rademacher(int(d.get("dim", 1)))
    if d["kind"] == "generator":
        return GeneratorDistribution(d["gen"], int(d.get("dim", 1)), dict(d.get("params", {})))
    raise ModelError(f"unknown distribution kind {d['kind']!r}")


# ---------------------------------------------------------------------------
# sample blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampleBlock:
    """``c`` independent copies of the sample: row ``j`` holds ``X^(j)_1..n``.

    ``rows`` has shape (c, n) for scalar points or labels, (c, n, m) for
    points in R^m.
    """

    rows: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rows)
        if r.ndim == 1:
            r = r[None, :]
        if r.ndim not in (2, 3):
            raise ModelError(f"sample block must be (c, n) or (c, n, m), got {r.shape}")
        object.__setattr__(self, "rows", r)

    @property
    def copies(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def point(self, copy: int, i: int):
        return self.rows[copy, i]

    @classmethod
    def stack(cls, *rows):
        arrs = [np.asarray(r) for r in rows]
        if len({a.shape for a in arrs}) > 1:
            raise ModelError(f"copies differ in shape: {[a.shape for a in arrs]}")
        return cls(np.stack(arrs))


# ---------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryVerdict:
    symmetric: bool
    idx: tuple | None = None
    points: tuple | None = None
    perm: tuple | None = None

    def __bool__(self):
        return self.symmetric


def check_kernel_symmetry(kernel: KernelFamily, trials: int = 1000, rng_seed: int = 0,
                          dist=None) -> SymmetryVerdict:
    """Test ``f_{i_pi}(s_pi) == f_i(s)`` for all k! permutations on sampled inputs.

    Points are drawn from ``dist`` when given (finite laws supply their
    atoms), otherwise from the kernel's own small-integer sampler.  Table
    kernels are checked exhaustively instead of by sampling.
    """
    k, n = kernel.order, kernel.n
    if n < k:
        return SymmetryVerdict(True)
    perms = list(itertools.permutations(range(k)))[1:]
    if isinstance(kernel, TableKernel):
        for idx in itertools.permutations(range(n), k):
            for atoms in itertools.product(range(kernel.n_labels), repeat=k):
                v = _first_violation(kernel, idx, atoms, perms)
                if v is not None:
                    return v
        return SymmetryVerdict(True)
    rng = np.random.default_rng(rng_seed)
    pool = None
    if isinstance(dist, FiniteDistribution):
        pool = dist.kernel_points()
    for _ in range(trials):
        idx = tuple(int(i) for i in rng.permutation(n)[:k])
        if pool is not None:
            pts = tuple(pool[int(a)] for a in rng.integers(0, len(pool), size=k))
        else:
            pts = tuple(kernel.sample_points(rng, k))
        v = _first_violation(kernel, idx, pts, perms)
        if v is not None:
            return v
    return SymmetryVerdict(True)


def _first_violation(kernel, idx, pts, perms):
    base = kernel.evaluate(idx, pts)
    for perm in perms:
        other = kernel.evaluate(tuple(idx[p] for p in perm), tuple(pts[p] for p in perm))
        if not values_equal(base, other):
            return SymmetryVerdict(False, tuple(idx), tuple(pts), tuple(perm))
    return None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
