"""Coupled, decoupled and polarized U-statistic sums.

A *statistic* here is a list of slot maps over a block of ``R`` sample rows:
slot map ``(r1, ..., rk)`` means argument ``s`` of ``f_{i1..ik}`` reads row
``r_s`` at index ``i_s``.  The coupled sum is ``[(0,) * k]`` over one row,
the decoupled sum ``[(0, 1, ..., k-1)]`` over ``k`` rows, and the polarized
sum of the four-term bracket is ``[(0,0), (0,1), (1,0), (1,1)]`` over two.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _kernels
from .model import (
    CallbackKernel,
    ConstantKernel,
    DistanceKernel,
    FiniteDistribution,
    KernelFamily,
    ModelError,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    SampleBlock,
    TableKernel,
    norm_of,
    values_equal,
)

__all__ = [
    "KernelEvaluationError",
    "STATISTICS",
    "statistic_maps",
    "enumerate_tuples",
    "tuple_array",
    "falling_factorial",
    "coupled_sum",
    "decoupled_sum",
    "polarized_sum_Tn",
    "symmetrize_kernel",
    "SymmetrizedKernel",
    "statistic_values",
]


class KernelEvaluationError(RuntimeError):
    """A kernel raised while being evaluated; carries the offending tuple."""

    def __init__(self, idx, points, cause):
        super().__init__(f"kernel failed at index tuple {idx} with points {points}: {cause!r}")
        self.idx = idx
        self.points = points


def falling_factorial(n: int, k: int) -> int:
    return math.perm(n, k) if n >= k else 0


def enumerate_tuples(n: int, k: int, start: int = 0) -> Iterator[tuple]:
    """Ordered k-tuples of pairwise-distinct indices, lexicographic, streamed.

    Indices run over ``start .. start + n - 1``; nothing is materialized.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        return iter(())
    return itertools.permutations(range(start, start + n), k)


@lru_cache(maxsize=64)
def _tuple_array_cached(n: int, k: int) -> np.ndarray:
    if n < k:
        arr = np.zeros((0, k), dtype=np.int64)
    else:
        arr = np.fromiter(itertools.chain.from_iterable(itertools.permutations(range(n), k)),
                          dtype=np.int64, count=math.perm(n, k) * k).reshape(-1, k)
    arr.setflags(write=False)
    return arr


def tuple_array(n: int, k: int) -> np.ndarray:
    """All distinct tuples as a read-only (P, k) array (0-based, lexicographic)."""
    return _tuple_array_cached(int(n), int(k))


# statistic name -> (rows, slot maps) for k = 2; "coupled"/"decoupled" work for any k
STATISTICS = {
    "coupled": None,
    "decoupled": None,
    "T_n": (2, ((0, 0), (0, 1), (1, 0), (1, 1))),
    # sum f(Xt_i, X_j): row 0 is X, row 1 is Xt
    "mixed": (2, ((1, 0),)),
    "mixed_forward": (2, ((0, 1),)),
    "coupled_pair": (2, ((0, 0), (1, 1))),
    "coupled_second": (2, ((1, 1),)),
    "coupled_first": (2, ((0, 0),)),
    "mixed_pair": (2, ((0, 1), (1, 0))),
}


def statistic_maps(name: str, k: int):
    """``(rows, maps)`` for a named statistic of a kernel of order ``k``."""
    if name == "coupled":
        return 1, np.zeros((1, k), dtype=np.int64)
    if name == "decoupled":
        return k, np.arange(k, dtype=np.int64)[None, :]
    if name not in STATISTICS:
        raise ValueError(f"unknown statistic {name!r}; expected one of {sorted(STATISTICS)}")
    if k != 2:
        raise ValueError(f"statistic {name!r} is defined for k=2 only")
    rows, maps = STATISTICS[name]
    return rows, np.array(maps, dtype=np.int64)


# ---------------------------------------------------------------------------
# batch engine
# ---------------------------------------------------------------------------

def statistic_values(kernel: KernelFamily, blocks: np.ndarray, maps: np.ndarray,
                     dist=None, table=None, backend=None) -> np.ndarray:
    """Evaluate a statistic on a batch of blocks, shape (B, d).

    ``blocks`` holds atom labels (B, R, n) when ``dist`` is finite (the kernel
    is tabulated on its atoms, or ``table`` is passed pre-tabulated), and real
    points (B, R, n, dim) otherwise.
    """
    k, n = kernel.order, kernel.n
    tuples = tuple_array(n, k)
    maps = np.ascontiguousarray(maps, dtype=np.int64)
    if isinstance(dist, FiniteDistribution):
        if table is None:
            table = kernel.tabulate(dist)
        return _kernels.table_stat(np.ascontiguousarray(table), n, dist.size, k, tuples, maps,
                                   np.ascontiguousarray(blocks, dtype=np.int64), backend)
    if isinstance(kernel, (ProductKernel, DistanceKernel, PolynomialKernel, ConstantKernel)):
        blocks = np.asarray(blocks, dtype=np.float64)
        if blocks.ndim == 3:
            blocks = blocks[..., None]
        coef = _point_coef(kernel)
        return _kernels.point_stat(kernel.code, kernel.weights_flat(), coef, k, n, tuples, maps,
                                   np.ascontiguousarray(blocks), backend)
    return np.stack([_python_sum(kernel, blk, maps) for blk in blocks])


def _point_coef(kernel):
    if isinstance(kernel, PolynomialKernel):
        return np.ascontiguousarray(kernel.coef, dtype=np.float64)
    if isinstance(kernel, ConstantKernel):
        return np.ascontiguousarray(kernel.value, dtype=np.float64)[None, :]
    return np.zeros((1, 1), dtype=np.float64)


def _python_sum(kernel, rows, maps):
    total = None
    for sm in maps:
        for idx in enumerate_tuples(kernel.n, kernel.order):
            pts = tuple(rows[sm[s]][i] for s, i in enumerate(idx))
            try:
                v = np.asarray(kernel.evaluate(idx, pts))
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                raise KernelEvaluationError(idx, pts, exc) from exc
            total = v.copy() if total is None else total + v
    if total is None:
        total = np.zeros(kernel.out_dim, dtype=np.int64)
    return total


def _block_sum(kernel, block: SampleBlock, maps, norm: NormSpec):
    if block.n != kernel.n:
        raise ModelError(f"block has n={block.n}, kernel expects n={kernel.n}")
    rows = block.rows
    if isinstance(kernel, TableKernel) or isinstance(kernel, CallbackKernel):
        value = _python_sum(kernel, rows, maps)
    elif rows.dtype.kind in "iu" and not isinstance(kernel, DistanceKernel):
        # integer points: stay exact by using the reference loop
        value = _python_sum(kernel, rows, maps)
    else:
        value = statistic_values(kernel, rows[None], maps)[0]
    return value, norm_of(value, norm)


def coupled_sum(kernel: KernelFamily, block: SampleBlock, norm: NormSpec = NormSpec()):
    """``sum_{distinct tuples} f(X_{i1}, ..., X_{ik})`` and its norm."""
    if block.copies != 1:
        raise ModelError(f"coupled sum needs one copy, block has {block.copies}")
    return _block_sum(kernel, block, statistic_maps("coupled", kernel.order)[1], norm)


def decoupled_sum(kernel: KernelFamily, block: SampleBlock, norm: NormSpec = NormSpec()):
    """``sum f(X^(1)_{i1}, ..., X^(k)_{ik})`` with copy ``s`` feeding slot ``s``."""
    if block.copies != kernel.order:
        raise ModelError(f"decoupled sum needs {kernel.order} copies, block has {block.copies}")
    return _block_sum(kernel, block, statistic_maps("decoupled", kernel.order)[1], norm)


def polarized_sum_Tn(kernel: KernelFamily, X, Xt, norm: NormSpec = NormSpec()):
    """Four-term polarized sum over both copies (k = 2 only)."""
    if kernel.order != 2:
        raise ModelError("the polarized sum is defined for k=2")
    X = np.asarray(X)
    Xt = np.asarray(Xt)
    if X.shape != Xt.shape:
        raise ModelError("X and Xt must have equal length")
    return _block_sum(kernel, SampleBlock.stack(X, Xt), statistic_maps("T_n", 2)[1], norm)


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------

class SymmetrizedKernel(CallbackKernel):
    """Average of a kernel over all k! joint permutations of indices and points."""

    @classmethod
    def of(cls, base: KernelFamily):
        perms = tuple(itertools.permutations(range(base.order)))

        def func(idx, pts):
            total = None
            for perm in perms:
                v = np.asarray(base.evaluate(tuple(idx[p] for p in perm), tuple(pts[p] for p in perm)))
                total = v if total is None else total + v
            return total / len(perms)

        return cls(n=base.n, order=base.order, func=func, out_dimension=base.out_dim,
                   symmetric_decl=True, dim=base.point_dim)


def symmetrize_kernel(kernel: KernelFamily) -> KernelFamily:
    """Return the permutation average of ``kernel`` (a symmetric kernel).

    Tables and builtin kernels whose point function is already symmetric stay
    in their fast representation; other kernels get wrapped.
    """
    k = kernel.order
    perms = list(itertools.permutations(range(k)))
    if isinstance(kernel, TableKernel):
        t = kernel.table
        total = sum(np.transpose(t, list(p) + [k + q for q in p] + [2 * k]).astype(np.int64 if t.dtype.kind == "i" else np.float64)
                    for p in perms)
        if total.dtype.kind == "i" and np.all(total % len(perms) == 0):
            sym = total // len(perms)
        else:
            sym = total / len(perms)
        return TableKernel(n=kernel.n, order=k, table=sym, symmetric_decl=True)
    if isinstance(kernel, (ProductKernel, DistanceKernel, ConstantKernel)):
        if kernel.weights is None:
            return kernel
        w = sum(np.transpose(kernel.weights, p).astype(np.float64) for p in perms) / len(perms)
        if isinstance(kernel, ConstantKernel):
            return ConstantKernel(n=kernel.n, order=k, weights=w, dim=kernel.dim, value=kernel.value)
        return type(kernel)(n=kernel.n, order=k, weights=w, dim=kernel.dim)
    if isinstance(kernel, PolynomialKernel):
        c = kernel.coef
        size = max(c.shape)
        padded = np.zeros((size, size), dtype=np.float64)
        padded[: c.shape[0], : c.shape[1]] = c
        if kernel.weights is None or values_equal(kernel.weights, kernel.weights.T):
            return PolynomialKernel(n=kernel.n, weights=kernel.weights, coef=(padded + padded.T) / 2)
    return SymmetrizedKernel.of(kernel)
