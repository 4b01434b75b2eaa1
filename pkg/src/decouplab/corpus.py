"""Deterministic instance families for sweeps and the acceptance checks."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .chaos import random_chaos_form
from .coupling import random_table_kernel
from .model import FiniteDistribution, TableKernel


def identity_instances(count: int = 1000, seed: int = 0, low: int = -5, high: int = 5):
    """``(kernel, (X_i, Xt_i, X_j, Xt_j), i, j)`` with integer lookup kernels on 4 labels.

    Each kernel is a 2-index table on labels ``0..3``; points are labels, so
    ``f_ij`` is an arbitrary integer function of its two arguments.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 5))
        table = rng.integers(low, high + 1, size=(n, n, 4, 4, 1))
        kernel = TableKernel(n=n, table=table)
        i, j = rng.choice(n, size=2, replace=False)
        pts = tuple(int(v) for v in rng.integers(0, 4, size=4))
        out.append((kernel, pts, int(i), int(j)))
    return out


def small_finite_laws(count: int = 200, max_atoms: int = 4, seed: int = 0, low: int = -5, high: int = 5):
    """Finite laws on at most ``max_atoms`` points; mostly scalar, some in R^2."""
    rng = np.random.default_rng(seed)
    laws = []
    for idx in range(count):
        m = int(rng.integers(1, max_atoms + 1))
        dim = 2 if idx % 5 == 4 else 1
        pts = [tuple(int(c) for c in rng.integers(low, high + 1, size=dim)) for _ in range(m)]
        w = [int(v) for v in rng.integers(1, 6, size=m)]
        total = sum(w)
        laws.append(FiniteDistribution(tuple(Fraction(v, total) for v in w), pts))
    return laws


def mean_zero_scalar_laws(count: int = 500, seed: int = 0, low: int = -5, high: int = 5):
    """``(a, Y)`` pairs: integer shift ``a`` and a mean-zero finite law ``Y`` on R.

    The last atom is placed so the mean vanishes, which makes it rational.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.integers(1, 5))
        pts = [Fraction(int(v)) for v in rng.integers(low, high + 1, size=m)]
        w = [int(v) for v in rng.integers(1, 6, size=m + 1)]
        s = sum(wi * yi for wi, yi in zip(w, pts))
        pts.append(-s / w[-1])
        total = sum(w)
        law = FiniteDistribution(tuple(Fraction(v, total) for v in w), [(y,) for y in pts])
        a = int(rng.integers(low, high + 1))
        out.append((a, law))
    return out


def chaos_forms(count: int = 1000, n_max: int = 12, seed: int = 0, low: int = -5, high: int = 5):
    """Scalar integer chaos forms with ``n`` cycling through ``1..n_max``."""
    rng = np.random.default_rng(seed)
    forms = []
    for idx in range(count):
        n = 1 + idx % n_max
        forms.append(random_chaos_form(rng, n, low, high))
    return forms


def theorem_kernels(count: int = 50, sizes=(3, 4), seed: int = 0, low: int = -5, high: int = 5):
    """Random integer lookup kernels on the two-atom sign law, ``n`` alternating over ``sizes``."""
    rng = np.random.default_rng(seed)
    return [random_table_kernel(rng, sizes[idx % len(sizes)], 2, low, high) for idx in range(count)]


__all__ = ["identity_instances", "small_finite_laws", "mean_zero_scalar_laws", "chaos_forms",
           "theorem_kernels"]
