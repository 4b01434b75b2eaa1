"""The numba and numpy paths of every hot loop must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest

from decouplab import _kernels
from decouplab._accel import HAVE_NUMBA
from decouplab.chaos import random_chaos_form
from decouplab.coupling import random_table_kernel
from decouplab.model import ConstantKernel, DistanceKernel, FiniteDistribution, PolynomialKernel, ProductKernel
from decouplab.ustat import statistic_maps, statistic_values

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("stat", ["coupled", "decoupled", "T_n", "mixed", "coupled_pair"])
def test_table_backends_identical(stat):
    rng = np.random.default_rng(0)
    dist = FiniteDistribution.uniform([0, 1, 2])
    kernel = random_table_kernel(rng, 5, m=3, dim=2)
    rows, maps = statistic_maps(stat, 2)
    labels = rng.integers(0, 3, size=(300, rows, 5))
    a = statistic_values(kernel, labels, maps, dist=dist, backend="numba")
    b = statistic_values(kernel, labels, maps, dist=dist, backend="numpy")
    assert a.dtype == np.int64 and np.array_equal(a, b)


@needs_numba
@pytest.mark.parametrize("kernel", [
    ProductKernel(n=6, dim=2),
    DistanceKernel(n=6, dim=3),
    PolynomialKernel(n=6, coef=np.array([[1.0, 2.0], [0.5, -1.0]])),
    ConstantKernel(n=6, value=2.5),
    ProductKernel(n=6, weights=np.arange(36.0).reshape(6, 6)),
])
def test_point_backends_identical(kernel):
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(200, 2, 6, kernel.point_dim))
    _, maps = statistic_maps("T_n", 2)
    a = statistic_values(kernel, pts, maps, backend="numba")
    b = statistic_values(kernel, pts, maps, backend="numpy")
    assert np.array_equal(a, b)


@needs_numba
def test_chaos_backends_identical():
    rng = np.random.default_rng(2)
    for n in (1, 4, 9):
        f = random_chaos_form(rng, n, dim=2)
        assert np.array_equal(_kernels.chaos_values(f.x, f.a, f.b, "numba"),
                              _kernels.chaos_values(f.x, f.a, f.b, "numpy"))


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.chaos_values(np.zeros(1), np.zeros((1, 1)), np.zeros((1, 1, 1)), "cuda")


def test_env_flag_disables_numba():
    code = "from decouplab import _accel; print(_accel.USE_NUMBA, _accel.backend_name())"
    env = dict(os.environ, DECOUPLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "False"


def test_numpy_only_run_matches(tmp_path):
    """A full exact computation gives the same answer with numba switched off."""
    code = ("from decouplab.problab import exact_tail; from decouplab.model import *;"
            "c = exact_tail('T_n', ProductKernel(n=3), FiniteDistribution.rademacher(1), 3, NormSpec(), [1, 2, 4, 8]);"
            "print(c.to_json())")
    runs = []
    for flag in ("0", "1"):
        env = dict(os.environ, DECOUPLAB_DISABLE_NUMBA=flag)
        runs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                                   check=True).stdout)
    assert runs[0] == runs[1]
