import numpy as np
import pytest

from decouplab._accel import HAVE_NUMBA
from decouplab.rng import philox4x32, split_seed, uniforms, uniforms_numpy

# Known-answer vectors of the Random123 reference implementation (Philox4x32-10)
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("counter,key,expected", KAT)
def test_philox_known_answers(counter, key, expected):
    assert tuple(philox4x32(counter, key)) == expected


def test_uniform_range_and_shape():
    u = uniforms_numpy(3, 0, 0, 1000, 7)
    assert u.shape == (1000, 7)
    assert u.min() >= 0 and u.max() < 1


def test_streams_are_partition_invariant():
    whole = uniforms_numpy(11, 2, 0, 100, 5)
    parts = np.concatenate([uniforms_numpy(11, 2, s, 25, 5) for s in range(0, 100, 25)])
    assert np.array_equal(whole, parts)


def test_seeds_and_streams_differ():
    a = uniforms_numpy(1, 0, 0, 10, 4)
    assert not np.array_equal(a, uniforms_numpy(2, 0, 0, 10, 4))
    assert not np.array_equal(a, uniforms_numpy(1, 1, 0, 10, 4))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_bit_identical():
    for count in (1, 2, 5, 8):
        assert np.array_equal(uniforms(9, 3, 17, 200, count, "numba"), uniforms(9, 3, 17, 200, count, "numpy"))


def test_moments_roughly_uniform():
    u = uniforms_numpy(0, 0, 0, 20000, 4).ravel()
    assert abs(u.mean() - 0.5) < 0.01
    assert abs(u.var() - 1 / 12) < 0.005


def test_seed_range():
    assert split_seed(2**64 - 1) == (2**32 - 1, 2**32 - 1)
    with pytest.raises(ValueError):
        split_seed(-1)
