"""Counter-based random streams (Philox4x32-10).

Every uniform draw is a pure function of ``(seed, stream, replicate, index)``,
so a Monte Carlo run can be split across any number of workers without
changing a single draw.  The block function is written once and used both
compiled (numba) and vectorized over numpy arrays.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = ["philox4x32", "uniforms", "uniforms_numpy", "split_seed"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S5 = np.uint64(5)
_S6 = np.uint64(6)
_S26 = np.uint64(26)
_INV53 = 1.0 / 9007199254740992.0


def _philox_py(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        n0 = (p1 >> _S32) ^ c1 ^ k0
        n2 = (p0 >> _S32) ^ c3 ^ k1
        c1 = p1 & _MASK
        c3 = p0 & _MASK
        c0 = n0
        c2 = n2
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


_philox_nb = njit(_philox_py)


def philox4x32(counter, key):
    """Philox4x32-10 block: four 32-bit counter words and two key words in,
    four 32-bit words out (as Python ints)."""
    c = [np.uint64(int(v) & 0xFFFFFFFF) for v in counter]
    k = [np.uint64(int(v) & 0xFFFFFFFF) for v in key]
    return tuple(int(v) for v in _philox_py(c[0], c[1], c[2], c[3], k[0], k[1]))


def split_seed(seed):
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def _to_double(hi, lo):
    return (((hi >> _S5) << _S26) | (lo >> _S6)).astype(np.float64) * _INV53


def uniforms_numpy(seed, stream, rep_start, n_reps, count):
    """Uniform doubles in [0, 1) of shape ``(n_reps, count)``.

    Row ``r`` belongs to replicate ``rep_start + r``; column ``q`` is its
    ``q``-th draw.  One Philox block yields two doubles.
    """
    k0, k1 = (np.uint64(v) for v in split_seed(seed))
    n_blocks = (count + 1) // 2
    reps = np.arange(rep_start, rep_start + n_reps, dtype=np.uint64)[:, None]
    q = np.arange(n_blocks, dtype=np.uint64)[None, :]
    c0 = np.broadcast_to(q, (n_reps, n_blocks)).copy()
    c1 = np.broadcast_to(reps & _MASK, (n_reps, n_blocks)).copy()
    c2 = np.broadcast_to(reps >> _S32, (n_reps, n_blocks)).copy()
    c3 = np.full((n_reps, n_blocks), np.uint64(stream) & _MASK, dtype=np.uint64)
    x0, x1, x2, x3 = _philox_py(c0, c1, c2, c3, k0, k1)
    out = np.empty((n_reps, 2 * n_blocks), dtype=np.float64)
    out[:, 0::2] = _to_double(x0, x1)
    out[:, 1::2] = _to_double(x2, x3)
    return out[:, :count]


@njit
def _uniforms_nb(k0, k1, stream, rep_start, n_reps, count):
    out = np.empty((n_reps, count), dtype=np.float64)
    s = np.uint64(stream) & _MASK
    for r in range(n_reps):
        rep = np.uint64(rep_start + r)
        r_lo = rep & _MASK
        r_hi = rep >> _S32
        q = 0
        blk = np.uint64(0)
        while q < count:
            x0, x1, x2, x3 = _philox_nb(blk, r_lo, r_hi, s, k0, k1)
            out[r, q] = np.float64(((x0 >> _S5) << _S26) | (x1 >> _S6)) * _INV53
            if q + 1 < count:
                out[r, q + 1] = np.float64(((x2 >> _S5) << _S26) | (x3 >> _S6)) * _INV53
            q += 2
            blk += np.uint64(1)
    return out


def uniforms(seed, stream, rep_start, n_reps, count, backend=None):
    """Backend-dispatching version of :func:`uniforms_numpy`."""
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        k0, k1 = split_seed(seed)
        return _uniforms_nb(np.uint64(k0), np.uint64(k1), np.uint64(stream),
                            np.int64(rep_start), np.int64(n_reps), np.int64(count))
    if backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return uniforms_numpy(seed, stream, rep_start, n_reps, count)
