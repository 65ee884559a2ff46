"""Linear algebra over Z/2^N.

Subgroups of (Z/2^N)^n are kept in Howell form: an echelon generating set in
which every pivot is a power of two and, for each pivot row p with pivot 2^v,
the annihilator row 2^(N-v)*p has been folded back into the later rows.  With
that property, reduction by the pivot rows is a correct membership test and
the order of the subgroup is 2^sum(N - v).

The elimination itself (``howell_reduce``) is the hot loop of page turning.
A compiled implementation from ``tmfdual._zmodcore`` is used when available;
the numpy version below is the reference and fallback.  Set
``TMFDUAL_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

DTYPE = np.uint64


def _inverse_odd(u: int, N: int) -> int:
    return pow(int(u), -1, 1 << N)


def _valuation(x: int) -> int:
    return (x & -x).bit_length() - 1


def howell_reduce_py(mat: np.ndarray, npiv: int, N: int):
    """Echelonize ``mat`` over Z/2^N using pivots in the first ``npiv`` columns.

    Returns ``(pivots, cols, vals, rest)``: pivot rows (normalized so the pivot
    entry is exactly 2^v), their pivot columns, their valuations v, and the
    remaining rows, whose first ``npiv`` entries are zero.  Annihilator rows
    are generated and processed, so ``rest`` spans every combination of the
    input rows that vanishes on the pivot columns.
    """
    mask = DTYPE((1 << N) - 1) if N < 64 else DTYPE(0xFFFFFFFFFFFFFFFF)
    pool = np.array(mat, dtype=DTYPE, copy=True) & mask
    if pool.ndim != 2:
        pool = pool.reshape(0, npiv)
    pivots, cols, vals = [], [], []
    for c in range(npiv):
        if pool.shape[0] == 0:
            break
        col = pool[:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        entries = col[nz]
        low = entries & (~entries + DTYPE(1))
        k = nz[int(np.argmin(low))]
        v = _valuation(int(col[k]))
        u = int(col[k]) >> v
        row = pool[k].copy()
        if u != 1:
            row = (row * DTYPE(_inverse_odd(u, N))) & mask
        pool = np.delete(pool, k, axis=0)
        factors = pool[:, c] >> DTYPE(v)
        hit = np.flatnonzero(factors)
        if hit.size:
            pool[hit] = (pool[hit] - np.outer(factors[hit], row)) & mask
        if v > 0:
            ann = (row << DTYPE(N - v)) & mask
            if ann.any():
                pool = np.vstack([pool, ann[None, :]])
        keep = pool.any(axis=1)
        if not keep.all():
            pool = pool[keep]
        pivots.append(row)
        cols.append(c)
        vals.append(v)
    ncols = mat.shape[1] if mat.ndim == 2 else npiv
    piv = np.array(pivots, dtype=DTYPE).reshape(len(pivots), ncols)
    return piv, cols, vals, pool


try:
    if os.environ.get("TMFDUAL_PURE_PYTHON"):
        raise ImportError
    from ._zmodcore import howell_reduce as _howell_reduce_c

    def howell_reduce(mat, npiv, N):
        mat = np.ascontiguousarray(mat, dtype=DTYPE)
        if mat.ndim != 2:
            mat = mat.reshape(0, npiv)
        return _howell_reduce_c(mat, int(npiv), int(N))

    BACKEND = "cython"
except ImportError:  # pragma: no cover - exercised when the extension is absent
    howell_reduce = howell_reduce_py
    BACKEND = "python"


class Subgroup:
    """A subgroup of (Z/2^N)^n in Howell form."""

    __slots__ = ("rows", "cols", "vals", "n", "N")

    def __init__(self, rows: np.ndarray, cols, vals, n: int, N: int):
        self.rows = rows
        self.cols = list(cols)
        self.vals = list(vals)
        self.n = n
        self.N = N

    @classmethod
    def generated_by(cls, gens, n: int, N: int) -> Subgroup:
        gens = np.asarray(gens, dtype=DTYPE).reshape(-1, n)
        piv, cols, vals, _ = howell_reduce(gens, n, N)
        return cls(piv, cols, vals, n, N)

    @classmethod
    def zero(cls, n: int, N: int) -> Subgroup:
        return cls(np.zeros((0, n), dtype=DTYPE), [], [], n, N)

    def log_order(self) -> int:
        return sum(self.N - v for v in self.vals)

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Remainder of x modulo the subgroup (zero iff x is a member)."""
        mask = DTYPE((1 << self.N) - 1)
        x = np.array(x, dtype=DTYPE, copy=True) & mask
        for row, c, v in zip(self.rows, self.cols, self.vals):
            e = int(x[c])
            if e == 0:
                continue
            if e & ((1 << v) - 1):
                continue
            x = (x - DTYPE(e >> v) * row) & mask
        return x

    def contains(self, x) -> bool:
        return not self.reduce(x).any()

    def contains_subgroup(self, other: Subgroup) -> bool:
        return all(self.contains(r) for r in other.rows)

    def __add__(self, other: Subgroup) -> Subgroup:
        return Subgroup.generated_by(np.vstack([self.rows, other.rows]), self.n, self.N)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.log_order() == other.log_order()
                and self.contains_subgroup(other))

    def __repr__(self):
        return f"Subgroup(n={self.n}, N={self.N}, log2|H|={self.log_order()})"


def kernel_rows(images: np.ndarray, tracked: np.ndarray, modulo: Subgroup | None, N: int) -> np.ndarray:
    """Combinations of ``tracked`` rows whose ``images`` lie in ``modulo``.

    ``images[i]`` is the image of ``tracked[i]``; the result spans
    {sum c_i tracked_i : sum c_i images_i in modulo}.
    """
    k, nimg = images.shape
    ntr = tracked.shape[1]
    blocks = [np.hstack([images, tracked])]
    if modulo is not None and len(modulo.rows):
        blocks.append(np.hstack([modulo.rows, np.zeros((len(modulo.rows), ntr), dtype=DTYPE)]))
    mat = np.vstack(blocks) if len(blocks) > 1 else blocks[0]
    _, _, _, rest = howell_reduce(mat, nimg, N)
    return rest[:, nimg:] if len(rest) else np.zeros((0, ntr), dtype=DTYPE)


def matmul(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Matrix product mod 2^N without overflow surprises (uint64 wraps mod 2^64)."""
    mask = DTYPE((1 << N) - 1)
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=DTYPE)
    return (a.astype(DTYPE) @ b.astype(DTYPE)) & mask
