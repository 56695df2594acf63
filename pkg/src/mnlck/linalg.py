"""Sparse matrices with exact or float entries, and rank.

Exact ranks go through a fraction-free integer elimination kernel.  A
compiled version (``_rank_ext``) is used when it was built and imports; the
pure-Python ``_rank_py`` is the fallback and can be forced by setting
``MNLCK_PURE_PYTHON=1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from . import _rank_py

EPS_RANK = 1e-8
GAP_CONFIDENT = 1e3
_DENSE_LIMIT = 20_000_000

_ext = None
if os.environ.get("MNLCK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _rank_ext as _ext
    except ImportError:  # extension not built
        _ext = None

KERNEL = "cython" if _ext is not None else "python"


class RankError(ValueError):
    pass


@dataclass(frozen=True)
class SparseMatrix:
    """Row-sparse matrix; ``rows[i]`` maps column index to a nonzero entry."""

    shape: tuple
    rows: tuple

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = np.asarray(a, dtype=object)
        if a.ndim != 2:
            raise RankError("expected a 2-d array")
        rows = tuple({j: v for j, v in enumerate(r) if v != 0} for r in a)
        return cls(a.shape, rows)

    @classmethod
    def identity(cls, n: int, one=Fraction(1)) -> "SparseMatrix":
        return cls((n, n), tuple({i: one} for i in range(n)))

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def toarray(self, dtype=float) -> np.ndarray:
        out = np.zeros(self.shape, dtype=dtype)
        if dtype is object:
            out[...] = 0
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i, j] = v
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise RankError(f"shape mismatch {self.shape} @ {other.shape}")
        rows = []
        for r in self.rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in other.rows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            rows.append({j: v for j, v in acc.items() if v != 0})
        return SparseMatrix((self.shape[0], other.shape[1]), tuple(rows))

    def max_abs(self) -> float:
        return max((abs(v) for r in self.rows for v in r.values()), default=0)

    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for r in self.rows for v in r.values())


@dataclass(frozen=True)
class RankResult:
    rank: int
    backend: str
    confident: bool = True
    gap_ratio: float | None = None
    sigma_max: float | None = None

    def __int__(self) -> int:
        return self.rank


def _integer_rows(m: SparseMatrix) -> list:
    out = []
    for r in m.rows:
        if not r:
            continue
        vals = {}
        for j, v in r.items():
            if isinstance(v, float):
                raise RankError("exact rank needs int/Fraction entries, got a float")
            vals[j] = Fraction(v)
        scale = lcm(*(v.denominator for v in vals.values()))
        out.append({j: int(v * scale) for j, v in vals.items()})
    return out


def integer_rank(rows, ncols: int) -> int:
    """Exact rank of integer sparse rows, via the compiled kernel when possible."""
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return 0
    if _ext is not None and len(rows) * ncols <= _DENSE_LIMIT:
        bound = 1 << 62
        if all(abs(v) < bound for r in rows for v in r.values()):
            a = np.zeros((len(rows), ncols), dtype=np.int64)
            for i, r in enumerate(rows):
                for j, v in r.items():
                    a[i, j] = v
            try:
                return _ext.integer_rank_dense(a)
            except OverflowError:
                pass
    return _rank_py.integer_rank(rows, ncols)


def singular_values(m) -> np.ndarray:
    a = m.toarray(float) if isinstance(m, SparseMatrix) else np.asarray(m, dtype=float)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def float_rank(s: np.ndarray, eps: float = EPS_RANK) -> RankResult:
    """Rank from singular values: count above ``eps * max``, flag a weak gap."""
    if s.size == 0 or s[0] == 0:
        return RankResult(0, "float", True, None, float(s[0]) if s.size else 0.0)
    s = np.sort(s)[::-1]
    r = int(np.sum(s > eps * s[0]))
    if r == s.size:
        gap = float("inf")
    else:
        gap = float(s[r - 1] / s[r]) if s[r] > 0 else float("inf")
    return RankResult(r, "float", gap >= GAP_CONFIDENT, gap, float(s[0]))


def rank(m, backend: str = "rational", eps: float = EPS_RANK) -> RankResult:
    """Rank of a matrix (``SparseMatrix`` or array-like).

    ``rational`` is exact (entries must be int or Fraction).  ``float``
    counts singular values above ``eps`` times the largest and marks the
    result low-confidence when the kept/dropped singular values straddle the
    threshold by a ratio below 1e3.
    """
    if not isinstance(m, SparseMatrix):
        m = SparseMatrix.from_dense(m)
    if backend == "rational":
        return RankResult(integer_rank(_integer_rows(m), m.shape[1]), "rational")
    if backend == "float":
        return float_rank(singular_values(m), eps)
    raise RankError(f"unknown backend {backend!r}")


def nullspace_exact(m) -> list:
    """Basis of the right kernel over Q, as lists of Fractions (reduced echelon)."""
    a = m.toarray(object) if isinstance(m, SparseMatrix) else np.asarray(m, dtype=object)
    nrows, ncols = a.shape
    rows = [[Fraction(x) for x in r] for r in a]
    pivcols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivcols.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivcols]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivcols):
            v[pc] = -rows[i][fcol]
        basis.append(v)
    return basis
