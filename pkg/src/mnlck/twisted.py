"""Transport-weighted coboundaries and twisted Betti numbers.

A k-simplex is based at its smallest vertex.  The twisted coboundary of a
k-cochain f on a (k+1)-simplex s = (v0 .. v_{k+1}) is

    (D f)(s) = t(v0 v1) f(v1 .. v_{k+1}) + sum_{i>=1} (-1)^i f(s minus v_i)

so only the face opposite the base vertex picks up a transport weight, and
D D = 0 is exactly the cocycle condition t(v0v1) t(v1v2) = t(v0v2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .complex import Character, Cochain, ComplexError, LeeCocycle, SimplicialComplex, faces
from .linalg import RankResult, SparseMatrix, rank

BACKENDS = ("rational", "float")


class AssemblyError(ValueError):
    pass


def _exact_weight(w):
    if isinstance(w, bool) or not isinstance(w, (int, Fraction)):
        raise AssemblyError(
            f"rational backend needs exact weights (int or Fraction); got {w!r}. "
            "Supply the character as exact edge weights, or use the float backend."
        )
    return Fraction(w)


def _weights_for(K: SimplicialComplex, theta, backend: str) -> tuple:
    if backend not in BACKENDS:
        raise AssemblyError(f"unknown backend {backend!r}")
    if theta is None:
        theta = Character.trivial(K)
    if isinstance(theta, Cochain):
        theta = LeeCocycle(theta)
    if theta.complex != K:
        raise ComplexError("cocycle is defined on a different complex")
    if backend == "rational":
        if isinstance(theta, LeeCocycle):
            if any(v != 0 for v in theta.values):
                raise AssemblyError(
                    "rational backend cannot exponentiate a nonzero Lee cocycle; pass a Character with exact weights"
                )
            return (Fraction(1),) * K.count(1)
        return tuple(_exact_weight(w) for w in theta.weights)
    if isinstance(theta, LeeCocycle):
        return tuple(math.exp(float(v)) for v in theta.values)
    return tuple(float(w) for w in theta.weights)


def twisted_coboundary(K: SimplicialComplex, weights, k: int, one=1) -> SparseMatrix:
    """Matrix of D: C^k -> C^{k+1}; rows are (k+1)-simplices, columns k-simplices."""
    rows = []
    for s in K.simplices(k + 1):
        row = {}
        for i, face in enumerate(faces(s)):
            c = K.index(face)
            row[c] = weights[K.index(s[:2])] if i == 0 else (one if i % 2 == 0 else -one)
        rows.append(row)
    return SparseMatrix((K.count(k + 1), K.count(k)), tuple(rows))


@dataclass(frozen=True)
class TwistedComplex:
    complex: SimplicialComplex
    weights: tuple
    matrices: tuple
    backend: str

    @property
    def character(self) -> Character:
        return Character(self.complex, self.weights)

    @cached_property
    def ranks(self) -> tuple:
        return tuple(rank(D, self.backend) for D in self.matrices)

    @property
    def confident(self) -> bool:
        return all(r.confident for r in self.ranks)

    def square_residual(self):
        """Largest |entry| of D_{k+1} D_k over all k (exactly 0 in the rational backend)."""
        worst = Fraction(0) if self.backend == "rational" else 0.0
        for a, b in zip(self.matrices, self.matrices[1:]):
            worst = max(worst, (b @ a).max_abs())
        return worst


def assemble_twisted(K: SimplicialComplex, theta=None, backend: str = "rational") -> TwistedComplex:
    """Assemble the twisted cochain complex of ``K`` for a character.

    ``theta`` is a ``Character`` (edge weights), a ``LeeCocycle`` or a closed
    1-``Cochain`` (additive, exponentiated in the float backend), or ``None``
    for the trivial character.  The rational backend takes weights only,
    because exp of a nonzero rational is irrational.
    """
    weights = _weights_for(K, theta, backend)
    one = Fraction(1) if backend == "rational" else 1.0
    mats = tuple(twisted_coboundary(K, weights, k, one) for k in range(K.dimension))
    return TwistedComplex(K, weights, mats, backend)


def twisted_betti(tc: TwistedComplex) -> tuple:
    """Dimensions of H^k(K; L) for k = 0 .. dim K."""
    K = tc.complex
    r = [x.rank for x in tc.ranks] + [0]
    return tuple(K.count(k) - r[k] - (r[k - 1] if k else 0) for k in range(K.dimension + 1))


def betti_report(tc: TwistedComplex) -> dict:
    b = twisted_betti(tc)
    return {
        "betti": list(b),
        "euler": sum((-1) ** k * x for k, x in enumerate(b)),
        "backend": tc.backend,
        "confidence": "high" if tc.confident else "low",
    }


def untwisted_betti(K: SimplicialComplex) -> tuple:
    return twisted_betti(assemble_twisted(K, None, "rational"))


def boundary_matrix(K: SimplicialComplex, k: int) -> SparseMatrix:
    """Untwisted boundary d_k: C_k -> C_{k-1} with entry (-1)^i for face i.

    ``k`` may run from 1 to ``dim K + 1``; the last one has no columns.
    """
    if not 1 <= k <= K.dimension + 1:
        raise ComplexError(f"boundary degree {k} out of range 1..{K.dimension + 1}")
    rows = [dict() for _ in K.simplices(k - 1)]
    for j, s in enumerate(K.simplices(k)):
        for i, face in enumerate(faces(s)):
            rows[K.index(face)][j] = Fraction((-1) ** i)
    return SparseMatrix((K.count(k - 1), K.count(k)), tuple(rows))


def _vertex_scale(tc: TwistedComplex, f=None, g=None) -> tuple:
    K = tc.complex
    if (f is None) == (g is None):
        raise TypeError("pass exactly one of f (additive) or g (multiplicative)")
    if f is not None:
        vals = f.values if isinstance(f, Cochain) else tuple(f)
        if len(vals) != K.vertex_count:
            raise ComplexError("gauge function needs one value per vertex")
        if tc.backend == "rational":
            if any(v != 0 for v in vals):
                raise AssemblyError("rational backend needs a multiplicative gauge g = exp(f) with exact values")
            return (Fraction(1),) * K.vertex_count
        return tuple(math.exp(float(v)) for v in vals)
    vals = g.values if isinstance(g, Cochain) else tuple(g)
    if len(vals) != K.vertex_count:
        raise ComplexError("gauge function needs one value per vertex")
    if any(not v > 0 for v in vals):
        raise ComplexError("multiplicative gauge must be positive")
    if tc.backend == "rational":
        return tuple(_exact_weight(v) for v in vals)
    return tuple(float(v) for v in vals)


def gauge_transform(tc: TwistedComplex, f=None, *, g=None):
    """Replace theta by theta + df.

    ``f`` is an additive 0-cochain (float backend) and ``g = exp(f)`` its
    multiplicative form (either backend).  Returns ``(new_tc, diagonals)``
    where ``diagonals[k][j] = g(base vertex of the j-th k-simplex)`` and
    ``new D_k = diag_{k+1}^{-1} D_k diag_k``.
    """
    K = tc.complex
    scale = _vertex_scale(tc, f, g)
    weights = tuple(w * scale[v] / scale[u] for (u, v), w in zip(K.edges, tc.weights))
    new = TwistedComplex(
        K,
        weights,
        tuple(twisted_coboundary(K, weights, k, Fraction(1) if tc.backend == "rational" else 1.0)
              for k in range(K.dimension)),
        tc.backend,
    )
    diagonals = tuple(tuple(scale[s[0]] for s in K.simplices(k)) for k in range(K.dimension + 1))
    return new, diagonals


def conjugate(D: SparseMatrix, left: tuple, right: tuple) -> SparseMatrix:
    """diag(left)^-1 @ D @ diag(right)."""
    rows = tuple({j: v * right[j] / left[i] for j, v in r.items()} for i, r in enumerate(D.rows))
    return SparseMatrix(D.shape, rows)


__all__ = [
    "AssemblyError", "TwistedComplex", "RankResult", "assemble_twisted", "betti_report",
    "boundary_matrix", "conjugate", "gauge_transform", "twisted_betti", "twisted_coboundary",
    "untwisted_betti",
]
