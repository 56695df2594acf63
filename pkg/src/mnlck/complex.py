"""Finite simplicial complexes, cochains and rank-1 real-positive characters.

Simplices are stored as strictly increasing vertex tuples; that ascending
order is the orientation used for every sign in the package.  Within each
dimension simplices are kept in lexicographic order, so every matrix built
from a complex is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[Fraction, float, int]
Simplex = tuple


class ComplexError(ValueError):
    """Malformed simplicial input (bad vertex, repeated vertex, wrong complex)."""


class NotClosedError(ValueError):
    """A 1-cochain fails the cocycle condition on some triangles."""

    def __init__(self, violations):
        self.violations = violations
        shown = ", ".join(f"{s}: {r}" for s, r in violations[:5])
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"cochain is not closed on {len(violations)} triangle(s): {shown}{more}")


@dataclass(frozen=True)
class SimplicialComplex:
    vertex_count: int
    simplices_by_dim: tuple
    _index: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        index = tuple({s: i for i, s in enumerate(level)} for level in self.simplices_by_dim)
        object.__setattr__(self, "_index", index)

    @property
    def dimension(self) -> int:
        return len(self.simplices_by_dim) - 1

    def simplices(self, k: int) -> tuple:
        if 0 <= k < len(self.simplices_by_dim):
            return self.simplices_by_dim[k]
        return ()

    def count(self, k: int) -> int:
        return len(self.simplices(k))

    @property
    def f_vector(self) -> tuple:
        return tuple(len(level) for level in self.simplices_by_dim)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    @property
    def edges(self) -> tuple:
        return self.simplices(1)

    def index(self, simplex: Sequence[int]) -> int:
        s = tuple(simplex)
        try:
            return self._index[len(s) - 1][s]
        except (IndexError, KeyError):
            raise ComplexError(f"{s} is not a simplex of this complex") from None

    def __contains__(self, simplex) -> bool:
        s = tuple(simplex)
        return 0 < len(s) <= len(self._index) and s in self._index[len(s) - 1]

    def top_simplices(self) -> list:
        """Maximal simplices, ordered by dimension then lexicographically."""
        covered = set()
        for level in self.simplices_by_dim[1:]:
            for s in level:
                covered.update(faces(s))
        return [s for level in self.simplices_by_dim for s in level if s not in covered]

    def neighbours(self) -> dict:
        adj = {v: [] for v in range(self.vertex_count)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def faces(simplex: Sequence[int]) -> list:
    """Codimension-one faces; face ``i`` omits the ``i``-th vertex."""
    s = tuple(simplex)
    return [s[:i] + s[i + 1:] for i in range(len(s))]


def build_complex(vertex_count: int, top_simplices: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Close a list of simplices under taking faces.

    Every vertex ``0 .. vertex_count-1`` is included as a 0-simplex even if
    no listed simplex uses it.
    """
    if int(vertex_count) != vertex_count or vertex_count < 1:
        raise ComplexError(f"vertex_count must be a positive integer, got {vertex_count!r}")
    levels: list = [set((v,) for v in range(vertex_count))]
    for raw in top_simplices:
        s = tuple(int(v) for v in raw)
        if not s:
            continue
        if len(set(s)) != len(s):
            raise ComplexError(f"repeated vertex in simplex {tuple(raw)}")
        bad = [v for v in s if not 0 <= v < vertex_count]
        if bad:
            raise ComplexError(f"vertex {bad[0]} out of range in simplex {tuple(raw)}")
        s = tuple(sorted(s))
        while len(levels) < len(s):
            levels.append(set())
        for k in range(1, len(s) + 1):
            levels[k - 1].update(combinations(s, k))
    return SimplicialComplex(vertex_count, tuple(tuple(sorted(level)) for level in levels))


@dataclass(frozen=True)
class Cochain:
    """A k-cochain: one scalar per k-simplex, aligned with ``complex.simplices(k)``."""

    complex: SimplicialComplex
    degree: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.complex.count(self.degree):
            raise ComplexError(
                f"{self.degree}-cochain needs {self.complex.count(self.degree)} values, got {len(self.values)}"
            )

    @classmethod
    def from_mapping(cls, K: SimplicialComplex, degree: int, values: Mapping) -> "Cochain":
        keys = {tuple(sorted(int(v) for v in key)): val for key, val in values.items()}
        missing = [s for s in K.simplices(degree) if s not in keys]
        extra = [s for s in keys if len(s) != degree + 1 or s not in K]
        if missing or extra:
            raise ComplexError(
                f"cochain domain mismatch: missing {missing[:3]}{'...' if len(missing) > 3 else ''}, "
                f"unknown {extra[:3]}{'...' if len(extra) > 3 else ''}"
            )
        return cls(K, degree, tuple(keys[s] for s in K.simplices(degree)))

    @classmethod
    def zero(cls, K: SimplicialComplex, degree: int, exact: bool = True) -> "Cochain":
        z = Fraction(0) if exact else 0.0
        return cls(K, degree, (z,) * K.count(degree))

    def __getitem__(self, simplex) -> Scalar:
        return self.values[self.complex.index(tuple(sorted(simplex)))]

    def as_dict(self) -> dict:
        return dict(zip(self.complex.simplices(self.degree), self.values))

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.complex != self.complex or other.degree != self.degree:
            raise ComplexError("cochains live on different complexes or degrees")
        return Cochain(self.complex, self.degree, tuple(a + b for a, b in zip(self.values, other.values)))


def coboundary(f: Cochain) -> Cochain:
    """Untwisted coboundary: ``(df)(s) = sum_i (-1)^i f(face_i s)``."""
    K = f.complex
    out = []
    for s in K.simplices(f.degree + 1):
        out.append(sum(((-1) ** i * f.values[K.index(t)] for i, t in enumerate(faces(s))), 0))
    return Cochain(K, f.degree + 1, tuple(out))


def _check_on(K: SimplicialComplex, c) -> None:
    if c.complex != K:
        raise ComplexError("cochain is defined on a different complex")


@dataclass(frozen=True)
class LeeCocycle:
    """A closed real 1-cochain theta; its character has weight exp(theta(e)) on edge e."""

    cochain: Cochain
    tol: float = 1e-9

    def __post_init__(self):
        if self.cochain.degree != 1:
            raise ComplexError("a Lee cocycle is a 1-cochain")
        bad = _additive_violations(self.cochain, self.tol)
        if bad:
            raise NotClosedError(bad)

    @classmethod
    def from_mapping(cls, K, values, tol: float = 1e-9) -> "LeeCocycle":
        return cls(Cochain.from_mapping(K, 1, values), tol)

    @classmethod
    def exact(cls, f: Cochain) -> "LeeCocycle":
        return cls(coboundary(f))

    @property
    def complex(self) -> SimplicialComplex:
        return self.cochain.complex

    @property
    def values(self) -> tuple:
        return self.cochain.values

    def character(self) -> "Character":
        return Character(self.complex, tuple(math.exp(float(v)) for v in self.values))


@dataclass(frozen=True)
class Character:
    """Positive edge weights t(e) satisfying t(v0v1) t(v1v2) = t(v0v2) on every triangle.

    Weights are exact (``Fraction``) or floats.  This is the multiplicative
    form of a Lee cocycle and is what the exact backend consumes.
    """

    complex: SimplicialComplex
    weights: tuple
    tol: float = 1e-9

    def __post_init__(self):
        if len(self.weights) != self.complex.count(1):
            raise ComplexError(f"need {self.complex.count(1)} edge weights, got {len(self.weights)}")
        neg = [(e, w) for e, w in zip(self.complex.edges, self.weights) if not w > 0]
        if neg:
            raise ComplexError(f"edge weights must be positive; {neg[0][0]} has weight {neg[0][1]}")
        bad = _multiplicative_violations(self.complex, self.weights, self.tol)
        if bad:
            raise NotClosedError(bad)

    @classmethod
    def trivial(cls, K: SimplicialComplex) -> "Character":
        return cls(K, (Fraction(1),) * K.count(1))

    @classmethod
    def from_mapping(cls, K, values, tol: float = 1e-9) -> "Character":
        return cls(K, Cochain.from_mapping(K, 1, values).values, tol)

    @property
    def exact(self) -> bool:
        return all(isinstance(w, (Fraction, int)) for w in self.weights)

    def weight(self, edge) -> Scalar:
        return self.weights[self.complex.index(tuple(sorted(edge)))]

    def lee_cocycle(self) -> LeeCocycle:
        return LeeCocycle(Cochain(self.complex, 1, tuple(math.log(w) for w in self.weights)))

    def as_dict(self) -> dict:
        return dict(zip(self.complex.edges, self.weights))


def _additive_violations(theta: Cochain, tol: float) -> list:
    K = theta.complex
    out = []
    for a, b, c in K.simplices(2):
        r = theta.values[K.index((b, c))] - theta.values[K.index((a, c))] + theta.values[K.index((a, b))]
        if isinstance(r, (Fraction, int)) and not isinstance(r, bool):
            if r != 0:
                out.append(((a, b, c), r))
        elif abs(r) > tol:
            out.append(((a, b, c), r))
    return out


def _multiplicative_violations(K: SimplicialComplex, weights: Sequence, tol: float) -> list:
    out = []
    for a, b, c in K.simplices(2):
        lhs = weights[K.index((a, b))] * weights[K.index((b, c))]
        rhs = weights[K.index((a, c))]
        if isinstance(lhs, (Fraction, int)) and isinstance(rhs, (Fraction, int)):
            if lhs != rhs:
                out.append(((a, b, c), lhs / rhs - 1))
        elif abs(lhs / rhs - 1) > tol:
            out.append(((a, b, c), lhs / rhs - 1))
    return out


def validate_cocycle(K: SimplicialComplex, theta, tol: float = 1e-12) -> list:
    """Triangles where the cocycle condition fails, as ``(triangle, residual)`` pairs.

    ``theta`` may be an additive 1-cochain (or ``LeeCocycle``), for which the
    residual is ``theta(v1v2) - theta(v0v2) + theta(v0v1)``, or a
    ``Character``, for which it is ``t(v0v1) t(v1v2) / t(v0v2) - 1``.  Exact
    scalars are compared exactly; ``tol`` applies to floats only.  An empty
    list means the cochain is closed.
    """
    if isinstance(theta, Character):
        _check_on(K, theta)
        return _multiplicative_violations(K, theta.weights, tol)
    if isinstance(theta, LeeCocycle):
        theta = theta.cochain
    _check_on(K, theta)
    if theta.degree != 1:
        raise ComplexError(f"expected a 1-cochain, got degree {theta.degree}")
    return _additive_violations(theta, tol)


def _loop_edges(K: SimplicialComplex, loop: Sequence[int]):
    path = [int(v) for v in loop]
    if len(path) < 2 or path[0] != path[-1]:
        raise ComplexError("edge loop must start and end at the same vertex")
    for u, v in zip(path, path[1:]):
        e = (u, v) if u < v else (v, u)
        if u == v or e not in K:
            raise ComplexError(f"({u}, {v}) is not an edge of the complex")
        yield e, (1 if u < v else -1)


def holonomy(K: SimplicialComplex, theta, loop: Sequence[int]) -> Scalar:
    """Monodromy of the character around a closed vertex path ``[v0, v1, ..., v0]``.

    For a ``Character`` this is the product of edge weights, inverted on edges
    walked against their orientation (exact when the weights are).  For an
    additive cocycle it is ``exp`` of the signed sum of theta.
    """
    if isinstance(theta, Character):
        _check_on(K, theta)
        h = Fraction(1) if theta.exact else 1.0
        for e, sign in _loop_edges(K, loop):
            w = theta.weights[K.index(e)]
            h = h * w if sign > 0 else h / w
        return h
    if isinstance(theta, LeeCocycle):
        theta = theta.cochain
    _check_on(K, theta)
    total = sum(sign * float(theta.values[K.index(e)]) for e, sign in _loop_edges(K, loop))
    return math.exp(total)
