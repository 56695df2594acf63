"""Mapping tori W x_phi S^1 and the vanishing of their twisted cohomology.

Vertex ``(w, layer)`` of the suspension gets index ``layer * |W| + w``.  Each
layer is the prism W x [0, 1] cut into staircase simplices; the top of the
last layer is glued to layer 0 through phi.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .complex import Character, Cochain, ComplexError, LeeCocycle, SimplicialComplex, build_complex, holonomy
from .library import is_automorphism
from .twisted import assemble_twisted, twisted_betti, untwisted_betti


@dataclass(frozen=True)
class SuspensionComplex:
    complex: SimplicialComplex
    fiber: SimplicialComplex
    phi: tuple
    layers: int
    base_loop: tuple
    fiber_inclusion: tuple

    def layer(self, v: int) -> int:
        return v // self.fiber.vertex_count

    def layer_step(self, edge) -> int:
        """+1 if the edge (u < v) climbs one layer, -1 if it wraps from layer 0 to the last, else 0."""
        lu, lv = self.layer(edge[0]), self.layer(edge[1])
        if lu == lv:
            return 0
        if lv == lu + 1:
            return 1
        if lu == 0 and lv == self.layers - 1:
            return -1
        raise ComplexError(f"edge {edge} skips layers")


def _fiber_path(W: SimplicialComplex, start: int, goal: int) -> list:
    prev = {start: None}
    queue = deque([start])
    adj = W.neighbours()
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for v in sorted(adj[u]):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if goal not in prev:
        raise ComplexError("fiber is disconnected; no closed base loop through vertex 0")
    path = [goal]
    while path[-1] != start:
        path.append(prev[path[-1]])
    return path[::-1]


def mapping_torus(W: SimplicialComplex, phi=None, layers: int = 3) -> SuspensionComplex:
    """Triangulate the mapping torus of a simplicial automorphism ``phi`` of ``W``."""
    m = W.vertex_count
    phi = tuple(range(m)) if phi is None else tuple(int(x) for x in phi)
    if layers < 3:
        raise ComplexError("need at least 3 layers to keep the suspension simplicial")
    if not is_automorphism(W, phi):
        raise ComplexError(f"{phi} is not a simplicial automorphism of the fiber")
    tops = W.top_simplices()
    simplices = []
    for layer in range(layers):
        def bottom(w, layer=layer):
            return layer * m + w

        if layer < layers - 1:
            def top(w, layer=layer):
                return (layer + 1) * m + w
        else:
            def top(w):
                return phi[w]

        for s in tops:
            for i in range(len(s)):
                simplices.append(tuple(bottom(w) for w in s[: i + 1]) + tuple(top(w) for w in s[i:]))
    K = build_complex(m * layers, simplices)
    w0 = 0
    loop = [layer * m + w0 for layer in range(layers)] + _fiber_path(W, phi[w0], w0)
    return SuspensionComplex(K, W, phi, layers, tuple(loop), tuple(range(m)))


def _parse_t(t):
    if isinstance(t, str):
        t = Fraction(t)
    if not t > 0:
        raise ComplexError(f"base weight must be positive, got {t}")
    return t


def base_character(M: SuspensionComplex, t, backend: str = "rational"):
    """Pull back a character of the base circle with holonomy ``t``.

    Rational backend: a ``Character`` with weight ``t`` on every edge that
    wraps from the last layer to layer 0 (stored as ``1/t`` in the ascending
    orientation) and 1 elsewhere.  Float backend: a ``LeeCocycle`` spreading
    ``log t`` evenly, ``log t / layers`` per layer step.
    """
    t = _parse_t(t)
    K = M.complex
    if backend == "rational":
        t = Fraction(t)
        w = tuple({0: Fraction(1), 1: Fraction(1), -1: 1 / t}[M.layer_step(e)] for e in K.edges)
        return Character(K, w)
    step = math.log(float(t)) / M.layers
    return LeeCocycle(Cochain(K, 1, tuple(step * M.layer_step(e) for e in K.edges)))


def fiber_loops(M: SuspensionComplex) -> list:
    """Fundamental cycles of the layer-0 copy of the fiber (BFS spanning tree)."""
    W = M.fiber
    adj = W.neighbours()
    parent = {}
    loops = []
    for root in range(W.vertex_count):
        if root in parent:
            continue
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v not in parent:
                    parent[v] = u
                    queue.append(v)

    def to_root(v):
        path = [v]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path

    for u, v in W.edges:
        if parent.get(v) == u or parent.get(u) == v:
            continue
        pu, pv = to_root(u), to_root(v)
        on_pv = set(pv)
        common = next(x for x in pu if x in on_pv)
        a = pu[: pu.index(common) + 1]
        b = pv[: pv.index(common) + 1]
        loops.append(tuple([u] + b + a[:-1][::-1]))
    return loops


def vanishing_check(W: SimplicialComplex, phi=None, t="2", layers: int = 3) -> dict:
    """Twisted Betti numbers of the suspension for base holonomy ``t`` (exact)."""
    t = _parse_t(t)
    M = mapping_torus(W, phi, layers)
    chi = base_character(M, t, "rational")
    betti = twisted_betti(assemble_twisted(M.complex, chi, "rational"))
    fib = [holonomy(M.complex, chi, loop) for loop in fiber_loops(M)]
    return {
        "f_vector": list(M.complex.f_vector),
        "t": str(Fraction(t)),
        "base_holonomy": str(holonomy(M.complex, chi, M.base_loop)),
        "fiber_holonomies": sorted({str(h) for h in fib}),
        "betti": list(betti),
        "euler": M.complex.euler_characteristic,
        "pass": all(b == 0 for b in betti),
    }


def kunneth_with_circle(W: SimplicialComplex) -> tuple:
    """Betti numbers of W x S^1 from the untwisted Betti numbers of W."""
    b = list(untwisted_betti(W)) + [0]
    return tuple(b[k] + (b[k - 1] if k else 0) for k in range(len(b)))
