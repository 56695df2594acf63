"""Small named triangulations and their simplicial automorphisms."""

from __future__ import annotations

from itertools import permutations

from .complex import ComplexError, SimplicialComplex, build_complex


def point() -> SimplicialComplex:
    return build_complex(1, [])


def circle(n: int = 3) -> SimplicialComplex:
    """Boundary of an n-gon, n >= 3."""
    if n < 3:
        raise ComplexError("a simplicial circle needs at least 3 vertices")
    return build_complex(n, [(i, (i + 1) % n) for i in range(n)])


def tetra() -> SimplicialComplex:
    """Boundary of the 3-simplex, a 2-sphere."""
    return build_complex(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def torus9() -> SimplicialComplex:
    """3x3 grid on the square torus, every square cut along the same diagonal."""
    tris = []
    for i in range(3):
        for j in range(3):
            a = 3 * i + j
            b = 3 * ((i + 1) % 3) + j
            c = 3 * i + (j + 1) % 3
            d = 3 * ((i + 1) % 3) + (j + 1) % 3
            tris += [(a, b, d), (a, c, d)]
    return build_complex(9, tris)


def rp2_6() -> SimplicialComplex:
    """Six-vertex real projective plane (antipodal quotient of the icosahedron)."""
    tris = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ]
    return build_complex(6, tris)


LIBRARY = {
    "point": point,
    "circle3": lambda: circle(3),
    "circle4": lambda: circle(4),
    "circle12": lambda: circle(12),
    "tetra": tetra,
    "torus9": torus9,
    "rp2_6": rp2_6,
}

# Cohomology-trivial (isotopic to the identity, or acting trivially on
# rational cohomology) finite-order automorphisms, as vertex images.
ROTATIONS = {
    "circle3": (1, 2, 0),
    "circle4": (1, 2, 3, 0),
    "circle12": tuple((i + 1) % 12 for i in range(12)),
    "tetra": (1, 2, 0, 3),
    "torus9": tuple(3 * ((i // 3 + 1) % 3) + i % 3 for i in range(9)),
}


def named(name: str) -> SimplicialComplex:
    try:
        return LIBRARY[name]()
    except KeyError:
        raise ComplexError(f"unknown built-in complex {name!r}; choose from {sorted(LIBRARY)}") from None


def is_automorphism(K: SimplicialComplex, perm) -> bool:
    perm = tuple(perm)
    if sorted(perm) != list(range(K.vertex_count)):
        return False
    for level in K.simplices_by_dim[1:]:
        image = {tuple(sorted(perm[v] for v in s)) for s in level}
        if image != set(level):
            return False
    return True


def automorphisms(K: SimplicialComplex, limit: int | None = None) -> list:
    """All vertex permutations that are simplicial automorphisms (brute force, small K only)."""
    if K.vertex_count > 9:
        raise ComplexError("brute-force automorphism search is limited to 9 vertices")
    out = []
    for p in permutations(range(K.vertex_count)):
        if is_automorphism(K, p):
            out.append(p)
            if limit is not None and len(out) >= limit:
                break
    return out


def rotation(name: str):
    """A nontrivial automorphism of a named complex, or ``None`` for the point."""
    if name in ROTATIONS:
        return ROTATIONS[name]
    K = named(name)
    ident = tuple(range(K.vertex_count))
    for p in automorphisms(K):
        if p != ident:
            return p
    return None
