import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mnlck.acceptance import random_character, random_subcomplex
from mnlck.complex import Character, Cochain, LeeCocycle, coboundary, holonomy
from mnlck.library import circle, named, tetra, torus9
from mnlck.linalg import rank
from mnlck.twisted import (
    AssemblyError, assemble_twisted, betti_report, boundary_matrix, conjugate, gauge_transform,
    twisted_betti, twisted_coboundary, untwisted_betti,
)


def loop_character(K, edge, t):
    return Character(K, tuple(Fraction(t) if e == edge else Fraction(1) for e in K.edges))


def test_trivial_weights_give_untwisted_coboundary():
    K = circle(3)
    D = assemble_twisted(K).matrices[0].toarray(object)
    # rows (0,1), (0,2), (1,2); (df)(uv) = f(v) - f(u)
    assert D.tolist() == [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]]


@pytest.mark.parametrize("t, r", [(1, 2), (2, 3), (Fraction(1, 2), 3)])
def test_circle_coboundary_rank(t, r):
    tc = assemble_twisted(circle(3), loop_character(circle(3), (0, 1), t))
    assert tc.matrices[0].shape == (3, 3)
    assert tc.ranks[0].rank == r


@pytest.mark.parametrize("n", [3, 4, 12])
def test_circle_betti_depends_only_on_holonomy(n):
    K = circle(n)
    for edge in (K.edges[0], K.edges[-1]):
        assert twisted_betti(assemble_twisted(K, loop_character(K, edge, 1))) == (1, 1)
        assert twisted_betti(assemble_twisted(K, loop_character(K, edge, 2))) == (0, 0)


def test_torus_betti():
    K = torus9()
    assert untwisted_betti(K) == (1, 2, 1)
    # holonomy 2 along the i-direction, 1 along j: weight 2 on edges that wrap i from row 2 to row 0
    w = []
    for u, v in K.edges:
        ru, rv = u // 3, v // 3
        w.append(Fraction(1, 2) if {ru, rv} == {0, 2} else Fraction(1))
    chi = Character(K, tuple(w))
    assert holonomy(K, chi, [0, 3, 6, 0]) == 2
    assert holonomy(K, chi, [0, 1, 2, 0]) == 1
    assert twisted_betti(assemble_twisted(K, chi)) == (0, 0, 0)


def test_other_untwisted_betti():
    assert untwisted_betti(tetra()) == (1, 0, 1)
    assert untwisted_betti(named("rp2_6")) == (1, 0, 0)
    assert untwisted_betti(named("point")) == (1,)


def test_exact_theta_is_conjugate_to_untwisted():
    K = tetra()
    f = Cochain(K, 0, (0.3, -0.2, 1.1, 0.7))
    tc = assemble_twisted(K, LeeCocycle.exact(f), "float")
    base = assemble_twisted(K, None, "float")
    g = [math.exp(v) for v in f.values]
    for k, D in enumerate(base.matrices):
        left = [g[s[0]] for s in K.simplices(k + 1)]
        right = [g[s[0]] for s in K.simplices(k)]
        # D_theta = diag(g on (k+1)-simplices)^-1 D diag(g on k-simplices), g = exp(f) at base vertices
        lhs = tc.matrices[k].toarray()
        rhs = conjugate(D, left, right).toarray()
        assert np.allclose(lhs, rhs, atol=1e-12)
    assert twisted_betti(tc) == (1, 0, 1)


def test_gauge_transform_identity_and_audit():
    K = torus9()
    tc = assemble_twisted(K)
    same, diag = gauge_transform(tc, g=[Fraction(1)] * 9)
    assert same == tc
    assert all(all(x == 1 for x in d) for d in diag)
    tf = assemble_twisted(K, None, "float")
    same_f, _ = gauge_transform(tf, f=[0.0] * 9)
    assert same_f == tf


def test_gauge_invariance_circle_random_f():
    rng = np.random.default_rng(4)
    K = circle(3)
    tc = assemble_twisted(K, loop_character(K, (0, 1), 2), "float")
    for _ in range(20):
        new, diag = gauge_transform(tc, f=rng.normal(size=3))
        assert twisted_betti(new) == (0, 0)
        D = conjugate(tc.matrices[0], diag[1], diag[0]).toarray()
        assert np.allclose(D, new.matrices[0].toarray(), atol=1e-12)


def test_gauge_of_trivial_is_untwisted_torus():
    new, _ = gauge_transform(assemble_twisted(torus9()), g=[Fraction(v + 1, 3) for v in range(9)])
    assert twisted_betti(new) == (1, 2, 1)


def test_gauge_input_errors():
    tc = assemble_twisted(circle(3))
    with pytest.raises(TypeError):
        gauge_transform(tc)
    with pytest.raises(AssemblyError):
        gauge_transform(tc, f=[0.1, 0, 0])
    with pytest.raises(AssemblyError):
        gauge_transform(tc, g=[1.5, 1, 1])


def test_rational_backend_requires_exact_weights():
    K = circle(3)
    with pytest.raises(AssemblyError):
        assemble_twisted(K, Character(K, (2.0, 1.0, 1.0)), "rational")
    with pytest.raises(AssemblyError):
        assemble_twisted(K, LeeCocycle(Cochain(K, 1, (0.5, 0.5, 0.0))), "rational")
    with pytest.raises(AssemblyError):
        assemble_twisted(K, None, "complex")


def test_backend_agreement_and_confidence():
    rng = np.random.default_rng(11)
    for _ in range(20):
        K = random_subcomplex(rng)
        chi = random_character(K, rng)
        exact = assemble_twisted(K, chi, "rational")
        approx = assemble_twisted(K, Character(K, tuple(float(w) for w in chi.weights)), "float")
        assert twisted_betti(exact) == twisted_betti(approx)
        assert betti_report(approx)["confidence"] == "high"


def test_float_square_residual_small():
    rng = np.random.default_rng(2)
    for _ in range(20):
        K = random_subcomplex(rng)
        f = Cochain(K, 0, tuple(rng.normal(size=K.vertex_count)))
        theta = LeeCocycle.exact(f)
        assert assemble_twisted(K, theta, "float").square_residual() <= 1e-12


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_square_zero_and_euler_identity(seed):
    rng = np.random.default_rng(seed)
    K = random_subcomplex(rng)
    tc = assemble_twisted(K, random_character(K, rng))
    assert tc.square_residual() == 0
    b = twisted_betti(tc)
    assert all(x >= 0 for x in b)
    assert sum((-1) ** k * x for k, x in enumerate(b)) == K.euler_characteristic


def test_random_characters_are_often_nontrivial():
    rng = np.random.default_rng(0)
    differs = 0
    for _ in range(30):
        K = random_subcomplex(rng)
        chi = random_character(K, rng)
        differs += twisted_betti(assemble_twisted(K, chi)) != untwisted_betti(K)
    assert differs > 0


def test_boundary_matrix():
    d1 = boundary_matrix(circle(3), 1).toarray(object)
    assert d1.tolist() == [[-1, -1, 0], [1, 0, -1], [0, 1, 1]]
    assert boundary_matrix(named("point"), 1).shape == (1, 0)
    K = tetra()
    for k in (1, 2):
        prod = boundary_matrix(K, k) @ boundary_matrix(K, k + 1)
        assert prod.max_abs() == 0
    # boundary is the transpose of the untwisted coboundary
    D = twisted_coboundary(K, (Fraction(1),) * 6, 1).toarray(object)
    assert (D.T == boundary_matrix(K, 2).toarray(object)).all()


def test_rank_result_int():
    assert int(rank([[1, 0], [0, 1]])) == 2


def test_coboundary_matches_twisted_with_unit_weights():
    K = torus9()
    f = Cochain(K, 1, tuple(Fraction(i % 5) for i in range(27)))
    D = assemble_twisted(K).matrices[1]
    direct = coboundary(f).values
    via_matrix = tuple(sum((v * f.values[j] for j, v in row.items()), Fraction(0)) for row in D.rows)
    assert direct == via_matrix
