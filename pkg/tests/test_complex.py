from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from mnlck.complex import (
    Character, Cochain, ComplexError, LeeCocycle, NotClosedError, build_complex, coboundary, faces,
    holonomy, validate_cocycle,
)
from mnlck.io import (
    InputError, cochain_from_json, cochain_to_json, complex_from_json, complex_to_json, format_scalar,
    load_complex, parse_scalar,
)
from mnlck.library import LIBRARY, automorphisms, circle, is_automorphism, named, rotation, tetra, torus9


simplex_lists = st.lists(
    st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), min_size=0, max_size=12
)


@given(simplex_lists)
@settings(max_examples=100, deadline=None)
def test_face_closure(tops):
    K = build_complex(7, tops)
    for k in range(1, K.dimension + 1):
        for s in K.simplices(k):
            assert list(s) == sorted(s)
            for f in faces(s):
                assert f in K
    for k in range(K.dimension + 1):
        assert len(set(K.simplices(k))) == K.count(k)
        assert list(K.simplices(k)) == sorted(K.simplices(k))
    assert K.count(0) == 7


@given(simplex_lists)
@settings(max_examples=50, deadline=None)
def test_json_round_trip(tops):
    K = build_complex(7, tops)
    assert complex_from_json(complex_to_json(K)) == K


def test_f_vectors_and_euler():
    assert circle(3).f_vector == (3, 3)
    assert tetra().f_vector == (4, 6, 4)
    assert tetra().euler_characteristic == 2
    assert torus9().f_vector == (9, 27, 18)
    assert torus9().euler_characteristic == 0
    assert named("rp2_6").f_vector == (6, 15, 10)
    assert named("rp2_6").euler_characteristic == 1
    assert named("point").f_vector == (1,)


def test_faces_order():
    assert faces((0, 1, 2)) == [(1, 2), (0, 2), (0, 1)]


@pytest.mark.parametrize("tops, n", [([(0, 0)], 3), ([(0, 5)], 3), ([(0, 1)], 0)])
def test_build_rejects_bad_input(tops, n):
    with pytest.raises(ComplexError):
        build_complex(n, tops)


def test_index_and_contains():
    K = tetra()
    assert (0, 1, 2) in K and (0, 1, 2, 3) not in K
    assert K.index((1, 2)) == K.edges.index((1, 2))
    with pytest.raises(ComplexError):
        K.index((0, 9))


def test_top_simplices():
    K = build_complex(4, [(0, 1, 2), (2, 3)])
    assert K.top_simplices() == [(2, 3), (0, 1, 2)]


def test_cochain_domain_is_strict():
    K = circle(3)
    with pytest.raises(ComplexError):
        Cochain.from_mapping(K, 1, {(0, 1): 1, (1, 2): 1})
    with pytest.raises(ComplexError):
        Cochain.from_mapping(K, 1, {(0, 1): 1, (1, 2): 1, (0, 2): 1, (0, 3): 1})


def test_coboundary_squares_to_zero():
    K = tetra()
    f = Cochain(K, 0, tuple(Fraction(v * v) for v in range(4)))
    assert all(v == 0 for v in coboundary(coboundary(f)).values)


def test_validate_cocycle_additive_and_multiplicative():
    K = build_complex(3, [(0, 1, 2)])
    good = Cochain.from_mapping(K, 1, {(0, 1): 1, (1, 2): 2, (0, 2): 3})
    bad = Cochain.from_mapping(K, 1, {(0, 1): 1, (1, 2): 2, (0, 2): 4})
    assert validate_cocycle(K, good) == []
    [(tri, res)] = validate_cocycle(K, bad)
    assert tri == (0, 1, 2) and res == -1
    with pytest.raises(NotClosedError):
        LeeCocycle(bad)
    with pytest.raises(NotClosedError):
        Character.from_mapping(K, {(0, 1): Fraction(2), (1, 2): Fraction(3), (0, 2): Fraction(5)})
    chi = Character.from_mapping(K, {(0, 1): Fraction(2), (1, 2): Fraction(3), (0, 2): Fraction(6)})
    assert validate_cocycle(K, chi) == []


def test_character_weights_positive():
    with pytest.raises(ComplexError):
        Character(circle(3), (Fraction(1), Fraction(-1), Fraction(1)))


def test_holonomy_exact_and_orientation():
    K = circle(4)
    w = tuple(Fraction(3) if e == (0, 3) else Fraction(1) for e in K.edges)
    chi = Character(K, w)
    # 0 -> 1 -> 2 -> 3 -> 0 walks (0,3) backwards
    assert holonomy(K, chi, [0, 1, 2, 3, 0]) == Fraction(1, 3)
    assert holonomy(K, chi, [0, 3, 2, 1, 0]) == Fraction(3)
    with pytest.raises(ComplexError):
        holonomy(K, chi, [0, 1, 2])
    with pytest.raises(ComplexError):
        holonomy(K, chi, [0, 2, 0])


def test_holonomy_additive_matches_multiplicative():
    K = circle(3)
    theta = LeeCocycle(Cochain(K, 1, (0.5, 0.0, 0.25)))
    assert holonomy(K, theta, [0, 1, 2, 0]) == pytest.approx(holonomy(K, theta.character(), [0, 1, 2, 0]))


def test_exact_lee_cocycle_has_trivial_holonomy():
    K = torus9()
    theta = LeeCocycle.exact(Cochain(K, 0, tuple(0.1 * v for v in range(9))))
    assert holonomy(K, theta, [0, 1, 2, 0]) == pytest.approx(1.0)


def test_library_automorphisms():
    for name in LIBRARY:
        K = named(name)
        rot = rotation(name)
        if rot is not None:
            assert is_automorphism(K, rot)
            assert tuple(rot) != tuple(range(K.vertex_count))
    assert rotation("point") is None
    assert len(automorphisms(tetra())) == 24
    assert not is_automorphism(circle(4), (1, 0, 2, 3))


def test_scalar_parsing():
    assert parse_scalar("2/3") == Fraction(2, 3)
    assert parse_scalar(4) == Fraction(4)
    assert parse_scalar(0.5) == 0.5
    assert format_scalar(Fraction(2)) == "2/1"
    for bad in (True, "x/2", "1/0", None):
        with pytest.raises(InputError):
            parse_scalar(bad)


def test_cochain_json():
    K = circle(3)
    data = {"degree": 1, "values": {"0,1": "2/1", "1,2": "1/1", "0,2": 1}}
    c = cochain_from_json(K, data)
    assert c.values == (Fraction(2), Fraction(1), Fraction(1))
    assert cochain_from_json(K, cochain_to_json(c)) == c
    with pytest.raises(InputError):
        cochain_from_json(K, {"degree": 1, "values": {"1,0": 1, "1,2": 1, "0,2": 1}})
    with pytest.raises(InputError):
        cochain_from_json(K, {"degree": 1, "values": {"0,1": 1}})
    with pytest.raises(InputError):
        cochain_from_json(K, {"degree": 0, "values": {"0": 1, "1": 1, "2": 1}}, degree=1)


def test_load_complex_by_name_and_file(tmp_path):
    assert load_complex("torus9") == torus9()
    assert load_complex("circle3.json") == circle(3)
    p = tmp_path / "k.json"
    p.write_text('{"vertices": 3, "simplices": [[0, 1, 2]]}')
    assert load_complex(str(p)).f_vector == (3, 3, 1)
    p.write_text('{"vertices": 3, "simplices": [[0, 1, 2]')
    with pytest.raises(InputError):
        load_complex(str(p))
    with pytest.raises(InputError):
        load_complex("nonexistent")
    with pytest.raises(InputError):
        complex_from_json({"vertices": 2, "simplices": [[0, 5]]})


def test_full_skeleton_counts():
    K = build_complex(7, combinations(range(7), 4))
    assert K.f_vector == (7, 21, 35, 35)
