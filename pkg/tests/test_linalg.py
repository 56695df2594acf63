import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mnlck import _rank_py, linalg
from mnlck.library import tetra
from mnlck.linalg import RankError, SparseMatrix, float_rank, integer_rank, nullspace_exact, rank
from mnlck.twisted import boundary_matrix

int_matrices = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 7).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def rref_rank(a):
    """Oracle: rank = columns minus nullity from the Fraction RREF."""
    return len(a[0]) - len(nullspace_exact(a))


@given(int_matrices)
@settings(max_examples=150, deadline=None)
def test_kernels_agree_with_rref(a):
    m = SparseMatrix.from_dense(a)
    rows = linalg._integer_rows(m)
    expect = rref_rank(a)
    assert _rank_py.integer_rank(rows, len(a[0])) == expect
    assert rank(m).rank == expect
    if linalg._ext is not None and rows:
        dense = np.array(a, dtype=np.int64)
        assert linalg._ext.integer_rank_dense(dense) == expect


@given(int_matrices)
@settings(max_examples=50, deadline=None)
def test_float_rank_agrees_on_small_integers(a):
    assert rank(a, "float").rank == rref_rank(a)


def test_rank_examples():
    assert rank(np.zeros((3, 4), dtype=int)).rank == 0
    assert rank(SparseMatrix.identity(5)).rank == 5
    assert rank(boundary_matrix(tetra(), 2)).rank == 3


def test_rational_entries():
    m = SparseMatrix.from_dense([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]])
    assert rank(m).rank == 1


def test_rational_rejects_floats():
    with pytest.raises(RankError):
        rank(SparseMatrix.from_dense([[0.5, 1.0]]))
    with pytest.raises(RankError):
        rank([[1]], "nope")


def test_overflow_falls_back_to_bigints():
    big = 2**61 + 1
    a = [[big, big - 2, 3], [big - 4, big + 6, 5], [7, 11, big]]
    expect = rref_rank(a)
    assert integer_rank(linalg._integer_rows(SparseMatrix.from_dense(a)), 3) == expect
    huge = [[2**70, 1], [1, 2**70]]
    assert rank(huge).rank == 2
    if linalg._ext is not None:
        with pytest.raises(OverflowError):
            linalg._ext.integer_rank_dense(np.array(a, dtype=np.int64))


def test_float_rank_confidence():
    s = np.array([1.0, 1e-9 * 1.5, 1e-9 * 0.9])
    r = float_rank(s)
    assert r.rank == 1 and r.confident
    weak = float_rank(np.array([1.0, 2e-8, 5e-9]))
    assert weak.rank == 2 and not weak.confident
    assert float_rank(np.zeros(0)).rank == 0


def test_nullspace_exact():
    basis = nullspace_exact([[1, 1, 0], [0, 1, 1]])
    assert basis == [[Fraction(1), Fraction(-1), Fraction(1)]]


def test_sparse_matmul_and_toarray():
    a = SparseMatrix.from_dense([[1, 2], [0, 3]])
    b = SparseMatrix.identity(2)
    assert (a @ b).rows == a.rows
    assert np.array_equal(a.toarray(), np.array([[1.0, 2.0], [0.0, 3.0]]))
    with pytest.raises(RankError):
        a @ SparseMatrix.identity(3)


def test_pure_python_fallback_forced_by_env():
    code = (
        "from mnlck import linalg; from mnlck.mapping_torus import vanishing_check; "
        "from mnlck.library import torus9; "
        "print(linalg.KERNEL, vanishing_check(torus9(), None, '2')['betti'])"
    )
    env = dict(os.environ, MNLCK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "python"
    assert "[0, 0, 0, 0]" in out.stdout


def test_compiled_kernel_selected_when_built():
    if linalg._ext is None:
        pytest.skip("compiled kernel not built")
    assert linalg.KERNEL == "cython"
