from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcanon import linalg as la
from skewcanon.errors import DegenerateForm, NoSolution, NotSymmetric, SingularMatrix
from skewcanon.linalg import EXACT, FLOAT, Gaussian, Matrix, Polynomial, ScalarContext

small = st.integers(-4, 4)


def int_matrices(max_n=4, square=False):
    def build(shape):
        r, c = shape
        return st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r).map(
            lambda rows: Matrix([[F(x) for x in row] for row in rows], cols=c))
    dims = st.integers(1, max_n)
    shapes = dims.map(lambda n: (n, n)) if square else st.tuples(dims, dims)
    return shapes.flatmap(build)


# ScalarContext ------------------------------------------------------------

def test_float_context_needs_positive_tolerances():
    with pytest.raises(ValueError):
        ScalarContext("float", 0.0, 1e-8)
    with pytest.raises(ValueError):
        ScalarContext("exact", 1e-12, None)


def test_scalar_coercion():
    assert EXACT.scalar("3/4") == F(3, 4)
    assert EXACT.scalar(2) == F(2)
    assert FLOAT.scalar("1/4") == 0.25


# kernel_basis -------------------------------------------------------------

def test_kernel_of_identity_is_empty():
    assert la.kernel_basis(Matrix.identity(2)) == []


def test_kernel_of_zero_matrix_is_everything():
    assert len(la.kernel_basis(Matrix.zeros(3, 3))) == 3


def test_kernel_rank_one():
    (v,) = la.kernel_basis(Matrix([[1, 2], [2, 4]]))
    assert v == [F(-2), F(1)]


def test_float_kernel_rank_one():
    (v,) = la.kernel_basis(Matrix([[1.0, 2.0], [2.0, 4.0]]), FLOAT)
    v = np.array(v) / v[1]
    assert np.allclose(v, [-2, 1])


@given(int_matrices())
@settings(max_examples=60, deadline=None)
def test_rank_plus_nullity(M):
    K = la.kernel_basis(M)
    assert la.rank(M) + len(K) == M.cols
    for v in K:
        assert all(x == 0 for x in M @ v)
    if K:
        assert la.rank(Matrix.from_columns(K)) == len(K)


@given(int_matrices())
@settings(max_examples=40, deadline=None)
def test_float_rank_agrees_with_exact(M):
    assert la.rank(M.map(float), FLOAT) == la.rank(M)


# solve / invert / determinant ---------------------------------------------

def test_solve_identity():
    assert la.solve(Matrix.identity(2), [3, 4]) == [3, 4]


def test_solve_inconsistent():
    with pytest.raises(NoSolution):
        la.solve(Matrix([[1, 1], [2, 2]]), [1, 3])


def test_solve_diagonal():
    assert la.solve(Matrix([[2, 0], [0, 4]]), [1, 2]) == [F(1, 2), F(1, 2)]


def test_invert_examples():
    assert la.invert(Matrix.identity(4)) == Matrix.identity(4)
    assert la.invert(Matrix.diag([2, -2])) == Matrix.diag([F(1, 2), F(-1, 2)])
    assert la.invert(Matrix([[1, 1], [1, 2]])) == Matrix([[2, -1], [-1, 1]])


def test_invert_singular():
    with pytest.raises(SingularMatrix):
        la.invert(Matrix([[1, 2], [2, 4]]))


@given(int_matrices(square=True))
@settings(max_examples=60, deadline=None)
def test_inverse_roundtrip(M):
    if la.determinant(M) == 0:
        with pytest.raises(SingularMatrix):
            la.invert(M)
        return
    assert M @ la.invert(M) == Matrix.identity(M.rows)


@given(int_matrices(square=True), int_matrices(square=True))
@settings(max_examples=40, deadline=None)
def test_determinant_multiplicative(A, B):
    if A.rows == B.rows:
        assert la.determinant(A @ B) == la.determinant(A) * la.determinant(B)


def test_exact_results_stay_rational_for_int_input():
    assert all(isinstance(x, F) for x in la.kernel_basis(Matrix([[1, 2], [2, 4]]))[0])
    assert isinstance(la.determinant(Matrix([[1, 2], [3, 4]])), F)


# signature ----------------------------------------------------------------

def test_signature_examples():
    assert la.signature(Matrix.diag([1, -1])) == (1, 1)
    assert la.signature(Matrix.identity(3)) == (3, 0)
    assert la.signature(Matrix([[0, 1], [1, 0]])) == (1, 1)


def test_signature_rejects_bad_input():
    with pytest.raises(NotSymmetric):
        la.signature(Matrix([[0, 1], [0, 0]]))
    with pytest.raises(DegenerateForm):
        la.signature(Matrix([[1, 1], [1, 1]]))


@given(st.lists(st.sampled_from([-3, -1, 1, 2]), min_size=1, max_size=5),
       st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_signature_is_congruence_invariant(diag, seed):
    from skewcanon.oracle import unimodular_matrix
    n = len(diag)
    P, _ = unimodular_matrix(n, seed, 3)
    G = P.T @ Matrix.diag(diag) @ P
    expected = (sum(d > 0 for d in diag), sum(d < 0 for d in diag))
    assert la.signature(G) == expected
    assert la.signature(G.map(float), FLOAT) == expected


# polynomials --------------------------------------------------------------

def test_evaluate_identity_polynomial():
    J = Matrix([[1, 2], [3, 4]])
    assert la.evaluate_matrix_polynomial(J, Polynomial([0, 1])) == J


def test_evaluate_rotation_annihilator():
    J = Matrix([[0, 2], [-2, 0]])
    assert la.evaluate_matrix_polynomial(J, Polynomial([4, 0, 1])) == Matrix.zeros(2, 2)


def test_evaluate_shift():
    J = Matrix.diag([3, -3])
    assert la.evaluate_matrix_polynomial(J, Polynomial([-3, 1])) == Matrix.diag([0, -6])


polys = st.lists(small, min_size=1, max_size=4).map(lambda c: Polynomial([F(x) for x in c]))


@given(polys, polys, int_matrices(max_n=3, square=True))
@settings(max_examples=50, deadline=None)
def test_evaluation_is_a_ring_homomorphism(p, q, J):
    ev = lambda f: la.evaluate_matrix_polynomial(J, f)   # noqa: E731
    assert ev(p + q) == ev(p) + ev(q)
    assert ev(p * q) == ev(p) @ ev(q)


@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_polynomial_division(p, q):
    if q.is_zero():
        return
    quo, rem = divmod(p, q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


def test_gcd_and_lcm():
    a = Polynomial.from_roots([1, 2])
    b = Polynomial.from_roots([2, 3])
    assert la.poly_gcd(a, b) == Polynomial.from_roots([2])
    assert la.poly_lcm(a, b) == Polynomial.from_roots([1, 2, 3])


# Gaussian rationals -------------------------------------------------------

def test_gaussian_arithmetic():
    z = Gaussian(1, 2)
    w = Gaussian(F(1, 2), -1)
    assert z * w == Gaussian(F(5, 2), 0)
    assert (z / w) * w == z
    assert z * z.conjugate() == Gaussian(5, 0)
    assert complex(z) == 1 + 2j
