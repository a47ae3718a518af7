from fractions import Fraction as F

import numpy as np
import pytest

from skewcanon.blocks import (CanonicalForm, ComplexQuad, ImaginaryChain, NilpotentEven, NilpotentOdd,
                              RealChain)
from skewcanon.errors import NotSkewSpectrum, NumericalFailure, UnsupportedField
from skewcanon.linalg import FLOAT, Matrix, Polynomial
from skewcanon.oracle import GeneratorSpec, canonical_pair, generate_pair
from skewcanon.space import SpacePair, validate_pair
from skewcanon.spectral import (PolyFactorization, factor_minimal_polynomial, factorize,
                                minimal_polynomial)


def test_minpoly_rotation():
    p = validate_pair(Matrix.identity(2), Matrix([[0, 2], [-2, 0]]))
    assert minimal_polynomial(p) == Polynomial([4, 0, 1])


def test_minpoly_hyperbolic():
    G = Matrix([[0, 1], [1, 0]])
    p = validate_pair(G, Matrix.diag([3, -3]))
    assert minimal_polynomial(p) == Polynomial([-9, 0, 1])


def test_minpoly_two_nilpotent_chains():
    p = canonical_pair(CanonicalForm([NilpotentEven(2)]))
    assert minimal_polynomial(p) == Polynomial([0, 0, 1])


def test_factor_examples():
    f = factor_minimal_polynomial(Polynomial([4, 0, 1]))
    assert f == PolyFactorization(imaginary_factors=((F(2), 1),))
    f = factor_minimal_polynomial(Polynomial([-9, 0, 1]))
    assert f == PolyFactorization(real_factors=((F(3), 1),))
    f = factor_minimal_polynomial(Polynomial([25, 0, 6, 0, 1]))
    assert f == PolyFactorization(complex_factors=((F(1), F(2), 1),))
    assert factor_minimal_polynomial(Polynomial([0, 0, 0, 1])).nilpotent_exponent == 3


def test_factorization_reconstructs_polynomial():
    p = Polynomial.from_roots([F(1, 2), F(-1, 2), F(1, 2), F(-1, 2), 0])
    p = p * Polynomial([F(9, 4), 0, 1]) ** 2
    f = factor_minimal_polynomial(p)
    assert f.polynomial() == p
    assert f.real_factors == ((F(1, 2), 2),)
    assert f.imaginary_factors == ((F(3, 2), 2),)
    assert f.nilpotent_exponent == 1


def test_irrational_roots_are_unsupported():
    with pytest.raises(UnsupportedField):
        factor_minimal_polynomial(Polynomial([2, 0, 1]))


def test_unpaired_roots_are_rejected():
    with pytest.raises(NotSkewSpectrum):
        factor_minimal_polynomial(Polynomial.from_roots([1, 2, -1, -1]))


def test_float_factorization_of_canonical_blocks():
    form = CanonicalForm([ComplexQuad(1, 2, 1), ImaginaryChain(F(1, 2), 2, -1), RealChain(3, 1),
                          NilpotentOdd(3, 1)])
    p = canonical_pair(form, FLOAT)
    f = factorize(p)
    (a, b, k), = f.complex_factors
    assert (round(a, 9), round(b, 9), k) == (1, 2, 1)
    (lam, l), = f.imaginary_factors
    assert (round(lam, 9), l) == (0.5, 2)
    (mu, m), = f.real_factors
    assert (round(mu, 9), m) == (3, 1)
    assert f.nilpotent_exponent == 3


def test_float_factorization_of_companion_matrix():
    f = factor_minimal_polynomial(Polynomial([25.0, 0.0, 6.0, 0.0, 1.0]), FLOAT)
    (a, b, k), = f.complex_factors
    assert abs(a - 1) < 1e-9 and abs(b - 2) < 1e-9 and k == 1


def test_float_rejects_unpaired_spectrum():
    # eigenvalues 1 and 2 have no -1, -2 partners
    J = Matrix.diag([1.0, 2.0])
    pair = SpacePair(2, Matrix.identity(2, FLOAT), J, FLOAT)
    with pytest.raises(NumericalFailure):
        factorize(pair)


def test_float_defective_root_spread_is_merged():
    spec = GeneratorSpec([NilpotentOdd(5, 1)], "random_invertible", seed=0, mode="float")
    pair, _ = generate_pair(spec)
    spread = np.abs(np.linalg.eigvals(pair.op.to_numpy())).max()
    assert spread > 1e-8      # far outside the default cluster radius
    assert factorize(pair).nilpotent_exponent == 5


def test_split_double_root_is_not_a_complex_quad():
    spec = GeneratorSpec([RealChain(1.327, 2), RealChain(1.464, 1), NilpotentOdd(1, -1)],
                         "random_invertible", seed=0, mode="float")
    pair, _ = generate_pair(spec)
    f = factorize(pair)
    assert f.complex_factors == ()
    assert sorted(m for _, m in f.real_factors) == [1, 2]
