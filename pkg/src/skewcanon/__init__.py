"""Canonical forms of skewadjoint operators on pseudo-Euclidean spaces.

Given a nondegenerate symmetric form G and an operator J with
J^T G + G J = 0, :func:`canonicalize` returns the canonical block list and
a change of basis P with P^-1 J P = C and P^T G P = G_c.
"""

from .blocks import (BasisChange, CanonicalForm, ComplexQuad, ImaginaryChain, NilpotentEven,
                     NilpotentOdd, RealChain, block_matrices, canonical_matrices)
from .builders import (build_complex_component, build_imaginary_component,
                       build_nilpotent_component, build_real_component, canonicalize,
                       effective_basis)
from .decomposition import PrimaryComponent, isotropy_check, primary_components
from .errors import (DegenerateForm, DegenerateRestriction, FormatError, InputError, NoSolution,
                     NotInvariant, NotSkewadjoint, NotSkewSpectrum, NotSymmetric,
                     NumericalFailure, SingularMatrix, SkewCanonError, UnsupportedField)
from .linalg import EXACT, FLOAT, Matrix, Polynomial, ScalarContext
from .oracle import (GeneratorSpec, VerificationReport, compare_forms, generate_pair,
                     verify_report)
from .space import SpacePair, Subspace, orthogonal_complement, restrict_pair, validate_pair
from .spectral import (PolyFactorization, factor_minimal_polynomial, factorize,
                       minimal_polynomial)

__all__ = [name for name in dir() if not name.startswith("_")]
