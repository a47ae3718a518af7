"""Dense linear algebra over exact rationals or binary floats.

Every routine takes a :class:`ScalarContext`.  In exact mode entries are
:class:`fractions.Fraction` (or :class:`Gaussian` for complexified vectors)
and all decisions are literal equality tests.  In float mode entries are
Python ``float``/``complex`` and rank decisions go through numpy's SVD.

Matrices are small (desk scale, n <= 16), so the exact kernels are plain
row-reduction loops over lists of lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from operator import mul
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateForm, NoSolution, NotSymmetric, SingularMatrix

Vector = list


@dataclass(frozen=True)
class ScalarContext:
    """Arithmetic mode plus float tolerances.

    ``rank_tolerance`` is relative: a singular value counts as zero when it is
    below ``rank_tolerance * n * ||M||_inf``.  ``cluster_tolerance`` is an
    absolute distance on eigenvalue estimates.
    """

    mode: str = "exact"
    rank_tolerance: float | None = None
    cluster_tolerance: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exact":
            if self.rank_tolerance is not None or self.cluster_tolerance is not None:
                raise ValueError("exact mode takes no tolerances")
            return
        if self.rank_tolerance is None:
            object.__setattr__(self, "rank_tolerance", 1e-12)
        if self.cluster_tolerance is None:
            object.__setattr__(self, "cluster_tolerance", 1e-8)
        if not (self.rank_tolerance > 0 and self.cluster_tolerance > 0):
            raise ValueError("float tolerances must be strictly positive")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def scalar(self, x):
        """Coerce an int, float, Fraction or ``"p/q"`` string into this mode."""
        if self.exact:
            return Fraction(x)
        if isinstance(x, str):
            return float(Fraction(x))
        if isinstance(x, complex):
            return x
        return float(x)

    def is_zero(self, x, scale: float = 1.0) -> bool:
        if self.exact:
            return x == 0
        return abs(x) <= 1e3 * self.rank_tolerance * max(scale, 1e-300)


EXACT = ScalarContext("exact")
FLOAT = ScalarContext("float")


class Gaussian:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, Rational):
            return Gaussian(x, 0)
        return NotImplemented

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return Gaussian(self.re, -self.im)

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, Rational):
            return Gaussian(self.re * other, self.im * other)
        if not isinstance(other, Gaussian):
            return NotImplemented
        return Gaussian(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            return Gaussian(self.re / other, self.im / other)
        if not isinstance(other, Gaussian):
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        return Gaussian((self.re * other.re + self.im * other.im) / d,
                        (self.im * other.re - self.re * other.im) / d)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __abs__(self):
        return abs(complex(float(self.re), float(self.im)))

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"


I_UNIT = Gaussian(0, 1)


def imaginary_unit(ctx: ScalarContext):
    return I_UNIT if ctx.exact else 1j


class Matrix:
    """Dense row-major matrix; treat instances as immutable."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence], cols: int | None = None):
        self.data = [list(r) for r in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else (cols or 0)
        if cols is not None and self.data and self.cols != cols:
            raise ValueError("column count mismatch")
        if any(len(r) != self.cols for r in self.data):
            raise ValueError("ragged matrix rows")

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int, ctx: ScalarContext = EXACT) -> "Matrix":
        one, zero = ctx.scalar(1), ctx.scalar(0)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int, ctx: ScalarContext = EXACT) -> "Matrix":
        zero = ctx.scalar(0)
        return cls([[zero] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "Matrix":
        if not columns:
            return cls([[] for _ in range(rows or 0)], cols=0)
        return cls([list(r) for r in zip(*columns)])

    @classmethod
    def diag(cls, entries: Sequence, ctx: ScalarContext = EXACT) -> "Matrix":
        n = len(entries)
        zero = ctx.scalar(0)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def block_diag(cls, blocks: Iterable["Matrix"], ctx: ScalarContext = EXACT) -> "Matrix":
        blocks = list(blocks)
        n = sum(b.rows for b in blocks)
        out = Matrix.zeros(n, n, ctx).data
        off = 0
        for b in blocks:
            for i, row in enumerate(b.data):
                out[off + i][off:off + b.cols] = row
            off += b.rows
        return cls(out, cols=n)

    # access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.data]

    def columns(self) -> list[Vector]:
        return [list(c) for c in zip(*self.data)] if self.cols else []

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.data[i][j] for j in cols] for i in rows], cols=len(cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    # arithmetic -------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.data)], cols=self.rows) if self.cols else \
            Matrix([], cols=self.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols_b = list(zip(*other.data))
            if not cols_b:
                return Matrix([[] for _ in range(self.rows)], cols=0)
            return Matrix([[sum(map(mul, row, c)) for c in cols_b] for row in self.data],
                          cols=other.cols)
        if len(other) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(map(mul, row, other)) for row in self.data]

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                      cols=self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                      cols=self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.data], cols=self.cols)

    def scale(self, c) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.data], cols=self.cols)

    def map(self, f) -> "Matrix":
        return Matrix([[f(a) for a in r] for r in self.data], cols=self.cols)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    __hash__ = None

    def max_abs(self) -> float:
        """Entrywise max-norm as a float."""
        return max((abs(complex(a)) if isinstance(a, Gaussian) else float(abs(a))
                    for r in self.data for a in r), default=0.0)

    def norm_inf(self) -> float:
        return max((sum(float(abs(a)) for a in r) for r in self.data), default=0.0)

    def is_zero(self, ctx: ScalarContext = EXACT, scale: float = 1.0) -> bool:
        if ctx.exact:
            return all(a == 0 for r in self.data for a in r)
        return self.max_abs() <= 1e3 * ctx.rank_tolerance * max(scale, 1e-300)

    def to_numpy(self) -> np.ndarray:
        if any(isinstance(a, (complex, Gaussian)) for r in self.data for a in r):
            return np.array([[complex(a) for a in r] for r in self.data], dtype=complex).reshape(
                self.rows, self.cols)
        return np.array([[float(a) for a in r] for r in self.data], dtype=float).reshape(
            self.rows, self.cols)

    def __repr__(self):
        return f"Matrix({self.data!r})"


def matrix_from_numpy(a: np.ndarray) -> Matrix:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return Matrix([[complex(x) for x in r] for r in a], cols=a.shape[1])
    return Matrix([[float(x) for x in r] for r in a], cols=a.shape[1])


# vectors -------------------------------------------------------------------

def dot(x: Sequence, y: Sequence):
    return sum(map(mul, x, y))


def bilinear(G: Matrix, x: Sequence, y: Sequence):
    """<x, y> = x^T G y (bilinear even for complex vectors)."""
    return dot(x, G @ list(y))


def add_vec(x, y):
    return [a + b for a, b in zip(x, y)]


def sub_vec(x, y):
    return [a - b for a, b in zip(x, y)]


def scale_vec(c, x):
    return [c * a for a in x]


def conj_vec(x):
    return [a.conjugate() for a in x]


def real_vec(x):
    return [a.real for a in x]


def imag_vec(x):
    return [a.imag for a in x]


def vec_max_abs(x) -> float:
    return max((abs(complex(a)) if isinstance(a, Gaussian) else float(abs(a)) for a in x),
               default=0.0)


def complexify(M: Matrix, ctx: ScalarContext) -> Matrix:
    if ctx.exact:
        return M.map(lambda a: a if isinstance(a, Gaussian) else Gaussian(a, 0))
    return M.map(complex)


# kernels and solves --------------------------------------------------------

def _rref(data: list[list], ncols: int) -> list[int]:
    """In-place exact reduced row echelon form; returns pivot columns."""
    for i, row in enumerate(data):
        data[i] = [Fraction(a) if isinstance(a, int) else a for a in row]
    pivots = []
    r = 0
    nrows = len(data)
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if data[i][c] != 0), None)
        if p is None:
            continue
        data[r], data[p] = data[p], data[r]
        inv = 1 / data[r][c]
        data[r] = [a * inv for a in data[r]]
        prow = data[r]
        for i in range(nrows):
            if i != r:
                f = data[i][c]
                if f != 0:
                    data[i] = [a - f * b for a, b in zip(data[i], prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _float_threshold(a: np.ndarray, ctx: ScalarContext, scale: float = 0.0) -> float:
    norm = np.abs(a).sum(axis=1).max() if a.size else 0.0
    return ctx.rank_tolerance * max(a.shape) * max(norm, scale)


def kernel_basis(M: Matrix, ctx: ScalarContext = EXACT, scale: float = 0.0) -> list[Vector]:
    """Basis of the null space of ``M`` as a list of column vectors.

    In float mode singular values below ``rank_tolerance * n * max(||M||, scale)``
    count as zero.  Pass ``scale`` when ``M`` is a cancelling product whose own
    norm says nothing about its rounding error.
    """
    if M.cols == 0:
        return []
    if ctx.exact:
        data = [list(r) for r in M.data]
        pivots = _rref(data, M.cols)
        one = Fraction(1)
        basis = []
        pivot_set = set(pivots)
        for f in range(M.cols):
            if f in pivot_set:
                continue
            x = [Fraction(0)] * M.cols
            x[f] = one
            for i, p in enumerate(pivots):
                x[p] = -data[i][f]
            basis.append(x)
        return basis
    a = M.to_numpy()
    if a.size == 0 or M.rows == 0:
        return [list(v) for v in np.eye(M.cols)]
    _, s, vh = np.linalg.svd(a)
    tol = _float_threshold(a, ctx, scale)
    rank = int(np.sum(s > tol))
    null = vh[rank:].conj()
    cast = complex if np.iscomplexobj(a) else float
    return [[cast(x) for x in row] for row in null]


def rank(M: Matrix, ctx: ScalarContext = EXACT, scale: float = 0.0) -> int:
    return M.cols - len(kernel_basis(M, ctx, scale))


def solve(A: Matrix, b: Sequence, ctx: ScalarContext = EXACT) -> Vector:
    """Some ``x`` with ``A x = b``; raises :class:`NoSolution` when inconsistent."""
    if len(b) != A.rows:
        raise ValueError("right-hand side length mismatch")
    if ctx.exact:
        data = [list(r) + [bi] for r, bi in zip(A.data, b)]
        pivots = _rref(data, A.cols + 1)
        if pivots and pivots[-1] == A.cols:
            raise NoSolution("NoSolution: linear system is inconsistent")
        x = [Fraction(0)] * A.cols
        for i, p in enumerate(pivots):
            x[p] = data[i][A.cols]
        return x
    a = A.to_numpy()
    bb = np.array([complex(v) for v in b]) if any(isinstance(v, complex) for v in b) \
        else np.array([float(v) for v in b])
    x, *_ = np.linalg.lstsq(a, bb, rcond=None)
    resid = np.abs(a @ x - bb).max() if bb.size else 0.0
    scale = _float_threshold(a, ctx) * max(np.abs(x).max(initial=0.0), 1.0) + \
        ctx.rank_tolerance * np.abs(bb).max(initial=0.0)
    if resid > 1e3 * scale:
        raise NoSolution(f"least-squares residual {resid:.3e} exceeds tolerance")
    cast = complex if np.iscomplexobj(x) else float
    return [cast(v) for v in x]


def invert(M: Matrix, ctx: ScalarContext = EXACT) -> Matrix:
    if M.rows != M.cols:
        raise ValueError("invert needs a square matrix")
    n = M.rows
    if ctx.exact:
        one, zero = Fraction(1), Fraction(0)
        data = [list(r) + [one if i == j else zero for j in range(n)]
                for i, r in enumerate(M.data)]
        pivots = _rref(data, n)
        if len(pivots) < n:
            raise SingularMatrix("SingularMatrix: matrix is singular")
        return Matrix([r[n:] for r in data], cols=n)
    a = M.to_numpy()
    s = np.linalg.svd(a, compute_uv=False)
    if s.size and s[-1] <= _float_threshold(a, ctx):
        raise SingularMatrix(f"matrix is numerically singular (sigma_min={s[-1]:.3e})")
    return matrix_from_numpy(np.linalg.inv(a))


def determinant(M: Matrix):
    """Exact determinant by fraction-based elimination."""
    n = M.rows
    data = [[Fraction(a) if isinstance(a, int) else a for a in r] for r in M.data]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if data[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            data[c], data[p] = data[p], data[c]
            det = -det
        piv = data[c][c]
        det *= piv
        for i in range(c + 1, n):
            f = data[i][c] / piv
            if f != 0:
                data[i] = [a - f * b for a, b in zip(data[i], data[c])]
    return det


def is_symmetric(M: Matrix, ctx: ScalarContext = EXACT) -> bool:
    if M.rows != M.cols:
        return False
    if ctx.exact:
        return M == M.T
    return (M - M.T).max_abs() <= 1e3 * ctx.rank_tolerance * max(M.max_abs(), 1e-300)


def signature(G: Matrix, ctx: ScalarContext = EXACT) -> tuple[int, int]:
    """(n_plus, n_minus) of a symmetric nonsingular form."""
    if not is_symmetric(G, ctx):
        raise NotSymmetric("NotSymmetric: signature needs a symmetric matrix")
    n = G.rows
    if not ctx.exact:
        w = np.linalg.eigvalsh(G.to_numpy())
        tol = _float_threshold(G.to_numpy(), ctx)
        if n and np.abs(w).min() <= tol:
            raise DegenerateForm("DegenerateForm: form is numerically singular")
        return int(np.sum(w > 0)), int(np.sum(w < 0))
    a = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in G.data]
    plus = minus = 0
    idx = list(range(n))
    while idx:
        p = next((i for i in idx if a[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in idx for j in idx if a[i][j] != 0), None)
            if pair is None:
                raise DegenerateForm("DegenerateForm: form is singular")
            i, j = pair
            # congruence by e_i -> e_i + e_j makes the (i, i) entry 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        if d > 0:
            plus += 1
        else:
            minus += 1
        idx.remove(p)
        for i in idx:
            f = a[i][p] / d
            if f != 0:
                for k in idx:
                    a[i][k] -= f * a[p][k]
    return plus, minus


# polynomials ---------------------------------------------------------------

class Polynomial:
    """Univariate polynomial with ascending coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable):
        c = list(coefficients)
        while c and c[-1] == 0:
            c.pop()
        self.coefficients = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff=Fraction(1)) -> "Polynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def lead(self):
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return not self.coefficients

    def monic(self) -> "Polynomial":
        lc = self.lead
        return Polynomial([c / lc for c in self.coefficients])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return Polynomial([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coefficients])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * other for c in self.coefficients])
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return Polynomial([])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        q = [0] * max(len(rem) - other.degree, 1)
        lc = other.lead
        d = other.degree
        for i in range(len(rem) - 1 - d, -1, -1):
            f = rem[i + d] / lc
            q[i] = f
            if f != 0:
                for j, c in enumerate(other.coefficients):
                    rem[i + j] -= f * c
        return Polynomial(q), Polynomial(rem[:d] if d > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coefficients)][1:])

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coefficients]})"

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono and c == 1:
                s = mono
            elif mono and c == -1:
                s = "-" + mono
            else:
                s = f"{c}{'*' + mono if mono else ''}"
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd over an exact field."""
    while not q.is_zero():
        p, q = q, p % q
    return p.monic() if not p.is_zero() else p


def poly_lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    return ((p * q) // poly_gcd(p, q)).monic()


def evaluate_matrix_polynomial(J: Matrix, p: Polynomial, ctx: ScalarContext = EXACT) -> Matrix:
    """Horner evaluation of p(J)."""
    n = J.rows
    if J.rows != J.cols:
        raise ValueError("matrix polynomial needs a square matrix")
    if p.is_zero():
        return Matrix.zeros(n, n, ctx)
    out = None
    for c in reversed(p.coefficients):
        if out is None:
            out = Matrix.identity(n, ctx).scale(c)
        else:
            out = out @ J
            for i in range(n):
                out.data[i][i] = out.data[i][i] + c
    return out


def polynomial_scale(J: Matrix, p: Polynomial, norm: float | None = None) -> float:
    """sum |c_i| ||J||^i, the size of the terms that p(J) sums up."""
    if norm is None:
        norm = J.norm_inf() if J.rows else 0.0
    return float(sum(abs(complex(c)) * norm ** i for i, c in enumerate(p.coefficients)))


def polynomial_kernel(J: Matrix, p: Polynomial, ctx: ScalarContext = EXACT,
                      norm: float | None = None) -> list[Vector]:
    """ker p(J), with the float rank threshold taken from the terms of p(J).

    ``norm`` overrides ||J|| in that estimate.
    """
    M = evaluate_matrix_polynomial(J, p, ctx)
    if ctx.exact:
        return kernel_basis(M, ctx)
    return kernel_basis(M, ctx, polynomial_scale(J, p, norm))


def matrix_power(M: Matrix, k: int, ctx: ScalarContext = EXACT) -> Matrix:
    out = Matrix.identity(M.rows, ctx)
    for _ in range(k):
        out = out @ M
    return out


def shifted(J: Matrix, c) -> Matrix:
    """J - c I."""
    out = Matrix(J.data, cols=J.cols)
    for i in range(J.rows):
        out.data[i][i] = out.data[i][i] - c
    return out
