"""Minimal polynomial of J and its factorization into +/- paired factors.

The factorization always has the shape

    prod (t^2 - 2a t + a^2 + b^2)^k (t^2 + 2a t + a^2 + b^2)^k
  * prod (t^2 + lam^2)^l * prod (t - mu)^m (t + mu)^m * t^s

with a, b, lam, mu > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.linalg

from . import linalg as la
from .errors import NotSkewSpectrum, NumericalFailure, UnsupportedField
from .linalg import EXACT, Matrix, Polynomial, ScalarContext
from .space import SpacePair


@dataclass(frozen=True)
class PolyFactorization:
    complex_factors: tuple = ()      # (a, b, k)
    imaginary_factors: tuple = ()    # (lam, l)
    real_factors: tuple = ()         # (mu, m)
    nilpotent_exponent: int = 0

    def __post_init__(self):
        for a, b, k in self.complex_factors:
            if not (a > 0 and b > 0 and k >= 1):
                raise ValueError(f"bad complex factor {(a, b, k)}")
        for lam, l in self.imaginary_factors:
            if not (lam > 0 and l >= 1):
                raise ValueError(f"bad imaginary factor {(lam, l)}")
        for mu, m in self.real_factors:
            if not (mu > 0 and m >= 1):
                raise ValueError(f"bad real factor {(mu, m)}")
        if self.nilpotent_exponent < 0:
            raise ValueError("nilpotent exponent must be >= 0")

    @property
    def degree(self) -> int:
        return (4 * sum(k for *_, k in self.complex_factors)
                + 2 * sum(l for _, l in self.imaginary_factors)
                + 2 * sum(m for _, m in self.real_factors)
                + self.nilpotent_exponent)

    def polynomial(self) -> Polynomial:
        """Multiply the factors back out."""
        p = Polynomial([1])
        for a, b, k in self.complex_factors:
            c = a * a + b * b
            p = p * (Polynomial([c, -2 * a, 1]) * Polynomial([c, 2 * a, 1])) ** k
        for lam, l in self.imaginary_factors:
            p = p * Polynomial([lam * lam, 0, 1]) ** l
        for mu, m in self.real_factors:
            p = p * Polynomial([-mu * mu, 0, 1]) ** m
        return p * Polynomial.monomial(self.nilpotent_exponent, 1)

    def describe(self) -> str:
        parts = []
        for a, b, k in self.complex_factors:
            c = a * a + b * b
            parts.append(f"(t^2 - {2 * a}t + {c})^{k} (t^2 + {2 * a}t + {c})^{k}")
        for lam, l in self.imaginary_factors:
            parts.append(f"(t^2 + {lam * lam})^{l}")
        for mu, m in self.real_factors:
            parts.append(f"(t - {mu})^{m} (t + {mu})^{m}")
        if self.nilpotent_exponent:
            parts.append(f"t^{self.nilpotent_exponent}")
        return " * ".join(parts) if parts else "1"


# exact --------------------------------------------------------------------

def _local_annihilator(J: Matrix, x: list) -> Polynomial:
    krylov = [x]
    while True:
        nxt = J @ krylov[-1]
        A = Matrix.from_columns(krylov)
        try:
            c = la.solve(A, nxt, EXACT)
        except la.NoSolution:
            krylov.append(nxt)
            continue
        return Polynomial([-ci for ci in c] + [Fraction(1)])


def minimal_polynomial(pair: SpacePair) -> Polynomial:
    """Monic minimal polynomial: lcm of the Krylov annihilators of e_1, e_2, ..."""
    ctx = pair.ctx
    if not ctx.exact:
        return float_factorization(pair).polynomial()
    J = pair.op
    n = pair.dim
    p = Polynomial([Fraction(1)])
    for i in range(n):
        e = [Fraction(int(k == i)) for k in range(n)]
        if p.degree > 0 and all(v == 0 for v in la.evaluate_matrix_polynomial(J, p) @ e):
            continue
        p = la.poly_lcm(p, _local_annihilator(J, e))
    return p


def _multiplicity(p: Polynomial, f: Polynomial) -> tuple[int, Polynomial]:
    k = 0
    while p.degree >= f.degree:
        q, r = divmod(p, f)
        if not r.is_zero():
            break
        p, k = q, k + 1
    return k, p


def _rationalize(x: float, test) -> Fraction | None:
    for max_den in (1, 2, 10, 100, 10**3, 10**4, 10**5, 10**6):
        cand = Fraction(x).limit_denominator(max_den)
        if cand > 0 and abs(float(cand) - x) <= 1e-6 * max(1.0, abs(x)) and test(cand):
            return cand
    return None


def _exact_factorization(p: Polynomial) -> PolyFactorization:
    coeffs = [Fraction(c) for c in p.coefficients]
    p = Polynomial(coeffs)
    if p.lead != 1:
        raise ValueError("factor_minimal_polynomial needs a monic polynomial")
    s = next(i for i, c in enumerate(p.coefficients) if c != 0)
    q = p // Polynomial.monomial(s)
    if q.degree == 0:
        return PolyFactorization(nilpotent_exponent=s)
    square_free = q // la.poly_gcd(q, q.derivative())
    roots = np.roots([float(c) for c in reversed(square_free.coefficients)])
    scale = max(1.0, float(np.abs(roots).max()))
    complex_f, imag_f, real_f = [], [], []
    remaining = q
    seen = []
    for z in sorted(roots, key=lambda z: (abs(z.real), abs(z.imag))):
        re, im = abs(z.real), abs(z.imag)
        if any(abs(re - a) + abs(im - b) < 1e-6 * scale for a, b in seen):
            continue
        seen.append((re, im))
        if im <= 1e-7 * scale:
            lin_plus = lambda m: square_free(m) == 0
            mu = _rationalize(re, lin_plus)
            if mu is None:
                raise UnsupportedField(f"UnsupportedField: real root {z.real:.6g} is not rational")
            if square_free(-mu) != 0:
                raise NotSkewSpectrum(f"NotSkewSpectrum: root {mu} has no partner {-mu}")
            m1, remaining = _multiplicity(remaining, Polynomial([-mu, 1]))
            m2, remaining = _multiplicity(remaining, Polynomial([mu, 1]))
            if m1 != m2:
                raise NotSkewSpectrum(f"NotSkewSpectrum: (t-{mu})^{m1} but (t+{mu})^{m2}")
            real_f.append((mu, m1))
        elif re <= 1e-7 * scale:
            quad = lambda lam: (square_free % Polynomial([lam * lam, 0, 1])).is_zero()
            lam = _rationalize(im, quad)
            if lam is None:
                raise UnsupportedField(f"UnsupportedField: imaginary root {z.imag:.6g}i "
                                       "is not rational")
            l, remaining = _multiplicity(remaining, Polynomial([lam * lam, 0, 1]))
            imag_f.append((lam, l))
        else:
            a = b = None
            for max_den in (1, 2, 10, 100, 10**3, 10**4, 10**5, 10**6):
                ca = Fraction(re).limit_denominator(max_den)
                cb = Fraction(im).limit_denominator(max_den)
                close = abs(float(ca) - re) + abs(float(cb) - im) <= 1e-6 * scale
                if close and ca > 0 and cb > 0 and (
                        square_free % Polynomial([ca * ca + cb * cb, -2 * ca, 1])).is_zero():
                    a, b = ca, cb
                    break
            if a is None:
                raise UnsupportedField(f"UnsupportedField: complex root {z:.6g} "
                                       "has irrational parts")
            c = a * a + b * b
            minus = Polynomial([c, -2 * a, 1])
            plus = Polynomial([c, 2 * a, 1])
            if not (square_free % plus).is_zero():
                raise NotSkewSpectrum(f"NotSkewSpectrum: root {a}+{b}i has no partner "
                                      f"{-a}+{b}i")
            k1, remaining = _multiplicity(remaining, minus)
            k2, remaining = _multiplicity(remaining, plus)
            if k1 != k2:
                raise NotSkewSpectrum(f"NotSkewSpectrum: quadratic exponents {k1} != {k2}")
            complex_f.append((a, b, k1))
    if remaining.degree != 0:
        raise NotSkewSpectrum(f"NotSkewSpectrum: unmatched factor {remaining}")
    return PolyFactorization(tuple(sorted(complex_f)), tuple(sorted(imag_f)),
                             tuple(sorted(real_f)), s)


# float --------------------------------------------------------------------

def _clusters(values: np.ndarray, theta: float) -> list[list[int]]:
    """Single-linkage clusters of complex points at distance threshold theta."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(n), 2):
        if abs(values[i] - values[j]) <= theta:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _exponent(J: Matrix, f: Polynomial, expected_dim: int, ctx: ScalarContext,
              norm: float | None = None) -> int | None:
    """Least j with dim ker f(J)^j == expected_dim, or None if the dims disagree."""
    prev = 0
    for j in range(1, J.rows + 1):
        d = len(la.polynomial_kernel(J, f ** j, ctx, norm))
        if d == expected_dim:
            return j
        if d > expected_dim or d <= prev:
            return None
        prev = d
    return None


def factor_roots(kind: str, params: tuple) -> list[complex]:
    """Complex roots of one paired factor."""
    if kind == "complex":
        a, b = (float(x) for x in params)
        return [complex(a, b), complex(a, -b), complex(-a, b), complex(-a, -b)]
    if kind == "imaginary":
        return [complex(0, float(params[0])), complex(0, -float(params[0]))]
    if kind == "real":
        return [complex(float(params[0])), complex(-float(params[0]))]
    return [0j]


def invariant_subspace(J: np.ndarray, roots: list[complex], all_roots: list[complex],
                       expected_dim: int | None = None) -> np.ndarray:
    """Orthonormal basis of the J-invariant subspace for the eigenvalues nearest to ``roots``.

    Every eigenvalue is assigned to its nearest point of ``all_roots``; the
    ordered real Schur form moves the selected ones to the leading block.
    """
    mine = np.array(roots)
    everything = np.array(all_roots)

    def select(x, y=0.0):
        z = complex(x, y)
        return np.abs(mine - z).min() <= np.abs(everything - z).min()

    try:
        _, Z, sdim = scipy.linalg.schur(J, output="real", sort=select)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise NumericalFailure(f"NumericalFailure: Schur reordering failed ({exc})") from None
    if expected_dim is not None and sdim != expected_dim:
        raise NumericalFailure(f"NumericalFailure: invariant subspace has dimension {sdim}, "
                               f"expected {expected_dim}")
    return Z[:, :sdim]


def _restricted(J: np.ndarray, Q: np.ndarray) -> Matrix:
    return la.matrix_from_numpy(Q.T @ J @ Q)


def _try_float_structure(pair: SpacePair, eig: np.ndarray, theta: float):
    ctx = pair.ctx
    Jn = pair.op.to_numpy()
    groups = _clusters(eig, theta)
    centers = [(complex(np.mean(eig[g])), len(g)) for g in groups]
    # distinct clusters must be well separated relative to the merge radius
    for (c1, _), (c2, _) in combinations(centers, 2):
        if abs(c1 - c2) <= 10 * theta:
            return None

    def partner(target, size):
        hits = [c for c, m in centers if abs(c - target) <= 10 * theta and m == size]
        return hits[0] if len(hits) == 1 else None

    found = []      # (kind, params, halves: [(poly, dim)])
    for c, size in centers:
        re, im = c.real, c.imag
        if abs(c) <= theta:
            found.append(("nilpotent", (), [(Polynomial([0.0, 1.0]), size)]))
        elif abs(im) <= theta and re > 0:
            other = partner(-c, size)
            if other is None:
                return None
            mu = (re - other.real) / 2
            found.append(("real", (mu,), [(Polynomial([-mu, 1.0]), size),
                                          (Polynomial([mu, 1.0]), size)]))
        elif abs(re) <= theta and im > 0:
            other = partner(c.conjugate(), size)
            if other is None:
                return None
            lam = (im - other.imag) / 2
            found.append(("imaginary", (lam,), [(Polynomial([lam * lam, 0.0, 1.0]), 2 * size)]))
        elif re > theta and im > theta:
            quartet = [partner(c.conjugate(), size), partner(-c, size),
                       partner(-c.conjugate(), size)]
            if any(q is None for q in quartet):
                return None
            a = (re + quartet[0].real - quartet[1].real - quartet[2].real) / 4
            b = (im - quartet[0].imag - quartet[1].imag + quartet[2].imag) / 4
            cc = a * a + b * b
            found.append(("complex", (a, b), [(Polynomial([cc, -2 * a, 1.0]), 2 * size),
                                              (Polynomial([cc, 2 * a, 1.0]), 2 * size)]))
        elif abs(re) > theta or abs(im) > theta:
            # a partner of some representative, or a cluster off the paired axes
            if not (re < -theta or im < -theta):
                return None
    if sum(sum(d for _, d in halves) for _, _, halves in found) != pair.dim:
        return None
    everything = [z for kind, params, _ in found for z in factor_roots(kind, params)]
    complex_f, imag_f, real_f = [], [], []
    s = 0
    for kind, params, halves in found:
        dim = sum(d for _, d in halves)
        Q = invariant_subspace(Jn, factor_roots(kind, params), everything, dim)
        T = _restricted(Jn, Q)
        # a nearly zero restriction must not set its own noise floor
        norm = max(T.norm_inf(), 1e-2 * pair.op.norm_inf())
        exps = {_exponent(T, f, d, ctx, norm) for f, d in halves}
        if None in exps or len(exps) != 1:
            return None
        (k,) = exps
        if kind == "nilpotent":
            s = k
        elif kind == "real":
            real_f.append((params[0], k))
        elif kind == "imaginary":
            imag_f.append((params[0], k))
        else:
            complex_f.append((*params, k))
    return PolyFactorization(tuple(sorted(complex_f)), tuple(sorted(imag_f)),
                             tuple(sorted(real_f)), s)


def float_factorization(pair: SpacePair) -> PolyFactorization:
    """Factor the minimal polynomial of a float pair from clustered eigenvalues.

    Eigenvalues of defective blocks spread like eps^(1/r), so merge radii
    between ``cluster_tolerance`` and 1e6 times it are tried, coarsest first.
    The first radius whose clusters are more than ten radii apart and form a
    consistent +/- paired structure wins.  Scanning coarse to fine keeps a
    split double root a +/- i*delta from passing as a complex quartet.
    Exponents are read off the operator restricted to each cluster's
    invariant subspace.
    """
    ctx = pair.ctx
    eig = np.linalg.eigvals(pair.op.to_numpy())
    for k in range(6, -1, -1):
        f = _try_float_structure(pair, eig, ctx.cluster_tolerance * 10 ** k)
        if f is not None:
            return f
    raise NumericalFailure("NumericalFailure: eigenvalue clusters do not form a consistent "
                           "skewadjoint structure")


def factor_minimal_polynomial(p: Polynomial, ctx: ScalarContext = EXACT) -> PolyFactorization:
    """Factor a minimal polynomial into the paired shape.

    Exact mode finds numeric roots of the square-free part, rationalizes them
    and confirms each factor by exact division.  Float mode clusters the
    companion-matrix roots of ``p`` directly.
    """
    if ctx.exact:
        return _exact_factorization(p)
    coeffs = [float(c) for c in p.coefficients]
    if abs(coeffs[-1] - 1.0) > 1e-12:
        raise ValueError("factor_minimal_polynomial needs a monic polynomial")
    n = len(coeffs) - 1
    companion = np.zeros((n, n))
    if n:
        companion[1:, :-1] = np.eye(n - 1)
        companion[:, -1] = [-c for c in coeffs[:-1]]
    J = la.matrix_from_numpy(companion)
    pair = SpacePair(n, Matrix.identity(n, ctx), J, ctx)
    return float_factorization(pair)


def factorize(pair: SpacePair) -> PolyFactorization:
    """Factorization of the pair's minimal polynomial in the pair's mode."""
    if pair.ctx.exact:
        return _exact_factorization(minimal_polynomial(pair))
    return float_factorization(pair)
