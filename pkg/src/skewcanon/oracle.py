"""Canonical data -> scrambled pairs, and independent verification.

The verifier rebuilds C and G_c from the block list alone and recomputes
every identity with the linear-algebra core; it never calls builder code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg as la
from .blocks import (SELF_PAIRED, BasisChange, CanonicalForm, ComplexQuad, ImaginaryChain,
                     NilpotentEven, NilpotentOdd, RealChain, canonical_matrices)
from .decomposition import isotropy_check
from .errors import SkewCanonError
from .linalg import EXACT, FLOAT, Matrix, ScalarContext
from .space import SpacePair, validate_pair
from .spectral import factorize


@dataclass(frozen=True)
class GeneratorSpec:
    blocks: tuple
    scramble: str = "identity"      # identity | unimodular | random_invertible
    seed: int = 0
    entry_bound: int = 3
    condition: float = 100.0
    mode: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.scramble not in ("identity", "unimodular", "random_invertible"):
            raise ValueError(f"unknown scramble {self.scramble!r}")
        if self.scramble == "random_invertible" and self.mode == "exact":
            raise ValueError("random_invertible scrambles are float-only")
        if not self.blocks:
            raise ValueError("generator spec needs at least one block")

    @property
    def ctx(self) -> ScalarContext:
        return EXACT if self.mode == "exact" else FLOAT

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)


def unimodular_matrix(n: int, seed: int, entry_bound: int, ops: int | None = None):
    """Random integer matrix of determinant 1 and its exact inverse.

    Built from ``ops`` elementary operations row_i += c * row_j with
    0 < |c| <= entry_bound.
    """
    rng = np.random.default_rng(seed)
    ops = 2 * n if ops is None else ops
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Pinv = [row[:] for row in P]
    if n < 2:
        return Matrix(P).map(Fraction), Matrix(Pinv).map(Fraction)
    for _ in range(ops):
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        c = int(rng.integers(1, entry_bound + 1)) * (1 if rng.random() < 0.5 else -1)
        # P <- E P with E = I + c e_i e_j^T; P^{-1} <- P^{-1} E^{-1}
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
        for row in Pinv:
            row[j] -= c * row[i]
    return Matrix(P).map(Fraction), Matrix(Pinv).map(Fraction)


def random_invertible_matrix(n: int, seed: int, condition: float = 100.0) -> np.ndarray:
    """Random real matrix with 2-norm condition number at most ``condition``."""
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.exp(rng.uniform(0.0, math.log(condition), size=n))
    if n > 1:
        s[0], s[-1] = 1.0, s.max()
    return U @ np.diag(s) @ V.T


def generate_pair(spec: GeneratorSpec) -> tuple[SpacePair, BasisChange]:
    """J = P C P^-1 and G = P^-T G_c P^-1 for the generator's scramble P."""
    ctx = spec.ctx
    form = CanonicalForm(spec.blocks)
    C, Gc = canonical_matrices(form, ctx)
    n = form.dim
    if spec.scramble == "identity":
        P = Matrix.identity(n, ctx)
        J, G = C, Gc
    elif spec.scramble == "unimodular":
        P, Pinv = unimodular_matrix(n, spec.seed, spec.entry_bound)
        if not ctx.exact:
            P, Pinv = P.map(float), Pinv.map(float)
        J = P @ C @ Pinv
        G = Pinv.T @ Gc @ Pinv
    else:
        p = random_invertible_matrix(n, spec.seed, spec.condition)
        pinv = np.linalg.inv(p)
        c, gc = C.to_numpy(), Gc.to_numpy()
        g = pinv.T @ gc @ pinv
        P = la.matrix_from_numpy(p)
        J = la.matrix_from_numpy(p @ c @ pinv)
        G = la.matrix_from_numpy((g + g.T) / 2)
    pair = validate_pair(G, J, ctx)
    return pair, BasisChange(P, [1] * sum(isinstance(b, SELF_PAIRED) for b in form.blocks))


def _param_close(x, y, ctx: ScalarContext) -> bool:
    if ctx.exact:
        return x == y
    return abs(float(x) - float(y)) <= ctx.cluster_tolerance * max(1.0, abs(float(x)))


def _block_close(b1, b2, ctx: ScalarContext) -> bool:
    if type(b1) is not type(b2) or b1.r != b2.r:
        return False
    if getattr(b1, "sign", None) != getattr(b2, "sign", None):
        return False
    if isinstance(b1, ComplexQuad):
        return _param_close(b1.a, b2.a, ctx) and _param_close(b1.b, b2.b, ctx)
    if isinstance(b1, ImaginaryChain):
        return _param_close(b1.lam, b2.lam, ctx)
    if isinstance(b1, RealChain):
        return _param_close(b1.mu, b2.mu, ctx)
    return True


def compare_forms(f1: CanonicalForm, f2: CanonicalForm, ctx: ScalarContext = EXACT) -> bool:
    """Equality of block multisets (parameters within cluster_tolerance in float mode)."""
    if f1.dim != f2.dim or len(f1.blocks) != len(f2.blocks):
        return False
    remaining = list(f2.blocks)
    for b in f1.blocks:
        hit = next((i for i, c in enumerate(remaining) if _block_close(b, c, ctx)), None)
        if hit is None:
            return False
        remaining.pop(hit)
    return True


@dataclass
class VerificationReport:
    conjugacy_residual: float
    congruence_residual: float
    isotropy_pass: bool
    signature_pass: bool
    minpoly_shape_pass: bool
    block_multiset_match: Optional[bool] = None
    residual_bound: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        flags = [self.isotropy_pass, self.signature_pass, self.minpoly_shape_pass]
        if self.block_multiset_match is not None:
            flags.append(self.block_multiset_match)
        return (all(flags) and self.conjugacy_residual <= self.residual_bound
                and self.congruence_residual <= self.residual_bound)

    def as_dict(self) -> dict:
        return {
            "conjugacy_residual": self.conjugacy_residual,
            "congruence_residual": self.congruence_residual,
            "isotropy_pass": self.isotropy_pass,
            "signature_pass": self.signature_pass,
            "minpoly_shape_pass": self.minpoly_shape_pass,
            "block_multiset_match": self.block_multiset_match,
            "pass": self.passed,
        }


def _exact_residuals(pair: SpacePair, form: CanonicalForm, basis: BasisChange):
    """Max-norm residuals of P^-1 J P - C and P^T G P - G_c with P = R D.

    D only enters through ratios sqrt(rho_i / rho_j) and products
    sqrt(rho_i rho_j); exactness is decided by comparing squares.
    """
    C, Gc = canonical_matrices(form, EXACT)
    R = basis.rational_part
    rho = [Fraction(x) for x in basis.column_scales(form)]
    Rinv = la.invert(R, EXACT)
    X = Rinv @ pair.op @ R
    Y = R.T @ pair.gram @ R
    n = form.dim
    conj = cong = 0.0
    for i in range(n):
        for j in range(n):
            x, c = X[i, j], C[i, j]
            if x != 0 or c != 0:
                ratio = rho[j] / rho[i]
                exact_ok = rho[i] == rho[j] and x == c
                if not exact_ok:
                    conj = max(conj, abs(float(x) * math.sqrt(float(ratio)) - float(c)) or 1e-300)
            y, g = Y[i, j], Gc[i, j]
            if y != 0 or g != 0:
                prod = rho[i] * rho[j]
                exact_ok = (y > 0) == (g > 0) and y * y == g * g * prod
                if not exact_ok:
                    cong = max(cong, abs(float(y) / math.sqrt(float(prod)) - float(g)) or 1e-300)
    return conj, cong


def _minpoly_shape(pair: SpacePair, form: CanonicalForm) -> tuple[bool, str]:
    """The canonical matrix's minimal polynomial has the paired shape and matches J's."""
    ctx = pair.ctx
    C, Gc = canonical_matrices(form, ctx)
    cpair = SpacePair(form.dim, Gc, C, ctx)
    try:
        fc = factorize(cpair)
        fj = factorize(pair)
    except SkewCanonError as exc:
        return False, str(exc)
    expected: dict = {}
    for b in form.blocks:
        if isinstance(b, ComplexQuad):
            key = ("c", b.a, b.b)
        elif isinstance(b, ImaginaryChain):
            key = ("i", b.lam)
        elif isinstance(b, RealChain):
            key = ("r", b.mu)
        else:
            key = ("n",)
        expected[key] = max(expected.get(key, 0), b.r)
    got = {("c", a, b): k for a, b, k in fc.complex_factors}
    got.update({("i", lam): l for lam, l in fc.imaginary_factors})
    got.update({("r", mu): m for mu, m in fc.real_factors})
    if fc.nilpotent_exponent:
        got[("n",)] = fc.nilpotent_exponent
    same_params = sorted(map(str, got)) == sorted(map(str, expected)) if ctx.exact else \
        len(got) == len(expected)
    if ctx.exact:
        ok = same_params and got == expected and fc == fj
        return ok, "" if ok else f"minimal polynomial shape mismatch: {fc} vs {fj}"
    ok = same_params and sorted(got.values()) == sorted(expected.values()) and \
        fc.degree == fj.degree
    return ok, "" if ok else "minimal polynomial shape mismatch"


def verify_report(pair: SpacePair, form: CanonicalForm, basis: BasisChange,
                  reference: GeneratorSpec | None = None) -> VerificationReport:
    """Recompute every identity of a canonical decomposition from scratch."""
    ctx = pair.ctx
    if form.dim != pair.dim or basis.rational_part.shape != (pair.dim, pair.dim):
        raise ValueError("dimensions of pair, form and basis disagree")
    notes = []
    if ctx.exact:
        try:
            conj, cong = _exact_residuals(pair, form, basis)
        except la.SingularMatrix:
            conj = cong = math.inf
            notes.append("basis change is singular")
        bound = 0.0
    else:
        R = basis.rational_part.to_numpy().astype(float)
        d = np.array([1 / math.sqrt(float(r)) for r in basis.column_scales(form)])
        P = R * d[None, :]
        C, Gc = (m.to_numpy() for m in canonical_matrices(form, FLOAT))
        J, G = pair.op.to_numpy(), pair.gram.to_numpy()
        try:
            conj = float(np.abs(np.linalg.solve(P, J @ P) - C).max())
        except np.linalg.LinAlgError:
            conj = math.inf
        cong = float(np.abs(P.T @ G @ P - Gc).max())
        bound = 1e-8 * max(pair.op.norm_inf(), pair.gram.norm_inf(), 1.0)
    try:
        f = factorize(pair)
        iso = isotropy_check(pair, f).passed
    except SkewCanonError as exc:
        iso = False
        notes.append(str(exc))
    C, Gc = canonical_matrices(form, ctx)
    try:
        sig = la.signature(Gc, ctx) == la.signature(pair.gram, ctx)
    except SkewCanonError as exc:
        sig = False
        notes.append(str(exc))
    shape, why = _minpoly_shape(pair, form)
    if why:
        notes.append(why)
    match = None
    if reference is not None:
        match = compare_forms(form, CanonicalForm(reference.blocks), ctx)
    return VerificationReport(conj, cong, iso, sig, shape, match, bound, notes)


def canonical_pair(form: CanonicalForm, ctx: ScalarContext = EXACT) -> SpacePair:
    C, Gc = canonical_matrices(form, ctx)
    return SpacePair(form.dim, Gc, C, ctx)


_EXACT_PARAMS = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


def _spectrum(block) -> list[complex]:
    if isinstance(block, ComplexQuad):
        a, b = float(block.a), float(block.b)
        return [complex(s * a, t * b) for s in (1, -1) for t in (1, -1)]
    if isinstance(block, ImaginaryChain):
        return [complex(0, float(block.lam)), complex(0, -float(block.lam))]
    if isinstance(block, RealChain):
        return [float(block.mu), -float(block.mu)]
    return [0j]


def well_separated(blocks, separation: float) -> bool:
    """Distinct eigenvalues of the blocks are at least ``separation`` apart."""
    points = sorted({complex(round(z.real, 12), round(z.imag, 12))
                     for b in blocks for z in _spectrum(b)}, key=lambda z: (z.real, z.imag))
    return all(abs(p - q) >= separation for i, p in enumerate(points) for q in points[i + 1:])


def random_blocks(rng: np.random.Generator, max_dim: int = 12, mode: str = "exact",
                  separation: float = 0.1) -> list:
    """A random mix of canonical blocks with total dimension <= max_dim."""
    while True:
        blocks = []
        remaining = int(rng.integers(1, max_dim + 1))
        pool = {}

        def param(kind):
            if mode == "exact":
                return _EXACT_PARAMS[int(rng.integers(len(_EXACT_PARAMS)))]
            # reuse an earlier value half of the time so chains share eigenvalues
            if pool.get(kind) and rng.random() < 0.5:
                return pool[kind][int(rng.integers(len(pool[kind])))]
            x = round(float(rng.uniform(0.3, 3.0)), 3)
            pool.setdefault(kind, []).append(x)
            return x

        while remaining > 0:
            options = []
            if remaining >= 4:
                options.append("complex")
            if remaining >= 2:
                options += ["imaginary", "real"]
            if remaining >= 4:
                options.append("nilpotent_even")
            options.append("nilpotent_odd")
            kind = options[int(rng.integers(len(options)))]
            sign = 1 if rng.random() < 0.5 else -1
            if kind == "complex":
                r = int(rng.integers(1, min(2, remaining // 4) + 1))
                blocks.append(ComplexQuad(param("a"), param("b"), r))
            elif kind == "imaginary":
                r = int(rng.integers(1, min(3, remaining // 2) + 1))
                blocks.append(ImaginaryChain(param("lam"), r, sign))
            elif kind == "real":
                r = int(rng.integers(1, min(3, remaining // 2) + 1))
                blocks.append(RealChain(param("mu"), r))
            elif kind == "nilpotent_even":
                r = 2 if remaining < 8 or rng.random() < 0.7 else 4
                blocks.append(NilpotentEven(r))
            else:
                choices = [x for x in (1, 3, 5) if x <= remaining]
                blocks.append(NilpotentOdd(choices[int(rng.integers(len(choices)))], sign))
            remaining -= blocks[-1].dim
        if mode == "exact" or well_separated(blocks, separation):
            return blocks
