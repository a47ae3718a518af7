"""Primary decomposition of (G, J) and isotropy certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg as la
from .errors import NumericalFailure
from .linalg import Matrix, Polynomial
from .space import SpacePair, Subspace, restrict_pair
from .spectral import PolyFactorization, factor_roots, invariant_subspace


@dataclass(frozen=True)
class PrimaryComponent:
    kind: str            # "complex" | "imaginary" | "real" | "nilpotent"
    params: tuple        # (a, b) | (lam,) | (mu,) | ()
    exponent: int
    subspace: Subspace
    restricted: SpacePair = field(repr=False)

    @property
    def dim(self) -> int:
        return self.subspace.dim


def _poly(ctx, coeffs):
    return Polynomial([ctx.scalar(c) for c in coeffs])


def component_polynomial(kind: str, params: tuple, ctx) -> Polynomial:
    """The irreducible-type factor whose power annihilates a component."""
    if kind == "complex":
        a, b = params
        c = a * a + b * b
        return _poly(ctx, [c, -2 * a, 1]) * _poly(ctx, [c, 2 * a, 1])
    if kind == "imaginary":
        (lam,) = params
        return _poly(ctx, [lam * lam, 0, 1])
    if kind == "real":
        (mu,) = params
        return _poly(ctx, [-mu * mu, 0, 1])
    return _poly(ctx, [0, 1])


def _factor_list(f: PolyFactorization):
    out = [("complex", (a, b), k) for a, b, k in sorted(f.complex_factors)]
    out += [("imaginary", (lam,), l) for lam, l in sorted(f.imaginary_factors)]
    out += [("real", (mu,), m) for mu, m in sorted(f.real_factors)]
    if f.nilpotent_exponent:
        out.append(("nilpotent", (), f.nilpotent_exponent))
    return out


def primary_components(pair: SpacePair, f: PolyFactorization) -> list[PrimaryComponent]:
    """Kernels of (factor(J))^exponent, in the deterministic factor order."""
    ctx = pair.ctx
    comps = []
    factors = _factor_list(f)
    if not ctx.exact:
        # ordered Schur subspaces avoid the ill-conditioned powers p(J)^e
        Jn = pair.op.to_numpy()
        everything = [z for kind, params, _ in factors for z in factor_roots(kind, params)]
    for kind, params, e in factors:
        if ctx.exact:
            poly = component_polynomial(kind, params, ctx) ** e
            basis = la.polynomial_kernel(pair.op, poly, ctx)
        else:
            Q = invariant_subspace(Jn, factor_roots(kind, params), everything)
            basis = [list(col) for col in Q.T]
        W = Subspace(pair.dim, basis)
        comps.append(PrimaryComponent(kind, params, e, W, restrict_pair(pair, W)))
    if sum(c.dim for c in comps) != pair.dim:
        raise NumericalFailure(f"NumericalFailure: primary kernels have total dimension "
                               f"{sum(c.dim for c in comps)}, expected {pair.dim}")
    return comps


@dataclass
class IsotropyReport:
    entries: list = field(default_factory=list)   # (label, isotropic, paired)

    @property
    def passed(self) -> bool:
        return all(iso and paired for _, iso, paired in self.entries)


def _pairing(G: Matrix, A: list, B: list) -> Matrix:
    if not A or not B:
        return Matrix([[] for _ in A], cols=len(B))
    return Matrix.from_columns(A).T @ G @ Matrix.from_columns(B)


def isotropy_check(pair: SpacePair, f: PolyFactorization) -> IsotropyReport:
    """Null-subspace certificates for the mu != 0 and a != 0 factors.

    Each half ker(J - mu)^m, ker(J + mu)^m (and the two quadratic kernels for
    complex factors) must be totally isotropic, and the two halves must pair
    nondegenerately.
    """
    ctx = pair.ctx
    J, G = pair.op, pair.gram
    scale = max(G.max_abs(), 1.0)
    report = IsotropyReport()
    halves = []
    for mu, m in f.real_factors:
        halves.append((f"real mu={mu}", _poly(ctx, [-mu, 1]) ** m, _poly(ctx, [mu, 1]) ** m))
    for a, b, k in f.complex_factors:
        c = a * a + b * b
        halves.append((f"complex a={a} b={b}", _poly(ctx, [c, -2 * a, 1]) ** k,
                       _poly(ctx, [c, 2 * a, 1]) ** k))
    for label, minus, plus in halves:
        K1 = la.polynomial_kernel(J, minus, ctx)
        K2 = la.polynomial_kernel(J, plus, ctx)
        iso = all(_pairing(G, K, K).is_zero(ctx, scale) for K in (K1, K2))
        P = _pairing(G, K1, K2)
        paired = len(K1) == len(K2) and len(K1) > 0 and la.rank(P, ctx) == len(K1)
        report.entries.append((label, iso, paired))
    return report
