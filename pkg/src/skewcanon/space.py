"""Pairs (G, J) of a symmetric form and a skewadjoint operator, and subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import (InputError, DegenerateForm, DegenerateRestriction, NotInvariant, NotSkewadjoint,
                     NotSymmetric)
from .linalg import EXACT, Matrix, ScalarContext


@dataclass(frozen=True)
class SpacePair:
    dim: int
    gram: Matrix
    op: Matrix
    ctx: ScalarContext = field(default=EXACT, compare=False)


@dataclass(frozen=True)
class Subspace:
    ambient: int
    basis: tuple

    def __init__(self, ambient: int, basis: Sequence[Sequence]):
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", tuple(tuple(v) for v in basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        return Matrix.from_columns([list(v) for v in self.basis], rows=self.ambient) \
            if self.basis else Matrix([[] for _ in range(self.ambient)], cols=0)

    @classmethod
    def coordinates(cls, ambient: int, indices: Sequence[int], ctx: ScalarContext = EXACT):
        one, zero = ctx.scalar(1), ctx.scalar(0)
        return cls(ambient, [[one if i == k else zero for i in range(ambient)] for k in indices])


def _float_tol(ctx: ScalarContext) -> float:
    return 1e3 * ctx.rank_tolerance


def validate_pair(G: Matrix, J: Matrix, ctx: ScalarContext = EXACT) -> SpacePair:
    """Check G = G^T, det G != 0 and J^T G + G J = 0."""
    if G.rows != G.cols or J.rows != J.cols:
        raise InputError("InputError: gram and operator must be square")
    if G.rows != J.rows:
        raise InputError(f"InputError: dimension mismatch: gram is {G.rows}x{G.cols}, "
                         f"operator is {J.rows}x{J.cols}")
    n = G.rows
    if n == 0:
        raise InputError("InputError: dimension must be positive")
    for i in range(n):
        for j in range(i + 1, n):
            a, b = G.data[i][j], G.data[j][i]
            bad = a != b if ctx.exact else abs(a - b) > _float_tol(ctx) * max(G.max_abs(), 1e-300)
            if bad:
                raise NotSymmetric(f"NotSymmetric: gram[{i}][{j}] != gram[{j}][{i}]")
    if ctx.exact:
        if la.determinant(G) == 0:
            raise DegenerateForm("DegenerateForm: det(gram) = 0")
    elif la.kernel_basis(G, ctx):
        raise DegenerateForm("DegenerateForm: gram is numerically singular")
    S = J.T @ G + G @ J
    if ctx.exact:
        for i, row in enumerate(S.data):
            for j, a in enumerate(row):
                if a != 0:
                    raise NotSkewadjoint(f"NotSkewadjoint: (J^T G + G J)[{i}][{j}] = {a}")
    else:
        bound = _float_tol(ctx) * G.norm_inf() * max(J.norm_inf(), 1.0)
        if S.max_abs() > bound:
            raise NotSkewadjoint(f"NotSkewadjoint: ||J^T G + G J|| = {S.max_abs():.3e} "
                                 f"exceeds {bound:.3e}")
    return SpacePair(n, G, J, ctx)


def _express_in_basis(B: Matrix, targets: list, ctx: ScalarContext):
    """Coordinates of each target vector in the column basis B, or the index that fails."""
    d = B.cols
    if ctx.exact:
        data = [list(r) + [t[i] for t in targets] for i, r in enumerate(B.data)]
        pivots = la._rref(data, d + len(targets))
        if len(pivots) > d or (pivots and pivots[-1] >= d):
            bad = [p - d for p in pivots if p >= d]
            return None, bad[0]
        coords = []
        for k in range(len(targets)):
            x = [Fraction(0)] * d
            for i, p in enumerate(pivots):
                x[p] = data[i][d + k]
            coords.append(x)
        return coords, None
    b = B.to_numpy()
    t = np.array([[complex(v) if isinstance(v, complex) else float(v) for v in tv]
                  for tv in targets]).T
    x, *_ = np.linalg.lstsq(b, t, rcond=None)
    resid = np.abs(b @ x - t).max(axis=0)
    scale = _float_tol(ctx) * max(np.abs(b).max(), 1.0) * np.maximum(np.abs(t).max(axis=0), 1.0)
    for k in range(len(targets)):
        if resid[k] > 10 * scale[k] * max(1.0, np.abs(x[:, k]).max()):
            return None, k
    cast = complex if np.iscomplexobj(x) else float
    return [[cast(v) for v in x[:, k]] for k in range(len(targets))], None


def restrict_pair(pair: SpacePair, W: Subspace) -> SpacePair:
    """(G|_W, J|_W) in the coordinates of W's basis."""
    ctx = pair.ctx
    B = W.matrix()
    JB = pair.op @ B
    coords, bad = _express_in_basis(B, JB.columns(), ctx)
    if coords is None:
        raise NotInvariant(f"NotInvariant: J applied to basis column {bad} leaves the subspace")
    Jw = Matrix.from_columns(coords, rows=W.dim)
    Gw = B.T @ pair.gram @ B
    if ctx.exact:
        if la.determinant(Gw) == 0:
            raise DegenerateRestriction("DegenerateRestriction: restricted gram is singular")
    elif la.kernel_basis(Gw, ctx):
        raise DegenerateRestriction("DegenerateRestriction: restricted gram is numerically "
                                    "singular")
    if not ctx.exact:
        Gw = (Gw + Gw.T).scale(0.5)
    return SpacePair(W.dim, Gw, Jw, ctx)


def orthogonal_complement(pair: SpacePair, W: Subspace, check_invariant: bool = False) -> Subspace:
    """The G-orthogonal complement N of a nondegenerate W."""
    ctx = pair.ctx
    B = W.matrix()
    Gw = B.T @ pair.gram @ B
    degenerate = la.determinant(Gw) == 0 if ctx.exact else bool(la.kernel_basis(Gw, ctx))
    if W.dim and degenerate:
        raise DegenerateRestriction("DegenerateRestriction: subspace is degenerate")
    if W.dim == 0:
        return Subspace(pair.dim, Matrix.identity(pair.dim, ctx).columns())
    N = Subspace(pair.dim, la.kernel_basis(B.T @ pair.gram, ctx))
    if check_invariant and N.dim:
        coords, bad = _express_in_basis(N.matrix(), (pair.op @ N.matrix()).columns(), ctx)
        if coords is None:
            raise NotInvariant(f"NotInvariant: complement column {bad} is not J-invariant")
    return N
