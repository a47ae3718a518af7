"""Canonical block types and their model matrices.

Basis order inside a block:

* ComplexQuad    u1, v1, ..., ur, vr, w1, x1, ..., wr, xr
* ImaginaryChain u1, v1, ..., ur, vr
* RealChain      v1, ..., vr, w1, ..., wr
* NilpotentEven  v1, ..., vr, w1, ..., wr
* NilpotentOdd   v1, ..., vr

Every chain is a *lower* Jordan chain: the operator sends the h-th vector to
the (h+1)-th one plus the diagonal part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .linalg import EXACT, Matrix, ScalarContext


@dataclass(frozen=True)
class ComplexQuad:
    a: object
    b: object
    r: int
    kind = "complex"

    @property
    def dim(self) -> int:
        return 4 * self.r

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.r >= 1):
            raise ValueError(f"invalid ComplexQuad{(self.a, self.b, self.r)}")


@dataclass(frozen=True)
class ImaginaryChain:
    lam: object
    r: int
    sign: int
    kind = "imaginary"

    @property
    def dim(self) -> int:
        return 2 * self.r

    def __post_init__(self):
        if not (self.lam > 0 and self.r >= 1 and self.sign in (1, -1)):
            raise ValueError(f"invalid ImaginaryChain{(self.lam, self.r, self.sign)}")


@dataclass(frozen=True)
class RealChain:
    mu: object
    r: int
    kind = "real"

    @property
    def dim(self) -> int:
        return 2 * self.r

    def __post_init__(self):
        if not (self.mu > 0 and self.r >= 1):
            raise ValueError(f"invalid RealChain{(self.mu, self.r)}")


@dataclass(frozen=True)
class NilpotentEven:
    r: int
    kind = "nilpotent_even"

    @property
    def dim(self) -> int:
        return 2 * self.r

    def __post_init__(self):
        if not (self.r >= 2 and self.r % 2 == 0):
            raise ValueError(f"NilpotentEven needs an even length >= 2, got {self.r}")


@dataclass(frozen=True)
class NilpotentOdd:
    r: int
    sign: int
    kind = "nilpotent_odd"

    @property
    def dim(self) -> int:
        return self.r

    def __post_init__(self):
        if not (self.r >= 1 and self.r % 2 == 1 and self.sign in (1, -1)):
            raise ValueError(f"invalid NilpotentOdd{(self.r, self.sign)}")


CanonicalBlock = Union[ComplexQuad, ImaginaryChain, RealChain, NilpotentEven, NilpotentOdd]
SELF_PAIRED = (ImaginaryChain, NilpotentOdd)


def block_key(block: CanonicalBlock) -> tuple:
    """Sort key: complex by (a, b), imaginary by lambda, real by mu, then nilpotent."""
    if isinstance(block, ComplexQuad):
        return (0, float(block.a), float(block.b), -block.r, 0)
    if isinstance(block, ImaginaryChain):
        return (1, float(block.lam), 0.0, -block.r, -block.sign)
    if isinstance(block, RealChain):
        return (2, float(block.mu), 0.0, -block.r, 0)
    if isinstance(block, NilpotentEven):
        return (3, 0.0, 0.0, -block.r, 0)
    return (3, 0.0, 0.0, -block.r, -block.sign)


@dataclass(frozen=True)
class CanonicalForm:
    blocks: tuple
    dim: int

    def __init__(self, blocks: Sequence[CanonicalBlock], dim: int | None = None):
        blocks = tuple(sorted(blocks, key=block_key))
        total = sum(b.dim for b in blocks)
        if dim is not None and dim != total:
            raise ValueError(f"block dimensions sum to {total}, expected {dim}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "dim", total)


@dataclass(frozen=True)
class BasisChange:
    """P = rational_part . D, D = diag of 1/sqrt(rho) on self-paired chains.

    ``chain_scales`` holds one rho per self-paired block, in block order.
    """

    rational_part: Matrix
    chain_scales: tuple

    def __init__(self, rational_part: Matrix, chain_scales: Sequence = ()):
        object.__setattr__(self, "rational_part", rational_part)
        object.__setattr__(self, "chain_scales", tuple(chain_scales))

    def column_scales(self, form: CanonicalForm) -> list:
        """rho for every column (1 outside self-paired chains)."""
        out = []
        scales = iter(self.chain_scales)
        for b in form.blocks:
            rho = next(scales) if isinstance(b, SELF_PAIRED) else 1
            out.extend([rho] * b.dim)
        return out


def _zeros(n, ctx):
    return Matrix.zeros(n, n, ctx).data


def block_matrices(block: CanonicalBlock, ctx: ScalarContext = EXACT) -> tuple[Matrix, Matrix]:
    """(C, G_c) of one canonical block."""
    one = ctx.scalar(1)
    n = block.dim
    C, G = _zeros(n, ctx), _zeros(n, ctx)
    r = block.r

    def sgn(j):
        return one if (j - 1) % 2 == 0 else -one

    if isinstance(block, ComplexQuad):
        a, b = ctx.scalar(block.a), ctx.scalar(block.b)
        for h in range(1, r + 1):
            u, v = 2 * (h - 1), 2 * (h - 1) + 1
            w, x = 2 * r + u, 2 * r + v
            C[u][u], C[v][u] = a, -b
            C[u][v], C[v][v] = b, a
            C[w][w], C[x][w] = -a, b
            C[w][x], C[x][x] = -b, -a
            if h < r:
                C[u + 2][u] = C[v + 2][v] = C[w + 2][w] = C[x + 2][x] = one
            j = r + 1 - h
            wj, xj = 2 * r + 2 * (j - 1), 2 * r + 2 * (j - 1) + 1
            G[u][wj] = G[wj][u] = sgn(j)
            G[v][xj] = G[xj][v] = -sgn(j)
    elif isinstance(block, ImaginaryChain):
        lam = ctx.scalar(block.lam)
        eps = one * block.sign
        for h in range(1, r + 1):
            u, v = 2 * (h - 1), 2 * (h - 1) + 1
            C[v][u], C[u][v] = -lam, lam
            if h < r:
                C[u + 2][u] = C[v + 2][v] = one
            j = r + 1 - h
            uj, vj = 2 * (j - 1), 2 * (j - 1) + 1
            if r % 2 == 1:
                G[u][uj] = G[v][vj] = eps * sgn(j)
            else:
                G[v][uj] = eps * sgn(j)
                G[u][vj] = -eps * sgn(j)
    elif isinstance(block, (RealChain, NilpotentEven)):
        mu = ctx.scalar(block.mu) if isinstance(block, RealChain) else ctx.scalar(0)
        for i in range(r):
            C[i][i], C[r + i][r + i] = mu, -mu
            if i + 1 < r:
                C[i + 1][i] = C[r + i + 1][r + i] = one
            j = r - i
            G[i][r + j - 1] = G[r + j - 1][i] = sgn(j)
    elif isinstance(block, NilpotentOdd):
        eps = one * block.sign
        for i in range(r):
            if i + 1 < r:
                C[i + 1][i] = one
            j = r - i
            G[i][j - 1] = eps * sgn(j)
    else:
        raise TypeError(f"not a canonical block: {block!r}")
    return Matrix(C, cols=n), Matrix(G, cols=n)


def canonical_matrices(form: CanonicalForm, ctx: ScalarContext = EXACT) -> tuple[Matrix, Matrix]:
    """Block-diagonal canonical operator C and canonical Gram G_c."""
    pairs = [block_matrices(b, ctx) for b in form.blocks]
    return (Matrix.block_diag([p[0] for p in pairs], ctx),
            Matrix.block_diag([p[1] for p in pairs], ctx))


def _num(x) -> str:
    return str(x) if isinstance(x, (int, Fraction)) else f"{float(x):.12g}"


def format_block(block: CanonicalBlock) -> str:
    """Short label such as ``ImaginaryChain(2, 1, +1)``."""
    sign = lambda s: "+1" if s > 0 else "-1"   # noqa: E731
    if isinstance(block, ComplexQuad):
        args = [_num(block.a), _num(block.b), str(block.r)]
    elif isinstance(block, ImaginaryChain):
        args = [_num(block.lam), str(block.r), sign(block.sign)]
    elif isinstance(block, RealChain):
        args = [_num(block.mu), str(block.r)]
    elif isinstance(block, NilpotentEven):
        args = [str(block.r)]
    else:
        args = [str(block.r), sign(block.sign)]
    return f"{type(block).__name__}({', '.join(args)})"
