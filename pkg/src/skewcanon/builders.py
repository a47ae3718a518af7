"""Chain bases inside each primary component and the canonicalize driver.

Every builder repeats one step until its component is exhausted: pick a
vector of maximal height, pair it (with a dual vector from the opposite null
half, or with itself), apply triangular corrections so that only the
top-to-bottom pairing survives, split the chain's span off and continue on
its G-orthogonal complement.

Corrections are solved level by level.  At level m the residual pairing at
height r-1-m only depends on correction coefficients of index <= m, and the
index-m coefficient enters linearly through the (already normalized) top
pairing, so each coefficient is a single division.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg as la
from .blocks import (BasisChange, CanonicalForm, ComplexQuad, ImaginaryChain, NilpotentEven,
                     NilpotentOdd, RealChain, block_key, block_matrices, canonical_matrices)
from .decomposition import PrimaryComponent, primary_components
from .errors import InputError, NumericalFailure
from .linalg import Matrix, ScalarContext
from .space import SpacePair, Subspace, orthogonal_complement, restrict_pair
from .spectral import factorize


# small helpers ------------------------------------------------------------

def _chain(N: Matrix, x: list, r: int) -> list[list]:
    out = [x]
    for _ in range(r - 1):
        out.append(N @ out[-1])
    return out


def _form(G: Matrix, x, y):
    return la.bilinear(G, x, y)


def _herm(G: Matrix, x, y):
    """H(x, y) = <x, conj(y)>."""
    return la.bilinear(G, x, la.conj_vec(y))


def _nonzero(ctx: ScalarContext, x, scale: float) -> bool:
    return not ctx.is_zero(x, scale)


def _unit(i: int, n: int, ctx: ScalarContext) -> list:
    one, zero = ctx.scalar(1), ctx.scalar(0)
    return [one if k == i else zero for k in range(n)]


def _height(N: Matrix, X: list[list], ctx: ScalarContext) -> tuple[int, list[list]]:
    """Largest height r of the vectors X under N, and N^(r-1) X."""
    norm = max(N.norm_inf(), 1.0)
    base = max((la.vec_max_abs(x) for x in X), default=0.0) * max(N.rows, 1)
    cur = [list(x) for x in X]
    r = 0
    prev = cur
    while True:
        scale = base * norm ** r
        if all(ctx.is_zero(la.vec_max_abs(x), scale) for x in cur) or not cur:
            return r, prev
        if r > N.rows:
            raise NumericalFailure("NumericalFailure: operator is not nilpotent on the "
                                   "component")
        prev = cur
        cur = [N @ x for x in cur]
        r += 1


def _power_kernel(N: Matrix, m: int, ctx: ScalarContext) -> list[list]:
    return la.kernel_basis(la.matrix_power(N, m, ctx), ctx, N.norm_inf() ** m)


def _pick(values: list, ctx: ScalarContext, scale: float) -> int | None:
    """First index with a nonzero value (exact) or the largest one (float)."""
    if ctx.exact:
        return next((i for i, v in enumerate(values) if v != 0), None)
    mags = [abs(complex(v)) for v in values]
    i = int(np.argmax(mags)) if mags else None
    if i is None or ctx.is_zero(mags[i], scale):
        return None
    return i


def _first_nonzero(z: list, ctx: ScalarContext):
    if ctx.exact:
        return next(c for c in z if c != 0)
    mags = [abs(c) for c in z]
    return z[int(np.argmax(mags))]


def _as_real(x, ctx: ScalarContext):
    if ctx.exact:
        return x.re if isinstance(x, la.Gaussian) else x
    return float(np.real(x))


def _complex_scalar(re, im, ctx: ScalarContext):
    if ctx.exact:
        return la.Gaussian(re, im)
    return complex(re, im)


def _fail(ctx: ScalarContext, msg: str):
    if ctx.exact:
        raise AssertionError(msg)
    raise NumericalFailure(f"NumericalFailure: {msg}")


# per-kind chain extraction ------------------------------------------------

def _real_chain(P: SpacePair, mu, m: int):
    ctx = P.ctx
    J, G = P.op, P.gram
    N = la.shifted(J, mu)
    M = la.shifted(J, -mu)
    W1 = _power_kernel(N, m, ctx)
    W2 = _power_kernel(M, m, ctx)
    r, tops = _height(N, W1, ctx)
    gscale = max(G.max_abs(), 1e-300)
    i = _pick([la.vec_max_abs(t) for t in tops], ctx, 0.0)
    v, top = W1[i], tops[i]
    j = _pick([_form(G, top, w) for w in W2], ctx, gscale * la.vec_max_abs(top))
    if j is None:
        _fail(ctx, "no dual vector pairs with the top of the real chain")
    w = la.scale_vec(1 / _form(G, top, W2[j]), W2[j])
    powers = _chain(N, v, r)
    for lvl in range(1, r):
        resid = _form(G, _chain(N, v, r - lvl)[-1], w)
        v = la.sub_vec(v, la.scale_vec(resid, powers[lvl]))
    cols = _chain(N, v, r) + _chain(M, w, r)
    return RealChain(mu, r), cols, None


def _complex_chain(P: SpacePair, a, b, k: int):
    ctx = P.ctx
    J, G = la.complexify(P.op, ctx), P.gram
    lam = _complex_scalar(a, b, ctx)
    N = la.shifted(J, lam)
    M = la.shifted(J, -lam)
    E1 = _power_kernel(N, k, ctx)
    E2 = _power_kernel(M, k, ctx)
    r, tops = _height(N, E1, ctx)
    gscale = max(G.max_abs(), 1e-300)
    i = _pick([la.vec_max_abs(t) for t in tops], ctx, 0.0)
    z, top = E1[i], tops[i]
    j = _pick([_form(G, top, y) for y in E2], ctx, gscale * la.vec_max_abs(top))
    if j is None:
        _fail(ctx, "no dual vector pairs with the top of the complex chain")
    y = la.scale_vec(2 / _form(G, top, E2[j]), E2[j])
    powers = _chain(N, z, r)
    for lvl in range(1, r):
        resid = _form(G, _chain(N, z, r - lvl)[-1], y)
        z = la.sub_vec(z, la.scale_vec(resid / 2, powers[lvl]))
    c = _first_nonzero(z, ctx)
    z = la.scale_vec(1 / c, z)
    y = la.scale_vec(c, y)
    cols = []
    for vec in _chain(N, z, r):
        cols += [la.real_vec(vec), la.imag_vec(vec)]
    for vec in _chain(M, y, r):
        cols += [la.real_vec(vec), la.imag_vec(vec)]
    if not ctx.exact:
        cols = [[float(x) for x in col] for col in cols]
    return ComplexQuad(a, b, r), cols, None


def _self_paired_start(G: Matrix, Q: Matrix, ctx: ScalarContext):
    """Cyclic vector v with <v, Q^(r-1) v> != 0, repaired by v <- v + w if needed."""
    n = Q.rows
    basis = [_unit(i, n, ctx) for i in range(n)]
    r, tops = _height(Q, basis, ctx)
    gscale = max(G.max_abs(), 1e-300)
    i = _pick([la.vec_max_abs(t) for t in tops], ctx, 0.0)
    v, top = basis[i], tops[i]
    cross = [_form(G, w, top) for w in basis]
    cross_scale = max((abs(float(c)) for c in cross), default=0.0)
    self_pair = _form(G, v, top)
    vanishes = self_pair == 0 if ctx.exact else abs(self_pair) < 1e-3 * cross_scale
    if vanishes:
        j = _pick(cross, ctx, gscale * la.vec_max_abs(top))
        if j is None:
            _fail(ctx, "top of the self-paired chain is orthogonal to everything")
        w = basis[j]
        w_top = la.matrix_power(Q, r - 1, ctx) @ w
        w_self = _form(G, w, w_top)
        keep_w = w_self != 0 if ctx.exact else abs(w_self) >= 1e-3 * cross_scale
        v = w if keep_w else la.add_vec(v, w)
    return r, v


def _imaginary_chain(P: SpacePair, lam):
    ctx = P.ctx
    G = P.gram
    Q = P.op @ P.op
    for i in range(Q.rows):
        Q.data[i][i] = Q.data[i][i] + lam * lam
    r, v = _self_paired_start(G, Q, ctx)
    iunit = la.imaginary_unit(ctx)
    Jc = la.complexify(P.op, ctx)
    N = la.shifted(Jc, iunit * lam)
    Nplus = la.shifted(Jc, -(iunit * lam))
    z = list(la.complexify(Matrix.from_columns([v]), ctx).column(0))
    for _ in range(r):
        z = Nplus @ z
    powers = _chain(N, z, r)
    g = _herm(G, powers[-1], z)
    for lvl in range(1, r):
        resid = _herm(G, _chain(N, z, r - lvl)[-1], z)
        alpha = resid / (2 * g)
        if not ctx.exact:
            alpha = complex(alpha.real, 0.0) if lvl % 2 == 0 else complex(0.0, alpha.imag)
        z = la.sub_vec(z, la.scale_vec(alpha, powers[lvl]))
    z = la.scale_vec(1 / _first_nonzero(z, ctx), z)
    chain = _chain(N, z, r)
    kappa = _herm(G, chain[-1], z)
    t = kappa.real if r % 2 == 1 else kappa.imag
    if ctx.exact:
        t = Fraction(t)
    else:
        t = float(t)
    if ctx.is_zero(t, max(G.max_abs(), 1e-300)):
        _fail(ctx, "imaginary chain has vanishing top pairing")
    sign = 1 if t > 0 else -1
    rho = abs(t) / 2
    cols = []
    for vec in chain:
        cols += [la.real_vec(vec), la.imag_vec(vec)]
    if not ctx.exact:
        cols = [[float(x) for x in col] for col in cols]
    return ImaginaryChain(lam, r, sign), cols, rho


def _nilpotent_chain(P: SpacePair):
    ctx = P.ctx
    J, G = P.op, P.gram
    n = J.rows
    basis = [_unit(i, n, ctx) for i in range(n)]
    r, _ = _height(J, basis, ctx)
    if r % 2 == 1:
        r, v = _self_paired_start(G, J, ctx)
        powers = _chain(J, v, r)
        g = _form(G, powers[-1], v)
        for lvl in range(2, r, 2):
            resid = _form(G, _chain(J, v, r - lvl)[-1], v)
            v = la.sub_vec(v, la.scale_vec(resid / (2 * g), powers[lvl]))
        cols = _chain(J, v, r)
        g = _form(G, cols[-1], v)
        return NilpotentOdd(r, 1 if g > 0 else -1), cols, abs(g)
    r, tops = _height(J, basis, ctx)
    gscale = max(G.max_abs(), 1e-300)
    i = _pick([la.vec_max_abs(t) for t in tops], ctx, 0.0)
    v, top = basis[i], tops[i]
    j = _pick([_form(G, top, w) for w in basis], ctx, gscale * la.vec_max_abs(top))
    if j is None:
        _fail(ctx, "no partner for the even nilpotent chain")
    w = la.scale_vec(1 / _form(G, top, basis[j]), basis[j])
    vp, wp = _chain(J, v, r), _chain(J, w, r)
    for lvl in range(1, r):
        h = r - 1 - lvl
        cv, cw = _chain(J, v, h + 1)[-1], _chain(J, w, h + 1)[-1]
        r_dual = _form(G, cv, w)
        dv = la.scale_vec(-r_dual, vp[lvl])
        dw = None
        if lvl % 2 == 1:
            r_v = _form(G, cv, v)
            r_w = _form(G, cw, w)
            dv = la.add_vec(dv, la.scale_vec(r_v / 2, wp[lvl]))
            dw = la.scale_vec(-r_w / 2, vp[lvl])
        v = la.add_vec(v, dv)
        if dw is not None:
            w = la.add_vec(w, dw)
    return NilpotentEven(r), _chain(J, v, r) + _chain(J, w, r), None


def _extract(comp: PrimaryComponent, P: SpacePair):
    if comp.kind == "real":
        return _real_chain(P, comp.params[0], comp.exponent)
    if comp.kind == "complex":
        return _complex_chain(P, comp.params[0], comp.params[1], comp.exponent)
    if comp.kind == "imaginary":
        return _imaginary_chain(P, comp.params[0])
    return _nilpotent_chain(P)


def _check_chain(P: SpacePair, block, cols, rho):
    """The chain must carry the canonical Gram (scaled by rho) and operator."""
    ctx = P.ctx
    B = Matrix.from_columns(cols)
    C, Gc = block_matrices(block, ctx)
    if rho is not None:
        Gc = Gc.scale(rho)
    gram = B.T @ P.gram @ B
    act = P.op @ B - B @ C
    scale = max(P.gram.max_abs(), 1.0) * max(B.max_abs(), 1.0) ** 2
    if not (gram - Gc).is_zero(ctx, 1e3 * scale) or \
            not act.is_zero(ctx, 1e3 * max(P.op.max_abs(), 1.0) * max(B.max_abs(), 1.0)):
        _fail(ctx, f"chain for {block} does not satisfy its canonical identities")


def _balance(cols: list) -> list:
    """Rescale the halves v -> t v, w -> w / t of a chain pair to equal size.

    C and G_c are invariant under this, and leaving it free can make the
    float basis arbitrarily ill-conditioned.
    """
    half = len(cols) // 2
    nv = np.linalg.norm(np.array(cols[:half], dtype=complex))
    nw = np.linalg.norm(np.array(cols[half:], dtype=complex))
    if nv == 0 or nw == 0:
        return cols
    t = float(np.sqrt(nw / nv))
    return [la.scale_vec(t, c) for c in cols[:half]] + [la.scale_vec(1 / t, c) for c in cols[half:]]


def _run_builder(comp: PrimaryComponent):
    """Blocks, ambient chain columns and scales of one primary component."""
    P = comp.restricted
    ctx = P.ctx
    basis_map = comp.subspace.matrix()
    out = []
    for _ in range(comp.dim + 1):
        if P.dim == 0:
            return out
        block, cols, rho = _extract(comp, P)
        _check_chain(P, block, cols, rho)
        ambient = [basis_map @ c for c in cols]
        if not ctx.exact and rho is None:
            ambient = _balance(ambient)
        out.append((block, ambient, rho))
        if P.dim == block.dim:
            return out
        try:
            N = orthogonal_complement(P, Subspace(P.dim, cols))
            P = restrict_pair(P, N)
        except InputError as exc:
            _fail(ctx, f"splitting off a chain failed ({exc})")
        basis_map = basis_map @ N.matrix()
    _fail(ctx, "chain extraction did not terminate")


def build_complex_component(comp: PrimaryComponent):
    return _run_builder(comp)


def build_imaginary_component(comp: PrimaryComponent):
    return _run_builder(comp)


def build_real_component(comp: PrimaryComponent):
    return _run_builder(comp)


def build_nilpotent_component(comp: PrimaryComponent):
    return _run_builder(comp)


_BUILDERS = {"complex": build_complex_component, "imaginary": build_imaginary_component,
             "real": build_real_component, "nilpotent": build_nilpotent_component}


def effective_basis(form: CanonicalForm, basis: BasisChange) -> Matrix:
    """Float matrix P = rational_part . D (D = 1/sqrt(rho) per column)."""
    R = basis.rational_part.to_numpy().astype(float)
    d = np.array([1 / np.sqrt(float(rho)) for rho in basis.column_scales(form)])
    return la.matrix_from_numpy(R * d[None, :])


def _float_residuals(pair: SpacePair, form: CanonicalForm, basis: BasisChange):
    P = effective_basis(form, basis).to_numpy()
    C, Gc = (m.to_numpy() for m in canonical_matrices(form, la.FLOAT))
    J, G = pair.op.to_numpy(), pair.gram.to_numpy()
    conj = np.abs(np.linalg.solve(P, J @ P) - C).max()
    cong = np.abs(P.T @ G @ P - Gc).max()
    return float(conj), float(cong)


def canonicalize(pair: SpacePair) -> tuple[CanonicalForm, BasisChange]:
    """Canonical block decomposition of (G, J) with its change of basis."""
    ctx = pair.ctx
    f = factorize(pair)
    comps = primary_components(pair, f)
    pieces = []
    for comp in comps:
        pieces.extend(_BUILDERS[comp.kind](comp))
    pieces.sort(key=lambda p: block_key(p[0]))
    blocks = [p[0] for p in pieces]
    columns = [c for p in pieces for c in p[1]]
    scales = [p[2] for p in pieces if p[2] is not None]
    form = CanonicalForm(blocks, pair.dim)
    basis = BasisChange(Matrix.from_columns(columns), scales)
    if not ctx.exact:
        conj, cong = _float_residuals(pair, form, basis)
        jn = max(pair.op.norm_inf(), 1e-300)
        gn = max(pair.gram.norm_inf(), 1e-300)
        if conj > 1e-8 * jn or cong > 1e-8 * gn:
            raise NumericalFailure(f"NumericalFailure: canonical identities off by "
                                   f"{conj:.2e} (conjugacy), {cong:.2e} (congruence)")
    return form, basis
