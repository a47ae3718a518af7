"""Acceptance suite: one test per criterion, each printing a PASS or FAIL line."""
import json
import time
from pathlib import Path

import numpy as np
import pytest

from skewcanon import io
from skewcanon import linalg as la
from skewcanon.blocks import (CanonicalForm, ComplexQuad, ImaginaryChain, NilpotentEven,
                              NilpotentOdd, RealChain, canonical_matrices)
from skewcanon.builders import canonicalize
from skewcanon.decomposition import isotropy_check
from skewcanon.errors import NumericalFailure
from skewcanon.linalg import EXACT, FLOAT, Polynomial
from skewcanon.oracle import (GeneratorSpec, canonical_pair, compare_forms, generate_pair,
                              random_blocks, verify_report)
from skewcanon.space import SpacePair
from skewcanon.spectral import factorize, minimal_polynomial

GOLDEN = Path(__file__).parent / "golden"
EXACT_CASES = 500
FLOAT_CASES = 500
RIEMANNIAN_CASES = 100


def _exact_spec(i):
    rng = np.random.default_rng(10_000 + i)
    return GeneratorSpec(random_blocks(rng, max_dim=12), "unimodular", seed=i, entry_bound=3)


@pytest.fixture(scope="module")
def exact_runs():
    runs = []
    for i in range(EXACT_CASES):
        spec = _exact_spec(i)
        pair, _ = generate_pair(spec)
        t = time.perf_counter()
        try:
            form, basis = canonicalize(pair)
            err = None
        except Exception as exc:    # recorded, reported as a failure below
            form = basis = None
            err = exc
        runs.append((spec, pair, form, basis, time.perf_counter() - t, err))
    return runs


def test_criterion_1_exact_round_trip(exact_runs, record):
    bad = [(s.blocks, e) for s, _, f, _, _, e in exact_runs
           if e is not None or f.blocks != CanonicalForm(s.blocks).blocks]
    worst = max(dt for *_, dt, _ in exact_runs)
    ok = not bad and worst < 2.0
    record(1, ok, f"{EXACT_CASES - len(bad)}/{EXACT_CASES} recovered, slowest {worst:.2f}s")
    assert not bad, bad[:3]
    assert worst < 2.0


def _exact_identities(pair, form, basis):
    # P = R D with D^2 = diag(1/rho) constant on each block, so D commutes
    # with C: check J R = R C and R^T G R = D^-2 G_c without square roots
    C, Gc = canonical_matrices(form)
    R = basis.rational_part
    inv_d2 = basis.column_scales(form)
    conj = la.determinant(R) != 0 and pair.op @ R == R @ C
    scaled = la.Matrix([[inv_d2[i] * Gc[i, j] for j in range(form.dim)] for i in range(form.dim)])
    cong = R.T @ pair.gram @ R == scaled
    return conj and cong


def test_criterion_2_exact_identities(exact_runs, record):
    done = [r for r in exact_runs if r[5] is None]
    bad = [s.blocks for s, p, f, b, _, _ in done if not _exact_identities(p, f, b)]
    residual = [verify_report(p, f, b) for _, p, f, b, _, _ in done]
    nonzero = sum(1 for r in residual if r.conjugacy_residual or r.congruence_residual)
    ok = len(done) == EXACT_CASES and not bad and nonzero == 0
    record(2, ok, f"{len(done) - len(bad)}/{EXACT_CASES} exact identities, "
                  f"{nonzero} nonzero residuals")
    assert ok, bad[:3]


def _stable_exponent(J, p):
    h, last = 0, 0
    while True:
        size = len(la.polynomial_kernel(J, p ** (h + 1), EXACT))
        if size == last:
            return h
        h, last = h + 1, size


def _paired_exponents(pair):
    f = factorize(pair)
    J = pair.op
    for mu, _ in f.real_factors:
        if _stable_exponent(J, Polynomial([-mu, 1])) != _stable_exponent(J, Polynomial([mu, 1])):
            return False
    for a, b, _ in f.complex_factors:
        c = a * a + b * b
        if _stable_exponent(J, Polynomial([c, -2 * a, 1])) != \
                _stable_exponent(J, Polynomial([c, 2 * a, 1])):
            return False
    return True


def _expected_minpoly(form):
    top = {}
    for b in form.blocks:
        if isinstance(b, ComplexQuad):
            c = b.a * b.a + b.b * b.b
            key = Polynomial([c, -2 * b.a, 1]) * Polynomial([c, 2 * b.a, 1])
        elif isinstance(b, ImaginaryChain):
            key = Polynomial([b.lam * b.lam, 0, 1])
        elif isinstance(b, RealChain):
            key = Polynomial([-b.mu * b.mu, 0, 1])
        else:
            key = Polynomial([0, 1])
        key = key.coefficients
        top[key] = max(top.get(key, 0), b.r)
    p = Polynomial([1])
    for coeffs, k in top.items():
        p = p * Polynomial(list(coeffs)) ** k
    return p


def test_criterion_5_structure(exact_runs, record):
    done = [r for r in exact_runs if r[5] is None]
    counts = dict.fromkeys("abcd", 0)
    for spec, pair, form, basis, _, _ in done:
        counts["a"] += isotropy_check(pair, factorize(pair)).passed
        counts["b"] += _paired_exponents(pair)
        emitted = minimal_polynomial(canonical_pair(form))
        counts["c"] += emitted == _expected_minpoly(form) == minimal_polynomial(pair)
        _, Gc = canonical_matrices(form)
        counts["d"] += la.signature(Gc) == la.signature(pair.gram)
    detail = ", ".join(f"({k}) {v}/{EXACT_CASES}" for k, v in counts.items())
    ok = all(v == EXACT_CASES for v in counts.values())
    record(5, ok, detail)
    assert ok


def _within(pair, form, basis):
    # relative to |J|; a zero J leaves nothing to scale the Gram residual by,
    # so that one case falls back to |G|
    rep = verify_report(pair, form, basis)
    bound = 1e-8 * pair.op.norm_inf()
    gram_bound = bound or 1e-8 * pair.gram.norm_inf()
    return rep.conjugacy_residual <= bound and rep.congruence_residual <= gram_bound, rep


def test_criterion_3_float_robustness(record):
    good, aborted, zero_op, wrong = 0, 0, 0, []
    for i in range(FLOAT_CASES):
        rng = np.random.default_rng(20_000 + i)
        blocks = random_blocks(rng, max_dim=12, mode="float", separation=0.1)
        spec = GeneratorSpec(blocks, "random_invertible", seed=i, mode="float")
        pair, _ = generate_pair(spec)
        zero_op += pair.op.norm_inf() == 0
        try:
            form, basis = canonicalize(pair)
        except NumericalFailure:
            aborted += 1
            continue
        within, rep = _within(pair, form, basis)
        if within and compare_forms(form, CanonicalForm(blocks), FLOAT):
            good += 1
        else:
            wrong.append((blocks, form.blocks, rep.conjugacy_residual, rep.congruence_residual))
    ok = not wrong and good >= 0.99 * FLOAT_CASES
    record(3, ok, f"{good}/{FLOAT_CASES} recovered, {aborted} NumericalFailure, "
                  f"{len(wrong)} silent wrong, {zero_op} with J = 0")
    assert not wrong, wrong[:3]
    assert good >= 0.99 * FLOAT_CASES


def test_criterion_4_riemannian(record):
    rng = np.random.default_rng(4)
    bad = []
    for i in range(RIEMANNIAN_CASES):
        n = int(rng.integers(1, 11))
        A = rng.standard_normal((n, n))
        G = np.eye(n) if i % 4 == 0 else A.T @ A + np.eye(n)
        K = rng.standard_normal((n, n))
        J = np.linalg.solve(G, K - K.T)
        pair = SpacePair(n, la.matrix_from_numpy(G), la.matrix_from_numpy(J), FLOAT)
        try:
            form, basis = canonicalize(pair)
        except NumericalFailure as exc:
            bad.append((i, str(exc)))
            continue
        allowed = all(b.r == 1 and b.sign == 1 and isinstance(b, (ImaginaryChain, NilpotentOdd))
                      for b in form.blocks)
        if not (allowed and verify_report(pair, form, basis).passed):
            bad.append((i, form.blocks))
    ok = not bad
    record(4, ok, f"{RIEMANNIAN_CASES - len(bad)}/{RIEMANNIAN_CASES} only positive simple blocks")
    assert ok, bad[:3]


GOLDEN_BLOCKS = {
    "complex_1_2_1": ComplexQuad(1, 2, 1),
    "imaginary_1_1_plus": ImaginaryChain(1, 1, 1),
    "imaginary_1_1_minus": ImaginaryChain(1, 1, -1),
    "real_2_1": RealChain(2, 1),
    "nilpotent_even_2": NilpotentEven(2),
    "nilpotent_odd_3_plus": NilpotentOdd(3, 1),
}


def _golden_ok(name, block):
    pair_text = (GOLDEN / f"{name}.pair.json").read_text(encoding="utf-8")
    report_text = (GOLDEN / f"{name}.report.json").read_text(encoding="utf-8")
    pair = io.pair_from_dict(json.loads(pair_text))
    if io.dumps(io.pair_to_dict(canonical_pair(CanonicalForm([block])))) != pair_text:
        return "pair bytes differ"
    form, basis = canonicalize(pair)
    text = io.dumps(io.report_to_dict(form, basis, EXACT, verify_report(pair, form, basis)))
    if text != report_text:
        return "report bytes differ"
    stored, _, _ = io.report_from_dict(json.loads(report_text))
    again, again_basis = canonicalize(canonical_pair(stored))
    if again != stored or again.blocks != (block,):
        return "not idempotent"
    if again_basis.rational_part != la.Matrix.identity(block.dim):
        return "canonical input moved"
    return None


def test_criterion_6_golden_fixtures(record):
    problems = {name: why for name, block in GOLDEN_BLOCKS.items()
                if (why := _golden_ok(name, block))}
    ok = not problems
    record(6, ok, f"{len(GOLDEN_BLOCKS) - len(problems)}/{len(GOLDEN_BLOCKS)} fixtures byte-exact "
                  f"and idempotent")
    assert ok, problems
