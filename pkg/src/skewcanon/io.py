"""JSON files for pairs, generator specs and canonical reports.

Exact scalars are written as integers or ``"p/q"`` strings in lowest terms
(q > 0); floats use Python's shortest round-trip repr, so printing a parsed
exact file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .blocks import (BasisChange, CanonicalForm, ComplexQuad, ImaginaryChain, NilpotentEven,
                     NilpotentOdd, RealChain)
from .errors import FormatError
from .linalg import EXACT, FLOAT, Matrix, ScalarContext
from .oracle import GeneratorSpec, VerificationReport
from .space import SpacePair, validate_pair

MODES = ("exact", "float")


def context_for(mode: str, rank_tolerance: float | None = None,
                cluster_tolerance: float | None = None) -> ScalarContext:
    if mode not in MODES:
        raise FormatError(f"FormatError: mode must be 'exact' or 'float', got {mode!r}")
    if mode == "exact":
        return EXACT
    return ScalarContext("float",
                         FLOAT.rank_tolerance if rank_tolerance is None else rank_tolerance,
                         FLOAT.cluster_tolerance if cluster_tolerance is None else cluster_tolerance)


# scalars and matrices -------------------------------------------------------

def encode_scalar(x, ctx: ScalarContext):
    if ctx.exact:
        q = Fraction(x)
        return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return float(x)


def decode_scalar(v, ctx: ScalarContext, where: str = "value"):
    if isinstance(v, bool):
        raise FormatError(f"FormatError: {where} is a boolean")
    if ctx.exact:
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            try:
                return Fraction(v)
            except (ValueError, ZeroDivisionError):
                pass
        raise FormatError(f"FormatError: {where} = {v!r} is not an integer or 'p/q' string")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(Fraction(v))
        except (ValueError, ZeroDivisionError):
            pass
    raise FormatError(f"FormatError: {where} = {v!r} is not a number")


def encode_matrix(M: Matrix, ctx: ScalarContext) -> dict:
    return {"rows": M.rows, "cols": M.cols,
            "data": [[encode_scalar(x, ctx) for x in row] for row in M.data]}


def decode_matrix(obj, ctx: ScalarContext, name: str = "matrix") -> Matrix:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise FormatError(f"FormatError: {name} must be an object with rows, cols and data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(data, list) or len(data) != rows:
        raise FormatError(f"FormatError: {name}.data has {len(data) if isinstance(data, list) else 'no'} "
                          f"rows, expected {rows}")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"FormatError: {name}.data[{i}] does not have {cols} entries")
        out.append([decode_scalar(v, ctx, f"{name}.data[{i}][{j}]") for j, v in enumerate(row)])
    return Matrix(out, cols=cols)


def _mode_of(obj: dict, where: str) -> str:
    mode = obj.get("mode")
    if mode not in MODES:
        raise FormatError(f"FormatError: {where}.mode must be 'exact' or 'float'")
    return mode


# pairs ----------------------------------------------------------------------

def pair_to_dict(pair: SpacePair) -> dict:
    return {"mode": pair.ctx.mode,
            "gram": encode_matrix(pair.gram, pair.ctx),
            "operator": encode_matrix(pair.op, pair.ctx)}


def pair_from_dict(obj, ctx: ScalarContext | None = None, validate: bool = True) -> SpacePair:
    """Parse a PairFile object; ``ctx`` overrides the file's own mode."""
    if not isinstance(obj, dict):
        raise FormatError("FormatError: pair file must hold a JSON object")
    if ctx is None:
        ctx = context_for(_mode_of(obj, "pair"))
    G = decode_matrix(obj.get("gram"), ctx, "gram")
    J = decode_matrix(obj.get("operator"), ctx, "operator")
    if G.rows != G.cols or J.shape != G.shape:
        raise FormatError(f"FormatError: gram is {G.rows}x{G.cols} and operator is "
                          f"{J.rows}x{J.cols}; both must be the same square size")
    if validate:
        return validate_pair(G, J, ctx)
    return SpacePair(G.rows, G, J, ctx)


# blocks and reports ---------------------------------------------------------

def block_to_dict(block, ctx: ScalarContext) -> dict:
    enc = lambda x: encode_scalar(x, ctx)   # noqa: E731
    if isinstance(block, ComplexQuad):
        return {"type": "complex", "a": enc(block.a), "b": enc(block.b), "size": block.r}
    if isinstance(block, ImaginaryChain):
        return {"type": "imaginary", "lambda": enc(block.lam), "size": block.r, "sign": block.sign}
    if isinstance(block, RealChain):
        return {"type": "real", "mu": enc(block.mu), "size": block.r}
    if isinstance(block, NilpotentEven):
        return {"type": "nilpotent_even", "size": block.r}
    if isinstance(block, NilpotentOdd):
        return {"type": "nilpotent_odd", "size": block.r, "sign": block.sign}
    raise TypeError(f"not a canonical block: {block!r}")


_FIELDS = {
    "complex": {"a", "b"},
    "imaginary": {"lambda", "sign"},
    "real": {"mu"},
    "nilpotent_even": set(),
    "nilpotent_odd": {"sign"},
}


def block_from_dict(obj, ctx: ScalarContext, where: str = "block"):
    if not isinstance(obj, dict) or obj.get("type") not in _FIELDS:
        raise FormatError(f"FormatError: {where}.type must be one of {sorted(_FIELDS)}")
    kind = obj["type"]
    expected = _FIELDS[kind] | {"type", "size"}
    if set(obj) != expected:
        raise FormatError(f"FormatError: {where} ({kind}) needs exactly the fields "
                          f"{sorted(expected)}, got {sorted(obj)}")
    size, sign = obj["size"], obj.get("sign", 1)
    if not isinstance(size, int) or isinstance(size, bool) or sign not in (1, -1):
        raise FormatError(f"FormatError: {where} has a bad size or sign")
    dec = lambda key: decode_scalar(obj[key], ctx, f"{where}.{key}")   # noqa: E731
    try:
        if kind == "complex":
            return ComplexQuad(dec("a"), dec("b"), size)
        if kind == "imaginary":
            return ImaginaryChain(dec("lambda"), size, sign)
        if kind == "real":
            return RealChain(dec("mu"), size)
        if kind == "nilpotent_even":
            return NilpotentEven(size)
        return NilpotentOdd(size, sign)
    except ValueError as exc:
        raise FormatError(f"FormatError: {where}: {exc}") from None


def report_to_dict(form: CanonicalForm, basis: BasisChange, ctx: ScalarContext,
                   verification: VerificationReport | None = None) -> dict:
    out = {"mode": ctx.mode,
           "blocks": [block_to_dict(b, ctx) for b in form.blocks],
           "basis": {"rational": encode_matrix(basis.rational_part, ctx),
                     "chain_scales": [encode_scalar(x, ctx) for x in basis.chain_scales]}}
    if verification is not None:
        out["verification"] = verification.as_dict()
    return out


def report_from_dict(obj, ctx: ScalarContext | None = None) -> tuple[CanonicalForm, BasisChange, dict]:
    """(form, basis, stored verification fields) of a ReportFile object."""
    if not isinstance(obj, dict) or not isinstance(obj.get("blocks"), list):
        raise FormatError("FormatError: report must be an object with a blocks list")
    if ctx is None:
        ctx = context_for(_mode_of(obj, "report"))
    blocks = [block_from_dict(b, ctx, f"blocks[{i}]") for i, b in enumerate(obj["blocks"])]
    basis = obj.get("basis")
    if not isinstance(basis, dict) or not isinstance(basis.get("chain_scales"), list):
        raise FormatError("FormatError: report.basis needs rational and chain_scales")
    R = decode_matrix(basis.get("rational"), ctx, "basis.rational")
    scales = [decode_scalar(v, ctx, f"basis.chain_scales[{i}]")
              for i, v in enumerate(basis["chain_scales"])]
    form = CanonicalForm(blocks)
    n_self = sum(isinstance(b, (ImaginaryChain, NilpotentOdd)) for b in form.blocks)
    if R.shape != (form.dim, form.dim) or len(scales) != n_self:
        raise FormatError(f"FormatError: basis does not fit the blocks (dimension {form.dim}, "
                          f"{n_self} self-paired chains)")
    if [block_to_dict(b, ctx) for b in form.blocks] != obj["blocks"]:
        raise FormatError("FormatError: report blocks are not in canonical order")
    if any(s <= 0 for s in scales):
        raise FormatError("FormatError: chain scales must be positive")
    return form, BasisChange(R, scales), obj.get("verification", {})


# generator specs ------------------------------------------------------------

def spec_from_dict(obj, seed: int | None = None) -> GeneratorSpec:
    if not isinstance(obj, dict) or not isinstance(obj.get("blocks"), list):
        raise FormatError("FormatError: generator spec must be an object with a blocks list")
    mode = obj.get("mode", "exact")
    ctx = context_for(mode)
    blocks = [block_from_dict(b, ctx, f"blocks[{i}]") for i, b in enumerate(obj["blocks"])]
    try:
        return GeneratorSpec(blocks, obj.get("scramble", "identity"),
                             obj.get("seed", 0) if seed is None else seed,
                             obj.get("entry_bound", 3), obj.get("condition", 100.0), mode)
    except ValueError as exc:
        raise FormatError(f"FormatError: generator spec: {exc}") from None


def spec_to_dict(spec: GeneratorSpec) -> dict:
    return {"mode": spec.mode, "scramble": spec.scramble, "seed": spec.seed,
            "entry_bound": spec.entry_bound, "condition": spec.condition,
            "blocks": [block_to_dict(b, spec.ctx) for b in spec.blocks]}


# text -----------------------------------------------------------------------

def _render(obj, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_render(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        items = [inner + _render(x, depth + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(obj: dict) -> str:
    """Indented JSON with every flat list (a matrix row, say) on one line."""
    return _render(obj, 0) + "\n"


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"FormatError: {path}: invalid JSON at line {exc.lineno} "
                          f"column {exc.colno}") from None


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
