import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcanon import io
from skewcanon.blocks import CanonicalForm, ImaginaryChain, RealChain
from skewcanon.builders import canonicalize
from skewcanon.cli import main
from skewcanon.errors import FormatError, NotSymmetric
from skewcanon.linalg import EXACT, FLOAT, Matrix
from skewcanon.oracle import GeneratorSpec, generate_pair, random_blocks, verify_report


def _write(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


ROTATION = {"mode": "exact",
            "gram": {"rows": 2, "cols": 2, "data": [[1, 0], [0, 1]]},
            "operator": {"rows": 2, "cols": 2, "data": [[0, 2], [-2, 0]]}}


# scalars and files --------------------------------------------------------

def test_rationals_are_written_in_lowest_terms():
    assert io.encode_scalar(F(6, -4), EXACT) == "-3/2"
    assert io.encode_scalar(F(4, 2), EXACT) == 2
    assert io.decode_scalar("-3/2", EXACT) == F(-3, 2)
    assert io.encode_scalar(0.1, FLOAT) == 0.1


def test_exact_files_reject_floats():
    with pytest.raises(FormatError, match=r"gram.data\[0\]\[1\]"):
        io.decode_matrix({"rows": 1, "cols": 2, "data": [[1, 0.5]]}, EXACT, "gram")


def test_ragged_matrix_names_the_row():
    with pytest.raises(FormatError, match=r"operator.data\[1\]"):
        io.decode_matrix({"rows": 2, "cols": 2, "data": [[1, 0], [0]]}, EXACT, "operator")


def test_block_fields_are_checked_per_type():
    with pytest.raises(FormatError):
        io.block_from_dict({"type": "real", "mu": 2, "size": 1, "sign": 1}, EXACT)
    with pytest.raises(FormatError):
        io.block_from_dict({"type": "imaginary", "lambda": 2, "size": 1}, EXACT)
    assert io.block_from_dict({"type": "nilpotent_odd", "size": 3, "sign": -1}, EXACT).sign == -1


def test_invalid_pair_names_the_invariant():
    bad = dict(ROTATION, gram={"rows": 2, "cols": 2, "data": [[1, 1], [0, 1]]})
    with pytest.raises(NotSymmetric, match="NotSymmetric"):
        io.pair_from_dict(bad)


@given(st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_exact_pair_and_report_roundtrip_bit_exactly(seed):
    rng = np.random.default_rng(seed)
    spec = GeneratorSpec(random_blocks(rng, max_dim=8), "unimodular", seed=seed)
    pair, _ = generate_pair(spec)
    text = io.dumps(io.pair_to_dict(pair))
    again = io.pair_from_dict(json.loads(text))
    assert again.op == pair.op and again.gram == pair.gram
    assert io.dumps(io.pair_to_dict(again)) == text
    form, basis = canonicalize(pair)
    report = io.dumps(io.report_to_dict(form, basis, EXACT))
    f2, b2, _ = io.report_from_dict(json.loads(report))
    assert f2 == form and b2.rational_part == basis.rational_part
    assert b2.chain_scales == basis.chain_scales
    assert io.dumps(io.report_to_dict(f2, b2, EXACT)) == report
    assert io.spec_from_dict(json.loads(io.dumps(io.spec_to_dict(spec)))) == spec


def test_float_pair_roundtrip_keeps_every_bit():
    spec = GeneratorSpec([RealChain(0.7, 2)], "random_invertible", seed=3, mode="float")
    pair, _ = generate_pair(spec)
    again = io.pair_from_dict(json.loads(io.dumps(io.pair_to_dict(pair))))
    assert np.array_equal(again.op.to_numpy(), pair.op.to_numpy())


def test_out_of_order_report_is_rejected():
    form = CanonicalForm([RealChain(2, 1), ImaginaryChain(1, 1, 1)])
    obj = io.report_to_dict(form, io.BasisChange(Matrix.identity(4), [1]), EXACT)
    obj["blocks"].reverse()
    with pytest.raises(FormatError, match="canonical order"):
        io.report_from_dict(obj)


# command line -------------------------------------------------------------

def test_cli_canonicalize_rotation(tmp_path, capsys):
    pair = _write(tmp_path / "pair.json", ROTATION)
    out = tmp_path / "report.json"
    assert main(["canonicalize", pair, "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["blocks"] == [{"type": "imaginary", "lambda": 2, "size": 1, "sign": 1}]
    assert main(["verify", pair, str(out)]) == 0
    assert "pass" in capsys.readouterr().out


def test_cli_verify_fails_after_editing_the_operator(tmp_path):
    pair = _write(tmp_path / "pair.json", ROTATION)
    out = tmp_path / "report.json"
    main(["canonicalize", pair, "-o", str(out)])
    edited = json.loads(json.dumps(ROTATION))
    edited["operator"]["data"] = [[0, 3], [-3, 0]]
    assert main(["verify", _write(tmp_path / "edited.json", edited), str(out)]) == 3


def test_cli_rejects_non_symmetric_gram(tmp_path, capsys):
    bad = dict(ROTATION, gram={"rows": 2, "cols": 2, "data": [[1, 1], [0, 1]]})
    assert main(["canonicalize", _write(tmp_path / "bad.json", bad)]) == 1
    assert "NotSymmetric" in capsys.readouterr().err


def test_cli_missing_file(tmp_path, capsys):
    assert main(["minpoly", str(tmp_path / "nope.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_cli_numerical_failure_exit_code(tmp_path, capsys):
    # eigenvalues 1 and -1 closer than ten merge radii to the clusters at +-(1 + 1e-6)
    J = np.diag([1.0, 1.0 + 1e-6, -1.0, -1.0 - 1e-6])
    G = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)
    obj = {"mode": "float",
           "gram": {"rows": 4, "cols": 4, "data": G.tolist()},
           "operator": {"rows": 4, "cols": 4, "data": J.tolist()}}
    path = _write(tmp_path / "close.json", obj)
    assert main(["canonicalize", path, "--tol-cluster", "1e-7"]) == 2
    assert "NumericalFailure" in capsys.readouterr().err


def test_cli_generate_and_reference(tmp_path):
    spec = {"mode": "exact", "scramble": "unimodular",
            "blocks": [{"type": "nilpotent_even", "size": 2}, {"type": "real", "mu": "3/2", "size": 1}]}
    spec_path = _write(tmp_path / "spec.json", spec)
    pair, ref = tmp_path / "pair.json", tmp_path / "ref.json"
    assert main(["generate", spec_path, "--seed", "7", "-o", str(pair),
                 "--with-reference", str(ref)]) == 0
    assert main(["verify", str(pair), str(ref)]) == 0
    first = pair.read_text()
    main(["generate", spec_path, "--seed", "7", "-o", str(pair)])
    assert pair.read_text() == first


def test_cli_minpoly(tmp_path, capsys):
    assert main(["minpoly", _write(tmp_path / "pair.json", ROTATION)]) == 0
    assert capsys.readouterr().out.strip() == "(t^2 + 4)^1"


def test_cli_mode_override(tmp_path):
    out = tmp_path / "report.json"
    assert main(["canonicalize", _write(tmp_path / "pair.json", ROTATION), "--mode", "float",
                 "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["mode"] == "float"
    assert report["blocks"][0]["lambda"] == pytest.approx(2.0, abs=1e-12)


def test_library_and_cli_agree(tmp_path):
    pair_obj = io.pair_to_dict(generate_pair(GeneratorSpec([RealChain(2, 2)], "unimodular",
                                                           seed=9))[0])
    out = tmp_path / "report.json"
    main(["canonicalize", _write(tmp_path / "pair.json", pair_obj), "-o", str(out)])
    pair = io.pair_from_dict(pair_obj)
    form, basis = canonicalize(pair)
    expected = io.report_to_dict(form, basis, EXACT, verify_report(pair, form, basis))
    assert out.read_text() == io.dumps(expected)
