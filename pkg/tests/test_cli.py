import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from filippov import Matrix, make_simple
from filippov.cli import main
from filippov.derivations import (
    DerivationTuple,
    random_element,
    solve_nary_derivations,
    tuple_to_json,
)

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_verify_simple(capsys):
    code, obj = run_json(capsys, "verify", "--algebra", "simple:3")
    assert code == 0 and obj["filippov"] and obj["anticommutative"]


def test_verify_perturbed(capsys):
    code, obj = run_json(capsys, "verify", "--algebra", str(DATA / "perturbed.json"))
    assert code == 1
    assert obj["filippov"] is False
    assert obj["witness"]["identity"] == "filippov"
    assert obj["witness"]["lhs"] != obj["witness"]["rhs"]


def test_verify_zero(capsys):
    code, obj = run_json(capsys, "verify", "--algebra", str(DATA / "zero.json"))
    assert code == 0


@pytest.mark.parametrize("src", ["missing.json", "simple:x", "semisimple:2", "simple:1",
                                 str(DATA / "nonincreasing.json")])
def test_bad_source_exit_2(capsys, src):
    code, _, err = run(capsys, "verify", "--algebra", src)
    assert code == 2 and err.startswith("error:")


def test_nonincreasing_diagnostic(capsys):
    _, _, err = run(capsys, "verify", "--algebra", str(DATA / "nonincreasing.json"))
    assert "NonIncreasingArgs" in err


def test_unknown_space_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "--space", "bogus", "--algebra", "simple:2"])
    assert info.value.code == 2


def test_delta_der_needs_delta(capsys):
    code, _, err = run(capsys, "solve", "--space", "delta-der", "--algebra", "simple:2")
    assert code == 2 and "--delta" in err


@pytest.mark.parametrize(
    "space,src,dim",
    [("nary-der", "simple:3", 18), ("gder", "simple:3", 16), ("der", "semisimple:2:2", 6),
     ("centroid", "semisimple:2:2", 2), ("qder", "simple:2", 9)],
)
def test_solve_dimensions(capsys, space, src, dim):
    code, obj = run_json(capsys, "solve", "--space", space, "--algebra", src)
    assert code == 0 and obj["dimension"] == dim == len(obj["basis"])


def test_solve_delta(capsys):
    code, obj = run_json(capsys, "solve", "--space", "delta-der", "--algebra", "simple:3", "--delta", "1/n")
    assert obj["delta"] == "1/3" and obj["dimension"] == 1


def test_solve_out_file_prints_dimension(capsys, tmp_path):
    out = tmp_path / "space.json"
    code, stdout, _ = run(capsys, "solve", "--space", "nary-der", "--algebra", "simple:3", "--out", str(out))
    assert code == 0 and "18" in stdout
    assert json.loads(out.read_text())["dimension"] == 18


def test_chain_simple(capsys):
    code, obj = run_json(capsys, "chain", "--algebra", "simple:3")
    assert code == 0
    main_chain = next(c for c in obj["chains"] if c["delta"] == "1/3")
    assert main_chain["chain"] == "Der ⊂ Der_1/3 ⊂ QDer = GDer = End"


def test_chain_semisimple_tsv(capsys):
    code, out, _ = run(capsys, "chain", "--algebra", "semisimple:3:2", "--format", "tsv", "--delta", "1/3")
    assert code == 0
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert rows[0][0] == "delta"
    assert rows[1][-1].endswith("QDer = GDer ⊂ End")


def test_chain_zero(capsys):
    code, obj = run_json(capsys, "chain", "--algebra", str(DATA / "zero.json"))
    for ch in obj["chains"]:
        assert {r["relation"] for r in ch["relations"]} == {"="}


@pytest.mark.parametrize("src,dim", [("simple:2", 8), ("semisimple:2:3", 24), ("simple:5", 35)])
def test_delta_report(capsys, src, dim):
    code, obj = run_json(capsys, "delta-report", "--algebra", src)
    assert code == 0
    rep = obj["combined"] if "combined" in obj else obj
    assert rep["quotient_dim"] == dim and rep["sl_compatible"]


def _write_tuple(tmp_path, t):
    p = tmp_path / "tuple.json"
    p.write_text(json.dumps(tuple_to_json(t)))
    return str(p)


def test_decompose_transpose_tuple_fixture(capsys, tmp_path):
    alg = make_simple(4)
    A = Matrix.from_rows([[0 if i == j else i - 2 * j for j in range(5)] for i in range(5)])
    t = DerivationTuple(A, (-A.T,) * 4)
    code, obj = run_json(capsys, "decompose", "--algebra", "simple:4", "--tuple", _write_tuple(tmp_path, t))
    assert code == 0
    assert obj["h"] == ["0"] * 4 and obj["residual"] == "zero"
    assert Matrix.from_rows(obj["d"]) == -A.T


def test_decompose_centroid_fixture(capsys, tmp_path):
    ident = Matrix.identity(3)
    t = DerivationTuple(ident.scale(3), (ident, ident.scale(2)))
    code, obj = run_json(capsys, "decompose", "--algebra", "simple:2", "--tuple", _write_tuple(tmp_path, t))
    assert code == 0 and obj["h"] == ["1", "2"]
    assert Matrix.from_rows(obj["d"]).is_zero()


def test_decompose_random_element(capsys, tmp_path):
    t = random_element(solve_nary_derivations(make_simple(2)), random.Random(7))
    code, obj = run_json(capsys, "decompose", "--algebra", "simple:2", "--tuple", _write_tuple(tmp_path, t))
    assert code == 0 and obj["residual"] == "zero"


def test_decompose_semisimple(capsys, tmp_path):
    ident = Matrix.identity(6)
    t = DerivationTuple(ident.scale(2), (ident, ident))
    code, obj = run_json(capsys, "decompose", "--algebra", "semisimple:2:2", "--tuple", _write_tuple(tmp_path, t))
    assert code == 0 and obj["invariant"] and len(obj["blocks"]) == 2


def test_decompose_nonderivation_exit_1(capsys, tmp_path):
    t = DerivationTuple(Matrix.unit(3, 0, 0), (Matrix.zeros(3),) * 2)
    code, obj = run_json(capsys, "decompose", "--algebra", "simple:2", "--tuple", _write_tuple(tmp_path, t))
    assert code == 1 and obj["error"] == "not a derivation" and len(obj["witness"]) == 2


def test_decompose_bad_tuple_file(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text("[1, 2]")
    code, _, _ = run(capsys, "decompose", "--algebra", "simple:2", "--tuple", str(p))
    assert code == 2


def test_probe_simple(capsys):
    _, obj = run_json(capsys, "probe-conjecture", "--algebra", "simple:3")
    assert obj["gder_equals_end"] and obj["shape"] == "simple (n+1)-dim"


def test_probe_semisimple(capsys):
    _, obj = run_json(capsys, "probe-conjecture", "--algebra", "semisimple:3:2")
    assert not obj["gder_equals_end"]


def test_probe_small_dimension(capsys):
    _, obj = run_json(capsys, "probe-conjecture", "--algebra", str(DATA / "two_dim_ternary.json"))
    assert obj["gder_equals_end"] and obj["shape"] == "dim<=n"


def test_probe_perturbed_is_not_simple(capsys):
    _, obj = run_json(capsys, "probe-conjecture", "--algebra", str(DATA / "perturbed.json"))
    assert obj["shape"] == "other"


def test_output_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"o{k}.json"
        assert main(["solve", "--space", "gder", "--algebra", "semisimple:2:2", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "filippov", "verify", "--algebra", "simple:2", "--format", "tsv"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines() == ["anticommutative\tpass", "filippov\tpass"]
