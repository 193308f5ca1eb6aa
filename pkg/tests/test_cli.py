import json
import subprocess
import sys
from fractions import Fraction

import pytest

from feqfactor.cli import main
from feqfactor.errors import InvalidInputError
from feqfactor.io import (
    SchemaError,
    emit_element,
    emit_instance,
    parse_element,
    parse_instance,
    parse_instance_doc,
)
from feqfactor.reductions import range_gap

from helpers import FIXTURES, fx

INSTANCES = sorted(
    p.name for p in FIXTURES.glob("*.json")
    if not p.name.startswith(("F_", "qinv_", "bad_"))
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_parse_element_forms():
    assert parse_element("3/4") == Fraction(3, 4)
    assert parse_element("-2") == Fraction(-2)
    assert parse_element(5) == Fraction(5)
    assert parse_element("x1") == "x1"
    for bad in (True, "", "1/0", 0.5):
        with pytest.raises(SchemaError):
            parse_element(bad)


def test_emit_element_refuses_ambiguous_symbols():
    assert emit_element(Fraction(1, 2)) == "1/2"
    with pytest.raises(InvalidInputError):
        emit_element("12")


@pytest.mark.parametrize("name", INSTANCES)
def test_round_trip(name):
    inst = parse_instance(fx(name))
    assert parse_instance_doc(emit_instance(inst)) == inst


def test_builder_expansion_and_explicit_table():
    inst = parse_instance(fx("diff_z5.json"))
    assert len(inst.X) == 5 and inst.J(Fraction(1), Fraction(3)) == 3
    assert len(parse_instance(fx("table_2x2x2.json")).universe) == 8


@pytest.mark.parametrize(
    "doc, path",
    [
        ({}, "$.kind"),
        ({"kind": "cube"}, "$.kind"),
        ({"kind": "triple", "J": {"builder": "max"}, "K": {"builder": "max"}}, "$.sets.X"),
        ({"kind": "triple", "sets": {"X": ["a"], "Y": ["a"], "Z": ["a", "a"]},
          "J": {"builder": "max"}, "K": {"builder": "max"}}, "$.sets.Z"),
        ({"kind": "power", "A": ["0"], "n": 2, "J": {}, "K": {}}, "$.n"),
        ({"kind": "triple", "sets": {"X": ["0"], "Y": ["0"], "Z": ["0"]},
          "J": {"table": [[["0", "0"], "1"]], "codomain": ["0"]}, "K": {"builder": "max"}}, "$.J"),
        ({"kind": "triple", "sets": {"X": ["0"], "Y": ["0"], "Z": ["0"]},
          "J": {"builder": "nope"}, "K": {"builder": "max"}}, "$.J"),
    ],
)
def test_schema_errors_name_the_field(doc, path):
    with pytest.raises(SchemaError) as err:
        parse_instance_doc(doc)
    assert str(err.value).startswith(path)


def test_solve_difference_z2(capsys):
    code, rep = run_json(capsys, "solve", fx("diff_z2.json"))
    assert code == 0 and rep["num_blocks"] == 2 and rep["schema_version"] == 1
    assert len(rep["instance_digest"]) == 64


def test_characterize_prodsum_is_constants(capsys):
    code, rep = run_json(capsys, "characterize", fx("prodsum_z5.json"))
    assert code == 0
    assert rep["status"] == "characterized-as-constants" and rep["num_blocks"] == 1


def test_reduce_with_bad_base_names_missing_value(capsys):
    code, rep = run_json(capsys, "reduce", fx("prodsum_z5.json"), "--side", "J", "--base", "0")
    assert code == 1
    inst = parse_instance(fx("prodsum_z5.json"))
    missing = parse_element(rep["error"]["witness"])
    assert missing in range_gap(inst, "J", Fraction(0))


def test_reduce_picks_first_good_base(capsys):
    code, rep = run_json(capsys, "reduce", fx("prodsum_z5.json"), "--side", "J")
    assert code == 0 and rep["base"] == "1" and rep["map"] == "S_j"


def test_reduce_with_function_file(capsys):
    code, rep = run_json(capsys, "reduce", fx("diff_z5.json"), "--side", "K", "--base", "0",
                         "--function", fx("F_diff_z5_member.json"))
    assert code == 0 and rep["f"] == {str(i): str(i) for i in range(5)}


def test_member_verdicts(capsys):
    code, rep = run_json(capsys, "member", fx("diff_z5.json"), "--function", fx("F_diff_z5_member.json"))
    assert code == 0 and rep["member"] and rep["constant_on_blocks"] and "G" in rep
    code, rep = run_json(capsys, "member", fx("diff_z5.json"), "--function", fx("F_diff_z5_nonmember.json"))
    assert code == 0 and not rep["member"] and rep["witness"]["condition"] in ("J", "K")


def test_member_requires_function(capsys):
    code, out = run(capsys, "member", fx("diff_z5.json"))
    assert code == 2


def test_invalid_codomain_exit_2(capsys):
    code, rep = run_json(capsys, "solve", fx("bad_codomain.json"))
    assert code == 2 and "outside the codomain" in rep["error"]["message"]


def test_missing_file_exit_2(capsys, tmp_path):
    code, _ = run(capsys, "solve", str(tmp_path / "none.json"))
    assert code == 2


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, rep = run_json(capsys, "solve", str(bad))
    assert code == 2 and "invalid JSON" in rep["error"]["message"]


def test_qinv(capsys):
    code, rep = run_json(capsys, "qinv", fx("qinv_fn.json"), "--all", "--tie-break", "last")
    assert code == 0 and rep["count"] == 4 and len(rep["all"]) == 4
    assert rep["canonical"] == {"0": "c", "1": "d"}
    code, rep = run_json(capsys, "qinv", fx("qinv_fn.json"), "--all", "--enumerate-limit", "3")
    assert code == 1 and rep["error"]["hypothesis"] == "enumeration-limit"


def test_diagonal_commands(capsys):
    code, rep = run_json(capsys, "diagonal", fx("sum_z7_power.json"))
    assert code == 0 and rep["equivalences"]["verdict"]
    assert all(all(v.values()) for v in rep["sides"]["K"]["lemma"]["diagonal_lemma"].values())
    code, rep = run_json(capsys, "diagonal", fx("clip_half_max_power_q4.json"))
    assert code == 1 and rep["sides"]["K"]["failed_hypothesis"] == "ran(R)=ran(delta_R)"
    code, _ = run(capsys, "diagonal", fx("diff_z3.json"))
    assert code == 2


def test_partial_reduce_and_merge(capsys):
    code, rep = run_json(capsys, "partial-reduce", fx("mean_partial.json"), "--side", "K", "--base", "0",
                         "--function", fx("F_mean3.json"))
    assert code == 1 and "D_K" in rep["error"]["message"]
    code, rep = run_json(capsys, "merge", fx("mean_partial.json"), "--function", fx("F_mean3.json"))
    assert code == 0 and rep["ok"] and rep["conflicts"] == [] and rep["uncovered"] == []


def test_text_format_and_out_file(capsys, tmp_path):
    out = tmp_path / "r.txt"
    code, printed = run(capsys, "solve", fx("diff_z3.json"), "--format", "text", "--out", str(out))
    assert code == 0 and printed == ""
    assert "num_blocks: 3" in out.read_text().splitlines()


@pytest.mark.parametrize("name", ["diff_z4.json", "mean_partial.json", "chain_max_power_m3.json"])
def test_reports_are_byte_identical(capsys, tmp_path, name):
    cmd = "diagonal" if "power" in name else "characterize"
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main([cmd, fx(name), "--out", str(a)])
    main([cmd, fx(name), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "feqfactor", "solve", fx("diff_z2.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["num_blocks"] == 2
