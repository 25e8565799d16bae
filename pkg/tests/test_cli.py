import json
from pathlib import Path

from metalg.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# --- exit-code contract over the shipped corpus -----------------------------

def test_validate_corpus(capsys):
    for name in ["xor.json", "xor_half.json", "xor_double.json", "one_point.json",
                 "z4.json", "z2.json", "negation.json"]:
        code, out, _ = run(capsys, "validate", CORPUS / name)
        assert code == 0 and "valid" in out


def test_validate_broken_names_the_triple(capsys):
    code, out, _ = run(capsys, "validate", CORPUS / "broken.json")
    assert code == 1
    assert "triangle" in out and "d(0,2)" in out


def test_quantitative_corpus(capsys):
    for name in ["xor.json", "z4.json", "negation.json"]:
        code, out, _ = run(capsys, "quantitative", CORPUS / name)
        assert code == 0


def test_sat_commutativity(capsys):
    code, out, _ = run(capsys, "sat", CORPUS / "xor.json", CORPUS / "comm.eqs")
    assert code == 0
    assert "2 equation(s) hold" in out


def test_sat_failure_prints_witness(capsys):
    code, out, _ = run(capsys, "sat", CORPUS / "xor_double.json", CORPUS / "comm.eqs")
    assert code == 1
    assert "FAILS: x =1 y" in out
    assert "x=0, y=1" in out and "distance: 2" in out


def test_member_refuted(capsys):
    code, out, _ = run(capsys, "member", CORPUS / "xor.json",
                       "--candidate", CORPUS / "xor_double.json", "--depth", "3")
    assert code == 1
    assert "x =1 y" in out


def test_member_consistent(capsys):
    code, out, _ = run(capsys, "member", CORPUS / "xor.json",
                       "--candidate", CORPUS / "xor_half.json", "--depth", "3")
    assert code == 0
    assert "consistent" in out and "depth 3" in out


def test_product_and_subalg_and_scale(capsys):
    code, out, _ = run(capsys, "product", CORPUS / "xor.json", CORPUS / "xor_half.json")
    assert code == 0 and "(0,0)" in out
    code, out, _ = run(capsys, "subalg", CORPUS / "z4.json", "--gens", "2")
    assert code == 0 and "2 element(s)" in out
    code, out, _ = run(capsys, "scale", CORPUS / "xor.json", "--by", "1/2")
    assert code == 0 and "1/2" in out


def test_congruences_and_quotient(capsys):
    code, out, _ = run(capsys, "congruences", CORPUS / "z4.json")
    assert code == 0 and "3 congruence(s)" in out
    code, out, _ = run(capsys, "quotient", CORPUS / "z4.json", "--blocks", "0 2|1 3")
    assert code == 0 and "{0,2}" in out


def test_quotient_non_congruence_exits_1(capsys):
    code, out, _ = run(capsys, "quotient", CORPUS / "z4.json", "--blocks", "0 1|2|3")
    assert code == 1
    assert "not a congruence" in out


def test_factor_verbs(capsys):
    code, out, _ = run(capsys, "factor", CORPUS / "hom_id_z4.json",
                       CORPUS / "hom_mod2.json")
    assert code == 0 and "surjective: True" in out
    code, out, _ = run(capsys, "factor", CORPUS / "hom_id_z4.json",
                       CORPUS / "hom_mod2.json", "--metric")
    assert code == 0
    # the reverse direction fails the kernel condition, exit 1 with witness
    code, out, _ = run(capsys, "factor", CORPUS / "hom_mod2.json",
                       CORPUS / "hom_id_z4.json")
    assert code == 1
    assert "witness pair (0, 2)" in out


def test_free_and_theory(capsys):
    code, out, _ = run(capsys, "free", CORPUS / "negation.json", "--vars", "x")
    assert code == 0 and "u(x)" in out and "prevariety" in out
    code, out, _ = run(capsys, "theory", CORPUS / "xor.json", "--vars", "x,y",
                       "--depth", "2")
    assert code == 0
    assert "xor(x,y) =0 xor(y,x)" in out.splitlines()
    assert "x =1 y" in out.splitlines()


def test_hsp_verb(capsys):
    code, out, _ = run(capsys, "hsp", CORPUS / "comm.eqs", CORPUS / "xor.json",
                       CORPUS / "xor_half.json", CORPUS / "one_point.json")
    assert code == 0
    assert "violations: 0" in out


def test_demo_verb(capsys):
    code, out, _ = run(capsys, "demo-nonvariety")
    assert code == 0 and "tanh" in out
    code, out, _ = run(capsys, "demo-nonvariety", "--scale", "1/4")
    assert code == 0 and "1/4" in out


# --- input errors exit 2 ----------------------------------------------------

def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "validate", CORPUS / "nope.json")
    assert code == 2 and "error" in err


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2
    assert "line 1" in err  # location reported


def test_malformed_algebra_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"signature": [], "carrier": ["a"],
                               "dist": [[0.5]], "ops": {}}), encoding="utf-8")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "float" in err


def test_bound_overrun_exit_2_names_bound(capsys):
    code, _, err = run(capsys, "product", CORPUS / "z4.json", CORPUS / "z4.json",
                       "--max-size", "3")
    assert code == 2
    assert "product carrier size" in err and "3" in err


def test_seed_flag_fails_loudly(capsys):
    code, _, err = run(capsys, "--seed", "42", "validate", CORPUS / "xor.json")
    assert code == 2
    assert "deterministic" in err


def test_scale_by_two_is_input_error(capsys):
    code, _, err = run(capsys, "scale", CORPUS / "xor.json", "--by", "2")
    assert code == 2


def test_bad_blocks_exit_2(capsys):
    code, _, err = run(capsys, "quotient", CORPUS / "z4.json", "--blocks", "0 1|1 2 3")
    assert code == 2


def test_mismatched_signatures_exit_2(capsys):
    code, _, err = run(capsys, "product", CORPUS / "xor.json", CORPUS / "z4.json")
    assert code == 2 and "signature" in err
    code, _, err = run(capsys, "hsp", CORPUS / "comm.eqs", CORPUS / "xor.json",
                       CORPUS / "z4.json")
    assert code == 2


def test_equations_with_unknown_symbol_exit_2(tmp_path, capsys):
    eqs = tmp_path / "bad.eqs"
    eqs.write_text("vars x; eq nand(x,x) =0 x;", encoding="utf-8")
    code, _, err = run(capsys, "sat", CORPUS / "xor.json", eqs)
    assert code == 2 and "unknown symbol" in err


# --- json twins and rendering ----------------------------------------------

def test_json_twin_roundtrips(tmp_path, capsys):
    cases = [
        ("validate", [CORPUS / "xor.json"]),
        ("quantitative", [CORPUS / "xor.json"]),
        ("sat", [CORPUS / "xor.json", CORPUS / "comm.eqs"]),
        ("product", [CORPUS / "xor.json", CORPUS / "xor_half.json"]),
        ("subalg", [CORPUS / "z4.json", "--gens", "2"]),
        ("congruences", [CORPUS / "z4.json"]),
        ("quotient", [CORPUS / "z4.json", "--blocks", "0 2|1 3"]),
        ("factor", [CORPUS / "hom_id_z4.json", CORPUS / "hom_mod2.json"]),
        ("scale", [CORPUS / "xor.json", "--by", "1/2"]),
        ("free", [CORPUS / "negation.json", "--vars", "x"]),
        ("theory", [CORPUS / "xor.json", "--vars", "x,y", "--depth", "2"]),
        ("member", [CORPUS / "xor.json", "--candidate", CORPUS / "xor_half.json",
                    "--depth", "2"]),
        ("hsp", [CORPUS / "comm.eqs", CORPUS / "xor.json"]),
        ("demo-nonvariety", []),
    ]
    for verb, extra in cases:
        path = tmp_path / f"{verb}.json"
        code, _, _ = run(capsys, "--json", path, verb, *extra)
        assert code == 0, verb
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["verb"] == verb
        # re-serializing parses back to the same data
        assert json.loads(json.dumps(data)) == data


def test_json_twin_algebra_reloads(tmp_path, capsys):
    from metalg import MetricAlgebra
    path = tmp_path / "twin.json"
    code, _, _ = run(capsys, "--json", path, "quotient", CORPUS / "z4.json",
                     "--blocks", "0 2|1 3")
    assert code == 0
    twin = json.loads(path.read_text(encoding="utf-8"))
    reloaded = MetricAlgebra.from_json_dict(twin["algebra"])
    assert reloaded.n == 2


def test_decimal_flag_adds_rendering(capsys):
    code, out, _ = run(capsys, "--decimal", "2", "scale", CORPUS / "xor.json",
                       "--by", "1/3")
    assert code == 0
    assert "1/3 (0.33)" in out


def test_stdin_dash(capsys, monkeypatch):
    import io
    text = (CORPUS / "xor.json").read_text(encoding="utf-8")
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out, _ = run(capsys, "validate", "-")
    assert code == 0 and "valid" in out
