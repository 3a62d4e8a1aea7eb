import json

import pytest

from teamlogic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def split_fixture(tmp_path, fixtures_dir):
    """Split a combined fixture file into --model / --team files."""

    def split(name):
        data = json.loads((fixtures_dir / name).read_text())
        model_path = tmp_path / "model.json"
        team_path = tmp_path / "team.json"
        model_path.write_text(json.dumps(data["model"]))
        team_path.write_text(json.dumps(data["team"]))
        return str(model_path), str(team_path), data["formula"]

    return split


# --- check -----------------------------------------------------------------


def test_check_lax_vs_strict_exit_codes(capsys, split_fixture):
    model, team, formula = split_fixture("prop-4.2-lax-vs-strict.json")
    code, out, _ = run(capsys, "check", "--model", model, "--team", team,
                       formula)
    assert code == 0 and out.strip() == "sat (lax)"
    code, out, _ = run(capsys, "check", "--model", model, "--team", team,
                       "--mode", "strict", formula)
    assert code == 1 and out.strip() == "unsat (strict)"


def test_check_sentence_without_team(capsys):
    code, out, _ = run(capsys, "check", "--domain", "0,1",
                       "forall x . exists y . x != y")
    assert code == 0
    code, _, _ = run(capsys, "check", "--domain", "0,1",
                     "exists y . forall x . x = y")
    assert code == 1


def test_check_usage_errors(capsys):
    code, _, err = run(capsys, "check", "x = y")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "check", "--domain", "0,1", "x = ")
    assert code == 2
    code, _, err = run(capsys, "check", "--domain", "0,1", "--team",
                       "/nonexistent/team.json", "x = y")
    assert code == 2


def test_check_json_report(capsys, split_fixture):
    model, team, formula = split_fixture("prop-4.2-lax-vs-strict.json")
    code, out, _ = run(capsys, "check", "--json", "--model", model,
                       "--team", team, formula)
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "sat"
    assert report["mode"] == "lax" and report["nodes"] > 0


def test_check_budget_exit_code(capsys, split_fixture):
    model, team, formula = split_fixture("prop-4.2-lax-vs-strict.json")
    code, out, _ = run(capsys, "check", "--model", model, "--team", team,
                       "--budget", "2", formula)
    assert code == 3 and out.strip() == "budget_exceeded (lax)"


# --- game ------------------------------------------------------------------


def test_game_nondeterministic_vs_deterministic(capsys, split_fixture):
    model, team, formula = split_fixture("prop-4.2-lax-vs-strict.json")
    code, out, _ = run(capsys, "game", "--model", model, "--team", team,
                       formula)
    assert code == 0 and out.strip()
    code, out, _ = run(capsys, "game", "--model", model, "--team", team,
                       "--deterministic", formula)
    assert code == 1 and out.strip() == "none"


def test_game_requires_translated_atoms(capsys, split_fixture):
    model, team, _ = split_fixture("prop-4.2-lax-vs-strict.json")
    code, _, err = run(capsys, "game", "--model", model, "--team", team,
                       "dep(x, y)")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "game", "--model", model, "--team", team,
                     "--compile", "dep(x, y)")
    assert code in (0, 1)


def test_game_needs_team(capsys):
    code, _, err = run(capsys, "game", "--domain", "0,1", "x = y")
    assert code == 2 and "team" in err


# --- translate -------------------------------------------------------------


def test_translate_dep2exc_display(capsys):
    code, out, _ = run(capsys, "translate", "--rule", "dep2exc", "dep(x, y)")
    assert code == 0
    assert out.strip() == \
        "forall _v0 . (_v0 = y \\/ excl(x, _v0 ; x, y))"


def test_translate_equi2inc_display(capsys):
    code, out, _ = run(capsys, "translate", "--rule", "equi2inc",
                       "equi(x ; y)")
    assert code == 0
    assert out.strip() == "incl(x ; y) /\\ incl(y ; x)"


def test_translate_wrong_atom_type(capsys):
    code, _, err = run(capsys, "translate", "--rule", "dep2exc", "incl(x ; y)")
    assert code == 2 and "applies to a single" in err


def test_translate_tc_requires_tuple_flags(capsys):
    code, _, err = run(capsys, "translate", "--rule", "tc", "x = y")
    assert code == 2
    code, out, _ = run(capsys, "translate", "--rule", "tc",
                       "--avars", "a", "--bvars", "b",
                       "--xvars", "x", "--yvars", "y", "E(x, y)")
    assert code == 0 and "incl(" in out


def test_translate_snf2ie_from_file(capsys, fixtures_dir):
    path = str(fixtures_dir / "thm-6-skolemnf-trivial.txt")
    code, out, _ = run(capsys, "translate", "--rule", "snf2ie",
                       "--from-file", "--team-vars", "v", path)
    assert code == 0 and "dep(" in out and "incl(" in out


def test_translate_ie2eso_dump(capsys):
    code, out, _ = run(capsys, "translate", "--rule", "ie2eso",
                       "--team-vars", "x,y", "incl(x ; y)")
    assert code == 0
    assert out.splitlines()[0] == "free relation A/2"
    assert any(line.startswith("matrix:") for line in out.splitlines())


# --- equiv -----------------------------------------------------------------


def test_equiv_accepts_translation(capsys):
    code, out, _ = run(capsys, "equiv", "dep(x, y)",
                       "forall _v0 . (_v0 = y \\/ excl(x, _v0 ; x, y))",
                       "--domains", "2..2", "--max-rows", "3")
    assert code == 0 and out.strip() == "equivalent"


def test_equiv_counterexample(capsys):
    code, out, _ = run(capsys, "equiv", "incl(x ; y)", "incl(y ; x)",
                       "--domains", "2..2", "--max-rows", "2")
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "counterexample"
    # the reported team really separates the two formulas
    team_line = next(l for l in lines if l.startswith("team:"))
    data = json.loads(team_line.split(":", 1)[1])
    assert data["rows"]


def test_equiv_with_relation_symbols(capsys):
    code, out, _ = run(capsys, "equiv", "R(x)", "R(x)",
                       "--domains", "2..2", "--max-rows", "2")
    assert code == 0


def test_equiv_budget(capsys):
    code, out, _ = run(capsys, "equiv", "exists a . incl(x ; a)",
                       "exists a . incl(x ; a)",
                       "--domains", "2..2", "--budget", "1")
    assert code == 3 and out.strip() == "budget_exceeded"


# --- derive ----------------------------------------------------------------


def test_derive_transitivity(capsys):
    code, out, _ = run(capsys, "derive", "incl(A ; C)",
                       "-p", "incl(A ; B)", "-p", "incl(B ; C)")
    assert code == 0
    assert out.splitlines()[0].startswith("incl(A ; C)")
    assert "I3" in out


def test_derive_not_derivable(capsys):
    code, out, _ = run(capsys, "derive", "incl(B ; A)",
                       "-p", "incl(A ; B)", "--depth", "4")
    assert code == 1 and "not derivable" in out


def test_derive_rejects_fd_premise(capsys):
    code, _, err = run(capsys, "derive", "incl(A ; B)", "-p", "fd(A -> B)")
    assert code == 2 and "error" in err


# --- dbcheck ---------------------------------------------------------------


def test_dbcheck_mixed_results(capsys, tmp_path):
    csv = tmp_path / "r.csv"
    csv.write_text("A,B\n0,1\n0,2\n")
    code, out, _ = run(capsys, "dbcheck", str(csv),
                       "fd(A -> B)", "incl(B ; B)")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].startswith("violated: fd(A -> B)  witness:")
    assert lines[1] == "holds: incl(B ; B)"


def test_dbcheck_deps_file_and_json(capsys, tmp_path):
    csv = tmp_path / "r.csv"
    csv.write_text("A,B\n0,0\n1,1\n")
    deps = tmp_path / "deps.txt"
    deps.write_text("# comment line\nincl(A ; B)\nexcl(A ; B)\n")
    code, out, _ = run(capsys, "dbcheck", "--json", str(csv),
                       "--deps-file", str(deps))
    report = json.loads(out)
    assert code == 1 and report["verdict"] == "violated"
    assert len(report["violations"]) == 1
