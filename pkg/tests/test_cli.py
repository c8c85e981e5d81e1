import csv
import io
import json

import pytest

from aol.cli import main
from aol.core import dump_class, load_class
from aol.lattice import lattice_from_dict, pivot_dimension, vc_dimension
from aol.reductions import apple_class
from aol.trees import depth, gen_fin_deltas, gen_many_labels, load_tree, rank


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fd2(tmp_path):
    path = tmp_path / "fd2.json"
    path.write_text(dump_class(gen_fin_deltas(2)[0]))
    return str(path)


def test_invariants_text_and_json(capsys, fd2):
    code, out, _ = run(capsys, "invariants", fd2, "--al", "4")
    assert code == 0
    assert "pivot_dimension: 1" in out and "AL(H,4): 1" in out and "partial_littlestone: 1" in out
    code, out, _ = run(capsys, "invariants", fd2, "--al", "4", "--json")
    report = json.loads(out)
    assert report["pivot_dimension"] == 1 and report["al"] == {"4": 1}
    assert report["partial_littlestone"] == 1 and report["hypotheses"] == 2
    code, out, _ = run(capsys, "invariants", fd2, "--csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert rows["vc_dimension"] == "1"


def test_malformed_class_names_the_hypothesis(capsys, tmp_path):
    doc = json.loads(dump_class(gen_fin_deltas(2)[0]))
    doc["hypotheses"][1]["table"][0] = [1, 0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "invariants", str(path))
    assert code == 1 and "ParseError" in err and "hypotheses[1]" in err
    path.write_text("{not json")
    code, _, err = run(capsys, "invariants", str(path))
    assert code == 1 and "ParseError" in err
    code, _, err = run(capsys, "invariants", str(tmp_path / "missing.json"))
    assert code == 1 and "ParseError" in err


def test_simulate_aoa_exhaustive(capsys, fd2):
    code, out, _ = run(capsys, "simulate", fd2, "--learner", "aoa", "--horizon", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("round,instance,prediction,label")
    assert lines[-1] == "summary,worst_case,1,bound,1"


def test_simulate_waa_potential_column(capsys, fd2, tmp_path):
    trace = tmp_path / "trace.json"
    trace.write_text(json.dumps([[0, 1], [1, 1], [0, 0]]))
    code, out, _ = run(capsys, "simulate", fd2, "--learner", "waa", "--mu", "1.5",
                       "--adversary", str(trace))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][-1] == "potential_ok"
    assert [r[-1] for r in rows[1:-1]] == ["True"] * 3
    assert rows[-1][:2] == ["summary", "worst_case"]


def test_simulate_tree_adversary(capsys, fd2, tmp_path):
    _, T = gen_fin_deltas(2)
    code, out, _ = run(capsys, "gen", "fin-deltas", "2", "--out", str(tmp_path / "g"))
    code, out, _ = run(capsys, "simulate", fd2, "--learner", "full",
                       "--adversary", str(tmp_path / "g" / "tree.json"))
    assert code == 0
    worst = int(out.strip().splitlines()[-1].split(",")[2])
    assert worst >= rank(T, gen_fin_deltas(2)[0])


def test_simulate_errors(capsys, fd2, tmp_path):
    trace = tmp_path / "trace.json"
    trace.write_text(json.dumps([[0, 0], [1, 0]]))
    code, _, err = run(capsys, "simulate", fd2, "--learner", "full", "--adversary", str(trace))
    assert code == 1 and "UnrealizableHistory" in err
    code, _, err = run(capsys, "simulate", fd2, "--learner", "full")
    assert code == 1 and "--horizon" in err
    code, _, err = run(capsys, "simulate", fd2, "--learner", "hull-memo", "--horizon", "6",
                       "--budget-nodes", "3")
    assert code == 1 and "BudgetExceeded" in err and "budget_nodes=3" in err


def test_minimax(capsys, fd2):
    code, out, _ = run(capsys, "minimax", fd2, "--horizon", "4")
    assert code == 0 and out.strip() == "1"
    assert main(["minimax", fd2]) == 2


def test_gen_outputs(capsys, tmp_path):
    code, _, _ = run(capsys, "gen", "fin-deltas", "3", "--out", str(tmp_path / "a"))
    H = load_class((tmp_path / "a" / "class.json").read_text())
    T = load_tree((tmp_path / "a" / "tree.json").read_text())
    assert code == 0 and rank(T, H) == 2
    code, out, _ = run(capsys, "gen", "many-labels", "4", "2")
    bundle = json.loads(out)
    H = load_class(json.dumps(bundle["class"]))
    T = load_tree(json.dumps(bundle["tree"]))
    assert H.num_labels == 3 and depth(T) <= 8
    assert (H.table, depth(T)) == (gen_many_labels(4, 2)[0].table, depth(gen_many_labels(4, 2)[1]))
    code, out, _ = run(capsys, "gen", "box", "2", "3")
    lat = lattice_from_dict(json.loads(out)["lattice"])
    assert pivot_dimension(lat) == 2 and vc_dimension(lat) == 4


def test_gen_errors(capsys):
    code, _, err = run(capsys, "gen", "fin-deltas")
    assert code == 1 and "ParseError" in err
    code, _, err = run(capsys, "gen", "fin-deltas", "1")
    assert code == 1 and "OutOfRange" in err


@pytest.mark.parametrize("argv", [["invariants", "{f}", "--al", "3", "--json"],
                                  ["simulate", "{f}", "--learner", "aoa", "--horizon", "3"],
                                  ["gen", "many-labels", "4", "2"],
                                  ["build-hn", "{f}", "--json"]])
def test_outputs_are_reproducible(capsys, fd2, argv):
    argv = [a.replace("{f}", fd2) for a in argv]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0


def test_apple_reduce(capsys, tmp_path):
    path = tmp_path / "apple.json"
    path.write_text(dump_class(apple_class([(1, 0), (0, 1)])))
    code, out, _ = run(capsys, "apple-reduce", str(path), "--horizon", "3", "--json")
    payload = json.loads(out)
    assert code == 0 and payload["apple_minimax"] == payload["ambiguous_minimax"] == 1
    reduced = load_class(json.dumps(payload["class"]))
    assert reduced.table == gen_fin_deltas(2)[0].table
    code, _, err = run(capsys, "apple-reduce", str(path.parent / "missing.json"))
    assert code == 1


def test_apple_reduce_rejects_non_apple(capsys, fd2):
    code, _, err = run(capsys, "apple-reduce", fd2)
    assert code == 1 and "InvalidClass" in err


def test_build_hn(capsys, fd2):
    code, out, _ = run(capsys, "build-hn", fd2, "--horizon", "2", "--json")
    payload = json.loads(out)
    assert code == 0 and payload["horizon"] == 2
    assert payload["before_dedup"] == 1 + 2 * 2
    assert payload["hypotheses"] == len(payload["class"]["hypotheses"])
    code, out, _ = run(capsys, "build-hn", fd2)
    assert "words: " in out
    code, _, err = run(capsys, "build-hn", fd2, "--horizon", "9")
    assert code == 1 and "BudgetExceeded" in err


def test_tree_verbs(capsys, tmp_path):
    run(capsys, "gen", "fin-deltas", "3", "--out", str(tmp_path))
    cls, tree = str(tmp_path / "class.json"), str(tmp_path / "tree.json")
    code, out, _ = run(capsys, "tree", "validate", cls, tree)
    assert code == 0 and out.strip() == "valid"
    code, out, _ = run(capsys, "tree", "rank", cls, tree, "--json")
    assert json.loads(out)["rank"] == 2
    H = load_class((tmp_path / "class.json").read_text())
    for mode in ("frugal", "uniform", "arity"):
        code, out, _ = run(capsys, "tree", "trim", cls, tree, "--mode", mode)
        assert code == 0 and rank(load_tree(out), H) >= 2
    code, out, _ = run(capsys, "tree", "compact", cls, tree, "--horizon", "1")
    C = load_tree(out)
    assert rank(C, H) >= 1 and depth(C) <= 1
    code, _, err = run(capsys, "tree", "compact", cls, tree)
    assert code == 1 and "--horizon" in err


def test_tree_validate_reports_violations(capsys, tmp_path):
    run(capsys, "gen", "fin-deltas", "2", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "tree.json").read_text())
    doc["leaf_hypothesis"] = {"1": 0, "2": 0}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    with pytest.raises(SystemExit):
        main(["tree", "validate", str(tmp_path / "class.json"), str(bad)])
    out, _ = capsys.readouterr()
    assert "consistency" in out
