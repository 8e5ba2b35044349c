import json

import pytest

from toricdiag.cli import dumps, main, parse_rational_list
from toricdiag.resolution import ChainComplex


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_resolve_p2_from_examples_path(capsys):
    code, data = run_json(capsys, "resolve", "examples/p2.json")
    assert code == 0
    assert data["ranks"] == [1, 3, 2]
    assert data["d_squared"] is True


def test_resolve_p1_mod_six(capsys):
    code, data = run_json(capsys, "resolve", "examples/p1.json", "--group", "6")
    assert code == 0
    assert data["ranks"] == [6, 6]
    cc = ChainComplex.from_json(data)
    from toricdiag.resolution import dense

    M = dense(cc, 1)
    assert len(M) == 6 and all(len(row) == 6 for row in M)


def test_cech_vanishing(capsys):
    code, data = run_json(capsys, "cech", "--weights", "1,2", "--twist", "-1")
    assert code == 0
    assert data == {"h0": 0, "h1": 0}


def test_cech_from_corpus_weights(capsys):
    _, data = run_json(capsys, "cech", "--weights", "p12", "--twist", "-3")
    assert data == {"h0": 0, "h1": 1}


def test_cech_exceptional_failure_exits_two(capsys):
    code, data = run_json(capsys, "cech", "exceptional", "--weights", "1,2", "--twists", "0,1,2,3")
    assert code == 2 and data["exceptional"] is False
    code, data = run_json(capsys, "cech", "exceptional", "--weights", "1,2", "--twists", "0,1,2")
    assert code == 0 and data["exceptional"] is True


def test_cech_koszul_and_ext(capsys):
    code, data = run_json(capsys, "cech", "koszul", "--weights", "1,2", "--degree", "8")
    assert code == 0 and data["exact"]
    code, data = run_json(capsys, "cech", "ext", "--weights", "1,2", "--from", "3", "--twist", "0")
    assert data["ext"] == [{"degree": 0, "dim": 0}, {"degree": 1, "dim": 1}]


@pytest.mark.parametrize("argv", [
    ["cech", "--weights", "2,4", "--twist", "0"],
    ["resolve", "no_such_fan"],
    ["resolve", "p2", "--epsilon", "1/2"],
    ["frobnicate"],
    ["morita-check", "--n", "1", "--group", "4", "--weights", "2"],
])
def test_input_errors_exit_three(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 3
    if out:
        assert json.loads(out)["error"]["code"]


def test_non_admissible_complex_exits_two(capsys):
    code, data = run_json(capsys, "resolve", "bl2p2")
    assert code == 2
    assert data["checks"]["admissible"] is False


def test_resource_bounds_exit_four(capsys):
    # the character twists of the mu4 quotient are never killed by the irrelevant ideal
    code, data = run_json(capsys, "cokernel", "mu4", "--kmax", "2")
    assert code == 4
    assert data["error"]["code"] == "kmax_exhausted"
    assert len(data["failures"]) == 3
    code, data = run_json(capsys, "arrangement", "build", "p1", "--group", "6", "--window", "1")
    assert code == 4
    assert data["error"]["code"] == "window_too_small"
    code, data = run_json(capsys, "cokernel", "blp2", "--kmax", "0")
    assert code == 3
    code, data = run_json(capsys, "cokernel", "blp2")
    assert code == 0
    assert data["extra_monomials"] == ["y2/x2"]
    assert all(c["k"] == 1 for c in data["certificates"])


def test_repeated_runs_are_byte_identical(capsys):
    for argv in (["resolve", "blp2"], ["arrangement", "build", "p1", "--group", "6"], ["fan", "check", "bl2p2"]):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


def test_json_round_trip(capsys):
    _, out = run(capsys, "resolve", "blp2")
    data = json.loads(out)
    assert dumps(data) == out
    assert dumps(ChainComplex.from_json(data).to_json() | {"checks": data["checks"], "d_squared": True}) == out


def test_verify_stored_complex(capsys, tmp_path):
    path = tmp_path / "p2.json"
    assert main(["resolve", "p2", "--out", str(path)]) == 0
    capsys.readouterr()
    code, data = run_json(capsys, "verify", "d2", str(path))
    assert code == 0 and data["ok"]
    code, data = run_json(capsys, "verify", "exactness", str(path))
    assert code == 0 and data["ok"]


def test_verify_rejects_tampered_complex(capsys, tmp_path):
    path = tmp_path / "p2.json"
    main(["resolve", "p2", "--out", str(path)])
    capsys.readouterr()
    data = json.loads(path.read_text())
    bad = ChainComplex.from_json(data)
    from toricdiag.resolution import flip_sign

    path.write_text(dumps(flip_sign(bad, 1).to_json()))
    code, out = run_json(capsys, "verify", "d2", str(path))
    assert code == 2 and out["ok"] is False


def test_verify_properties_is_seeded(capsys):
    a = run(capsys, "verify", "properties", "blp2", "--seed", "7", "--trials", "30")
    b = run(capsys, "verify", "properties", "blp2", "--seed", "7", "--trials", "30")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["seed"] == 7


def test_fan_check(capsys):
    code, data = run_json(capsys, "fan", "check", "bl2p2")
    assert code == 0 and data["unimodular"] is False


def test_morita_cli(capsys):
    code, data = run_json(capsys, "morita-check", "--n", "1", "--group", "4", "--weights", "1", "--degree", "6")
    assert code == 0 and data["bijection"]
    code, data = run_json(capsys, "morita-check", "--n", "2", "--group", "2,3", "--weights", "1,0;0,1",
                          "--degree", "2")
    assert code == 0 and data["group"] == [6]


@pytest.mark.parametrize("argv,marks", [
    (["render", "p2"], 1),
    (["render", "blp2"], 5),
    (["render", "p1", "--group", "6"], 6),
])
def test_render_svg(capsys, argv, marks):
    code, out = run(capsys, *argv)
    assert code == 0
    assert out.startswith("<svg") and out.rstrip().endswith("</svg>")
    assert out.count('class="vertex"') == marks


def test_render_rejects_rank_three(capsys, tmp_path):
    path = tmp_path / "p3.json"
    path.write_text(json.dumps({"dim": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
                                "max_cones": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]}))
    code, out = run(capsys, "render", str(path), "--window", "1")
    assert code == 3


def test_rational_parsing():
    assert [str(x) for x in parse_rational_list("1/100, 0,-3/6")] == ["1/100", "0", "-1/2"]
