import json

from magnuskit.cli import main
from magnuskit.groups import ZrHandle
from magnuskit.wreath import element_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eq_abelian_vs_metabelian(capsys):
    code, _, _ = run(capsys, "eq", "x1 x2", "x2 x1", "--r", "2", "--d", "1")
    assert code == 0
    code, _, _ = run(capsys, "eq", "x1 x2", "x2 x1", "--r", "2", "--d", "2")
    assert code == 1


def test_len_commutator(capsys):
    code, out, _ = run(capsys, "len", "x1 x2 x1^-1 x2^-1", "--r", "2", "--d", "2")
    assert code == 0
    assert out.strip() == "4 exact"


def test_len_abelianisation(capsys):
    code, out, _ = run(capsys, "len", "[1,2,-1,-2]", "--r", "2", "--d", "1")
    assert code == 0 and out.strip() == "0 exact"


def test_embed_kernel_word_gives_identity(capsys):
    # [c, x1^-1 c x1] with c = [x1, x2]: a nontrivial word in the second
    # derived subgroup, so its image at d=2 must be the identity
    from magnuskit.words import commutator, gen, to_json

    c = commutator(gen(2, 1), gen(2, 2))
    word = commutator(c, gen(2, 1).inverse() * c * gen(2, 1))
    assert len(word) > 0
    code, out, _ = run(capsys, "embed", json.dumps(to_json(word)), "--r", "2", "--d", "2")
    assert code == 0
    data = json.loads(out)
    assert data["f"] == [] and data["b"] == [0, 0]


def test_embed_round_trip(capsys):
    code, out, _ = run(capsys, "embed", "x1 x2", "--r", "2", "--d", "2")
    assert code == 0
    data = json.loads(out)
    elem = element_from_json(data, ZrHandle(2), ZrHandle(2))
    assert elem.b == (1, 1)


def test_fox_command(capsys):
    code, out, _ = run(capsys, "fox", "x1 x2 x1^-1 x2^-1", "1", "--rank", "2")
    assert code == 0
    terms = json.loads(out)
    assert {tuple(t["elem"]): t["coeff"] for t in terms} == {(): 1, (1, 2, -1): -1}
    code, out, _ = run(
        capsys, "fox", "x1^3", "1", "--rank", "2", "--quotient", '{"kind":"Zr","r":2}'
    )
    assert code == 0
    terms = json.loads(out)
    assert {tuple(t["elem"]): t["coeff"] for t in terms} == {(0, 0): 1, (1, 0): 1, (2, 0): 1}


def test_conj_command(capsys):
    code, out, _ = run(capsys, "conj", "x1 x2 x1^-1", "x2", "--r", "2", "--d", "2")
    assert code == 0
    assert json.loads(out)["conjugate"] is True
    code, out, _ = run(capsys, "conj", "x1", "x2", "--r", "2", "--d", "2")
    assert code == 1
    assert json.loads(out)["conjugate"] is False


def test_wreath_conj_command(capsys):
    u = json.dumps({"f": [{"at": [0], "val": [1]}], "b": [1]})
    v = json.dumps({"f": [{"at": [1], "val": [1]}], "b": [1]})
    code, out, _ = run(
        capsys,
        "wreath-conj",
        u,
        v,
        "--lamp",
        '{"kind":"Zr","r":1}',
        "--base",
        '{"kind":"Zr","r":1}',
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["conjugate"] and payload["witness_length_exact"]


def test_distortion_csv(capsys):
    code, out, _ = run(
        capsys,
        "distortion",
        "--group",
        '{"kind":"Zr","r":2}',
        "--x",
        "x1",
        "--n-max",
        "3",
        "--seed",
        "1",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,measured,bound,exact,witness_len,seed"
    assert lines[1].startswith("1,1,2,1,")


def test_family_command(capsys):
    code, out, _ = run(
        capsys,
        "family",
        "--kind",
        "central",
        "--group",
        '{"kind":"Zr","r":2}',
        "--x",
        "x1",
        "--y",
        "x2",
        "--n-max",
        "2",
        "--seed",
        "3",
    )
    assert code == 0
    lines = out.strip().split("\n")
    rows = [line.split(",") for line in lines[1:]]
    assert all(int(m) >= int(b) for _, m, b, *_ in rows)


def test_clf_scan_command(capsys):
    code, out, _ = run(
        capsys,
        "clf-scan",
        "--lamp",
        '{"kind":"Zr","r":1}',
        "--base",
        '{"kind":"Zr","r":2}',
        "--samples",
        "5",
        "--n-max",
        "8",
        "--seed",
        "11",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 6


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "len", "y3", "--r", "2", "--d", "2")
    assert code == 2
    code, _, _ = run(capsys, "embed", "not json [", "--r", "2", "--d", "2")
    assert code == 2


def test_beyond_cap_exit_code(capsys):
    # a lamp planted beyond the base BFS cap makes the metric unreachable
    u = json.dumps({"f": [{"at": [3, 0, 0], "val": [1]}], "b": [0, 0, 0]})
    v = json.dumps({"f": [{"at": [0, 3, 0], "val": [1]}], "b": [0, 0, 0]})
    code, _, err = run(
        capsys,
        "wreath-conj",
        u,
        v,
        "--lamp",
        '{"kind":"Zr","r":1}',
        "--base",
        '{"kind":"heisenberg","cap":2}',
    )
    assert code == 3
    assert "beyond-cap" in err


def test_bad_json_exit_code(capsys):
    code, _, _ = run(capsys, "wreath-conj", "bad", "bad", "--lamp", "{}", "--base", "{}")
    assert code == 2


def test_conj_abelian_level(capsys):
    code, out, _ = run(capsys, "conj", "x1 x2", "x2 x1", "--r", "2", "--d", "1")
    assert code == 0 and json.loads(out)["conjugate"] is True


def test_config_file_and_json_format(capsys, tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"travel_exact_max": 11, "seed": 3}))
    code, out, _ = run(
        capsys,
        "--config",
        str(cfgfile),
        "--format",
        "json",
        "distortion",
        "--group",
        '{"kind":"Zr","r":2}',
        "--x",
        "x1",
        "--n-max",
        "2",
        "--seed",
        "3",
    )
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["n"] == 1 and rows[0]["measured"] == 1


def test_bad_config_key_is_parse_error(capsys, tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"no_such_option": 1}))
    code, _, err = run(capsys, "--config", str(cfgfile), "selftest", "--list")
    assert code == 2


def test_selftest_single_check(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "fundamental-formula")
    assert code == 0
    assert "PASS" in out and "fundamental-formula" in out


def test_selftest_list(capsys):
    code, out, _ = run(capsys, "selftest", "--list")
    assert code == 0
    assert "geodesic-formula-oracle" in out
