import json
import random

import pytest

from conormal import io, cli
from conormal.cellcx import POINT
from conormal.qlinalg import euler
from conormal.sheaf import euler_char, constant
from conormal.mueu import mueu, degree
from conormal.randgen import random_complex, random_sheaf, hollow_triangle


TRI = {
    "version": 1,
    "complex": {"simplices": [[0, 1], [1, 2], [0, 2]]},
    "sheaves": {
        "k": "constant",
        "dk": {"dual_of": "k"},
        "edge": {"extend_by_zero": {"of": "k", "upset": ["0.1"]}},
    },
    "maps": {
        "rot": {"vertex_map": {"0": "1", "1": "2", "2": "0"}},
        "refl": {"vertex_map": {"0": "0", "1": "2", "2": "1"}},
        "ident": {"identity": True},
        "pt": {"target": "point"},
    },
    "cycles": {"c": {"0": 1, "0.1": -1}},
    "kernels": {"T": {"tk": "k"},
                "Tw": {"twist": {"of": {"tk": "k"}, "d": 1}}},
    "lefschetz": {
        "L_id": {"map": "ident", "sheaf": "k"},
        "L_rot": {"map": "rot", "sheaf": "k"},
        "L_refl": {"map": "refl", "sheaf": "k"},
    },
}


def write(tmp_path, doc, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


# ---------------------------------------------------------------------------
# parsing and round trips

def test_parse_instance():
    inst = io.parse_instance(TRI)
    assert len(inst.complex) == 6
    assert euler_char(inst.sheaves["k"]) == 0
    assert euler_char(inst.sheaves["edge"]) == -1
    assert inst.maps["rot"]("0.1") == "1.2"
    assert degree(inst.cycles["c"]) == 0
    assert inst.kernels["T"].euler_class == mueu(inst.sheaves["k"])


def test_sheaf_round_trip():
    rng = random.Random(73)
    for _ in range(10):
        cx = random_complex(rng, max_dim=2, max_cells=15)
        f = random_sheaf(rng, cx, max_pieces=2)
        doc = {"complex": io.describe_complex(cx),
               "sheaves": {"f": io.describe_sheaf(f)}}
        back = io.parse_instance(json.loads(json.dumps(doc)))
        g = back.sheaves["f"]
        assert g.validate() == []
        assert euler_char(g) == euler_char(f)
        assert mueu(g).weights == {str(c): w for c, w in mueu(f).weights.items()}


def test_poset_complex_round_trip():
    cx = hollow_triangle()
    back, _ = io.parse_complex(io.describe_complex(cx))
    assert back.same_as(cx)


def test_parse_errors():
    with pytest.raises(io.ParseError):
        io.parse_instance([])
    with pytest.raises(io.ParseError):
        io.parse_instance({"complex": {}})
    with pytest.raises(io.ParseError):
        io.parse_instance({"complex": {"simplices": [[0, 1]]},
                           "sheaves": {"f": {"dual_of": "missing"}}})
    with pytest.raises(io.ParseError):
        io.parse_fraction("1/0")
    with pytest.raises(io.ParseError):
        io.parse_matrix([[1], [2, 3]])


def test_fraction_round_trip():
    from fractions import Fraction
    for q in (Fraction(3, 4), Fraction(-7), Fraction(0)):
        assert io.parse_fraction(io.fmt_fraction(q)) == q


# ---------------------------------------------------------------------------
# CLI exit codes and output

def test_cli_validate_ok(tmp_path, capsys):
    path = write(tmp_path, TRI)
    assert cli.main(["validate", path]) == 0
    assert "ok" in capsys.readouterr().out


def test_cli_validate_flipped_incidence(tmp_path, capsys):
    # flip one incidence sign inside a codim-2 interval of the triangle
    from conormal.randgen import full_simplex
    doc = {"complex": io.describe_complex(full_simplex(3))}
    for entry in doc["complex"]["poset"]["incidence"]:
        if entry[0] == "0.1" and entry[1] == "0":
            entry[2] = -entry[2]
    path = write(tmp_path, doc)
    assert cli.main(["validate", path]) == 1
    out = capsys.readouterr().out
    assert "0.1" in out  # the offending pair is named


def test_cli_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.main(["validate", str(p)]) == 3


def test_cli_chi_and_cc(tmp_path, capsys):
    path = write(tmp_path, TRI)
    assert cli.main(["chi", path, "k"]) == 0
    assert capsys.readouterr().out.strip() == "0"
    assert cli.main(["chi", path, "edge"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert cli.main(["cc", path, "k"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:3] == ["+1 0", "+1 1", "+1 2"]
    assert out[3:6] == ["-1 0.1", "-1 0.2", "-1 1.2"]
    assert out[6] == "degree 0"
    assert cli.main(["cc", path, "dk"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:3] == ["-1 0", "-1 1", "-1 2"]


def test_cli_cc_zero_sheaf(tmp_path, capsys):
    doc = dict(TRI)
    doc = json.loads(json.dumps(TRI))
    doc["sheaves"]["z"] = {"stalks": {}}
    path = write(tmp_path, doc)
    assert cli.main(["cc", path, "z"]) == 0
    assert capsys.readouterr().out.strip() == "degree 0"


def test_cli_lefschetz(tmp_path, capsys):
    path = write(tmp_path, TRI)
    for name, expected in (("L_id", "0"), ("L_rot", "0"), ("L_refl", "2")):
        assert cli.main(["lefschetz", path, name]) == 0
        out = capsys.readouterr().out
        assert ("global %s" % expected) in out
        assert ("local %s" % expected) in out


def test_cli_dual_compose_expand(tmp_path, capsys):
    path = write(tmp_path, TRI)
    assert cli.main(["dual", path, "k"]) == 0
    assert "dual ok" in capsys.readouterr().out
    assert cli.main(["compose", path, "k", "k"]) == 0
    assert "compose ok" in capsys.readouterr().out
    assert cli.main(["expand", path, "Tw"]) == 0
    assert "degree 0" in capsys.readouterr().out


def test_cli_pushforward(tmp_path, capsys):
    path = write(tmp_path, TRI)
    assert cli.main(["pushforward", path, "k", "pt"]) == 0
    out = capsys.readouterr().out
    assert "pushforward ok, degree 0" in out


def test_cli_unknown_sheaf(tmp_path):
    path = write(tmp_path, TRI)
    assert cli.main(["chi", path, "nope"]) == 3


def test_cli_check_deterministic(tmp_path, capsys):
    args = ["check", "--seed", "5", "--cases", "4"]
    assert cli.main(args) == 0
    first = capsys.readouterr().out
    assert cli.main(args) == 0
    assert capsys.readouterr().out == first
    assert "suite index" in first


def test_check_report_matches_golden():
    import pathlib
    from conormal.checks import run_checks
    golden = pathlib.Path(__file__).parent / "fixtures" / "check_seed1_cases5.txt"
    r = run_checks(seed=1, cases=5)
    assert "\n".join(r.lines()) + "\n" == golden.read_text()


def test_cli_check_negative_control(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = cli.main(["check", "--seed", "1", "--cases", "4",
                     "--negative-control",
                     "--counterexample", str(tmp_path / "ce.json")])
    assert code == 2
    assert (tmp_path / "ce.json").exists()
    payload = json.loads((tmp_path / "ce.json").read_text())
    assert "detail" in payload and "suite" in payload
