import json

import pytest

from sextic.cli import build_parser, main, parse_singularities
from sextic.config import REPO_ROOT
from sextic.errors import DomainError

FIXTURES = REPO_ROOT / "data" / "fixtures"


def _run(capsys, *argv):
    code = main([*argv, "--no-log"])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "target, expected",
    [("E6", "<2/3>"), ("A1", "<-1/2>"), ("E8", "0"), ("D4", "V(2)"), ("2A1", "<-1/2>+<-1/2>")],
)
def test_discr_of_root_systems(capsys, target, expected):
    code, out, _ = _run(capsys, "discr", target)
    assert code == 0
    assert out.strip() == expected


def test_discr_of_gram_file_and_reduced_form(capsys):
    code, out, _ = _run(capsys, "discr", str(FIXTURES / "E6.gram"))
    assert code == 0
    assert out.strip() == "<2/3>"
    code, out_m, _ = _run(capsys, "discr", "M(1,0,2)")
    code, out_g, _ = _run(capsys, "discr", "--json", "M(1,0,2)")
    assert json.loads(out_g)["discriminant"] == out_m.strip()


@pytest.mark.parametrize("form, value", [("<1/2>", 1), ("<2/3>", 2), ("U(2)", 0), ("V(2)", 4)])
def test_brown(capsys, form, value):
    code, out, _ = _run(capsys, "brown", form)
    assert code == 0
    assert out.strip() == f"gauss: {value}, blocks: {value}"


def test_genus2(capsys):
    code, out, _ = _run(capsys, "genus2", "--det", "8", "--discr", "<1/2>+<1/4>", "--json")
    assert code == 0
    rows = json.loads(out)
    assert [row["N"] for row in rows] == ["M(1,0,2)"]
    assert rows[0]["case"] == "b=0"
    assert rows[0]["disorienting"] is True


def test_genus2_determinant_mismatch(capsys):
    code, _, err = _run(capsys, "genus2", "--det", "9", "--discr", "<1/2>+<1/4>")
    assert code == 1
    assert "error:" in err


def test_classify_json(capsys):
    code, out, _ = _run(capsys, "classify", "D19", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["sigma"] == "D19"
    assert payload["class_count"] == 1
    assert payload["configurations"][0]["complement"]["representatives"] == ["M(1,0,2)"]


def test_classify_text(capsys):
    code, out, _ = _run(capsys, "classify", "A18+A1")
    assert code == 0
    assert "═══ A18+A1" in out
    assert "rigid isotopy classes: 3" in out


@pytest.mark.parametrize("argv", [["classify", "A20"], ["classify", "B3"], ["brown", "<1/3>"], ["discr", "X1"]])
def test_invalid_input_exits_with_one(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_bound_exceeded_exits_with_two(capsys):
    code, _, err = _run(capsys, "brown", "<1/2>+<1/4>+<1/8>", "--max-group-order", "16")
    assert code == 2
    assert "bound" in err


def test_event_log(tmp_path, capsys):
    config = tmp_path / "config.yaml"
    log = tmp_path / "events.jsonl"
    config.write_text(f"events_path: {log}\n", encoding="utf-8")
    assert main(["discr", "E6", "--config", str(config)]) == 0
    assert main(["classify", "A21", "--config", str(config)]) == 1
    capsys.readouterr()
    records = [json.loads(line) for line in log.read_text(encoding="utf-8").splitlines()]
    assert [r["command"] for r in records] == ["discr", "classify"]
    assert [r["exit_code"] for r in records] == [0, 1]
    assert records[0]["argument"] == "E6"
    assert "error" in records[1]


def test_parse_singularities():
    assert parse_singularities("A19").mu == 19
    with pytest.raises(DomainError):
        parse_singularities("2A10")


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


@pytest.mark.slow
def test_quick_selftest(capsys):
    code, out, _ = _run(capsys, "selftest", "--quick")
    assert code == 0
    assert "FAIL" not in out
