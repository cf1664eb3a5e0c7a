import io
import json
import subprocess
import sys

import pytest

from boundedatl.checker import FAILS, HOLDS, UNKNOWN
from boundedatl.cli import main, overall_status
from boundedatl.fixtures import fig2_model
from boundedatl.model import parse_model, serialize_model
from boundedatl.product import build_product
from boundedatl.strategy import parse_dfst
from boundedatl.temporal import check_universal_ltl
from boundedatl.logic import parse_formula

ONE_STEP_ACCEPT = "tm\nstates q0 qa\ninitial q0\naccept qa\nalphabet 0\nblank B\ndelta q0 B -> qa 0 R\n"


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def wait_go_file(tmp_path):
    path = tmp_path / "wait_go.cgm"
    path.write_text(serialize_model(fig2_model()))
    return str(path)


def test_check_holds_with_witness(wait_go_file):
    code, out = run(["check", "--model", wait_go_file, "--formula", "<<1>> X X p",
                     "--semantics", "Fk", "--k", "2", "--state", "s0", "--witness"])
    assert code == 0
    assert "s0: Holds" in out
    assert "dfst player=1 k=2" in out
    assert "profiles examined:" in out and "elapsed:" in out


def test_check_fails(wait_go_file):
    code, _ = run(["check", "--model", wait_go_file, "--formula", "<<1>> X X p",
                   "--semantics", "Fk", "--k", "1", "--state", "s0"])
    assert code == 1


def test_check_unknown(tmp_path):
    path = tmp_path / "f3.cgm"
    assert run(["gen", "fig3", "--k", "2"])[0] == 0
    path.write_text(run(["gen", "fig3", "--k", "2"])[1])
    code, out = run(["check", "--model", str(path), "--formula", "<<1>> F p",
                     "--semantics", "F", "--max-k", "1", "--state", "s0"])
    assert code == 2 and "Unknown" in out


def test_syntax_error_exit(wait_go_file, capsys):
    code, _ = run(["check", "--model", wait_go_file, "--formula", "p &"])
    assert code == 3
    assert "error" in capsys.readouterr().err


def test_inconsistent_flags(wait_go_file):
    assert run(["check", "--model", wait_go_file, "--formula", "<<1>> X p", "--k", "2"])[0] == 3
    assert run(["check", "--model", wait_go_file, "--formula", "<<1>> X p",
                "--semantics", "Fk", "--max-k", "2", "--k", "1"])[0] == 3


def test_usage_error_exit():
    with pytest.raises(SystemExit) as exc:
        main(["check"], io.StringIO())
    assert exc.value.code == 3


def test_json_witness_round_trips(wait_go_file):
    code, out = run(["check", "--model", wait_go_file, "--formula", "<<1>> X X X p",
                     "--semantics", "Fk", "--k", "3", "--state", "s0", "--witness", "--json"])
    assert code == 0
    rec = json.loads(out)
    assert rec["verdict"] == HOLDS and rec["semantics"] == "IF3"
    d = parse_dfst(rec["witness"]["1"])
    ps = build_product(fig2_model(), {1: d}, ["s0"])
    assert check_universal_ltl(ps, parse_formula("X X X p")) == {"s0": True}


def test_validate(tmp_path, wait_go_file):
    assert run(["validate", wait_go_file]) == (0, "ok\n")
    gap = serialize_model(fig2_model()) + "obs 1 { s0 } { s1 }\n"
    path = tmp_path / "gap.cgm"
    path.write_text(gap)
    code, out = run(["validate", str(path)])
    assert code == 3 and "does not cover s2" in out
    assert run(["validate", str(tmp_path / "missing.cgm")])[0] == 3


def test_gen(tmp_path):
    code, out = run(["gen", "fig1"])
    assert code == 0 and parse_model(out).states == ("s0", "s1")
    assert run(["gen", "fig3", "--k", "0"])[0] == 3
    assert run(["gen", "fig3"])[0] == 3
    tm = tmp_path / "acc.tm"
    tm.write_text(ONE_STEP_ACCEPT)
    code, out = run(["gen", "tm", "--tm", str(tm)])
    assert code == 0
    model = tmp_path / "gadget.cgm"
    model.write_text(out)
    assert run(["validate", str(model)])[0] == 0


def test_undecidable_requests(tmp_path):
    path = tmp_path / "f3.cgm"
    path.write_text(run(["gen", "fig3", "--k", "1"])[1])
    for sem in (["--semantics", "R"], ["--semantics", "F"]):
        code, _ = run(["check", "--model", str(path), "--formula", "<<1>> F p", *sem])
        assert code == 3


def test_overall_status():
    assert overall_status([HOLDS, HOLDS]) == HOLDS
    assert overall_status([HOLDS, UNKNOWN]) == UNKNOWN
    assert overall_status([UNKNOWN, FAILS]) == FAILS


def test_module_entry_point(wait_go_file):
    proc = subprocess.run(
        [sys.executable, "-m", "boundedatl", "check", "--model", wait_go_file,
         "--formula", "<<1>> X X p", "--semantics", "Fk", "--k", "2", "--state", "s0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "Holds" in proc.stdout
