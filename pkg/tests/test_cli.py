import io
import json
import shutil
import subprocess
import sys

import pytest

from logfield.dsl.cli import main, repl
from logfield.dsl.evaluator import Env


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestEval:
    def test_text(self):
        assert run("eval", "terms(D(log), 1)") == (0, "x^-1\n")

    def test_json(self):
        code, out = run("eval", "terms(1/(1-x^-1), 4)", "--json")
        assert code == 0
        obj = json.loads(out)
        assert [t["coeff"] for t in obj["terms"]] == ["1", "1", "1", "1"]
        assert [t["mono"] for t in obj["terms"]] == [{}, {"0": "-1"}, {"0": "-2"}, {"0": "-3"}]

    def test_terms_flag(self):
        assert run("eval", "1/(1-x^-1)", "--terms", "2") == (0, "1 + x^-1 + ...\n")

    def test_json_error(self):
        code, out = run("eval", "complog(f, x^2)", "--json")
        assert code == 1
        assert json.loads(out) == {"error": "UnboundName", "detail": "unbound name 'f' (line 1, column 9)"}

    def test_syntax_error_exit_code(self, capsys):
        code, _ = run("eval", "x^^2")
        assert code == 1
        assert "SyntaxError" in capsys.readouterr().err

    def test_budget_flag_names_itself(self):
        code, out = run("--max-steps", "200", "eval", "terms(1/(1-x^-1) * (1 - x^-1) - 1, 1)", "--json")
        assert code == 1
        err = json.loads(out)
        assert err["error"] == "BudgetExhausted" and "--max-steps" in err["detail"]

    def test_env_budget(self, monkeypatch):
        monkeypatch.setenv("LOGFIELD_BUDGET", "3")
        code, out = run("eval", "terms(1/(1-x^-1), 5)", "--json")
        assert code == 1 and json.loads(out)["error"] == "BudgetExhausted"

    def test_deterministic(self):
        args = ("eval", "let g = x^2*(1+x^-1); complog(exp^-1 + exp^-2, g)", "--json", "--terms", "12")
        assert run(*args) == run(*args)


class TestCheckAsymptotic:
    def test_geom_passes(self):
        code, out = run("check-asymptotic", "--germ", "geom", "--series", "1/(1-x^-1)",
                        "--mono", "x^-3", "--grid", "100,1000")
        assert code == 0
        rep = json.loads(out)
        assert rep["verdict"] == "pass" and rep["decreasing"] is True
        assert rep["ratios"][0] == pytest.approx(1.0101e-2, rel=1e-4)

    def test_non_expansion_fails(self):
        code, out = run("check-asymptotic", "--germ", "exp", "--series", "1", "--mono", "1")
        assert code == 1 and json.loads(out)["verdict"] == "fail"

    def test_bad_germ(self):
        code, out = run("check-asymptotic", "--germ", "nope", "--series", "1", "--mono", "1")
        assert code == 1 and json.loads(out)["error"] == "MalformedInput"


class TestScriptsAndRepl:
    def test_run_script(self, tmp_path):
        script = tmp_path / "demo.lf"
        script.write_text("# geometric series\nlet g = 1/(1 - x^-1)\nterms(g, 3)\nord(exp^-2)\n", encoding="utf-8")
        assert run("run", str(script)) == (0, "1 + x^-1 + x^-2\n2\n")

    def test_run_missing_file(self, tmp_path):
        code, _ = run("run", str(tmp_path / "missing.lf"))
        assert code == 1

    def test_repl_continues_after_errors(self, capsys):
        inp = io.StringIO("let a = x^2\nterms(a + 1, 5)\nterms(b, 1)\ncmp(exp^-1, x^-1)\n:quit\nx\n")
        out = io.StringIO()
        assert repl(Env(), inp=inp, out=out) == 0
        assert out.getvalue() == "x^2 + 1\nless\n"
        assert "UnboundName" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("logfield") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["logfield", "eval", "terms(geom(x^-1), 4)"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "1 + x^-1 + x^-2 + x^-3\n"


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "logfield.dsl.cli", "eval", "ord(exp^3)"],
                          capture_output=True, text=True, check=False)
    assert proc.stdout == "-3\n"
