import json
import subprocess
import sys

import pytest

from tietze import textio
from tietze.cli import run, write_examples
from tietze.fixtures import n_pair_zigzag


@pytest.fixture(scope="module")
def ex(tmp_path_factory):
    d = tmp_path_factory.mktemp("examples")
    write_examples(str(d))
    return d


def test_equiv_words_proves(ex):
    code, out = run(["equiv-words", str(ex / "z.pres"), "a a b", "a", "--budget", "1000"])
    assert code == 0
    assert out.startswith("# tietze-format 1\n")
    ws = textio.parse(out)
    d = ws.get("derivation")
    assert d.start == ("a", "a", "b") and d.end == ("a",)
    d.replay(ws.get("presentation"))


def test_check_tfib_reason(ex):
    code, out = run(["check", "tfib", str(ex / "incl.morph")])
    assert code == 1
    assert "not surjective on generators" in out


def test_apply_prints_intermediate_presentations(ex):
    code, out = run(["apply", str(ex / "n-pair.trace")])
    assert code == 0
    ws = textio.parse(out)
    names = [n for k, n in ws.order if k == "presentation"]
    assert names == [f"P{i}" for i in range(7)]
    z = n_pair_zigzag()
    fwd = z.segments[0][1].presentations
    assert [ws.presentations[f"P{i}"] for i in range(5)] == list(fwd)
    assert ws.presentations["P6"] == z.end


def test_exit_codes(tmp_path, ex):
    bad = tmp_path / "bad.pres"
    bad.write_text("# tietze-format 1\n\npresentation P\ngens a b\nrel a ->\nend\n")
    code, out = run(["show", str(bad)])
    assert code == 65 and f"{bad}:5:7:" in out
    assert run(["frobnicate"])[0] == 64
    assert run(["equiv-words", str(ex / "z.pres")])[0] == 64
    assert run(["show", str(tmp_path / "missing.pres")])[0] == 64
    assert run(["equiv-words", str(ex / "z.pres"), "a", "q"])[0] == 65
    assert run(["equiv-words", str(ex / "z.pres"), "a", "1", "--budget", "0"])[0] == 64


def test_refutation_and_unknown(ex):
    code, out = run(["equiv-words", str(ex / "z.pres"), "a a", "1", "--budget", "3"])
    assert code == 1
    ws = textio.parse(out)
    assert ws.get("hom").u == ("a", "a")
    code, out = run(["equiv-words", str(ex / "z.pres"), "a a b b", "1", "--budget", "1"])
    assert code == 2
    assert "exhausted: expansions" in out


def test_budget_env_echoed(ex, monkeypatch):
    monkeypatch.setenv("TIETZE_BUDGET", "777")
    code, out = run(["equiv-words", str(ex / "z.pres"), "a b", "1"])
    assert code == 0
    assert "# budget expansions=777 " in out


def test_json_output(ex):
    code, out = run(["equiv-words", str(ex / "z.pres"), "a a b", "a", "--json"])
    assert code == 0
    data = json.loads(out)
    kinds = [b["kind"] for b in data["blocks"]]
    assert "derivation" in kinds and data["budget"]["expansions"] == 10000


def test_out_file_and_determinism(ex, tmp_path):
    target = tmp_path / "o.txt"
    args = ["kenbrown", str(ex / "incl.morph")]
    first = run(args)
    assert first == run(args)
    code, _ = run(args + ["--out", str(target)])
    assert code == first[0] and target.read_text() == first[1]


@pytest.mark.parametrize("args,code", [
    (["show", "{ex}/pinf.pres"], 0),
    (["canon", "{ex}/z.pres"], 0),
    (["coproduct", "{ex}/z.pres", "{ex}/z.pres"], 0),
    (["product", "{ex}/z.pres", "{ex}/z.pres"], 0),
    (["check", "mono", "{ex}/incl.morph"], 0),
    (["check", "pfib", "{ex}/incl.morph"], 0),
    (["check", "weq", "{ex}/incl.morph"], 0),
    (["check", "pfib", "{ex}/chain.morph"], 0),
    (["check", "tfib", "{ex}/chain.morph"], 1),
    (["factor", "{ex}/incl.morph"], 0),
    (["kb", "{ex}/z.pres"], 0),
    (["count", "{ex}/z.pres", "3"], 0),
    (["separate", "{ex}/pinf.pres:Pinf", "a b0", "b0 a"], 1),
    (["equiv-words", "{ex}/pinf.pres:P", "a", "b0"], 0),
    (["expand", "{ex}/n-pair.trace"], 0),
    (["cospan", "{ex}/n-pair.pres:N", "{ex}/n-pair.pres:N2"], 0),
    (["equiv", "{ex}/n-pair.pres:N", "{ex}/n-pair.pres:N2"], 0),
    (["replace", "{ex}/z.pres", "--words", "1", "--close", "2"], 0),
])
def test_commands(ex, args, code):
    got, out = run([a.format(ex=ex) for a in args])
    assert got == code, out
    assert out.startswith("# tietze-format 1")
    textio.parse(out)


def test_fixtures_command(tmp_path):
    code, out = run(["fixtures", "--K", "3", "--write", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "z.pres").exists()


def test_module_entry_point(ex):
    proc = subprocess.run([sys.executable, "-m", "tietze", "check", "tfib", str(ex / "incl.morph")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "not surjective on generators" in proc.stdout
