import json
import random
import re
import subprocess
import sys
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from ksv import linalg as la
from ksv.cli import main
from ksv.driver import SemanticError, build, execute, load
from ksv.dsl import ParseError, parse, parse_polynomial, pretty, tokenize
from ksv.extdg import ExteriorAlgebra, random_module, trivial_module
from ksv.koszul import golden_suite
from ksv.polyring import PolyRing
from ksv.scalars import GF, QQ

F5 = GF(5)
CI = resources.files("ksv").joinpath("data/ci.ksv").read_text(encoding="utf-8")


@pytest.fixture(scope="module")
def ci_report():
    return execute(CI, window=6)


def _write(tmp_path, text, name="in.ksv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# parsing ------------------------------------------------------------------------------------

def test_golden_file_session():
    ctx = load(CI)
    assert ctx.data.c == 2
    assert ctx.data.symmetric_ring().weights == (2, 2)
    assert ctx.session.field == F5


def test_golden_file_modules_match_library_constructors():
    ctx = load(CI)
    _, mods = golden_suite(F5)
    for name, M in mods.items():
        P = ctx.modules[name]
        assert [(g.hdeg, g.intdeg) for g in P.gens] == [(g.hdeg, g.intdeg) for g in M.gens]
        assert P.d == M.d and P.sigmas == M.sigmas


def test_trivial_module_from_text():
    ctx = load("field Q\nlmodule K { basis: v:0; d: ; e1: ; e2: ; }")
    K = ctx.modules["K"]
    assert K.same_structure(trivial_module(ExteriorAlgebra(2)))


def test_unclosed_bracket_location():
    with pytest.raises(ParseError) as err:
        parse("field Fp 5\nring [x,y]\nkoszul f = [x^2")
    assert err.value.line == 3 and "expected" in err.value.message


def test_parse_error_carries_expectation():
    with pytest.raises(ParseError) as err:
        parse("field Q\nring [x, y\n")
    assert (err.value.line, err.value.col) == (2, 6)
    with pytest.raises(ParseError) as err:
        parse("field Q\nverify theorem\n")
    assert "module name" in err.value.message


def test_semantic_errors():
    with pytest.raises(SemanticError, match="unknown module"):
        load("field Q\nlmodule K { basis: v:0; d: ; e1: ; }\ncompute support Z\n")
    with pytest.raises(SemanticError, match="gorenstein"):
        load(CI.replace("assume gorenstein", ""))
    with pytest.raises(SemanticError, match="kmodule"):
        load("field Q\nlmodule K { basis: v:0; d: ; e1: ; }\ncompute rhom-support K K\n")
    with pytest.raises(SemanticError, match="not a DG"):
        load("field Q\nlmodule B { basis: a:0 b:1 c:2; d: ; e1: a -> 1*b  b -> 1*c; }\n")
    with pytest.raises(ParseError):
        load("field Fp 6\n")
    with pytest.raises(ParseError):
        load("field Fp 5\nring [x]\nkoszul f = [x^2]\nkmodule M { gens: o:(0,0); d: ; sigma1: o -> 1/5*o; }")


def test_bad_sigma_is_located():
    bad = CI.replace("sigma2: one -> 1*b  a -> -1*ab;", "sigma2: one -> y*a  a -> -1*ab;")
    with pytest.raises(SemanticError) as err:
        load(bad)
    assert err.value.line == 9 and "σ_2" in err.value.message


# round trips -----------------------------------------------------------------------------------

def test_golden_round_trip():
    s = parse(CI)
    assert parse(pretty(s)) == s
    assert pretty(parse(pretty(s))) == pretty(s)


def _lmodule_text(name, M):
    def entries(X):
        parts = []
        for c in range(M.dim):
            terms = [f"({X[r, c]})*b{r}" for r in range(M.dim) if X[r, c] != 0]
            if terms:
                parts.append(f"b{c} -> " + " + ".join(terms))
        return " ".join(parts)
    basis = " ".join(f"b{k}:{d}" for k, d in enumerate(M.degrees))
    acts = " ".join(f"e{i + 1}: {entries(A)};" for i, A in enumerate(M.actions))
    return f"lmodule {name} {{ basis: {basis}; d: {entries(M.d)}; {acts} }}\n"


@given(st.integers(0, 10**6), st.sampled_from([QQ, F5]))
def test_random_module_round_trip(seed, F):
    rng = random.Random(seed)
    alg = ExteriorAlgebra(rng.choice([2, 3]), field=F)
    M = random_module(alg, rng, 6, with_differential=rng.random() < .5)
    if M.dim == 0:
        return
    head = "field Q\n" if F == QQ else "field Fp 5\n"
    text = head + _lmodule_text("M", M) + "compute support M\nverify dual M window 3\n"
    s = parse(text)
    assert parse(pretty(s)) == s
    assert build(parse(pretty(s))).modules["M"].same_structure(M)


@given(st.lists(st.tuples(st.fractions(max_denominator=9), st.tuples(st.integers(0, 3), st.integers(0, 3))),
                max_size=5))
def test_polynomial_round_trip(terms):
    R = PolyRing(["x", "y"])
    p = sum((R.monomial(e, c) for c, e in terms), R.zero())
    assert parse_polynomial(str(p), R) == p


# fuzzing ---------------------------------------------------------------------------------------------

def _mutants(n, seed):
    toks = [t.text for t in tokenize(CI) if t.kind != "eof"]
    pool = sorted(set(toks)) + ["0", "-3", "99", "7/0", "^", "{", ")", "sigma9", "e0", "@"]
    rng = random.Random(seed)
    for _ in range(n):
        ts = list(toks)
        for _ in range(rng.randint(1, 3)):
            k = rng.randrange(len(ts))
            op = rng.random()
            if op < .33:
                del ts[k]
            elif op < .66:
                ts[k] = rng.choice(pool)
            else:
                ts.insert(k, rng.choice(pool))
        yield " ".join(ts)


def test_fuzzed_inputs_never_crash():
    for src in _mutants(1500, 7):
        try:
            load(src)
        except ParseError as exc:
            assert exc.line >= 1 and exc.col >= 1 and exc.message


def test_fuzzed_numbers_never_crash():
    rng = random.Random(8)
    spots = [m.start() for m in re.finditer(r"\d", CI)]
    for _ in range(300):
        chars = list(CI)
        for _ in range(rng.randint(1, 2)):
            chars[rng.choice(spots)] = rng.choice("0123456789")
        try:
            load("".join(chars))
        except ParseError:
            pass


def test_cli_fuzz_exit_code(tmp_path, capsys):
    seen = 0
    for src in _mutants(200, 9):
        try:
            load(src)
            continue
        except ParseError:
            pass
        path = _write(tmp_path, src)
        assert main(["check", path]) == 2
        err = capsys.readouterr().err
        assert re.match(r".*:\d+:\d+: error: .+", err)
        seen += 1
        if seen == 20:
            break
    assert seen == 20


# execution and reports ----------------------------------------------------------------------------

def _entry(report, label):
    return next(e for e in report.entries if e["directive"] == label)


def test_theorem_on_tor_independent_pair(ci_report):
    e = _entry(ci_report, "verify theorem M1 M2 window 6")
    assert e["status"] == "PASS"
    assert e["result"]["join"]["ideal"] == [] and e["result"]["direct"]["ideal"] == []


def test_hopf_on_cyclic_quotients(ci_report):
    e = _entry(ci_report, "verify hopf A B")
    assert e["status"] == "PASS"
    assert e["result"]["tensor"]["class"] == "cone-point"
    assert e["result"]["intersection"]["class"] == "cone-point"


def test_all_golden_directives_pass(ci_report):
    assert ci_report.exit_code == 0
    assert all(e["status"] in ("ok", "PASS") for e in ci_report.entries)
    supports = [e["result"]["support"]["ideal"] for e in ci_report.entries
                if e["directive"].startswith("compute support")]
    assert supports == [["chi2"], ["chi1"], [], ["chi1", "chi2"]]


def test_report_is_deterministic_and_order_preserving():
    a = execute(CI, window=6).to_json()
    b = execute(CI, window=6).to_json()
    c = execute(CI, window=6, jobs=3).to_json()
    assert a == b == c
    labels = [e["directive"] for e in json.loads(a)["report"]["directives"]]
    assert labels == [d.label() for d in parse(CI).directives]


def test_timing_stays_out_of_canonical_section(ci_report):
    obj = json.loads(ci_report.to_json(timing=True))
    assert "timing" in obj and "_seconds" not in json.dumps(obj["report"])


def test_directive_error_is_isolated(tmp_path, capsys):
    text = ("field Fp 5\n"
            "lmodule Q { basis: one:0 u:1 w:1; d: ; e1: one -> 1*u; e2: one -> 1*w; }\n"
            "lmodule K { basis: v:0; d: ; e1: ; e2: ; }\n"
            "verify tor-bound Q K window 0\n"
            "compute support K\n")
    assert main(["run", _write(tmp_path, text)]) == 1
    out = capsys.readouterr().out
    assert "[ERROR]" in out and "s + t = 1" in out and "[ok]" in out


def test_exit_code_for_input_error(tmp_path, capsys):
    assert main(["run", _write(tmp_path, "field Q\ncompute support Z\n")]) == 2
    assert main(["check", str(tmp_path / "missing.ksv")]) == 2


def test_default_window_from_environment(tmp_path, capsys, monkeypatch):
    path = _write(tmp_path, "field Q\nlmodule K { basis: v:0; d: ; e1: ; e2: ; }\ncompute ext K\n")
    monkeypatch.setenv("KSV_DEFAULT_WINDOW", "3")
    assert main(["run", path, "--format", "json"]) == 0
    dims = json.loads(capsys.readouterr().out)["report"]["directives"][0]["result"]["dimensions"]
    assert dims == [[0, 1], [1, 0], [2, 2], [3, 0]]
    assert main(["run", path, "--format", "json", "--window", "1"]) == 0
    dims = json.loads(capsys.readouterr().out)["report"]["directives"][0]["result"]["dimensions"]
    assert dims == [[0, 1], [1, 0]]


def test_cli_join(capsys):
    # [DERIVED] elimination by hand: the join of two points of P^1 is everything
    assert main(["join", "--vars", "2", "--weights", "2,2", "--ideal", "chi1", "--ideal", "chi2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["join"]["ideal"] == [] and out["join"]["proj_dimension"] == 1
    assert main(["join", "--vars", "2", "--ideal", "chi1", "--ideal", "chi1^2"]) == 0
    # a representative of the radical class: (chi1^2) is as good as (chi1)
    j = json.loads(capsys.readouterr().out)["join"]
    assert j["ideal"] in (["chi1"], ["chi1^2"]) and j["proj_dimension"] == 0
    assert main(["join", "--vars", "2", "--weights", "3", "--ideal", "chi1", "--ideal", "chi2"]) == 2


def test_console_entry_point(tmp_path):
    path = _write(tmp_path, CI)
    r = subprocess.run([sys.executable, "-m", "ksv", "check", path], capture_output=True, text=True)
    assert r.returncode == 0 and "8 modules" in r.stdout


def test_canonical_format_alias(tmp_path, capsys):
    path = tmp_path / "m.ksv"
    path.write_text("field Q\nlmodule K { basis: v:0; d: ; e1: ; }\ncompute support K\n")
    assert main(["run", str(path), "--format", "json"]) == 0
    plain = capsys.readouterr().out
    assert main(["run", str(path), "--format", "json-like-canonical"]) == 0
    assert capsys.readouterr().out == plain
    assert json.loads(plain)["report"]["summary"]["ok"] == 1
