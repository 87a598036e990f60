"""Builds modules from a parsed ``.ksv`` session and runs its directives into a report."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import bgg
from . import linalg as la
from .dsl import Directive, KoszulDecl, LambdaDecl, ParseError, Session, parse
from .extdg import DgLambdaModule, ExteriorAlgebra, dual, tensor_k, validate
from .koszul import (GradedBase, KoszulData, KoszulDgModule, dagger_support, reduce_t,
                     rhom_support, support_E, tensor_support_lambda, tor_containment_check)
from .modengine import resolve_and_tor
from .polyring import PolyRing
from .varieties import VarietyHandle, join

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def default_window() -> int:
    raw = os.environ.get("KSV_DEFAULT_WINDOW", "6")
    try:
        w = int(raw)
    except ValueError:
        raise ValueError(f"KSV_DEFAULT_WINDOW must be an integer, got {raw!r}") from None
    if w < 0:
        raise ValueError("KSV_DEFAULT_WINDOW must be nonnegative")
    return w


class SemanticError(ParseError):
    """Well-formed input that does not describe valid data."""


@dataclass
class Context:
    session: Session
    modules: dict                       # name -> DgLambdaModule | KoszulDgModule
    data: KoszulData | None = None
    lines: dict = field(default_factory=dict)

    def lambda_level(self, name) -> DgLambdaModule:
        m = self.modules[name]
        return reduce_t(m) if isinstance(m, KoszulDgModule) else m


# semantic pass ------------------------------------------------------------------

def _constant(p, where, line):
    if p and p.degree() > 0:
        raise SemanticError(f"{where}: coefficient {p} must be a constant", line, 1)
    return p.constant_term()


def _lambda_matrix(F, n, index, entries, where, line):
    X = la.zeros(F, n, n)
    for e in entries:
        c = index[e.src]
        for coeff, tgt in e.terms:
            r = index[tgt]
            X[r, c] = F.add(X[r, c], _constant(coeff, where, line))
    return X


def _build_lambda(decl: LambdaDecl, F, c_fixed):
    c = c_fixed if c_fixed is not None else max(i for i, _ in decl.actions)
    for i, _ in decl.actions:
        if i > c:
            raise SemanticError(f"module {decl.name}: e{i} exceeds the number of generators c = {c}",
                                decl.line, 1)
    alg = ExteriorAlgebra(c, field=F)
    names = [b for b, _ in decl.basis]
    index = {b: k for k, b in enumerate(names)}
    n = len(names)
    d = _lambda_matrix(F, n, index, decl.d, f"module {decl.name}, d", decl.line)
    acts = [la.zeros(F, n, n) for _ in range(c)]
    for i, entries in decl.actions:
        acts[i - 1] = _lambda_matrix(F, n, index, entries, f"module {decl.name}, e{i}", decl.line)
    M = DgLambdaModule(alg, [deg for _, deg in decl.basis], d, acts, names)
    v = validate(M)
    if not v:
        raise SemanticError(f"module {decl.name} is not a DG Λ-module: {v.failure}", decl.line, 1)
    return M


def _koszul_matrix(base, n, index, entries):
    R = base.ring
    X = [[R.zero() for _ in range(n)] for _ in range(n)]
    for e in entries:
        c = index[e.src]
        for coeff, tgt in e.terms:
            r = index[tgt]
            X[r][c] = base.reduce(X[r][c] + coeff)
    return X


def _build_koszul(decl: KoszulDecl, data: KoszulData):
    for i, _ in decl.sigmas:
        if i > data.c:
            raise SemanticError(f"module {decl.name}: sigma{i} exceeds c = {data.c}", decl.line, 1)
    index = {g: k for k, (g, _, _) in enumerate(decl.gens)}
    n = len(decl.gens)
    d = _koszul_matrix(data.base, n, index, decl.d)
    sig = [[[data.ring.zero()] * n for _ in range(n)] for _ in range(data.c)]
    for i, entries in decl.sigmas:
        sig[i - 1] = _koszul_matrix(data.base, n, index, entries)
    try:
        M = KoszulDgModule(data, decl.gens, d, sig)
        v = M.validate()
    except ValueError as exc:
        raise SemanticError(f"module {decl.name}: {exc}", decl.line, 1) from None
    if not v:
        raise SemanticError(f"module {decl.name} is not a DG E-module: {v.failure}", decl.line, 1)
    return M


_NEEDS_KOSZUL = {"theorem", "rhom-support"}


def build(session: Session) -> Context:
    """Second pass: construct and validate every module, check every directive."""
    F = session.field
    data = None
    if session.koszul is not None:
        if not session.ring_vars:
            raise SemanticError("koszul data needs a ring statement", 1, 1)
        R = PolyRing(session.ring_vars, None, F)
        try:
            base = GradedBase(R, [R(p) for p in session.relations])
            data = KoszulData(base, [R(p) for p in session.koszul])
        except ValueError as exc:
            raise SemanticError(str(exc), 1, 1) from None
    modules, lines = {}, {}
    for name, decl in session.modules.items():
        lines[name] = decl.line
        if isinstance(decl, KoszulDecl):
            if data is None:
                raise SemanticError(f"kmodule {name} needs a koszul statement", decl.line, 1)
            modules[name] = _build_koszul(decl, data)
        else:
            modules[name] = _build_lambda(decl, F, data.c if data else None)
    ctx = Context(session, modules, data, lines)
    for d in session.directives:
        _check_directive(ctx, d)
    return ctx


def _check_directive(ctx: Context, d: Directive):
    for a in d.args:
        if a not in ctx.modules:
            raise SemanticError(f"unknown module {a!r}", d.line, d.col)
    objs = [ctx.modules[a] for a in d.args]
    if d.what in _NEEDS_KOSZUL and not all(isinstance(m, KoszulDgModule) for m in objs):
        raise SemanticError(f"{d.what} needs kmodule arguments", d.line, d.col)
    if d.what == "rhom-support" and "gorenstein" not in ctx.session.assumptions:
        raise SemanticError("rhom-support needs 'assume gorenstein'", d.line, d.col)
    if len(objs) == 2:
        ca, cb = (ctx.lambda_level(a).algebra.c for a in d.args)
        if ca != cb:
            raise SemanticError(f"modules {d.args[0]} and {d.args[1]} have c = {ca} and {cb}",
                                d.line, d.col)
    if d.window is not None and d.window < 0:
        raise SemanticError("window must be nonnegative", d.line, d.col)


def load(text: str) -> Context:
    return build(parse(text))


# directive handlers ---------------------------------------------------------------

def _variety(h: VarietyHandle) -> dict:
    return h.describe()


def _table(d: dict) -> list:
    return [[k, d[k]] for k in sorted(d)]


def _support(ctx, name):
    m = ctx.modules[name]
    return support_E(m) if isinstance(m, KoszulDgModule) else bgg.support(m, "d")


def _compute_support(ctx, d, window):
    return None, {"support": _variety(_support(ctx, d.args[0]))}


def _compute_ext(ctx, d, window):
    E = bgg.ext_module(ctx.lambda_level(d.args[0]))
    lo = min(E.module.degrees, default=0)
    return None, {"dimensions": _table(E.hilbert_function(window, lo)),
                  "generator_degree_bound": E.generator_degree_bound}


def _compute_hilbert(ctx, d, window):
    E = bgg.ext_module(ctx.lambda_level(d.args[0]))
    hs = E.module.hilbert_series()
    kd = hs.krull_dimension
    return None, {"numerator": _table(hs.numerator), "denominator_weights": list(hs.weights),
                  "krull_dimension": None if kd == -math.inf else int(kd)}


def _tensor(ctx, d, window):
    tM, tN = (ctx.lambda_level(a) for a in d.args)
    return tensor_support_lambda(tM, tN, window)


def _oracle(o):
    return {"window": o.window, "observed": _table(o.observed), "predicted": _table(o.predicted),
            "match": o.match}


def _compute_tensor_support(ctx, d, window):
    T = _tensor(ctx, d, window)
    return None, {"join": _variety(T.join), "direct": _variety(T.direct),
                  "equal_up_to_radical": T.equal_up_to_radical, "oracle": _oracle(T.oracle)}


def _compute_join(ctx, d, window):
    return None, {"join": _variety(join(*(_support(ctx, a) for a in d.args)))}


def _compute_rhom(ctx, d, window):
    r = rhom_support(*(ctx.modules[a] for a in d.args), window=window)
    return None, {"predicted": _variety(r.predicted), "dagger_equal": r.dagger_equal,
                  "oracle": _oracle(r.oracle)}


def _verify_theorem(ctx, d, window):
    T = _tensor(ctx, d, window)
    ok = T.equal_up_to_radical and T.oracle.match
    return ok, {"join": _variety(T.join), "direct": _variety(T.direct),
                "equal_up_to_radical": T.equal_up_to_radical, "oracle": _oracle(T.oracle)}


def _verify_dual(ctx, d, window):
    m = ctx.modules[d.args[0]]
    if isinstance(m, KoszulDgModule):
        V, Vd = support_E(m), dagger_support(m)
        ok = V == Vd
        return ok, {"support": _variety(V), "dagger_support": _variety(Vd), "equal_up_to_radical": ok}
    Vd = bgg.support(m, "d")
    Vb_dual = bgg.support(dual(m), "b")
    Vb = bgg.support(m, "b")
    exact = Vd.generators() == Vb_dual.generators()
    radical = Vd == Vb
    return exact and radical, {"support_d": _variety(Vd), "support_b_of_dual": _variety(Vb_dual),
                               "support_b": _variety(Vb), "exact": exact,
                               "equal_up_to_radical": radical}


def _verify_hopf(ctx, d, window):
    M, N = (ctx.lambda_level(a) for a in d.args)
    VT = bgg.support(tensor_k(M, N), "d")
    meet = bgg.support(M, "d").intersect(bgg.support(N, "d"))
    ok = VT == meet
    return ok, {"tensor": _variety(VT), "intersection": _variety(meet), "equal_up_to_radical": ok}


def _verify_tor_bound(ctx, d, window):
    M, N = (ctx.lambda_level(a) for a in d.args)
    r = tor_containment_check(M, N, d.window)
    return r.holds, {"s": r.s, "t": r.t, "grading": r.grading, "join": _variety(r.join),
                     "pieces": [[i, _variety(h)] for i, h in sorted(r.pieces.items())],
                     "union": _variety(r.union), "contained": r.holds}


def nak_check(X, Y):
    """Supp H(X ⊗^L Y) against Supp X ∩ Supp Y for S-modules X, Y."""
    S = X.ring
    tors = resolve_and_tor(X, Y, S.nvars)
    union = VarietyHandle.empty(S)
    dims = []
    for i, T in enumerate(tors):
        if T.rank and not T.hilbert_series().is_zero():
            union = union.union(VarietyHandle(T.annihilator()))
            dims.append(i)
    meet = VarietyHandle(X.annihilator()).intersect(VarietyHandle(Y.annihilator()))
    return union, meet, dims


def _verify_nak(ctx, d, window):
    X, Y = (bgg.ext_module(ctx.lambda_level(a)).module for a in d.args)
    union, meet, nonzero = nak_check(X, Y)
    ok = union == meet
    return ok, {"tor_support": _variety(union), "intersection": _variety(meet),
                "nonzero_tor": nonzero, "equal_up_to_radical": ok}


HANDLERS = {
    ("compute", "support"): _compute_support,
    ("compute", "ext"): _compute_ext,
    ("compute", "hilbert"): _compute_hilbert,
    ("compute", "tensor-support"): _compute_tensor_support,
    ("compute", "join"): _compute_join,
    ("compute", "rhom-support"): _compute_rhom,
    ("verify", "theorem"): _verify_theorem,
    ("verify", "dual"): _verify_dual,
    ("verify", "hopf"): _verify_hopf,
    ("verify", "tor-bound"): _verify_tor_bound,
    ("verify", "nak"): _verify_nak,
}


def run_directive(ctx: Context, d: Directive, window: int) -> dict:
    w = d.window if d.window is not None else window
    entry = {"directive": d.label(), "line": d.line}
    start = time.perf_counter()
    try:
        verdict, result = HANDLERS[(d.verb, d.what)](ctx, d, w)
        entry["result"] = result
        entry["status"] = "ok" if verdict is None else ("PASS" if verdict else "FAIL")
    except Exception as exc:   # per-directive isolation: report and move on
        entry["status"] = "ERROR"
        entry["error"] = f"{type(exc).__name__}: {exc}"
    entry["_seconds"] = time.perf_counter() - start
    return entry


# execution ------------------------------------------------------------------------

_WORKER_CACHE: dict = {}


def _worker(text: str, k: int, window: int) -> dict:
    ctx = _WORKER_CACHE.get(text)
    if ctx is None:
        _WORKER_CACHE.clear()
        ctx = _WORKER_CACHE[text] = load(text)
    return run_directive(ctx, ctx.session.directives[k], window)


@dataclass
class Report:
    entries: list

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(e["status"] in ("ok", "PASS") for e in self.entries) else EXIT_FAIL

    def canonical(self) -> dict:
        items = [{k: v for k, v in e.items() if not k.startswith("_")} for e in self.entries]
        counts = {s: sum(e["status"] == s for e in items) for s in ("ok", "PASS", "FAIL", "ERROR")}
        return {"directives": items, "summary": counts}

    def to_json(self, timing: bool = False) -> str:
        obj = {"report": self.canonical()}
        if timing:
            obj["timing"] = [[e["directive"], round(e["_seconds"], 3)] for e in self.entries]
        return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self, timing: bool = False) -> str:
        out = []
        for e in self.entries:
            head = f"[{e['status']}] line {e['line']}: {e['directive']}"
            if timing:
                head += f" ({e['_seconds']:.2f}s)"
            out.append(head)
            if "error" in e:
                out.append(f"    error: {e['error']}")
            for k, v in sorted(e.get("result", {}).items()):
                out.append(f"    {k}: {_text_value(v)}")
        s = self.canonical()["summary"]
        out.append(f"summary: {s['PASS']} passed, {s['FAIL']} failed, {s['ERROR']} errors, {s['ok']} computed")
        return "\n".join(out) + "\n"


def _text_value(v):
    if isinstance(v, dict) and "ideal" in v:
        ideal = ", ".join(v["ideal"]) if v["ideal"] else "0"
        return f"V({ideal}) [{v['class']}, proj dim {v['proj_dimension']}]"
    return json.dumps(v, sort_keys=True, ensure_ascii=False)


def execute(source: str | Context, window: int | None = None, jobs: int = 1) -> Report:
    """Run every directive; results keep source order whatever ``jobs`` is."""
    if window is None:
        window = default_window()
    if isinstance(source, Context):
        ctx = source
        return Report([run_directive(ctx, d, window) for d in ctx.session.directives])
    ctx = load(source)
    n = len(ctx.session.directives)
    if jobs <= 1 or n <= 1:
        return Report([run_directive(ctx, d, window) for d in ctx.session.directives])
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_worker, source, k, window) for k in range(n)]
        return Report([f.result() for f in futures])
