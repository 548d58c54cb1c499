"""Command-line front end.

Exit status: 0 definitive positive, 1 definitive negative, 2 unknown within
budget, 64 usage error, 65 parse or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import calculus, category, fixtures, model, textio
from .core import Morphism, Presentation, canonical_form, fmt_relation, fmt_word, word
from .errors import ParseError, TietzeError
from .rewriting import Budget, Proved, Refuted, Unknown, count_elements, equivalent, knuth_bendix, separate

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Output:
    """Text blocks and their JSON mirror, built side by side."""

    def __init__(self, budget: Budget):
        self.doc = textio.Document()
        self.budget = budget
        self.values = []
        self.result = {}
        self.doc.comment(budget.header()[2:])

    def add(self, value, name=None, **kw):
        kind = textio.kind_of(value)
        name = getattr(self.doc, kind)(value, name, **kw)
        self.values.append({"name": name, **textio.to_json(value)})
        return name

    def note(self, key, value, text=None):
        self.result[key] = value
        self.doc.comment(f"{key}: {text if text is not None else value}")

    def render(self, as_json: bool) -> str:
        if as_json:
            b = self.budget
            data = {
                "format": 1,
                "budget": {"expansions": b.max_expansions, "max_len": b.max_len, "max_size": b.max_size,
                           "kb_rules": b.kb_max_rules, "kb_iterations": b.kb_max_iterations,
                           "words_len": b.words_len, "close_len": b.close_len},
                "blocks": self.values,
                "result": self.result,
            }
            return json.dumps(data, indent=2, sort_keys=True) + "\n"
        return self.doc.text()


# ---------------------------------------------------------------- loading


_cache = {}


def _load(path: str) -> textio.Workspace:
    if path not in _cache:
        try:
            _cache[path] = textio.parse_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return _cache[path]


def _ref(spec: str, kind: str):
    """``path`` or ``path:name``."""
    path, name = spec, None
    if not os.path.exists(spec) and ":" in spec:
        path, name = spec.rsplit(":", 1)
    ws = _load(path)
    try:
        return ws.get(kind, name)
    except TietzeError as exc:
        raise UsageError(f"{spec}: {exc}") from None


def _word(P: Presentation, text: str):
    # a letter outside the alphabet is a validation error (exit 65)
    return P.check_word(word(text))


# ------------------------------------------------------------- verdicts


def _verdict(out: Output, P: Presentation, pname: str, res, u, v) -> int:
    if isinstance(res, Proved):
        out.add(res.derivation, "proof", context=pname)
        out.note("result", "proved", f"proved {fmt_word(u)} ~ {fmt_word(v)}")
        return EXIT_YES
    if isinstance(res, Refuted):
        out.add(res.certificate, "separation", context=pname)
        out.note("result", "refuted", f"refuted {fmt_word(u)} ~ {fmt_word(v)}")
        return EXIT_NO
    _unknown(out, res)
    return EXIT_UNKNOWN


def _unknown(out: Output, res: Unknown):
    out.note("result", "unknown", str(res))
    out.note("exhausted", res.exhausted)


def _weq(out: Output, f: Morphism, res, prefix="") -> int:
    fname = _add_morphism(out, f, "f") if not prefix else out.doc.morphism(f)
    src, tgt = out.doc.presentation(f.src), out.doc.presentation(f.tgt)
    if isinstance(res, Proved):
        cert = res.certificate
        for b, w in cert.dictionary:
            out.doc.comment(f"{prefix}dictionary {b} := {fmt_word(w)}")
        for b, d in cert.back:
            out.add(d, f"{prefix}back.{b}", context=tgt)
        for a, d in cert.forth:
            out.add(d, f"{prefix}forth.{a}", context=src)
        for i, (_, d) in enumerate(cert.relations):
            out.add(d, f"{prefix}rel.{i}", context=src)
        for t, w in cert.factor or ():
            out.doc.comment(f"{prefix}factor {t} := {fmt_word(w)}")
        for z, d in cert.factor_fit:
            out.add(d, f"{prefix}fit.{z}", context=src)
        out.note(prefix + "weq", "proved", f"{fname} is a weak equivalence (certificate validated)")
        return EXIT_YES
    if isinstance(res, Refuted):
        c = res.certificate
        if isinstance(c, model.NonInjective):
            out.add(c.target_derivation, prefix + "collapse", context=tgt)
            out.add(c.separation, prefix + "separation", context=src)
            out.note(prefix + "weq", "refuted",
                     f"not injective on the monoid: {fmt_word(c.u)} and {fmt_word(c.v)} are identified")
        else:
            out.add(c.target, prefix + "witness")
            body = ", ".join(f"{g}->{e}" for g, e in c.assignment)
            out.note(prefix + "weq", "refuted",
                     f"not surjective: {c.generator} is outside the image under {body}")
        return EXIT_NO
    out.note(prefix + "weq", "unknown", str(res.exhausted))
    return EXIT_UNKNOWN


def _add_morphism(out: Output, f: Morphism, name: str) -> str:
    out.add(f.src, "P")
    out.add(f.tgt, "Q")
    return out.add(f, name)


# -------------------------------------------------------------- commands


def cmd_show(a, out):
    for path in a.files:
        ws = _load(path)
        for kind, name in ws.order:
            v = ws.table(kind)[name]
            out.values.append({"name": name, **textio.to_json(v)})
        text = textio.render_workspace(ws)
        out.doc.blocks.append(("comment", None, [text.split("\n", 1)[1].rstrip("\n").lstrip("\n")]))
    out.note("result", "valid")
    return EXIT_YES


def cmd_canon(a, out):
    P = _ref(a.pres, "presentation")
    out.add(canonical_form(P), "canonical")
    return EXIT_YES


def cmd_coproduct(a, out):
    P, Q = _ref(a.left, "presentation"), _ref(a.right, "presentation")
    S, i0, i1 = category.coproduct(P, Q)
    out.add(S, "coproduct")
    out.add(i0, "i0")
    out.add(i1, "i1")
    return EXIT_YES


def cmd_product(a, out):
    P, Q = _ref(a.left, "presentation"), _ref(a.right, "presentation")
    S, p1, p2 = category.product(P, Q, a.max_len)
    out.add(S, "product")
    out.add(p1, "p1")
    out.add(p2, "p2")
    return EXIT_YES


def cmd_pushout(a, out):
    f, g = _ref(a.f, "morphism"), _ref(a.g, "morphism")
    S, h1, h2 = category.pushout(f, g)
    out.add(S, "pushout")
    out.add(h1, "h1")
    out.add(h2, "h2")
    return EXIT_YES


def cmd_equalizer(a, out):
    f, g = _ref(a.f, "morphism"), _ref(a.g, "morphism")
    S, e = category.equalizer(f, g)
    out.add(S, "equalizer")
    out.add(e, "e")
    return EXIT_YES


def cmd_coequalizer(a, out):
    f, g = _ref(a.f, "morphism"), _ref(a.g, "morphism")
    S, q = category.coequalizer(f, g)
    out.add(S, "coequalizer")
    out.add(q, "q")
    return EXIT_YES


def cmd_check(a, out):
    if a.predicate == "pfib-obj":
        P = _ref(a.target, "presentation")
        L = a.max_len if a.max_len is not None else 2
        v = model.is_pseudo_fibrant(P, L)
        out.add(P, "P")
        if v.witness is not None:
            w = v.witness
            out.note("witness", fmt_word(w) if all(isinstance(x, str) for x in w) else fmt_relation(w))
        out.note("result", v.status, f"{v.status} up to length {L}: {v.reason}")
        return EXIT_YES if v.status == "proved" else EXIT_NO
    f = _ref(a.target, "morphism")
    if a.predicate == "weq":
        return _weq(out, f, model.certify_weak_equivalence(f, out.budget))
    _add_morphism(out, f, "f")
    if a.predicate in ("mono", "cof"):
        ok, reason = f.is_injective, "injective on generators" if f.is_injective else "not injective on generators"
    elif a.predicate == "epi":
        ok, reason = f.is_surjective, "surjective on generators" if f.is_surjective else "not surjective on generators"
    elif a.predicate == "tfib":
        ok, reason = model.trivial_fibration_reason(f)
    else:
        ok, reason = model.pseudo_fibration_reason(f)
    status = {True: "true", False: "false", None: "unknown"}[ok]
    out.note("result", status, f"{a.predicate} {status}: {reason}")
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_UNKNOWN}[ok]


def cmd_lift(a, out):
    i, p = _ref(a.i, "morphism"), _ref(a.p, "morphism")
    f, g = _ref(a.f, "morphism"), _ref(a.g, "morphism")
    h = model.solve_lifting(i, p, f, g)
    if h is None:
        out.note("result", "none", "no lift exists")
        return EXIT_NO
    out.add(h, "lift")
    out.note("result", "lift")
    return EXIT_YES


def cmd_factor(a, out):
    f = _ref(a.f, "morphism")
    Z, i, p = model.factor_mono_tfib(f)
    _add_morphism(out, f, "f")
    out.add(Z, "Z")
    out.add(i, "i")
    out.add(p, "p")
    out.note("result", "factored", "i is a monomorphism, p a trivial fibration")
    return EXIT_YES


def cmd_kenbrown(a, out):
    w = _ref(a.f, "morphism")
    kb = model.ken_brown_cospan(w)
    _add_morphism(out, w, "w")
    out.add(kb.Z, "Z")
    out.add(kb.i, "i")
    out.add(kb.j, "j")
    out.add(kb.p, "p")
    res = model.certify_weak_equivalence(w, out.budget)
    code = _weq(out, w, res, prefix="w.")
    if isinstance(res, Proved):
        ci = model.certify_weak_equivalence(kb.i, out.budget)
        cj = model.certify_weak_equivalence(kb.j, out.budget)
        out.note("i", ci.status)
        out.note("j", cj.status)
        if not (isinstance(ci, Proved) and isinstance(cj, Proved)):
            code = EXIT_UNKNOWN
    return code


def cmd_replace(a, out):
    P = _ref(a.pres, "presentation")
    rep = model.pseudo_fibrant_replacement(P, a.words, a.close)
    out.doc.comment(f"replacement words={a.words} close={a.close}")
    out.result["words"], out.result["close"] = a.words, a.close
    pname = out.add(P, "P")
    out.add(rep.presentation, "replacement")
    out.add(rep.trace, "cells", start=pname)
    out.note("result", "replaced", f"{len(rep.trace)} J cells")
    return EXIT_YES


def _kb(out, P):
    r = knuth_bendix(P, out.budget)
    if r is None:
        out.note("result", "unknown", "completion did not finish")
        out.note("exhausted", "kb_rules/kb_iterations")
        return None
    return r


def cmd_kb(a, out):
    P = _ref(a.pres, "presentation")
    r = _kb(out, P)
    if r is None:
        return EXIT_UNKNOWN
    R, zz = r
    out.add(R.presentation(P.reflexive), "rules")
    pname = out.add(P, "P")
    out.add(zz, "completion", start=pname)
    out.note("result", "convergent", f"convergent, {len(R.rules)} rules")
    return EXIT_YES


def cmd_nf(a, out):
    P = _ref(a.pres, "presentation")
    w = _word(P, a.word)
    r = _kb(out, P)
    if r is None:
        return EXIT_UNKNOWN
    R, _ = r
    d = R.reduce(w)
    out.add(R.presentation(P.reflexive), "rules")
    out.add(d, "reduction", context="rules")
    out.note("normal_form", fmt_word(d.end))
    return EXIT_YES


def cmd_count(a, out):
    P = _ref(a.pres, "presentation")
    r = _kb(out, P)
    if r is None:
        return EXIT_UNKNOWN
    n = count_elements(r[0], a.length)
    out.note("count", n, f"{n} elements of length at most {a.length}")
    return EXIT_YES


def cmd_equiv_words(a, out):
    P = _ref(a.pres, "presentation")
    u, v = _word(P, a.u), _word(P, a.v)
    pname = out.add(P, "P")
    return _verdict(out, P, pname, equivalent(P, u, v, out.budget), u, v)


def cmd_separate(a, out):
    P = _ref(a.pres, "presentation")
    u, v = _word(P, a.u), _word(P, a.v)
    tables = tuple(t for path in a.monoid for t in _load(path).monoids.values())
    pname = out.add(P, "P")
    cert = separate(P, u, v, out.budget.max_size, tables)
    if cert is None:
        out.note("result", "none", f"no separating monoid of size at most {out.budget.max_size}")
        out.note("exhausted", "max_size")
        return EXIT_UNKNOWN
    out.add(cert, "separation", context=pname)
    out.note("result", "refuted", f"{fmt_word(u)} and {fmt_word(v)} differ")
    return EXIT_NO


def _trace_or_zigzag(spec):
    path, name = spec, None
    if not os.path.exists(spec) and ":" in spec:
        path, name = spec.rsplit(":", 1)
    ws = _load(path)
    if name is not None:
        if name in ws.zigzags:
            return ws.zigzags[name]
        return _ref(spec, "trace")
    if ws.zigzags:
        return _ref(spec, "zigzag")
    return _ref(spec, "trace")


def cmd_apply(a, out):
    t = _trace_or_zigzag(a.trace)
    segments = t.segments if isinstance(t, calculus.TietzeZigzag) else (("forward", t),)
    out.add(segments[0][1].start if segments[0][0] == "forward" else t.start, "P0")
    k = 0
    for direction, tr in segments:
        if direction == "forward":
            items = list(zip(tr.steps, tr.presentations[1:]))
            arrow = "->"
        else:
            # shown from the meeting point back towards the later presentation
            items = list(zip(reversed(tr.steps), reversed(tr.presentations[:-1])))
            arrow = "<-"
        for s, P in items:
            k += 1
            out.doc.comment(f"{arrow} {s}")
            out.add(P, f"P{k}")
    out.note("result", "valid", f"{k} steps replayed")
    return EXIT_YES


def cmd_expand(a, out):
    t = _trace_or_zigzag(a.trace)
    # expanded segments may end at larger presentations, so each is printed as its own trace
    segments = t.segments if isinstance(t, calculus.TietzeZigzag) else (("forward", t),)
    total = 0
    for k, (direction, tr) in enumerate(segments):
        e = calculus.expand_trel(tr)
        total += len(e)
        if len(segments) > 1:
            out.doc.comment(f"{direction} segment {k}")
        out.add(e, "expanded" if len(segments) == 1 else f"expanded{k}")
    out.note("result", "expanded", f"{total} steps")
    return EXIT_YES


def cmd_cospan(a, out):
    P, Q = _ref(a.left, "presentation"), _ref(a.right, "presentation")
    res = calculus.theorem1_cospan(P, Q, budget=out.budget)
    pn = out.add(P, "P")
    out.add(Q, "Q")
    qn = out.add(Q.renamed(res.renaming), "Q.renamed") if any(k != v for k, v in res.renaming.items()) else "Q"
    out.add(res.R, "R")
    out.add(res.trace_p, "left", start=pn)
    out.add(res.trace_q, "right", start=qn)
    out.note("result", "cospan", f"R has {len(res.R.gens)} generators")
    return EXIT_YES


def cmd_equiv(a, out):
    P, Q = _ref(a.left, "presentation"), _ref(a.right, "presentation")
    z = calculus.search_equivalence(P, Q, out.budget, a.max_len or 2)
    if z is None:
        out.note("result", "unknown", "no zig-zag found")
        out.note("exhausted", "expansions")
        return EXIT_UNKNOWN
    out.add(P, "P")
    out.add(Q, "Q")
    out.add(z, "zigzag")
    out.note("result", "equivalent", f"zig-zag of shape {z.shape()}")
    return EXIT_YES


def cmd_fixtures(a, out):
    corpus = fixtures.corpus(a.K)
    for name, P in corpus.items():
        out.add(P, name)
    if a.write:
        os.makedirs(a.write, exist_ok=True)
        write_examples(a.write)
    code = EXIT_YES
    for fx, u, v, expected in fixtures.tasks(a.K):
        P = corpus[fx]
        res = equivalent(P, u, v, out.budget)
        out.note(f"task {fx} {fmt_word(u)} ~ {fmt_word(v)}", res.status, f"{res.status} (expected {expected})")
        if res.status != expected:
            code = EXIT_UNKNOWN
    return code


def write_examples(directory: str) -> None:
    """The example files used in the README."""
    docs = {}
    d = textio.Document()
    d.presentation(fixtures.Z(), "Z")
    docs["z.pres"] = d
    d = textio.Document()
    P, Q = fixtures.n_pair()
    f = fixtures.n_inclusion()
    d.presentation(f.src, "N")
    d.presentation(f.tgt, "N2")
    d.morphism(f, "incl", "N", "N2")
    docs["incl.morph"] = d
    d = textio.Document()
    d.presentation(P, "N")
    d.presentation(Q, "N2")
    d.zigzag(fixtures.n_pair_zigzag(), "npair", "N", "N2")
    docs["n-pair.trace"] = d
    d = textio.Document()
    g = fixtures.chain_example()
    d.presentation(g.src, "chain")
    d.presentation(g.tgt, "chain2")
    d.morphism(g, "chain", "chain", "chain2")
    docs["chain.morph"] = d
    d = textio.Document()
    d.presentation(P, "N")
    d.presentation(Q, "N2")
    docs["n-pair.pres"] = d
    d = textio.Document()
    d.presentation(fixtures.pinf_trunc(3), "Pinf")
    d.presentation(fixtures.p_trunc(3), "P")
    docs["pinf.pres"] = d
    for name, doc in docs.items():
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(doc.text())


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    common.add_argument("--budget", type=int, help="max search expansions (default from TIETZE_BUDGET or 10000)")
    common.add_argument("--max-len", type=int, help="max word length (search) or truncation length")
    common.add_argument("--max-size", type=int, help="max monoid size for separation")
    common.add_argument("--json", action="store_true", help="emit the JSON mirror instead of text blocks")
    common.add_argument("--out", help="write output to this file")

    p = _ArgParser(prog="tietze", description="Monoid presentations, Tietze transformations and certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def add(name, fn, *args, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        for arg in args:
            sp.add_argument(arg)
        sp.set_defaults(fn=fn)
        return sp

    sp = sub.add_parser("show", parents=[common], help="validate files and print them canonically")
    sp.add_argument("files", nargs="+")
    sp.set_defaults(fn=cmd_show)
    add("canon", cmd_canon, "pres", help="canonical form of a presentation")
    add("coproduct", cmd_coproduct, "left", "right")
    add("product", cmd_product, "left", "right")
    add("pushout", cmd_pushout, "f", "g")
    add("equalizer", cmd_equalizer, "f", "g")
    add("coequalizer", cmd_coequalizer, "f", "g")
    sp = sub.add_parser("check", parents=[common], help="decide a predicate on a morphism (or pfib-obj on a presentation)")
    sp.add_argument("predicate", choices=["mono", "epi", "cof", "tfib", "pfib", "weq", "pfib-obj"])
    sp.add_argument("target")
    sp.set_defaults(fn=cmd_check)
    add("lift", cmd_lift, "i", "p", "f", "g", help="solve the lifting problem p.h = g, h.i = f")
    add("factor", cmd_factor, "f", help="factor into a monomorphism and a trivial fibration")
    add("kenbrown", cmd_kenbrown, "f")
    sp = add("replace", cmd_replace, "pres", help="truncated pseudo-fibrant replacement")
    sp.add_argument("--words", type=int, required=True)
    sp.add_argument("--close", type=int, required=True)
    add("kb", cmd_kb, "pres", help="Knuth-Bendix completion")
    add("nf", cmd_nf, "pres", "word")
    sp = add("count", cmd_count, "pres")
    sp.add_argument("length", type=int)
    add("equiv-words", cmd_equiv_words, "pres", "u", "v")
    sp = add("separate", cmd_separate, "pres", "u", "v")
    sp.add_argument("--monoid", action="append", default=[], help="file with extra monoid tables")
    add("apply", cmd_apply, "trace")
    add("expand", cmd_expand, "trace")
    add("cospan", cmd_cospan, "left", "right")
    add("equiv", cmd_equiv, "left", "right")
    sp = sub.add_parser("fixtures", parents=[common], help="print the fixture corpus and run its tasks")
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--write", metavar="DIR", help="also write the example files into DIR")
    sp.set_defaults(fn=cmd_fixtures)
    return p


def run(argv) -> tuple:
    """``(exit status, output text)``; never raises for user errors."""
    _cache.clear()
    try:
        a = build_parser().parse_args(argv)
    except UsageError as exc:
        return EXIT_USAGE, str(exc) + "\n"
    except SystemExit as exc:  # --help
        return (exc.code or 0), ""
    try:
        for flag in ("budget", "max_len", "max_size"):
            v = getattr(a, flag)
            if v is not None and v <= 0:
                raise UsageError(f"--{flag.replace('_', '-')} must be positive")
        budget = Budget.from_env(max_expansions=a.budget, max_len=a.max_len, max_size=a.max_size)
        out = Output(budget)
        code = a.fn(a, out)
    except UsageError as exc:
        return EXIT_USAGE, f"tietze: {exc}\n"
    except ParseError as exc:
        return EXIT_PARSE, f"tietze: {exc}\n"
    except TietzeError as exc:
        return EXIT_PARSE, f"tietze: {type(exc).__name__}: {exc}\n"
    text = out.render(a.json)
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return code, ""
    return code, text


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code in (EXIT_YES, EXIT_NO, EXIT_UNKNOWN) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
