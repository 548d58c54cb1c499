"""Block text format and its JSON mirror.

A file starts with ``# tietze-format 1`` and holds named blocks::

    presentation Z
    gens a b
    rel a b -> 1
    reflexive
    end

Other block kinds: ``morphism`` (``from``/``to``/``map x -> y``),
``derivation`` (``in``/``start``/``step`` lines), ``monoid`` (``unit``/``mul i: ...``),
``trace`` (``from`` then one step per line) and ``zigzag`` (``forward`` and
``backward from <name>`` section headers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .calculus import TietzeTrace, TietzeZigzag, Tctxt, Tgen, Trefl, Trel, Tsym, Ttrans
from .core import (
    RESERVED,
    Explicit,
    Morphism,
    Presentation,
    Pullback,
    Union,
    fmt_relation,
    fmt_word,
)
from .errors import ParseError, TietzeError
from .monoids import MonoidTable
from .rewriting import BWD, FWD, Derivation, DerivationStep, HomCertificate

HEADER = "# tietze-format 1"
KINDS = ("presentation", "morphism", "derivation", "monoid", "trace", "zigzag", "hom")

# ------------------------------------------------------------------ lexing


@dataclass
class _Tok:
    text: str
    col: int


@dataclass
class _Line:
    no: int
    toks: list

    @property
    def head(self) -> str:
        return self.toks[0].text

    @property
    def words(self) -> list:
        return [t.text for t in self.toks]


def _lex(text: str) -> list:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = []
        i = 0
        while i < len(raw):
            if raw[i].isspace():
                i += 1
                continue
            j = i
            while j < len(raw) and not raw[j].isspace():
                j += 1
            if raw[i] == "#":
                break
            toks.append(_Tok(raw[i:j], i + 1))
            i = j
        if toks:
            out.append(_Line(no, toks))
    return out


@dataclass
class _Block:
    kind: str
    name: str
    header: _Line
    body: list


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.lines = _lex(text)

    def error(self, msg, line: _Line | None = None, tok: _Tok | None = None):
        no = line.no if line else 0
        col = tok.col if tok else (line.toks[0].col if line else 0)
        return ParseError(msg, self.file, no, col)

    def blocks(self) -> list:
        out, cur = [], None
        for ln in self.lines:
            if cur is None:
                if ln.head not in KINDS:
                    raise self.error(f"expected a block keyword ({', '.join(KINDS)}), got {ln.head!r}", ln)
                if len(ln.toks) < 2:
                    raise self.error(f"{ln.head} block needs a name", ln, ln.toks[0])
                cur = _Block(ln.head, ln.toks[1].text, ln, [])
            elif ln.head == "end":
                if len(ln.toks) > 1:
                    raise self.error("unexpected text after 'end'", ln, ln.toks[1])
                out.append(cur)
                cur = None
            else:
                cur.body.append(ln)
        if cur is not None:
            raise self.error(f"block {cur.name!r} is missing 'end'", cur.header)
        return out

    # words and relations over token lists

    def word(self, toks: list, line: _Line, where: _Tok | None = None):
        if not toks:
            raise self.error("expected a word (write 1 for the empty word)", line, where or line.toks[-1])
        if len(toks) == 1 and toks[0].text == "1":
            return ()
        for t in toks:
            if t.text in RESERVED:
                raise self.error(f"unexpected {t.text!r} inside a word", line, t)
        return tuple(t.text for t in toks)

    def relation(self, toks: list, line: _Line):
        arrows = [i for i, t in enumerate(toks) if t.text == "->"]
        if len(arrows) != 1:
            raise self.error("expected exactly one '->'", line, toks[0] if toks else None)
        k = arrows[0]
        return self.word(toks[:k], line, toks[k]), self.word(toks[k + 1:], line, toks[k])


def _strip(tok: _Tok, left: bool) -> _Tok | None:
    text = tok.text[1:] if left else tok.text[:-1]
    return _Tok(text, tok.col + (1 if left else 0)) if text else None


# --------------------------------------------------------------- workspace


@dataclass
class Workspace:
    """Named values from one or more files plus the references between them."""

    presentations: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    derivations: dict = field(default_factory=dict)
    monoids: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)
    zigzags: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    order: list = field(default_factory=list)
    refs: dict = field(default_factory=dict)

    def table(self, kind: str) -> dict:
        return getattr(self, kind + "s")

    def get(self, kind: str, name: str | None = None):
        t = self.table(kind)
        if name is None:
            if len(t) != 1:
                raise TietzeError(f"expected exactly one {kind} block, found {len(t)}; name one")
            return next(iter(t.values()))
        if name not in t:
            raise TietzeError(f"no {kind} named {name!r}")
        return t[name]


def parse(text: str, file: str = "<input>") -> Workspace:
    p = _Parser(text, file)
    blocks = p.blocks()
    raw = {}
    for b in blocks:
        key = (b.kind, b.name)
        if key in raw:
            raise p.error(f"duplicate {b.kind} name {b.name!r}", b.header, b.header.toks[1])
        raw[key] = b
    ws = Workspace()
    resolving = set()

    def need(kind, name, line, tok):
        if (kind, name) not in raw:
            raise p.error(f"unknown {kind} {name!r}", line, tok)
        return resolve(raw[(kind, name)])

    def morph_parts(b: _Block):
        src = tgt = None
        mapping = {}
        for ln in b.body:
            w = ln.words
            if w[0] in ("from", "to") and len(w) == 2:
                if w[0] == "from":
                    src = ln
                else:
                    tgt = ln
            elif w[0] == "map" and len(w) == 4 and w[2] == "->":
                if w[1] in mapping:
                    raise p.error(f"generator {w[1]!r} mapped twice", ln, ln.toks[1])
                mapping[w[1]] = w[3]
            else:
                raise p.error("expected 'from P', 'to Q' or 'map x -> y'", ln)
        if src is None or tgt is None:
            raise p.error("morphism needs 'from' and 'to'", b.header)
        return src, tgt, mapping

    def resolve(b: _Block):
        t = ws.table(b.kind)
        if b.name in t:
            return t[b.name]
        if (b.kind, b.name) in resolving:
            raise p.error(f"circular reference through {b.kind} {b.name!r}", b.header)
        resolving.add((b.kind, b.name))
        try:
            val, refs = _BUILD[b.kind](b)
        except TietzeError as exc:
            if isinstance(exc, ParseError):
                raise
            raise p.error(str(exc), b.header) from None
        resolving.discard((b.kind, b.name))
        t[b.name] = val
        ws.refs[(b.kind, b.name)] = refs
        return val

    def build_presentation(b):
        gens, rels, extra, reflexive, pulls = None, [], [], False, []
        for ln in b.body:
            h = ln.head
            if h == "gens":
                if gens is not None:
                    raise p.error("gens given twice", ln)
                for t in ln.toks[1:]:
                    if t.text in RESERVED or t.text.startswith("#"):
                        raise p.error(f"invalid generator name {t.text!r}", ln, t)
                gens = ln.words[1:]
            elif h == "rel":
                rels.append(p.relation(ln.toks[1:], ln))
            elif h == "rel*":
                w = ln.words
                if w[1:] == ["diagonal"]:
                    reflexive = True
                elif len(w) == 3 and w[1] == "pullback":
                    mb = raw.get(("morphism", w[2]))
                    if mb is None:
                        raise p.error(f"unknown morphism {w[2]!r}", ln, ln.toks[2])
                    _, tgt, mapping = morph_parts(mb)
                    target = need("presentation", tgt.words[1], tgt, tgt.toks[1])
                    extra.append(Pullback(mapping, target))
                    pulls.append(w[2])
                else:
                    raise p.error("expected 'rel* diagonal' or 'rel* pullback <morphism>'", ln)
            elif h == "reflexive" and len(ln.toks) == 1:
                reflexive = True
            else:
                raise p.error(f"unexpected {h!r} in presentation", ln)
        if gens is None:
            raise p.error("presentation needs a 'gens' line", b.header)
        relset = Explicit(rels)
        if extra:
            relset = Union(([relset] if rels else []) + extra) if (rels or len(extra) > 1) else extra[0]
        return Presentation(gens, relset, reflexive), {"pullbacks": pulls}

    def build_morphism(b):
        src, tgt, mapping = morph_parts(b)
        P = need("presentation", src.words[1], src, src.toks[1])
        Q = need("presentation", tgt.words[1], tgt, tgt.toks[1])
        return Morphism(P, Q, mapping), {"from": src.words[1], "to": tgt.words[1]}

    def build_derivation(b):
        start, steps, ctx = None, [], None
        for ln in b.body:
            h = ln.head
            if h == "in" and len(ln.toks) == 2:
                ctx = ln.words[1]
                need("presentation", ctx, ln, ln.toks[1])
            elif h == "start":
                start = p.word(ln.toks[1:], ln)
            elif h == "step":
                steps.append(parse_step(ln))
            else:
                raise p.error(f"unexpected {h!r} in derivation", ln)
        if start is None:
            raise p.error("derivation needs a 'start' line", b.header)
        d = Derivation(start, tuple(steps))
        cur = d.start
        for i, s in enumerate(d.steps):
            if s.source != cur:
                raise p.error(f"step {i + 1} does not apply to {fmt_word(cur)}", b.header)
            cur = s.target
        if ctx is not None:
            d.replay(ws.presentations[ctx])
        return d, {"in": ctx}

    def parse_step(ln):
        parts, cur = [], []
        for t in ln.toks[1:]:
            if t.text == "|":
                parts.append(cur)
                cur = []
            else:
                cur.append(t)
        parts.append(cur)
        if len(parts) != 3 or not parts[2]:
            raise p.error("expected 'step <w> | <lhs> -> <rhs> | <w'> fwd|bwd'", ln)
        dir_tok = parts[2][-1]
        if dir_tok.text not in (FWD, BWD):
            raise p.error(f"expected fwd or bwd, got {dir_tok.text!r}", ln, dir_tok)
        left = p.word(parts[0], ln)
        lhs, rhs = p.relation(parts[1], ln)
        right = p.word(parts[2][:-1], ln, dir_tok)
        return DerivationStep(left, lhs, rhs, dir_tok.text, right)

    def build_monoid(b):
        h = b.header.words
        if len(h) != 4 or h[2] != "size":
            raise p.error("expected 'monoid <name> size <n>'", b.header)
        try:
            n = int(h[3])
        except ValueError:
            raise p.error("size must be an integer", b.header, b.header.toks[3]) from None
        unit, rows = 0, {}
        for ln in b.body:
            w = ln.words
            try:
                if w[0] == "unit" and len(w) == 2:
                    unit = int(w[1])
                elif w[0] == "mul" and len(w) >= 2 and w[1].endswith(":"):
                    rows[int(w[1][:-1])] = [int(x) for x in w[2:]]
                else:
                    raise p.error("expected 'unit i' or 'mul i: j k ...'", ln)
            except ValueError:
                raise p.error("table entries must be integers", ln) from None
        if sorted(rows) != list(range(n)):
            raise p.error(f"need one 'mul' row for each of 0..{n - 1}", b.header)
        return MonoidTable([rows[i] for i in range(n)], unit, name=b.name), {}

    def parse_tstep(ln):
        h, toks = ln.head, ln.toks[1:]
        if h == "tgen":
            if len(toks) < 3 or toks[1].text != ":=":
                raise p.error("expected 'tgen <a> := <u>'", ln)
            return Tgen(p.word(toks[2:], ln), toks[0].text), None
        if h == "trel":
            if len(toks) < 2 or toks[-2].text != "witness":
                raise p.error("expected 'trel <u> -> <v> witness <derivation>'", ln)
            u, v = p.relation(toks[:-2], ln)
            d = need("derivation", toks[-1].text, ln, toks[-1])
            return Trel(u, v, d), toks[-1].text
        if h == "trefl":
            return Trefl(p.word(toks, ln)), None
        if h == "tsym":
            return Tsym(p.relation(toks, ln)), None
        if h == "ttrans":
            return Ttrans(*paren_pair(toks, ln)), None
        if h == "tctxt":
            ins = [i for i, t in enumerate(toks) if t.text == "in"]
            if len(ins) != 1:
                raise p.error("expected 'tctxt (<u> -> <v>) in <w> _ <w'>'", ln)
            k = ins[0]
            rel = paren_rel(toks[:k], ln)
            rest = toks[k + 1:]
            bars = [i for i, t in enumerate(rest) if t.text == "_"]
            if len(bars) != 1:
                raise p.error("expected one '_' between the contexts", ln, toks[k])
            j = bars[0]
            return Tctxt(rel, p.word(rest[:j], ln, rest[j]), p.word(rest[j + 1:], ln, rest[j])), None
        raise p.error(f"unknown step {h!r}", ln)

    def unparen(toks, ln):
        if not toks or not toks[0].text.startswith("(") or not toks[-1].text.endswith(")"):
            raise p.error("expected a parenthesised relation", ln, toks[0] if toks else None)
        toks = list(toks)
        if len(toks) == 1:
            inner = toks[0].text[1:-1]
            return [_Tok(inner, toks[0].col + 1)] if inner else []
        first, last = _strip(toks[0], True), _strip(toks[-1], False)
        return ([first] if first else []) + toks[1:-1] + ([last] if last else [])

    def paren_rel(toks, ln):
        return p.relation(unparen(toks, ln), ln)

    def paren_pair(toks, ln):
        inner = unparen(toks, ln)
        arrows = [i for i, t in enumerate(inner) if t.text == "->"]
        if len(arrows) != 2:
            raise p.error("expected '(<u> -> <v>) (<v> -> <w>)'", ln)
        a1, a2 = arrows
        middle = inner[a1 + 1:a2]
        # the middle reads "v) (v'"; split where a token closes and the next opens
        cuts = [i for i in range(len(middle) - 1) if middle[i].text.endswith(")") and middle[i + 1].text.startswith("(")]
        if not cuts:
            raise p.error("expected ') (' between the two relations", ln)
        i = cuts[(len(cuts) - 1) // 2]
        left = middle[:i] + ([_strip(middle[i], False)] if _strip(middle[i], False) else [])
        right = ([_strip(middle[i + 1], True)] if _strip(middle[i + 1], True) else []) + middle[i + 2:]
        r1 = (p.word(inner[:a1], ln, inner[a1]), p.word(left, ln, inner[a1]))
        r2 = (p.word(right, ln, inner[a2]), p.word(inner[a2 + 1:], ln, inner[a2]))
        return r1, r2

    def build_trace(b):
        h = b.header.words
        if len(h) != 4 or h[2] != "from":
            raise p.error("expected 'trace <name> from <presentation>'", b.header)
        P = need("presentation", h[3], b.header, b.header.toks[3])
        steps, wit = [], []
        for ln in b.body:
            s, w = parse_tstep(ln)
            steps.append(s)
            wit.append(w)
        try:
            return TietzeTrace(P, steps), {"from": h[3], "witnesses": wit}
        except TietzeError as exc:
            raise p.error(str(exc), b.header) from None

    def build_zigzag(b):
        h = b.header.words
        if len(h) != 6 or h[2] != "from" or h[4] != "to":
            raise p.error("expected 'zigzag <name> from <P> to <Q>'", b.header)
        P = need("presentation", h[3], b.header, b.header.toks[3])
        Q = need("presentation", h[5], b.header, b.header.toks[5])
        sections = []
        for ln in b.body:
            if ln.head == "forward" and len(ln.toks) == 1:
                sections.append(["forward", None, []])
            elif ln.head == "backward":
                if len(ln.toks) == 3 and ln.toks[1].text == "from":
                    sections.append(["backward", need("presentation", ln.words[2], ln, ln.toks[2]), [], ln.words[2]])
                elif len(ln.toks) == 1:
                    sections.append(["backward", None, [], None])
                else:
                    raise p.error("expected 'backward' or 'backward from <presentation>'", ln)
            else:
                if not sections:
                    raise p.error("step before a 'forward'/'backward' header", ln)
                sections[-1][2].append(parse_tstep(ln))
        segs, refs = [], []
        cur = P
        try:
            for k, sec in enumerate(sections):
                steps = [s for s, _ in sec[2]]
                if sec[0] == "forward":
                    tr = TietzeTrace(cur, steps)
                    refs.append(("forward", None, [w for _, w in sec[2]]))
                else:
                    start = sec[1]
                    if start is None:
                        if k != len(sections) - 1:
                            raise p.error("an inner backward section needs 'from <presentation>'", b.header)
                        start = Q
                    tr = TietzeTrace(start, steps)
                    refs.append(("backward", sec[3], [w for _, w in sec[2]]))
                segs.append((sec[0], tr))
                cur = tr.end if sec[0] == "forward" else tr.start
            return TietzeZigzag(P, Q, segs), {"from": h[3], "to": h[5], "segments": refs}
        except TietzeError as exc:
            if isinstance(exc, ParseError):
                raise
            raise p.error(str(exc), b.header) from None

    def build_hom(b):
        h = b.header.words
        if len(h) != 4 or h[2] != "into":
            raise p.error("expected 'hom <name> into <monoid>'", b.header)
        M = need("monoid", h[3], b.header, b.header.toks[3])
        assign, factor, pair, ctx = [], [], None, None
        for ln in b.body:
            w = ln.words
            try:
                if w[0] == "in" and len(w) == 2:
                    ctx = w[1]
                    need("presentation", ctx, ln, ln.toks[1])
                elif w[0] in ("assign", "factor") and len(w) == 3:
                    (assign if w[0] == "assign" else factor).append((w[1], int(w[2])))
                elif w[0] == "separates":
                    bars = [i for i, t in enumerate(ln.toks) if t.text == "|"]
                    if len(bars) != 1:
                        raise p.error("expected 'separates <u> | <v>'", ln)
                    k = bars[0]
                    pair = (p.word(ln.toks[1:k], ln, ln.toks[k]), p.word(ln.toks[k + 1:], ln, ln.toks[k]))
                else:
                    raise p.error("expected 'in', 'assign', 'factor' or 'separates'", ln)
            except ValueError:
                raise p.error("element indices must be integers", ln) from None
        if pair is None:
            raise p.error("hom needs a 'separates' line", b.header)
        cert = HomCertificate(M, tuple(assign), pair[0], pair[1], tuple(factor) if factor else None)
        if ctx is not None:
            cert.validate(ws.presentations[ctx])
        return cert, {"into": h[3], "in": ctx}

    _BUILD = {
        "hom": build_hom,
        "presentation": build_presentation,
        "morphism": build_morphism,
        "derivation": build_derivation,
        "monoid": build_monoid,
        "trace": build_trace,
        "zigzag": build_zigzag,
    }
    for b in blocks:
        resolve(b)
        ws.order.append((b.kind, b.name))
    return ws


def parse_file(path: str) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), path)


# --------------------------------------------------------------- rendering


def _relset_parts(P: Presentation):
    r = P.rels
    parts = r.parts if isinstance(r, Union) else (r,)
    explicit, pulls = [], []
    for part in parts:
        if isinstance(part, Explicit):
            explicit.extend(part.relations)
        elif isinstance(part, Pullback):
            pulls.append(part)
    return explicit, pulls


_HINTS = {"presentation": "P", "morphism": "f", "derivation": "d", "monoid": "M", "trace": "T",
          "zigzag": "Z", "hom": "h"}


class Document:
    """Accumulates blocks, naming unnamed dependencies on the fly."""

    def __init__(self):
        self.blocks = []  # (kind, name, lines)
        self._named = {k: {} for k in KINDS}
        self._used = set()

    def _fresh(self, hint: str) -> str:
        name, k = hint, 1
        while name in self._used:
            k += 1
            name = f"{hint}{k}"
        self._used.add(name)
        return name

    def _lookup(self, kind, value):
        try:
            return self._named[kind].get(value)
        except TypeError:
            return None

    def _claim(self, kind, value, name):
        if name is None:
            name = self._fresh(_HINTS[kind])
        else:
            self._used.add(name)
        try:
            self._named[kind].setdefault(value, name)
        except TypeError:
            pass
        return name

    def comment(self, text: str) -> None:
        self.blocks.append(("comment", None, [f"# {line}" if line else "#" for line in text.splitlines()]))

    def presentation(self, P: Presentation, name: str | None = None, pullbacks: list | None = None) -> str:
        if name is None:
            known = self._lookup("presentation", P)
            if known:
                return known
        name = self._claim("presentation", P, name)
        explicit, pulls = _relset_parts(P)
        lines = [f"presentation {name}", "gens" + "".join(" " + g for g in P.gens)]
        lines += [f"rel {fmt_relation(r)}" for r in explicit]
        later = []
        for i, pb in enumerate(pulls):
            if pullbacks is not None:
                qname = pullbacks[i]
            else:
                tname = self.presentation(pb.target)
                qname = self._fresh(f"{name}.q")
                later.append((qname, tname, dict(pb.mapping)))
            lines.append(f"rel* pullback {qname}")
        if P.reflexive:
            lines.append("reflexive")
        self.blocks.append(("presentation", name, lines))
        for qname, tname, mapping in later:
            self._morphism_block(qname, name, tname, [(a, mapping[a]) for a in P.gens])
        return name

    def _morphism_block(self, name, src, tgt, pairs):
        lines = [f"morphism {name}", f"from {src}", f"to {tgt}"] + [f"map {a} -> {b}" for a, b in pairs]
        self.blocks.append(("morphism", name, lines))

    def morphism(self, f: Morphism, name: str | None = None, src: str | None = None, tgt: str | None = None) -> str:
        if name is None:
            known = self._lookup("morphism", f)
            if known:
                return known
        src = src or self.presentation(f.src)
        tgt = tgt or self.presentation(f.tgt)
        name = self._claim("morphism", f, name)
        self._morphism_block(name, src, tgt, [(a, f.mapping[a]) for a in f.src.gens])
        return name

    def derivation(self, d: Derivation, name: str | None = None, context: str | None = None) -> str:
        name = self._claim("derivation", d, name)
        lines = [f"derivation {name}"]
        if context:
            lines.append(f"in {context}")
        lines += str(d).splitlines()
        self.blocks.append(("derivation", name, lines))
        return name

    def monoid(self, M: MonoidTable, name: str | None = None) -> str:
        if name is None:
            known = self._lookup("monoid", M)
            if known:
                return known
        name = self._claim("monoid", M, name or M.name)
        lines = [f"monoid {name} size {M.size}", f"unit {M.unit}"]
        lines += [f"mul {i}:" + "".join(f" {int(x)}" for x in M.mul[i]) for i in range(M.size)]
        self.blocks.append(("monoid", name, lines))
        return name

    def hom(self, cert: HomCertificate, name: str | None = None, context: str | None = None,
            into: str | None = None) -> str:
        into = into or self.monoid(cert.target)
        name = self._claim("hom", cert, name)
        lines = [f"hom {name} into {into}"]
        if context:
            lines.append(f"in {context}")
        lines += [f"assign {g} {int(e)}" for g, e in cert.assignment]
        lines += [f"factor {g} {int(e)}" for g, e in cert.factor or ()]
        lines.append(f"separates {fmt_word(cert.u)} | {fmt_word(cert.v)}")
        self.blocks.append(("hom", name, lines))
        return name

    def _step_lines(self, steps, witnesses, context):
        out = []
        for s, w in zip(steps, witnesses):
            if isinstance(s, Trel):
                w = w or self.derivation(s.witness, context=context)
                out.append(f"{s} witness {w}")
            else:
                out.append(str(s))
        return out

    def trace(self, t: TietzeTrace, name: str | None = None, start: str | None = None, witnesses=None) -> str:
        start = start or self.presentation(t.start)
        witnesses = witnesses or [None] * len(t.steps)
        body = self._step_lines(t.steps, witnesses, None)
        name = self._claim("trace", t, name)
        self.blocks.append(("trace", name, [f"trace {name} from {start}"] + body))
        return name

    def zigzag(self, z: TietzeZigzag, name: str | None = None, start=None, end=None, segments=None) -> str:
        start = start or self.presentation(z.start)
        end = end or self.presentation(z.end)
        body = []
        for k, (direction, tr) in enumerate(z.segments):
            ref = segments[k] if segments else None
            wit = ref[2] if ref else [None] * len(tr.steps)
            if direction == "forward":
                body.append("forward")
            else:
                src = ref[1] if ref and ref[1] else self.presentation(tr.start)
                body.append(f"backward from {src}")
            body += self._step_lines(tr.steps, wit, None)
        name = self._claim("zigzag", z, name)
        self.blocks.append(("zigzag", name, [f"zigzag {name} from {start} to {end}"] + body))
        return name

    def text(self, header: bool = True) -> str:
        chunks = [HEADER] if header else []
        for kind, _, lines in self.blocks:
            if kind == "comment":
                chunks.append("\n".join(lines))
            else:
                chunks.append("\n".join(lines + ["end"]))
        return "\n\n".join(chunks) + "\n"


def render_workspace(ws: Workspace) -> str:
    """Canonical text of a parsed workspace, in file order with the original names."""
    doc = Document()
    for kind, name in ws.order:
        doc._used.add(name)
    for kind, name in ws.order:
        v, refs = ws.table(kind)[name], ws.refs[(kind, name)]
        if kind == "presentation":
            doc.presentation(v, name, refs["pullbacks"])
        elif kind == "morphism":
            doc.morphism(v, name, refs["from"], refs["to"])
        elif kind == "derivation":
            doc.derivation(v, name, refs["in"])
        elif kind == "monoid":
            doc.monoid(v, name)
        elif kind == "trace":
            doc.trace(v, name, refs["from"], refs["witnesses"])
        elif kind == "hom":
            doc.hom(v, name, refs["in"], refs["into"])
        else:
            doc.zigzag(v, name, refs["from"], refs["to"], refs["segments"])
    return doc.text()


def render(value, name: str | None = None) -> str:
    doc = Document()
    kind = kind_of(value)
    getattr(doc, kind)(value, name)
    return doc.text()


def kind_of(value) -> str:
    for cls, kind in ((Presentation, "presentation"), (Morphism, "morphism"), (Derivation, "derivation"),
                      (MonoidTable, "monoid"), (TietzeTrace, "trace"), (TietzeZigzag, "zigzag"),
                      (HomCertificate, "hom")):
        if isinstance(value, cls):
            return kind
    raise TypeError(f"no text form for {type(value).__name__}")


# -------------------------------------------------------------------- JSON


def _w(w):
    return list(w)


def to_json(value):
    """Plain-data mirror of a value (self-contained, nested)."""
    if isinstance(value, Presentation):
        explicit, pulls = _relset_parts(value)
        out = {"kind": "presentation", "gens": list(value.gens), "rels": [[_w(u), _w(v)] for u, v in explicit],
               "reflexive": value.reflexive}
        if pulls:
            out["pullbacks"] = [{"map": dict(pb.mapping), "target": to_json(pb.target)} for pb in pulls]
        return out
    if isinstance(value, Morphism):
        return {"kind": "morphism", "src": to_json(value.src), "tgt": to_json(value.tgt),
                "map": {a: value.mapping[a] for a in value.src.gens}}
    if isinstance(value, Derivation):
        return {"kind": "derivation", "start": _w(value.start), "steps": [
            {"left": _w(s.left), "lhs": _w(s.lhs), "rhs": _w(s.rhs), "right": _w(s.right), "direction": s.direction}
            for s in value.steps]}
    if isinstance(value, MonoidTable):
        return {"kind": "monoid", "name": value.name, "unit": value.unit, "mul": value.mul.tolist()}
    if isinstance(value, TietzeTrace):
        return {"kind": "trace", "start": to_json(value.start), "steps": [_step_json(s) for s in value.steps]}
    if isinstance(value, TietzeZigzag):
        return {"kind": "zigzag", "start": to_json(value.start), "end": to_json(value.end),
                "segments": [{"direction": d, "trace": to_json(t)} for d, t in value.segments]}
    if isinstance(value, HomCertificate):
        out = {"kind": "hom", "target": to_json(value.target), "assignment": [[g, int(e)] for g, e in value.assignment],
               "u": _w(value.u), "v": _w(value.v)}
        if value.factor is not None:
            out["factor"] = [[g, int(e)] for g, e in value.factor]
        return out
    raise TypeError(f"no JSON form for {type(value).__name__}")


def _step_json(s):
    if isinstance(s, Tgen):
        return {"step": "tgen", "u": _w(s.u), "a": s.a}
    if isinstance(s, Trel):
        return {"step": "trel", "u": _w(s.u), "v": _w(s.v), "witness": to_json(s.witness)}
    if isinstance(s, Trefl):
        return {"step": "trefl", "u": _w(s.u)}
    if isinstance(s, Tsym):
        return {"step": "tsym", "rel": [_w(x) for x in s.rel]}
    if isinstance(s, Ttrans):
        return {"step": "ttrans", "r1": [_w(x) for x in s.r1], "r2": [_w(x) for x in s.r2]}
    return {"step": "tctxt", "rel": [_w(x) for x in s.rel], "w": _w(s.w), "w2": _w(s.w2)}


def _rel(x):
    return tuple(x[0]), tuple(x[1])


def _step_from(d):
    k = d["step"]
    if k == "tgen":
        return Tgen(tuple(d["u"]), d["a"])
    if k == "trel":
        return Trel(tuple(d["u"]), tuple(d["v"]), from_json(d["witness"]))
    if k == "trefl":
        return Trefl(tuple(d["u"]))
    if k == "tsym":
        return Tsym(_rel(d["rel"]))
    if k == "ttrans":
        return Ttrans(_rel(d["r1"]), _rel(d["r2"]))
    if k == "tctxt":
        return Tctxt(_rel(d["rel"]), tuple(d["w"]), tuple(d["w2"]))
    raise ValueError(f"unknown step kind {k!r}")


def from_json(d):
    k = d["kind"]
    if k == "presentation":
        rels = Explicit(_rel(r) for r in d["rels"])
        pulls = [Pullback(p["map"], from_json(p["target"])) for p in d.get("pullbacks", [])]
        if pulls:
            rels = Union(([rels] if len(rels) else []) + pulls) if (len(rels) or len(pulls) > 1) else pulls[0]
        return Presentation(d["gens"], rels, d["reflexive"])
    if k == "morphism":
        return Morphism(from_json(d["src"]), from_json(d["tgt"]), d["map"])
    if k == "derivation":
        return Derivation(tuple(d["start"]), tuple(
            DerivationStep(tuple(s["left"]), tuple(s["lhs"]), tuple(s["rhs"]), s["direction"], tuple(s["right"]))
            for s in d["steps"]))
    if k == "monoid":
        return MonoidTable(d["mul"], d["unit"], name=d.get("name", "M"))
    if k == "trace":
        return TietzeTrace(from_json(d["start"]), [_step_from(s) for s in d["steps"]])
    if k == "zigzag":
        return TietzeZigzag(from_json(d["start"]), from_json(d["end"]),
                            [(s["direction"], from_json(s["trace"])) for s in d["segments"]])
    if k == "hom":
        f = d.get("factor")
        return HomCertificate(from_json(d["target"]), tuple((g, e) for g, e in d["assignment"]),
                              tuple(d["u"]), tuple(d["v"]), tuple((g, e) for g, e in f) if f is not None else None)
    raise ValueError(f"unknown kind {k!r}")


def dumps(value) -> str:
    return json.dumps(to_json(value), sort_keys=True)


def loads(text: str):
    return from_json(json.loads(text))
