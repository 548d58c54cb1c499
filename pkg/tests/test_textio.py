import pathlib
import random

import pytest

from tietze import textio
from tietze.calculus import TietzeTrace, Tctxt, Tgen, Trel, Tsym
from tietze.core import Morphism, Presentation, validate_morphism
from tietze.errors import ParseError
from tietze.fixtures import n_pair_zigzag
from tietze.model import factor_mono_tfib
from tietze.monoids import library
from tietze.rewriting import Budget, equivalent, separate

EXAMPLES = pathlib.Path(__file__).resolve().parent.parent / "examples"


def rword(rng, gens, hi=3):
    return tuple(rng.choices(gens, k=rng.randint(0, hi)))


def random_presentation(rng):
    gens = ["a", "b", "c"][: rng.randint(1, 3)]
    rels = [(rword(rng, gens), rword(rng, gens)) for _ in range(rng.randint(0, 3))]
    return Presentation(gens, rels, rng.random() < 0.5)


def random_value(rng):
    kind = rng.randrange(6)
    P = random_presentation(rng)
    if kind == 0:
        return P
    if kind == 1:
        while True:
            Q = random_presentation(rng)
            f = Morphism(P, Q, {a: rng.choice(Q.gens) for a in P.gens})
            if validate_morphism(f):
                return f
            P = random_presentation(rng)
    if kind == 2:
        res = equivalent(P, rword(rng, P.gens), rword(rng, P.gens), Budget(max_expansions=300))
        return getattr(res, "derivation", None) or random_value(rng)
    if kind == 3:
        steps = [Tgen(rword(rng, P.gens, 2), "x")]
        cur = TietzeTrace(P, steps).end
        steps.append(Tsym((steps[0].u, ("x",))))
        steps.append(Tctxt((steps[0].u, ("x",)), ("a",), ()))
        d = equivalent(cur, ("x",), steps[0].u).derivation
        steps.append(Trel(("x",), steps[0].u, d))
        return TietzeTrace(P, steps)
    if kind == 4:
        return rng.choice(library())
    f = Morphism(P, P, {a: a for a in P.gens})
    return factor_mono_tfib(f)[0]


@pytest.mark.parametrize("name", ["z.pres", "incl.morph", "n-pair.trace", "chain.morph", "n-pair.pres", "pinf.pres"])
def test_example_files_round_trip(name):
    text = (EXAMPLES / name).read_text()
    assert textio.render_workspace(textio.parse(text, name)) == text


def test_rendered_values_round_trip_bytewise():
    rng = random.Random(7)
    for _ in range(100):
        v = random_value(rng)
        text = textio.render(v)
        again = textio.render_workspace(textio.parse(text))
        assert again == text


def test_json_mirror():
    rng = random.Random(11)
    for _ in range(100):
        v = random_value(rng)
        back = textio.loads(textio.dumps(v))
        assert textio.dumps(back) == textio.dumps(v)
        if isinstance(v, (Presentation, Morphism)):
            assert back == v


def test_zigzag_and_hom_round_trip():
    z = n_pair_zigzag()
    ws = textio.parse(textio.render(z, "npair"))
    z2 = ws.get("zigzag", "npair")
    assert z2.shape() == z.shape() and z2.end == z.end
    P = Presentation.parse("a b", ["a b -> b a"])
    cert = separate(P, ("a",), ("b",), 4)
    ws = textio.parse(textio.render(cert, "h"))
    assert ws.get("hom", "h").assignment == cert.assignment
    assert textio.loads(textio.dumps(cert)).assignment == cert.assignment


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        textio.parse("# tietze-format 1\n\npresentation P\ngens a b\nrel a ->\nend\n", "bad.pres")
    assert str(e.value).startswith("bad.pres:5:7:")


@pytest.mark.parametrize("text", [
    "presentation P\ngens a\n",  # unterminated block
    "presentation P\ngens a\nrel a -> q\nend\n",  # unknown generator
    "presentation P\ngens a a\nend\n",  # duplicate generator
    "frobnicate X\nend\n",
    "presentation P\ngens ->\nend\n",  # reserved token
])
def test_malformed_inputs(text):
    with pytest.raises(ParseError):
        textio.parse(text, "x")
