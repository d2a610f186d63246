import random

import pytest

from cmlw.expr import (Conj, GrpComm, Identity, Inv, LieBracket, Mul, One, ParseError, UnboundVariableError, Var,
                       depth, free_variables, load_identities, parse, parse_identity, render, substitute, walk)

x, y, z = Var("x"), Var("y"), Var("z")
NAMES = ["x", "y", "z", "x'", "y_2", "a1", "cj", "Z'"]


def random_expr(rng: random.Random, d: int):
    if d <= 1 or rng.random() < 0.2:
        return One() if rng.random() < 0.1 else Var(rng.choice(NAMES))
    kind = rng.randrange(5)
    if kind == 0:
        return Inv(random_expr(rng, d - 1))
    a, b = random_expr(rng, d - 1), random_expr(rng, d - 1)
    return (Mul, Conj, GrpComm, LieBracket)[kind - 1](a, b)


def test_grammar_examples():
    assert parse("[x,y]") == GrpComm(x, y)
    assert parse("{x,{y,z}}") == LieBracket(x, LieBracket(y, z))
    assert parse("cj(x,y)*x^-1") == Mul(Conj(x, y), Inv(x))
    assert parse("1") == One()
    assert parse("x*y*z") == Mul(Mul(x, y), z)


def test_round_trip_1000_random_trees():
    rng = random.Random(2024)
    for _ in range(1000):
        e = random_expr(rng, rng.randint(1, 8))
        assert depth(e) <= 8
        assert parse(render(e)) == e


def test_render_parenthesization():
    assert render(Mul(x, Mul(y, z))) == "x*(y*z)"
    assert render(Inv(Inv(x))) == "(x^-1)^-1"
    assert render(Inv(Mul(x, y))) == "(x*y)^-1"


def test_error_offset_and_expected():
    with pytest.raises(ParseError) as info:
        parse("[x,y")
    assert info.value.offset == 4
    assert "]" in info.value.expected and "," not in info.value.expected


@pytest.mark.parametrize("text,offset", [("x*", 2), ("(x", 2), ("x y", 2), ("{x}", 2), ("x^-1^-1", 4), ("", 0)])
def test_errors(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset


def test_cj_is_a_name_unless_called():
    assert parse("cj*x") == Mul(Var("cj"), x)
    assert parse("cj(x,y)") == Conj(x, y)


def test_substitute():
    ab = Mul(Var("a"), Var("b"))
    assert substitute(parse("{x,y}"), {"x": ab, "y": Var("c")}) == LieBracket(ab, Var("c"))
    assert substitute(One(), {}) == One()
    assert substitute(parse("[x,x]"), {"x": ab}) == GrpComm(ab, ab)
    with pytest.raises(UnboundVariableError) as info:
        substitute(x, {})
    assert info.value.name == "x"


def test_free_variables():
    assert free_variables(parse("{x,y*y'}")) == ["x", "y", "y'"]
    assert free_variables(One()) == []
    assert free_variables(parse("[x,y]*{x,y}")) == ["x", "y"]


def test_walk_preorder():
    kinds = [type(n).__name__ for n in walk(parse("[x,y^-1]"))]
    assert kinds == ["GrpComm", "Var", "Inv", "Var"]


def test_identity_parsing():
    ident = parse_identity("ax: {x,y} = {y,x}^-1")
    assert ident.name == "ax" and ident.variables == ("x", "y")
    assert parse_identity("{x,x}=1", name="e").name == "e"
    with pytest.raises(ValueError):
        parse_identity("x = y = z", name="t")
    with pytest.raises(ValueError):
        parse_identity("x = y")
    with pytest.raises(ValueError):
        Identity("bad", x, y, variables=("x",))


def test_load_identities_skips_comments():
    text = "# header\na: x = x\n\nb: [x,y] = [y,x]^-1  # trailing\n"
    idents = load_identities(text)
    assert [i.name for i in idents] == ["a", "b"]
