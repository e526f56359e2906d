"""Tests for the .kz parser, printer and elaborator."""

from pathlib import Path

import pytest

from dsl import (
    BinOp,
    CheckDirective,
    Neg,
    Num,
    Pow,
    Var,
    load,
    parse,
    parse_poly,
    parse_poly_expr,
    print_file,
    print_poly,
    tokenize,
)
from kunz_errors import CyclicBase, DslSemanticError, DslSyntaxError, IllDefinedMap, Span
from polycore import PolyRing, PrimeField

KZ_DIR = Path(__file__).resolve().parent.parent / "Data" / "kz"
GOOD_FILES = ["artin_schreier.kz", "closed_immersion.kz", "etale_loc.kz"]


@pytest.mark.parametrize("fname", GOOD_FILES)
def test_print_parse_round_trip(fname):
    ast = parse((KZ_DIR / fname).read_text(encoding="utf-8"))
    text = print_file(ast)
    assert parse(text) == ast
    assert print_file(parse(text)) == text


@pytest.mark.parametrize("src,expected", [
    ("-(x+1)^2*y - 3", "-(x + 1)^2*y - 3"),
    ("x - (y - z)", "x - (y - z)"),
    ("(x - y) - z", "x - y - z"),
    ("(-x)^2", "(-x)^2"),
    ("-x^2", "-x^2"),
    ("((x))*(y*z)", "x*(y*z)"),
])
def test_print_poly(src, expected):
    expr = parse_poly_expr(src)
    assert print_poly(expr) == expected
    assert parse_poly_expr(expected) == expr


def test_poly_ast_shape():
    expr = parse_poly_expr("-x^2 + 3")
    assert expr == BinOp("+", Neg(Pow(Var("x"), 2)), Num(3))


def test_spans():
    ast = parse("prime 3\n  ring R = [t]\n")
    assert ast.statements[1].span == Span(2, 3, 7)
    assert parse("prime 3") == parse("\n\n   prime 3  # comment")
    toks = tokenize("x -> y")
    assert [t.text for t in toks] == ["x", "->", "y", ""]
    assert toks[1].span == Span(1, 3, 5)


def test_syntax_error_sample():
    text = (KZ_DIR / "syntax_error.kz").read_text(encoding="utf-8")
    with pytest.raises(DslSyntaxError) as exc:
        parse(text)
    assert exc.value.span.line == 5
    assert exc.value.span.col == 1
    assert str(exc.value).startswith("5:1: expected ')'")


@pytest.mark.parametrize("src", [
    "prime 3 $",
    "prime",
    "ring = [x]",
    "prime 3\nring A = [x,]",
    "prime 3\ncheck nonsense A",
    "prime 3\ncheck omega A e=1",
    "prime 3\ncheck kunz A emax=0",
    "prime 3\ncheck frobenius A mode=bijective",
    "prime 3\nmap f : R -> S { u }",
])
def test_syntax_errors(src):
    with pytest.raises(DslSyntaxError) as exc:
        parse(src)
    assert exc.value.span is not None


def test_check_options():
    ast = parse("check lifts A ext=two-param expect=2\ncheck frobenius f e=2 mode=iso")
    lifts, frob = ast.statements
    assert lifts == CheckDirective("lifts", "A", [("ext", "two-param"), ("expect", "2")])
    assert frob.option("mode") == "iso"
    assert frob.option("expect", "true") == "true"


@pytest.mark.parametrize("src,message", [
    ("ring R = [x]", "prime declaration must come first"),
    ("prime 4", "not a prime"),
    ("prime 3\nprime 5", "duplicate prime"),
    ("", "missing prime"),
    ("prime 3\nring A = [x]\nring A = [y]", "duplicate name"),
    ("prime 3\nring A = B[x]", "unknown base ring"),
    ("prime 3\nring R = [t]\nring A = R[t]", "already belongs to base"),
    ("prime 3\nring A = [x, x]", "duplicate variable"),
    ("prime 3\nring R = [u]\nring S = [s]\nmap f : R -> S { }", "missing u"),
    ("prime 3\nring R = [u]\nring S = [s]\nmap f : R -> S { v -> s }", "not a variable"),
    ("prime 3\nring R = [u]\nring S = [s]\nmap f : R -> S { u -> s, u -> 1 }", "assigned twice"),
    ("prime 3\nring R = [u]\nmap f : R -> T { u -> 1 }", "unknown ring"),
    ("prime 3\nring R = [u]\ncheck omega Q", "unknown map or ring"),
])
def test_semantic_errors(src, message):
    with pytest.raises(DslSemanticError) as exc:
        load(src)
    assert message in str(exc.value)


def test_unknown_variable_span():
    with pytest.raises(DslSemanticError) as exc:
        load("prime 2\nring A = [x]/(y)")
    assert exc.value.span == Span(2, 15, 16)
    assert str(exc.value).startswith("2:15: unknown variable 'y'")


def test_cyclic_base():
    with pytest.raises(CyclicBase) as exc:
        load("prime 2\nring A = B[x]\nring B = A[y]")
    assert "A -> B -> A" in str(exc.value)


def test_ill_defined_map():
    with pytest.raises(IllDefinedMap) as exc:
        load("prime 3\nring R = [u]/(u^2)\nring S = [s]\nmap f : R -> S { u -> s }")
    assert exc.value.relation_index == 0
    assert exc.value.span.line == 4


def test_flattening_over_a_base():
    elab = load((KZ_DIR / "artin_schreier.kz").read_text(encoding="utf-8"))
    assert elab.prime == 3
    A = elab.rings["A"]
    assert A.presentation.vars == ("t", "x")
    assert A.structure.source.vars == ("t",)
    assert A.structure.fiber_vars == (1,)
    t, x = A.presentation.ring.gens()
    assert A.presentation.relations == (x ** 3 - x - t,)
    assert elab.resolve("A") is A.structure
    assert [c.kind for c in elab.checks] == ["omega", "frobenius", "frobenius", "classify", "lifts"]


def test_invert_sugar():
    elab = load((KZ_DIR / "etale_loc.kz").read_text(encoding="utf-8"))
    L = elab.rings["L"].presentation
    assert L.vars == ("u", "u_inv")
    u, w = L.ring.gens()
    assert L.relations == (u * w - 1,)
    assert elab.rings["L"].structure.fiber_vars == (1,)

    elab = load("prime 3\nring S = [u]\nring M = invert u + 1 in S")
    M = elab.rings["M"].presentation
    assert M.vars == ("u", "inv")
    u, w = M.ring.gens()
    assert M.relations == ((u + 1) * w - 1,)


def test_map_elaboration():
    elab = load((KZ_DIR / "etale_loc.kz").read_text(encoding="utf-8"))
    cusp = elab.resolve("cusp")
    x, y = cusp.target.ring.gens()
    assert list(cusp.images) == [x ** 2, y]
    with pytest.raises(DslSemanticError):
        elab.resolve("nothing")


def test_parse_poly():
    ring = PolyRing(PrimeField(3), ("x", "y"))
    x, y = ring.gens()
    assert parse_poly("x^2*y + 2*y + 1", ring) == x ** 2 * y + 2 * y + 1
    assert parse_poly("4*x", ring) == x
