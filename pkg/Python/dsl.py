"""
Parser, printer and elaborator for .kz files.

    file   := stmt*
    stmt   := prime | ring | map | check
    prime  := "prime" INT
    ring   := "ring" NAME "=" ( "invert" poly "in" NAME
                              | [NAME] "[" [NAME ("," NAME)*] "]" ["/" "(" poly ("," poly)* ")"] )
    map    := "map" NAME ":" NAME "->" NAME "{" (NAME "->" poly [","])* "}"
    check  := "check" KIND NAME (NAME "=" (INT | NAME))*
    poly   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ["^" INT]
    atom   := INT | NAME | "(" poly ")"

`#` starts a comment that runs to the end of the line. Every AST node keeps
the span of its first token; spans never take part in AST equality.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from algebra import AlgebraMap, RingPresentation, check_map, fresh_names
from kunz_errors import (
    CyclicBase,
    DslSemanticError,
    DslSyntaxError,
    IllDefinedMap,
    NotWellDefined,
    Span,
)
from polycore import Poly, PolyRing, PrimeField, is_prime

KEYWORDS = {"prime", "ring", "map", "check", "invert", "in"}

CHECK_OPTIONS = {
    "omega": {"expect": ("zero", "nonzero")},
    "frobenius": {"e": int, "mode": ("surjective", "injective", "iso"), "expect": ("true", "false")},
    "kunz": {"emax": int},
    "classify": {"emax": int, "expect": ("etale", "unramified", "neither")},
    "lifts": {"ext": ("dual", "residue", "two-param", "p-inf", "bank"), "expect": int},
}


# -----------------------------------------------------------------------------
# Tokens
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # INT, NAME, SYM, EOF
    text: str
    span: Span


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<INT>[0-9]+)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<SYM>->|[=\[\](){},:/+\-*^])
""", re.VERBOSE)


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", Span(line, col, col + 1))
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), Span(line, col, col + len(m.group()))))
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("EOF", "", Span(line, col, col + 1)))
    return tokens


# -----------------------------------------------------------------------------
# AST
# -----------------------------------------------------------------------------

@dataclass
class Num:
    value: int
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class Var:
    name: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class Neg:
    operand: "PolyExpr"
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class BinOp:
    op: str
    left: "PolyExpr"
    right: "PolyExpr"
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class Pow:
    base: "PolyExpr"
    exponent: int
    span: Optional[Span] = field(default=None, compare=False, repr=False)


PolyExpr = Union[Num, Var, Neg, BinOp, Pow]


@dataclass
class PrimeDecl:
    p: int
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class RingDecl:
    name: str
    base: Optional[str]
    vars: List[str]
    relations: List[PolyExpr]
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class InvertDecl:
    name: str
    element: PolyExpr
    base: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class Assignment:
    var: str
    image: PolyExpr
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class MapDecl:
    name: str
    source: str
    target: str
    assignments: List[Assignment]
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass
class CheckDirective:
    kind: str
    target: str
    options: List[Tuple[str, str]] = field(default_factory=list)
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def option(self, key: str, default=None):
        for k, v in self.options:
            if k == key:
                return v
        return default


Statement = Union[PrimeDecl, RingDecl, InvertDecl, MapDecl, CheckDirective]


@dataclass
class SourceFile:
    statements: List[Statement]


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def _error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise DslSyntaxError(f"{msg}, found {found}", tok.span)

    def _is(self, text: str) -> bool:
        return self.tok.kind in ("SYM", "NAME") and self.tok.text == text

    def _expect(self, text: str) -> Token:
        if not self._is(text):
            self._error(f"expected {text!r}")
        return self._advance()

    def _name(self, what: str) -> Token:
        if self.tok.kind != "NAME" or self.tok.text in KEYWORDS:
            self._error(f"expected {what}")
        return self._advance()

    def _int(self, what: str) -> Token:
        if self.tok.kind != "INT":
            self._error(f"expected {what}")
        return self._advance()

    # -- statements ---------------------------------------------------------

    def parse_file(self) -> SourceFile:
        stmts = []
        while self.tok.kind != "EOF":
            if self._is("prime"):
                stmts.append(self._prime())
            elif self._is("ring"):
                stmts.append(self._ring())
            elif self._is("map"):
                stmts.append(self._map())
            elif self._is("check"):
                stmts.append(self._check())
            else:
                self._error("expected 'prime', 'ring', 'map' or 'check'")
        return SourceFile(stmts)

    def _prime(self) -> PrimeDecl:
        start = self._advance()
        n = self._int("an integer characteristic")
        return PrimeDecl(int(n.text), start.span)

    def _ring(self):
        start = self._advance()
        name = self._name("a ring name").text
        self._expect("=")
        if self._is("invert"):
            self._advance()
            element = self.poly()
            self._expect("in")
            base = self._name("a base ring name").text
            return InvertDecl(name, element, base, start.span)
        base = None
        if self.tok.kind == "NAME" and not self._is("invert"):
            base = self._name("a base ring name").text
        self._expect("[")
        names = []
        if not self._is("]"):
            names.append(self._name("a variable name").text)
            while self._is(","):
                self._advance()
                names.append(self._name("a variable name").text)
        self._expect("]")
        relations = []
        if self._is("/"):
            self._advance()
            self._expect("(")
            relations.append(self.poly())
            while self._is(","):
                self._advance()
                relations.append(self.poly())
            self._expect(")")
        return RingDecl(name, base, names, relations, start.span)

    def _map(self) -> MapDecl:
        start = self._advance()
        name = self._name("a map name").text
        self._expect(":")
        source = self._name("a source ring name").text
        self._expect("->")
        target = self._name("a target ring name").text
        self._expect("{")
        assignments = []
        while not self._is("}"):
            var = self._name("a source variable")
            self._expect("->")
            assignments.append(Assignment(var.text, self.poly(), var.span))
            if self._is(","):
                self._advance()
        self._expect("}")
        return MapDecl(name, source, target, assignments, start.span)

    def _check(self) -> CheckDirective:
        start = self._advance()
        kind_tok = self._name("a check kind")
        if kind_tok.text not in CHECK_OPTIONS:
            raise DslSyntaxError(
                f"unknown check kind {kind_tok.text!r} (expected one of {', '.join(CHECK_OPTIONS)})",
                kind_tok.span)
        target = self._name("a map or ring name").text
        options = []
        allowed = CHECK_OPTIONS[kind_tok.text]
        while self.tok.kind == "NAME" and self.tok.text not in KEYWORDS:
            key_tok = self._advance()
            if key_tok.text not in allowed:
                raise DslSyntaxError(f"option {key_tok.text!r} is not valid for check {kind_tok.text}",
                                     key_tok.span)
            self._expect("=")
            val_tok = self.tok
            if val_tok.kind not in ("INT", "NAME"):
                self._error("expected an option value")
            self._advance()
            # values like two-param arrive as NAME '-' NAME
            value = val_tok.text
            while self._is("-") and self.tokens[self.pos + 1].kind == "NAME":
                self._advance()
                value += "-" + self._advance().text
            spec = allowed[key_tok.text]
            if spec is int:
                if val_tok.kind != "INT" or (key_tok.text in ("e", "emax") and int(value) < 1):
                    raise DslSyntaxError(f"option {key_tok.text} needs a positive integer", val_tok.span)
            elif value not in spec:
                raise DslSyntaxError(
                    f"option {key_tok.text} must be one of {', '.join(spec)}", val_tok.span)
            options.append((key_tok.text, value))
        return CheckDirective(kind_tok.text, target, options, start.span)

    # -- polynomials --------------------------------------------------------

    def poly(self) -> PolyExpr:
        left = self._term()
        while self._is("+") or self._is("-"):
            op = self._advance()
            left = BinOp(op.text, left, self._term(), op.span)
        return left

    def _term(self) -> PolyExpr:
        left = self._unary()
        while self._is("*"):
            op = self._advance()
            left = BinOp("*", left, self._unary(), op.span)
        return left

    def _unary(self) -> PolyExpr:
        if self._is("-"):
            op = self._advance()
            return Neg(self._unary(), op.span)
        return self._power()

    def _power(self) -> PolyExpr:
        base = self._atom()
        if self._is("^"):
            op = self._advance()
            exp = self._int("an integer exponent")
            return Pow(base, int(exp.text), op.span)
        return base

    def _atom(self) -> PolyExpr:
        tok = self.tok
        if tok.kind == "INT":
            self._advance()
            return Num(int(tok.text), tok.span)
        if tok.kind == "NAME" and tok.text not in KEYWORDS:
            self._advance()
            return Var(tok.text, tok.span)
        if self._is("("):
            self._advance()
            inner = self.poly()
            self._expect(")")
            return inner
        self._error("expected a polynomial")


def parse(text: str) -> SourceFile:
    return _Parser(text).parse_file()


def parse_poly_expr(text: str) -> PolyExpr:
    parser = _Parser(text)
    expr = parser.poly()
    if parser.tok.kind != "EOF":
        parser._error("unexpected text after the polynomial")
    return expr


# -----------------------------------------------------------------------------
# Canonical printer
# -----------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(e: PolyExpr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def print_poly(e: PolyExpr, min_prec: int = 0) -> str:
    if isinstance(e, Num):
        s = str(e.value)
    elif isinstance(e, Var):
        s = e.name
    elif isinstance(e, Neg):
        s = "-" + print_poly(e.operand, 3)
    elif isinstance(e, Pow):
        s = f"{print_poly(e.base, 5)}^{e.exponent}"
    else:
        lp = _PREC[e.op]
        sep = "*" if e.op == "*" else f" {e.op} "
        s = print_poly(e.left, lp) + sep + print_poly(e.right, lp + 1)
    return f"({s})" if _prec(e) < min_prec else s


def print_statement(st: Statement) -> str:
    if isinstance(st, PrimeDecl):
        return f"prime {st.p}"
    if isinstance(st, InvertDecl):
        return f"ring {st.name} = invert {print_poly(st.element)} in {st.base}"
    if isinstance(st, RingDecl):
        s = f"ring {st.name} = {st.base or ''}[{', '.join(st.vars)}]"
        if st.relations:
            s += " / (" + ", ".join(print_poly(r) for r in st.relations) + ")"
        return s
    if isinstance(st, MapDecl):
        body = ", ".join(f"{a.var} -> {print_poly(a.image)}" for a in st.assignments)
        return f"map {st.name} : {st.source} -> {st.target} {{ {body} }}"
    opts = "".join(f" {k}={v}" for k, v in st.options)
    return f"check {st.kind} {st.target}{opts}"


def print_file(sf: SourceFile) -> str:
    return "".join(print_statement(st) + "\n" for st in sf.statements)


# -----------------------------------------------------------------------------
# Elaboration
# -----------------------------------------------------------------------------

@dataclass
class FlatRing:
    """A ring flattened over F_p, with its structure map from the declared base."""
    name: str
    presentation: RingPresentation
    structure: AlgebraMap


@dataclass
class Elaborated:
    prime: int
    rings: Dict[str, FlatRing]
    maps: Dict[str, AlgebraMap]
    checks: List[CheckDirective]

    def resolve(self, name: str, span: Optional[Span] = None) -> AlgebraMap:
        """A map name, or a ring name meaning its structure map."""
        if name in self.maps:
            return self.maps[name]
        if name in self.rings:
            return self.rings[name].structure
        raise DslSemanticError(f"unknown map or ring {name!r}", span)


def to_poly(e: PolyExpr, ring: PolyRing) -> Poly:
    if isinstance(e, Num):
        return ring.constant(e.value)
    if isinstance(e, Var):
        if e.name not in ring.names:
            raise DslSemanticError(
                f"unknown variable {e.name!r} (ring has {', '.join(ring.names) or 'no variables'})", e.span)
        return ring.var(e.name)
    if isinstance(e, Neg):
        return -to_poly(e.operand, ring)
    if isinstance(e, Pow):
        return to_poly(e.base, ring) ** e.exponent
    left, right = to_poly(e.left, ring), to_poly(e.right, ring)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    return left * right


def parse_poly(text: str, ring: PolyRing) -> Poly:
    return to_poly(parse_poly_expr(text), ring)


class _Elaborator:
    def __init__(self, ast: SourceFile, budget=None):
        self.ast = ast
        self.budget = budget
        self.field: Optional[PrimeField] = None
        self.decls: Dict[str, Union[RingDecl, InvertDecl]] = {}
        self.rings: Dict[str, FlatRing] = {}
        self.maps: Dict[str, AlgebraMap] = {}
        self.checks: List[CheckDirective] = []
        self._visiting: List[str] = []

    def run(self) -> Elaborated:
        map_decls = []
        names = set()
        for st in self.ast.statements:
            if isinstance(st, PrimeDecl):
                if self.field is not None:
                    raise DslSemanticError("duplicate prime declaration", st.span)
                if not is_prime(st.p) or st.p > 2 ** 16:
                    raise DslSemanticError(f"{st.p} is not a prime in [2, 65536]", st.span)
                self.field = PrimeField(st.p)
                continue
            if self.field is None and isinstance(st, (RingDecl, InvertDecl, MapDecl)):
                raise DslSemanticError("a prime declaration must come first", st.span)
            if isinstance(st, (RingDecl, InvertDecl, MapDecl)):
                if st.name in names:
                    raise DslSemanticError(f"duplicate name {st.name!r}", st.span)
                names.add(st.name)
            if isinstance(st, (RingDecl, InvertDecl)):
                self.decls[st.name] = st
            elif isinstance(st, MapDecl):
                map_decls.append(st)
            elif isinstance(st, CheckDirective):
                self.checks.append(st)
        if self.field is None:
            raise DslSemanticError("missing prime declaration", Span(1, 1, 2))
        for name in self.decls:
            self._flatten(name, None)
        for md in map_decls:
            self.maps[md.name] = self._map(md)
        for chk in self.checks:
            if chk.target not in self.maps and chk.target not in self.rings:
                raise DslSemanticError(f"check refers to unknown map or ring {chk.target!r}", chk.span)
        return Elaborated(self.field.p, self.rings, self.maps, self.checks)

    def _base(self, base: Optional[str], span) -> FlatRing:
        if base is None:
            Fp = RingPresentation(PolyRing(self.field, ()), (), f"F_{self.field.p}")
            return FlatRing(Fp.name, Fp, AlgebraMap(Fp, Fp, (), "id"))
        if base not in self.decls:
            raise DslSemanticError(f"unknown base ring {base!r}", span)
        return self._flatten(base, span)

    def _flatten(self, name: str, use_span) -> FlatRing:
        if name in self.rings:
            return self.rings[name]
        decl = self.decls[name]
        if name in self._visiting:
            cycle = " -> ".join(self._visiting[self._visiting.index(name):] + [name])
            raise CyclicBase(f"cyclic base reference {cycle}", decl.span)
        self._visiting.append(name)
        base = self._base(decl.base, decl.span)
        R = base.presentation
        if isinstance(decl, InvertDecl):
            element = to_poly(decl.element, R.ring)
            if isinstance(decl.element, Var):
                wanted = f"{decl.element.name}_inv"
            else:
                wanted = "inv"
            new_vars = fresh_names([wanted], R.vars)
            ring = R.ring.extend(new_vars)
            n = R.nvars
            rels = [f.embed(ring, list(range(n))) for f in R.relations]
            rels.append(element.embed(ring, list(range(n))) * ring.var(n) - 1)
        else:
            clash = [v for v in decl.vars if v in R.vars]
            if clash:
                raise DslSemanticError(f"variable {clash[0]!r} already belongs to base {decl.base}", decl.span)
            if len(set(decl.vars)) != len(decl.vars):
                raise DslSemanticError(f"duplicate variable in ring {name}", decl.span)
            ring = R.ring.extend(decl.vars)
            n = R.nvars
            rels = [f.embed(ring, list(range(n))) for f in R.relations]
            rels += [to_poly(r, ring) for r in decl.relations]
        A = RingPresentation(ring, rels, name)
        structure = AlgebraMap(R, A, [ring.var(i) for i in range(R.nvars)],
                               f"{base.name}->{name}", fiber_vars=range(R.nvars, ring.nvars))
        flat = FlatRing(name, A, structure)
        self._visiting.pop()
        self.rings[name] = flat
        return flat

    def _map(self, md: MapDecl) -> AlgebraMap:
        for ref in (md.source, md.target):
            if ref not in self.rings:
                raise DslSemanticError(f"unknown ring {ref!r} in map {md.name}", md.span)
        src = self.rings[md.source].presentation
        tgt = self.rings[md.target].presentation
        given: Dict[str, Assignment] = {}
        for a in md.assignments:
            if a.var not in src.vars:
                raise DslSemanticError(f"{a.var!r} is not a variable of {md.source}", a.span)
            if a.var in given:
                raise DslSemanticError(f"{a.var!r} assigned twice", a.span)
            given[a.var] = a
        missing = [v for v in src.vars if v not in given]
        if missing:
            raise DslSemanticError(
                f"map {md.name} gives {len(given)} images, {md.source} has {src.nvars} variables "
                f"(missing {', '.join(missing)})", md.span)
        images = [to_poly(given[v].image, tgt.ring) for v in src.vars]
        try:
            return check_map(images, src, tgt, md.name, budget=self.budget)
        except NotWellDefined as exc:
            raise IllDefinedMap(f"map {md.name} is not well defined: {exc}", md.span,
                                exc.relation_index) from exc


def elaborate(ast: SourceFile, budget=None) -> Elaborated:
    return _Elaborator(ast, budget).run()


def load(text: str, budget=None) -> Elaborated:
    """Parse and elaborate; budget bounds the well-definedness check of each map."""
    return elaborate(parse(text), budget)
