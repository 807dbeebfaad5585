"""Line-oriented model file format.

    model <name>
    mod <k>
    disturbance <U> prob <p0> <p1> ... <p(k-1)>
    var <X> = <expr>
    var <X> parents <X...> noise <U> table <v...>

``#`` starts a comment.  Expressions use ``+`` and ``*`` (modulo k) over
integers, parentheses, other variables, and the owner's own disturbance.
The i-th declared variable owns the i-th declared disturbance.  Table
values follow the canonical tuple order: own-noise value slowest, then
parents by ascending variable id, each coordinate lexicographic.

Serialization is canonical (declarations in variable order, normalized
whitespace), so serialize -> parse -> serialize is byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .scm import (
    Add,
    Const,
    Disturbance,
    Equation,
    Expr,
    ExprEquation,
    Mul,
    OwnU,
    Scm,
    TableEquation,
    Var,
    Variable,
)

_RESERVED = frozenset({"model", "mod", "disturbance", "prob", "var", "parents", "noise", "table"})

_TOKEN_RE = re.compile(
    r"""
    (?P<RAT>\d+/\d+)
  | (?P<INT>\d+)
  | (?P<WORD>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<SYM>[+*()=])
  | (?P<WS>\s+)
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    """Syntax error at a specific input position."""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}")


class ModelValidationError(Exception):
    """Structurally valid text describing an invalid model."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize_line(text: str, line_no: int) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1, text[pos])
        kind = m.lastgroup
        if kind != "WS":
            out.append(Token(kind, m.group(), line_no, pos + 1))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, tokens: list[Token], line_no: int, line_text: str):
        self.tokens = tokens
        self.i = 0
        self.line_no = line_no
        self.line_text = line_text

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, expect_kind: str | None = None, expect_text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            col = len(self.line_text.rstrip()) + 1
            want = expect_text or expect_kind or "more input"
            raise ParseError(f"unexpected end of line, expected {want}", self.line_no, col)
        if expect_kind is not None and tok.kind != expect_kind:
            raise ParseError(
                f"expected {expect_text or expect_kind}, found {tok.text!r}",
                tok.line, tok.column, tok.text,
            )
        if expect_text is not None and tok.text != expect_text:
            raise ParseError(
                f"expected {expect_text!r}, found {tok.text!r}", tok.line, tok.column, tok.text
            )
        self.i += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected trailing {tok.text!r}", tok.line, tok.column, tok.text)


def _parse_fraction(tok: Token) -> Fraction:
    if tok.kind == "RAT":
        num, den = tok.text.split("/")
        if int(den) == 0:
            raise ModelValidationError("probability denominator is zero", tok.line, tok.column)
        return Fraction(int(num), int(den))
    if tok.kind == "INT":
        return Fraction(int(tok.text))
    raise ParseError(f"expected a probability, found {tok.text!r}", tok.line, tok.column, tok.text)


def _declared_name(tok: Token) -> str:
    if tok.text in _RESERVED:
        raise ModelValidationError(f"{tok.text!r} is a reserved word", tok.line, tok.column)
    return tok.text


@dataclass
class _VarDecl:
    name: str
    line: int
    cursor: _Cursor
    kind: str  # "expr" or "table"


def parse_model(text: str) -> Scm:
    """Parse model text into a validated model.

    Syntax problems raise ``ParseError`` with the offending position;
    semantically invalid models (self-references, another variable's
    disturbance, unknown identifiers, probabilities not summing to 1,
    malformed tables) raise ``ModelValidationError``.
    """
    name: str | None = None
    modulus: int | None = None
    noises: list[tuple[str, tuple[Fraction, ...], int]] = []
    var_decls: list[_VarDecl] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        model_line = re.match(r"\s*model\b(.*)$", line)
        if model_line:
            if name is not None:
                raise ModelValidationError("duplicate model line", line_no)
            model_name = model_line.group(1).strip()
            if not model_name:
                raise ParseError("model line needs a name", line_no, len(line.rstrip()) + 1)
            name = model_name
            continue
        cur = _Cursor(_tokenize_line(line, line_no), line_no, line)
        head = cur.next("WORD")
        if head.text == "mod":
            if modulus is not None:
                raise ModelValidationError("duplicate mod line", line_no)
            tok = cur.next("INT")
            cur.done()
            modulus = int(tok.text)
            if modulus < 2:
                raise ModelValidationError("mod must be at least 2", tok.line, tok.column)
        elif head.text == "disturbance":
            if modulus is None:
                raise ModelValidationError("mod must be declared before disturbances", line_no)
            name_tok = cur.next("WORD")
            cur.next("WORD", expect_text="prob")
            probs = []
            while cur.peek() is not None:
                probs.append(_parse_fraction(cur.next()))
            if len(probs) != modulus:
                raise ModelValidationError(
                    f"disturbance {name_tok.text} lists {len(probs)} probabilities, expected {modulus}",
                    line_no,
                )
            noises.append((_declared_name(name_tok), tuple(probs), line_no))
        elif head.text == "var":
            if modulus is None:
                raise ModelValidationError("mod must be declared before variables", line_no)
            name_tok = cur.next("WORD")
            nxt = cur.peek()
            if nxt is not None and nxt.text == "=":
                cur.next()
                var_decls.append(_VarDecl(_declared_name(name_tok), line_no, cur, "expr"))
            elif nxt is not None and nxt.text == "parents":
                cur.next()
                var_decls.append(_VarDecl(_declared_name(name_tok), line_no, cur, "table"))
            else:
                tok = nxt
                if tok is None:
                    raise ParseError("expected '=' or 'parents'", line_no, len(line.rstrip()) + 1)
                raise ParseError(
                    f"expected '=' or 'parents', found {tok.text!r}", tok.line, tok.column, tok.text
                )
        else:
            raise ParseError(
                f"expected model, mod, disturbance, or var, found {head.text!r}",
                head.line, head.column, head.text,
            )

    if modulus is None:
        raise ModelValidationError("missing mod line")
    if not var_decls:
        raise ModelValidationError("model declares no variables")
    if len(noises) != len(var_decls):
        raise ModelValidationError(
            f"{len(var_decls)} variables but {len(noises)} disturbances; "
            "each variable needs exactly one"
        )

    var_ids = {}
    for i, decl in enumerate(var_decls):
        if decl.name in var_ids:
            raise ModelValidationError(f"duplicate variable name {decl.name!r}", decl.line)
        var_ids[decl.name] = i
    noise_ids = {}
    for i, (noise_name, _, noise_line) in enumerate(noises):
        if noise_name in noise_ids or noise_name in var_ids:
            raise ModelValidationError(f"duplicate name {noise_name!r}", noise_line)
        noise_ids[noise_name] = i

    variables = []
    for i, decl in enumerate(var_decls):
        noise_name, probs, noise_line = noises[i]
        try:
            noise = Disturbance(noise_name, probs)
        except ValueError as e:
            raise ModelValidationError(str(e), noise_line) from None
        if decl.kind == "expr":
            equation: Equation = ExprEquation(
                _parse_expr(decl.cursor, i, modulus, var_ids, noise_ids)
            )
            decl.cursor.done()
        else:
            equation = _parse_table(decl.cursor, i, modulus, var_ids, noise_ids, noises)
        variables.append(Variable(decl.name, noise, equation))

    try:
        return Scm(modulus=modulus, variables=tuple(variables), name=name or "unnamed")
    except ValueError as e:
        raise ModelValidationError(str(e)) from None


def _resolve_ident(tok: Token, owner: int, var_ids: dict, noise_ids: dict) -> Expr:
    name = tok.text
    if name in var_ids:
        if var_ids[name] == owner:
            raise ModelValidationError(
                f"equation for {name} references its own variable", tok.line, tok.column
            )
        return Var(var_ids[name])
    if name in noise_ids:
        if noise_ids[name] == owner:
            return OwnU()
        raise ModelValidationError(
            f"{name} is another variable's disturbance", tok.line, tok.column
        )
    raise ModelValidationError(f"unknown identifier {name!r}", tok.line, tok.column)


def _parse_expr(cur: _Cursor, owner: int, k: int, var_ids: dict, noise_ids: dict) -> Expr:
    expr = _parse_term(cur, owner, k, var_ids, noise_ids)
    while (tok := cur.peek()) is not None and tok.text == "+":
        cur.next()
        expr = Add(expr, _parse_term(cur, owner, k, var_ids, noise_ids))
    return expr


def _parse_term(cur: _Cursor, owner: int, k: int, var_ids: dict, noise_ids: dict) -> Expr:
    expr = _parse_factor(cur, owner, k, var_ids, noise_ids)
    while (tok := cur.peek()) is not None and tok.text == "*":
        cur.next()
        expr = Mul(expr, _parse_factor(cur, owner, k, var_ids, noise_ids))
    return expr


def _parse_factor(cur: _Cursor, owner: int, k: int, var_ids: dict, noise_ids: dict) -> Expr:
    tok = cur.next()
    if tok.kind == "INT":
        value = int(tok.text)
        if value >= k:
            raise ModelValidationError(
                f"constant {value} out of range 0..{k - 1}", tok.line, tok.column
            )
        return Const(value)
    if tok.kind == "WORD":
        return _resolve_ident(tok, owner, var_ids, noise_ids)
    if tok.text == "(":
        expr = _parse_expr(cur, owner, k, var_ids, noise_ids)
        cur.next(expect_text=")")
        return expr
    raise ParseError(f"expected a value, found {tok.text!r}", tok.line, tok.column, tok.text)


def _parse_table(
    cur: _Cursor, owner: int, k: int, var_ids: dict, noise_ids: dict, noises
) -> TableEquation:
    parent_toks = []
    while (tok := cur.peek()) is not None and tok.text != "noise":
        parent_toks.append(cur.next("WORD"))
    cur.next("WORD", expect_text="noise")
    noise_tok = cur.next("WORD")
    if noise_tok.text != noises[owner][0]:
        raise ModelValidationError(
            f"variable owns disturbance {noises[owner][0]}, not {noise_tok.text}",
            noise_tok.line, noise_tok.column,
        )
    cur.next("WORD", expect_text="table")
    values = []
    while cur.peek() is not None:
        values.append(int(cur.next("INT").text))
    parents = []
    for tok in parent_toks:
        if tok.text not in var_ids:
            raise ModelValidationError(f"unknown parent {tok.text!r}", tok.line, tok.column)
        pid = var_ids[tok.text]
        if pid == owner:
            raise ModelValidationError(
                "a variable cannot be its own parent", tok.line, tok.column
            )
        parents.append(pid)
    if parents != sorted(set(parents)):
        raise ModelValidationError(
            "parents must be distinct and listed in declaration order",
            parent_toks[0].line, parent_toks[0].column,
        )
    want = k ** (1 + len(parents))
    if len(values) != want:
        raise ModelValidationError(
            f"table lists {len(values)} values, expected {want}", cur.line_no
        )
    for v in values:
        if v >= k:
            raise ModelValidationError(f"table value {v} out of range 0..{k - 1}", cur.line_no)
    return TableEquation(tuple(parents), tuple(values))


# --- serialization --------------------------------------------------------


def _render_expr(expr: Expr, scm: Scm, owner: int) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, OwnU):
        return scm.variables[owner].noise.name
    if isinstance(expr, Var):
        return scm.variables[expr.target].name
    if isinstance(expr, Add):
        return f"{_render_expr(expr.left, scm, owner)} + {_render_expr(expr.right, scm, owner)}"
    if isinstance(expr, Mul):
        def wrap(e: Expr) -> str:
            body = _render_expr(e, scm, owner)
            return f"({body})" if isinstance(e, Add) else body
        return f"{wrap(expr.left)}*{wrap(expr.right)}"
    raise TypeError(f"not an expression node: {expr!r}")


def serialize_model(scm: Scm) -> str:
    """Canonical text for a model; reparsing yields a structurally equal model."""
    lines = [f"model {scm.name}", f"mod {scm.modulus}"]
    for v in scm.variables:
        probs = " ".join(str(p) for p in v.noise.probs)
        lines.append(f"disturbance {v.noise.name} prob {probs}")
    for i, v in enumerate(scm.variables):
        eq = v.equation
        if isinstance(eq, ExprEquation):
            lines.append(f"var {v.name} = {_render_expr(eq.expr, scm, i)}")
        else:
            parents = " ".join(scm.variables[p].name for p in eq.parents)
            parents = f"{parents} " if parents else ""
            values = " ".join(str(val) for val in eq.values)
            lines.append(f"var {v.name} parents {parents}noise {v.noise.name} table {values}")
    return "\n".join(lines) + "\n"
