"""Parser and serializer for the SVS specification source format.

The format is line-agnostic: ``#`` starts a comment, names are quoted
strings, bare identifiers are reserved for keywords, states, levels and
enum values.  Parsing never stops at the first error; a malformed
construct is diagnosed and the parser resynchronises at the next
top-level keyword so one pass reports every syntax error.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    BundleDef,
    Clause,
    ClauseKind,
    DataElementDef,
    DataType,
    Declaration,
    Direction,
    EffectClass,
    EffectDef,
    EnumDef,
    ErrorDef,
    FunctionDecl,
    GroupDef,
    LevelsDecl,
    Literal,
    LiteralKind,
    Locality,
    ParamItem,
    Restriction,
    RestrictionKind,
    SourceLocation,
    SpecDb,
    StatesDecl,
    TypeKind,
    ValueCond,
)

ITEM_KEYWORDS = frozenset(
    {"states", "levels", "error", "enum", "data", "bundle", "function", "group"}
)
SCALAR_TYPES = {
    "integer": TypeKind.INTEGER,
    "real": TypeKind.REAL,
    "string": TypeKind.STRING,
    "name": TypeKind.NAME,
    "state": TypeKind.STATE,
}
POINT_SPACES = ("wc", "ndc", "dc")
EFFECT_CLASSES = {c.value: c for c in EffectClass}


@dataclass(frozen=True)
class ParseDiagnostic:
    location: SourceLocation
    message: str
    expected: str | None = None

    def __str__(self) -> str:
        tail = f" (expected {self.expected})" if self.expected else ""
        return f"{self.location}: {self.message}{tail}"


@dataclass
class ParseResult:
    declarations: list[Declaration]
    diagnostics: list[ParseDiagnostic]
    # Every top-level keyword the parser dispatched on either produced a
    # declaration or was skipped: attempted == len(declarations) + skipped.
    attempted_blocks: int = 0
    skipped_blocks: int = 0


class _Tok(Enum):
    IDENT = "identifier"
    INT = "integer"
    REAL = "real"
    STRING = "string"
    LBRACE = "'{'"
    RBRACE = "'}'"
    COLON = "':'"
    EQ = "'='"
    NEQ = "'!='"
    DOTDOT = "'..'"
    EOF = "end of input"


@dataclass(frozen=True)
class _Token:
    type: _Tok
    value: object
    line: int
    col: int

    def show(self) -> str:
        if self.type is _Tok.EOF:
            return "end of input"
        if self.type is _Tok.STRING:
            return f'"{self.value}"'
        return str(self.value)


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"  # ASCII only; unicode digits are not numbers here


def _is_ident_start(ch: str) -> bool:
    return "a" <= ch <= "z" or "A" <= ch <= "Z" or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return _is_ident_start(ch) or _is_digit(ch)


def _tokenize(text: str, file: str) -> tuple[list[_Token], list[ParseDiagnostic]]:
    toks: list[_Token] = []
    diags: list[ParseDiagnostic] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def loc() -> SourceLocation:
        return SourceLocation(file, line, col)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch == "\r":
            advance()
            continue
        if ch in " \t\n":
            advance()
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch == '"':
            advance()
            buf: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == '"':
                    advance()
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\" and i + 1 < n:
                    esc = text[i + 1]
                    mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        diags.append(
                            ParseDiagnostic(
                                SourceLocation(file, line, col),
                                f"unknown escape '\\{esc}' in string",
                            )
                        )
                        mapped = esc
                    buf.append(mapped)
                    advance(2)
                    continue
                buf.append(c)
                advance()
            if not closed:
                diags.append(
                    ParseDiagnostic(
                        SourceLocation(file, start_line, start_col),
                        "unterminated string",
                        expected='closing "',
                    )
                )
            toks.append(_Token(_Tok.STRING, "".join(buf), start_line, start_col))
            continue
        if _is_digit(ch) or (ch == "-" and i + 1 < n and _is_digit(text[i + 1])):
            j = i + 1
            while j < n and _is_digit(text[j]):
                j += 1
            is_real = False
            if j < n and text[j] == "." and j + 1 < n and _is_digit(text[j + 1]):
                is_real = True
                j += 1
                while j < n and _is_digit(text[j]):
                    j += 1
            raw = text[i:j]
            advance(j - i)
            if is_real:
                toks.append(_Token(_Tok.REAL, float(raw), start_line, start_col))
            else:
                toks.append(_Token(_Tok.INT, int(raw), start_line, start_col))
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_part(text[j]):
                j += 1
            raw = text[i:j]
            advance(j - i)
            toks.append(_Token(_Tok.IDENT, raw, start_line, start_col))
            continue
        if ch == "{":
            advance()
            toks.append(_Token(_Tok.LBRACE, "{", start_line, start_col))
            continue
        if ch == "}":
            advance()
            toks.append(_Token(_Tok.RBRACE, "}", start_line, start_col))
            continue
        if ch == ":":
            advance()
            toks.append(_Token(_Tok.COLON, ":", start_line, start_col))
            continue
        if ch == "=":
            advance()
            toks.append(_Token(_Tok.EQ, "=", start_line, start_col))
            continue
        if ch == "!" and i + 1 < n and text[i + 1] == "=":
            advance(2)
            toks.append(_Token(_Tok.NEQ, "!=", start_line, start_col))
            continue
        if ch == "." and i + 1 < n and text[i + 1] == ".":
            advance(2)
            toks.append(_Token(_Tok.DOTDOT, "..", start_line, start_col))
            continue
        # Unknown characters: one diagnostic per contiguous run.
        j = i
        while j < n and text[j] not in ' \t\n\r#"{}:=!.' and not (
            _is_ident_part(text[j]) or text[j] == "-"
        ):
            j += 1
        j = max(j, i + 1)
        run = text[i:j]
        diags.append(
            ParseDiagnostic(
                SourceLocation(file, start_line, start_col),
                f"unexpected character(s) {run!r}",
            )
        )
        advance(j - i)
    toks.append(_Token(_Tok.EOF, None, line, col))
    return toks, diags


class _SyntaxError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        super().__init__(str(diag))
        self.diag = diag


class _Parser:
    def __init__(self, toks: list[_Token], file: str):
        self.toks = toks
        self.pos = 0
        self.file = file
        self.depth = 0  # brace nesting of consumed tokens

    # -- cursor ------------------------------------------------------------

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        if t.type is not _Tok.EOF:
            self.pos += 1
            if t.type is _Tok.LBRACE:
                self.depth += 1
            elif t.type is _Tok.RBRACE:
                self.depth = max(0, self.depth - 1)
        return t

    def loc_of(self, t: _Token) -> SourceLocation:
        return SourceLocation(self.file, t.line, t.col)

    def fail(self, t: _Token, message: str, expected: str | None = None) -> _SyntaxError:
        return _SyntaxError(ParseDiagnostic(self.loc_of(t), message, expected))

    def expect(self, ttype: _Tok, what: str | None = None) -> _Token:
        t = self.peek()
        if t.type is not ttype:
            raise self.fail(
                t, f"unexpected {t.show()}", expected=what or ttype.value
            )
        return self.next()

    def expect_keyword(self, word: str) -> _Token:
        t = self.peek()
        if t.type is not _Tok.IDENT or t.value != word:
            raise self.fail(t, f"unexpected {t.show()}", expected=f"'{word}'")
        return self.next()

    def at_keyword(self, *words: str) -> bool:
        t = self.peek()
        return t.type is _Tok.IDENT and t.value in words

    def ident(self, what: str = "identifier") -> str:
        return str(self.expect(_Tok.IDENT, what).value)

    def ident_list(self, what: str) -> list[str]:
        names = [self.ident(what)]
        while self.peek().type is _Tok.IDENT:
            names.append(self.ident(what))
        return names

    def string(self, what: str = "quoted name") -> str:
        return str(self.expect(_Tok.STRING, what).value)

    def literal(self) -> Literal:
        t = self.peek()
        if t.type is _Tok.INT:
            self.next()
            return Literal.integer(int(t.value))
        if t.type is _Tok.REAL:
            self.next()
            return Literal.real(float(t.value))
        if t.type is _Tok.IDENT:
            self.next()
            return Literal.ident(str(t.value))
        if t.type is _Tok.STRING:
            self.next()
            return Literal.string(str(t.value))
        raise self.fail(t, f"unexpected {t.show()}", expected="literal")

    # -- grammar -----------------------------------------------------------

    def parse_spec(self) -> ParseResult:
        result = ParseResult([], [], 0, 0)
        while True:
            t = self.peek()
            if t.type is _Tok.EOF:
                break
            if t.type is _Tok.IDENT and t.value in ITEM_KEYWORDS and self.depth == 0:
                result.attempted_blocks += 1
                try:
                    result.declarations.append(self.parse_item())
                except _SyntaxError as e:
                    result.diagnostics.append(e.diag)
                    result.skipped_blocks += 1
                    self.recover()
                continue
            # Junk between items: one diagnostic per run.
            result.diagnostics.append(
                ParseDiagnostic(
                    self.loc_of(t),
                    f"unexpected {t.show()}",
                    expected="declaration keyword",
                )
            )
            self.recover()
        return result

    def recover(self) -> None:
        """Skip forward to the next top-level item keyword."""
        while True:
            t = self.peek()
            if t.type is _Tok.EOF:
                return
            if t.type is _Tok.IDENT and t.value in ITEM_KEYWORDS and self.depth == 0:
                return
            self.next()

    def parse_item(self) -> Declaration:
        t = self.peek()
        kw = str(t.value)
        if kw == "states":
            return self.parse_states()
        if kw == "levels":
            return self.parse_levels()
        if kw == "error":
            return self.parse_error()
        if kw == "enum":
            return self.parse_enum()
        if kw == "data":
            return self.parse_data()
        if kw == "bundle":
            return self.parse_bundle()
        if kw == "function":
            return self.parse_function()
        return self.parse_group()

    def parse_states(self) -> StatesDecl:
        kw = self.expect_keyword("states")
        self.expect(_Tok.LBRACE)
        names = self.ident_list("state name")
        self.expect(_Tok.RBRACE)
        self.expect_keyword("initial")
        initial = self.ident("initial state name")
        return StatesDecl(tuple(names), initial, self.loc_of(kw))

    def parse_levels(self) -> LevelsDecl:
        kw = self.expect_keyword("levels")
        self.expect(_Tok.LBRACE)
        names = self.ident_list("level name")
        self.expect(_Tok.RBRACE)
        return LevelsDecl(tuple(names), self.loc_of(kw))

    def parse_error(self) -> ErrorDef:
        kw = self.expect_keyword("error")
        number = int(self.expect(_Tok.INT, "error number").value)
        text = self.string("error text")
        return ErrorDef(number, text, self.loc_of(kw))

    def parse_enum(self) -> EnumDef:
        kw = self.expect_keyword("enum")
        name = self.ident("enum type name")
        self.expect(_Tok.LBRACE)
        values = self.ident_list("enum value")
        self.expect(_Tok.RBRACE)
        return EnumDef(name, tuple(values), self.loc_of(kw))

    def parse_data(self) -> DataElementDef:
        kw = self.expect_keyword("data")
        name = self.string("data element name")
        self.expect(_Tok.COLON)
        dtype = self.parse_typeref()
        restriction = Restriction.none()
        if self.at_keyword("range", "in"):
            restriction = self.parse_restr()
        initial = None
        if self.at_keyword("init"):
            self.next()
            initial = self.literal()
        return DataElementDef(name, dtype, restriction, initial, self.loc_of(kw))

    def parse_typeref(self) -> DataType:
        t = self.peek()
        if t.type is not _Tok.IDENT:
            raise self.fail(t, f"unexpected {t.show()}", expected="type name")
        word = str(t.value)
        if word in SCALAR_TYPES:
            self.next()
            return DataType(SCALAR_TYPES[word])
        if word == "point":
            self.next()
            space = self.ident("coordinate space")
            if space not in POINT_SPACES:
                raise self.fail(t, f"unknown coordinate space {space!r}", expected="wc, ndc or dc")
            return DataType(TypeKind.POINT, space=space)
        if word == "enum":
            self.next()
            return DataType(TypeKind.ENUM, enum_name=self.ident("enum type name"))
        if word in ("list", "queue", "table"):
            self.next()
            self.expect_keyword("of")
            return DataType(TypeKind(word), elem=self.parse_typeref())
        if word == "pair":
            self.next()
            self.expect_keyword("of")
            first = self.parse_typeref()
            second = self.parse_typeref()
            return DataType(TypeKind.PAIR, first=first, second=second)
        raise self.fail(t, f"unknown type {word!r}", expected="type name")

    def parse_restr(self) -> Restriction:
        if self.at_keyword("range"):
            self.next()
            lo = self.peek()
            if lo.type not in (_Tok.INT, _Tok.REAL):
                raise self.fail(lo, f"unexpected {lo.show()}", expected="number")
            self.next()
            self.expect(_Tok.DOTDOT)
            hi = self.peek()
            if hi.type not in (_Tok.INT, _Tok.REAL):
                raise self.fail(hi, f"unexpected {hi.show()}", expected="number")
            self.next()
            if hi.value < lo.value:
                raise self.fail(
                    hi,
                    f"empty range: low bound {lo.value} exceeds high bound {hi.value}",
                    expected="high bound >= low bound",
                )
            if lo.type is _Tok.INT and hi.type is _Tok.INT:
                return Restriction.int_range(int(lo.value), int(hi.value))
            return Restriction.real_range(float(lo.value), float(hi.value))
        self.expect_keyword("in")
        self.expect(_Tok.LBRACE)
        values: list[str] = []
        first = self.expect(_Tok.IDENT, "enum value")
        values.append(str(first.value))
        while self.peek().type is _Tok.IDENT:
            tok = self.next()
            if tok.value in values:
                raise self.fail(tok, f"duplicate membership value {tok.value!r}")
            values.append(str(tok.value))
        self.expect(_Tok.RBRACE)
        return Restriction.membership(tuple(values))

    def parse_bundle(self) -> BundleDef:
        kw = self.expect_keyword("bundle")
        name = self.string("bundle name")
        self.expect(_Tok.LBRACE)
        members: list[str] = []
        while self.peek().type is _Tok.STRING:
            members.append(self.string())
        self.expect(_Tok.RBRACE)
        return BundleDef(name, tuple(members), self.loc_of(kw))

    def parse_group(self) -> GroupDef:
        kw = self.expect_keyword("group")
        name = self.string("group name")
        self.expect(_Tok.LBRACE)
        self.expect_keyword("calls")
        members = [self.string("function name")]
        while self.peek().type is _Tok.STRING:
            members.append(self.string())
        self.expect(_Tok.RBRACE)
        return GroupDef(name, tuple(members), self.loc_of(kw))

    def parse_function(self) -> FunctionDecl:
        kw = self.expect_keyword("function")
        name = self.string("function name")
        self.expect(_Tok.LBRACE)
        ftype = ""
        level = ""
        valid_states: tuple[str, ...] = ()
        params: list[ParamItem] = []
        effects: list[EffectDef] = []
        references: list[str] = []
        while True:
            t = self.peek()
            if t.type is _Tok.RBRACE:
                self.next()
                break
            if t.type is _Tok.EOF:
                raise self.fail(t, "unexpected end of input in function body", expected="'}'")
            if t.type is not _Tok.IDENT:
                raise self.fail(t, f"unexpected {t.show()}", expected="function item")
            word = str(t.value)
            if word == "type":
                self.next()
                ftype = self.ident("function type tag")
            elif word == "level":
                self.next()
                level = self.ident("level name")
            elif word == "states":
                self.next()
                self.expect(_Tok.LBRACE)
                valid_states = tuple(self.ident_list("state name"))
                self.expect(_Tok.RBRACE)
            elif word == "param":
                params.append(self.parse_param())
            elif word == "effect":
                effects.append(self.parse_effect())
            elif word == "references":
                self.next()
                references.append(self.string("reference"))
                while self.peek().type is _Tok.STRING:
                    references.append(self.string())
            else:
                raise self.fail(
                    t,
                    f"unexpected {t.show()} in function body",
                    expected="type, level, states, param, effect or references",
                )
        return FunctionDecl(
            name=name,
            ftype=ftype,
            level=level,
            valid_states=valid_states,
            param_items=tuple(params),
            effects=tuple(effects),
            references=tuple(references),
            loc=self.loc_of(kw),
        )

    def parse_param(self) -> ParamItem:
        kw = self.expect_keyword("param")
        t = self.peek()
        if not self.at_keyword("in", "out"):
            raise self.fail(t, f"unexpected {t.show()}", expected="'in' or 'out'")
        direction = Direction(self.next().value)
        t = self.peek()
        if not self.at_keyword("internal", "external"):
            raise self.fail(t, f"unexpected {t.show()}", expected="'internal' or 'external'")
        locality = Locality(self.next().value)
        if self.at_keyword("bundle"):
            self.next()
            return ParamItem(direction, locality, bundle=self.string("bundle name"), loc=self.loc_of(kw))
        element = self.string("data element name")
        restriction = Restriction.none()
        if self.at_keyword("range", "in"):
            restriction = self.parse_restr()
        return ParamItem(direction, locality, element=element, restriction=restriction, loc=self.loc_of(kw))

    def parse_effect(self) -> EffectDef:
        kw = self.expect_keyword("effect")
        t = self.peek()
        if t.type is not _Tok.IDENT or t.value not in EFFECT_CLASSES:
            raise self.fail(
                t,
                f"unexpected {t.show()}",
                expected="effect class (init, transform, test, testtransform, unclassified)",
            )
        effect_class = EFFECT_CLASSES[str(self.next().value)]
        text = self.string("effect text")
        self.expect(_Tok.LBRACE)
        clauses = self.parse_clauses()
        self.expect(_Tok.RBRACE)
        return EffectDef(effect_class, text, tuple(clauses), self.loc_of(kw))

    def parse_clauses(self) -> list[Clause]:
        out: list[Clause] = []
        while self.at_keyword("requires", "sets", "when", "onerror"):
            out.append(self.parse_clause())
        return out

    def parse_clause(self) -> Clause:
        t = self.peek()
        word = str(t.value)
        if word == "requires":
            kw = self.next()
            element = self.string("data element name")
            self.expect(_Tok.LBRACE)
            flags: set[str] = set()
            while self.at_keyword("allocated", "defined"):
                flags.add(str(self.next().value))
            value_cond = ValueCond.NONE
            value = None
            if self.at_keyword("value"):
                self.next()
                if self.at_keyword("known"):
                    self.next()
                    value_cond = ValueCond.KNOWN
                else:
                    self.expect(_Tok.EQ)
                    value_cond = ValueCond.EQUALS
                    value = self.literal()
            self.expect(_Tok.RBRACE)
            return Clause(
                ClauseKind.REQUIRES,
                element=element,
                flags=frozenset(flags),
                value_cond=value_cond,
                value=value,
                loc=self.loc_of(kw),
            )
        if word == "sets":
            kw = self.next()
            element = self.string("data element name")
            self.expect(_Tok.LBRACE)
            flags = set()
            while self.at_keyword("allocated", "defined"):
                flags.add(str(self.next().value))
            value = None
            if self.at_keyword("value"):
                self.next()
                self.expect(_Tok.EQ)
                value = self.literal()
            self.expect(_Tok.RBRACE)
            return Clause(
                ClauseKind.SETS,
                element=element,
                flags=frozenset(flags),
                value=value,
                loc=self.loc_of(kw),
            )
        if word == "when":
            kw = self.next()
            element = self.string("data element name")
            t = self.peek()
            if t.type is _Tok.EQ:
                relation = "="
            elif t.type is _Tok.NEQ:
                relation = "!="
            else:
                raise self.fail(t, f"unexpected {t.show()}", expected="'=' or '!='")
            self.next()
            value = self.literal()
            self.expect(_Tok.LBRACE)
            then_clauses = self.parse_clauses()
            self.expect(_Tok.RBRACE)
            else_clauses: list[Clause] = []
            if self.at_keyword("else"):
                self.next()
                self.expect(_Tok.LBRACE)
                else_clauses = self.parse_clauses()
                self.expect(_Tok.RBRACE)
            return Clause(
                ClauseKind.WHEN,
                element=element,
                relation=relation,
                value=value,
                then_clauses=tuple(then_clauses),
                else_clauses=tuple(else_clauses),
                loc=self.loc_of(kw),
            )
        if word == "onerror":
            kw = self.next()
            numbers = [int(self.expect(_Tok.INT, "error number").value)]
            while self.peek().type is _Tok.INT:
                numbers.append(int(self.next().value))
            return Clause(ClauseKind.ONERROR, error_numbers=tuple(numbers), loc=self.loc_of(kw))
        raise self.fail(t, f"unexpected {t.show()}", expected="clause")  # pragma: no cover


def parse_source(text: str, file: str = "<string>") -> ParseResult:
    """Parse SVS source into declarations plus diagnostics.

    Any input is accepted; declarations appear in source order and syntax
    errors never abort the pass.
    """
    toks, lex_diags = _tokenize(text, file)
    result = _Parser(toks, file).parse_spec()
    result.diagnostics = lex_diags + result.diagnostics
    result.diagnostics.sort(key=lambda d: d.location.sort_key())
    return result


def parse_bytes(data: bytes, file: str = "<bytes>") -> ParseResult:
    """Decode UTF-8 (diagnosing invalid bytes at their offset) and parse."""
    diags: list[ParseDiagnostic] = []
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = data[: e.start].decode("utf-8", errors="replace")
        line = prefix.count("\n") + 1
        col = len(prefix) - (prefix.rfind("\n") + 1) + 1
        diags.append(
            ParseDiagnostic(
                SourceLocation(file, line, col),
                f"invalid UTF-8 at byte offset {e.start}",
            )
        )
        text = data.decode("utf-8", errors="replace")
    result = parse_source(text, file)
    result.diagnostics = diags + result.diagnostics
    return result


# ---------------------------------------------------------------------------
# Serialization


def _quote(s: str) -> str:
    escaped = (
        s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    )
    return f'"{escaped}"'


def _ser_literal(lit: Literal) -> str:
    if lit.kind is LiteralKind.STRING:
        return _quote(str(lit.value))
    return str(lit.value)


def _ser_restr(r: Restriction) -> str:
    if r.kind is RestrictionKind.MEMBERSHIP:
        return "in { " + " ".join(r.values) + " }"
    return f"range {r.lo} .. {r.hi}"


def _ser_clause(c: Clause, indent: int, out: list[str]) -> None:
    pad = " " * indent
    if c.kind is ClauseKind.REQUIRES:
        parts = sorted(c.flags, key=("allocated", "defined").index)
        if c.value_cond is ValueCond.KNOWN:
            parts.append("value known")
        elif c.value_cond is ValueCond.EQUALS:
            parts.append(f"value = {_ser_literal(c.value)}")
        body = " ".join(parts)
        out.append(f"{pad}requires {_quote(c.element)} {{ {body} }}" if body else f"{pad}requires {_quote(c.element)} {{ }}")
    elif c.kind is ClauseKind.SETS:
        parts = sorted(c.flags, key=("allocated", "defined").index)
        if c.value is not None:
            parts.append(f"value = {_ser_literal(c.value)}")
        body = " ".join(parts)
        out.append(f"{pad}sets {_quote(c.element)} {{ {body} }}" if body else f"{pad}sets {_quote(c.element)} {{ }}")
    elif c.kind is ClauseKind.WHEN:
        out.append(f"{pad}when {_quote(c.element)} {c.relation} {_ser_literal(c.value)} {{")
        for inner in c.then_clauses:
            _ser_clause(inner, indent + 2, out)
        if c.else_clauses:
            out.append(f"{pad}}} else {{")
            for inner in c.else_clauses:
                _ser_clause(inner, indent + 2, out)
        out.append(f"{pad}}}")
    else:
        out.append(f"{pad}onerror " + " ".join(str(n) for n in c.error_numbers))


def _ser_params(db: SpecDb, fn_params: tuple, out: list[str]) -> None:
    i = 0
    params = list(fn_params)
    while i < len(params):
        p = params[i]
        if p.via_bundle is not None:
            bundle = db.bundles.get(p.via_bundle)
            # Re-emit bundle syntax only when the run reproduces the bundle exactly.
            k = 0
            while i + k < len(params) and params[i + k].via_bundle == p.via_bundle:
                k += 1
            chunk = params[i : i + k]
            if (
                bundle is not None
                and tuple(q.element for q in chunk) == bundle.members
                and all(q.direction == p.direction and q.locality == p.locality for q in chunk)
            ):
                out.append(
                    f"  param {p.direction.value} {p.locality.value} bundle {_quote(p.via_bundle)}"
                )
                i += k
                continue
        line = f"  param {p.direction.value} {p.locality.value} {_quote(p.element)}"
        if not p.restriction.is_none:
            line += " " + _ser_restr(p.restriction)
        out.append(line)
        i += 1


def serialize(db: SpecDb) -> str:
    """Canonical SVS source for a SpecDb.

    One declaration per block, two-space indentation, LF line endings.
    ``parse_source(serialize(db))`` rebuilds a structurally equal SpecDb and
    the function is idempotent on its own output.
    """
    blocks: list[str] = []
    if db.states:
        blocks.append(
            "states { " + " ".join(db.states) + " } initial " + (db.initial_state or db.states[0])
        )
    if db.levels:
        blocks.append("levels { " + " ".join(db.levels) + " }")
    for err in db.errors.values():
        blocks.append(f"error {err.number} {_quote(err.text)}")
    for enum in db.enums.values():
        blocks.append("enum " + enum.name + " { " + " ".join(enum.values) + " }")
    for elem in db.data_elements.values():
        line = f"data {_quote(elem.name)} : {elem.dtype}"
        if not elem.restriction.is_none:
            line += " " + _ser_restr(elem.restriction)
        if elem.initial is not None:
            line += f" init {_ser_literal(elem.initial)}"
        blocks.append(line)
    for bundle in db.bundles.values():
        lines = [f"bundle {_quote(bundle.name)} {{"]
        lines += [f"  {_quote(m)}" for m in bundle.members]
        lines.append("}")
        blocks.append("\n".join(lines))
    for fn in db.functions.values():
        lines = [f"function {_quote(fn.name)} {{"]
        if fn.ftype:
            lines.append(f"  type {fn.ftype}")
        if fn.level:
            lines.append(f"  level {fn.level}")
        if fn.valid_states:
            lines.append("  states { " + " ".join(fn.valid_states) + " }")
        _ser_params(db, fn.params, lines)
        for eff in fn.effects:
            lines.append(f"  effect {eff.effect_class.value} {_quote(eff.text)} {{")
            for c in eff.clauses:
                _ser_clause(c, 4, lines)
            lines.append("  }")
        if fn.references:
            lines.append("  references " + " ".join(_quote(r) for r in fn.references))
        lines.append("}")
        blocks.append("\n".join(lines))
    for group in db.groups.values():
        lines = [f"group {_quote(group.name)} {{"]
        lines.append("  calls " + " ".join(_quote(m) for m in group.members))
        lines.append("}")
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"
