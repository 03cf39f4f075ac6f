"""Reader for the C rendering of step programs.

Accepts exactly the architectural pattern the code generator emits: four
record typedefs each with one static instance, #define constants, and void
functions whose bodies are assignments, calls, and if/else chains. Anything
else — loops, switches, pointers, arrays, local variables, early returns —
is reported as a positioned diagnostic saying the construct does not
conform to the architectural pattern, rather than a parse error.

C boolean idioms are normalized on the way in (`!e` becomes a comparison
with 0, or the complemented comparison) and each rewrite is logged so the
verification report can show what the reader changed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .._lex import Token, TokenStream, tokenize
from ..chart.ast import Binary, COMPARE_OPS, Const, Field, FloatLit, IntLit, Unary, Var, complement
from ..diagnostics import Diagnostic, SourceError
from .ir import (
    FLOAT,
    INT,
    UINT8,
    FieldDecl,
    FunctionDef,
    ImplProgram,
    RECORD_NAMES,
    RecordDecl,
    SAssign,
    SCall,
    SIf,
    check_program,
)

_PUNCTS = (
    "{", "}", "(", ")", ";", ",", ".",
    "==", "!=", "<=", ">=", "<", ">",
    "+=", "-=", "*=", "/=", "++", "--",
    "=", "+", "-", "*", "/", "%",
    "&&", "||", "!", "<<", ">>", "&", "|", "^", "~",
    "[", "]", "->", "?", ":",
)

_NONCONFORMING_STMT = {
    "for": "a 'for' loop",
    "while": "a 'while' loop",
    "do": "a 'do' loop",
    "switch": "a 'switch' statement",
    "goto": "a 'goto'",
    "break": "a 'break'",
    "continue": "a 'continue'",
    "case": "a 'case' label",
    "default": "a 'default' label",
}

_TYPE_WORDS = {"int", "long", "unsigned", "signed", "char", "short", "double", "float", "void", "const"}

_DEFINE_RE = re.compile(r"^\s*#\s*define\s+(\w+)\s+(-?\d+)\s*$")
_INCLUDE_RE = re.compile(r"^\s*#\s*(include|pragma)\b")
_DIRECTIVE_RE = re.compile(r"^\s*#\s*(\w+)")


def _strip_block_comments(text: str) -> str:
    """Blank out /* ... */ while keeping every line and column in place."""
    out = list(text)
    i, n = 0, len(text)
    while i < n - 1:
        if text[i] == "/" and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            for k in range(i, j):
                if out[k] != "\n":
                    out[k] = " "
            i = j
        else:
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class CReadResult:
    program: ImplProgram | None
    diagnostics: tuple[Diagnostic, ...]
    notes: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.program is not None


class _Reader:
    def __init__(self, text: str):
        self.diags: list[Diagnostic] = []
        self.notes: list[str] = []
        self.constants: dict[str, int] = {}
        self.typedef_tag: dict[str, str] = {}  # typedef name -> record tag
        self.instance_tag: dict[str, str] = {}  # static variable -> record tag
        self.records: dict[str, RecordDecl] = {}
        self.prog_names: set[str] = set()
        self.functions: dict[str, FunctionDef] = {}
        self.params: tuple[str, ...] = ()
        self.block_depth = 0

        text = _strip_block_comments(text)
        lines = text.split("\n")
        for li, line in enumerate(lines, start=1):
            if not line.lstrip().startswith("#"):
                continue
            m = _DEFINE_RE.match(line)
            if m:
                self.constants[m.group(1)] = int(m.group(2))
            elif _INCLUDE_RE.match(line):
                pass  # headers carry no meaning at this level
            else:
                d = _DIRECTIVE_RE.match(line)
                what = d.group(1) if d else "directive"
                self.diags.append(Diagnostic(
                    f"preprocessor '#{what}' does not conform to the architectural pattern",
                    li, line.index("#") + 1,
                ))
            lines[li - 1] = ""
        self.ts = TokenStream(tokenize("\n".join(lines), _PUNCTS, line_comment=("//",)))

    # -- helpers -------------------------------------------------------------

    def fail(self, msg: str, t: Token) -> None:
        self.diags.append(Diagnostic(msg, t.line, t.col))

    def nonconf(self, what: str, t: Token) -> None:
        self.fail(f"{what} does not conform to the architectural pattern", t)

    def skip_construct(self) -> None:
        """Resync after a diagnostic: consume a balanced block or up to ';'."""
        ts = self.ts
        depth = 0
        saw_brace = False
        while True:
            t = ts.peek()
            if t.kind == "eof":
                return
            ts.next()
            if t.text in ("(", "["):
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif t.text == "{":
                depth += 1
                saw_brace = True
            elif t.text == "}":
                depth -= 1
                if saw_brace and depth <= 0:
                    return
            elif t.text == ";" and depth <= 0 and not saw_brace:
                return

    def sort_of_type(self, words: list[str], t: Token) -> str | None:
        key = tuple(words)
        if key in (("unsigned", "char"), ("char",)):
            return UINT8
        if key in (("long", "long"), ("long",), ("int",), ("long", "long", "int"), ("unsigned",)):
            return INT
        if key in (("double",), ("float",)):
            return FLOAT
        self.fail(f"unsupported C type '{' '.join(words)}'", t)
        return None

    def type_words(self) -> tuple[list[str], Token]:
        ts = self.ts
        first = ts.peek()
        words = []
        while ts.peek().kind == "ident" and ts.peek().text in _TYPE_WORDS:
            words.append(ts.next().text)
        return words, first

    # -- expressions ----------------------------------------------------------

    def expr(self):
        e = self.e_or()
        if self.ts.at("?"):
            self.nonconf("a '?:' conditional expression", self.ts.peek())
            self.ts.next()
            e = self.expr()
            if self.ts.eat(":"):
                self.expr()
        return e

    def e_or(self):
        e = self.e_and()
        while self.ts.eat("||"):
            e = Binary("or", e, self.e_and())
        return e

    def e_and(self):
        e = self.e_cmp()
        while self.ts.eat("&&"):
            e = Binary("and", e, self.e_cmp())
        return e

    def e_cmp(self):
        e = self.e_add()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.ts.at(op):
                self.ts.next()
                return Binary(op, e, self.e_add())
        return e

    def e_add(self):
        e = self.e_mul()
        while True:
            t = self.ts.peek()
            if t.text == "+":
                self.ts.next()
                e = Binary("+", e, self.e_mul())
            elif t.text == "-":
                self.ts.next()
                e = Binary("-", e, self.e_mul())
            elif t.text in ("&", "|", "^", "<<", ">>"):
                self.nonconf(f"the bitwise '{t.text}' operator", t)
                self.ts.next()
                self.e_mul()
            else:
                return e

    def e_mul(self):
        e = self.e_unary()
        while True:
            t = self.ts.peek()
            if t.text == "*":
                self.ts.next()
                e = Binary("*", e, self.e_unary())
            elif t.text in ("/", "%"):
                self.nonconf(f"the '{t.text}' operator", t)
                self.ts.next()
                self.e_unary()
            else:
                return e

    def e_unary(self):
        ts = self.ts
        t = ts.peek()
        if t.text == "-":
            ts.next()
            inner = self.e_unary()
            if isinstance(inner, IntLit):
                return IntLit(-inner.value)
            if isinstance(inner, FloatLit):
                return FloatLit(-inner.value)
            return Unary("-", inner)
        if t.text == "!":
            ts.next()
            inner = self.e_unary()
            if isinstance(inner, Binary) and inner.op in COMPARE_OPS:
                out = complement(inner)
                self.notes.append(f"{t.line}:{t.col}: read '!' as the complemented comparison")
            else:
                out = Binary("==", inner, IntLit(0))
                self.notes.append(f"{t.line}:{t.col}: read '!e' as 'e == 0'")
            return out
        if t.text in ("&", "*"):
            self.nonconf("a pointer operation", t)
            ts.next()
            return self.e_unary()
        if t.text == "~":
            self.nonconf("the '~' operator", t)
            ts.next()
            return self.e_unary()
        return self.e_atom()

    def _num(self, t: Token):
        nxt = self.ts.peek()
        if (
            nxt.kind == "ident"
            and nxt.line == t.line
            and nxt.col == t.col + len(t.text)
            and nxt.text.upper() in ("U", "L", "UL", "LL", "ULL", "LU", "F")
        ):
            self.ts.next()  # integer/float suffix
        if "." in t.text or "e" in t.text or "E" in t.text:
            return FloatLit(float(t.text))
        return IntLit(int(t.text))

    def e_atom(self):
        ts = self.ts
        t = ts.next()
        if t.kind == "num":
            return self._num(t)
        if t.text == "(":
            e = self.expr()
            ts.expect(")")
            return e
        if t.kind == "ident":
            if ts.at("."):
                tag = self.instance_tag.get(t.text)
                if tag is None:
                    self.fail(f"'{t.text}' is not a declared record instance", t)
                    tag = "DWork"
                ts.next()
                f = ts.expect_ident("field name")
                return Field(tag, f.text)
            if ts.at("->"):
                self.nonconf("a pointer dereference", t)
                ts.next()
                ts.expect_ident("field name")
                return IntLit(0)
            if ts.at("["):
                self.nonconf("an array access", t)
                self.skip_construct()
                return IntLit(0)
            if t.text in self.constants:
                return Const(t.text)
            if t.text in self.params:
                return Var(t.text)
            self.fail(f"unknown identifier '{t.text}'", t)
            return IntLit(0)
        self.fail(f"unexpected token {t.text!r} in expression", t)
        return IntLit(0)

    # -- statements -----------------------------------------------------------

    def block(self) -> tuple:
        """A `{ ... }` block, or a single statement without braces."""
        ts = self.ts
        self.block_depth += 1
        try:
            if ts.eat("{"):
                out = []
                while not ts.eat("}"):
                    if ts.peek().kind == "eof":
                        self.fail("unterminated block", ts.peek())
                        break
                    st = self.stmt()
                    if st is not None:
                        out.append(st)
                return tuple(out)
            st = self.stmt()
            return () if st is None else (st,)
        finally:
            self.block_depth -= 1

    def stmt(self):
        ts = self.ts
        t = ts.peek()
        if t.kind == "ident" and t.text in _NONCONFORMING_STMT:
            self.nonconf(_NONCONFORMING_STMT[t.text], t)
            ts.next()
            self.skip_construct()
            return None
        if t.text == "return":
            ts.next()
            # a bare `return;` closing the function body is harmless noise
            if self.block_depth == 1 and ts.at(";") and self.ts.toks[self.ts.pos + 1].text == "}":
                ts.next()
                self.notes.append(f"{t.line}:{t.col}: ignored bare 'return' at end of function")
                return None
            self.nonconf("an early or value-bearing 'return'", t)
            self.skip_construct()
            return None
        if t.kind == "ident" and (t.text in _TYPE_WORDS or t.text in self.typedef_tag):
            self.nonconf("a local variable declaration", t)
            self.skip_construct()
            return None
        if t.text == "if":
            return self.if_chain()
        if t.text in ("*", "&"):
            self.nonconf("a pointer operation", t)
            self.skip_construct()
            return None
        if t.text == ";":
            ts.next()
            return None
        if t.kind == "ident":
            name = ts.next()
            if ts.at("("):
                ts.next()
                args = []
                if not ts.at(")"):
                    args.append(self.expr())
                    while ts.eat(","):
                        args.append(self.expr())
                ts.expect(")")
                ts.expect(";")
                return SCall(name.text, tuple(args))
            if ts.at("."):
                tag = self.instance_tag.get(name.text)
                if tag is None:
                    self.fail(f"'{name.text}' is not a declared record instance", name)
                    tag = "DWork"
                ts.next()
                f = ts.expect_ident("field name")
                nt = ts.peek()
                if nt.text in ("+=", "-=", "*=", "/=", "++", "--"):
                    self.nonconf(f"the '{nt.text}' operator", nt)
                    self.skip_construct()
                    return None
                ts.expect("=")
                rhs = self.expr()
                ts.expect(";")
                return SAssign(Field(tag, f.text), rhs)
            nt = ts.peek()
            if nt.text == "->":
                self.nonconf("a pointer dereference", nt)
                self.skip_construct()
                return None
            if nt.text in ("++", "--", "+=", "-=", "*=", "/="):
                self.nonconf(f"the '{nt.text}' operator", nt)
                self.skip_construct()
                return None
            if nt.text == "=":
                self.fail(f"assignment to '{name.text}', which is not a record field", name)
                self.skip_construct()
                return None
            self.fail(f"cannot parse statement starting at '{name.text}'", name)
            self.skip_construct()
            return None
        self.fail(f"cannot parse statement starting at {t.text!r}", t)
        ts.next()
        self.skip_construct()
        return None

    def if_chain(self) -> SIf:
        ts = self.ts
        arms = []
        while True:
            ts.expect("if")
            ts.expect("(")
            g = self.expr()
            ts.expect(")")
            arms.append((g, self.block()))
            if not ts.eat("else"):
                break
            if not ts.at("if"):
                arms.append((None, self.block()))
                break
        return SIf(tuple(arms))

    # -- top level ------------------------------------------------------------

    def typedef(self) -> None:
        ts = self.ts
        kw = ts.expect("typedef")
        if not ts.eat("struct"):
            self.nonconf("a non-struct typedef", kw)
            self.skip_construct()
            return
        if ts.peek().kind == "ident":  # optional struct tag
            ts.next()
        ts.expect("{")
        fields = []
        while not ts.eat("}"):
            if ts.peek().kind == "eof":
                self.fail("unterminated struct", ts.peek())
                return
            words, first = self.type_words()
            if not words:
                self.fail(f"expected a field type, found {ts.peek().text!r}", ts.peek())
                self.skip_construct()
                continue
            sort = self.sort_of_type(words, first)
            if ts.at("*"):
                self.nonconf("a pointer field", ts.peek())
                ts.next()
            fname = ts.expect_ident("field name")
            if ts.at("["):
                self.nonconf("an array field", ts.peek())
                self.skip_construct()
                continue
            ts.expect(";")
            if sort is not None and fname.text != "_unused":
                fields.append(FieldDecl(fname.text, sort))
        tname = ts.expect_ident("typedef name")
        ts.expect(";")
        tag, _, rest = tname.text.partition("_")
        if tag not in RECORD_NAMES or not rest:
            self.fail(
                f"typedef '{tname.text}' does not name one of the pattern's records "
                f"({'/'.join(RECORD_NAMES)} followed by the chart name)",
                tname,
            )
            return
        self.typedef_tag[tname.text] = tag
        self.records[tag] = RecordDecl(tag, tuple(fields))
        self.prog_names.add(rest)

    def static_decl(self) -> None:
        ts = self.ts
        ts.expect("static")
        tname = ts.expect_ident("type name")
        tag = self.typedef_tag.get(tname.text)
        vname = ts.expect_ident("variable name")
        ts.expect(";")
        if tag is None:
            self.fail(f"static of unknown type '{tname.text}'", tname)
            return
        self.instance_tag[vname.text] = tag

    def function(self) -> None:
        ts = self.ts
        ts.expect("void")
        name = ts.expect_ident("function name")
        ts.expect("(")
        params = []
        if not ts.eat(")"):
            if ts.eat("void"):
                ts.expect(")")
            else:
                while True:
                    words, first = self.type_words()
                    if self.sort_of_type(words or ["?"], first) != INT:
                        self.fail("function parameters must be plain ints", first)
                    params.append(ts.expect_ident("parameter name").text)
                    if not ts.eat(","):
                        break
                ts.expect(")")
        self.params = tuple(params)
        body = self.block()
        self.params = ()
        self.functions[name.text] = FunctionDef(name.text, tuple(params), body)

    def top(self) -> None:
        ts = self.ts
        while ts.peek().kind != "eof":
            t = ts.peek()
            if t.text == "typedef":
                self.typedef()
            elif t.text == "static":
                self.static_decl()
            elif t.text == "void":
                self.function()
            elif t.kind == "ident" and t.text in _TYPE_WORDS:
                self.nonconf("a non-void function or file-scope variable", t)
                self.skip_construct()
            else:
                self.fail(f"unexpected {t.text!r} at file scope", t)
                ts.next()
                self.skip_construct()

    def build(self) -> CReadResult:
        try:
            self.top()
        except SourceError as e:
            self.diags.extend(e.diagnostics)
        if not self.prog_names:
            self.diags.append(Diagnostic("no record typedefs found; not a step program"))
        elif len(self.prog_names) > 1:
            self.diags.append(Diagnostic(
                f"record typedefs disagree on the chart name: {', '.join(sorted(self.prog_names))}"
            ))
        name = sorted(self.prog_names)[0] if self.prog_names else "?"
        output_name = f"{name}_output"
        candidates = (f"{name}_initialize", "initialize")
        init_name = next((f for f in candidates if f in self.functions), candidates[0])
        for fname in (init_name, output_name):
            if not self.diags and fname not in self.functions:
                self.diags.append(Diagnostic(f"missing entry point '{fname}'"))
        if self.diags:
            return CReadResult(None, tuple(self.diags), tuple(self.notes))
        p = ImplProgram(
            name=name,
            dwork=self.records.get("DWork", RecordDecl("DWork", ())),
            blocks=self.records.get("B", RecordDecl("B", ())),
            inputs=self.records.get("U", RecordDecl("U", ())),
            outputs=self.records.get("Y", RecordDecl("Y", ())),
            constants=dict(self.constants),
            functions=dict(self.functions),
            init_name=init_name,
            output_name=output_name,
        )
        problems = check_program(p)
        if problems:
            return CReadResult(
                None,
                tuple(Diagnostic(m) for m in problems),
                tuple(self.notes),
            )
        return CReadResult(p, (), tuple(self.notes))


def try_read_c(text: str) -> CReadResult:
    try:
        return _Reader(text).build()
    except SourceError as e:  # tokenizer rejects, e.g., stray characters
        return CReadResult(None, tuple(e.diagnostics), ())


def read_c(text: str) -> ImplProgram:
    res = try_read_c(text)
    if res.program is None:
        raise SourceError(list(res.diagnostics))
    return res.program
