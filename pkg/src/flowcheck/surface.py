"""Lexer, parser and source map for the mini-ML surface language.

The surface syntax is a small ML dialect: curried `let`/`let rec` bindings,
`fun`, `if`, `match` over `Left`/`Right` and list patterns, tuples, list
literals, and the usual operator set.  `val name : type` declarations install
signatures (used both for prelude files and for in-source headers).
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field


class SurfaceError(Exception):
    """Lexical or syntax error, carrying a Location when available."""

    def __init__(self, message: str, loc: "Location | None" = None):
        super().__init__(message)
        self.message = message
        self.loc = loc


# ---------------------------------------------------------------------------
# Locations and the source map


@dataclass(frozen=True)
class Location:
    file: int
    start: int
    end: int
    builtin: bool = False

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("location start must not exceed end`")

    def cover(self, other: "Location") -> "Location":
        """Smallest location spanning self and other (same file)."""
        return Location(self.file, min(self.start, other.start), max(self.end, other.end), self.builtin)

    def contains(self, other: "Location") -> bool:
        return self.file == other.file and self.start <= other.start and other.end <= self.end


@dataclass
class SrcFile:
    name: str
    text: str
    builtin: bool
    user_index: int  # 1-based among non-builtin files; 0 for builtin
    line_starts: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.line_starts:
            starts = [0]
            for i, ch in enumerate(self.text):
                if ch == "\n":
                    starts.append(i + 1)
            self.line_starts = starts

    def line_col(self, offset: int) -> tuple[int, int]:
        """1-based line and column for a byte offset."""
        offset = max(0, min(offset, len(self.text)))
        li = bisect_right(self.line_starts, offset) - 1
        return li + 1, offset - self.line_starts[li] + 1

    def line_text(self, line: int) -> str:
        start = self.line_starts[line - 1]
        end = self.line_starts[line] - 1 if line < len(self.line_starts) else len(self.text)
        return self.text[start:end]


@dataclass
class Excerpt:
    ref: str          # "1.4" or "lib."
    line: str         # source line text (first line of the span)
    col: int          # 0-based caret start within `line`
    width: int        # caret width, >= 1
    ellipsis: bool    # span continued past the first line
    builtin: bool


class SourceMap:
    """Registry of loaded files; resolves Locations to excerpts."""

    def __init__(self):
        self.files: list[SrcFile] = []
        self._user_count = 0

    def add_file(self, name: str, text: str, builtin: bool = False) -> int:
        if builtin:
            idx = 0
        else:
            self._user_count += 1
            idx = self._user_count
        self.files.append(SrcFile(name, text, builtin, idx))
        return len(self.files) - 1

    def file(self, index: int) -> SrcFile:
        try:
            return self.files[index]
        except IndexError:
            raise SurfaceError(f"unknown file id {index}") from None

    def line_col(self, loc: Location) -> tuple[int, int]:
        return self.file(loc.file).line_col(loc.start)

    def end_line_col(self, loc: Location) -> tuple[int, int]:
        return self.file(loc.file).line_col(loc.end)

    def span_lookup(self, loc: Location) -> Excerpt:
        src = self.file(loc.file)
        line, col = src.line_col(loc.start)
        end_line, end_col = src.line_col(loc.end)
        text = src.line_text(line)
        if loc.builtin or src.builtin:
            ref = "lib."
        else:
            ref = f"{src.user_index}.{line}"
        if end_line > line:
            width = max(1, len(text) - (col - 1))
            return Excerpt(ref, text, col - 1, width, True, loc.builtin or src.builtin)
        width = max(1, end_col - col)
        return Excerpt(ref, text, col - 1, width, False, loc.builtin or src.builtin)

    def sort_key(self, loc: Location) -> tuple:
        # builtin locations order before user code
        src = self.file(loc.file)
        if loc.builtin or src.builtin:
            return (0, loc.file, loc.start)
        return (1, src.user_index, loc.start)


# ---------------------------------------------------------------------------
# Tokens


KEYWORDS = {"let", "rec", "in", "if", "then", "else", "match", "with", "fun", "val", "true", "false", "mod"}

MULTI_OPS = ["->", "::", "+.", "-.", "*.", "/.", "<=", ">=", "<>"]
SINGLE_OPS = "+-*/^@<>="
PUNCT = "()[]|;,:_"


@dataclass(frozen=True)
class Token:
    kind: str   # IDENT, INT, FLOAT, STRING, KW, OP, PUNCT, EOF
    text: str
    loc: Location


def tokenize(text: str, file: int = 0, builtin: bool = False) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)

    def loc(a: int, b: int) -> Location:
        return Location(file, a, b, builtin)

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if text.startswith("(*", i):
            depth, j = 1, i + 2
            while j < n and depth:
                if text.startswith("(*", j):
                    depth += 1
                    j += 2
                elif text.startswith("*)", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth:
                raise SurfaceError("unterminated comment", loc(i, n))
            i = j
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise SurfaceError("unterminated string literal", loc(i, n))
            toks.append(Token("STRING", "".join(buf), loc(i, j + 1)))
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(Token("FLOAT", text[i:j], loc(i, j)))
            elif j < n and text[j] == "." and not text.startswith("..", j) and (j + 1 >= n or not text[j + 1].isalpha()):
                j += 1
                toks.append(Token("FLOAT", text[i:j], loc(i, j)))
            else:
                toks.append(Token("INT", text[i:j], loc(i, j)))
            i = j
            continue
        if c.isalpha() or c == "'":
            j = i
            if c == "'":  # type variable 'a
                j += 1
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(Token("TYVAR", text[i:j], loc(i, j)))
                i = j
                continue
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            # dotted identifiers like List.map
            while j < n and text[j] == "." and j + 1 < n and text[j + 1].isalpha():
                j += 1
                while j < n and (text[j].isalnum() or text[j] in "_'"):
                    j += 1
            word = text[i:j]
            kind = "KW" if word in KEYWORDS else "IDENT"
            toks.append(Token(kind, word, loc(i, j)))
            i = j
            continue
        matched = False
        for op in MULTI_OPS:
            if text.startswith(op, i):
                toks.append(Token("OP", op, loc(i, i + len(op))))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if c in SINGLE_OPS:
            toks.append(Token("OP", c, loc(i, i + 1)))
            i += 1
            continue
        if c in PUNCT:
            toks.append(Token("PUNCT", c, loc(i, i + 1)))
            i += 1
            continue
        raise SurfaceError(f"illegal character {c!r}", loc(i, i + 1))
    toks.append(Token("EOF", "", loc(n, n)))
    return toks


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Pattern:
    pass


@dataclass(frozen=True)
class PVar(Pattern):
    name: str
    loc: Location


@dataclass(frozen=True)
class PWild(Pattern):
    loc: Location


@dataclass(frozen=True)
class PTuple(Pattern):
    items: tuple[Pattern, ...]
    loc: Location


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str
    loc: Location


@dataclass(frozen=True)
class Unit(Term):
    loc: Location


@dataclass(frozen=True)
class IntLit(Term):
    value: int
    loc: Location


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool
    loc: Location


@dataclass(frozen=True)
class StrLit(Term):
    value: str
    loc: Location


@dataclass(frozen=True)
class FloatLit(Term):
    value: float
    loc: Location


@dataclass(frozen=True)
class Plus(Term):
    """Primitive integer addition from the core calculus.

    The surface language routes `+` through the prelude signature instead;
    this form is kept for core-calculus terms built programmatically.
    """

    lhs: Term
    rhs: Term
    loc: Location


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    els: Term
    loc: Location


@dataclass(frozen=True)
class Lam(Term):
    param: Pattern
    body: Term
    loc: Location


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    loc: Location


@dataclass(frozen=True)
class Tuple(Term):
    items: tuple[Term, ...]
    loc: Location


@dataclass(frozen=True)
class Proj(Term):
    """fst / snd projection of a pair."""

    arg: Term
    index: int  # 0 or 1
    loc: Location


@dataclass(frozen=True)
class Inj(Term):
    """Left / Right injection into the either type."""

    arg: Term
    side: int  # 0 = Left, 1 = Right
    loc: Location


@dataclass(frozen=True)
class Case(Term):
    scrut: Term
    lname: str
    lloc: Location
    lbody: Term
    rname: str
    rloc: Location
    rbody: Term
    loc: Location


@dataclass(frozen=True)
class NilLit(Term):
    loc: Location


@dataclass(frozen=True)
class ListCase(Term):
    scrut: Term
    nil_body: Term
    hname: str
    hloc: Location
    tname: str
    tloc: Location
    cons_body: Term
    loc: Location


@dataclass(frozen=True)
class Let(Term):
    pat: Pattern
    rhs: Term
    body: Term
    rec: bool
    loc: Location


# --- type expressions for `val` declarations


@dataclass(frozen=True)
class TyExpr:
    pass


@dataclass(frozen=True)
class TyName(TyExpr):
    name: str  # int, bool, string, float, unit
    loc: Location


@dataclass(frozen=True)
class TyVarRef(TyExpr):
    name: str  # 'a
    loc: Location


@dataclass(frozen=True)
class TyArrow(TyExpr):
    lhs: TyExpr
    rhs: TyExpr
    loc: Location


@dataclass(frozen=True)
class TyProd(TyExpr):
    items: tuple[TyExpr, ...]
    loc: Location


@dataclass(frozen=True)
class TyApp(TyExpr):
    ctor: str  # list, either
    args: tuple[TyExpr, ...]
    loc: Location


@dataclass(frozen=True)
class ValDecl:
    name: str
    ty: TyExpr
    loc: Location


@dataclass(frozen=True)
class TopLet:
    pat: Pattern
    rhs: Term
    rec: bool
    loc: Location


@dataclass(frozen=True)
class Program:
    items: tuple


# ---------------------------------------------------------------------------
# Parser

COMPARE_OPS = {"=", "<>", "<", "<=", ">", ">="}
CONCAT_OPS = {"@", "^"}
ADD_OPS = {"+", "-", "+.", "-."}
MUL_OPS = {"*", "/", "*.", "/.", "mod"}

# tokens that terminate an expression without being consumed
STOPPERS = {"then", "else", "in", "with", "and"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token utilities

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return (t.kind == "KW" and t.text == word) or (t.kind == "OP" and t.text == word)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SurfaceError(f"expected {want!r}, found {t.text or t.kind!r}", t.loc)
        return self.next()

    # -- entry points

    def parse_program(self) -> Program:
        items = []
        while not self.at("EOF"):
            if self.at("KW", "val"):
                items.append(self.parse_val())
            elif self.at("KW", "let"):
                items.append(self.parse_top_let())
            else:
                t = self.peek()
                raise SurfaceError(f"expected 'let' or 'val', found {t.text!r}", t.loc)
            while self.at("PUNCT", ";"):
                self.next()
        return Program(tuple(items))

    def parse_val(self) -> ValDecl:
        start = self.expect("KW", "val")
        name, nloc = self.parse_def_name()
        self.expect("PUNCT", ":")
        ty = self.parse_type()
        return ValDecl(name, ty, nloc.cover(ty.loc))

    def parse_def_name(self) -> tuple[str, Location]:
        if self.at("PUNCT", "("):
            lp = self.next()
            t = self.peek()
            if t.kind == "OP" or (t.kind == "KW" and t.text == "mod"):
                self.next()
                rp = self.expect("PUNCT", ")")
                return t.text, lp.loc.cover(rp.loc)
            raise SurfaceError("expected operator name", t.loc)
        t = self.expect("IDENT")
        return t.text, t.loc

    def parse_top_let(self) -> TopLet:
        start = self.expect("KW", "let")
        rec = False
        if self.at("KW", "rec"):
            self.next()
            rec = True
        pat, rhs = self.parse_binding()
        return TopLet(pat, rhs, rec, start.loc.cover(term_loc(rhs)))

    def parse_binding(self) -> tuple[Pattern, Term]:
        """name params.. = rhs   |   pattern = rhs"""
        if self.at("IDENT") and not self.at("PUNCT", "("):
            t = self.next()
            params = []
            while self.starts_pattern():
                params.append(self.parse_pattern_atom())
            self.expect("OP", "=")
            body = self.parse_expr()
            rhs = body
            for p in reversed(params):
                rhs = Lam(p, rhs, pattern_loc(p).cover(term_loc(rhs)))
            return PVar(t.text, t.loc), rhs
        pat = self.parse_pattern_atom()
        params = []
        while self.starts_pattern():
            params.append(self.parse_pattern_atom())
        if params:
            if not isinstance(pat, PVar):
                raise SurfaceError("function name must be an identifier", pattern_loc(pat))
            self.expect("OP", "=")
            body = self.parse_expr()
            rhs = body
            for p in reversed(params):
                rhs = Lam(p, rhs, pattern_loc(p).cover(term_loc(rhs)))
            return pat, rhs
        self.expect("OP", "=")
        return pat, self.parse_expr()

    def starts_pattern(self) -> bool:
        t = self.peek()
        if t.kind == "IDENT":
            return True
        if t.kind == "PUNCT" and t.text in ("(", "_"):
            # not the `= ...` of the binding and not unit-returning call
            return True
        return False

    def parse_pattern_atom(self) -> Pattern:
        t = self.peek()
        if t.kind == "IDENT":
            self.next()
            return PVar(t.text, t.loc)
        if t.kind == "PUNCT" and t.text == "_":
            self.next()
            return PWild(t.loc)
        if t.kind == "PUNCT" and t.text == "(":
            lp = self.next()
            items = [self.parse_pattern_atom()]
            while self.at("PUNCT", ","):
                self.next()
                items.append(self.parse_pattern_atom())
            rp = self.expect("PUNCT", ")")
            if len(items) == 1:
                return items[0]
            return PTuple(tuple(items), lp.loc.cover(rp.loc))
        raise SurfaceError(f"expected pattern, found {t.text!r}", t.loc)

    # -- expressions

    def parse_expr(self) -> Term:
        t = self.peek()
        if t.kind == "KW" and t.text == "let":
            start = self.next()
            rec = False
            if self.at("KW", "rec"):
                self.next()
                rec = True
            pat, rhs = self.parse_binding()
            self.expect("KW", "in")
            body = self.parse_expr()
            return Let(pat, rhs, body, rec, start.loc.cover(term_loc(body)))
        if t.kind == "KW" and t.text == "fun":
            start = self.next()
            params = [self.parse_pattern_atom()]
            while self.starts_pattern():
                params.append(self.parse_pattern_atom())
            self.expect("OP", "->")
            body = self.parse_expr()
            rhs = body
            for p in reversed(params):
                rhs = Lam(p, rhs, start.loc.cover(term_loc(body)))
            return rhs
        if t.kind == "KW" and t.text == "if":
            start = self.next()
            cond = self.parse_expr()
            self.expect("KW", "then")
            then = self.parse_expr()
            self.expect("KW", "else")
            els = self.parse_expr()
            return If(cond, then, els, start.loc.cover(term_loc(els)))
        if t.kind == "KW" and t.text == "match":
            return self.parse_match()
        return self.parse_compare()

    def parse_match(self) -> Term:
        start = self.expect("KW", "match")
        scrut = self.parse_expr()
        with_tok = self.expect("KW", "with")
        arms = []
        if self.at("PUNCT", "|"):
            self.next()
        while True:
            arms.append(self.parse_arm())
            if self.at("PUNCT", "|"):
                self.next()
                continue
            break
        return self.build_match(start, scrut, arms)

    def parse_arm(self):
        t = self.peek()
        if t.kind == "IDENT" and t.text in ("Left", "Right"):
            self.next()
            b = self.expect("IDENT")
            self.expect("OP", "->")
            body = self.parse_expr()
            return (t.text, b.text, b.loc, body, t.loc)
        if t.kind == "PUNCT" and t.text == "[":
            lb = self.next()
            rb = self.expect("PUNCT", "]")
            self.expect("OP", "->")
            body = self.parse_expr()
            return ("nil", None, lb.loc.cover(rb.loc), body, lb.loc.cover(rb.loc))
        if t.kind in ("IDENT", "INT") or (t.kind == "PUNCT" and t.text == "_"):
            head = self.next()
            self.expect("OP", "::")
            tail = self.expect("IDENT")
            self.expect("OP", "->")
            body = self.parse_expr()
            return ("cons", head, tail, body)
        raise SurfaceError(f"unsupported match pattern {t.text!r}", t.loc)

    def build_match(self, start: Token, scrut: Term, arms) -> Term:
        loc = start.loc.cover(term_loc(arms[-1][3]))
        kinds = [a[0] for a in arms]
        if kinds == ["Left", "Right"]:
            l, r = arms
            return Case(scrut, l[1], l[2], l[3], r[1], r[2], r[3], loc)
        if kinds == ["Right", "Left"]:
            r, l = arms
            return Case(scrut, l[1], l[2], l[3], r[1], r[2], r[3], loc)
        if kinds and kinds[0] == "nil" and all(k == "cons" for k in kinds[1:]) and len(kinds) >= 2:
            nil_body = arms[0][3]
            cons_arms = arms[1:]
            # binders come from the last (unguarded) arm
            _, head_tok, tail_tok, last_body = cons_arms[-1]
            if head_tok.kind == "INT":
                raise SurfaceError("final list arm must bind the head", head_tok.loc)
            hname, hloc = (head_tok.text, head_tok.loc) if head_tok.kind == "IDENT" else ("_", head_tok.loc)
            tname, tloc = tail_tok.text, tail_tok.loc
            body = last_body
            # literal-guarded arms become equality tests on the bound head
            for kind, head_tok2, tail_tok2, armbody in reversed(cons_arms[:-1]):
                if head_tok2.kind != "INT":
                    raise SurfaceError("only literal-guarded extra list arms are supported", head_tok2.loc)
                lit = IntLit(int(head_tok2.text), head_tok2.loc)
                guard = App(
                    App(Var("=", head_tok2.loc), Var(hname, head_tok2.loc), head_tok2.loc),
                    lit,
                    head_tok2.loc,
                )
                if tail_tok2.text != tname:
                    armbody = Let(PVar(tail_tok2.text, tail_tok2.loc), Var(tname, tail_tok2.loc), armbody, False, term_loc(armbody))
                body = If(guard, armbody, body, head_tok2.loc.cover(term_loc(body)))
            return ListCase(scrut, nil_body, hname, hloc, tname, tloc, body, loc)
        raise SurfaceError("unsupported combination of match arms", start.loc)

    def parse_compare(self) -> Term:
        lhs = self.parse_concat()
        while self.at("OP") and self.peek().text in COMPARE_OPS:
            op = self.next()
            rhs = self.parse_concat()
            lhs = binop(op, lhs, rhs)
        return lhs

    def parse_concat(self) -> Term:
        lhs = self.parse_cons()
        if self.at("OP") and self.peek().text in CONCAT_OPS:
            op = self.next()
            rhs = self.parse_concat()  # right assoc
            return binop(op, lhs, rhs)
        return lhs

    def parse_cons(self) -> Term:
        lhs = self.parse_add()
        if self.at("OP", "::"):
            op = self.next()
            rhs = self.parse_cons()  # right assoc
            return binop(op, lhs, rhs)
        return lhs

    def parse_add(self) -> Term:
        lhs = self.parse_mul()
        while self.at("OP") and self.peek().text in ADD_OPS:
            op = self.next()
            rhs = self.parse_mul()
            lhs = binop(op, lhs, rhs)
        return lhs

    def parse_mul(self) -> Term:
        lhs = self.parse_app()
        while (self.at("OP") and self.peek().text in MUL_OPS) or self.at("KW", "mod"):
            op = self.next()
            rhs = self.parse_app()
            lhs = binop(op, lhs, rhs)
        return lhs

    def parse_app(self) -> Term:
        fn = self.parse_atom()
        while self.starts_atom():
            arg = self.parse_atom()
            fn = App(fn, arg, term_loc(fn).cover(term_loc(arg)))
        return fn

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("INT", "FLOAT", "STRING"):
            return True
        if t.kind == "IDENT":
            return True
        if t.kind == "KW" and t.text in ("true", "false"):
            return True
        if t.kind == "PUNCT" and t.text in ("(", "["):
            return True
        return False

    def parse_atom(self) -> Term:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return IntLit(int(t.text), t.loc)
        if t.kind == "FLOAT":
            self.next()
            return FloatLit(float(t.text), t.loc)
        if t.kind == "STRING":
            self.next()
            return StrLit(t.text, t.loc)
        if t.kind == "KW" and t.text in ("true", "false"):
            self.next()
            return BoolLit(t.text == "true", t.loc)
        if t.kind == "IDENT":
            if t.text in ("Left", "Right") and self.starts_atom_after_ident():
                self.next()
                arg = self.parse_atom()
                return Inj(arg, 0 if t.text == "Left" else 1, t.loc.cover(term_loc(arg)))
            if t.text in ("fst", "snd") and self.starts_atom_after_ident():
                self.next()
                arg = self.parse_atom()
                return Proj(arg, 0 if t.text == "fst" else 1, t.loc.cover(term_loc(arg)))
            self.next()
            return Var(t.text, t.loc)
        if t.kind == "PUNCT" and t.text == "(":
            lp = self.next()
            if self.at("PUNCT", ")"):
                rp = self.next()
                return Unit(lp.loc.cover(rp.loc))
            if self.at("OP") or self.at("KW", "mod"):
                # operator section (+)
                op = self.next()
                rp = self.expect("PUNCT", ")")
                return Var(op.text, lp.loc.cover(rp.loc))
            items = [self.parse_expr()]
            while self.at("PUNCT", ","):
                self.next()
                items.append(self.parse_expr())
            rp = self.expect("PUNCT", ")")
            if len(items) == 1:
                return items[0]
            return Tuple(tuple(items), lp.loc.cover(rp.loc))
        if t.kind == "PUNCT" and t.text == "[":
            lb = self.next()
            if self.at("PUNCT", "]"):
                rb = self.next()
                return NilLit(lb.loc.cover(rb.loc))
            items = [self.parse_expr()]
            while self.at("PUNCT", ";"):
                self.next()
                items.append(self.parse_expr())
            rb = self.expect("PUNCT", "]")
            nil_loc = rb.loc
            out: Term = NilLit(nil_loc)
            for item in reversed(items):
                out = App(
                    App(Var("::", term_loc(item)), item, term_loc(item)),
                    out,
                    term_loc(item).cover(nil_loc),
                )
            return out
        raise SurfaceError(f"expected expression, found {t.text or t.kind!r}", t.loc)

    def starts_atom_after_ident(self) -> bool:
        return self.toks[self.pos + 1].kind in ("INT", "FLOAT", "STRING", "IDENT") or (
            self.toks[self.pos + 1].kind == "PUNCT" and self.toks[self.pos + 1].text in ("(", "[")
        ) or (self.toks[self.pos + 1].kind == "KW" and self.toks[self.pos + 1].text in ("true", "false"))

    # -- type expressions

    def parse_type(self) -> TyExpr:
        lhs = self.parse_type_prod()
        if self.at("OP", "->"):
            self.next()
            rhs = self.parse_type()
            return TyArrow(lhs, rhs, lhs.loc.cover(rhs.loc))
        return lhs

    def parse_type_prod(self) -> TyExpr:
        items = [self.parse_type_post()]
        while self.at("OP", "*"):
            self.next()
            items.append(self.parse_type_post())
        if len(items) == 1:
            return items[0]
        return TyProd(tuple(items), items[0].loc.cover(items[-1].loc))

    def parse_type_post(self) -> TyExpr:
        ty = self.parse_type_atom()
        while self.at("IDENT") and self.peek().text in ("list", "either"):
            t = self.next()
            if t.text == "either":
                if not isinstance(ty, TyProd) or len(ty.items) != 2:
                    raise SurfaceError("either expects two arguments", t.loc)
                ty = TyApp("either", ty.items, ty.loc.cover(t.loc))
            else:
                ty = TyApp("list", (ty,), ty.loc.cover(t.loc))
        return ty

    def parse_type_atom(self) -> TyExpr:
        t = self.peek()
        if t.kind == "TYVAR":
            self.next()
            return TyVarRef(t.text, t.loc)
        if t.kind == "IDENT" and t.text in ("int", "bool", "string", "float", "unit"):
            self.next()
            return TyName(t.text, t.loc)
        if t.kind == "PUNCT" and t.text == "(":
            lp = self.next()
            items = [self.parse_type()]
            while self.at("PUNCT", ","):
                self.next()
                items.append(self.parse_type())
            rp = self.expect("PUNCT", ")")
            if len(items) == 1:
                inner = items[0]
                return inner
            return TyProd(tuple(items), lp.loc.cover(rp.loc))
        raise SurfaceError(f"expected type, found {t.text!r}", t.loc)


def binop(op: Token, lhs: Term, rhs: Term) -> Term:
    loc = term_loc(lhs).cover(term_loc(rhs))
    return App(App(Var(op.text, op.loc), lhs, term_loc(lhs).cover(op.loc)), rhs, loc)


def term_loc(t: Term) -> Location:
    return t.loc  # type: ignore[attr-defined]


def pattern_loc(p: Pattern) -> Location:
    return p.loc  # type: ignore[attr-defined]


def parse_program(tokens: list[Token]) -> Program:
    return Parser(tokens).parse_program()


def parse_source(text: str, file: int = 0, builtin: bool = False) -> Program:
    return parse_program(tokenize(text, file, builtin))


# ---------------------------------------------------------------------------
# Pretty printing (used by the parser round-trip tests)


def pattern_str(p: Pattern) -> str:
    match p:
        case PVar(name, _):
            return name
        case PWild(_):
            return "_"
        case PTuple(items, _):
            return "(" + ", ".join(pattern_str(i) for i in items) + ")"
    raise TypeError(p)


def term_str(t: Term) -> str:
    match t:
        case Var(name, _):
            if not name[0].isalpha() and name != "_":
                return f"({name})"
            return name
        case Unit(_):
            return "()"
        case IntLit(v, _):
            return str(v)
        case BoolLit(v, _):
            return "true" if v else "false"
        case StrLit(v, _):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        case FloatLit(v, _):
            s = repr(v)
            return s if "." in s or "e" in s else s + "."
        case Plus(a, b, _):
            return f"(({term_str(a)}) + ({term_str(b)}))"
        case If(c, a, b, _):
            return f"(if {term_str(c)} then {term_str(a)} else {term_str(b)})"
        case Lam(p, b, _):
            return f"(fun {pattern_str(p)} -> {term_str(b)})"
        case App(f, a, _):
            return f"({term_str(f)} {term_str(a)})"
        case Tuple(items, _):
            return "(" + ", ".join(term_str(i) for i in items) + ")"
        case Proj(a, i, _):
            return f"({'fst' if i == 0 else 'snd'} {term_str(a)})"
        case Inj(a, s, _):
            return f"({'Left' if s == 0 else 'Right'} {term_str(a)})"
        case Case(sc, ln, _, lb, rn, _, rb, _):
            return f"(match {term_str(sc)} with | Left {ln} -> {term_str(lb)} | Right {rn} -> {term_str(rb)})"
        case NilLit(_):
            return "[]"
        case ListCase(sc, nb, hn, _, tn, _, cb, _):
            return f"(match {term_str(sc)} with | [] -> {term_str(nb)} | {hn}::{tn} -> {term_str(cb)})"
        case Let(p, r, b, rec, _):
            kw = "let rec" if rec else "let"
            return f"({kw} {pattern_str(p)} = {term_str(r)} in {term_str(b)})"
    raise TypeError(t)


def ty_str(t: TyExpr) -> str:
    match t:
        case TyName(name, _):
            return name
        case TyVarRef(name, _):
            return name
        case TyArrow(a, b, _):
            return f"({ty_str(a)} -> {ty_str(b)})"
        case TyProd(items, _):
            return "(" + " * ".join(ty_str(i) for i in items) + ")"
        case TyApp("either", (a, b), _):
            return f"(({ty_str(a)}, {ty_str(b)}) either)"
        case TyApp(name, (a,), _):
            return f"({ty_str(a)} {name})"
    raise TypeError(t)


def program_str(p: Program) -> str:
    out = []
    for item in p.items:
        if isinstance(item, ValDecl):
            name = item.name if item.name[0].isalpha() else f"({item.name})"
            out.append(f"val {name} : {ty_str(item.ty)}")
        else:
            kw = "let rec" if item.rec else "let"
            out.append(f"{kw} {pattern_str(item.pat)} = {term_str(item.rhs)}")
    return "\n".join(out) + "\n"


def strip_locs(x):
    """Structural skeleton of a term/pattern/program with locations removed."""
    if isinstance(x, Program):
        return ("program", tuple(strip_locs(i) for i in x.items))
    if isinstance(x, ValDecl):
        return ("val", x.name, strip_locs(x.ty))
    if isinstance(x, TopLet):
        return ("toplet", x.rec, strip_locs(x.pat), strip_locs(x.rhs))
    if isinstance(x, Location):
        return ()
    if isinstance(x, (Pattern, Term, TyExpr)):
        fields = []
        for name, val in vars(x).items():
            if isinstance(val, Location):
                continue
            fields.append(strip_locs(val))
        return (type(x).__name__, tuple(fields))
    if isinstance(x, tuple):
        return tuple(strip_locs(i) for i in x)
    return x
