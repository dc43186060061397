"""Concrete syntax: lexer, parser and printer for types, terms and theories.

Grammar (EBNF, ASCII form; Unicode aliases are normalized by the lexer):

    type      ::= tyatom ("->" type)?
    tyatom    ::= "U" | "P" | "(" type ")"

    term      ::= binder | imp
    binder    ::= ("forall" | "exists") group+ "." term
                | "fun" group+ "=>" term
    group     ::= name+ ":" type
    imp       ::= disj ("->" imp)?
    disj      ::= conj ("\\/" disj)?
    conj      ::= cmp ("/\\" conj)?
    cmp       ::= neg ("=" neg)?            (non-associative)
    neg       ::= "~" neg | mem
    mem       ::= app (U+2208 app)?          (input sugar for "mem a b")
    app       ::= atom atom*
    atom      ::= name | "(" term ")"

    script    ::= statement*
    statement ::= "constant" name ":" type
                | "axiom" name ":" term
                | "let" name ":" name "=" term
                | "theorem" name ":" term "by" tactic
    tactic    ::= "taut" | "metis" "[" (name ("," name)*)? "]"

Precedence, tightest first: application, the member sugar, "~", "=",
"/\\", "\\/", "->".  Implication and the lattice connectives associate to
the right; "=" does not associate.  "#" starts a comment running to the
end of the line.  Accepted Unicode aliases: forall, exists, not, and, or,
arrow, member, the empty set (as the name emptyset) and the power set
operator (as the name pow).

The printer emits ASCII and satisfies parse(print(t)) alpha-equal to t
for every term the parser can produce (in particular, terms that apply
builtin connectives and quantifiers fully).  Other well-typed terms print
in an eta-expanded display form that still parses, but to the expanded
term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from metis_lcf.kernel import (
    FALSE,
    PROP,
    TRUE,
    UNIVERSE,
    Abs,
    Bound,
    Comb,
    Const,
    FunType,
    KernelError,
    LogicalType,
    Term,
    _infer,
    _shift,
    fn,
    is_builtin,
    mk_all,
    mk_eq,
    mk_ex,
    term_consts,
    type_of,
)

MEM_TYPE = fn(UNIVERSE, UNIVERSE, PROP)

_KEYWORDS = frozenset(
    ["forall", "exists", "fun", "by", "constant", "axiom", "let", "theorem"]
)

_UNICODE_ALIASES = {
    "∀": ("KW", "forall"),
    "∃": ("KW", "exists"),
    "¬": ("OP", "~"),
    "∧": ("OP", "/\\"),
    "∨": ("OP", "\\/"),
    "→": ("OP", "->"),
    "∈": ("OP", "mem"),
    "∅": ("NAME", "emptyset"),
    "\U0001d4ab": ("NAME", "pow"),
}


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, KW, OP, EOF
    value: str
    span: SourceSpan


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:\$[0-9]+)?")
_OPS = ["->", "=>", "/\\", "\\/", "~", "=", "(", ")", ":", ".", ",", "[", "]"]


def _lex(src: str, filename: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(src)

    def span(l0, c0):
        return SourceSpan(filename, l0, c0, line, col)

    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        alias = _UNICODE_ALIASES.get(ch)
        if alias is not None:
            kind, value = alias
            i += 1
            col += 1
            tokens.append(Token(kind, value, span(l0, c0)))
            continue
        m = _NAME_RE.match(src, i)
        if m:
            word = m.group()
            i = m.end()
            col += len(word)
            kind = "KW" if word in _KEYWORDS else "NAME"
            tokens.append(Token(kind, word, span(l0, c0)))
            continue
        for op in _OPS:
            if src.startswith(op, i):
                i += len(op)
                col += len(op)
                tokens.append(Token("OP", op, span(l0, c0)))
                break
        else:
            raise ParseError(
                f"unexpected character {ch!r}",
                SourceSpan(filename, l0, c0, l0, c0 + 1),
            )
    tokens.append(Token("EOF", "", SourceSpan(filename, line, col, line, col)))
    return tokens


def _lookup_sig(sig, name: str) -> LogicalType | None:
    if sig is None:
        return None
    lookup = getattr(sig, "lookup_const", None)
    if lookup is not None:
        return lookup(name)
    return sig.get(name)


class _Parser:
    def __init__(self, tokens: list[Token], sig):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig
        self.env: list[tuple[str, LogicalType]] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.value == value

    def expect_op(self, value: str) -> Token:
        tok = self.next()
        if tok.kind != "OP" or tok.value != value:
            raise ParseError(f"expected {value!r}, found {tok.value!r}", tok.span)
        return tok

    def expect_name(self) -> Token:
        tok = self.next()
        if tok.kind != "NAME":
            raise ParseError(f"expected a name, found {tok.value!r}", tok.span)
        return tok

    def fail(self, message: str):
        raise ParseError(message, self.peek().span)

    # -- types

    def type_(self) -> LogicalType:
        left = self.type_atom()
        if self.at_op("->"):
            self.next()
            return FunType(left, self.type_())
        return left

    def type_atom(self) -> LogicalType:
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "(":
            self.next()
            ty = self.type_()
            self.expect_op(")")
            return ty
        if tok.kind == "NAME" and tok.value == "U":
            self.next()
            return UNIVERSE
        if tok.kind == "NAME" and tok.value == "P":
            self.next()
            return PROP
        self.fail(f"expected a type, found {tok.value!r}")

    # -- terms

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "KW" and tok.value in ("forall", "exists", "fun"):
            return self.binder()
        return self.imp()

    def binder(self) -> Term:
        kw = self.next()
        groups: list[tuple[str, LogicalType, SourceSpan]] = []
        closer = "=>" if kw.value == "fun" else "."
        while not self.at_op(closer):
            names = [self.expect_name()]
            while self.peek().kind == "NAME":
                names.append(self.next())
            self.expect_op(":")
            ty = self.type_()
            groups.extend((t.value, ty, t.span) for t in names)
        self.expect_op(closer)
        if not groups:
            self.fail("binder needs at least one variable")
        for name, ty, span in groups:
            if name in ("true", "false"):
                raise ParseError(f"cannot bind reserved name {name!r}", span)
            self.env.append((name, ty))
        body = self.term()
        for name, ty, _ in reversed(groups):
            self.env.pop()
            if kw.value == "forall":
                body = mk_all(name, ty, body)
            elif kw.value == "exists":
                body = mk_ex(name, ty, body)
            else:
                body = Abs(name, ty, body)
        return body

    def imp(self) -> Term:
        left = self.disj()
        if self.at_op("->"):
            self.next()
            return Comb(Comb(Const("implies", fn(PROP, PROP, PROP)), left), self.imp())
        return left

    def disj(self) -> Term:
        left = self.conj()
        if self.at_op("\\/"):
            self.next()
            return Comb(Comb(Const("or", fn(PROP, PROP, PROP)), left), self.disj())
        return left

    def conj(self) -> Term:
        left = self.cmp()
        if self.at_op("/\\"):
            self.next()
            return Comb(Comb(Const("and", fn(PROP, PROP, PROP)), left), self.conj())
        return left

    def cmp(self) -> Term:
        left = self.neg()
        if not self.at_op("="):
            return left
        eq_tok = self.next()
        right = self.neg()
        if self.at_op("="):
            self.fail("'=' is non-associative; add parentheses")
        try:
            lty = _infer(left, [ty for _, ty in self.env])
            rty = _infer(right, [ty for _, ty in self.env])
        except KernelError as e:
            raise ParseError(str(e), eq_tok.span) from None
        if lty != rty:
            raise ParseError(
                f"'=' between different types ({lty!r} vs {rty!r})", eq_tok.span
            )
        return mk_eq(left, right, lty)

    def neg(self) -> Term:
        if self.at_op("~"):
            self.next()
            return Comb(Const("not", fn(PROP, PROP)), self.neg())
        return self.mem_sugar()

    def mem_sugar(self) -> Term:
        left = self.app()
        if self.at_op("mem"):
            self.next()
            right = self.app()
            return Comb(Comb(Const("mem", MEM_TYPE), left), right)
        return left

    def app(self) -> Term:
        t = self.atom()
        while True:
            tok = self.peek()
            if tok.kind == "NAME" or (tok.kind == "OP" and tok.value == "("):
                t = Comb(t, self.atom())
            else:
                return t

    def atom(self) -> Term:
        tok = self.next()
        if tok.kind == "OP" and tok.value == "(":
            t = self.term()
            self.expect_op(")")
            return t
        if tok.kind != "NAME":
            raise ParseError(f"expected a term, found {tok.value!r}", tok.span)
        name = tok.value
        for i, (bname, bty) in enumerate(reversed(self.env)):
            if bname == name:
                return Bound(i)
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        ty = _lookup_sig(self.sig, name)
        if ty is None:
            raise ParseError(f"unknown name {name!r}", tok.span)
        return Const(name, ty)


def parse_type(src: str, filename: str = "<string>") -> LogicalType:
    p = _Parser(_lex(src, filename), None)
    ty = p.type_()
    if p.peek().kind != "EOF":
        p.fail("trailing input after type")
    return ty


def parse_term(ctx, src: str, filename: str = "<string>") -> Term:
    """Parse and typecheck a term.  ctx may be a Context (constants are
    resolved and the result is checked with type_of) or a plain mapping
    from names to types (no well-formedness check beyond inference)."""
    p = _Parser(_lex(src, filename), ctx)
    t = p.term()
    tok = p.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.value!r}", tok.span)
    try:
        if hasattr(ctx, "lookup_const"):
            type_of(ctx, t)
        else:
            _infer(t, [])
    except KernelError as e:
        raise ParseError(str(e), tok.span) from None
    return t


# ---------------------------------------------------------------------------
# Printing


def print_type(ty: LogicalType) -> str:
    if ty == UNIVERSE:
        return "U"
    if ty == PROP:
        return "P"
    dom = print_type(ty.dom)
    if isinstance(ty.dom, FunType):
        dom = f"({dom})"
    return f"{dom} -> {print_type(ty.cod)}"


_PREC_BINDER = 0
_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_EQ = 4
_PREC_NEG = 5
_PREC_APP = 7
_PREC_ATOM = 8

_INFIX = {
    "implies": ("->", _PREC_IMP),
    "or": ("\\/", _PREC_OR),
    "and": ("/\\", _PREC_AND),
}


def _fresh_display(base: str, taken: set[str]) -> str:
    base = base.split("$", 1)[0] or "x"
    name = base
    while name in taken or name in _KEYWORDS or name in ("true", "false"):
        name += "'"
    return name


def print_term(ctx, t: Term) -> str:
    """Render t in the ASCII grammar above.  ctx is accepted for signature
    symmetry with parse_term and may be None."""
    taken = {c.name for c in term_consts(t)}
    return _print(t, [], taken, _PREC_BINDER)


def _wrap(s: str, prec: int, ctx_prec: int) -> str:
    return f"({s})" if prec < ctx_prec else s


def _print(t: Term, env: list[str], taken: set[str], prec: int) -> str:
    match t:
        case Const(name, _):
            return name
        case Bound(i):
            if i < len(env):
                return env[len(env) - 1 - i]
            return f"#{i}"
        case Abs(hint, vty, body):
            name = _fresh_display(hint, taken | set(env))
            env.append(name)
            s = _print(body, env, taken, _PREC_BINDER)
            env.pop()
            return _wrap(
                f"fun {name}:{print_type(vty)} => {s}", _PREC_BINDER, prec
            )
    head, args = _strip(t)
    if isinstance(head, Const) and is_builtin(head):
        s = _print_builtin(t, head, args, env, taken, prec)
        if s is not None:
            return s
    f = _print(t.fun, env, taken, _PREC_APP)
    x = _print(t.arg, env, taken, _PREC_ATOM)
    return _wrap(f"{f} {x}", _PREC_APP, prec)


def _strip(t: Term):
    args = []
    while isinstance(t, Comb):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _eta_display(t: Term, dom: LogicalType) -> Abs:
    return Abs("x", dom, Comb(_shift(t, 1), Bound(0)))


_BUILTIN_ARITY = {
    "true": 0,
    "false": 0,
    "not": 1,
    "and": 2,
    "or": 2,
    "implies": 2,
    "eq": 2,
    "all": 1,
    "ex": 1,
}


def _print_builtin(t: Term, head: Const, args, env, taken, prec):
    name = head.name
    arity = _BUILTIN_ARITY[name]
    if len(args) < arity:
        # partially applied builtin: display eta-expanded so it reparses
        ty = head.ty
        for _ in args:
            ty = ty.cod
        return _print(_eta_display(t, ty.dom), env, taken, prec)
    if len(args) > arity:
        return None
    if name in ("true", "false"):
        return name
    if name == "not":
        s = _print(args[0], env, taken, _PREC_NEG)
        return _wrap(f"~{s}", _PREC_NEG, prec)
    if name in _INFIX:
        sym, p = _INFIX[name]
        lhs = _print(args[0], env, taken, p + 1)
        rhs = _print(args[1], env, taken, p)
        return _wrap(f"{lhs} {sym} {rhs}", p, prec)
    if name == "eq":
        lhs = _print(args[0], env, taken, _PREC_EQ + 1)
        rhs = _print(args[1], env, taken, _PREC_EQ + 1)
        return _wrap(f"{lhs} = {rhs}", _PREC_EQ, prec)
    body = args[0]
    if not isinstance(body, Abs):
        body = _eta_display(body, head.ty.dom.dom)
    kw = "forall" if name == "all" else "exists"
    disp = _fresh_display(body.hint, taken | set(env))
    env.append(disp)
    s = _print(body.body, env, taken, _PREC_BINDER)
    env.pop()
    return _wrap(
        f"{kw} {disp}:{print_type(body.var_ty)}. {s}", _PREC_BINDER, prec
    )


# ---------------------------------------------------------------------------
# Theory scripts


@dataclass(frozen=True)
class ConstDecl:
    name: str
    ty: LogicalType


@dataclass(frozen=True)
class AxiomDecl:
    name: str
    term: Term


@dataclass(frozen=True)
class LetDecl:
    name: str  # the axiom name, e.g. oneDef
    const_name: str  # the new constant, e.g. one
    const_ty: LogicalType
    rhs: Term


@dataclass(frozen=True)
class TheoremDecl:
    name: str
    term: Term
    tactic: str  # "taut" or "metis"
    lemmas: tuple[str, ...] = ()


@dataclass(frozen=True)
class TheoryScript:
    statements: tuple = ()


def parse_theory(src: str, sig=None, filename: str = "<theory>") -> TheoryScript:
    """Parse a theory script.  sig gives the signature visible before the
    file's own declarations (the CLI passes the stdlib's constants); the
    file's constant and let statements extend it as parsing proceeds."""
    local: dict[str, LogicalType] = {}

    def lookup(name):
        got = local.get(name)
        if got is not None:
            return got
        return _lookup_sig(sig, name)

    class _Sig:
        lookup_const = staticmethod(lookup)

    p = _Parser(_lex(src, filename), _Sig())
    statements: list = []
    # statement names (axiom/let/theorem, the lemma namespace) and constant
    # names are separate namespaces: the motivating development has both a
    # constant and a theorem called "one"
    names_seen: set[str] = set()

    def check_name(tok: Token):
        if tok.value in names_seen:
            raise ParseError(f"duplicate name {tok.value!r}", tok.span)
        names_seen.add(tok.value)
        return tok.value

    while p.peek().kind != "EOF":
        tok = p.next()
        if tok.kind != "KW":
            raise ParseError(
                f"expected a statement keyword, found {tok.value!r}", tok.span
            )
        if tok.value == "constant":
            ntok = p.expect_name()
            if lookup(ntok.value) is not None:
                raise ParseError(
                    f"constant {ntok.value!r} already exists", ntok.span
                )
            p.expect_op(":")
            ty = p.type_()
            local[ntok.value] = ty
            statements.append(ConstDecl(ntok.value, ty))
        elif tok.value == "axiom":
            name = check_name(p.expect_name())
            p.expect_op(":")
            statements.append(AxiomDecl(name, p.term()))
        elif tok.value == "let":
            name = check_name(p.expect_name())
            p.expect_op(":")
            const_tok = p.expect_name()
            const_name = const_tok.value
            if lookup(const_name) is not None:
                raise ParseError(
                    f"constant {const_name!r} already exists", const_tok.span
                )
            p.expect_op("=")
            rhs = p.term()
            try:
                rty = _infer(rhs, [])
            except KernelError as e:
                raise ParseError(str(e), const_tok.span) from None
            local[const_name] = rty
            statements.append(LetDecl(name, const_name, rty, rhs))
        elif tok.value == "theorem":
            name = check_name(p.expect_name())
            p.expect_op(":")
            term = p.term()
            by = p.next()
            if by.kind != "KW" or by.value != "by":
                raise ParseError(f"expected 'by', found {by.value!r}", by.span)
            tac = p.expect_name()
            if tac.value == "taut":
                statements.append(TheoremDecl(name, term, "taut"))
            elif tac.value == "metis":
                p.expect_op("[")
                lemmas = []
                if not p.at_op("]"):
                    lemmas.append(p.expect_name().value)
                    while p.at_op(","):
                        p.next()
                        lemmas.append(p.expect_name().value)
                p.expect_op("]")
                statements.append(TheoremDecl(name, term, "metis", tuple(lemmas)))
            else:
                raise ParseError(f"unknown tactic {tac.value!r}", tac.span)
        else:
            raise ParseError(f"unexpected keyword {tok.value!r}", tok.span)
    return TheoryScript(tuple(statements))
