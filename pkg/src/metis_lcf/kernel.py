"""Trusted kernel: types, terms, contexts, theorems and the primitive rules.

Everything outside this module can only obtain a Theorem by calling the
functions defined here.  Terms use de Bruijn indices for bound variables;
there is no free-variable constructor, so "free variables" are always
constants declared in some context.
"""

from __future__ import annotations

import itertools


class KernelError(Exception):
    """Raised when a rule's precondition is violated."""


# ---------------------------------------------------------------------------
# Types


class LogicalType:
    __slots__ = ()


class _PropType(LogicalType):
    __slots__ = ()

    def __repr__(self):
        return "P"

    def __hash__(self):
        return 0x50524F50


class _UniverseType(LogicalType):
    __slots__ = ()

    def __repr__(self):
        return "U"

    def __hash__(self):
        return 0x554E4956


PROP = _PropType()
UNIVERSE = _UniverseType()


class FunType(LogicalType):
    __slots__ = ("dom", "cod", "_hash")
    __match_args__ = ("dom", "cod")

    def __init__(self, dom: LogicalType, cod: LogicalType):
        self.dom = dom
        self.cod = cod
        self._hash = hash((0x46554E, hash(dom), hash(cod)))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, FunType)
            and self._hash == other._hash
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"({self.dom!r} -> {self.cod!r})"


def fn(*types: LogicalType) -> LogicalType:
    """Right-associated function type: fn(a, b, c) is a -> (b -> c)."""
    if not types:
        raise ValueError("fn needs at least one type")
    out = types[-1]
    for t in reversed(types[:-1]):
        out = FunType(t, out)
    return out


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


class Const(Term):
    __slots__ = ("name", "ty", "_hash")
    __match_args__ = ("name", "ty")

    def __init__(self, name: str, ty: LogicalType):
        self.name = name
        self.ty = ty
        self._hash = hash((1, name, hash(ty)))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Const)
            and self._hash == other._hash
            and self.name == other.name
            and self.ty == other.ty
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class Bound(Term):
    __slots__ = ("index", "_hash")
    __match_args__ = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._hash = hash((2, index))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Bound) and self.index == other.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"#{self.index}"


class Comb(Term):
    __slots__ = ("fun", "arg", "_hash")
    __match_args__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self._hash = hash((3, fun._hash, arg._hash))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Comb)
            and self._hash == other._hash
            and self.fun == other.fun
            and self.arg == other.arg
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"({self.fun!r} {self.arg!r})"


class Abs(Term):
    """Lambda abstraction.  The hint is display-only and ignored by equality,
    so structural equality on terms is exactly alpha-equivalence."""

    __slots__ = ("hint", "var_ty", "body", "_hash")
    __match_args__ = ("hint", "var_ty", "body")

    def __init__(self, hint: str, var_ty: LogicalType, body: Term):
        self.hint = hint
        self.var_ty = var_ty
        self.body = body
        self._hash = hash((4, hash(var_ty), body._hash))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Abs)
            and self._hash == other._hash
            and self.var_ty == other.var_ty
            and self.body == other.body
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"(fun {self.hint}:{self.var_ty!r} => {self.body!r})"


def alpha_eq(s: Term, t: Term) -> bool:
    """Alpha-equivalence.  Structural equality already ignores binder hints."""
    return s == t


# ---------------------------------------------------------------------------
# Builtin constants.  These names are reserved; user constants cannot shadow
# them.  eq/all/ex are families indexed by a type argument.

BUILTIN_NAMES = frozenset(
    ["eq", "all", "ex", "and", "or", "implies", "not", "true", "false"]
)

TRUE = Const("true", PROP)
FALSE = Const("false", PROP)
NOT_C = Const("not", fn(PROP, PROP))
AND_C = Const("and", fn(PROP, PROP, PROP))
OR_C = Const("or", fn(PROP, PROP, PROP))
IMPLIES_C = Const("implies", fn(PROP, PROP, PROP))


def eq_c(ty: LogicalType) -> Const:
    return Const("eq", fn(ty, ty, PROP))


def all_c(ty: LogicalType) -> Const:
    return Const("all", fn(fn(ty, PROP), PROP))


def ex_c(ty: LogicalType) -> Const:
    return Const("ex", fn(fn(ty, PROP), PROP))


def is_builtin(t: Term) -> bool:
    """Is t a well-shaped instance of a builtin constant family?"""
    if not isinstance(t, Const) or t.name not in BUILTIN_NAMES:
        return False
    ty = t.ty
    match t.name:
        case "true" | "false":
            return ty == PROP
        case "not":
            return ty == fn(PROP, PROP)
        case "and" | "or" | "implies":
            return ty == fn(PROP, PROP, PROP)
        case "eq":
            return (
                isinstance(ty, FunType)
                and isinstance(ty.cod, FunType)
                and ty.cod.cod == PROP
                and ty.dom == ty.cod.dom
            )
        case "all" | "ex":
            return (
                isinstance(ty, FunType)
                and isinstance(ty.dom, FunType)
                and ty.dom.cod == PROP
                and ty.cod == PROP
            )
    return False


# ---------------------------------------------------------------------------
# Term builders and destructors (plain data manipulation, no theorems)


def mk_comb(f: Term, *args: Term) -> Term:
    for a in args:
        f = Comb(f, a)
    return f


def mk_not(p: Term) -> Term:
    return Comb(NOT_C, p)


def mk_and(p: Term, q: Term) -> Term:
    return mk_comb(AND_C, p, q)


def mk_or(p: Term, q: Term) -> Term:
    return mk_comb(OR_C, p, q)


def mk_implies(p: Term, q: Term) -> Term:
    return mk_comb(IMPLIES_C, p, q)


def mk_eq(lhs: Term, rhs: Term, ty: LogicalType) -> Term:
    return mk_comb(eq_c(ty), lhs, rhs)


def mk_all(hint: str, ty: LogicalType, body: Term) -> Term:
    return Comb(all_c(ty), Abs(hint, ty, body))


def mk_ex(hint: str, ty: LogicalType, body: Term) -> Term:
    return Comb(ex_c(ty), Abs(hint, ty, body))


def strip_comb(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, Comb):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _dest_binary(t: Term, name: str) -> tuple[Term, Term] | None:
    if (
        isinstance(t, Comb)
        and isinstance(t.fun, Comb)
        and isinstance(t.fun.fun, Const)
        and t.fun.fun.name == name
        and is_builtin(t.fun.fun)
    ):
        return t.fun.arg, t.arg
    return None


def dest_and(t):
    return _dest_binary(t, "and")


def dest_or(t):
    return _dest_binary(t, "or")


def dest_implies(t):
    return _dest_binary(t, "implies")


def dest_eq(t: Term) -> tuple[Term, Term, LogicalType] | None:
    pair = _dest_binary(t, "eq")
    if pair is None:
        return None
    return pair[0], pair[1], t.fun.fun.ty.dom


def dest_not(t: Term) -> Term | None:
    if isinstance(t, Comb) and t.fun == NOT_C:
        return t.arg
    return None


def _dest_quant(t: Term, name: str) -> tuple[LogicalType, Abs] | None:
    if (
        isinstance(t, Comb)
        and isinstance(t.fun, Const)
        and t.fun.name == name
        and is_builtin(t.fun)
        and isinstance(t.arg, Abs)
    ):
        return t.fun.ty.dom.dom, t.arg
    return None


def dest_all(t):
    return _dest_quant(t, "all")


def dest_ex(t):
    return _dest_quant(t, "ex")


# ---------------------------------------------------------------------------
# de Bruijn machinery


def _shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    match t:
        case Bound(i):
            return Bound(i + d) if i >= cutoff else t
        case Comb(f, x):
            return Comb(_shift(f, d, cutoff), _shift(x, d, cutoff))
        case Abs(h, vt, b):
            return Abs(h, vt, _shift(b, d, cutoff + 1))
        case _:
            return t


def _subst(t: Term, arg: Term, depth: int = 0) -> Term:
    """Substitute arg for Bound(depth) in t, plain capture-avoiding version."""
    match t:
        case Bound(i):
            if i == depth:
                return _shift(arg, depth)
            return Bound(i - 1) if i > depth else t
        case Comb(f, x):
            return Comb(_subst(f, arg, depth), _subst(x, arg, depth))
        case Abs(h, vt, b):
            return Abs(h, vt, _subst(b, arg, depth + 1))
        case _:
            return t


def _subst_contract(t: Term, arg: Term, depth: int = 0) -> Term:
    """Like _subst but contracts beta redexes created at substitution sites.

    Pre-existing redexes in t are left alone; only applications whose head
    became an abstraction through this substitution are reduced.
    """
    match t:
        case Bound(i):
            if i == depth:
                return _shift(arg, depth)
            return Bound(i - 1) if i > depth else t
        case Comb(f, x):
            fr = _subst_contract(f, arg, depth)
            xr = _subst_contract(x, arg, depth)
            if isinstance(fr, Abs) and not isinstance(f, Abs):
                return _subst_contract(fr.body, xr)
            return Comb(fr, xr)
        case Abs(h, vt, b):
            return Abs(h, vt, _subst_contract(b, arg, depth + 1))
        case _:
            return t


def _beta(t: Term) -> Term:
    match t:
        case Comb(f, x):
            fr = _beta(f)
            xr = _beta(x)
            if isinstance(fr, Abs):
                return _beta(_subst(fr.body, xr))
            return Comb(fr, xr)
        case Abs(h, vt, b):
            return Abs(h, vt, _beta(b))
        case _:
            return t


def _abstract_over(t: Term, c: Const, depth: int = 0) -> Term:
    """Replace occurrences of constant c with Bound(depth)."""
    match t:
        case Const():
            return Bound(depth) if t == c else t
        case Comb(f, x):
            return Comb(_abstract_over(f, c, depth), _abstract_over(x, c, depth))
        case Abs(h, vt, b):
            return Abs(h, vt, _abstract_over(b, c, depth + 1))
        case _:
            return t


def occurs_const(t: Term, c: Const) -> bool:
    match t:
        case Const():
            return t == c
        case Comb(f, x):
            return occurs_const(f, c) or occurs_const(x, c)
        case Abs(_, _, b):
            return occurs_const(b, c)
        case _:
            return False


def term_consts(t: Term, out: set | None = None) -> set[Const]:
    if out is None:
        out = set()
    match t:
        case Const():
            out.add(t)
        case Comb(f, x):
            term_consts(f, out)
            term_consts(x, out)
        case Abs(_, _, b):
            term_consts(b, out)
    return out


# ---------------------------------------------------------------------------
# Type inference / checking


def _infer(t: Term, stack: list[LogicalType]) -> LogicalType:
    match t:
        case Const(_, ty):
            return ty
        case Bound(i):
            if i >= len(stack):
                raise KernelError(f"dangling bound variable #{i}")
            return stack[len(stack) - 1 - i]
        case Comb(f, x):
            fty = _infer(f, stack)
            xty = _infer(x, stack)
            if not isinstance(fty, FunType) or fty.dom != xty:
                raise KernelError("ill-typed application")
            return fty.cod
        case Abs(_, vt, b):
            stack.append(vt)
            bty = _infer(b, stack)
            stack.pop()
            return FunType(vt, bty)
    raise KernelError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Contexts

_fresh_hint_trim = str.maketrans({})


def _base_hint(hint: str) -> str:
    base = hint.split("$", 1)[0]
    return base if base else "x"


class Context:
    """A node in a context chain.

    Each node records the items added at that point: at most a small number
    of constants (by name), propositional assumptions, names of constants
    introduced by choose, and named axioms.  The fresh-name counter and the
    axiom-schema memo table live on the root and are shared by the whole
    chain; they are the only mutable state.
    """

    __slots__ = (
        "parent",
        "constants",
        "assumptions",
        "chosen",
        "axioms",
        "depth",
        "_root",
        "_fresh",
        "_schemas",
        "_schema_log",
        "_tc_cache",
        "__weakref__",
    )

    def __init__(self, parent: "Context | None" = None):
        self.parent = parent
        self.constants: dict[str, LogicalType] = {}
        self.assumptions: list[Term] = []
        self.chosen: set[str] = set()
        self.axioms: dict[str, Term] = {}
        self._tc_cache: set[Term] = set()
        if parent is None:
            self.depth = 0
            self._root = self
            self._fresh = itertools.count(1)
            self._schemas: dict = {}
            self._schema_log: list = []
        else:
            self.depth = parent.depth + 1
            self._root = parent._root
            self._fresh = parent._fresh
            self._schemas = parent._root._schemas
            self._schema_log = parent._root._schema_log

    def lookup_const(self, name: str) -> LogicalType | None:
        ctx: Context | None = self
        while ctx is not None:
            ty = ctx.constants.get(name)
            if ty is not None:
                return ty
            ctx = ctx.parent
        return None

    def fresh_name(self, hint: str) -> str:
        return f"{_base_hint(hint)}${next(self._fresh)}"

    def __repr__(self):
        return f"<Context depth={self.depth}>"


def root_context() -> Context:
    return Context(None)


def is_ancestor(a: Context, b: Context) -> bool:
    """Is a an ancestor of b (or b itself)?"""
    while b is not None:
        if b is a:
            return True
        b = b.parent
    return False


def _join(a: Context, b: Context) -> Context:
    """The deeper of two contexts on one chain.  A theorem stays valid in any
    descendant of its birth context, so rules join their arguments here."""
    if a is b:
        return a
    if a.depth <= b.depth and is_ancestor(a, b):
        return b
    if is_ancestor(b, a):
        return a
    raise KernelError("theorems from unrelated contexts")


def _check_consts(ctx: Context, t: Term) -> None:
    if t in ctx._tc_cache:
        return
    for c in term_consts(t):
        if is_builtin(c):
            continue
        if isinstance(c, Const) and c.name in BUILTIN_NAMES:
            raise KernelError(f"malformed builtin constant {c.name}")
        declared = ctx.lookup_const(c.name)
        if declared is None:
            raise KernelError(f"unknown constant {c.name}")
        if declared != c.ty:
            raise KernelError(f"constant {c.name} used at wrong type")
    ctx._tc_cache.add(t)


def type_of(ctx: Context, t: Term) -> LogicalType:
    """Infer the type of t and check every constant is declared in ctx."""
    _check_consts(ctx, t)
    return _infer(t, [])


# ---------------------------------------------------------------------------
# Theorems

_MINT = object()


class Theorem:
    """A sequent ctx |- prop.  Only kernel rules can construct these."""

    __slots__ = ("ctx", "prop")

    def __init__(self, ctx: Context, prop: Term, token=None):
        if token is not _MINT:
            raise KernelError("Theorem values can only be minted by kernel rules")
        self.ctx = ctx
        self.prop = prop

    def __repr__(self):
        return f"|- {self.prop!r}"


def _mint(ctx: Context, prop: Term) -> Theorem:
    return Theorem(ctx, prop, _MINT)


# ---------------------------------------------------------------------------
# Primitive rules


def reflexive(ctx: Context, t: Term) -> Theorem:
    """|- t = t"""
    ty = type_of(ctx, t)
    return _mint(ctx, mk_eq(t, t, ty))


def combine(ab: Theorem, cd: Theorem) -> Theorem:
    """From |- f = g and |- x = y conclude |- f x = g y."""
    ctx = _join(ab.ctx, cd.ctx)
    fg = dest_eq(ab.prop)
    xy = dest_eq(cd.prop)
    if fg is None or xy is None:
        raise KernelError("combine needs two equations")
    f, g, fty = fg
    x, y, xty = xy
    if not isinstance(fty, FunType) or fty.dom != xty:
        raise KernelError("combine: types do not fit")
    return _mint(ctx, mk_eq(Comb(f, x), Comb(g, y), fty.cod))


def abstract(th: Theorem) -> Theorem:
    """From |- forall x:a. phi = psi conclude |- (fun x => phi) = (fun x => psi)."""
    q = dest_all(th.prop)
    if q is None:
        raise KernelError("abstract needs a universally quantified equation")
    ty, ab = q
    eq = dest_eq(ab.body)
    if eq is None:
        raise KernelError("abstract needs an equation under the quantifier")
    lhs, rhs, body_ty = eq
    out = mk_eq(Abs(ab.hint, ty, lhs), Abs(ab.hint, ty, rhs), fn(ty, body_ty))
    return _mint(th.ctx, out)


def _eta_long(t: Term, stack: list[LogicalType]) -> Term:
    ty = _infer(t, stack)
    if isinstance(ty, FunType):
        if isinstance(t, Abs):
            stack.append(t.var_ty)
            body = _eta_long(t.body, stack)
            stack.pop()
            return Abs(t.hint, t.var_ty, body)
        expanded = Comb(_shift(t, 1), Bound(0))
        stack.append(ty.dom)
        body = _eta_long(expanded, stack)
        stack.pop()
        return Abs("x", ty.dom, body)
    head, args = strip_comb(t)
    if isinstance(head, Abs):
        raise KernelError("eta expansion hit a beta redex")
    out = head
    for a in args:
        out = Comb(out, _eta_long(a, stack))
    return out


def normal_form(ctx: Context, t: Term) -> Term:
    """The beta-eta-long normal form of t (a trusted computation)."""
    type_of(ctx, t)
    return _eta_long(_beta(t), [])


def normalize(ctx: Context, t: Term) -> Theorem:
    """|- t = t' where t' is the beta-eta-long normal form of t."""
    nf = _eta_long(_beta(t), [])
    ty = type_of(ctx, t)
    return _mint(ctx, mk_eq(t, nf, ty))


def eq_mp(eq: Theorem, th: Theorem) -> Theorem:
    """From |- phi = psi (at P) and |- phi conclude |- psi."""
    d = dest_eq(eq.prop)
    if d is None or d[2] != PROP:
        raise KernelError("eq_mp needs a propositional equation")
    lhs, rhs, _ = d
    if not alpha_eq(lhs, th.prop):
        raise KernelError("eq_mp: theorem does not match the equation lhs")
    return _mint(_join(eq.ctx, th.ctx), rhs)


def mp(imp: Theorem, th: Theorem) -> Theorem:
    """Modus ponens."""
    d = dest_implies(imp.prop)
    if d is None:
        raise KernelError("mp needs an implication")
    if not alpha_eq(d[0], th.prop):
        raise KernelError("mp: antecedent mismatch")
    return _mint(_join(imp.ctx, th.ctx), d[1])


def assume(ctx: Context, phi: Term) -> Theorem:
    """|- phi in a child context that assumes phi."""
    if type_of(ctx, phi) != PROP:
        raise KernelError("only propositions can be assumed")
    child = Context(ctx)
    child.assumptions.append(phi)
    return _mint(child, phi)


def intro_const(ctx: Context, hint: str, ty: LogicalType) -> tuple[Context, Const]:
    """Declare a fresh constant named hint$N in a child context."""
    child = Context(ctx)
    name = ctx.fresh_name(hint)
    child.constants[name] = ty
    return child, Const(name, ty)


def declare_const(ctx: Context, name: str, ty: LogicalType) -> tuple[Context, Const]:
    """Declare a constant with exactly this name (theory loading plumbing)."""
    if name in BUILTIN_NAMES:
        raise KernelError(f"cannot shadow builtin {name}")
    if "$" in name:
        raise KernelError("user constant names cannot contain $")
    if ctx.lookup_const(name) is not None:
        raise KernelError(f"constant {name} already declared")
    child = Context(ctx)
    child.constants[name] = ty
    return child, Const(name, ty)


def specialize(th: Theorem, t: Term, ctx: Context | None = None) -> Theorem:
    """From |- forall x:a. phi conclude |- phi[t/x], beta-contracted at the
    instantiation sites.  ctx may be any descendant of th.ctx in which t is
    well-typed; the result lives there."""
    if ctx is None:
        ctx = th.ctx
    elif not is_ancestor(th.ctx, ctx):
        raise KernelError("specialize: context is not a descendant")
    q = dest_all(th.prop)
    if q is None:
        raise KernelError("specialize needs a universal")
    ty, ab = q
    if type_of(ctx, t) != ty:
        raise KernelError("specialize: argument has the wrong type")
    return _mint(ctx, _subst_contract(ab.body, t))


def choose(ctx: Context, th: Theorem, hint: str = "sk") -> tuple[Context, Const, Theorem]:
    """Pick a witness constant for |- ex x:a. phi; yields |- phi[c/x] in a
    child context where c is marked as chosen (so lift re-quantifies it
    existentially)."""
    if not is_ancestor(th.ctx, ctx):
        raise KernelError("choose: theorem does not hold in this context")
    q = dest_ex(th.prop)
    if q is None:
        raise KernelError("choose needs an existential")
    ty, ab = q
    child = Context(ctx)
    name = ctx.fresh_name(hint)
    child.constants[name] = ty
    child.chosen.add(name)
    c = Const(name, ty)
    return child, c, _mint(child, _subst(ab.body, c))


def lift(th: Theorem, to_ctx: Context | None = None) -> Theorem:
    """Discharge everything between th.ctx and to_ctx (default: one level).

    Assumptions become antecedents, outermost assumption outermost.
    Constants that still occur are quantified in reverse introduction order,
    universally, or existentially when they were introduced by choose.
    """
    if to_ctx is None:
        to_ctx = th.ctx.parent
        if to_ctx is None:
            raise KernelError("lift: already at the root")
    if th.ctx is to_ctx:
        raise KernelError("lift: nothing to discharge")
    if not is_ancestor(to_ctx, th.ctx):
        raise KernelError("lift: target is not an ancestor")

    levels = []
    ctx = th.ctx
    while ctx is not to_ctx:
        levels.append(ctx)
        ctx = ctx.parent
    levels.reverse()  # outermost first

    assumptions: list[Term] = []
    consts: list[tuple[Const, bool]] = []
    for lvl in levels:
        if lvl.axioms:
            raise KernelError("lift: cannot discharge past loaded axioms")
        assumptions.extend(lvl.assumptions)
        for name, ty in lvl.constants.items():
            consts.append((Const(name, ty), name in lvl.chosen))

    prop = th.prop
    for a in reversed(assumptions):
        prop = mk_implies(a, prop)
    for c, chosen_flag in reversed(consts):
        if not occurs_const(prop, c):
            continue
        body = Abs(_base_hint(c.name), c.ty, _abstract_over(prop, c))
        q = ex_c(c.ty) if chosen_flag else all_c(c.ty)
        prop = Comb(q, body)
    return _mint(to_ctx, prop)


def load_axiom(ctx: Context, name: str, term: Term) -> tuple[Context, Theorem]:
    """Adopt term as a named axiom in a child context (theory loading)."""
    if type_of(ctx, term) != PROP:
        raise KernelError("axioms must be propositions")
    probe: Context | None = ctx
    while probe is not None:
        if name in probe.axioms:
            raise KernelError(f"axiom {name} already loaded")
        probe = probe.parent
    child = Context(ctx)
    child.axioms[name] = term
    return child, _mint(child, term)


def dest_comb(t: Term) -> tuple[Term, Term] | None:
    """Split an application; returns None rather than raising."""
    if isinstance(t, Comb):
        return t.fun, t.arg
    return None


def dest_abs(ctx: Context, t: Term) -> tuple[Context, Const, Term] | None:
    """Open an abstraction: child context with a fresh constant, plus the
    body with that constant substituted for the bound variable."""
    if not isinstance(t, Abs):
        return None
    child, c = intro_const(ctx, t.hint or "x", t.var_ty)
    return child, c, _subst(t.body, c)


# ---------------------------------------------------------------------------
# Axiom schemas
#
# Schema statements are built programmatically below.  Instances are memoized
# per (name, type_args) on the root context: two requests for the same key
# return the identical Theorem object, and the log of freshly built keys is
# observable for tests.

_B0 = Bound(0)
_B1 = Bound(1)
_B2 = Bound(2)


def _all_p(hint: str, body: Term) -> Term:
    return mk_all(hint, PROP, body)


def _peq(l: Term, r: Term) -> Term:
    return mk_eq(l, r, PROP)


def _schema_bool_cases():
    return _all_p("p", mk_or(_peq(_B0, TRUE), _peq(_B0, FALSE)))


def _schema_lem():
    return _all_p("p", mk_or(_B0, mk_not(_B0)))


def _schema_or_elim():
    # forall a b c. (a \/ b) -> (a -> c) -> (b -> c) -> c
    body = mk_implies(
        mk_or(_B2, _B1),
        mk_implies(
            mk_implies(_B2, _B0),
            mk_implies(mk_implies(_B1, _B0), _B0),
        ),
    )
    return _all_p("a", _all_p("b", _all_p("c", body)))


def _schema_not_not():
    return _all_p("p", _peq(mk_not(mk_not(_B0)), _B0))


def _valuation_schemas() -> dict:
    p = _B0
    t, f = TRUE, FALSE
    table = {
        "not_true": _peq(mk_not(t), f),
        "not_false": _peq(mk_not(f), t),
        "or_true": _peq(mk_or(p, t), t),
        "true_or": _peq(mk_or(t, p), t),
        "or_false": _peq(mk_or(p, f), p),
        "false_or": _peq(mk_or(f, p), p),
        "and_true": _peq(mk_and(p, t), p),
        "true_and": _peq(mk_and(t, p), p),
        "and_false": _peq(mk_and(p, f), f),
        "false_and": _peq(mk_and(f, p), f),
        "implies_true": _peq(mk_implies(p, t), t),
        "true_implies": _peq(mk_implies(t, p), p),
        "implies_false": _peq(mk_implies(p, f), mk_not(p)),
        "false_implies": _peq(mk_implies(f, p), t),
        "iff_true": _peq(_peq(p, t), p),
        "true_iff": _peq(_peq(t, p), p),
        "iff_false": _peq(_peq(p, f), mk_not(p)),
        "false_iff": _peq(_peq(f, p), mk_not(p)),
    }
    out = {}
    for name, matrix in table.items():
        if name in ("not_true", "not_false"):
            out[name] = (lambda m=matrix: m)  # closed, no quantifier needed
        else:
            out[name] = (lambda m=matrix: _all_p("p", m))
    return out


def _schema_de_morgan_and():
    return _all_p(
        "p",
        _all_p(
            "q", _peq(mk_not(mk_and(_B1, _B0)), mk_or(mk_not(_B1), mk_not(_B0)))
        ),
    )


def _schema_de_morgan_or():
    return _all_p(
        "p",
        _all_p(
            "q", _peq(mk_not(mk_or(_B1, _B0)), mk_and(mk_not(_B1), mk_not(_B0)))
        ),
    )


def _schema_or_assoc():
    body = _peq(mk_or(mk_or(_B2, _B1), _B0), mk_or(_B2, mk_or(_B1, _B0)))
    return _all_p("p", _all_p("q", _all_p("r", body)))


def _schema_and_assoc():
    body = _peq(mk_and(mk_and(_B2, _B1), _B0), mk_and(_B2, mk_and(_B1, _B0)))
    return _all_p("p", _all_p("q", _all_p("r", body)))


def _schema_or_comm():
    return _all_p("p", _all_p("q", _peq(mk_or(_B1, _B0), mk_or(_B0, _B1))))


def _schema_and_comm():
    return _all_p("p", _all_p("q", _peq(mk_and(_B1, _B0), mk_and(_B0, _B1))))


def _schema_or_idem():
    return _all_p("p", _peq(mk_or(_B0, _B0), _B0))


def _schema_and_idem():
    return _all_p("p", _peq(mk_and(_B0, _B0), _B0))


def _schema_or_over_and_left():
    body = _peq(
        mk_or(_B2, mk_and(_B1, _B0)),
        mk_and(mk_or(_B2, _B1), mk_or(_B2, _B0)),
    )
    return _all_p("p", _all_p("q", _all_p("r", body)))


def _schema_or_over_and_right():
    body = _peq(
        mk_or(mk_and(_B2, _B1), _B0),
        mk_and(mk_or(_B2, _B0), mk_or(_B1, _B0)),
    )
    return _all_p("p", _all_p("q", _all_p("r", body)))


def _schema_eq_sym(a):
    body = _peq(mk_eq(_B1, _B0, a), mk_eq(_B0, _B1, a))
    return mk_all("x", a, mk_all("y", a, body))


def _schema_eq_trans(a):
    body = mk_implies(
        mk_eq(_B2, _B1, a), mk_implies(mk_eq(_B1, _B0, a), mk_eq(_B2, _B0, a))
    )
    return mk_all("x", a, mk_all("y", a, mk_all("z", a, body)))


def _schema_not_all(a):
    # forall P:a->P. (~(all P)) = ex (fun x => ~(P x))
    lhs = mk_not(Comb(all_c(a), _B0))
    rhs = Comb(ex_c(a), Abs("x", a, mk_not(Comb(_B1, _B0))))
    return mk_all("P", fn(a, PROP), _peq(lhs, rhs))


def _schema_not_ex(a):
    lhs = mk_not(Comb(ex_c(a), _B0))
    rhs = Comb(all_c(a), Abs("x", a, mk_not(Comb(_B1, _B0))))
    return mk_all("P", fn(a, PROP), _peq(lhs, rhs))


def _schema_forall_triv(a):
    return _all_p("p", _peq(mk_all("x", a, _B1), _B0))


def _schema_exists_triv(a):
    return _all_p("p", _peq(mk_ex("x", a, _B1), _B0))


def _prenex_schema(a, quant: str, conn, quant_left: bool):
    """(Q x. P x) o q  =  Q x. (P x o q)   and the mirrored form."""
    qc = all_c(a) if quant == "all" else ex_c(a)
    quantified = Comb(qc, _B1)  # P, under binders P then q
    if quant_left:
        lhs = conn(quantified, _B0)
        inner = conn(Comb(_B2, _B0), _B1)
    else:
        lhs = conn(_B0, quantified)
        inner = conn(_B1, Comb(_B2, _B0))
    rhs = Comb(qc, Abs("x", a, inner))
    return mk_all("P", fn(a, PROP), _all_p("q", _peq(lhs, rhs)))


def _schema_skolem(a, b):
    # forall p:a->b->P. (forall x. ex y. p x y) = (ex f. forall x. p x (f x))
    pty = fn(a, b, PROP)
    lhs = mk_all("x", a, mk_ex("y", b, mk_comb(_B2, _B1, _B0)))
    rhs = mk_ex(
        "f", fn(a, b), mk_all("x", a, mk_comb(_B2, _B0, Comb(_B1, _B0)))
    )
    return mk_all("p", pty, _peq(lhs, rhs))


def _build_schema_table():
    table: dict[str, tuple[int, object]] = {
        "bool_cases": (0, _schema_bool_cases),
        "lem": (0, _schema_lem),
        "or_elim": (0, _schema_or_elim),
        "not_not": (0, _schema_not_not),
        "de_morgan_and": (0, _schema_de_morgan_and),
        "de_morgan_or": (0, _schema_de_morgan_or),
        "or_assoc": (0, _schema_or_assoc),
        "and_assoc": (0, _schema_and_assoc),
        "or_comm": (0, _schema_or_comm),
        "and_comm": (0, _schema_and_comm),
        "or_idem": (0, _schema_or_idem),
        "and_idem": (0, _schema_and_idem),
        "or_over_and_left": (0, _schema_or_over_and_left),
        "or_over_and_right": (0, _schema_or_over_and_right),
        "eq_sym": (1, _schema_eq_sym),
        "eq_trans": (1, _schema_eq_trans),
        "not_all": (1, _schema_not_all),
        "not_ex": (1, _schema_not_ex),
        "forall_triv": (1, _schema_forall_triv),
        "exists_triv": (1, _schema_exists_triv),
        "skolem": (2, _schema_skolem),
    }
    for name, builder in _valuation_schemas().items():
        table[name] = (0, builder)
    for quant in ("all", "ex"):
        for cname, conn in (("and", mk_and), ("or", mk_or)):
            for side, left in (("left", True), ("right", False)):
                key = f"{quant}_{cname}_{side}"
                table[key] = (
                    1,
                    (lambda a, q=quant, c=conn, l=left: _prenex_schema(a, q, c, l)),
                )
    return table


SCHEMAS = _build_schema_table()

# Propositional schemas get sanity-checked against a truth table when first
# instantiated.  This is a belt-and-braces assertion inside the trusted base;
# the independent oracle lives in the test suite.


def _tt_eval(t: Term, env: list[bool]) -> bool:
    match t:
        case Const("true", _):
            return True
        case Const("false", _):
            return False
        case Bound(i):
            return env[len(env) - 1 - i]
    d = dest_not(t)
    if d is not None:
        return not _tt_eval(d, env)
    for dest, op in (
        (dest_and, lambda x, y: x and y),
        (dest_or, lambda x, y: x or y),
        (dest_implies, lambda x, y: (not x) or y),
    ):
        d = dest(t)
        if d is not None:
            return op(_tt_eval(d[0], env), _tt_eval(d[1], env))
    d = dest_eq(t)
    if d is not None and d[2] == PROP:
        return _tt_eval(d[0], env) == _tt_eval(d[1], env)
    raise KernelError("schema matrix is not propositional")


def _tt_valid(t: Term) -> bool:
    binders = 0
    while True:
        q = dest_all(t)
        if q is None or q[0] != PROP:
            break
        binders += 1
        t = q[1].body
    for bits in range(1 << binders):
        env = [bool(bits >> i & 1) for i in range(binders)]
        if not _tt_eval(t, env):
            return False
    return True


def schema_axiom(ctx: Context, name: str, type_args: tuple = ()) -> Theorem:
    """Instantiate an axiom schema at the given types.

    Results are memoized per chain root: equal keys return the identical
    theorem, minted in the root context so it is usable anywhere in the
    chain.  The root also logs which keys were actually built.
    """
    try:
        arity, builder = SCHEMAS[name]
    except KeyError:
        raise KernelError(f"unknown schema {name}") from None
    type_args = tuple(type_args)
    if len(type_args) != arity:
        raise KernelError(f"schema {name} takes {arity} type argument(s)")
    root = ctx._root
    key = (name, type_args)
    cached = root._schemas.get(key)
    if cached is not None:
        return cached
    statement = builder(*type_args)
    if arity == 0 and not _tt_valid(statement):
        raise KernelError(f"schema {name} failed its truth-table check")
    if _infer(statement, []) != PROP:
        raise KernelError(f"schema {name} is ill-typed")
    th = _mint(root, statement)
    root._schemas[key] = th
    root._schema_log.append(key)
    return th


def schema_log(ctx: Context) -> list[tuple]:
    """Keys of schema instances built so far in this chain (copies)."""
    return list(ctx._root._schema_log)
