"""Verified clausification pipeline.

Each pass is a conversion, so the pipeline's output comes with a kernel
equation chaining back to the input formula: beta-normalization plus a
first-order check, connective elimination, negation normal form, prenexing,
matrix CNF, then skolemization by rewriting with the type-indexed skolem
schema and discharging the resulting existentials with choose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from metis_lcf.conv import (
    Conversion,
    all_conv,
    conv_rule,
    first_conv,
    normalize_conv,
    once_conv,
    repeat_conv,
    rewr_conv1,
    td_conv,
    trans,
    under_prefix,
    up_conv,
)
from metis_lcf.kernel import (
    PROP,
    UNIVERSE,
    Abs,
    Bound,
    Comb,
    Const,
    Context,
    FunType,
    KernelError,
    Term,
    Theorem,
    assume,
    choose,
    dest_all,
    dest_and,
    dest_eq,
    dest_ex,
    dest_not,
    dest_or,
    eq_mp,
    intro_const,
    is_builtin,
    lift,
    mp,
    schema_axiom,
    specialize,
)
from metis_lcf.prop import disj_norm_conv, lemma

__all__ = [
    "ClauseTheorem",
    "CnfOutput",
    "NotFirstOrder",
    "cnf_matrix_conv",
    "elim_conn_conv",
    "first_order_conv",
    "nnf_conv",
    "prenex_conv",
    "skolemize",
    "to_clauses",
]


class NotFirstOrder(Exception):
    """The formula has residual higher-order structure."""

    def __init__(self, term: Term):
        self.term = term
        super().__init__("formula is not first-order")


@dataclass
class ClauseTheorem:
    """|- forall x1..xn. L1 v ... v Lm, right-nested and deduplicated."""

    thm: Theorem


@dataclass
class CnfOutput:
    final_ctx: Context
    clauses: list[ClauseTheorem]
    trace: list[tuple[str, Theorem]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# First-order check

def _strip_app(t: Term):
    args = []
    while isinstance(t, Comb):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _fo_term(t: Term) -> bool:
    # a term of type U: constants and fully applied U-functions only
    head, args = _strip_app(t)
    if isinstance(head, Bound):
        return not args  # quantified variables are U-typed and unapplied
    if not isinstance(head, Const) or is_builtin(head):
        return False
    ty = head.ty
    for _ in args:
        if not isinstance(ty, FunType) or ty.dom != UNIVERSE:
            return False
        ty = ty.cod
    return ty == UNIVERSE and all(_fo_term(a) for a in args)


def _fo_formula(t: Term) -> bool:
    head, args = _strip_app(t)
    if isinstance(head, Const) and is_builtin(head):
        name = head.name
        if name in ("true", "false") and not args:
            return True
        if name in ("and", "or", "implies") and len(args) == 2:
            return _fo_formula(args[0]) and _fo_formula(args[1])
        if name == "not" and len(args) == 1:
            return _fo_formula(args[0])
        if name == "eq" and len(args) == 2:
            if head.ty.dom == PROP:
                return _fo_formula(args[0]) and _fo_formula(args[1])
            return (
                head.ty.dom == UNIVERSE
                and _fo_term(args[0])
                and _fo_term(args[1])
            )
        if name in ("all", "ex") and len(args) == 1:
            body = args[0]
            return (
                isinstance(body, Abs)
                and body.var_ty == UNIVERSE
                and _fo_formula(body.body)
            )
        return False
    # an atom: an uninterpreted predicate over U-terms
    if not isinstance(head, Const):
        return False
    ty = head.ty
    for _ in args:
        if not isinstance(ty, FunType) or ty.dom != UNIVERSE:
            return False
        ty = ty.cod
    return ty == PROP and all(_fo_term(a) for a in args)


def first_order_conv() -> Conversion:
    """Beta-eta-normalize and accept only first-order results."""

    def conv(ctx, t):
        r = normalize_conv(ctx, t)
        if _fo_formula(dest_eq(r.prop)[1]):
            return r
        return None

    return conv


# ---------------------------------------------------------------------------
# Connective elimination and negation normal form

def elim_conn_conv() -> Conversion:
    """Rewrite implications and propositional equivalences into and/or/not."""

    def conv(ctx, t):
        step = first_conv(
            [
                rewr_conv1(lemma(ctx, "implies_as_or")),
                rewr_conv1(lemma(ctx, "prop_eq_as_and")),
            ]
        )
        return up_conv(step)(ctx, t)

    return conv


def nnf_conv() -> Conversion:
    """Push negations to the leaves and drop double negations."""

    def conv(ctx, t):
        static = first_conv(
            [
                rewr_conv1(schema_axiom(ctx, "not_not")),
                rewr_conv1(schema_axiom(ctx, "de_morgan_and")),
                rewr_conv1(schema_axiom(ctx, "de_morgan_or")),
            ]
        )

        def step(sctx, s):
            body = dest_not(s)
            if body is None:
                return None
            r = static(sctx, s)
            if r is not None:
                return r
            for dest, name in ((dest_all, "not_all"), (dest_ex, "not_ex")):
                q = dest(body)
                if q is not None:
                    return rewr_conv1(schema_axiom(sctx, name, (q[0],)))(
                        sctx, s
                    )
            return None

        return td_conv(step)(ctx, t)

    return conv


# ---------------------------------------------------------------------------
# Prenexing

_PRENEX_SHAPES = (
    ("and", dest_and),
    ("or", dest_or),
)


def _prenex_step(ctx, t):
    for conn_name, dest in _PRENEX_SHAPES:
        d = dest(t)
        if d is None:
            continue
        for side, sub in (("left", d[0]), ("right", d[1])):
            for quant_name, destq in (("all", dest_all), ("ex", dest_ex)):
                q = destq(sub)
                if q is None:
                    continue
                name = f"{quant_name}_{conn_name}_{side}"
                r = rewr_conv1(schema_axiom(ctx, name, (q[0],)))(ctx, t)
                if r is not None:
                    return r
    return None


def prenex_conv(fuel: int = 100000) -> Conversion:
    """Hoist quantifiers to the front, extracting left-to-right."""
    return repeat_conv(once_conv(_prenex_step), fuel)


# ---------------------------------------------------------------------------
# Matrix CNF

def _dist_step(ctx, t):
    d = dest_or(t)
    if d is None:
        return None
    if dest_and(d[0]) is not None:
        return rewr_conv1(schema_axiom(ctx, "or_over_and_right"))(ctx, t)
    if dest_and(d[1]) is not None:
        return rewr_conv1(schema_axiom(ctx, "or_over_and_left"))(ctx, t)
    return None


def cnf_matrix_conv(fuel: int = 100000) -> Conversion:
    """Distribute or over and beneath the quantifier prefix."""
    return under_prefix(repeat_conv(once_conv(_dist_step), fuel))


# ---------------------------------------------------------------------------
# Quantifier prefix plumbing

def _prefix(t: Term) -> list[tuple[str, object, str]]:
    out = []
    while True:
        for kind, dest in (("all", dest_all), ("ex", dest_ex)):
            d = dest(t)
            if d is not None:
                ty, ab = d
                out.append((kind, ty, ab.hint or "x"))
                t = ab.body
                break
        else:
            return out


def _permute_forall(ctx: Context, th: Theorem, order: list[int]) -> Theorem:
    """Reorder the first len(order) universal binders of th; order lists the
    current binder positions in their desired new sequence."""
    if order == list(range(len(order))):
        return th
    quants = _prefix(th.prop)
    consts: list = [None] * len(order)
    work = ctx
    for old in order:
        _, ty, hint = quants[old]
        work, c = intro_const(work, hint, ty)
        consts[old] = c
    spec = th
    for c in consts:
        spec = specialize(spec, c, work)
    return lift(spec, ctx)


# ---------------------------------------------------------------------------
# Skolemization

def _skolem_hop(ctx, t):
    # forall v:a. exists w:b. body  =  exists f:a->b. forall v:a. body[w:=f v]
    da = dest_all(t)
    if da is None:
        return None
    a_ty, ab = da
    de = dest_ex(ab.body)
    if de is None:
        return None
    b_ty, eb = de
    phat = Abs(ab.hint, a_ty, Abs(eb.hint, b_ty, eb.body))
    inst = specialize(schema_axiom(ctx, "skolem", (a_ty, b_ty)), phat, ctx)
    if dest_eq(inst.prop)[0] != t:
        return None
    return inst


def skolemize(ctx: Context, th: Theorem) -> tuple[Context, Theorem]:
    """Eliminate every existential from a prenex theorem.

    Existentials are bubbled to the front with the skolem schema and
    discharged by choose.  Before bubbling, the governing universal prefix
    is reversed so each skolem function takes its arguments innermost
    quantifier first; the prefix order is restored afterwards."""
    while True:
        quants = _prefix(th.prop)
        first_ex = next(
            (i for i, (k, _, _) in enumerate(quants) if k == "ex"), None
        )
        if first_ex is None:
            return ctx, th
        if first_ex:
            th = _permute_forall(ctx, th, list(reversed(range(first_ex))))
        hops = 0
        while dest_ex(th.prop) is None:
            if hops > len(quants):
                raise KernelError("skolemize needs a prenex theorem")
            r = once_conv(_skolem_hop)(ctx, th.prop)
            if r is None:
                raise KernelError("skolemize needs a prenex theorem")
            th = eq_mp(r, th)
            hops += 1
        ctx, _, th = choose(ctx, th, "sk")
        if hops:
            th = _permute_forall(ctx, th, list(reversed(range(hops))))


# ---------------------------------------------------------------------------
# The full pipeline

_PASSES = (
    ("firstOrder", first_order_conv),
    ("elimConn", elim_conn_conv),
    ("nnf", nnf_conv),
    ("prenex", prenex_conv),
    ("cnfMatrix", cnf_matrix_conv),
)


def _first_use_order(matrix: Term, consts: list) -> list:
    wanted = set(consts)
    found: list = []

    def walk(t):
        if isinstance(t, Comb):
            walk(t.fun)
            walk(t.arg)
        elif isinstance(t, Abs):
            walk(t.body)
        elif t in wanted and t not in found:
            found.append(t)

    walk(matrix)
    return found


def _split_conj(th: Theorem, ctx: Context) -> list[Theorem]:
    d = dest_and(th.prop)
    if d is None:
        return [th]
    left = mp(_spec2(ctx, "conj_elim1", d[0], d[1]), th)
    right = mp(_spec2(ctx, "conj_elim2", d[0], d[1]), th)
    return _split_conj(left, ctx) + _split_conj(right, ctx)


def _spec2(ctx, name, a, b):
    inst = specialize(lemma(ctx, name), a, ctx)
    return specialize(inst, b, ctx)


def to_clauses(ctx: Context, phi: Term) -> CnfOutput:
    """Assume phi and clausify it.

    The result's clauses live in a descendant of ctx that assumes phi and
    declares the skolem constants; the trace holds one named equation per
    pass, chaining from phi to the pre-skolem normal form."""
    th = assume(ctx, phi)
    actx = th.ctx
    trace: list[tuple[str, Theorem]] = []
    composite = None
    t = phi
    for name, factory in _PASSES:
        r = factory()(actx, t)
        if r is None:
            raise NotFirstOrder(t)
        trace.append((name, r))
        composite = r if composite is None else trans(composite, r)
        t = dest_eq(r.prop)[1]
    th = eq_mp(composite, th)
    final_ctx, th = skolemize(actx, th)

    # open the shared prefix, split conjunctions, normalize each clause
    work_ctx = final_ctx
    consts = []
    spec = th
    while True:
        d = dest_all(spec.prop)
        if d is None:
            break
        ty, ab = d
        work_ctx, c = intro_const(work_ctx, ab.hint or "x", ty)
        spec = specialize(spec, c, work_ctx)
        consts.append(c)

    clauses = []
    for piece in _split_conj(spec, work_ctx):
        normed = conv_rule(disj_norm_conv(), piece)
        order = _first_use_order(normed.prop, consts)
        lifted = (
            lift(normed, final_ctx) if normed.ctx is not final_ctx else normed
        )
        bound = [c for c in consts if c in order]
        desired = [bound.index(c) for c in order]
        clauses.append(ClauseTheorem(_permute_forall(final_ctx, lifted, desired)))
    return CnfOutput(final_ctx, clauses, trace)
