"""Classical propositional reasoning on top of the kernel.

taut decides tautologies by kernel-checked truth-table case analysis: pick
an atom, case split with the bool_cases schema, substitute and simplify in
each branch, recurse, and recombine the branch theorems with or_elim.  The
result is an ordinary Theorem; there is no trusted evaluator anywhere.

The module also derives the small disjunction toolkit used by certificate
reconstruction (weakening, clause normalization, ground resolution), plus a
cache of helper lemmas proved once per root context by taut itself.
"""

from __future__ import annotations

from typing import Callable, Optional
from weakref import WeakKeyDictionary

from metis_lcf.conv import (
    all_conv,
    eq_true_elim,
    first_conv,
    orelse_conv,
    rewr_conv1,
    subs_conv,
    sym,
    up_conv,
)
from metis_lcf.kernel import (
    FALSE,
    PROP,
    TRUE,
    Abs,
    Bound,
    Comb,
    Const,
    Context,
    KernelError,
    Term,
    Theorem,
    assume,
    dest_abs,
    dest_all,
    dest_eq,
    dest_or,
    eq_mp,
    is_builtin,
    lift,
    mk_all,
    mk_and,
    mk_eq,
    mk_implies,
    mk_not,
    mk_or,
    mp,
    schema_axiom,
    specialize,
    type_of,
)

__all__ = [
    "NotPropositional",
    "NotTautology",
    "atoms",
    "disj_cut",
    "disj_norm_conv",
    "eval_conv",
    "lemma",
    "nub_clause_conv",
    "taut",
    "weaken_disj",
]


class NotTautology(Exception):
    """The formula is falsifiable; countermodel maps atoms to booleans."""

    def __init__(self, countermodel: dict[Term, bool]):
        self.countermodel = countermodel
        super().__init__(f"falsified by {countermodel}")


class NotPropositional(Exception):
    """An atomic position is headed by a quantifier."""

    def __init__(self, term: Term):
        self.term = term
        super().__init__("quantified subformula in a propositional matrix")


# ---------------------------------------------------------------------------
# Atoms

_CONNECTIVES = frozenset(("and", "or", "implies"))


def _strip_app(t: Term):
    args = []
    while isinstance(t, Comb):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def atoms(ctx: Context, phi: Term) -> list[Term]:
    """The distinct atomic propositional subterms of phi, in first-occurrence
    left-to-right order.  An atom is a maximal P-typed subterm whose head is
    not a propositional builtin; true and false are not atoms."""
    out: list[Term] = []
    seen: set[Term] = set()

    def walk(t: Term):
        head, args = _strip_app(t)
        if isinstance(head, Const) and is_builtin(head):
            name = head.name
            if name in ("true", "false") and not args:
                return
            if name in _CONNECTIVES and len(args) == 2:
                walk(args[0])
                walk(args[1])
                return
            if name == "not" and len(args) == 1:
                walk(args[0])
                return
            if name == "eq" and len(args) == 2 and head.ty.dom == PROP:
                walk(args[0])
                walk(args[1])
                return
            if name in ("all", "ex"):
                raise NotPropositional(t)
        if t not in seen:
            seen.add(t)
            out.append(t)

    walk(phi)
    return out


# ---------------------------------------------------------------------------
# Truth-table evaluation as a conversion

_VALUATION_SCHEMAS = (
    "not_true",
    "not_false",
    "or_true",
    "true_or",
    "or_false",
    "false_or",
    "and_true",
    "true_and",
    "and_false",
    "false_and",
    "implies_true",
    "true_implies",
    "implies_false",
    "false_implies",
    "iff_true",
    "true_iff",
    "iff_false",
    "false_iff",
)

_root_caches: "WeakKeyDictionary[Context, dict]" = WeakKeyDictionary()


def _cache(ctx: Context) -> dict:
    root = ctx
    while root.parent is not None:
        root = root.parent
    return _root_caches.setdefault(root, {})


def _val_conv(ctx: Context):
    cache = _cache(ctx)
    conv = cache.get("__valuation")
    if conv is None:
        conv = first_conv(
            [rewr_conv1(schema_axiom(ctx, n)) for n in _VALUATION_SCHEMAS]
        )
        cache["__valuation"] = conv
    return conv


def eval_conv(assignment: dict[Term, bool]):
    """Conversion that evaluates a propositional term under an atom
    assignment.

    The assignment equations cannot be proved outright, so they are assumed:
    the resulting equation lives in a descendant context carrying one
    assumption per assigned atom.  On a closed assignment the right side is
    true or false."""

    def conv(ctx: Context, t: Term) -> Optional[Theorem]:
        work = ctx
        rewrites = []
        for atom, value in assignment.items():
            th = assume(work, mk_eq(atom, TRUE if value else FALSE, PROP))
            work = th.ctx
            rewrites.append(subs_conv(th))
        rewrites.append(_val_conv(work))
        return up_conv(first_conv(rewrites))(work, t)

    return conv


# ---------------------------------------------------------------------------
# The tautology checker


def _spec(th: Theorem, ctx: Context, *terms: Term) -> Theorem:
    for t in terms:
        th = specialize(th, t, ctx)
    return th


def _taut_matrix(ctx: Context, phi: Term, trail: dict, val) -> Theorem:
    # invariant: the returned theorem's context is exactly ctx
    r = up_conv(val)(ctx, phi)
    s = dest_eq(r.prop)[1]
    if s == TRUE:
        return eq_true_elim(r)
    if s == FALSE:
        raise NotTautology(dict(trail))
    ats = atoms(ctx, s)
    if not ats:
        raise KernelError("valuation rewriting got stuck")
    atom = ats[0]
    cases = specialize(schema_axiom(ctx, "bool_cases"), atom, ctx)
    branches = []
    for value in (TRUE, FALSE):
        assumption = assume(ctx, mk_eq(atom, value, PROP))
        branch_ctx = assumption.ctx
        step = up_conv(orelse_conv(subs_conv(assumption), val))(branch_ctx, s)
        trail[atom] = value == TRUE
        try:
            sub = _taut_matrix(branch_ctx, dest_eq(step.prop)[1], trail, val)
        finally:
            del trail[atom]
        closed = eq_mp(sym(step), sub)
        branches.append(lift(closed, ctx))
    inst = _spec(
        schema_axiom(ctx, "or_elim"),
        ctx,
        mk_eq(atom, TRUE, PROP),
        mk_eq(atom, FALSE, PROP),
        s,
    )
    combined = mp(mp(mp(inst, cases), branches[0]), branches[1])
    return eq_mp(sym(r), combined)


def _taut_quant(ctx: Context, phi: Term, val) -> Theorem:
    d = dest_all(phi)
    if d is not None and d[0] == PROP:
        opened = dest_abs(ctx, d[1])
        child, _, body = opened
        inner = _taut_quant(child, body, val)
        lifted = lift(inner, ctx)
        if lifted.prop == phi:
            return lifted
        # the bound variable was unused, so lift dropped the quantifier
        triv = specialize(
            schema_axiom(ctx, "forall_triv", (PROP,)), lifted.prop, ctx
        )
        return eq_mp(sym(triv), lifted)
    return _taut_matrix(ctx, phi, {}, val)


def taut(ctx: Context, phi: Term) -> Theorem:
    """Prove a classical propositional tautology.

    Outer universal quantifiers over P are stripped and restored.  Raises
    NotTautology with a falsifying assignment, or NotPropositional when the
    matrix contains a quantified atom."""
    if type_of(ctx, phi) != PROP:
        raise KernelError("taut needs a proposition")
    return _taut_quant(ctx, phi, _val_conv(ctx))


# ---------------------------------------------------------------------------
# Derived lemmas, proved by taut once per root and cached

_B0, _B1, _B2 = Bound(0), Bound(1), Bound(2)


def _allp(*parts) -> Term:
    *hints, body = parts
    for h in reversed(hints):
        body = mk_all(h, PROP, body)
    return body


def _peq(a: Term, b: Term) -> Term:
    return mk_eq(a, b, PROP)


_LEMMA_STATEMENTS: dict[str, Callable[[], Term]] = {
    "imp_refl": lambda: _allp("p", mk_implies(_B0, _B0)),
    "imp_const": lambda: _allp("p", "q", mk_implies(_B1, mk_implies(_B0, _B1))),
    "imp_trans": lambda: _allp(
        "p",
        "q",
        "r",
        mk_implies(
            mk_implies(_B2, _B1),
            mk_implies(mk_implies(_B1, _B0), mk_implies(_B2, _B0)),
        ),
    ),
    "or_intro1": lambda: _allp("p", "q", mk_implies(_B1, mk_or(_B1, _B0))),
    "or_intro2": lambda: _allp("p", "q", mk_implies(_B0, mk_or(_B1, _B0))),
    "or_elim_imp": lambda: _allp(
        "p",
        "q",
        "r",
        mk_implies(
            mk_implies(_B2, _B0),
            mk_implies(mk_implies(_B1, _B0), mk_implies(mk_or(_B2, _B1), _B0)),
        ),
    ),
    "iff_intro": lambda: _allp(
        "p",
        "q",
        mk_implies(
            mk_implies(_B1, _B0),
            mk_implies(mk_implies(_B0, _B1), _peq(_B1, _B0)),
        ),
    ),
    "efq": lambda: _allp("p", mk_implies(FALSE, _B0)),
    "conj_elim1": lambda: _allp("p", "q", mk_implies(mk_and(_B1, _B0), _B1)),
    "conj_elim2": lambda: _allp("p", "q", mk_implies(mk_and(_B1, _B0), _B0)),
    "conj_intro": lambda: _allp(
        "p", "q", mk_implies(_B1, mk_implies(_B0, mk_and(_B1, _B0)))
    ),
    "implies_as_or": lambda: _allp(
        "p", "q", _peq(mk_implies(_B1, _B0), mk_or(mk_not(_B1), _B0))
    ),
    "prop_eq_as_and": lambda: _allp(
        "p",
        "q",
        _peq(
            _peq(_B1, _B0),
            mk_and(mk_or(mk_not(_B1), _B0), mk_or(mk_not(_B0), _B1)),
        ),
    ),
    "nn_finish": lambda: _allp(
        "p", mk_implies(mk_implies(mk_not(_B0), FALSE), _B0)
    ),
    "cut_both": lambda: _allp(
        "a",
        "b",
        "l",
        mk_implies(
            mk_or(_B2, _B0),
            mk_implies(mk_or(_B1, mk_not(_B0)), mk_or(_B2, _B1)),
        ),
    ),
    "cut_left": lambda: _allp(
        "a", "l", mk_implies(mk_or(_B1, _B0), mk_implies(mk_not(_B0), _B1))
    ),
    "cut_right": lambda: _allp(
        "b", "l", mk_implies(_B0, mk_implies(mk_or(_B1, mk_not(_B0)), _B1))
    ),
    "cut_none": lambda: _allp(
        "l", mk_implies(_B0, mk_implies(mk_not(_B0), FALSE))
    ),
}


def lemma(ctx: Context, name: str) -> Theorem:
    """A derived propositional lemma, proved at the root on first use."""
    cache = _cache(ctx)
    th = cache.get(name)
    if th is None:
        root = ctx
        while root.parent is not None:
            root = root.parent
        th = taut(root, _LEMMA_STATEMENTS[name]())
        cache[name] = th
    return th


# ---------------------------------------------------------------------------
# Disjunction toolkit


def _or_contains(t: Term, lit: Term) -> bool:
    if t == lit:
        return True
    d = dest_or(t)
    return d is not None and (
        _or_contains(d[0], lit) or _or_contains(d[1], lit)
    )


def _inject(ctx: Context, lit: Term, target: Term) -> Theorem:
    # |- lit -> target where lit occurs in the disjunction tree target
    if target == lit:
        return specialize(lemma(ctx, "imp_refl"), lit, ctx)
    if lit == FALSE:
        return specialize(lemma(ctx, "efq"), target, ctx)
    d = dest_or(target)
    if d is None:
        raise KernelError("weaken_disj: literal missing from the target")
    left, right = d
    if _or_contains(left, lit):
        sub = _inject(ctx, lit, left)
        step = _spec(lemma(ctx, "or_intro1"), ctx, left, right)
        mid = left
    else:
        sub = _inject(ctx, lit, right)
        step = _spec(lemma(ctx, "or_intro2"), ctx, left, right)
        mid = right
    chain = _spec(lemma(ctx, "imp_trans"), ctx, lit, mid, target)
    return mp(mp(chain, sub), step)


def _imp_or(ctx: Context, src: Term, dst: Term) -> Theorem:
    # |- src -> dst where every literal of src occurs in dst (or is false)
    d = dest_or(src)
    if d is None:
        return _inject(ctx, src, dst)
    a, b = d
    left = _imp_or(ctx, a, dst)
    right = _imp_or(ctx, b, dst)
    inst = _spec(lemma(ctx, "or_elim_imp"), ctx, a, b, dst)
    return mp(mp(inst, left), right)


def weaken_disj(th: Theorem, target: Term) -> Theorem:
    """From |- C conclude |- target, where target is a disjunction containing
    every literal of the disjunction C (reordering, duplication, and new
    literals are all allowed)."""
    if th.prop == target:
        return th
    return mp(_imp_or(th.ctx, th.prop, target), th)


def _flatten_or(t: Term, out: list[Term]):
    d = dest_or(t)
    if d is None:
        out.append(t)
        return
    _flatten_or(d[0], out)
    _flatten_or(d[1], out)


def _right_nest(lits: list[Term]) -> Term:
    acc = lits[-1]
    for lit in reversed(lits[:-1]):
        acc = mk_or(lit, acc)
    return acc


def _disj_equation(ctx: Context, t: Term, dedup: bool) -> Theorem:
    lits: list[Term] = []
    _flatten_or(t, lits)
    if dedup:
        kept: list[Term] = []
        for lit in lits:
            if lit not in kept:
                kept.append(lit)
        lits = kept
    dst = _right_nest(lits)
    if dst == t:
        return all_conv(ctx, t)
    fwd = _imp_or(ctx, t, dst)
    bwd = _imp_or(ctx, dst, t)
    inst = _spec(lemma(ctx, "iff_intro"), ctx, t, dst)
    return mp(mp(inst, fwd), bwd)


def disj_norm_conv():
    """Conversion: right-associate a disjunction and drop duplicate literals,
    preserving first-occurrence order."""

    def conv(ctx: Context, t: Term) -> Optional[Theorem]:
        return _disj_equation(ctx, t, dedup=True)

    return conv


def nub_clause_conv():
    """The deduplication component of disj_norm_conv."""
    return disj_norm_conv()


def disj_cut(tha: Theorem, thb: Theorem, lit: Term | None = None) -> Theorem:
    """One ground resolution step: from |- A v L and |- B v ~L conclude
    |- A v B.  Either side may be a bare (negated) unit; with both bare the
    result is |- false.  L defaults to the rightmost disjunct of tha (or the
    whole of tha) whose negation ends thb."""
    a_prop, b_prop = tha.prop, thb.prop
    if lit is None:
        da = dest_or(a_prop)
        candidates = [da[1]] if da is not None else []
        candidates.append(a_prop)
        db = dest_or(b_prop)
        b_last = db[1] if db is not None else b_prop
        for cand in candidates:
            if b_last == mk_not(cand):
                lit = cand
                break
        if lit is None:
            raise KernelError("disj_cut: no complementary literal found")
    ctx = tha.ctx if tha.ctx.depth >= thb.ctx.depth else thb.ctx
    neg = mk_not(lit)
    da = dest_or(a_prop)
    a_rest = da[0] if da is not None and da[1] == lit else None
    if a_rest is None and a_prop != lit:
        raise KernelError("disj_cut: first theorem does not end with the literal")
    db = dest_or(b_prop)
    b_rest = db[0] if db is not None and db[1] == neg else None
    if b_rest is None and b_prop != neg:
        raise KernelError("disj_cut: second theorem does not end with the negation")
    if a_rest is not None and b_rest is not None:
        inst = _spec(lemma(ctx, "cut_both"), ctx, a_rest, b_rest, lit)
    elif a_rest is not None:
        inst = _spec(lemma(ctx, "cut_left"), ctx, a_rest, lit)
    elif b_rest is not None:
        inst = _spec(lemma(ctx, "cut_right"), ctx, b_rest, lit)
    else:
        inst = _spec(lemma(ctx, "cut_none"), ctx, lit)
    return mp(mp(inst, tha), thb)
