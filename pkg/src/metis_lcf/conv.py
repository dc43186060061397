"""Conversions and conversionals.

A conversion is a function from (Context, Term) to an equational theorem
|- t = t' whose left side is alpha-equal to the input term, or None for
failure.  Failure is a value here, never an exception; exceptions from
this module indicate misuse (ill-typed input, fuel exhaustion), not an
unmatched term.

sym and trans are derived rules, not kernel primitives: both follow from
combine applied to a reflexivity theorem about eq itself, finished with
eq_mp.
"""

from __future__ import annotations

from typing import Callable, Optional

from metis_lcf.kernel import (
    Abs,
    Comb,
    Const,
    Context,
    KernelError,
    Term,
    Theorem,
    _infer,
    _subst,
    abstract,
    dest_abs,
    dest_all,
    dest_eq,
    dest_ex,
    eq_c,
    eq_mp,
    is_ancestor,
    lift,
    mk_eq,
    normalize,
    reflexive,
    schema_axiom,
    specialize,
)
from metis_lcf.kernel import Bound as _Bound

Conversion = Callable[[Context, Term], Optional[Theorem]]


def sym(th: Theorem) -> Theorem:
    """|- s = t  to  |- t = s."""
    d = dest_eq(th.prop)
    if d is None:
        raise KernelError("sym needs an equation")
    s, t, ty = d
    refl_s = reflexive(th.ctx, s)
    congruence = combine_eq(th.ctx, ty, th, refl_s)  # |- (s=s) = (t=s)
    return eq_mp(congruence, refl_s)


def trans(th1: Theorem, th2: Theorem) -> Theorem:
    """|- s = t and |- t = u  to  |- s = u."""
    d1 = dest_eq(th1.prop)
    d2 = dest_eq(th2.prop)
    if d1 is None or d2 is None:
        raise KernelError("trans needs two equations")
    s, t, ty = d1
    t2, u, ty2 = d2
    if ty != ty2 or t != t2:
        raise KernelError("trans: equations do not chain")
    refl_s = reflexive(th1.ctx, s)
    congruence = combine_eq(th1.ctx, ty, refl_s, th2)  # |- (s=t) = (s=u)
    return eq_mp(congruence, th1)


def combine_eq(ctx: Context, ty, lhs_eq: Theorem, rhs_eq: Theorem) -> Theorem:
    """From |- a = b and |- c = d build |- (a=c) = (b=d) by applying eq."""
    from metis_lcf.kernel import combine

    refl_eq = reflexive(ctx, eq_c(ty))
    return combine(combine(refl_eq, lhs_eq), rhs_eq)


def _rhs(th: Theorem) -> Term:
    return dest_eq(th.prop)[1]


# ---------------------------------------------------------------------------
# Primitive conversions


def no_conv(ctx: Context, t: Term) -> None:
    return None


def all_conv(ctx: Context, t: Term) -> Theorem:
    return reflexive(ctx, t)


def orelse_conv(*convs: Conversion) -> Conversion:
    def conv(ctx, t):
        for c in convs:
            r = c(ctx, t)
            if r is not None:
                return r
        return None

    return conv


def then_conv(c1: Conversion, c2: Conversion) -> Conversion:
    def conv(ctx, t):
        r1 = c1(ctx, t)
        if r1 is None:
            return None
        r2 = c2(ctx, _rhs(r1))
        if r2 is None:
            return None
        return _fast_trans(r1, r2)

    return conv


def _fast_trans(r1: Theorem, r2: Theorem) -> Theorem:
    d1 = dest_eq(r1.prop)
    if d1[0] == d1[1]:
        return r2
    d2 = dest_eq(r2.prop)
    if d2[0] == d2[1]:
        return r1
    return trans(r1, r2)


def comb_conv(cf: Conversion, cx: Conversion) -> Conversion:
    from metis_lcf.kernel import combine

    def conv(ctx, t):
        if not isinstance(t, Comb):
            return None
        rf = cf(ctx, t.fun)
        if rf is None:
            return None
        rx = cx(ctx, t.arg)
        if rx is None:
            return None
        return combine(rf, rx)

    return conv


def rator_conv(c: Conversion) -> Conversion:
    return comb_conv(c, all_conv)


def rand_conv(c: Conversion) -> Conversion:
    return comb_conv(all_conv, c)


def abs_conv(c: Conversion) -> Conversion:
    """Apply c under a lambda: open the abstraction with a fresh constant,
    convert the body, lift the equation and rebuild with abstract."""

    def conv(ctx, t):
        if not isinstance(t, Abs):
            return None
        opened = dest_abs(ctx, t)
        child, _, body = opened
        r = c(child, body)
        if r is None:
            return None
        if is_ancestor(child, r.ctx):
            q = lift(r, ctx)
            if dest_all(q.prop) is None:
                # body ignored the variable, so lift dropped it; re-quantify
                q = _vacuous_forall(ctx, t.var_ty, q)
        else:
            q = _vacuous_forall(ctx, t.var_ty, r)
        return abstract(q)

    return conv


def _vacuous_forall(ctx: Context, vty, th_eq: Theorem) -> Theorem:
    triv = schema_axiom(ctx, "forall_triv", (vty,))
    inst = specialize(triv, th_eq.prop, ctx)  # (forall x. e) = e
    return eq_mp(sym(inst), th_eq)


def subs_conv(eq: Theorem) -> Conversion:
    """Send anything alpha-equal to eq's left side to its normalized right
    side; fail on everything else."""
    d = dest_eq(eq.prop)
    if d is None:
        raise KernelError("subs_conv needs an equation")
    lhs, rhs, _ = d

    def conv(ctx, t):
        if t != lhs:
            return None
        return _fast_trans(eq, normalize(ctx, rhs))

    return conv


def normalize_conv(ctx: Context, t: Term) -> Theorem:
    return normalize(ctx, t)


def beta_conv(ctx: Context, t: Term) -> Optional[Theorem]:
    """Contract one outermost beta redex."""
    if not (isinstance(t, Comb) and isinstance(t.fun, Abs)):
        return None
    return eq_by_normal(ctx, t, _subst(t.fun.body, t.arg))


def eq_by_normal(ctx: Context, a: Term, b: Term) -> Optional[Theorem]:
    """|- a = b provided a and b share a beta-eta-long normal form."""
    na = normalize(ctx, a)
    nb = normalize(ctx, b)
    if _rhs(na) != _rhs(nb):
        return None
    return _fast_trans(na, sym(nb))


# ---------------------------------------------------------------------------
# First-order rewriting with a quantified equation


def _strip_pattern(prop: Term):
    holes: list[tuple[str, object]] = []
    i = 0
    while True:
        q = dest_all(prop)
        if q is None:
            break
        ty, ab = q
        name = f"?{i}"
        holes.append((name, ty))
        prop = _subst(ab.body, Const(name, ty))
        i += 1
    d = dest_eq(prop)
    if d is None:
        raise KernelError("rewr_conv1 needs a quantified equation")
    return holes, d[0]


def _is_closed(t: Term, depth: int = 0) -> bool:
    match t:
        case _Bound(i):
            return i < depth
        case Comb(f, x):
            return _is_closed(f, depth) and _is_closed(x, depth)
        case Abs(_, _, b):
            return _is_closed(b, depth + 1)
        case _:
            return True


def _match(pat: Term, t: Term, hole_tys: dict, binding: dict) -> bool:
    match pat:
        case Const(name, _) if name in hole_tys:
            if not _is_closed(t):
                return False  # would capture a bound variable
            prev = binding.get(name)
            if prev is not None:
                return prev == t
            try:
                if _infer(t, []) != hole_tys[name]:
                    return False
            except KernelError:
                return False
            binding[name] = t
            return True
        case Const():
            return pat == t
        case _Bound(i):
            return isinstance(t, _Bound) and t.index == i
        case Comb(pf, px):
            return (
                isinstance(t, Comb)
                and _match(pf, t.fun, hole_tys, binding)
                and _match(px, t.arg, hole_tys, binding)
            )
        case Abs(_, pty, pb):
            return (
                isinstance(t, Abs)
                and t.var_ty == pty
                and _match(pb, t.body, hole_tys, binding)
            )
    return False


def rewr_conv1(eq: Theorem) -> Conversion:
    """Rewrite with |- forall x1..xn. lhs = rhs by first-order matching.

    Pattern variables (the stripped quantifiers) match closed terms of
    their type; everything else must match syntactically.  All pattern
    variables must be bound by the match or the conversion fails."""
    holes, lhs_pat = _strip_pattern(eq.prop)
    hole_tys = dict(holes)

    def conv(ctx, t):
        binding: dict = {}
        if not _match(lhs_pat, t, hole_tys, binding):
            return None
        if len(binding) != len(holes):
            return None  # never instantiate partially
        th = eq
        for name, _ in holes:
            th = specialize(th, binding[name], ctx)
        if dest_eq(th.prop)[0] != t:
            # an abstraction bound to a pattern variable contracted at its
            # application sites and changed the left side; refuse the match
            return None
        return th

    return conv


# ---------------------------------------------------------------------------
# Conversionals


def try_conv(c: Conversion) -> Conversion:
    return orelse_conv(c, all_conv)


def repeat_conv(c: Conversion, fuel: int = 10000) -> Conversion:
    """Apply c until it fails (possibly zero times); always succeeds."""

    def conv(ctx, t):
        out = reflexive(ctx, t)
        current = t
        for _ in range(fuel):
            r = c(ctx, current)
            if r is None:
                return out
            out = _fast_trans(out, r)
            current = _rhs(r)
        raise RuntimeError("repeat_conv: fuel exhausted, rewrite loops")

    return conv


def first_conv(convs) -> Conversion:
    return orelse_conv(*convs)


def every_conv(convs) -> Conversion:
    out = all_conv
    for c in convs:
        out = then_conv(out, c)
    return out


def up_conv(c: Conversion, fuel: int = 10000) -> Conversion:
    """Bottom-up pass: convert subterms first, then repeat c at the rebuilt
    node.  Always succeeds (with reflexivity when nothing changes)."""

    def conv(ctx, t):
        if isinstance(t, Comb):
            r = comb_conv(conv, conv)(ctx, t)
        elif isinstance(t, Abs):
            r = abs_conv(conv)(ctx, t)
        else:
            r = reflexive(ctx, t)
        r2 = repeat_conv(c, fuel)(ctx, _rhs(r))
        return _fast_trans(r, r2)

    return conv


def td_conv(c: Conversion, fuel: int = 10000) -> Conversion:
    """Top-down pass: repeat c at the node, then convert the children of
    the result.  Always succeeds."""

    def conv(ctx, t):
        r = repeat_conv(c, fuel)(ctx, t)
        t2 = _rhs(r)
        if isinstance(t2, Comb):
            r2 = comb_conv(conv, conv)(ctx, t2)
        elif isinstance(t2, Abs):
            r2 = abs_conv(conv)(ctx, t2)
        else:
            return r
        return _fast_trans(r, r2)

    return conv


def once_conv(c: Conversion) -> Conversion:
    """Apply c exactly once, at the leftmost-outermost position where it
    succeeds; fail if it succeeds nowhere."""

    def conv(ctx, t):
        r = c(ctx, t)
        if r is not None:
            return r
        if isinstance(t, Comb):
            r = rator_conv(conv)(ctx, t)
            if r is not None:
                return r
            return rand_conv(conv)(ctx, t)
        if isinstance(t, Abs):
            return abs_conv(conv)(ctx, t)
        return None

    return conv


def under_prefix(c: Conversion) -> Conversion:
    """Apply c beneath the leading quantifier prefix."""

    def conv(ctx, t):
        q = dest_all(t) or dest_ex(t)
        if q is not None and isinstance(t.arg, Abs):
            return rand_conv(abs_conv(conv))(ctx, t)
        return c(ctx, t)

    return conv


# ---------------------------------------------------------------------------
# Theorem-level helpers


def conv_rule(c: Conversion, th: Theorem) -> Optional[Theorem]:
    """Rewrite a theorem's proposition with a conversion."""
    r = c(th.ctx, th.prop)
    if r is None:
        return None
    return eq_mp(r, th)


def eq_true_elim(th: Theorem) -> Theorem:
    """|- phi = true  to  |- phi."""
    from metis_lcf.kernel import PROP, TRUE

    d = dest_eq(th.prop)
    if d is None or d[2] != PROP or d[1] != TRUE:
        raise KernelError("eq_true_elim needs |- phi = true")
    iff_true = schema_axiom(th.ctx, "iff_true")
    inst = specialize(iff_true, d[0], th.ctx)  # (phi = true) = phi
    return eq_mp(inst, th)
