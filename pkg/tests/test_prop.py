"""Tautology checker and disjunction toolkit, checked against the
two-element model evaluator."""

from __future__ import annotations

import random

import pytest

from conftest import meval, prop_truth_table, random_prop_term
from metis_lcf.conv import rewr_conv1
from metis_lcf.kernel import (
    FALSE,
    PROP,
    TRUE,
    UNIVERSE,
    Bound,
    Comb,
    KernelError,
    assume,
    dest_eq,
    dest_or,
    fn,
    intro_const,
    mk_all,
    mk_and,
    mk_eq,
    mk_ex,
    mk_implies,
    mk_not,
    mk_or,
    root_context,
)
from metis_lcf.prop import (
    NotPropositional,
    NotTautology,
    atoms,
    disj_cut,
    disj_norm_conv,
    eval_conv,
    lemma,
    nub_clause_conv,
    taut,
    weaken_disj,
)
from metis_lcf.syntax import parse_term

U = UNIVERSE


@pytest.fixture
def pctx():
    ctx = root_context()
    out = [ctx]
    for name in ("p", "q", "r"):
        ctx, k = intro_const(ctx, name, PROP)
        out.append(k)
    out[0] = ctx
    return tuple(out)


def test_atoms_basic(pctx):
    ctx, p, q, r = pctx
    assert atoms(ctx, mk_or(p, mk_not(p))) == [p]
    assert atoms(ctx, TRUE) == []
    assert atoms(ctx, mk_implies(mk_and(p, q), mk_or(q, r))) == [p, q, r]


def test_atoms_universe_equation_is_opaque():
    ctx = root_context()
    ctx, a = intro_const(ctx, "a", U)
    ctx, b = intro_const(ctx, "b", U)
    e = mk_eq(a, b, U)
    assert atoms(ctx, mk_implies(e, e)) == [e]


def test_atoms_prop_equation_decomposes(pctx):
    ctx, p, q, _ = pctx
    assert atoms(ctx, mk_eq(p, q, PROP)) == [p, q]


def test_atoms_quantifier_raises(pctx):
    ctx, p, *_ = pctx
    t = mk_or(p, mk_all("x", U, TRUE))
    with pytest.raises(NotPropositional):
        atoms(ctx, t)
    with pytest.raises(NotPropositional):
        atoms(ctx, mk_ex("x", U, p))


def test_eval_conv(pctx):
    ctx, p, q, _ = pctx
    r = eval_conv({})(ctx, mk_and(TRUE, TRUE))
    assert dest_eq(r.prop)[1] == TRUE
    r2 = eval_conv({p: False})(ctx, mk_or(p, mk_not(p)))
    assert dest_eq(r2.prop)[1] == TRUE
    r3 = eval_conv({p: True})(ctx, mk_and(p, FALSE))
    assert dest_eq(r3.prop)[1] == FALSE
    # partial assignments leave the unassigned atom alone
    r4 = eval_conv({p: True})(ctx, mk_and(p, q))
    assert dest_eq(r4.prop)[1] == q


def test_taut_de_morgan():
    ctx = root_context()
    phi = parse_term(ctx, "forall p:P q:P. (~(p /\\ q)) = (~p \\/ ~q)")
    th = taut(ctx, phi)
    assert th.prop == phi
    assert th.ctx is ctx


def test_taut_trivial_and_vacuous():
    ctx = root_context()
    assert taut(ctx, TRUE).prop == TRUE
    phi = mk_all("p", PROP, TRUE)
    assert taut(ctx, phi).prop == phi
    phi2 = mk_all("p", PROP, mk_all("q", PROP, mk_implies(Bound(1), Bound(1))))
    assert taut(ctx, phi2).prop == phi2


def test_taut_countermodel(pctx):
    ctx, p, q, _ = pctx
    with pytest.raises(NotTautology) as e:
        taut(ctx, mk_and(p, mk_not(p)))
    assert e.value.countermodel == {p: True}
    with pytest.raises(NotTautology) as e2:
        taut(ctx, mk_or(p, q))
    cm = e2.value.countermodel
    assert cm == {p: False, q: False}


def test_taut_not_propositional(pctx):
    ctx, p, *_ = pctx
    with pytest.raises(NotPropositional):
        taut(ctx, mk_or(p, mk_all("x", U, TRUE)))
    # a universe-quantified prefix is not strippable
    with pytest.raises(NotPropositional):
        taut(ctx, mk_all("x", U, mk_or(p, mk_not(p))))


def test_taut_classical_samples():
    ctx = root_context()
    for src in (
        "forall p:P. p \\/ ~p",
        "forall p:P. (~ ~ p) = p",
        "forall p:P q:P. (p -> q) \\/ (q -> p)",
        "forall p:P q:P r:P. ((p -> q) -> ((q -> r) -> (p -> r)))",
        "forall p:P q:P. ((p -> q) -> p) -> p",
        "forall p:P q:P. (p = q) \\/ (p = ~q)",
    ):
        phi = parse_term(ctx, src)
        assert taut(ctx, phi).prop == phi


def test_taut_agrees_with_truth_tables(pctx):
    ctx, p, q, r = pctx
    rng = random.Random(20260815)
    atoms3 = [p, q, r]
    for _ in range(120):
        phi = random_prop_term(rng, atoms3, rng.randint(0, 4))
        table = prop_truth_table(phi, atoms3)
        if all(table):
            assert taut(ctx, phi).prop == phi
        else:
            with pytest.raises(NotTautology) as e:
                taut(ctx, phi)
            model = {a.name: v for a, v in e.value.countermodel.items()}
            for a in atoms3:
                model.setdefault(a.name, False)
            assert meval(phi, model) is False


def test_lemma_cache_and_validity():
    ctx = root_context()
    names = (
        "imp_refl",
        "imp_const",
        "imp_trans",
        "or_intro1",
        "or_intro2",
        "or_elim_imp",
        "iff_intro",
        "efq",
        "conj_elim1",
        "conj_elim2",
        "conj_intro",
        "implies_as_or",
        "prop_eq_as_and",
        "nn_finish",
        "cut_both",
        "cut_left",
        "cut_right",
        "cut_none",
    )
    from conftest import holds_everywhere

    for n in names:
        th = lemma(ctx, n)
        assert th.prop == lemma(ctx, n).prop
        assert lemma(ctx, n) is th
        assert holds_everywhere(th.prop)
    # the cache is shared with descendants
    child, _ = intro_const(ctx, "x", U)
    assert lemma(child, "imp_refl") is lemma(ctx, "imp_refl")


def test_implies_as_or_is_a_rewrite(pctx):
    ctx, p, q, _ = pctx
    conv = rewr_conv1(lemma(ctx, "implies_as_or"))
    t = mk_implies(p, q)
    r = conv(ctx, t)
    assert dest_eq(r.prop)[1] == mk_or(mk_not(p), q)


def test_weaken_disj(pctx):
    ctx, p, q, r = pctx
    th = assume(ctx, mk_or(p, q))
    # reorder and widen
    target = mk_or(q, mk_or(r, p))
    out = weaken_disj(th, target)
    assert out.prop == target
    # a unit premise
    th2 = assume(ctx, p)
    assert weaken_disj(th2, mk_or(q, p)).prop == mk_or(q, p)
    # identical target is a no-op
    assert weaken_disj(th, mk_or(p, q)) is th
    # false premise goes anywhere
    th3 = assume(ctx, FALSE)
    assert weaken_disj(th3, mk_or(p, q)).prop == mk_or(p, q)
    with pytest.raises(KernelError):
        weaken_disj(th, r)


def test_disj_norm_conv(pctx):
    ctx, p, q, r = pctx
    conv = disj_norm_conv()
    t1 = mk_or(p, mk_or(p, q))
    assert dest_eq(conv(ctx, t1).prop)[1] == mk_or(p, q)
    t2 = mk_or(mk_or(p, q), r)
    assert dest_eq(conv(ctx, t2).prop)[1] == mk_or(p, mk_or(q, r))
    # already normal: reflexive
    t3 = mk_or(p, mk_or(q, r))
    out = conv(ctx, t3)
    assert dest_eq(out.prop) == (t3, t3, PROP)
    # single literal stays put
    assert dest_eq(conv(ctx, p).prop) == (p, p, PROP)
    assert dest_eq(nub_clause_conv()(ctx, t1).prop)[1] == mk_or(p, q)


def test_disj_norm_invariant(pctx):
    ctx, p, q, r = pctx
    rng = random.Random(4242)
    lits = [p, q, r, mk_not(p), mk_not(q)]
    conv = disj_norm_conv()

    def random_tree(depth):
        if depth == 0 or rng.random() < 0.3:
            return rng.choice(lits)
        return mk_or(random_tree(depth - 1), random_tree(depth - 1))

    for _ in range(60):
        t = random_tree(3)
        out = dest_eq(conv(ctx, t).prop)[1]
        seen = []
        node = out
        while True:
            d = dest_or(node)
            if d is None:
                seen.append(node)
                break
            assert dest_or(d[0]) is None  # right-nested
            seen.append(d[0])
            node = d[1]
        assert len(set(seen)) == len(seen)  # no duplicates
        # same literal set as the input
        flat = []

        def walk(x):
            d = dest_or(x)
            if d is None:
                flat.append(x)
            else:
                walk(d[0])
                walk(d[1])

        walk(t)
        assert set(seen) == set(flat)


def test_disj_cut(pctx):
    ctx, p, q, r = pctx
    lit = r
    tha = assume(ctx, mk_or(p, lit))
    thb = assume(tha.ctx, mk_or(q, mk_not(lit)))
    out = disj_cut(tha, thb)
    assert out.prop == mk_or(p, q)
    # oracle: the combination is valid on all eight valuations
    combined = mk_implies(
        mk_and(mk_or(p, lit), mk_or(q, mk_not(lit))), mk_or(p, q)
    )
    for bits in range(8):
        model = {
            k.name: bool(bits >> i & 1) for i, k in enumerate((p, q, lit))
        }
        assert meval(combined, model) is True


def test_disj_cut_units(pctx):
    ctx, p, q, r = pctx
    unit = assume(ctx, r)
    neg_unit = assume(unit.ctx, mk_not(r))
    assert disj_cut(unit, neg_unit).prop == FALSE
    tha = assume(ctx, mk_or(p, r))
    nb = assume(tha.ctx, mk_not(r))
    assert disj_cut(tha, nb).prop == p
    thb = assume(unit.ctx, mk_or(q, mk_not(r)))
    assert disj_cut(unit, thb).prop == q
    with pytest.raises(KernelError):
        disj_cut(assume(ctx, p), assume(ctx, q))


def test_disj_cut_explicit_literal(pctx):
    ctx, p, q, r = pctx
    tha = assume(ctx, mk_or(p, r))
    thb = assume(tha.ctx, mk_or(q, mk_not(r)))
    out = disj_cut(tha, thb, lit=r)
    assert out.prop == mk_or(p, q)


def test_taut_success_implies_eval_true(pctx):
    ctx, p, q, _ = pctx
    phi = mk_or(mk_implies(p, q), mk_implies(q, p))
    taut(ctx, phi)
    for bits in range(4):
        assignment = {p: bool(bits & 1), q: bool(bits >> 1 & 1)}
        r = eval_conv(assignment)(ctx, phi)
        assert dest_eq(r.prop)[1] == TRUE
