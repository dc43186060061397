"""Certificate-to-kernel bridge: clause encoding, per-rule replay, and the
metis entry point, cross-checked against the clause-level prover's own
certificates and the two-element model oracle."""

from __future__ import annotations

import itertools

import pytest

from test_resolution import _has_two_element_model, _rand_problem

from metis_lcf.bridge import (
    BridgeError,
    ClausePair,
    NodeMismatch,
    ProofNotFound,
    SymbolTable,
    cert_sexp,
    decode_literal,
    encode_clause,
    make_clause_pairs,
    metis,
    problem_sexp,
    reconstruct,
    reconstruct_resolve,
    reconstruct_subst,
    run_metis,
)
from metis_lcf.cnf import to_clauses
from metis_lcf.kernel import (
    FALSE,
    PROP,
    TRUE,
    UNIVERSE,
    Bound,
    Comb,
    Const,
    Context,
    Term,
    declare_const,
    fn,
    is_ancestor,
    load_axiom,
    mk_all,
    mk_eq,
    mk_not,
    mk_or,
)
from metis_lcf.resolution import (
    Certificate,
    Clause,
    Fn,
    Literal,
    Refuted,
    Subst,
    Var,
    check_certificate,
    prove,
)
from metis_lcf.syntax import parse_term


def _ctx_with(*decls):
    ctx = Context()
    out = [ctx]
    for name, ty in decls:
        ctx, c = declare_const(ctx, name, ty)
        out[0] = ctx
        out.append(c)
    out[0] = ctx
    return out


def _axiom_pair(ctx, sym, src, vars):
    """Load src as an axiom and pair it with the given prover variables."""
    ctx2, th = load_axiom(ctx, f"ax{len(sym.functions)}_{len(vars)}_{abs(hash(src)) % 997}", parse_term(ctx, src))
    return ctx2, ClausePair(list(vars), th)


# --- the worked representation example ---------------------------------------


def _walkthrough_ctx():
    return _ctx_with(
        ("p", fn(UNIVERSE, UNIVERSE, PROP)),
        ("q", fn(UNIVERSE, UNIVERSE, PROP)),
        ("r", fn(UNIVERSE, UNIVERSE, PROP)),
        ("h", fn(UNIVERSE, UNIVERSE, UNIVERSE, UNIVERSE)),
    )


def test_three_representations_encode_identically():
    ctx, p, q, r, h = _walkthrough_ctx()
    sym = SymbolTable()
    want = Clause(
        [
            Literal(True, "p", (Var(3), Var(8))),
            Literal(False, "q", (Var(2), Var(5))),
        ]
    )
    reps = [
        ("forall x:U y:U z:U w:U. (p x z) \\/ ~(q y w)", [3, 2, 8, 5]),
        ("forall a:U b:U c:U d:U. ~(q d b) \\/ (p c a)", [8, 5, 3, 2]),
        ("forall x1:U x2:U x3:U x4:U. (p x4 x3) \\/ ~(q x2 x1)", [5, 2, 8, 3]),
    ]
    for src, vars in reps:
        _, cp = _axiom_pair(ctx, sym, src, vars)
        assert encode_clause(sym, cp) == want


def test_subst_walkthrough():
    ctx, p, q, r, h = _walkthrough_ctx()
    sym = SymbolTable()
    sym.function_symbol(h, 3)
    ctx2, cp = _axiom_pair(ctx, sym, "forall x:U y:U z:U w:U. (p x z) \\/ ~(q y w)", [3, 2, 8, 5])
    theta = Subst({8: Fn("h", (Var(1), Var(2), Var(9)))})
    out = reconstruct_subst(ctx2, sym, cp, theta)
    assert out.vars == [3, 1, 2, 9, 5]
    assert encode_clause(sym, out) == Clause(
        [
            Literal(True, "p", (Var(3), Fn("h", (Var(1), Var(2), Var(9))))),
            Literal(False, "q", (Var(2), Var(5))),
        ]
    )
    want = parse_term(
        ctx2, "forall x:U y:U z:U u:U v:U. (p x (h y z u)) \\/ ~(q z v)"
    )
    assert out.thm.prop == want  # kernel == is alpha-equivalence


def test_resolve_walkthrough():
    ctx, p, q, r, h = _walkthrough_ctx()
    sym = SymbolTable()
    sym.function_symbol(h, 3)
    ctx2, cp = _axiom_pair(ctx, sym, "forall x:U y:U z:U w:U. (p x z) \\/ ~(q y w)", [3, 2, 8, 5])
    left = reconstruct_subst(ctx2, sym, cp, Subst({8: Fn("h", (Var(1), Var(2), Var(9)))}))
    ctx3, right = _axiom_pair(ctx2, sym, "forall x:U y:U z:U w:U. (r y w) \\/ (q z x)", [5, 4, 2, 6])
    cut = Literal(False, "q", (Var(2), Var(5)))
    out = reconstruct_resolve(ctx3, sym, left, right, cut)
    assert encode_clause(sym, out) == Clause(
        [
            Literal(True, "p", (Var(3), Fn("h", (Var(1), Var(2), Var(9))))),
            Literal(True, "r", (Var(4), Var(6))),
        ]
    )
    assert 5 not in out.vars  # the resolved-away variable drops out of the map
    assert set(out.vars) == {3, 1, 2, 9, 4, 6}


# --- symbol table -------------------------------------------------------------


def test_symbol_table_is_a_bijection():
    ctx, p, q, r, h = _walkthrough_ctx()
    sym = SymbolTable()
    assert sym.function_symbol(h, 3) == "h"
    assert sym.function(sym.function_symbol(h, 3)) == h
    other = Const("h", fn(UNIVERSE, UNIVERSE))
    with pytest.raises(BridgeError):
        sym.function_symbol(other, 1)
    with pytest.raises(BridgeError):
        sym.function("nope")
    with pytest.raises(BridgeError):
        sym.predicate("p")
    assert sym.predicate_symbol(p, 2) == "p"
    assert sym.predicate("p") == p


def test_symbol_table_rejects_higher_order_constants():
    ctx = Context()
    ctx, weird = declare_const(ctx, "weird", fn(fn(UNIVERSE, UNIVERSE), PROP))
    sym = SymbolTable()
    with pytest.raises(BridgeError):
        sym.predicate_symbol(weird, 1)


# --- clause pairs out of the pipeline ------------------------------------------


def test_make_clause_pairs_shares_one_variable_space():
    ctx, p, q, r, h = _walkthrough_ctx()
    out1 = to_clauses(ctx, parse_term(ctx, "forall x:U y:U. p x y"))
    out2 = to_clauses(out1.final_ctx, parse_term(out1.final_ctx, "forall x:U. q x x \\/ r x x"))
    sym = SymbolTable()
    fresh = itertools.count(1)
    _, pairs1 = make_clause_pairs(out1, sym, fresh)
    _, pairs2 = make_clause_pairs(out2, sym, fresh)
    ids = [v for cp in pairs1 + pairs2 for v in cp.vars]
    assert len(ids) == len(set(ids))  # never reused across clauses
    for cp in pairs1 + pairs2:
        assert len(cp.vars) == len(set(cp.vars))
        enc = encode_clause(sym, cp)
        assert set(v.id for lit in enc for a in lit.args for v in _vars_of(a)) == set(cp.vars)


def _vars_of(t):
    stack, out = [t], []
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.append(u)
        else:
            stack.extend(u.args)
    return out


def test_true_false_encode_as_plain_predicates():
    ctx = Context()
    out = to_clauses(ctx, mk_not(FALSE))
    sym = SymbolTable()
    _, pairs = make_clause_pairs(out, sym)
    assert [encode_clause(sym, cp) for cp in pairs] == [
        Clause([Literal(False, "false", ())])
    ]


# --- whole-certificate replay ---------------------------------------------------


def _clause_closure(ctx, sym, clause):
    """Universal closure of a prover clause as a kernel term, plus the
    first-use variable list that makes it a faithful ClausePair."""
    order = []

    def walk_term(t):
        if isinstance(t, Var):
            if t.id not in order:
                order.append(t.id)
            return
        for a in t.args:
            walk_term(a)

    for lit in clause:
        for a in lit.args:
            walk_term(a)
    n = len(order)
    depth_of = {vid: i for i, vid in enumerate(order)}

    def term(t):
        if isinstance(t, Var):
            return Bound(n - 1 - depth_of[t.id])
        out = sym.function(t.symbol)
        for a in t.args:
            out = Comb(out, term(a))
        return out

    def literal(lit):
        if lit.is_eq:
            atom = mk_eq(term(lit.args[0]), term(lit.args[1]), UNIVERSE)
        else:
            atom = sym.predicate(lit.pred)
            for a in lit.args:
                atom = Comb(atom, term(a))
        return atom if lit.polarity else mk_not(atom)

    lits = [literal(l) for l in clause]
    body = lits[0]
    for l in lits[1:]:
        body = mk_or(body, l)
    for _ in range(n):
        body = mk_all("v", UNIVERSE, body)
    return order, body


def _load_problem(problem):
    """Kernel context + symbol table + input ClausePairs for a prover
    problem over the randomized test signature."""
    ctx = Context()
    sym = SymbolTable()
    sig = [
        ("p", fn(UNIVERSE, PROP), "pred", 1),
        ("q", fn(UNIVERSE, UNIVERSE, PROP), "pred", 2),
        ("r", PROP, "pred", 0),
        ("f", fn(UNIVERSE, UNIVERSE), "fn", 1),
        ("c", UNIVERSE, "fn", 0),
    ]
    for name, ty, kind, arity in sig:
        ctx, const = declare_const(ctx, name, ty)
        if kind == "pred":
            sym.predicate_symbol(const, arity)
        else:
            sym.function_symbol(const, arity)
    inputs = []
    for i, cl in enumerate(problem):
        vars, closure = _clause_closure(ctx, sym, cl)
        ctx, th = load_axiom(ctx, f"in{i}", closure)
        inputs.append(ClausePair(vars, th))
    # axioms loaded higher up the chain stay valid in the final context,
    # so the pairs can be used as they are
    return ctx, sym, inputs


def test_reconstruct_unit_refutation():
    prob = [Clause([Literal(True, "r", ())]), Clause([Literal(False, "r", ())])]
    res = prove(prob)
    assert isinstance(res, Refuted)
    ctx, sym, inputs = _load_problem(prob)
    th = reconstruct(ctx, sym, inputs, res.certificate)
    assert th.prop == FALSE
    assert is_ancestor(th.ctx, ctx)


def test_reconstruct_equality_refutation():
    a_ = Fn("c")
    fa = Fn("f", (a_,))
    prob = [
        Clause([Literal(True, "=", (a_, fa))]),
        Clause([Literal(True, "p", (a_,))]),
        Clause([Literal(False, "p", (fa,))]),
    ]
    res = prove(prob)
    assert isinstance(res, Refuted)
    ctx, sym, inputs = _load_problem(prob)
    th = reconstruct(ctx, sym, inputs, res.certificate)
    assert th.prop == FALSE


def test_reconstruct_rejects_corrupted_certificate():
    prob = [Clause([Literal(True, "r", ())]), Clause([Literal(False, "r", ())])]
    res = prove(prob)
    ctx, sym, inputs = _load_problem(prob)
    root = res.certificate
    bad_clause = Clause([Literal(True, "p", (Fn("c"),))])
    bad = Certificate(root.rule, bad_clause, root.children, root.data)
    with pytest.raises(NodeMismatch) as exc:
        reconstruct(ctx, sym, inputs, bad)
    assert exc.value.node is bad


def test_reconstruct_rejects_unknown_axiom():
    prob = [Clause([Literal(True, "r", ())]), Clause([Literal(False, "r", ())])]
    res = prove(prob)
    ctx, sym, inputs = _load_problem(prob[:1])  # drop one input
    with pytest.raises(NodeMismatch):
        reconstruct(ctx, sym, inputs, res.certificate)


def test_random_refutations_replay_node_for_node(rng):
    """Certificate fuzz: every refutation the prover finds on a random
    problem replays through the kernel, and the model oracle agrees the
    problem really is unsatisfiable."""
    refuted = 0
    for _ in range(120):
        prob = _rand_problem(rng)
        res = prove(prob, max_generated=800)
        if not isinstance(res, Refuted):
            continue
        refuted += 1
        assert check_certificate(prob, res.certificate) is None
        assert not _has_two_element_model(prob)
        ctx, sym, inputs = _load_problem(prob)
        th = reconstruct(ctx, sym, inputs, res.certificate)
        assert th.prop == FALSE
    assert refuted >= 10


# --- metis ---------------------------------------------------------------------


def _zf_free_ctx():
    ctx = Context()
    ctx, rel = declare_const(ctx, "rel", fn(UNIVERSE, UNIVERSE, PROP))
    ctx, g = declare_const(ctx, "g", fn(UNIVERSE, UNIVERSE))
    ctx, a = declare_const(ctx, "a", UNIVERSE)
    ctx, b = declare_const(ctx, "b", UNIVERSE)
    return ctx


def test_metis_modus_ponens_chain():
    ctx = _zf_free_ctx()
    ctx, h1 = load_axiom(ctx, "h1", parse_term(ctx, "forall x:U. rel x x"))
    ctx, h2 = load_axiom(
        ctx, "h2", parse_term(ctx, "forall x:U y:U. rel x y -> rel (g x) (g y)")
    )
    goal = parse_term(ctx, "rel (g a) (g a)")
    th = metis(ctx, goal, [h1, h2])
    assert th.prop == goal
    assert th.ctx is ctx


def test_metis_equality_and_congruence():
    ctx = _zf_free_ctx()
    ctx, e1 = load_axiom(ctx, "e1", parse_term(ctx, "a = g b"))
    ctx, e2 = load_axiom(ctx, "e2", parse_term(ctx, "g b = b"))
    goal = parse_term(ctx, "g a = g b")
    th = metis(ctx, goal, [e1, e2])
    assert th.prop == goal
    assert th.ctx is ctx


def test_metis_existential_goal():
    ctx = _zf_free_ctx()
    ctx, h = load_axiom(ctx, "h", parse_term(ctx, "rel a (g a)"))
    goal = parse_term(ctx, "exists x:U. rel a x")
    th = metis(ctx, goal, [h])
    assert th.prop == goal


def test_metis_pure_logic_no_lemmas():
    ctx = _zf_free_ctx()
    goal = parse_term(ctx, "(exists x:U. rel x x) \\/ ~(exists x:U. rel x x)")
    th = metis(ctx, goal)
    assert th.prop == goal


def test_metis_run_info_reports_search_numbers():
    ctx = _zf_free_ctx()
    ctx, h = load_axiom(ctx, "h", parse_term(ctx, "rel a b"))
    th, info = run_metis(ctx, parse_term(ctx, "exists x:U. rel a x"), [h])
    assert info.stats["generated"] >= 1
    assert info.certificate.clause.is_empty
    assert problem_sexp(info.problem).startswith("(problem")


def test_metis_false_goal_saturates():
    ctx = Context()
    with pytest.raises(ProofNotFound) as exc:
        metis(ctx, FALSE)
    assert exc.value.outcome == "saturated"


def test_metis_unprovable_goal_raises():
    ctx = _zf_free_ctx()
    with pytest.raises(ProofNotFound):
        metis(ctx, parse_term(ctx, "rel a b"))


def test_metis_limit_reported_as_proof_not_found():
    ctx = _zf_free_ctx()
    ctx, h1 = load_axiom(
        ctx, "h1", parse_term(ctx, "forall x:U. rel x (g x)")
    )
    with pytest.raises(ProofNotFound) as exc:
        run_metis(ctx, parse_term(ctx, "rel a a"), [h1], max_generated=30)
    assert exc.value.outcome in ("limit", "saturated")
    assert "generated" in str(exc.value)


def test_metis_rejects_non_prop_goal():
    ctx = _zf_free_ctx()
    from metis_lcf.kernel import KernelError

    with pytest.raises(KernelError):
        metis(ctx, parse_term(ctx, "g a"))


def test_metis_rejects_foreign_lemma():
    ctx = _zf_free_ctx()
    other = Context()
    other, c = declare_const(other, "zzz", PROP)
    other, lem = load_axiom(other, "lem", c)
    from metis_lcf.kernel import KernelError

    with pytest.raises(KernelError):
        metis(ctx, parse_term(ctx, "rel a a -> rel a a"), [lem])


# --- dumps -----------------------------------------------------------------------


def test_dumps_are_deterministic():
    prob = [
        Clause([Literal(True, "p", (Var(1),))]),
        Clause([Literal(False, "p", (Fn("f", (Fn("c"),)),))]),
    ]
    r1 = prove(prob)
    r2 = prove(list(prob))
    assert isinstance(r1, Refuted) and isinstance(r2, Refuted)
    assert problem_sexp(prob) == problem_sexp(list(prob))
    assert cert_sexp(r1.certificate) == cert_sexp(r2.certificate)
    assert problem_sexp(prob).startswith("(problem (clause (lit true (p 1)))")


def test_cert_sexp_shows_rule_clause_data_children():
    prob = [Clause([Literal(True, "r", ())]), Clause([Literal(False, "r", ())])]
    res = prove(prob)
    s = cert_sexp(res.certificate)
    assert s.startswith("(cert resolve (clause) (lit true (r))")
    assert "(cert axiom (clause (lit true (r))) ()" in s
