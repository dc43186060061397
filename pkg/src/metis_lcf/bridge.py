"""Shuttle clauses between the kernel and the resolution prover.

A clause leaves the kernel as a quantified theorem and arrives at the
prover as a set of integer-variable literals; a ClausePair keeps both
forms plus the correspondence between binder positions and variable ids.
When the prover finds a refutation, the recorded certificate is replayed
here one rule at a time as honest kernel inference, so nothing the prover
computed is ever trusted: every replayed node is re-encoded and compared
against the clause the certificate claims, and the only output is a
Theorem minted by the kernel.

The top-level entry point is metis: negate the goal, clausify it together
with the lemmas in one shared skolem context, run the prover, replay the
certificate to |- false, and discharge the negation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from metis_lcf.cnf import CnfOutput, to_clauses
from metis_lcf.conv import (
    comb_conv,
    conv_rule,
    eq_true_elim,
    rand_conv,
    rator_conv,
    subs_conv,
    try_conv,
)
from metis_lcf.kernel import (
    FALSE,
    PROP,
    UNIVERSE,
    Bound,
    Comb,
    Const,
    Context,
    KernelError,
    Term,
    Theorem,
    alpha_eq,
    dest_all,
    dest_eq,
    dest_implies,
    dest_not,
    dest_or,
    eq_mp,
    fn,
    intro_const,
    is_ancestor,
    lift,
    mk_eq,
    mk_implies,
    mk_not,
    mk_or,
    mp,
    occurs_const,
    reflexive,
    schema_axiom,
    specialize,
    strip_comb,
    type_of,
)
from metis_lcf.kernel import assume as kernel_assume
from metis_lcf.prop import disj_cut, disj_norm_conv, taut, weaken_disj
from metis_lcf.resolution import (
    EQ,
    Certificate,
    Clause,
    Fn,
    Literal,
    Refuted,
    Saturated,
    Subst,
    Var,
    _replace_in_literal,
    _sym_class,
    prove,
    term_sexp,
)

__all__ = [
    "BridgeError",
    "ClausePair",
    "MetisInfo",
    "NodeMismatch",
    "ProofNotFound",
    "SymbolTable",
    "cert_sexp",
    "decode_literal",
    "decode_term",
    "encode_clause",
    "make_clause_pairs",
    "metis",
    "problem_sexp",
    "reconstruct",
    "reconstruct_cleanup",
    "reconstruct_leaf",
    "reconstruct_resolve",
    "reconstruct_subst",
    "run_metis",
]


class BridgeError(Exception):
    """A term or clause could not cross the kernel/prover boundary."""


class NodeMismatch(BridgeError):
    """Replaying a certificate node did not produce its recorded clause."""

    def __init__(self, node: Certificate, message: str):
        self.node = node
        super().__init__(f"{message} at {node!r}")


class ProofNotFound(Exception):
    """The prover stopped without a refutation."""

    def __init__(self, outcome: str, stats: dict, problem: list):
        self.outcome = outcome  # "saturated" or "limit"
        self.stats = dict(stats)
        self.problem = list(problem)
        super().__init__(
            f"{outcome} after {self.stats.get('generated', 0)} generated clauses"
        )


# ---------------------------------------------------------------------------
# Symbol management


class SymbolTable:
    """Two-way map between prover symbols and the kernel constants they
    stand for, functions and predicates kept apart.

    A symbol is the constant's own name, so the map stays a bijection as
    long as every term comes from one context chain.  Prover equality is
    wired directly to kernel equality at U and has no entry.
    """

    def __init__(self):
        self.functions: dict[str, Const] = {}
        self.predicates: dict[str, Const] = {}

    def _intern(self, table: dict, const: Const, arity: int, result) -> str:
        prior = table.get(const.name)
        if prior is not None:
            if prior != const:
                raise BridgeError(f"symbol {const.name} bound to two constants")
            return const.name
        want = fn(*([UNIVERSE] * arity + [result])) if arity else result
        if const.ty != want:
            raise BridgeError(f"constant {const.name} is not first-order here")
        table[const.name] = const
        return const.name

    def function_symbol(self, const: Const, arity: int) -> str:
        return self._intern(self.functions, const, arity, UNIVERSE)

    def predicate_symbol(self, const: Const, arity: int) -> str:
        return self._intern(self.predicates, const, arity, PROP)

    def function(self, symbol: str) -> Const:
        c = self.functions.get(symbol)
        if c is None:
            raise BridgeError(f"unknown function symbol {symbol!r}")
        return c

    def predicate(self, symbol: str) -> Const:
        c = self.predicates.get(symbol)
        if c is None:
            raise BridgeError(f"unknown predicate symbol {symbol!r}")
        return c


# ---------------------------------------------------------------------------
# Clause pairs and the term encoding


@dataclass
class ClausePair:
    """A clause in both worlds at once.

    vars[i] is the prover variable standing for the i-th bound variable of
    thm, whose matrix is a right-nested deduplicated disjunction of
    first-order literals (or bare false for the empty clause).
    """

    vars: list[int]
    thm: Theorem


def _strip_prefix(prop: Term):
    tys = []
    t = prop
    while True:
        d = dest_all(t)
        if d is None:
            return tys, t
        ty, ab = d
        tys.append(ty)
        t = ab.body


def _collect_disjuncts(t: Term, out: list):
    d = dest_or(t)
    if d is None:
        out.append(t)
    else:
        _collect_disjuncts(d[0], out)
        _collect_disjuncts(d[1], out)


def _right_nest(lits: list[Term]) -> Term:
    out = lits[-1]
    for l in reversed(lits[:-1]):
        out = mk_or(l, out)
    return out


def _encode_term(sym: SymbolTable, ids: list[int], depth: int, t: Term):
    if isinstance(t, Bound):
        if t.index >= depth:
            raise BridgeError("bound variable escapes the clause prefix")
        return Var(ids[depth - 1 - t.index])
    head, args = strip_comb(t)
    if not isinstance(head, Const):
        raise BridgeError("term is not first-order")
    symbol = sym.function_symbol(head, len(args))
    return Fn(symbol, tuple(_encode_term(sym, ids, depth, a) for a in args))


def _encode_literal(sym: SymbolTable, ids: list[int], depth: int, t: Term) -> Literal:
    polarity = True
    inner = dest_not(t)
    if inner is not None:
        polarity = False
        t = inner
    e = dest_eq(t)
    if e is not None:
        l, r, ty = e
        if ty != UNIVERSE:
            raise BridgeError("only equality at U crosses the boundary")
        args = (_encode_term(sym, ids, depth, l), _encode_term(sym, ids, depth, r))
        return Literal(polarity, EQ, args)
    head, args = strip_comb(t)
    if not isinstance(head, Const):
        raise BridgeError("literal is not first-order")
    symbol = sym.predicate_symbol(head, len(args))
    return Literal(
        polarity, symbol, tuple(_encode_term(sym, ids, depth, a) for a in args)
    )


def _matrix_literals(sym: SymbolTable, cp: ClausePair) -> list[Literal]:
    """The pair's literals in matrix order (encode_clause sorts them)."""
    tys, matrix = _strip_prefix(cp.thm.prop)
    if len(tys) != len(cp.vars):
        raise BridgeError("variable list out of step with the prefix")
    if any(ty != UNIVERSE for ty in tys):
        raise BridgeError("clause quantifies outside U")
    if matrix == FALSE:
        return []
    disjuncts: list[Term] = []
    _collect_disjuncts(matrix, disjuncts)
    n = len(tys)
    return [_encode_literal(sym, cp.vars, n, d) for d in disjuncts]


def encode_clause(sym: SymbolTable, cp: ClausePair) -> Clause:
    """The prover's view of a clause pair, registering symbols on the way."""
    return Clause(_matrix_literals(sym, cp))


def decode_term(sym: SymbolTable, var_map: dict, t) -> Term:
    if isinstance(t, Var):
        try:
            return var_map[t.id]
        except KeyError:
            raise BridgeError(f"no image for prover variable {t.id}") from None
    out: Term = sym.function(t.symbol)
    for a in t.args:
        out = Comb(out, decode_term(sym, var_map, a))
    return out


def decode_literal(sym: SymbolTable, var_map: dict, lit: Literal) -> Term:
    args = [decode_term(sym, var_map, a) for a in lit.args]
    if lit.pred == EQ:
        atom = mk_eq(args[0], args[1], UNIVERSE)
    else:
        atom = sym.predicate(lit.pred)
        for a in args:
            atom = Comb(atom, a)
    return atom if lit.polarity else mk_not(atom)


def make_clause_pairs(
    cnf: CnfOutput, table: SymbolTable | None = None, fresh=None
) -> tuple[SymbolTable, list[ClausePair]]:
    """Pair every clause theorem with freshly allocated variable ids.

    Pass the same table and counter across several outputs to keep one
    symbol space; ids are then globally distinct as well.
    """
    if table is None:
        table = SymbolTable()
    if fresh is None:
        fresh = itertools.count(1)
    pairs = []
    for ct in cnf.clauses:
        tys, _ = _strip_prefix(ct.thm.prop)
        cp = ClausePair([next(fresh) for _ in tys], ct.thm)
        encode_clause(table, cp)  # registers symbols, validates the shape
        pairs.append(cp)
    return table, pairs


# ---------------------------------------------------------------------------
# Certificate replay


def _first_use_ids(lits) -> list[int]:
    """Variable ids in order of first appearance, literals left to right."""
    seen: list[int] = []
    have = set()
    for lit in lits:
        stack = list(reversed(lit.args))
        while stack:
            t = stack.pop()
            if isinstance(t, Var):
                if t.id not in have:
                    have.add(t.id)
                    seen.append(t.id)
            else:
                stack.extend(reversed(t.args))
    return seen


def _intro_vars(ctx: Context, ids):
    """One fresh constant per prover variable, in the given order."""
    intro = []
    var_map = {}
    for vid in ids:
        ctx, c = intro_const(ctx, "v", UNIVERSE)
        intro.append((vid, c))
        var_map[vid] = c
    return ctx, intro, var_map


def _specialize_all(th: Theorem, terms, ctx: Context) -> Theorem:
    for t in terms:
        th = specialize(th, t, ctx)
    return th


def _repackage(pctx: Context, th: Theorem, intro) -> ClausePair:
    """Normalize the matrix, lift back to the problem context, and keep the
    ids whose constants survived, in introduction (= binder) order."""
    normed = conv_rule(disj_norm_conv(), th)
    if normed is not None:
        th = normed
    ids = [vid for vid, c in intro if occurs_const(th.prop, c)]
    if th.ctx is not pctx:
        th = lift(th, pctx)
    return ClausePair(ids, th)


def _arg_path_conv(t: Term, idxs, base):
    """Aim a conversion at the subterm reached by the given argument path."""
    if not idxs:
        return base
    _, args = strip_comb(t)
    i = idxs[0]
    conv = rand_conv(_arg_path_conv(args[i], idxs[1:], base))
    for _ in range(len(args) - 1 - i):
        conv = rator_conv(conv)
    return conv


def _reconstruct_equality(pctx: Context, sym: SymbolTable, node: Certificate):
    lit, path, s, t = node.data
    with_s = _replace_in_literal(lit, path, s)
    with_t = _replace_in_literal(lit, path, t)
    ids = _first_use_ids([Literal(False, EQ, (s, t)), with_s, with_t])
    cctx, intro, var_map = _intro_vars(pctx, ids)
    d_s = decode_term(sym, var_map, s)
    d_t = decode_term(sym, var_map, t)
    w_s = decode_literal(sym, var_map, with_s)
    w_t = decode_literal(sym, var_map, with_t)
    th_eq = kernel_assume(cctx, mk_eq(d_s, d_t, UNIVERSE))
    th_ws = kernel_assume(th_eq.ctx, w_s)
    conv = _arg_path_conv(
        w_s if with_s.polarity else dest_not(w_s), list(path), subs_conv(th_eq)
    )
    if not with_s.polarity:
        conv = rand_conv(conv)
    r = conv(th_ws.ctx, w_s)
    if r is None or not alpha_eq(dest_eq(r.prop)[1], w_t):
        raise NodeMismatch(node, "rewrite did not land on the recorded literal")
    imp = lift(eq_mp(r, th_ws), cctx)  # |- (s = t) -> L[s] -> L[t]
    target = _right_nest([decode_literal(sym, var_map, l) for l in node.clause])
    th = eq_mp(taut(cctx, mk_eq(imp.prop, target, PROP)), imp)
    return _repackage(pctx, th, intro)


def reconstruct_leaf(
    pctx: Context, sym: SymbolTable, node: Certificate, inputs_by_clause=None
) -> ClausePair:
    """Replay a childless certificate node.

    Axiom nodes are looked up among the problem's clause pairs; the other
    leaves are proved from scratch over fresh constants.
    """
    rule = node.rule
    if rule == "axiom":
        cp = (inputs_by_clause or {}).get(node.clause)
        if cp is None:
            raise NodeMismatch(node, "axiom clause is not one of the inputs")
        return cp
    if rule == "assume":
        lit = node.data
        atom_lit = lit if lit.polarity else lit.negate()
        cctx, intro, var_map = _intro_vars(pctx, _first_use_ids([atom_lit]))
        atom = decode_literal(sym, var_map, atom_lit)
        th = specialize(schema_axiom(cctx, "lem"), atom, cctx)
        return _repackage(pctx, th, intro)
    if rule == "refl":
        t = node.data
        cctx, intro, var_map = _intro_vars(
            pctx, _first_use_ids([Literal(True, EQ, (t, t))])
        )
        th = reflexive(cctx, decode_term(sym, var_map, t))
        return _repackage(pctx, th, intro)
    if rule == "equality":
        return _reconstruct_equality(pctx, sym, node)
    raise BridgeError(f"not a leaf rule: {rule!r}")


def reconstruct_subst(
    pctx: Context, sym: SymbolTable, cp: ClausePair, theta: Subst
) -> ClausePair:
    """Replay a substitution: fresh constants for every variable of the
    substituted clause, binders hit by theta get their decoded images."""
    sub_lits = [theta.literal(l) for l in _matrix_literals(sym, cp)]
    cctx, intro, var_map = _intro_vars(pctx, _first_use_ids(sub_lits))
    images = []
    for vid in cp.vars:
        img = theta.map.get(vid)
        if img is None:
            if vid not in var_map:
                raise BridgeError(f"variable {vid} vanished without an image")
            images.append(var_map[vid])
        else:
            images.append(decode_term(sym, var_map, img))
    th = _specialize_all(cp.thm, images, cctx)
    return _repackage(pctx, th, intro)


def _move_last(th: Theorem, d: Term) -> Theorem:
    """Rearrange a disjunction so d is the top-level right operand, the
    shape disj_cut consumes."""
    lits: list[Term] = []
    _collect_disjuncts(th.prop, lits)
    if d not in lits:
        raise BridgeError("resolved literal is missing from a premise")
    rest = [x for x in lits if x != d]
    target = mk_or(_right_nest(rest), d) if rest else d
    return weaken_disj(th, target) if th.prop != target else th


def reconstruct_resolve(
    pctx: Context, sym: SymbolTable, a: ClausePair, b: ClausePair, lit: Literal
) -> ClausePair:
    """Replay a resolution step on lit; a holds lit, b its complement, and a
    variable id appearing in both pairs names the same variable."""
    cctx, intro_a, var_map = _intro_vars(pctx, a.vars)
    cctx, intro_b, extra = _intro_vars(cctx, [v for v in b.vars if v not in var_map])
    var_map.update(extra)
    tha = _specialize_all(a.thm, [var_map[v] for v in a.vars], cctx)
    thb = _specialize_all(b.thm, [var_map[v] for v in b.vars], cctx)
    pos = lit if lit.polarity else lit.negate()
    cut_lit = decode_literal(sym, var_map, pos)
    th_pos, th_neg = (tha, thb) if lit.polarity else (thb, tha)
    th = disj_cut(
        _move_last(th_pos, cut_lit), _move_last(th_neg, mk_not(cut_lit)), cut_lit
    )
    return _repackage(pctx, th, intro_a + intro_b)


def reconstruct_cleanup(
    pctx: Context, sym: SymbolTable, rule: str, cp: ClausePair
) -> ClausePair:
    """Replay remove_sym or irreflexive on a reconstructed child."""
    if rule == "remove_sym":
        return _cleanup_sym(pctx, sym, cp)
    if rule == "irreflexive":
        return _cleanup_irreflexive(pctx, sym, cp)
    raise BridgeError(f"not a cleanup rule: {rule!r}")


def _each_disjunct_conv(c):
    """Apply a conversion to every disjunct of a right-nested matrix,
    leaving disjuncts it fails on unchanged."""

    def conv(ctx, t):
        if dest_or(t) is not None:
            return comb_conv(rand_conv(try_conv(c)), conv)(ctx, t)
        return try_conv(c)(ctx, t)

    return conv


def _cleanup_sym(pctx: Context, sym: SymbolTable, cp: ClausePair) -> ClausePair:
    lits = _matrix_literals(sym, cp)
    first: dict = {}
    flips = []
    for lit in lits:
        if not lit.is_eq:
            continue
        cls = _sym_class(lit)
        kept = first.setdefault(cls, lit)
        if kept != lit:
            flips.append(lit)
    cctx, intro, var_map = _intro_vars(pctx, cp.vars)
    th = _specialize_all(cp.thm, [var_map[v] for v in cp.vars], cctx)
    if flips:
        convs = []
        for lit in flips:
            u = decode_term(sym, var_map, lit.args[0])
            v = decode_term(sym, var_map, lit.args[1])
            eqth = schema_axiom(cctx, "eq_sym", (UNIVERSE,))
            eqth = specialize(specialize(eqth, u, cctx), v, cctx)
            convs.append(subs_conv(eqth))

        def flip(ctx, t):
            for c in convs:
                r = c(ctx, t)
                if r is not None:
                    return r
            return None

        def lit_conv(ctx, t):
            inner = dest_not(t)
            if inner is not None:
                return rand_conv(flip)(ctx, t)
            return flip(ctx, t)

        r = _each_disjunct_conv(lit_conv)(cctx, th.prop)
        if r is not None:
            th = eq_mp(r, th)
    return _repackage(pctx, th, intro)


def _refl_neq(t: Term):
    """The witness u when t is ~(u = u), else None."""
    inner = dest_not(t)
    if inner is None:
        return None
    e = dest_eq(inner)
    if e is None or e[2] != UNIVERSE or e[0] != e[1]:
        return None
    return e[0]


def _cleanup_irreflexive(pctx: Context, sym: SymbolTable, cp: ClausePair) -> ClausePair:
    cctx, intro, var_map = _intro_vars(pctx, cp.vars)
    th = _specialize_all(cp.thm, [var_map[v] for v in cp.vars], cctx)
    while th.prop != FALSE:
        lits: list[Term] = []
        _collect_disjuncts(th.prop, lits)
        hit = next((d for d in lits if _refl_neq(d) is not None), None)
        if hit is None:
            break
        u = _refl_neq(hit)
        th = _move_last(th, hit)
        th = disj_cut(reflexive(cctx, u), th, mk_eq(u, u, UNIVERSE))
    return _repackage(pctx, th, intro)


def reconstruct(
    ctx: Context, sym: SymbolTable, inputs, cert: Certificate
) -> Theorem:
    """Replay a whole certificate bottom-up and return the root theorem.

    Every replayed node is re-encoded and compared with the clause the
    certificate records for it; any disagreement, or any kernel rejection
    along the way, raises NodeMismatch naming the offending node.  For a
    refutation certificate the result is |- false in (an ancestor of) ctx.
    """
    by_clause: dict = {}
    for cp in inputs:
        by_clause.setdefault(encode_clause(sym, cp), cp)
    memo: dict[int, ClausePair] = {}
    stack = [cert]
    while stack:
        node = stack[-1]
        if id(node) in memo:
            stack.pop()
            continue
        pending = [ch for ch in node.children if id(ch) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        kids = [memo[id(ch)] for ch in node.children]
        try:
            rule = node.rule
            if rule in ("axiom", "assume", "refl", "equality"):
                cp = reconstruct_leaf(ctx, sym, node, by_clause)
            elif rule in ("remove_sym", "irreflexive"):
                cp = reconstruct_cleanup(ctx, sym, rule, kids[0])
            elif rule == "subst":
                cp = reconstruct_subst(ctx, sym, kids[0], node.data)
            elif rule == "resolve":
                cp = reconstruct_resolve(ctx, sym, kids[0], kids[1], node.data)
            else:
                raise BridgeError(f"unknown rule {rule!r}")
        except NodeMismatch:
            raise
        except (BridgeError, KernelError, ValueError, IndexError, KeyError) as e:
            raise NodeMismatch(node, f"replay failed: {e}") from e
        if encode_clause(sym, cp) != node.clause:
            raise NodeMismatch(node, "reconstructed clause differs")
        memo[id(node)] = cp
    return memo[id(cert)].thm


# ---------------------------------------------------------------------------
# The metis entry point


@dataclass
class MetisInfo:
    """What a metis run did, kept for dumping and reporting."""

    problem: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    certificate: Certificate | None = None


def run_metis(
    ctx: Context,
    goal: Term,
    lemmas=(),
    max_generated: int = 200000,
    max_weight=None,
) -> tuple[Theorem, MetisInfo]:
    """Prove goal from lemma theorems by refutation.

    The negated goal and every lemma are clausified into one shared skolem
    context so all clauses speak the same symbol language.  On success the
    certificate is replayed to |- false, the clausification assumptions are
    discharged, and the double negation is eliminated; the result is
    |- goal in ctx itself.
    """
    if type_of(ctx, goal) != PROP:
        raise KernelError("goal must be a proposition")
    lemmas = list(lemmas)
    for th in lemmas:
        if not is_ancestor(th.ctx, ctx):
            raise KernelError("lemma does not hold in this context")

    work = ctx
    outputs = []
    for th in lemmas:
        out = to_clauses(work, th.prop)
        outputs.append(out)
        work = out.final_ctx
    neg = mk_not(goal)
    out = to_clauses(work, neg)
    outputs.append(out)
    work = out.final_ctx

    table = SymbolTable()
    fresh = itertools.count(1)
    pairs: list[ClausePair] = []
    for o in outputs:
        pairs.extend(make_clause_pairs(o, table, fresh)[1])
    problem = [encode_clause(table, cp) for cp in pairs]

    result = prove(problem, max_generated=max_generated, max_weight=max_weight)
    if not isinstance(result, Refuted):
        outcome = "saturated" if isinstance(result, Saturated) else "limit"
        raise ProofNotFound(outcome, result.stats, problem)

    bottom = reconstruct(work, table, pairs, result.certificate)
    th = lift(bottom, ctx) if bottom.ctx is not ctx else bottom
    for lem in lemmas:
        d = dest_implies(th.prop)
        if d is not None and alpha_eq(d[0], lem.prop):
            th = mp(th, lem)
    if th.prop == FALSE:
        # contradictory lemmas prove anything; restate as ~goal -> false
        step = schema_axiom(ctx, "false_implies")
        step = specialize(step, mk_implies(neg, FALSE), ctx)
        th = mp(eq_true_elim(step), th)
    nn = eq_mp(specialize(schema_axiom(ctx, "implies_false"), neg, ctx), th)
    final = eq_mp(specialize(schema_axiom(ctx, "not_not"), goal, ctx), nn)
    if not alpha_eq(final.prop, goal) or final.ctx is not ctx:
        raise BridgeError("reconstruction lost the goal")
    return final, MetisInfo(problem, dict(result.stats), result.certificate)


def metis(
    ctx: Context,
    goal: Term,
    lemmas=(),
    max_generated: int = 200000,
    max_weight=None,
) -> Theorem:
    """run_metis without the run report."""
    return run_metis(ctx, goal, lemmas, max_generated, max_weight)[0]


# ---------------------------------------------------------------------------
# Dump formats


def _lit_sexp(lit: Literal) -> str:
    tag = "true" if lit.polarity else "false"
    inner = " ".join([str(lit.pred)] + [term_sexp(a) for a in lit.args])
    return f"(lit {tag} ({inner}))"


def _clause_sexp(clause: Clause) -> str:
    inner = " ".join(_lit_sexp(l) for l in clause)
    return f"(clause {inner})" if inner else "(clause)"


def problem_sexp(problem) -> str:
    """One line for a whole problem: (problem (clause ...) ...)."""
    inner = " ".join(_clause_sexp(c) for c in problem)
    return f"(problem {inner})" if inner else "(problem)"


def _data_sexp(node: Certificate) -> str:
    rule = node.rule
    if rule == "assume":
        return _lit_sexp(node.data)
    if rule == "refl":
        return term_sexp(node.data)
    if rule == "equality":
        lit, path, s, t = node.data
        path_s = " ".join(map(str, path))
        return f"({_lit_sexp(lit)} ({path_s}) {term_sexp(s)} {term_sexp(t)})"
    if rule == "subst":
        inner = " ".join(f"({k} {term_sexp(v)})" for k, v in node.data.items())
        return f"({inner})"
    if rule == "resolve":
        return _lit_sexp(node.data)
    return "()"


def cert_sexp(cert: Certificate) -> str:
    """Serialize a certificate as (cert <rule> <clause> <data> <children>)."""
    memo: dict[int, str] = {}
    stack = [cert]
    while stack:
        node = stack[-1]
        if id(node) in memo:
            stack.pop()
            continue
        pending = [ch for ch in node.children if id(ch) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        parts = ["cert", node.rule, _clause_sexp(node.clause), _data_sexp(node)]
        parts.extend(memo[id(ch)] for ch in node.children)
        memo[id(node)] = "(" + " ".join(parts) + ")"
    return memo[id(cert)]
