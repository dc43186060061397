"""Saturation prover over untyped first-order clauses with recorded proofs.

The data model here is deliberately independent of the theorem-proving
kernel: variables are integers, function and predicate symbols are opaque
(any hashable, mutually orderable values; strings in practice), literals are
signed predicate applications, and a clause is a duplicate-free tuple of
literals kept in a fixed total order so that it behaves like a set.

Every clause the prover derives carries a certificate: a tree over eight
recordable rules (axiom, assume, refl, equality, remove_sym, irreflexive,
subst, resolve).  ``check_certificate`` replays the side condition of every
node from scratch, so a certificate can be validated without trusting the
search that produced it.

The search is a given-clause loop.  Passive clauses are ranked by
(symbol count, insertion sequence) and the lightest is activated next;
inferences are generated against the active set in a fixed order: binary
resolution, factoring, paramodulation from positive equalities, equality
symmetry through an inline reflexivity leaf, reflexivity deletion, and
symmetric-duplicate cleanup.  All containers iterate in insertion or
canonical order, fresh variable ids come from a per-run counter, and every
stored clause is a canonically renamed variant of itself.  Together these
make runs deterministic and renaming invariant: renaming the input problem
changes leaf payloads and substitution data, never the tree shape or the
rule sequence.
"""

from __future__ import annotations

import collections
import heapq
import itertools
from dataclasses import dataclass

EQ = "="


@dataclass(frozen=True)
class Var:
    """A first-order variable, identified by an integer."""

    id: int

    def __repr__(self):
        return f"_{self.id}"


class Fn:
    """A function application; a constant is an Fn with no arguments.

    Derived terms can nest thousands of levels deep, so equality, hashing
    and printing are all non-recursive: the hash is combined from the
    children's cached hashes at construction time and comparisons walk an
    explicit stack."""

    __slots__ = ("symbol", "args", "_hash")

    def __init__(self, symbol, args=()):
        self.symbol = symbol
        self.args = tuple(args)
        self._hash = hash((symbol, self.args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Fn):
            return False
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if isinstance(a, Var) or isinstance(b, Var):
                if type(a) is not type(b) or a.id != b.id:
                    return False
                continue
            if (
                a._hash != b._hash
                or a.symbol != b.symbol
                or len(a.args) != len(b.args)
            ):
                return False
            stack.extend(zip(a.args, b.args))
        return True

    def __repr__(self):
        out = []
        stack = [self]
        while stack:
            u = stack.pop()
            if u is _RPAR:
                out.append(")")
            elif u is _COMMA:
                out.append(", ")
            elif isinstance(u, Var):
                out.append(repr(u))
            elif not u.args:
                out.append(str(u.symbol))
            else:
                out.append(f"{u.symbol}(")
                stack.append(_RPAR)
                rev = u.args[::-1]
                for i, a in enumerate(rev):
                    stack.append(a)
                    if i < len(rev) - 1:
                        stack.append(_COMMA)
        return "".join(out)


_RPAR = object()
_COMMA = object()
_CLOSE = object()


def term_size(t):
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, Fn):
            stack.extend(u.args)
    return n


def term_vars(t):
    """Variable ids of a term, in left-to-right first-occurrence order."""
    out = []
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u.id not in seen:
                seen.add(u.id)
                out.append(u.id)
        else:
            stack.extend(reversed(u.args))
    return out


def _term_key(t):
    """Flat structural key: the term serialized to a token sequence.  Kept
    flat so that comparing or hashing keys of very deep terms never recurses.
    Variables order before applications; a close marker after each
    application's arguments keeps the encoding unambiguous."""
    toks = []
    stack = [t]
    while stack:
        u = stack.pop()
        if u is _CLOSE:
            toks.append((2,))
        elif isinstance(u, Var):
            toks.append((0, u.id))
        else:
            toks.append((1, u.symbol))
            stack.append(_CLOSE)
            stack.extend(reversed(u.args))
    return tuple(toks)


@dataclass(frozen=True)
class Literal:
    """A signed atom: predicate symbol applied to terms, with a polarity."""

    polarity: bool
    pred: object
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def negate(self):
        return Literal(not self.polarity, self.pred, self.args)

    @property
    def is_eq(self):
        return self.pred == EQ and len(self.args) == 2

    def __repr__(self):
        sign = "" if self.polarity else "~"
        if not self.args:
            return f"{sign}{self.pred}"
        return f"{sign}{self.pred}({', '.join(map(repr, self.args))})"


def _literal_key(lit):
    return (lit.polarity, lit.pred, tuple(_term_key(a) for a in lit.args))


class Clause:
    """A set of literals, stored as a sorted duplicate-free tuple.

    The order is total: polarity first (negative before positive), then
    predicate symbol, then argument structure.  Two clauses are equal
    exactly when they contain the same literals.
    """

    __slots__ = ("literals", "_set", "_hash")

    def __init__(self, literals=()):
        lits = []
        seen = set()
        for lit in literals:
            if lit not in seen:
                seen.add(lit)
                lits.append(lit)
        lits.sort(key=_literal_key)
        self.literals = tuple(lits)
        self._set = frozenset(lits)
        self._hash = hash(self._set)

    def __eq__(self, other):
        return isinstance(other, Clause) and self._set == other._set

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __contains__(self, lit):
        return lit in self._set

    def __repr__(self):
        if not self.literals:
            return "{}"
        return "{" + ", ".join(map(repr, self.literals)) + "}"

    @property
    def is_empty(self):
        return not self.literals


def clause_vars(clause):
    """Variable ids of a clause, in first-occurrence order."""
    out = []
    seen = set()
    for lit in clause:
        for a in lit.args:
            for v in term_vars(a):
                if v not in seen:
                    seen.add(v)
                    out.append(v)
    return out


def weight(clause):
    """Symbol-count weight: every predicate, function and variable counts 1."""
    return sum(1 + sum(term_size(a) for a in lit.args) for lit in clause)


def is_tautology(clause):
    return any(lit.negate() in clause for lit in clause)


def _map_term(t, m):
    """Replace variables by their images, bottom up with an explicit stack
    so that term depth never hits the interpreter recursion limit."""
    out = []
    stack = [(t, False)]
    while stack:
        u, done = stack.pop()
        if done:
            args = tuple(out[-len(u.args) :])
            del out[-len(u.args) :]
            out.append(Fn(u.symbol, args))
        elif isinstance(u, Var):
            out.append(m.get(u.id, u))
        elif not u.args:
            out.append(u)
        else:
            stack.append((u, True))
            for a in reversed(u.args):
                stack.append((a, False))
    return out[0]


class Subst:
    """An idempotent substitution: a map from variable ids to terms.

    Bindings of a variable to itself are dropped; a mapping whose range
    mentions one of its own bound variables is rejected, since applying it
    twice would differ from applying it once.
    """

    __slots__ = ("map",)

    def __init__(self, mapping=()):
        m = {}
        for k, v in dict(mapping).items():
            if v != Var(k):
                m[k] = v
        for v in m.values():
            if any(u in m for u in term_vars(v)):
                raise ValueError("substitution must be idempotent")
        self.map = m

    def term(self, t):
        if isinstance(t, Var):
            return self.map.get(t.id, t)
        if not self.map:
            return t
        return _map_term(t, self.map)

    def literal(self, lit):
        if not self.map:
            return lit
        return Literal(lit.polarity, lit.pred, tuple(self.term(a) for a in lit.args))

    def clause(self, c):
        return Clause(self.literal(lit) for lit in c)

    def items(self):
        return sorted(self.map.items())

    def __bool__(self):
        return bool(self.map)

    def __eq__(self, other):
        return isinstance(other, Subst) and self.map == other.map

    def __repr__(self):
        inner = ", ".join(f"_{k} -> {v!r}" for k, v in self.items())
        return "{" + inner + "}"


def apply_subst(theta, clause):
    """Apply a substitution to a clause; merged literals collapse (set view)."""
    return theta.clause(clause)


def _walk(t, bind):
    while isinstance(t, Var) and t.id in bind:
        t = bind[t.id]
    return t


def _occurs(vid, t, bind):
    stack = [t]
    while stack:
        u = _walk(stack.pop(), bind)
        if isinstance(u, Var):
            if u.id == vid:
                return True
        else:
            stack.extend(u.args)
    return False


def _resolve_term(t, bind):
    out = []
    stack = [(t, False)]
    while stack:
        u, done = stack.pop()
        if done:
            args = tuple(out[-len(u.args) :])
            del out[-len(u.args) :]
            out.append(Fn(u.symbol, args))
            continue
        u = _walk(u, bind)
        if isinstance(u, Var) or not u.args:
            out.append(u)
        else:
            stack.append((u, True))
            for a in reversed(u.args):
                stack.append((a, False))
    return out[0]


def unify(t1, t2, subst=None):
    """Most general unifier of two terms, or None.

    Robinson unification with an occurs check.  The result is idempotent.
    An optional starting substitution lets callers unify argument lists by
    folding.
    """
    bind = dict(subst.map) if subst is not None else {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, bind)
        b = _walk(b, bind)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a.id, b, bind):
                return None
            bind[a.id] = b
        elif isinstance(b, Var):
            if _occurs(b.id, a, bind):
                return None
            bind[b.id] = a
        else:
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                return None
            stack.extend(reversed(list(zip(a.args, b.args))))
    return Subst({k: _resolve_term(v, bind) for k, v in bind.items()})


def _unify_args(args1, args2, subst=None):
    if len(args1) != len(args2):
        return None
    s = subst if subst is not None else Subst()
    for a, b in zip(args1, args2):
        s = unify(a, b, s)
        if s is None:
            return None
    return s


# --- certificates -----------------------------------------------------------

_RULES = (
    "axiom",
    "assume",
    "refl",
    "equality",
    "remove_sym",
    "irreflexive",
    "subst",
    "resolve",
)


class Certificate:
    """One node of a recorded proof: a rule, its conclusion clause, child
    nodes, and any rule-specific data.  Shared subtrees are fine; replay
    treats the structure as a DAG."""

    __slots__ = ("rule", "clause", "children", "data")

    def __init__(self, rule, clause, children=(), data=None):
        self.rule = rule
        self.clause = clause
        self.children = tuple(children)
        self.data = data

    def __repr__(self):
        return f"<{self.rule}: {self.clause!r}>"


def axiom(clause):
    return Certificate("axiom", clause)


def assume(lit):
    """Leaf concluding the excluded-middle clause for one literal."""
    return Certificate("assume", Clause([lit, lit.negate()]), data=lit)


def refl(x):
    """Leaf concluding that a term equals itself."""
    return Certificate("refl", Clause([Literal(True, EQ, (x, x))]), data=x)


def _subterm(lit, path):
    if not path:
        raise ValueError("empty path")
    t = lit.args[path[0]]
    for i in path[1:]:
        t = t.args[i]
    return t


def _replace_term(t, path, new):
    spine = []
    for i in path:
        spine.append((t, i))
        t = t.args[i]
    for t, i in reversed(spine):
        new = Fn(t.symbol, t.args[:i] + (new,) + t.args[i + 1 :])
    return new


def _replace_in_literal(lit, path, new):
    i = path[0]
    args = lit.args[:i] + (_replace_term(lit.args[i], path[1:], new),) + lit.args[i + 1 :]
    return Literal(lit.polarity, lit.pred, args)


def equality(lit, path, s, t):
    """Leaf for one rewrite step: if s = t, the literal with s at the given
    path implies the literal with t there.  Recorded as the three-literal
    clause that says exactly that."""
    with_s = _replace_in_literal(lit, path, s)
    with_t = _replace_in_literal(lit, path, t)
    clause = Clause([Literal(False, EQ, (s, t)), with_s.negate(), with_t])
    return Certificate("equality", clause, data=(lit, tuple(path), s, t))


def _sym_class(lit):
    a, b = lit.args
    ka, kb = _term_key(a), _term_key(b)
    return (lit.polarity, min(ka, kb), max(ka, kb))


def _remove_sym_clause(clause):
    keep = []
    seen = set()
    for lit in clause:
        if lit.is_eq:
            cls = _sym_class(lit)
            if cls in seen:
                continue
            seen.add(cls)
        keep.append(lit)
    return Clause(keep)


def remove_sym(child):
    """Drop equality literals that duplicate an earlier one up to symmetry."""
    return Certificate("remove_sym", _remove_sym_clause(child.clause), (child,))


def _is_refl_neq(lit):
    return (not lit.polarity) and lit.is_eq and lit.args[0] == lit.args[1]


def irreflexive(child):
    """Drop literals asserting that a term differs from itself."""
    clause = Clause(l for l in child.clause if not _is_refl_neq(l))
    return Certificate("irreflexive", clause, (child,))


def substitute(theta, child):
    return Certificate("subst", theta.clause(child.clause), (child,), data=theta)


def resolve(lit, pos, neg):
    """Resolve two proofs on a literal: the first child must contain it, the
    second its negation; both are removed from the union."""
    nlit = lit.negate()
    if lit not in pos.clause:
        raise ValueError("left premise does not contain the resolved literal")
    if nlit not in neg.clause:
        raise ValueError("right premise does not contain the negated literal")
    keep = [l for l in pos.clause if l != lit and l != nlit]
    keep += [l for l in neg.clause if l != lit and l != nlit]
    return Certificate("resolve", Clause(keep), (pos, neg), data=lit)


@dataclass
class RuleViolation:
    node: Certificate
    reason: str


def _check_node(problem, node):
    cl = node.clause
    kids = node.children

    def bad(reason):
        return RuleViolation(node, reason)

    if not isinstance(cl, Clause):
        return bad("conclusion is not a clause")
    rule = node.rule
    if rule in ("axiom", "assume", "refl", "equality"):
        if kids:
            return bad(f"{rule} must be a leaf")
    if rule == "axiom":
        if cl not in problem:
            return bad("axiom clause is not part of the problem")
    elif rule == "assume":
        lit = node.data
        if not isinstance(lit, Literal):
            return bad("assume data must be a literal")
        if cl != Clause([lit, lit.negate()]):
            return bad("assume clause must pair the literal with its negation")
    elif rule == "refl":
        x = node.data
        if not isinstance(x, (Var, Fn)):
            return bad("refl data must be a term")
        if cl != Clause([Literal(True, EQ, (x, x))]):
            return bad("refl clause must equate the term with itself")
    elif rule == "equality":
        data = node.data
        if not (isinstance(data, tuple) and len(data) == 4):
            return bad("equality data must be (literal, path, s, t)")
        lit, path, s, t = data
        if not isinstance(lit, Literal):
            return bad("equality data must hold a literal")
        try:
            with_s = _replace_in_literal(lit, path, s)
            with_t = _replace_in_literal(lit, path, t)
        except (IndexError, ValueError, TypeError, AttributeError):
            return bad("equality path does not address a subterm")
        expected = Clause([Literal(False, EQ, (s, t)), with_s.negate(), with_t])
        if cl != expected:
            return bad("equality clause does not match its rewrite data")
    elif rule == "remove_sym":
        if len(kids) != 1:
            return bad("remove_sym needs exactly one premise")
        if cl != _remove_sym_clause(kids[0].clause):
            return bad("remove_sym clause is not the symmetry-deduplicated premise")
    elif rule == "irreflexive":
        if len(kids) != 1:
            return bad("irreflexive needs exactly one premise")
        if cl != Clause(l for l in kids[0].clause if not _is_refl_neq(l)):
            return bad("irreflexive clause must drop exactly the x != x literals")
    elif rule == "subst":
        if len(kids) != 1:
            return bad("subst needs exactly one premise")
        theta = node.data
        if not isinstance(theta, Subst):
            return bad("subst data must be a substitution")
        if cl != theta.clause(kids[0].clause):
            return bad("subst clause is not the instantiated premise")
    elif rule == "resolve":
        if len(kids) != 2:
            return bad("resolve needs exactly two premises")
        lit = node.data
        if not isinstance(lit, Literal):
            return bad("resolve data must be a literal")
        nlit = lit.negate()
        if lit not in kids[0].clause:
            return bad("left premise does not contain the resolved literal")
        if nlit not in kids[1].clause:
            return bad("right premise does not contain the negated literal")
        keep = [l for l in kids[0].clause if l != lit and l != nlit]
        keep += [l for l in kids[1].clause if l != lit and l != nlit]
        if cl != Clause(keep):
            return bad("resolve clause is not the union minus the resolved pair")
    else:
        return bad(f"unknown rule {rule!r}")
    return None


def check_certificate(problem, cert):
    """Replay a certificate against a problem.

    Returns None when every node satisfies its rule's side condition, or a
    RuleViolation naming the first offending node (children before parents,
    left to right).
    """
    problem = set(problem)
    done = set()
    in_progress = set()
    stack = [(cert, False)]
    while stack:
        node, expanded = stack.pop()
        if not isinstance(node, Certificate):
            return RuleViolation(node, "not a certificate node")
        if id(node) in done:
            continue
        if expanded:
            in_progress.discard(id(node))
            violation = _check_node(problem, node)
            if violation is not None:
                return violation
            done.add(id(node))
            continue
        if id(node) in in_progress:
            return RuleViolation(node, "certificate is cyclic")
        in_progress.add(id(node))
        stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return None


# --- canonical clause variants ----------------------------------------------

# Exhaustive minimisation is exponential in tied literals; the search gets a
# node budget and falls back to a greedy first-occurrence numbering, which is
# still stable under renaming because it never looks at variable ids.
_CANON_NODE_LIMIT = 4096


class _CanonBudget(Exception):
    pass


def _pattern_key(lit, assigned):
    """Sort key for a literal with variables numbered by first occurrence,
    continuing from an existing partial numbering.  Returns the key and the
    newly numbered variable ids in order of appearance.  Same flat token
    layout as the structural key, with numbers in place of variable ids."""
    new = []
    local = {}
    arg_keys = []
    for arg in lit.args:
        toks = []
        stack = [arg]
        while stack:
            u = stack.pop()
            if u is _CLOSE:
                toks.append((2,))
            elif isinstance(u, Var):
                n = assigned.get(u.id)
                if n is None:
                    n = local.get(u.id)
                    if n is None:
                        n = len(assigned) + len(local) + 1
                        local[u.id] = n
                        new.append(u.id)
                toks.append((0, n))
            else:
                toks.append((1, u.symbol))
                stack.append(_CLOSE)
                stack.extend(reversed(u.args))
        arg_keys.append(tuple(toks))
    return (lit.polarity, lit.pred, tuple(arg_keys)), new


def _greedy_order(lits):
    """Single-path variant of the canonical ordering: always take the first
    literal with the minimal pattern key.  Used when the exact search blows
    its budget; cheaper, and still blind to variable ids."""
    remaining = list(lits)
    assigned = {}
    keys = []
    chosen = []
    vorder = []
    while remaining:
        pick = None
        for i, lit in enumerate(remaining):
            key, new = _pattern_key(lit, assigned)
            if pick is None or key < pick[0]:
                pick = (key, i, new)
        key, i, new = pick
        for vid in new:
            assigned[vid] = len(assigned) + 1
        keys.append(key)
        chosen.append(remaining.pop(i))
        vorder.extend(new)
    return chosen, vorder, tuple(keys)


def _canonical_order(lits):
    """Arrange literals so that renaming a clause apart cannot change the
    arrangement: choose the variable numbering that minimises the pattern
    key sequence.  Returns (ordered literals, variable ids in the order the
    chosen numbering assigns them, key sequence)."""
    lits = list(dict.fromkeys(lits))
    if not any(term_vars(a) for lit in lits for a in lit.args):
        ordered = sorted(lits, key=_literal_key)
        return ordered, [], tuple(_pattern_key(l, {})[0] for l in ordered)
    if len(lits) > 200:
        # the exact search recurses once per literal; keep huge clauses on
        # the loop-based path
        return _greedy_order(lits)

    # a variable confined to one literal can be swapped with its counterpart
    # in any pattern-equal sibling, so exploring one such sibling is enough
    occ = {}
    for lit in lits:
        seen_here = set()
        for a in lit.args:
            seen_here.update(term_vars(a))
        for v in seen_here:
            occ[v] = occ.get(v, 0) + 1

    best = None
    nodes = 0

    def rec(remaining, assigned, keys, chosen, vorder):
        nonlocal best, nodes
        nodes += 1
        if nodes > _CANON_NODE_LIMIT:
            raise _CanonBudget
        if best is not None:
            kt = tuple(keys)
            if kt > best[0][: len(kt)]:
                return
        if not remaining:
            cand = (tuple(keys), tuple(chosen), tuple(vorder))
            if best is None or cand[0] < best[0]:
                best = cand
            return
        scored = []
        for i, lit in enumerate(remaining):
            key, new = _pattern_key(lit, assigned)
            scored.append((key, i, new))
        mn = min(s[0] for s in scored)
        took_private = False
        for key, i, new in scored:
            if key != mn:
                continue
            if new and all(occ[v] == 1 for v in new):
                if took_private:
                    continue
                took_private = True
            a2 = dict(assigned)
            for vid in new:
                a2[vid] = len(a2) + 1
            rec(
                remaining[:i] + remaining[i + 1 :],
                a2,
                keys + [key],
                chosen + [remaining[i]],
                vorder + new,
            )

    try:
        rec(lits, {}, [], [], [])
    except _CanonBudget:
        return _greedy_order(lits)
    return list(best[1]), list(best[2]), best[0]


def _normalize(lits, fresh):
    """Canonical variant of a literal set with brand-new variable ids.

    Returns (clause, renaming, pattern key).  The pattern key identifies the
    clause up to renaming, so it doubles as the variant-subsumption key.
    """
    ordered, vorder, keys = _canonical_order(lits)
    nu = Subst({v: Var(next(fresh)) for v in vorder})
    return Clause(nu.literal(l) for l in ordered), nu, keys


def _pattern_of(clause):
    return _canonical_order(list(clause))[2]


# --- inference generation ----------------------------------------------------


def _compose(vids, *substs):
    """The substitution sending each listed variable through the given
    substitutions in order; identity bindings drop out."""
    m = {}
    for v in vids:
        t = Var(v)
        for s in substs:
            t = s.term(t)
        m[v] = t
    return Subst(m)


def _wrap(cert, vids, *substs):
    """Attach a subst node carrying the composed substitution.  Ground
    premises are passed through untouched so their proofs stay bare."""
    if not vids:
        return cert
    return substitute(_compose(vids, *substs), cert)


class _Entry:
    """A parent clause prepared for pairing: its stored form, certificate,
    rename-apart substitution, and renamed literals."""

    __slots__ = ("clause", "cert", "vids", "sigma", "lits")

    def __init__(self, clause, cert, sigma):
        self.clause = clause
        self.cert = cert
        self.vids = clause_vars(clause)
        self.sigma = sigma
        self.lits = [sigma.literal(l) for l in clause.literals]


def _paths(lit):
    """Function-headed subterm positions of a literal, preorder.  A path is
    an argument index followed by indices into nested applications.
    Variable positions are skipped: rewriting below a variable is never
    needed, instantiation covers it."""
    out = []
    stack = [((k,), a) for k, a in reversed(list(enumerate(lit.args)))]
    while stack:
        prefix, t = stack.pop()
        if isinstance(t, Fn):
            out.append((prefix, t))
            for i in range(len(t.args) - 1, -1, -1):
                stack.append((prefix + (i,), t.args[i]))
    return out


def _extend_over(nu, lit_lists, fresh):
    """Extend a renaming so it covers every variable of the given literal
    lists.  Variables that only occur in removed literals must still be
    renamed into the fresh block, otherwise a recorded parent substitution
    could mention its own domain and stop being idempotent."""
    m = dict(nu.map)
    grew = False
    for lits in lit_lists:
        for lit in lits:
            for a in lit.args:
                for v in term_vars(a):
                    if v not in m:
                        m[v] = Var(next(fresh))
                        grew = True
    return Subst(m) if grew else nu


def _finish(raw_lits, images, fresh, build):
    """Normalise a raw derived literal list and hand the renaming, extended
    over the full parent images, to a certificate builder.  Returns
    (clause, certificate, pattern) or None if the builder declines."""
    stored, nu, pattern = _normalize(raw_lits, fresh)
    nu = _extend_over(nu, images, fresh)
    cert = build(nu)
    if cert is None:
        return None
    if cert.clause != stored:
        # the resolve rule erases every copy of the resolved pair, which can
        # prune more than the predicted literal set; trust the certificate
        return cert.clause, cert, _pattern_of(cert.clause)
    return stored, cert, pattern


def _resolution_inferences(given, partner, fresh, out):
    for i, lg in enumerate(given.lits):
        for j, lp in enumerate(partner.lits):
            if lg.pred != lp.pred or lg.polarity == lp.polarity:
                continue
            mu = _unify_args(lg.args, lp.args)
            if mu is None:
                continue
            glits = [mu.literal(l) for l in given.lits]
            plits = [mu.literal(l) for l in partner.lits]
            lit = glits[i]
            nlit = lit.negate()
            c1 = [l for l in glits if l != lit and l != nlit]
            c2 = [l for l in plits if l != lit and l != nlit]
            # the rule erases the resolved pair from the union, so a premise
            # carrying the opposite literal elsewhere would lose it unsoundly
            if nlit in glits or lit in plits:
                continue

            def build(nu, lit=lit):
                gnode = _wrap(given.cert, given.vids, given.sigma, mu, nu)
                pnode = _wrap(partner.cert, partner.vids, partner.sigma, mu, nu)
                return resolve(nu.literal(lit), gnode, pnode)

            res = _finish(c1 + c2, [glits, plits], fresh, build)
            if res is not None:
                out.append(res)


def _factor_inferences(given, fresh, out):
    lits = given.lits
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            if lits[i].pred != lits[j].pred or lits[i].polarity != lits[j].polarity:
                continue
            mu = _unify_args(lits[i].args, lits[j].args)
            if mu is None:
                continue
            merged = [mu.literal(l) for l in lits]

            def build(nu):
                return _wrap(given.cert, given.vids, given.sigma, mu, nu)

            res = _finish(merged, [merged], fresh, build)
            if res is not None:
                out.append(res)


def _paramod_inferences(eq, tgt, fresh, out):
    """Rewrite inside tgt using each positive equality literal of eq, left
    to right only; reversed equalities arrive separately via symmetry."""
    for ei, elit in enumerate(eq.lits):
        if not (elit.polarity and elit.is_eq):
            continue
        s0, t0 = elit.args
        if isinstance(s0, Var):
            continue
        for tj, tlit in enumerate(tgt.lits):
            for path, sub in _paths(tlit):
                mu = unify(s0, sub)
                if mu is None:
                    continue
                eq_lits = [mu.literal(l) for l in eq.lits]
                tg_lits = [mu.literal(l) for l in tgt.lits]
                eq_lit = eq_lits[ei]
                s, t = mu.term(s0), mu.term(t0)
                target = tg_lits[tj]
                rewritten = _replace_in_literal(target, path, t)
                eq_rest = [l for l in eq_lits if l != eq_lit]
                tg_rest = [l for l in tg_lits if l != target]
                raw = tg_rest + eq_rest + [rewritten]

                def build(nu, mu=mu, path=path, eq_lit=eq_lit, s=s, t=t, target=target):
                    ns, nt = nu.term(s), nu.term(t)
                    ntarget = nu.literal(target)
                    leaf = equality(ntarget, path, ns, nt)
                    enode = _wrap(eq.cert, eq.vids, eq.sigma, mu, nu)
                    first = _guarded_resolve(nu.literal(eq_lit), enode, leaf)
                    if first is None:
                        return None
                    tnode = _wrap(tgt.cert, tgt.vids, tgt.sigma, mu, nu)
                    return _guarded_resolve(ntarget, tnode, first)

                res = _finish(raw, [eq_lits, tg_lits], fresh, build)
                if res is not None:
                    out.append(res)


def _guarded_resolve(lit, pos, neg):
    """resolve(), but skip combinations where the subtraction built into the
    rule would erase a literal that must survive."""
    nlit = lit.negate()
    if lit not in pos.clause or nlit not in neg.clause:
        return None
    if nlit in pos.clause or lit in neg.clause:
        return None
    return resolve(lit, pos, neg)


def _sym_inferences(given, fresh, out):
    """From a clause with a positive s = t literal, derive the clause with
    t = s instead.  Recorded as a rewrite of s inside an inline reflexivity
    leaf, which is how a flipped equality is expressible with leaf rules."""
    for ei, elit in enumerate(given.lits):
        if not (elit.polarity and elit.is_eq):
            continue
        s, t = elit.args
        if s == t:
            continue
        rest = [l for l in given.lits if l != elit]
        flipped = Literal(True, EQ, (t, s))
        raw = rest + [flipped]

        def build(nu, elit=elit, s=s, t=t):
            ns, nt = nu.term(s), nu.term(t)
            gnode = _wrap(given.cert, given.vids, given.sigma, nu)
            w = Var(next(fresh))
            refl_node = substitute(Subst({w.id: ns}), refl(w))
            leaf = equality(Literal(True, EQ, (ns, ns)), (0,), ns, nt)
            first = _guarded_resolve(nu.literal(elit), gnode, leaf)
            if first is None:
                return None
            return _guarded_resolve(Literal(True, EQ, (ns, ns)), refl_node, first)

        res = _finish(raw, [given.lits], fresh, build)
        if res is not None:
            out.append(res)


def _irreflexive_inferences(given, fresh, out):
    for lit in given.lits:
        if lit.polarity or not lit.is_eq:
            continue
        u, v = lit.args
        mu = unify(u, v)
        if mu is None:
            continue
        base = [mu.literal(l) for l in given.lits]
        kept = [l for l in base if not _is_refl_neq(l)]

        def build(nu):
            return irreflexive(_wrap(given.cert, given.vids, given.sigma, mu, nu))

        res = _finish(kept, [base], fresh, build)
        if res is not None:
            out.append(res)


def _remove_sym_inferences(given, out):
    reduced = _remove_sym_clause(given.clause)
    if reduced != given.clause:
        node = remove_sym(given.cert)
        out.append((node.clause, node, _pattern_of(node.clause)))


def _generate(given_clause, given_cert, active, fresh):
    """All inferences between the given clause and the active entries, plus
    the given clause's unary inferences, as (clause, certificate, pattern)
    triples in a fixed order."""
    given = _Entry(given_clause, given_cert, Subst())
    out = []
    _remove_sym_inferences(given, out)
    _irreflexive_inferences(given, fresh, out)
    _sym_inferences(given, fresh, out)
    _factor_inferences(given, fresh, out)
    gvars = set(given.vids)
    for pclause, pcert in active:
        if gvars & set(clause_vars(pclause)):
            sigma = Subst({v: Var(next(fresh)) for v in clause_vars(pclause)})
        else:
            sigma = Subst()
        partner = _Entry(pclause, pcert, sigma)
        _resolution_inferences(given, partner, fresh, out)
        _paramod_inferences(given, partner, fresh, out)
        if pclause is not given_clause:
            _paramod_inferences(partner, given, fresh, out)
    return out


def _max_var(clauses):
    top = 0
    for c in clauses:
        for v in clause_vars(c):
            top = max(top, v)
    return top


def generate_inferences(given, active, fresh=None):
    """Inferences between a given clause and a set of active clauses.

    Parents are rooted as axiom leaves, so the certificates replay against
    any problem containing the participating clauses.  Returns a list of
    (clause, certificate) pairs in a fixed deterministic order.
    """
    active = list(active)
    if fresh is None:
        fresh = itertools.count(_max_var([given] + active) + 1)
    entries = [(c, axiom(c)) for c in active]
    triples = _generate(given, axiom(given), entries, fresh)
    return [(clause, cert) for clause, cert, _ in triples]


# --- the given-clause loop ----------------------------------------------------


@dataclass
class Refuted:
    certificate: Certificate
    stats: dict


@dataclass
class Saturated:
    stats: dict


@dataclass
class LimitReached:
    stats: dict


# Of every PICK_RATIO + 1 given-clause selections, PICK_RATIO go to the
# lightest passive clause and one goes to the oldest.  Pure lightest-first
# is unfair: a band of small clauses can breed faster than it drains and
# starve every heavier clause forever.  The periodic oldest-first pick
# guarantees each passive clause is eventually activated.
PICK_RATIO = 4


def prove(problem, max_generated=100000, max_weight=None):
    """Search for a refutation of a set of clauses.

    Returns Refuted with a certificate rooted at the empty clause, Saturated
    when no inferences remain, or LimitReached when the generated-clause or
    weight budget cut the search short.  Identical inputs give identical
    certificates; renamed inputs give certificates of identical shape.
    """
    problem = list(problem)
    fresh = itertools.count(_max_var(problem) + 1)
    stats = {
        "generated": 0,
        "kept": 0,
        "activated": 0,
        "discarded_tautology": 0,
        "discarded_weight": 0,
        "discarded_duplicate": 0,
    }
    passive = []
    by_age = collections.deque()
    taken = set()
    seen = set()
    seq = itertools.count()

    def admit(clause, cert, pattern):
        if is_tautology(clause):
            stats["discarded_tautology"] += 1
            return None
        if max_weight is not None and weight(clause) > max_weight:
            stats["discarded_weight"] += 1
            return None
        if pattern in seen:
            stats["discarded_duplicate"] += 1
            return None
        seen.add(pattern)
        if clause.is_empty:
            return Refuted(cert, stats)
        stats["kept"] += 1
        entry = (weight(clause), next(seq), clause, cert)
        heapq.heappush(passive, entry)
        by_age.append(entry)
        return None

    for c in problem:
        stored, nu, pattern = _normalize(list(c), fresh)
        cert = _wrap(axiom(c), clause_vars(c), nu)
        refuted = admit(stored, cert, pattern)
        if refuted is not None:
            return refuted

    if any(lit.pred == EQ for c in problem for lit in c):
        v = Var(next(fresh))
        stored = Clause([Literal(True, EQ, (v, v))])
        refuted = admit(stored, refl(v), _pattern_of(stored))
        if refuted is not None:
            return refuted

    def pop_given():
        # both queues hold the same entries; lazily skip ones the other
        # queue already handed out
        if stats["activated"] % (PICK_RATIO + 1) == PICK_RATIO:
            while by_age:
                entry = by_age.popleft()
                if entry[1] not in taken:
                    return entry
        while passive:
            entry = heapq.heappop(passive)
            if entry[1] not in taken:
                return entry
        while by_age:
            entry = by_age.popleft()
            if entry[1] not in taken:
                return entry
        return None

    active = []
    while True:
        entry = pop_given()
        if entry is None:
            break
        _, sq, given_clause, given_cert = entry
        taken.add(sq)
        active.append((given_clause, given_cert))
        stats["activated"] += 1
        for clause, cert, pattern in _generate(given_clause, given_cert, active, fresh):
            stats["generated"] += 1
            if stats["generated"] > max_generated:
                return LimitReached(stats)
            refuted = admit(clause, cert, pattern)
            if refuted is not None:
                return refuted
    if stats["discarded_weight"]:
        return LimitReached(stats)
    return Saturated(stats)


# --- serialization ------------------------------------------------------------


def term_sexp(t):
    toks = []
    stack = [t]
    while stack:
        u = stack.pop()
        if u is _CLOSE:
            toks.append(")")
        elif isinstance(u, Var):
            toks.append(str(u.id))
        else:
            toks.append(f"({u.symbol}")
            stack.append(_CLOSE)
            stack.extend(reversed(u.args))
    buf = []
    for tok in toks:
        if buf and tok != ")":
            buf.append(" ")
        buf.append(tok)
    return "".join(buf)


def literal_sexp(lit):
    tag = "true" if lit.polarity else "false"
    inner = " ".join([str(lit.pred)] + [term_sexp(a) for a in lit.args])
    return f"({tag} ({inner}))"


def clause_sexp(clause):
    return "(" + " ".join(literal_sexp(l) for l in clause) + ")"


def _subst_sexp(theta):
    inner = " ".join(f"({k} {term_sexp(v)})" for k, v in theta.items())
    return f"({inner})"


def certificate_sexp(cert):
    """Serialize a certificate to a canonical S-expression string.  Equal
    certificates serialize identically, which makes this the determinism
    witness."""
    memo = {}
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
        parts = [node.rule]
        if node.rule == "assume":
            parts.append(literal_sexp(node.data))
        elif node.rule == "refl":
            parts.append(term_sexp(node.data))
        elif node.rule == "equality":
            lit, path, s, t = node.data
            parts.append(literal_sexp(lit))
            parts.append("(" + " ".join(map(str, path)) + ")")
            parts.append(term_sexp(s))
            parts.append(term_sexp(t))
        elif node.rule == "subst":
            parts.append(_subst_sexp(node.data))
        elif node.rule == "resolve":
            parts.append(literal_sexp(node.data))
        parts.append(clause_sexp(node.clause))
        parts.extend(memo[id(ch)] for ch in node.children)
        memo[id(node)] = "(" + " ".join(parts) + ")"
    return memo[id(cert)]
