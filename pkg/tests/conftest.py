"""Shared test oracles.

The centrepiece is a brute-force evaluator for closed terms over small
finite models.  It reimplements the semantics from scratch (its own type
inference, its own notion of function spaces) so that it shares no code
with the kernel: agreement between the two is evidence, not tautology.

Semantic values are nested tuples: P denotes (False, True), the universe
denotes (0, 1), and a function type denotes the full function space with
each function represented as a tuple indexed by the position of the
argument in its domain enumeration.  Application is tuple indexing.
"""

from __future__ import annotations

import itertools
import random

import pytest

from metis_lcf.kernel import (
    PROP,
    UNIVERSE,
    Abs,
    Bound,
    Comb,
    Const,
    FunType,
    Term,
    fn,
)

_domains: dict = {}


def domain(ty) -> tuple:
    """All elements of the denotation of ty over a two-element universe."""
    got = _domains.get(ty)
    if got is not None:
        return got
    if ty == PROP:
        d = (False, True)
    elif ty == UNIVERSE:
        d = (0, 1)
    elif isinstance(ty, FunType):
        dom, cod = domain(ty.dom), domain(ty.cod)
        d = tuple(itertools.product(cod, repeat=len(dom)))
    else:
        raise TypeError(f"no domain for {ty!r}")
    _domains[ty] = d
    return d


def _apply(f, x, dom_ty):
    """Apply a semantic function value: tuples by domain position, builtin
    semantics (Python callables) directly."""
    if callable(f):
        return f(x)
    return f[domain(dom_ty).index(x)]


_MISSING = object()


def _builtin_value(name: str, ty):
    # Builtins are curried Python callables, never materialized tuples:
    # the function space over a large predicate domain is astronomically
    # big, but iterating the domain itself stays cheap.
    if name == "true":
        return True
    if name == "false":
        return False
    if name == "not":
        return lambda p: not p
    if name == "and":
        return lambda p: lambda q: p and q
    if name == "or":
        return lambda p: lambda q: p or q
    if name == "implies":
        return lambda p: lambda q: (not p) or q
    if name == "eq":
        return lambda x: lambda y: x == y
    if name == "all":
        a = ty.dom.dom
        return lambda f: all(_apply(f, d, a) for d in domain(a))
    if name == "ex":
        a = ty.dom.dom
        return lambda f: any(_apply(f, d, a) for d in domain(a))
    return _MISSING


def _infer(t: Term, stack: list):
    if isinstance(t, Const):
        return t.ty
    if isinstance(t, Bound):
        return stack[len(stack) - 1 - t.index]
    if isinstance(t, Comb):
        fty = _infer(t.fun, stack)
        _infer(t.arg, stack)
        return fty.cod
    if isinstance(t, Abs):
        stack.append(t.var_ty)
        bty = _infer(t.body, stack)
        stack.pop()
        return FunType(t.var_ty, bty)
    raise TypeError(f"not a term: {t!r}")


def meval(t: Term, model: dict | None = None, _stack=None, _tstack=None):
    """Evaluate a closed term in a two-element model.

    model maps user constant names to semantic values.  Builtins get their
    standard semantics.  The result for a P-typed term is a Python bool.
    """
    model = model or {}
    stack = _stack if _stack is not None else []
    tstack = _tstack if _tstack is not None else []
    if isinstance(t, Const):
        v = _builtin_value(t.name, t.ty)
        if v is not _MISSING:
            return v
        if t.name not in model:
            raise KeyError(f"model does not interpret {t.name}")
        return model[t.name]
    if isinstance(t, Bound):
        return stack[len(stack) - 1 - t.index]
    if isinstance(t, Comb):
        fv = meval(t.fun, model, stack, tstack)
        xv = meval(t.arg, model, stack, tstack)
        if callable(fv):
            return fv(xv)
        return fv[domain(_infer(t.arg, tstack)).index(xv)]
    if isinstance(t, Abs):
        out = []
        for x in domain(t.var_ty):
            stack.append(x)
            tstack.append(t.var_ty)
            out.append(meval(t.body, model, stack, tstack))
            stack.pop()
            tstack.pop()
        return tuple(out)
    raise TypeError(f"not a term: {t!r}")


def models_of(consts: dict[str, object]):
    """All models over the given constant signature (name -> type)."""
    names = list(consts)
    spaces = [domain(consts[n]) for n in names]
    for values in itertools.product(*spaces):
        yield dict(zip(names, values))


def holds_everywhere(t: Term, consts: dict | None = None) -> bool:
    """Is the closed proposition t true in every two-element model of its
    constants?  consts maps the names of t's user constants to types."""
    if not consts:
        return bool(meval(t))
    return all(bool(meval(t, m)) for m in models_of(consts))


# ---------------------------------------------------------------------------
# Random formula generators (seeded, deterministic per test)


def prop_atoms(n: int) -> list[Const]:
    return [Const(f"a{i}", PROP) for i in range(n)]


def random_prop_term(rng: random.Random, atoms, depth: int) -> Term:
    from metis_lcf.kernel import (
        FALSE,
        TRUE,
        mk_and,
        mk_eq,
        mk_implies,
        mk_not,
        mk_or,
    )

    if depth == 0 or rng.random() < 0.25:
        pool = list(atoms) + [TRUE, FALSE]
        return rng.choice(pool)
    kind = rng.choice(["not", "and", "or", "implies", "iff"])
    if kind == "not":
        return mk_not(random_prop_term(rng, atoms, depth - 1))
    a = random_prop_term(rng, atoms, depth - 1)
    b = random_prop_term(rng, atoms, depth - 1)
    if kind == "and":
        return mk_and(a, b)
    if kind == "or":
        return mk_or(a, b)
    if kind == "implies":
        return mk_implies(a, b)
    return mk_eq(a, b, PROP)


def prop_truth_table(t: Term, atoms) -> list[bool]:
    """Value of t under every assignment to the given atoms, in binary
    counting order (atom 0 is the least significant bit)."""
    out = []
    for bits in range(1 << len(atoms)):
        model = {a.name: bool(bits >> i & 1) for i, a in enumerate(atoms)}
        out.append(bool(meval(t, model)))
    return out


def random_typed_term(rng: random.Random, sig: dict, ty, env=(), depth=3) -> Term:
    """Generate a random well-typed term of the given type.

    Stays inside the parser image: builtins fully applied, quantifier
    arguments are literal abstractions.  env is a tuple of binder types,
    outermost first; bound variables of matching type may be used.
    """
    from metis_lcf.kernel import (
        FALSE,
        TRUE,
        mk_all,
        mk_and,
        mk_eq,
        mk_ex,
        mk_implies,
        mk_not,
        mk_or,
    )

    env = tuple(env)
    leaves: list[Term] = []
    for i, bty in enumerate(reversed(env)):
        if bty == ty:
            leaves.append(Bound(i))
    for name, cty in sig.items():
        if cty == ty:
            leaves.append(Const(name, cty))
    if ty == PROP:
        leaves += [TRUE, FALSE]

    def leaf():
        if leaves:
            return rng.choice(leaves)
        if isinstance(ty, FunType):
            body = random_typed_term(rng, sig, ty.cod, env + (ty.dom,), 0)
            return Abs("v", ty.dom, body)
        # no leaf of this type available: synthesize via an application
        return app_node(0)

    def app_node(d):
        funs = [
            (name, cty)
            for name, cty in sig.items()
            if isinstance(cty, FunType) and _result_chain(cty, ty) is not None
        ]
        if not funs:
            return leaf() if leaves else TRUE
        name, cty = rng.choice(funs)
        t: Term = Const(name, cty)
        for arg_ty in _result_chain(cty, ty):
            t = Comb(t, random_typed_term(rng, sig, arg_ty, env, max(0, d - 1)))
        return t

    if depth <= 0:
        return leaf()
    if ty == PROP:
        kind = rng.choice(
            ["leaf", "not", "and", "or", "implies", "eq", "all", "ex", "app"]
        )
        if kind == "leaf":
            return leaf()
        if kind == "not":
            return mk_not(random_typed_term(rng, sig, PROP, env, depth - 1))
        if kind in ("and", "or", "implies"):
            a = random_typed_term(rng, sig, PROP, env, depth - 1)
            b = random_typed_term(rng, sig, PROP, env, depth - 1)
            return {"and": mk_and, "or": mk_or, "implies": mk_implies}[kind](a, b)
        if kind == "eq":
            ety = rng.choice([PROP, UNIVERSE, fn(UNIVERSE, UNIVERSE)])
            a = random_typed_term(rng, sig, ety, env, depth - 1)
            b = random_typed_term(rng, sig, ety, env, depth - 1)
            return mk_eq(a, b, ety)
        if kind in ("all", "ex"):
            vty = rng.choice([UNIVERSE, PROP, fn(UNIVERSE, UNIVERSE)])
            body = random_typed_term(rng, sig, PROP, env + (vty,), depth - 1)
            return (mk_all if kind == "all" else mk_ex)("v", vty, body)
        return app_node(depth)
    if isinstance(ty, FunType) and rng.random() < 0.7:
        body = random_typed_term(rng, sig, ty.cod, env + (ty.dom,), depth - 1)
        return Abs("v", ty.dom, body)
    return app_node(depth)


def _result_chain(fty, target):
    """Argument types needed to apply a function of type fty down to target."""
    args = []
    ty = fty
    while ty != target:
        if not isinstance(ty, FunType):
            return None
        args.append(ty.dom)
        ty = ty.cod
    return args


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
