"""Queries on ROBDD-inf: consistency, validity, equivalence, counting,
conditioning, clausal entailment, implicant check, enumeration and minimum
cardinality."""
from __future__ import annotations

import math
from typing import Iterable, Iterator

from robddl.core import FALSE, TRUE_VAR, DiagramError, Store, lit_key
from robddl.transform import add_to_inf, reduce, strip_vars


class UniverseTooSmall(DiagramError):
    pass


class InconsistentTerm(DiagramError):
    pass


class CountError(ArithmeticError):
    """A division in the counting recurrence left a remainder."""


def count(store: Store, root: int, universe_size: int) -> int:
    """Number of models over a universe of ``universe_size`` variables."""
    support = store.support(root)
    if universe_size < len(support):
        raise UniverseTooSmall(f"diagram mentions {len(support)} variables")
    memo: dict[int, int] = {}
    for v in store.reachable(root):
        if v == FALSE:
            memo[v] = 0
        elif store.var[v] == TRUE_VAR:
            memo[v] = 1 << (universe_size - store.lits[v].size)
        else:
            total = memo[store.lo[v]] + memo[store.hi[v]]
            shift = store.lits[v].size + 1
            q, r = divmod(total, 1 << shift)
            if r:
                raise CountError(f"node {v}: {total} not divisible by 2^{shift}")
            memo[v] = q
    return memo[root]


def is_consistent(store: Store, root: int) -> bool:
    return root != FALSE


def is_valid(store: Store, root: int) -> bool:
    return store.is_true(root) and not store.lits[root]


def equivalent(store: Store, a: int, b: int, other: Store | None = None) -> bool:
    """Equivalence of two ROBDD-inf roots; ``b`` lives in ``other`` if given."""
    if other is None or other is store:
        return a == b
    memo: dict[tuple[int, int], bool] = {}

    def same(u: int, w: int) -> bool:
        key = (u, w)
        if key in memo:
            return memo[key]
        if u == FALSE or w == FALSE:
            res = u == w
        elif store.var[u] != other.var[w] or store.lits[u] != other.lits[w]:
            res = False
        elif store.var[u] == TRUE_VAR:
            res = True
        else:
            res = same(store.lo[u], other.lo[w]) and same(store.hi[u], other.hi[w])
        memo[key] = res
        return res

    return same(a, b)


def condition(store: Store, root: int, term: Iterable[int]) -> int:
    """ROBDD-inf of the diagram conditioned on a consistent term."""
    t = frozenset(term)
    if any(-l in t for l in t):
        raise InconsistentTerm("term is inconsistent")
    if not t or root == FALSE:
        return root
    neg = frozenset(-l for l in t)
    memo: dict[int, int] = {FALSE: FALSE}
    for v in store.reachable(root):
        if v == FALSE:
            continue
        ls = store.lits[v]
        if ls & neg:
            memo[v] = FALSE
            continue
        keep = ls - t
        x = store.var[v]
        if x == TRUE_VAR:
            memo[v] = store.true(keep)
            continue
        lo = FALSE if x in t else memo[store.lo[v]]
        hi = FALSE if -x in t else memo[store.hi[v]]
        if lo == FALSE and hi == FALSE:
            memo[v] = FALSE
        else:
            memo[v] = store.decision(x, lo, hi, keep)
    u = add_to_inf(store, memo[root])
    return reduce(store, strip_vars(store, u, {abs(l) for l in t}))


def clausal_entailment(store: Store, root: int, clause: Iterable[int]) -> bool:
    c = frozenset(clause)
    if any(-l in c for l in c):
        return True
    return condition(store, root, {-l for l in c}) == FALSE


def implicant_check(store: Store, root: int, term: Iterable[int]) -> bool:
    """Whether the term implies the diagram's formula."""
    t = frozenset(term)
    if any(-l in t for l in t):
        raise InconsistentTerm("term is inconsistent")
    return is_valid(store, condition(store, root, t))


def enumerate_models(store: Store, root: int, universe: Iterable[int],
                     limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield each model over ``universe`` as a tuple of signed literals."""
    universe = sorted(set(universe))
    missing = store.support(root) - set(universe)
    if missing:
        raise UniverseTooSmall(f"universe lacks variables {sorted(missing)}")
    if limit is not None and limit <= 0:
        return
    produced = 0

    def paths(v: int, fixed: tuple[int, ...]):
        if v == FALSE:
            return
        fixed = fixed + store.lits[v].ordered
        x = store.var[v]
        if x == TRUE_VAR:
            yield fixed
            return
        yield from paths(store.lo[v], fixed + (-x,))
        yield from paths(store.hi[v], fixed + (x,))

    for fixed in paths(root, ()):
        assigned = {abs(l) for l in fixed}
        free = [x for x in universe if x not in assigned]
        for bits in range(1 << len(free)):
            model = list(fixed)
            for k, x in enumerate(free):
                model.append(x if bits >> k & 1 else -x)
            yield tuple(sorted(model, key=lit_key))
            produced += 1
            if limit is not None and produced >= limit:
                return


def minimum_cardinality(store: Store, root: int) -> float:
    """Fewest variables assigned false in any model (``inf`` if none)."""
    memo: dict[int, float] = {}
    for v in store.reachable(root):
        if v == FALSE:
            memo[v] = math.inf
            continue
        own = store.lits[v].neg_count
        if store.var[v] == TRUE_VAR:
            memo[v] = own
        else:
            memo[v] = own + min(1 + memo[store.lo[v]], memo[store.hi[v]])
    return memo[root]
