"""Shared generators for the test suite."""
from __future__ import annotations

import random

import numpy as np

from robddl.core import FALSE, TRUE_VAR, Store, lit_key, validate
from robddl.oracle import random_cnf, table_of_cnf
from robddl.sat import CnfFormula

SUITE_SEED = 20240601


def random_suite(count: int = 500, seed: int = SUITE_SEED, max_vars: int = 10,
                 max_clauses: int = 20) -> list[CnfFormula]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_vars)
        m = rng.randint(0, max_clauses)
        out.append(random_cnf(rng, n, m, (1, min(3, n))))
    return out


def equivalent_variant(rng: random.Random, cnf: CnfFormula) -> CnfFormula:
    """A syntactically different CNF with the same models."""
    clauses = [list(c) for c in cnf.live()]
    extra = []
    for c in clauses:
        if rng.random() < 0.3:
            extra.append(list(c))  # duplicate
        if rng.random() < 0.3 and len(c) < cnf.num_vars:
            free = [v for v in range(1, cnf.num_vars + 1) if v not in {abs(l) for l in c}]
            v = rng.choice(free)
            extra.append(c + [v if rng.random() < 0.5 else -v])  # subsumed
    for a in clauses:
        for b in clauses:
            clash = [l for l in a if -l in b]
            if len(clash) == 1 and rng.random() < 0.2:
                res = {l for l in a if l != clash[0]} | {l for l in b if l != -clash[0]}
                if not any(-l in res for l in res):
                    extra.append(sorted(res))  # resolvent
    clauses += extra
    rng.shuffle(clauses)
    for c in clauses:
        rng.shuffle(c)
    return CnfFormula(cnf.num_vars, clauses)


def random_term(rng: random.Random, num_vars: int, size: int) -> list[int]:
    vs = rng.sample(range(1, num_vars + 1), min(size, num_vars))
    return [v if rng.random() < 0.5 else -v for v in vs]


def _mentioned(store: Store, ref: int) -> set[int]:
    if ref == FALSE:
        return set()
    out = set(store.lits[ref].vars)
    if store.var[ref] != TRUE_VAR:
        out.add(store.var[ref])
    return out


def perturb(store: Store, root: int, rng: random.Random, rate: float = 0.4) -> int:
    """Rebuild ``root`` with random meaning-preserving local moves.

    Moves: pull the smallest literal out into a node with a dead branch, push
    the largest literal of a decision node into its children, or insert a
    decision node with identical children. The result may violate ordering;
    callers filter with :func:`validate`.
    """
    memo = {FALSE: FALSE}
    for v in store.reachable(root):
        if v == FALSE:
            continue
        lits = store.lits[v]
        if store.var[v] == TRUE_VAR:
            u = store.true(lits)
        else:
            lo, hi = memo[store.lo[v]], memo[store.hi[v]]
            if lits and rng.random() < rate:
                l = lits.ordered[-1]
                clear = all(abs(l) not in store.support(c) for c in (lo, hi))
                if abs(l) > store.var[v] and clear:
                    lo = lo if lo == FALSE else store.with_lits(lo, store.lits[lo] | {l})
                    hi = hi if hi == FALSE else store.with_lits(hi, store.lits[hi] | {l})
                    lits = store.litset(lits - {l})
            u = store.decision(store.var[v], lo, hi, lits)
        lits = store.lits[u]
        if lits and rng.random() < rate:
            l = lits.ordered[0]
            if store.var[u] == TRUE_VAR or store.var[u] > abs(l):
                child = store.with_lits(u, lits - {l})
                u = store.decision(abs(l), FALSE, child) if l > 0 else store.decision(abs(l), child, FALSE)
        if rng.random() < rate / 2:
            seen = _mentioned(store, u)
            low = min(seen) if seen else None
            below = [x for x in range(1, low or 1) if x not in store.support(u)]
            if below:
                u = store.decision(rng.choice(below), u, u)
        memo[v] = u
    return memo[root]


def random_obddl(store: Store, root: int, rng: random.Random, attempts: int = 20) -> int:
    """A perturbed copy of ``root`` that still satisfies the ordering conditions."""
    for _ in range(attempts):
        p = perturb(store, root, rng)
        if validate(store, p, "obddl").ok:
            return p
    return root


def live_decisions(store: Store, root: int) -> int:
    """Decision nodes neither of whose children is False."""
    return sum(1 for v in store.reachable(root)
               if store.var[v] != TRUE_VAR and store.lo[v] != FALSE and store.hi[v] != FALSE)


def is_free(store: Store, root: int) -> bool:
    """Each variable is tested at most once on every path, and no literal sets."""
    memo: dict[int, frozenset | None] = {}
    for v in store.reachable(root):
        if v == FALSE:
            memo[v] = frozenset()
            continue
        if store.lits[v]:
            return False
        if store.var[v] == TRUE_VAR:
            memo[v] = frozenset()
            continue
        below = memo[store.lo[v]] | memo[store.hi[v]]
        if store.var[v] in below:
            return False
        memo[v] = below | {store.var[v]}
    return True


def largest_var_premise(cnf: CnfFormula) -> bool:
    """Every clause implied by the formula mentions its largest variable.

    Equivalently, existentially quantifying the largest variable away leaves
    a valid formula, while the formula itself is not valid.
    """
    t = table_of_cnf(cnf)
    if t.bits.all():
        return False
    bits = t.bits.reshape(2, -1)  # the largest variable is the top bit
    return bool(np.logical_or(bits[0], bits[1]).all())


def premise_suite(count: int, seed: int, max_vars: int = 10) -> list[CnfFormula]:
    """Random CNFs over x1..xn that satisfy :func:`largest_var_premise`."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, max_vars)
        clauses = []
        for _ in range(rng.randint(1, 12)):
            k = rng.randint(0, min(3, n - 1))
            vs = rng.sample(range(1, n), k)
            c = [v if rng.random() < 0.5 else -v for v in vs]
            c.append(n if rng.random() < 0.5 else -n)
            clauses.append(c)
        cnf = CnfFormula(n, clauses)
        if largest_var_premise(cnf):
            out.append(cnf)
    return out


def sorted_model(model) -> tuple[int, ...]:
    return tuple(sorted(model, key=lit_key))
