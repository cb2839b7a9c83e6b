"""Brute-force truth tables, random formulas and the separation families."""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from robddl.core import FALSE, TRUE_VAR, Store
from robddl.sat import CnfFormula, _normalize

MAX_VARS = 24
DISJ_CAP = 8


class TooManyVariables(ValueError):
    pass


class UniverseMismatch(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass
class TruthTable:
    """Model set over ``universe``; bit k of an index is the k-th variable."""

    universe: tuple[int, ...]
    bits: np.ndarray

    def models(self):
        for idx in np.flatnonzero(self.bits):
            yield tuple(x if idx >> k & 1 else -x for k, x in enumerate(self.universe))


def _columns(universe) -> dict[int, np.ndarray]:
    n = len(universe)
    if n > MAX_VARS:
        raise TooManyVariables(f"{n} variables exceed the cap of {MAX_VARS}")
    idx = np.arange(1 << n, dtype=np.int64)
    return {x: ((idx >> k) & 1).astype(bool) for k, x in enumerate(universe)}


def _universe(universe, num_vars):
    return tuple(sorted(universe)) if universe is not None else tuple(range(1, num_vars + 1))


def table_of_cnf(cnf: CnfFormula, universe=None) -> TruthTable:
    uni = _universe(universe, cnf.num_vars)
    cols = _columns(uni)
    if not cnf.variables() <= set(uni):
        raise UniverseMismatch("formula mentions variables outside the universe")
    bits = np.ones(1 << len(uni), dtype=bool)
    for c in cnf.live():
        sat = np.zeros_like(bits)
        for l in c:
            sat |= cols[l] if l > 0 else ~cols[-l]
        bits &= sat
    return TruthTable(uni, bits)


def table_of_diagram(store: Store, root: int, universe) -> TruthTable:
    """Model set of a diagram, evaluated node by node from its semantics."""
    uni = tuple(sorted(universe))
    cols = _columns(uni)
    if not store.support(root) <= set(uni):
        raise UniverseMismatch("diagram mentions variables outside the universe")
    size = 1 << len(uni)
    memo = {}
    for v in store.reachable(root):
        if v == FALSE:
            memo[v] = np.zeros(size, dtype=bool)
            continue
        arr = np.ones(size, dtype=bool)
        for l in store.lits[v]:
            arr &= cols[l] if l > 0 else ~cols[-l]
        x = store.var[v]
        if x != TRUE_VAR:
            arr &= np.where(cols[x], memo[store.hi[v]], memo[store.lo[v]])
        memo[v] = arr
    return TruthTable(uni, memo[root])


def implied_literals_bf(table: TruthTable) -> frozenset[int]:
    if not table.bits.any():
        raise ValueError("unsatisfiable table implies every literal")
    cols = _columns(table.universe)
    out = set()
    for x, col in cols.items():
        sel = col[table.bits]
        if sel.all():
            out.add(x)
        elif not sel.any():
            out.add(-x)
    return frozenset(out)


def model_count_bf(table: TruthTable) -> int:
    return int(np.count_nonzero(table.bits))


def equivalent_bf(t1: TruthTable, t2: TruthTable) -> bool:
    if t1.universe != t2.universe:
        raise UniverseMismatch(f"{t1.universe} vs {t2.universe}")
    return bool(np.array_equal(t1.bits, t2.bits))


def eval_cnf(cnf: CnfFormula, model) -> bool:
    m = set(model)
    return all(any(l in m for l in c) for c in cnf.live())


def random_cnf(rng: random.Random, num_vars: int, num_clauses: int,
               width: tuple[int, int] = (1, 3)) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        k = rng.randint(*width)
        vs = rng.sample(range(1, num_vars + 1), min(k, num_vars))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula(num_vars, [c for c in map(_normalize, clauses) if c is not None])


def random_3cnf(rng: random.Random, num_vars: int = 20, num_clauses: int = 91) -> CnfFormula:
    """Uniform random 3-CNF in the style of the SATLIB uf instances."""
    return random_cnf(rng, num_vars, num_clauses, (3, 3))


def generate_family(kind: str, n: int, i: int = 0) -> CnfFormula:
    """``chain``, ``fan`` (with parameter ``i``) or ``disjunctive_chain`` of size n.

    chain: AND_k (x_k <-> y_k), x_k = k, y_k = n + k.
    fan: AND_k AND_j (x_k <-> x_{k,j}), j = 1..i+1, x_k = k,
    x_{k,j} = n + (k-1)(i+1) + j.
    disjunctive_chain: OR_k (x_k <-> y_k) with the same numbering as chain,
    distributed into 2^n clauses of width 2n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "chain":
        clauses = []
        for k in range(1, n + 1):
            clauses += [(-k, n + k), (k, -(n + k))]
        return CnfFormula(2 * n, clauses)
    if kind == "fan":
        if i < 0:
            raise ValueError("fan needs i >= 0")
        width = i + 1
        clauses = []
        for k in range(1, n + 1):
            for j in range(1, width + 1):
                y = n + (k - 1) * width + j
                clauses += [(-k, y), (k, -y)]
        return CnfFormula(n + n * width, clauses)
    if kind == "disjunctive_chain":
        if n > DISJ_CAP:
            raise TooLarge(f"disjunctive_chain is distributed only up to n = {DISJ_CAP}")
        clauses = []
        for bits in range(1 << n):
            c = []
            for k in range(1, n + 1):
                c += [-k, n + k] if bits >> (k - 1) & 1 else [k, -(n + k)]
            clauses.append(tuple(sorted(c, key=abs)))
        return CnfFormula(2 * n, clauses)
    raise ValueError(f"unknown family {kind!r}")


def build_bf(store: Store, table: TruthTable, i: float) -> int:
    """ROBDD-i of a truth table, built straight from its definition.

    Each node keeps the first ``i`` implied literals (in variable order), then
    branches on the smallest variable the remaining function depends on.
    """
    cols = _columns(table.universe)
    memo: dict[bytes, int] = {}

    def implied(bits):
        out = []
        for x in table.universe:
            sel = cols[x][bits]
            if sel.all():
                out.append(x)
            elif not sel.any():
                out.append(-x)
        return out

    def essential(bits):
        for x in table.universe:
            c = cols[x]
            # f|x and f|-x differ somewhere
            if not np.array_equal(bits[c], bits[~c]):
                return x
        return None

    def node(bits):
        key = bits.tobytes()
        if key in memo:
            return memo[key]
        if not bits.any():
            return FALSE
        lits = implied(bits)
        if i != float("inf"):
            lits = lits[: int(i)]
        rest = bits.copy()
        for l in lits:
            # condition on l, keeping the table over the full universe
            c = cols[abs(l)]
            src = rest[c] if l > 0 else rest[~c]
            rest[c] = src
            rest[~c] = src
        x = essential(rest)
        if x is None:
            ref = store.true(lits)
        else:
            c = cols[x]
            lo, hi = rest.copy(), rest.copy()
            lo[c] = rest[~c]
            hi[~c] = rest[c]
            ref = store.decision(x, node(lo), node(hi), lits)
        memo[key] = ref
        return ref

    return node(table.bits)
