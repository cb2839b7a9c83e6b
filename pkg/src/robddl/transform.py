"""Structural transformations: reduction, saturation with implied literals,
and conversion of ROBDD-inf into FBDD and plain ROBDD."""
from __future__ import annotations

from robddl.core import (FALSE, TRUE_VAR, DiagramError, InconsistentSet, Store,
                         compute_linf, lit_key)


class InconsistentMerge(DiagramError):
    """Collapsing a node onto its child produced an inconsistent literal set."""


class InputNotInf(DiagramError):
    """The input is not a ROBDD-inf."""


def reduce(store: Store, root: int) -> int:
    """Merge equal nodes and collapse nodes with identical children."""
    memo: dict[int, int] = {}
    var, lo_, hi_, lits = store.var, store.lo, store.hi, store.lits
    for v in store.reachable(root):
        if var[v] == TRUE_VAR:
            memo[v] = v
            continue
        lo, hi = memo[lo_[v]], memo[hi_[v]]
        if lo != hi:
            memo[v] = store.decision(var[v], lo, hi, lits[v])
        elif lo == FALSE:
            memo[v] = FALSE
        else:
            try:
                merged = store.litset(lits[v] | lits[lo])
            except InconsistentSet as e:
                raise InconsistentMerge(str(e)) from None
            memo[v] = store.with_lits(lo, merged)
    return memo[root]


def add_to_inf(store: Store, root: int) -> int:
    """Equivalent ROBDD-inf of an ordered diagram."""
    if root == FALSE:
        return FALSE
    linf = compute_linf(store, root)
    memo: dict[int, int] = {}

    def sub(v: int) -> int:
        got = memo.get(v)
        if got is not None:
            return got
        full = linf[v]
        w = v
        # skip decisions whose variable is already fixed by the implied set
        while store.var[w] != TRUE_VAR and store.var[w] in full.vars:
            w = store.hi[w] if store.lo[w] == FALSE else store.lo[w]
        if store.var[w] == TRUE_VAR:
            u = store.true(full)
        else:
            lo, hi = sub(store.lo[w]), sub(store.hi[w])
            lo = store.with_lits(lo, store.lits[lo] - full)
            hi = store.with_lits(hi, store.lits[hi] - full)
            u = store.decision(store.var[w], lo, hi, full)
        memo[v] = u
        return u

    return reduce(store, sub(root))


def _check_inf(store: Store, root: int) -> None:
    if root == FALSE:
        return
    linf = compute_linf(store, root)
    for ref, full in linf.items():
        if store.lits[ref] != full:
            raise InputNotInf(f"node {ref} does not carry all of its implied literals")


def inf2fbdd(store: Store, root: int) -> int:
    """Free BDD with empty literal sets, equivalent to a ROBDD-inf."""
    _check_inf(store, root)
    memo: dict[int, int] = {FALSE: FALSE}
    for v in store.reachable(root):
        if v == FALSE:
            continue
        if store.var[v] == TRUE_VAR:
            u = store.true()
        else:
            u = store.decision(store.var[v], memo[store.lo[v]], memo[store.hi[v]])
        memo[v] = _chain(store, store.lits[v].ordered, u)
    return memo[root]


def _chain(store: Store, ordered, bottom: int) -> int:
    """Decision chain over ``ordered`` literals (smallest on top) above ``bottom``."""
    u = bottom
    for lit in reversed(ordered):
        if lit > 0:
            u = store.decision(lit, FALSE, u)
        else:
            u = store.decision(-lit, u, FALSE)
    return u


def inf2robdd(store: Store, root: int) -> int:
    """Canonical ROBDD-0 equivalent to a ROBDD-inf."""
    _check_inf(store, root)
    if root == FALSE:
        return FALSE
    memo: dict[tuple[int, frozenset], int] = {}
    var, lo_, hi_, lits = store.var, store.lo, store.hi, store.lits

    def sub(v: int, term: frozenset) -> int:
        key = (v, term)
        got = memo.get(key)
        if got is not None:
            return got
        s = term | lits[v]
        if var[v] == TRUE_VAR:
            u = _chain(store, sorted(s, key=lit_key), store.true())
        else:
            x = var[v]
            above = sorted((l for l in s if abs(l) < x), key=lit_key)
            below = frozenset(l for l in s if abs(l) > x)
            u1 = store.decision(x, sub(lo_[v], below), sub(hi_[v], below))
            u = _chain(store, above, u1)
        memo[key] = u
        return u

    return reduce(store, sub(root, frozenset()))


def strip_vars(store: Store, root: int, variables) -> int:
    """Remove every literal over ``variables`` from all literal sets."""
    drop = frozenset(variables)
    memo: dict[int, int] = {FALSE: FALSE}
    for v in store.reachable(root):
        if v == FALSE:
            continue
        keep = frozenset(l for l in store.lits[v] if abs(l) not in drop)
        if store.var[v] == TRUE_VAR:
            memo[v] = store.true(keep)
        else:
            if store.var[v] in drop:
                raise DiagramError(f"variable {store.var[v]} is still branched on")
            lo, hi = memo[store.lo[v]], memo[store.hi[v]]
            if lo == hi:
                # collapse here; reduce would do the same
                memo[v] = FALSE if lo == FALSE else store.with_lits(lo, keep | store.lits[lo])
            else:
                memo[v] = store.decision(store.var[v], lo, hi, keep)
    return memo[root]
