"""Hash-consed storage for binary decision diagrams with implied literals.

Literals are signed integers in the DIMACS convention (``3`` is x3, ``-3``
is its negation). Variables are ordered by index. A diagram lives in a
:class:`Store`; node references are plain integers into the store's arena.
Reference ``0`` is always the False terminal.

A node is one of

* False (``FALSE``),
* a True terminal carrying a set of implied literals,
* a decision node ``(var, lo, hi, lits)``.

The formula of a decision node is ``lits AND ((NOT var AND lo) OR (var AND hi))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

FALSE = 0
TRUE_VAR = 0


class DiagramError(Exception):
    """Base class for diagram errors."""


class InconsistentSet(DiagramError):
    """A literal set contains both a literal and its negation."""


class ForeignRef(DiagramError):
    """A node reference does not belong to the store."""


class MalformedNode(DiagramError):
    """A node violates a construction-time rule."""


class IncompleteAssignment(DiagramError):
    """An assignment does not fix every variable needed for evaluation."""


def lit_key(lit: int) -> tuple[int, bool]:
    """Sort key: by variable, positive before negative."""
    return abs(lit), lit < 0


class LitSet(frozenset):
    """A consistent set of literals with cached size and negative count.

    Instances are interned by :meth:`Store.litset`, so two equal sets obtained
    from the same store are the same object.
    """

    def __new__(cls, lits: Iterable[int] = ()):
        self = super().__new__(cls, lits)
        seen = set()
        for lit in self:
            v = abs(lit)
            if lit == 0:
                raise ValueError("0 is not a literal")
            if v in seen:
                raise InconsistentSet(f"complementary pair on variable {v}")
            seen.add(v)
        self.ordered = tuple(sorted(self, key=lit_key))
        self.size = len(self.ordered)
        self.neg_count = sum(1 for lit in self.ordered if lit < 0)
        self.vars = frozenset(seen)
        return self

    def __repr__(self):
        return "LitSet(%s)" % list(self.ordered)


class Node(NamedTuple):
    """Structural description of a node, used with :meth:`Store.mk`.

    ``var == 0`` denotes a terminal; a terminal with ``lits is None`` is
    False, otherwise it is a True node.
    """

    var: int
    lo: int
    hi: int
    lits: frozenset | None

    @classmethod
    def false(cls) -> "Node":
        return cls(TRUE_VAR, -1, -1, None)

    @classmethod
    def true(cls, lits: Iterable[int] = ()) -> "Node":
        return cls(TRUE_VAR, -1, -1, frozenset(lits))

    @classmethod
    def decision(cls, var: int, lo: int, hi: int, lits: Iterable[int] = ()) -> "Node":
        return cls(var, lo, hi, frozenset(lits))


class Store:
    """Append-only node arena with a unique table and a literal-set table."""

    def __init__(self):
        self._litsets: dict[frozenset, LitSet] = {}
        empty = self.litset(())
        self.var: list[int] = [TRUE_VAR]
        self.lo: list[int] = [-1]
        self.hi: list[int] = [-1]
        self.lits: list[LitSet | None] = [None]
        self._unique: dict[tuple, int] = {}
        self.empty = empty

    def __len__(self):
        return len(self.var)

    # literal sets

    def litset(self, lits: Iterable[int]) -> LitSet:
        """Intern a literal set; raises :class:`InconsistentSet`."""
        key = lits if isinstance(lits, frozenset) else frozenset(lits)
        found = self._litsets.get(key)
        if found is None:
            found = LitSet(key)
            self._litsets[found] = found
        return found

    # node construction

    def true(self, lits: Iterable[int] = ()) -> int:
        ls = self.litset(lits)
        key = (TRUE_VAR, -1, -1, ls)
        ref = self._unique.get(key)
        if ref is None:
            ref = self._append(key)
        return ref

    def decision(self, var: int, lo: int, hi: int, lits: Iterable[int] = ()) -> int:
        ls = self.litset(lits)
        key = (var, lo, hi, ls)
        ref = self._unique.get(key)
        if ref is not None:
            return ref
        n = len(self.var)
        if not (0 <= lo < n and 0 <= hi < n):
            raise ForeignRef(f"child reference out of range: {lo}, {hi}")
        if var <= 0:
            raise MalformedNode(f"bad decision variable {var}")
        if lo == FALSE and hi == FALSE:
            raise MalformedNode("decision node with two False children")
        if var in ls.vars:
            raise MalformedNode(f"variable {var} appears in its own literal set")
        return self._append(key)

    def mk(self, node: Node) -> int:
        """Return the reference of ``node``, creating it if needed."""
        if node.var == TRUE_VAR:
            if node.lits is None:
                return FALSE
            return self.true(node.lits)
        return self.decision(node.var, node.lo, node.hi, node.lits or ())

    def with_lits(self, ref: int, lits: Iterable[int]) -> int:
        """Copy of node ``ref`` whose literal set is replaced by ``lits``."""
        if ref == FALSE:
            return FALSE
        if self.var[ref] == TRUE_VAR:
            return self.true(lits)
        return self.decision(self.var[ref], self.lo[ref], self.hi[ref], lits)

    def _append(self, key) -> int:
        ref = len(self.var)
        var, lo, hi, ls = key
        self.var.append(var)
        self.lo.append(lo)
        self.hi.append(hi)
        self.lits.append(ls)
        self._unique[key] = ref
        return ref

    # inspection

    def node(self, ref: int) -> Node:
        self.check(ref)
        if ref == FALSE:
            return Node.false()
        return Node(self.var[ref], self.lo[ref], self.hi[ref], self.lits[ref])

    def check(self, ref: int) -> None:
        if not 0 <= ref < len(self.var):
            raise ForeignRef(f"reference {ref} not in store")

    def is_terminal(self, ref: int) -> bool:
        return self.var[ref] == TRUE_VAR

    def is_true(self, ref: int) -> bool:
        return ref != FALSE and self.var[ref] == TRUE_VAR

    def reachable(self, root: int) -> list[int]:
        """Reachable refs in bottom-up (children first) order."""
        order: list[int] = []
        done: set[int] = set()
        stack = [root]
        while stack:
            ref = stack[-1]
            if ref in done:
                stack.pop()
                continue
            if self.var[ref] != TRUE_VAR:
                pending = [c for c in (self.hi[ref], self.lo[ref]) if c not in done]
                if pending:
                    stack.extend(pending)
                    continue
            done.add(ref)
            order.append(ref)
            stack.pop()
        return order

    def support(self, root: int) -> set[int]:
        """Variables appearing anywhere below ``root`` (VARs)."""
        out: set[int] = set()
        for ref in self.reachable(root):
            if ref == FALSE:
                continue
            out |= self.lits[ref].vars
            if self.var[ref] != TRUE_VAR:
                out.add(self.var[ref])
        return out


def intern_literal_set(store: Store, lits: Iterable[int]) -> LitSet:
    return store.litset(lits)


def evaluate(store: Store, root: int, assignment: Iterable[int]) -> bool:
    """Truth value of the diagram under a complete assignment."""
    truth = {}
    for lit in assignment:
        truth[abs(lit)] = lit > 0
    missing = store.support(root) - truth.keys()
    if missing:
        raise IncompleteAssignment(f"unassigned variables {sorted(missing)}")
    ref = root
    while True:
        if ref == FALSE:
            return False
        for lit in store.lits[ref]:
            if truth[abs(lit)] != (lit > 0):
                return False
        var = store.var[ref]
        if var == TRUE_VAR:
            return True
        ref = store.hi[ref] if truth[var] else store.lo[ref]


def compute_linf(store: Store, root: int) -> dict[int, LitSet]:
    """Maximal implied-literal set of every reachable non-False node."""
    linf: dict[int, LitSet] = {}
    for ref in store.reachable(root):
        if ref == FALSE:
            continue
        own = store.lits[ref]
        var = store.var[ref]
        if var == TRUE_VAR:
            linf[ref] = own
            continue
        lo, hi = store.lo[ref], store.hi[ref]
        if lo == FALSE:
            extra = linf[hi] | {var}
        elif hi == FALSE:
            extra = linf[lo] | {-var}
        else:
            extra = linf[lo] & linf[hi]
        linf[ref] = store.litset(own | extra) if extra else own
    return linf


@dataclass
class ValidationReport:
    level: str
    violations: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


LEVELS = ("bddl", "obddl_weak", "obddl", "reduced", "robdd")


def validate(store: Store, root: int, level: str = "robdd", i: float | None = None) -> ValidationReport:
    """Check the structural definitions cumulatively up to ``level``.

    ``level="robdd"`` needs the implied-literal bound ``i`` (``math.inf`` for
    ROBDD-inf). Violations are reported, not raised.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    if level == "robdd" and i is None:
        raise ValueError("level 'robdd' needs i")
    depth = LEVELS.index(level)
    name = level if level != "robdd" else f"robdd_{i}"
    report = ValidationReport(name)
    bad = report.violations
    nodes = store.reachable(root)

    varsets: dict[int, frozenset] = {}
    for ref in nodes:
        if ref == FALSE:
            varsets[ref] = frozenset()
            continue
        ls = store.lits[ref]
        var = store.var[ref]
        if var == TRUE_VAR:
            varsets[ref] = ls.vars
            continue
        lo, hi = store.lo[ref], store.hi[ref]
        below = varsets[lo] | varsets[hi]
        varsets[ref] = below | ls.vars | {var}
        if var in ls.vars:
            bad.append((ref, "decision variable appears in its literal set"))
        if ls.vars & below:
            bad.append((ref, "literal-set variable reappears in a descendant"))
        if lo == FALSE and hi == FALSE:
            bad.append((ref, "both children are False"))
        if depth >= 1:
            for child in (lo, hi):
                if child == FALSE:
                    continue
                cvars = store.lits[child].vars
                if store.var[child] != TRUE_VAR:
                    cvars = cvars | {store.var[child]}
                if cvars and min(cvars) <= var:
                    bad.append((ref, "child mentions a variable not greater than the decision variable"))
                    break
    if depth < 2:
        return report

    linf = compute_linf(store, root) if root != FALSE else {}
    for ref in nodes:
        if ref == FALSE or store.var[ref] == TRUE_VAR:
            continue
        own = store.lits[ref]
        rest = linf[ref] - own
        if own and rest and max(own.vars) > min(abs(l) for l in rest):
            bad.append((ref, "literal set is not a prefix of the maximal implied set"))
    if depth < 3:
        return report

    seen_keys = {}
    for ref in nodes:
        if ref == FALSE:
            continue
        key = (store.var[ref], store.lo[ref], store.hi[ref], store.lits[ref])
        if key in seen_keys:
            bad.append((ref, f"duplicate of node {seen_keys[key]}"))
        seen_keys[key] = ref
        if store.var[ref] != TRUE_VAR and store.lo[ref] == store.hi[ref]:
            bad.append((ref, "identical children"))
    if depth < 4:
        return report

    for ref in nodes:
        if ref == FALSE:
            if root != FALSE and i == float("inf"):
                bad.append((ref, "False node in a satisfiable ROBDD-inf"))
            continue
        size = store.lits[ref].size
        if size == i:
            continue
        if size > i:
            bad.append((ref, f"{size} implied literals exceeds {i}"))
        elif store.lits[ref] != linf[ref]:
            bad.append((ref, "fewer than i implied literals but not maximal"))
    return report


def stats(store: Store, root: int) -> dict[str, int]:
    """Reachable node, edge and decision-node counts."""
    nodes = store.reachable(root)
    decisions = sum(1 for ref in nodes if store.var[ref] != TRUE_VAR)
    return {"nodes": len(nodes), "edges": 2 * decisions, "decisionNodes": decisions}
