"""CNF formulas, DIMACS input, a CDCL solver and Horn-theory helpers."""
from __future__ import annotations

import time
import warnings
from typing import Iterable, Sequence

from robddl.core import InconsistentSet, lit_key


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class HeaderMismatch(UserWarning):
    """The DIMACS header disagrees with the clause data."""


class ModelDoesNotSatisfy(ValueError):
    pass


class NotHorn(ValueError):
    pass


class UnsatInput(ValueError):
    pass


class CnfFormula:
    """A CNF formula with stable clause positions.

    ``clauses[k]`` is a tuple of literals, or ``None`` once clause ``k`` has
    been satisfied by conditioning. ``term`` holds every literal conditioned
    away since the unconditioned ``base`` formula.
    """

    __slots__ = ("num_vars", "clauses", "term", "base", "_vars")

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int] | None],
                 term: frozenset = frozenset(), base: "CnfFormula | None" = None):
        self.num_vars = num_vars
        self.clauses = [None if c is None else tuple(c) for c in clauses]
        self.term = frozenset(term)
        self.base = self if base is None else base
        self._vars = None

    def __repr__(self):
        return f"CnfFormula({self.num_vars}, {self.clauses!r})"

    def live(self) -> list[tuple[int, ...]]:
        return [c for c in self.clauses if c is not None]

    @property
    def is_true(self) -> bool:
        return all(c is None for c in self.clauses)

    @property
    def has_empty_clause(self) -> bool:
        return any(c is not None and not c for c in self.clauses)

    def variables(self) -> frozenset[int]:
        """Variables occurring in unsatisfied clauses."""
        if self._vars is None:
            self._vars = frozenset(abs(l) for c in self.clauses if c for l in c)
        return self._vars

    def satisfied_mask(self) -> int:
        mask = 0
        for k, c in enumerate(self.clauses):
            if c is None:
                mask |= 1 << k
        return mask

    def satisfied_by(self, model: Iterable[int]) -> bool:
        m = model if isinstance(model, (set, frozenset)) else set(model)
        return all(any(l in m for l in c) for c in self.clauses if c is not None)

    def condition(self, term: Iterable[int]) -> "CnfFormula":
        return condition_cnf(self, term)

    def to_dimacs(self) -> str:
        live = self.live()
        lines = [f"p cnf {self.num_vars} {len(live)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in live]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str | bytes) -> CnfFormula:
    """Parse DIMACS CNF. Duplicate literals are merged, tautologies dropped."""
    if isinstance(text, bytes):
        text = text.decode()
    header = None
    clauses: list[tuple[int, ...]] = []
    raw_count = 0
    current: list[int] = []
    max_var = 0
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"bad problem line {line!r}", lineno) from None
            continue
        if header is None:
            raise ParseError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                raw_count += 1
                clause = _normalize(current)
                if clause is not None:
                    clauses.append(clause)
                current = []
            else:
                max_var = max(max_var, abs(lit))
                current.append(lit)
    if current:
        raise ParseError("last clause is not terminated by 0", lineno)
    if header is None:
        raise ParseError("missing problem line", lineno)
    num_vars, num_clauses = header
    if num_clauses != raw_count:
        warnings.warn(f"header declares {num_clauses} clauses, found {raw_count}", HeaderMismatch)
    if max_var > num_vars:
        warnings.warn(f"header declares {num_vars} variables, found {max_var}", HeaderMismatch)
        num_vars = max_var
    return CnfFormula(num_vars, clauses)


def _normalize(lits: Iterable[int]) -> tuple[int, ...] | None:
    s = set(lits)
    if any(-l in s for l in s):
        return None
    return tuple(sorted(s, key=lit_key))


def condition_cnf(cnf: CnfFormula, term: Iterable[int]) -> CnfFormula:
    """Condition on a consistent term, keeping satisfied clauses as ``None``."""
    t = frozenset(term)
    if any(-l in t for l in t):
        raise InconsistentSet("conditioning term is inconsistent")
    if not t:
        return cnf
    neg = frozenset(-l for l in t)
    out = []
    for c in cnf.clauses:
        if c is None or any(l in t for l in c):
            out.append(None)
        elif any(l in neg for l in c):
            out.append(tuple(l for l in c if l not in neg))
        else:
            out.append(c)
    return CnfFormula(cnf.num_vars, out, cnf.term | t, cnf.base)


class Solver:
    """Conflict-driven clause-learning solver with assumptions.

    Two watched literals, first-UIP learning, VSIDS-style activities, phase
    saving and geometric restarts. Learnt clauses are kept between calls to
    :meth:`solve`, so repeated queries on one base formula share work.
    """

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]]):
        n = num_vars
        self.num_vars = n
        self.value = [0] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason: list[int | None] = [None] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.phase = [False] * (n + 1)
        self.var_inc = 1.0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 1)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.conflicts = 0
        self.num_learnt = 0
        for c in clauses:
            self._add_base(c)
        if self.ok and self._propagate() is not None:
            self.ok = False

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _add_base(self, lits: Sequence[int]) -> None:
        if not self.ok:
            return
        c = _normalize(lits)
        if c is None:
            return
        for lit in c:
            if abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} exceeds {self.num_vars} variables")
        if not c:
            self.ok = False
        elif len(c) == 1:
            val = self._lit_value(c[0])
            if val == -1:
                self.ok = False
            elif val == 0:
                self._enqueue(c[0], None)
        else:
            self._attach(list(c))

    def _attach(self, c: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(c)
        n = self.num_vars
        self.watches[c[0] + n].append(ci)
        self.watches[c[1] + n].append(ci)
        return ci

    def _enqueue(self, lit: int, reason: int | None) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int | None:
        value = self.value
        watches = self.watches
        clauses = self.clauses
        trail = self.trail
        n = self.num_vars
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            fl = -p
            ws = watches[fl + n]
            kept: list[int] = []
            i = 0
            nws = len(ws)
            while i < nws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == fl:
                    c[0], c[1] = c[1], fl
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    kv = value[abs(lk)]
                    if (kv if lk > 0 else -kv) != -1:
                        c[1], c[k] = lk, fl
                        watches[lk + n].append(ci)
                        break
                else:
                    kept.append(ci)
                    if (fv if first > 0 else -fv) == -1:
                        kept.extend(ws[i:])
                        watches[fl + n] = kept
                        self.qhead = len(trail)
                        return ci
                    self._enqueue(first, ci)
            watches[fl + n] = kept
        return None

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        level = self.level
        current = len(self.trail_lim)
        path = 0
        p = None
        idx = len(self.trail) - 1
        c = self.clauses[confl]
        while True:
            for q in (c if p is None else c[1:]):
                v = abs(q)
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= current:
                        path += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            path -= 1
            if path == 0:
                break
            c = self.clauses[self.reason[abs(p)]]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = lit > 0
            self.value[v] = 0
            self.reason[v] = None
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        best = 0
        best_act = -1.0
        value = self.value
        act = self.activity
        for v in range(1, self.num_vars + 1):
            if value[v] == 0 and act[v] > best_act:
                best, best_act = v, act[v]
        if best == 0:
            return 0
        return best if self.phase[best] else -best

    def solve(self, assumptions: Iterable[int] = ()) -> frozenset | None:
        """A complete model extending ``assumptions``, or ``None`` if unsat."""
        if not self.ok:
            return None
        assumptions = list(assumptions)
        for lit in assumptions:
            if not 0 < abs(lit) <= self.num_vars:
                raise ValueError(f"assumption {lit} out of range")
        restart_limit = 100
        conflicts_here = 0
        try:
            while True:
                confl = self._propagate()
                if confl is not None:
                    self.conflicts += 1
                    conflicts_here += 1
                    if not self.trail_lim:
                        self.ok = False
                        return None
                    learnt, back = self._analyze(confl)
                    self._cancel_until(back)
                    if len(learnt) == 1:
                        self._enqueue(learnt[0], None)
                    else:
                        ci = self._attach(learnt)
                        self.num_learnt += 1
                        self._enqueue(learnt[0], ci)
                    self.var_inc /= 0.95
                    continue
                if conflicts_here >= restart_limit:
                    conflicts_here = 0
                    restart_limit = int(restart_limit * 1.5)
                    self._cancel_until(0)
                    continue
                lvl = len(self.trail_lim)
                if lvl < len(assumptions):
                    a = assumptions[lvl]
                    val = self._lit_value(a)
                    if val == -1:
                        return None
                    self.trail_lim.append(len(self.trail))
                    if val == 0:
                        self._enqueue(a, None)
                    continue
                lit = self._pick()
                if lit == 0:
                    return frozenset(v if self.value[v] > 0 else -v
                                     for v in range(1, self.num_vars + 1))
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, None)
        finally:
            self._cancel_until(0)


class Decider:
    """Counts and times satisfiability queries against one base formula."""

    def __init__(self, base: CnfFormula):
        self.base = base.base
        self.solver = Solver(self.base.num_vars, self.base.live())
        self.calls = 0
        self.seconds = 0.0

    def __call__(self, cnf: CnfFormula, assumptions: Iterable[int] = ()) -> frozenset | None:
        if cnf.base is not self.base:
            raise ValueError("formula was not derived from this decider's base")
        start = time.perf_counter()
        self.calls += 1
        try:
            if cnf.has_empty_clause:
                return None
            return self.solver.solve(sorted(cnf.term, key=lit_key) + list(assumptions))
        finally:
            self.seconds += time.perf_counter() - start


def decide(cnf: CnfFormula, assumptions: Iterable[int] = ()) -> frozenset | None:
    """One-shot satisfiability check of ``cnf`` under ``assumptions``."""
    assumptions = list(assumptions)
    s = set(assumptions)
    if any(-l in s for l in s):
        raise InconsistentSet("assumptions are inconsistent")
    return Decider(cnf)(cnf, assumptions)


def horn_app(cnf: CnfFormula, model: Iterable[int]) -> CnfFormula:
    """Horn lower approximation of ``cnf`` built around ``model``.

    Each clause keeps its negative literals and one positive literal: one that
    the model satisfies if possible, otherwise the smallest positive one.
    """
    m = frozenset(model)
    if not cnf.satisfied_by(m):
        raise ModelDoesNotSatisfy("model falsifies the formula")
    out: list[tuple[int, ...]] = []
    seen = set()
    for c in cnf.live():
        positives = [l for l in c if l > 0]
        keep = [l for l in positives if l in m] or positives
        head = (min(keep),) if keep else ()
        clause = tuple(sorted([l for l in c if l < 0] + list(head), key=lit_key))
        if clause not in seen:
            seen.add(clause)
            out.append(clause)
    return CnfFormula(cnf.num_vars, out)


def is_horn(cnf: CnfFormula) -> bool:
    return all(sum(1 for l in c if l > 0) <= 1 for c in cnf.live())


class _HornChainer:
    """Forward chaining over a Horn clause set."""

    def __init__(self, clauses: list[tuple[int, ...]]):
        self.clauses = clauses
        self.body_size = [sum(1 for l in c if l < 0) for c in clauses]
        self.head = [next((l for l in c if l > 0), 0) for c in clauses]
        self.occurs: dict[int, list[int]] = {}
        for k, c in enumerate(clauses):
            for l in c:
                if l < 0:
                    self.occurs.setdefault(-l, []).append(k)

    def close(self, facts: Iterable[int]) -> set[int] | None:
        """Least set of true atoms containing ``facts``; None on conflict."""
        remaining = list(self.body_size)
        true: set[int] = set()
        queue = []
        for k, size in enumerate(remaining):
            if size == 0:
                if self.head[k] == 0:
                    return None
                queue.append(self.head[k])
        queue.extend(facts)
        while queue:
            a = queue.pop()
            if a in true:
                continue
            true.add(a)
            for k in self.occurs.get(a, ()):
                remaining[k] -= 1
                if remaining[k] == 0:
                    h = self.head[k]
                    if h == 0:
                        return None
                    queue.append(h)
        return true


def horn_implied_literals(horn: CnfFormula) -> frozenset[int]:
    """All literals implied by a satisfiable Horn formula."""
    if not is_horn(horn):
        raise NotHorn("formula has a clause with two positive literals")
    chainer = _HornChainer(horn.live())
    least = chainer.close(())
    if least is None:
        raise UnsatInput("Horn formula is unsatisfiable")
    implied = set(least)
    for v in horn.variables():
        if v in least:
            continue
        # v is implied false when assuming it true derives a conflict
        if chainer.close(least | {v}) is None:
            implied.add(-v)
    return frozenset(implied)
