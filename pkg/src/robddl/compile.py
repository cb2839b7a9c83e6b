"""Top-down compilation of CNF into ROBDD-i.

``build`` handles every level i (0, finite, or ``INF``); ``build_inf`` is the
model-guided compiler for i = INF. Every satisfiability query goes through a
single :class:`~robddl.sat.Decider` per compilation, with the conditioned
part of a sub-formula passed as assumptions, so learnt clauses carry over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from robddl.core import FALSE, Store, lit_key
from robddl.sat import CnfFormula, Decider, horn_app, horn_implied_literals
from robddl.transform import reduce

INF = math.inf

DecideFn = Callable[[CnfFormula, tuple], "frozenset | None"]


@dataclass(frozen=True)
class CacheKey:
    assigned: tuple[int, ...]
    satisfied: int


def cache_key(cnf: CnfFormula, assignment) -> CacheKey:
    """Key of ``cnf | assignment``: assigned variables plus satisfied-clause bits."""
    a = frozenset(assignment)
    bits = 0
    for k, c in enumerate(cnf.base.clauses):
        if c is not None and any(l in a for l in c):
            bits |= 1 << k
    return CacheKey(tuple(sorted(abs(l) for l in a)), bits)


def _key(cnf: CnfFormula) -> CacheKey:
    # same value as cache_key(cnf.base, cnf.term), read off the placeholders
    return CacheKey(tuple(sorted(abs(l) for l in cnf.term)), cnf.satisfied_mask())


@dataclass
class CompileConfig:
    level: float = INF
    imps: str = "models"
    cnf_cache: bool = True

    def __post_init__(self):
        if self.imps not in ("models", "horn"):
            raise ValueError(f"unknown implied-literal strategy {self.imps!r}")
        if self.level != INF and (self.level < 0 or int(self.level) != self.level):
            raise ValueError(f"bad level {self.level!r}")


def parse_level(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return INF
    return int(text)


def _candidates(cnf: CnfFormula) -> list[int]:
    return [l for v in sorted(cnf.variables()) for l in (v, -v)]


def get_imps(cnf: CnfFormula, omega: list, decide: DecideFn) -> tuple[frozenset, list]:
    """Implied literals of a satisfiable ``cnf``, pruned by known models."""
    cands = {l for l in _candidates(cnf) if not any(-l in m for m in omega)}
    found: set[int] = set()
    while True:
        open_ = cands - found
        if not open_:
            break
        lit = min(open_, key=lit_key)
        model = decide(cnf, (-lit,))
        if model is None:
            found.add(lit)
        else:
            omega.append(model)
            cands &= model
    return frozenset(found), omega


def get_imps_cnf(cnf: CnfFormula, omega: list, decide: DecideFn) -> tuple[frozenset, list]:
    """Like :func:`get_imps`, but candidates are pruned by Horn approximations."""
    cands = set(_candidates(cnf))
    for m in omega:
        cands &= horn_implied_literals(horn_app(cnf, m))
    found: set[int] = set()
    while True:
        open_ = cands - found
        if not open_:
            break
        lit = min(open_, key=lit_key)
        model = decide(cnf, (-lit,))
        if model is None:
            found.add(lit)
        else:
            omega.append(model)
            cands &= horn_implied_literals(horn_app(cnf, model))
    return frozenset(found), omega


def _flip(model: frozenset, var: int) -> frozenset:
    lit = var if var in model else -var
    return (model - {lit}) | {-lit}


class Compiler:
    """One compilation context: a store, a decider and a CNF cache."""

    def __init__(self, store: Store, cnf: CnfFormula, *, cnf_cache: bool = True,
                 imps: str = "models", decider: DecideFn | None = None):
        self.store = store
        self.base = cnf.base
        self.decide = decider if decider is not None else Decider(self.base)
        self.cache: dict | None = {} if cnf_cache else None
        self.imps = get_imps_cnf if imps == "horn" else get_imps

    # level-i compilation with implied-literal scan and omission

    def build(self, cnf: CnfFormula, i: float) -> int:
        if i == 0:
            return reduce(self.store, self._build0(cnf))
        if i == INF:
            return reduce(self.store, self._build_i(cnf, INF))
        return self._build_i(cnf, i)

    def _cached(self, cnf, i, fn):
        if self.cache is None:
            return fn()
        key = (i, _key(cnf))
        ref = self.cache.get(key)
        if ref is None:
            ref = self.cache[key] = fn()
        return ref

    def _build0(self, cnf: CnfFormula) -> int:
        if cnf.has_empty_clause:
            return FALSE
        if cnf.is_true:
            return self.store.true()
        return self._cached(cnf, 0, lambda: self._branch0(cnf))

    def _branch0(self, cnf: CnfFormula) -> int:
        x = min(cnf.variables())
        lo = self._build0(cnf.condition((-x,)))
        hi = self._build0(cnf.condition((x,)))
        if lo == FALSE and hi == FALSE:
            return FALSE
        return self.store.decision(x, lo, hi)

    def _build_i(self, cnf: CnfFormula, i: float) -> int:
        if cnf.has_empty_clause:
            return FALSE
        return self._cached(cnf, i, lambda: self._node_i(cnf, i))

    def _node_i(self, cnf: CnfFormula, i: float) -> int:
        first = self.decide(cnf, ())
        if first is None:
            return FALSE
        models = [first]
        lits: list[int] = []
        for v in sorted(cnf.variables()):
            if len(lits) >= i:
                break
            for lit in (v, -v):
                if any(-lit in m for m in models):
                    continue
                m = self.decide(cnf, (-lit,))
                if m is None:
                    lits.append(lit)
                    break
                models.append(m)
        cnf = cnf.condition(lits)
        branch = 0
        if i == INF:
            if cnf.variables():
                branch = min(cnf.variables())
        else:
            for v in sorted(cnf.variables()):
                if v not in cnf.variables():
                    continue  # vanished after omitting a smaller variable
                if not self._omittable(cnf, v, models):
                    branch = v
                    break
                cnf = cnf.condition((v,))
                models = [m if v in m else _flip(m, v) for m in models]
        if branch == 0:
            return self.store.true(lits)
        lo = self._build_i(cnf.condition((-branch,)), i)
        hi = self._build_i(cnf.condition((branch,)), i)
        return self.store.decision(branch, lo, hi, lits)

    def _omittable(self, cnf: CnfFormula, x: int, models: list) -> bool:
        """Whether ``cnf|x`` and ``cnf|-x`` are equivalent."""
        pos = [c for c in cnf.live() if x in c]
        neg = [c for c in cnf.live() if -x in c]
        touched = [set(c) for c in pos + neg]
        for m in models:
            flipped = _flip(m, x)
            if not all(c & flipped for c in touched):
                return False
        # cnf|-x entails each clause of cnf|x, and the other way round
        for lit, clauses in ((x, pos), (-x, neg)):
            for c in clauses:
                rest = [l for l in c if l != lit]
                m = self.decide(cnf, (lit,) + tuple(-l for l in rest))
                if m is not None:
                    models.append(m)
                    return False
        return True

    # model-guided compilation for i = INF

    def build_inf(self, cnf: CnfFormula) -> int:
        first = self.decide(cnf, ())
        if first is None:
            return FALSE
        return reduce(self.store, self._inf_sub(cnf, [first]))

    def _inf_sub(self, cnf: CnfFormula, omega: list) -> int:
        if self.cache is not None:
            key = ("inf", _key(cnf))
            ref = self.cache.get(key)
            if ref is None:
                ref = self.cache[key] = self._inf_node(cnf, omega)
            return ref
        return self._inf_node(cnf, omega)

    def _inf_node(self, cnf: CnfFormula, omega: list) -> int:
        lits, omega = self.imps(cnf, list(omega), self.decide)
        cnf = cnf.condition(lits)
        if cnf.is_true:
            return self.store.true(lits)
        x = min(cnf.variables())
        lo = self._inf_sub(cnf.condition((-x,)), [m for m in omega if -x in m])
        hi = self._inf_sub(cnf.condition((x,)), [m for m in omega if x in m])
        return self.store.decision(x, lo, hi, lits)


def build(store: Store, cnf: CnfFormula, i: float, *, cnf_cache: bool = True,
          decider: DecideFn | None = None) -> int:
    """Canonical ROBDD-i of ``cnf`` in ``store``."""
    return Compiler(store, cnf, cnf_cache=cnf_cache, decider=decider).build(cnf, i)


def build_inf(store: Store, cnf: CnfFormula, config: CompileConfig | None = None,
              decider: DecideFn | None = None) -> int:
    """Canonical ROBDD-inf of ``cnf`` via model-guided implied-literal search."""
    config = config or CompileConfig()
    if config.level != INF:
        raise ValueError("build_inf compiles level inf only")
    comp = Compiler(store, cnf, cnf_cache=config.cnf_cache, imps=config.imps, decider=decider)
    return comp.build_inf(cnf)
