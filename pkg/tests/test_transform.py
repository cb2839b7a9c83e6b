import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import is_free, live_decisions, random_obddl
from robddl.compile import INF, build, build_inf
from robddl.core import FALSE, Store, stats, validate
from robddl.oracle import (equivalent_bf, generate_family, random_cnf, table_of_cnf,
                           table_of_diagram)
from robddl.transform import (InconsistentMerge, InputNotInf, add_to_inf, inf2fbdd,
                              inf2robdd, reduce)


def nodes(store, root):
    return stats(store, root)["nodes"]


def chain2(s, i):
    return build(s, generate_family("chain", 2), i)


def test_reduce_examples():
    s = Store()
    r = chain2(s, 1)
    assert reduce(s, r) == r
    t = s.true()
    assert reduce(s, s.decision(1, t, t)) == t
    # identical children merge their literal sets into the survivor
    assert reduce(s, s.decision(1, s.true([2]), s.true([2]), [3])) == s.true([2, 3])
    with pytest.raises(InconsistentMerge):
        reduce(s, s.decision(1, s.true([-2]), s.true([-2]), [2]))


def test_add_to_inf_examples():
    s = Store()
    r1 = chain2(s, 1)
    assert add_to_inf(s, chain2(s, 0)) == r1
    assert add_to_inf(s, r1) == r1
    assert add_to_inf(s, s.decision(1, FALSE, s.true([3]))) == s.true([1, 3])
    assert add_to_inf(s, FALSE) == FALSE


def test_inf2fbdd_examples():
    s = Store()
    d = inf2fbdd(s, s.true([1]))
    assert (s.var[d], s.lo[d], s.hi[d]) == (1, FALSE, s.true())
    d = inf2fbdd(s, s.true([-1]))
    assert (s.var[d], s.lo[d], s.hi[d]) == (1, s.true(), FALSE)
    d = inf2fbdd(s, s.true([1, -2]))
    assert d == s.decision(1, FALSE, s.decision(2, s.true(), FALSE))
    assert nodes(s, d) == 4
    fb = inf2fbdd(s, chain2(s, 1))
    # shared chains make this 8 nodes, False included
    assert nodes(s, fb) == 8 and is_free(s, fb)
    assert equivalent_bf(table_of_diagram(s, fb, range(1, 5)),
                         table_of_cnf(generate_family("chain", 2)))
    with pytest.raises(InputNotInf):
        inf2fbdd(s, chain2(s, 0))


def test_inf2robdd_examples():
    s = Store()
    assert inf2robdd(s, chain2(s, 1)) == chain2(s, 0)
    f = generate_family("chain", 3)
    r = inf2robdd(s, build_inf(s, f))
    assert r == build(s, f, 0) and nodes(s, r) > 2 ** 4
    with pytest.raises(InputNotInf):
        inf2robdd(s, chain2(s, 0))


cnfs = st.builds(lambda seed, n, m: random_cnf(random.Random(seed), n, m),
                 st.integers(0, 10**6), st.integers(1, 8), st.integers(0, 20))


@settings(max_examples=120, deadline=None)
@given(cnfs, st.sampled_from([0, 1, 2, INF]), st.integers(0, 10**6))
def test_add_to_inf_on_perturbed(cnf, i, seed):
    s = Store()
    p = random_obddl(s, build(s, cnf, i), random.Random(seed))
    q = add_to_inf(s, p)
    assert q == build_inf(s, cnf)
    assert nodes(s, q) <= 2 * live_decisions(s, p) + 1
    assert validate(s, q, "robdd", i=INF).ok


@settings(max_examples=120, deadline=None)
@given(cnfs)
def test_conversions_preserve_meaning(cnf):
    s = Store()
    universe = range(1, cnf.num_vars + 1)
    tab = table_of_cnf(cnf)
    rinf = build_inf(s, cnf)
    r0 = inf2robdd(s, rinf)
    assert r0 == build(s, cnf, 0)
    fb = inf2fbdd(s, rinf)
    assert is_free(s, fb)
    assert equivalent_bf(table_of_diagram(s, fb, universe), tab)
    assert reduce(s, reduce(s, fb)) == reduce(s, fb)
