import random

import pytest
from hypothesis import given, settings, strategies as st

from robddl.compile import (INF, CompileConfig, Compiler, build, build_inf, cache_key,
                            get_imps, get_imps_cnf, parse_level)
from robddl.core import FALSE, Store, stats, validate
from robddl.oracle import (build_bf, generate_family, implied_literals_bf, model_count_bf,
                           random_3cnf, random_cnf, table_of_cnf, table_of_diagram,
                           equivalent_bf)
from robddl.query import count
from robddl.sat import CnfFormula, Decider

PHI4 = CnfFormula(4, [(1, 3), (-2, 3), (-1, -4), (3, 4)])


def nodes(store, root):
    return stats(store, root)["nodes"]


def test_chain2_sizes():
    s = Store()
    f = generate_family("chain", 2)
    assert nodes(s, build(s, f, 1)) == 5
    assert nodes(s, build(s, f, 0)) == 11
    assert nodes(s, build(s, generate_family("chain", 3), 1)) == 7


def test_unsat_is_false_with_one_call():
    s = Store()
    assert build(s, CnfFormula(1, [()]), 2) == FALSE
    f = CnfFormula(2, [(1,), (-1, 2), (-2,)])
    d = Decider(f)
    assert Compiler(s, f, decider=d).build_inf(f) == FALSE
    assert d.calls == 1
    assert build(s, f, 1) == FALSE and build(s, f, 0) == FALSE


def test_uf20_count_matches_oracle():
    f = random_3cnf(random.Random(0))
    s = Store()
    r = build_inf(s, f)
    assert count(s, r, 20) == model_count_bf(table_of_cnf(f))


def test_get_imps_examples():
    lits, omega = get_imps(PHI4, [], Decider(PHI4))
    assert lits == {3} and len(omega) >= 2
    f = CnfFormula(1, [(1,)])
    assert get_imps(f, [], Decider(f))[0] == {1}
    f = CnfFormula(2, [(1, 2)])
    assert get_imps(f, [], Decider(f))[0] == set()
    f = CnfFormula(2, [(1, 2), (-1, 2)])
    assert get_imps_cnf(f, [], Decider(f))[0] == {2}


class _Recording:
    def __init__(self, cnf):
        self.real = Decider(cnf)
        self.results = []

    def __call__(self, cnf, assumptions=()):
        m = self.real(cnf, assumptions)
        self.results.append(m)
        return m


def test_get_imps_cnf_on_horn_input():
    # on Horn input the candidates are exact: every call confirms one literal
    f = CnfFormula(4, [(1,), (-1, 2), (-2, -3), (-4, 3, -1)])
    d = _Recording(f)
    seed = d(f)
    lits, _ = get_imps_cnf(f, [seed], d)
    assert lits == implied_literals_bf(table_of_cnf(f)) == {1, 2, -3, -4}
    assert d.results[1:] == [None] * len(lits)
    f = CnfFormula(3, [(1,), (-2, -3)])
    d = _Recording(f)
    get_imps_cnf(f, [d(f)], d)
    assert len(d.results) - 1 == 1


def test_cache_key():
    f = CnfFormula(4, [(1, -2), (-1, 2), (3, -4)])
    assert cache_key(f, [1, 2]) == cache_key(f, [-1, -2])
    assert cache_key(f, [1, 2]) != cache_key(f, [1, -2])
    assert cache_key(f, []) == cache_key(f, [])
    assert cache_key(f, [1, 2]) == cache_key(f.condition([1, 2]).base, f.condition([1, 2]).term)


def test_config_and_levels():
    assert parse_level("inf") == INF and parse_level("3") == 3
    with pytest.raises(ValueError):
        CompileConfig(level=-1)
    with pytest.raises(ValueError):
        CompileConfig(imps="guess")
    with pytest.raises(ValueError):
        build_inf(Store(), PHI4, CompileConfig(level=2))


def test_chain_all_levels_coincide():
    for n in range(1, 6):
        s = Store()
        f = generate_family("chain", n)
        roots = {build(s, f, i) for i in (1, 2, 3, 2 * n, INF)} | {build_inf(s, f)}
        assert len(roots) == 1


def test_fan_growth_rate():
    # i=1 sizes grow by a factor of about 2 every two steps, i=2 sizes linearly
    one, two = [], []
    for n in range(1, 9):
        s = Store()
        f = generate_family("fan", n, 1)
        one.append(nodes(s, build(s, f, 1)))
        two.append(nodes(s, build(s, f, 2)))
    assert two == [2 * n + 1 for n in range(1, 9)]
    assert all(b / a >= 2 for a, b in zip(one, one[2:]))
    assert all(b > a for a, b in zip(one, one[1:]))
    s = Store()
    f = generate_family("fan", 2, 1)
    assert nodes(s, build(s, f, 2)) < nodes(s, build(s, f, 1))


cnfs = st.builds(lambda seed, n, m: random_cnf(random.Random(seed), n, m),
                 st.integers(0, 10**6), st.integers(1, 8), st.integers(0, 20))


@settings(max_examples=150, deadline=None)
@given(cnfs, st.sampled_from([0, 1, 2, 3, INF]))
def test_build_matches_definition(cnf, i):
    s = Store()
    root = build(s, cnf, i)
    assert root == build_bf(s, table_of_cnf(cnf), i)
    assert validate(s, root, "robdd", i=i).ok
    assert equivalent_bf(table_of_diagram(s, root, range(1, cnf.num_vars + 1)), table_of_cnf(cnf))


@settings(max_examples=100, deadline=None)
@given(cnfs, st.booleans(), st.sampled_from(["models", "horn"]))
def test_build_inf_options_agree(cnf, cache, imps):
    s = Store()
    ref = build(s, cnf, INF)
    assert build_inf(s, cnf, CompileConfig(cnf_cache=cache, imps=imps)) == ref
    assert build(s, cnf, 2, cnf_cache=cache) == build(s, cnf, 2, cnf_cache=not cache)


@settings(max_examples=100, deadline=None)
@given(cnfs)
def test_imps_strategies_agree(cnf):
    d = Decider(cnf)
    if d(cnf) is None:
        return
    expect = implied_literals_bf(table_of_cnf(cnf))
    assert get_imps(cnf, [], d)[0] == expect
    assert get_imps_cnf(cnf, [], d)[0] == expect
