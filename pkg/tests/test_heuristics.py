import math

import pytest

from gridfill import (
    FailedState,
    UnaryCost,
    build_problem,
    damage,
    initial_live,
    min2,
    order_values,
    select_variable,
    state_bound,
)
from gridfill.model import HardConstraint
from conftest import random_problem, t1


class TestStateBound:
    def test_zero_tables_bound_zero(self):
        p = build_problem(["u", "v"], [["a", "b"]] * 2)
        assert state_bound(p, {}, initial_live(p)) == 0.0

    def test_t1_nothing_bound(self):
        p = t1()
        assert state_bound(p, {}, initial_live(p)) == 0.0

    def test_t1_partially_bound(self):
        p = t1()
        live = dict(initial_live(p))
        live[1] = ("a",)
        assert state_bound(p, {0: "a"}, live) == 1.0

    def test_empty_live_raises(self):
        p = t1()
        live = dict(initial_live(p))
        live[1] = ()
        with pytest.raises(FailedState):
            state_bound(p, {}, live)


class TestDamage:
    def test_isolated_variable(self):
        p = build_problem(
            ["u"], [["a", "b", "c"]], soft={0: UnaryCost(0, {"a": 5.0, "b": 1.0, "c": 2.0})}
        )
        live = initial_live(p)
        assert damage(p, {}, live, 0, "a") == 4.0
        assert damage(p, {}, live, 0, "b") == 0.0

    def test_t1_values(self):
        p = t1()
        live = initial_live(p)
        assert damage(p, {}, live, 0, "b") == 3.0
        assert damage(p, {}, live, 0, "a") == 1.0

    def test_emptying_neighbor_is_infinite(self):
        p = build_problem(
            ["u", "v"],
            [["a", "b"], ["a"]],
            [HardConstraint((0, 1), frozenset({("a", "a")}))],
        )
        assert damage(p, {}, initial_live(p), 0, "b") == math.inf

    def test_nonnegative_random(self, rng):
        for _ in range(40):
            p = random_problem(rng, max_vars=5, max_dom=3)
            live = initial_live(p)
            for v in sorted(p.domains):
                for f in p.domains[v]:
                    assert damage(p, {}, live, v, f) >= -1e-12

    def test_neighbor_restriction_matches_full_sum(self, rng):
        # The damage restricted to v and its neighbors equals the full
        # before/after bound difference over all variables.
        from gridfill.propagate import forward_check

        for _ in range(40):
            p = random_problem(rng, max_vars=5, max_dom=3)
            live = initial_live(p)
            before = state_bound(p, {}, live)
            for v in sorted(p.domains):
                for f in p.domains[v]:
                    d = damage(p, {}, live, v, f)
                    res = forward_check(p, {v: f}, v, live)
                    if res.failed:
                        assert d == math.inf
                        continue
                    after = state_bound(p, {v: f}, res.reduced)
                    assert d == pytest.approx(after - before)


class TestOrderValues:
    def test_t1_ordering(self):
        p = t1()
        got = order_values(p, {}, initial_live(p), 0)
        assert [(s.value, s.damage) for s in got] == [("a", 1.0), ("b", 3.0)]

    def test_singleton(self):
        p = build_problem(["u"], [["a"]])
        got = order_values(p, {}, initial_live(p), 0)
        assert [s.value for s in got] == ["a"]

    def test_tie_breaks_on_token(self):
        p = build_problem(["u"], [["c", "a", "b"]])
        got = order_values(p, {}, initial_live(p), 0)
        assert [s.value for s in got] == ["a", "b", "c"]

    def test_pitched_values_excluded(self):
        p = t1()
        got = order_values(p, {}, initial_live(p), 0, pitched=frozenset({(0, "a")}))
        assert [s.value for s in got] == ["b"]

    def test_pitched_singleton_is_forced(self):
        p = t1()
        live = dict(initial_live(p))
        live[0] = ("a",)
        got = order_values(p, {}, live, 0, pitched=frozenset({(0, "a")}))
        assert [s.value for s in got] == ["a"]


class TestMin2:
    def test_plain(self):
        assert min2([1, 2, 3]) == 2

    def test_multiplicity(self):
        assert min2([5, 5]) == 5

    def test_unordered(self):
        assert min2([3, 1, 2]) == 2

    def test_too_few(self):
        with pytest.raises(ValueError):
            min2([1])


class TestSelectVariable:
    def test_forced_variable_wins(self):
        p = build_problem(
            ["u", "v"],
            [["a"], ["a", "b"]],
            soft={1: UnaryCost(1, {"a": 0.0, "b": 5.0})},
        )
        assert select_variable(p, {}, initial_live(p)) == 0

    def test_larger_gap_preferred(self):
        p = build_problem(
            ["u", "v"],
            [["a", "b"], ["a", "b"]],
            soft={
                0: UnaryCost(0, {"a": 0.0, "b": 10.0}),
                1: UnaryCost(1, {"a": 0.0, "b": 1.0}),
            },
        )
        assert select_variable(p, {}, initial_live(p)) == 0

    def test_tie_breaks_to_lowest_id(self):
        p = build_problem(["u", "v"], [["a", "b"], ["a", "b"]])
        assert select_variable(p, {}, initial_live(p)) == 0

    def test_zero_branchable_signals_failure(self):
        p = build_problem(["u"], [["a", "b"]])
        with pytest.raises(FailedState):
            select_variable(
                p, {}, initial_live(p), pitched=frozenset({(0, "a"), (0, "b")})
            )


class TestInvariances:
    def test_constant_shift_preserves_ranking(self, rng):
        for _ in range(30):
            p = random_problem(rng, max_vars=4, max_dom=4)
            v = rng.choice(sorted(p.domains))
            live = initial_live(p)
            base = [s.value for s in order_values(p, {}, live, v)]
            shift = float(rng.randint(1, 9))
            soft = dict(p.soft)
            old = soft[v]
            soft[v] = UnaryCost(
                v, {tok: c + shift for tok, c in old.table.items()}, old.default
            )
            shifted = build_problem(
                [w.name for w in p.variables],
                [p.domains[w.id] for w in p.variables],
                p.hard,
                soft,
            )
            assert [s.value for s in order_values(shifted, {}, live, v)] == base
