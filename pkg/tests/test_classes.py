import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _specs import random_function, random_weight
from ineqforge.classes import (
    GridSpec,
    Status,
    _reduce,
    check_geom_convex,
    check_h_convex,
    check_h_geom_convex,
    check_h_log_convex,
    check_h_multi_convex,
    check_monotone_verdict,
    check_partition_unity,
    check_s_geom_convex,
    check_s_log_convex_first,
    check_s_log_convex_second,
    check_superadditive,
    check_symmetric_half,
)
from ineqforge.errors import DomainError, InvalidParams
from ineqforge.funclib import Monotonicity, check_monotone, log_of, make_function, make_weight

HOLDS, VIOLATED = Status.HOLDS, Status.VIOLATED
SMALL = GridSpec(n_points=9, n_random=300, seed=3)

ex01 = make_function("exponential", [1, 1], (0, 1))
ex12 = make_function("exponential", [1, 1], (1, 2))
ident13 = make_function("power", [1], (1, 3))
one13 = make_function("constant", [1], (1, 3))
identity = make_weight("identity")


def power_w(s):
    return make_weight("power", [s])


# scalar re-implementations of each defining inequality, written with math only
def _scalar_lhs_rhs(kind, f, h, w):
    x, y = w.get("x"), w.get("y")
    if kind == "hConvex":
        return f(w["t"] * x + (1 - w["t"]) * y), h(w["t"]) * f(x) + h(1 - w["t"]) * f(y)
    t = w["t"]
    prod = f(x) ** h(t) * f(y) ** h(1 - t)
    a = f(t * x + (1 - t) * y)
    if kind == "hLogConvex":
        return a, prod
    g = f(math.exp(t * math.log(x) + (1 - t) * math.log(y)))
    if kind == "hGeomConvex":
        return g, prod
    lam = w["lam"]
    return lam * g + (1 - lam) * a, prod


def assert_witness_sound(kind, v, f, h):
    assert v.status is VIOLATED
    lhs, rhs = _scalar_lhs_rhs(kind, f, h, v.witness)
    assert lhs - rhs > 1e-9 * (1 + abs(rhs))


class TestHConvex:
    def test_square_is_convex(self):
        assert check_h_convex(make_function("power", [2], (0, 2)), identity).status is HOLDS

    def test_exp_in_p_class(self):
        # P(I) case: h == 1 needs f(tx+(1-t)y) <= f(x) + f(y), true for positive increasing f
        assert check_h_convex(ex01, make_weight("constant", [1])).status is HOLDS

    def test_exp_with_t_squared_violated(self):
        # direct check at t=.5, x=0, y=1
        assert math.exp(0.5) > 0.25 * 1 + 0.25 * math.e
        v = check_h_convex(ex01, power_w(2))
        assert_witness_sound("hConvex", v, ex01, power_w(2))
        assert v.max_violation > 0.5


class TestHLogConvex:
    def test_exp_log_convex(self):
        assert check_h_log_convex(ex01, identity).status is HOLDS

    @pytest.mark.parametrize("h", [identity, power_w(0.5), make_weight("reciprocal"), make_weight("constant", [2])])
    def test_constant_one(self, h):
        assert check_h_log_convex(make_function("constant", [1], (0, 1)), h).status is HOLDS

    def test_gaussian_tabulated_violated(self):
        xs = np.linspace(0, 1, 21)
        f = make_function("tabulated", np.exp(-xs**2), (0, 1))
        v = check_h_log_convex(f, identity)
        assert_witness_sound("hLogConvex", v, f, identity)


class TestHGeomConvex:
    def test_identity_equality(self):
        v = check_h_geom_convex(ident13, identity)
        assert v.status is HOLDS
        assert v.max_violation == pytest.approx(-1e-9, rel=1.0)

    def test_exp_log_square(self):
        assert check_h_geom_convex(make_function("exp_log_square", [], (1, math.e)), identity).status is HOLDS

    def test_exp_with_t_squared_violated(self):
        v = check_h_geom_convex(ex12, power_w(2))
        assert_witness_sound("hGeomConvex", v, ex12, power_w(2))

    def test_requires_positive_domain(self):
        with pytest.raises(DomainError):
            check_h_geom_convex(ex01, identity)


class TestHMultiConvex:
    def test_constant(self):
        assert check_h_multi_convex(one13, identity).status is HOLDS

    def test_identity_violated_at_arithmetic_slice(self):
        # lam=0 needs f(A) <= G, i.e. A <= G: false at x=1, y=3, t=.5
        assert 2.0 > math.sqrt(3.0)
        v = check_h_multi_convex(ident13, identity)
        assert_witness_sound("hMultiConvex", v, ident13, identity)
        assert check_h_multi_convex(ident13, identity, lam=1.0).status is HOLDS

    def test_exp_t_cubed_violated(self):
        v = check_h_multi_convex(ex12, power_w(3))
        assert_witness_sound("hMultiConvex", v, ex12, power_w(3))

    def test_lam_range(self):
        with pytest.raises(InvalidParams):
            check_h_multi_convex(one13, identity, lam=1.5)

    def test_lambda_grid_includes_endpoints(self):
        v = check_h_multi_convex(ident13, identity, GridSpec(5, 0))
        assert v.n_samples == 5**3 * 11


class TestSLogConvex:
    def test_first_sense_s1(self):
        assert check_s_log_convex_first(ex01, 1.0).status is HOLDS

    def test_first_sense_constant(self):
        assert check_s_log_convex_first(make_function("constant", [1], (0, 1)), 0.5).status is HOLDS

    def test_first_sense_decreasing_violated(self):
        xs = np.linspace(0, 1, 11)
        f = make_function("tabulated", np.exp(-xs), (0, 1))
        v = check_s_log_convex_first(f, 0.5)
        assert v.status is VIOLATED
        w = v.witness
        a, b = w["u"] ** 2, (1 - w["u"]) ** 2
        lhs = f(a * w["x"] + b * w["y"])
        rhs = f(w["x"]) ** w["u"] * f(w["y"]) ** (1 - w["u"])
        assert lhs - rhs > 1e-9 * (1 + rhs)

    def test_s_range(self):
        with pytest.raises(InvalidParams):
            check_s_log_convex_first(ex01, 1.5)

    def test_second_sense(self):
        assert check_s_log_convex_second(ex01, 1.0).status is HOLDS
        for s in (0.2, 0.5, 1.0):
            assert check_s_log_convex_second(make_function("constant", [1.7], (0, 1)), s).status is HOLDS
        assert check_s_log_convex_second(make_function("constant", [0.5], (0, 1)), 0.5).status is VIOLATED

    def test_second_sense_delegates(self):
        f = random_function(np.random.default_rng(5))
        a = check_s_log_convex_second(f, 0.4, SMALL)
        b = check_h_log_convex(f, power_w(0.4), SMALL)
        assert (a.status, a.max_violation, a.witness) == (b.status, b.max_violation, b.witness)


class TestGeomConvex:
    def test_identity(self):
        assert check_geom_convex(ident13).status is HOLDS

    def test_s1_reduces_to_geometric(self):
        f = make_function("exponential", [0.5, -1.2], (0.5, 2.0))
        a, b = check_s_geom_convex(f, 1.0, SMALL), check_geom_convex(f, SMALL)
        assert (a.status, a.max_violation, a.witness) == (b.status, b.max_violation, b.witness)

    def test_base_below_one_violated(self):
        assert check_s_geom_convex(make_function("constant", [0.5], (1, 2)), 0.5).status is VIOLATED


class TestWeightPredicates:
    def test_superadditive(self):
        assert check_superadditive(identity).status is HOLDS
        assert check_superadditive(power_w(2)).status is HOLDS

    def test_reciprocal_not_superadditive(self):
        v = check_superadditive(make_weight("reciprocal"))
        assert v.status is VIOLATED
        assert v.witness["u"] == pytest.approx(0.5, abs=1e-12)
        assert v.witness["v"] == pytest.approx(0.5, abs=1e-12)
        assert v.witness["lhs"] == pytest.approx(4.0)
        assert v.witness["rhs"] == pytest.approx(1.0)

    def test_symmetric(self):
        assert check_symmetric_half(make_weight("constant", [1])).status is HOLDS
        assert check_symmetric_half(identity).status is VIOLATED
        assert check_symmetric_half(make_weight("convex_mix", [0.5, 2.0])).status is VIOLATED
        assert abs(identity(0.25) - identity(0.75)) > 1e-12

    def test_partition_unity(self):
        assert check_partition_unity(identity).status is HOLDS
        assert check_partition_unity(make_weight("constant", [1])).status is VIOLATED
        v = check_partition_unity(power_w(0.5))
        assert v.witness["t"] == pytest.approx(0.5)
        assert v.witness["lhs"] == pytest.approx(2 * math.sqrt(0.5))


def test_monotone_verdict():
    assert check_monotone_verdict(ex01).status is HOLDS
    v = check_monotone_verdict(make_function("power", [2], (-1, 1)), 101)
    assert v.status is VIOLATED and v.detail == "nonMonotone"


def test_reduction_is_order_independent():
    rng = np.random.default_rng(0)
    n = 500
    excess = np.round(rng.normal(size=n), 1)  # many exact ties
    coords = {"x": rng.integers(0, 3, n).astype(float), "t": rng.integers(0, 3, n).astype(float)}
    lhs = rhs = np.zeros(n)
    ref = _reduce("p", excess, coords, lhs, rhs, SMALL)
    for _ in range(5):
        perm = rng.permutation(n)
        got = _reduce("p", excess[perm], {k: v[perm] for k, v in coords.items()}, lhs, rhs, SMALL)
        assert got.witness == ref.witness and got.max_violation == ref.max_violation


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_log_equivalence(seed):
    rng = np.random.default_rng(seed)
    f, h = random_function(rng), random_weight(rng)
    assert check_h_log_convex(f, h, SMALL).status is check_h_convex(log_of(f), h, SMALL).status


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_log_convexity_with_identity_matches_direct_test(seed):
    rng = np.random.default_rng(seed)
    f = random_function(rng)
    x = np.linspace(f.domain.lo, f.domain.hi, 9)
    X, Y, T = np.meshgrid(x, x, np.linspace(0, 1, 9), indexing="ij")
    lf = np.log(f(T * X + (1 - T) * Y))
    direct = np.all(lf <= T * np.log(f(X)) + (1 - T) * np.log(f(Y)) + 1e-9)
    v = check_h_log_convex(f, identity, GridSpec(9, 0))
    assert (v.status is HOLDS) == direct


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_am_gm_bridge(seed):
    rng = np.random.default_rng(seed)
    f, h = random_function(rng), random_weight(rng)
    if check_monotone(f) is Monotonicity.DECREASING and check_h_geom_convex(f, h, SMALL).holds:
        assert check_h_log_convex(f, h, SMALL).holds


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_multi_slices(seed):
    rng = np.random.default_rng(seed)
    f, h = random_function(rng), random_weight(rng)
    for lam, other in ((0.0, check_h_log_convex), (1.0, check_h_geom_convex)):
        a, b = check_h_multi_convex(f, h, SMALL, lam=lam), other(f, h, SMALL)
        assert a.status is b.status
        assert a.max_violation == b.max_violation


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_witness_soundness(seed):
    rng = np.random.default_rng(seed)
    f, h = random_function(rng), random_weight(rng)
    for kind, pred in (("hConvex", check_h_convex), ("hLogConvex", check_h_log_convex),
                       ("hGeomConvex", check_h_geom_convex), ("hMultiConvex", check_h_multi_convex)):
        v = pred(f, h, SMALL)
        if v.status is VIOLATED:
            assert_witness_sound(kind, v, f, h)
        else:
            assert v.witness is None and v.max_violation <= 0


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_partition_unity_log_convex_implies_convex(seed):
    from _specs import partition_unity_weight

    rng = np.random.default_rng(seed)
    f, h = random_function(rng), partition_unity_weight(rng)
    if check_h_log_convex(f, h, SMALL).holds and check_partition_unity(h).holds:
        assert check_h_convex(f, h, SMALL).holds
