"""Seeded generators of random function and weight specs for property tests."""

import numpy as np

from ineqforge.funclib import make_function, make_weight


def random_domain(rng, positive=True):
    lo = rng.uniform(0.2, 2.0) if positive else rng.uniform(-2.0, 2.0)
    return (lo, lo + rng.uniform(0.2, 2.0))


def random_function(rng, family=None, domain=None):
    families = ["exponential", "power", "exp_log_square", "constant", "affine_exp", "tabulated"]
    family = family or families[int(rng.integers(len(families)))]
    domain = domain or random_domain(rng)
    params = {
        "exponential": lambda: [rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0)],
        "power": lambda: [rng.uniform(-2.0, 3.0)],
        "exp_log_square": lambda: [],
        "constant": lambda: [rng.uniform(0.2, 3.0)],
        "affine_exp": lambda: [rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0)],
        "tabulated": lambda: list(rng.uniform(0.2, 3.0, 5)),
    }[family]()
    return make_function(family, params, domain)


def random_weight(rng, family=None):
    families = ["identity", "power", "reciprocal", "constant", "convex_mix"]
    family = family or families[int(rng.integers(len(families)))]
    params = {
        "identity": lambda: [],
        "power": lambda: [rng.uniform(0.3, 3.0)],
        "reciprocal": lambda: [],
        "constant": lambda: [rng.uniform(0.3, 2.0)],
        "convex_mix": lambda: [rng.uniform(0.0, 1.0), rng.uniform(0.3, 3.0)],
    }[family]()
    return make_weight(family, params)


def partition_unity_weight(rng):
    """Weights with h(t) + h(1-t) = 1."""
    choice = int(rng.integers(4))
    return [
        make_weight("identity"),
        make_weight("power", [1.0]),
        make_weight("constant", [0.5]),
        make_weight("convex_mix", [1.0, rng.uniform(0.3, 3.0)]),
    ][choice]
