import random

import pytest

from cyclosieve import CycloParams, IntPair, attach_pair, make_context
from cyclosieve.cyclotomy import divisors, is_prime, mult_order


def brute_order(a, q):
    x = a % q
    for e in range(1, q):
        if x == 1:
            return e
        x = x * a % q
    raise AssertionError("no order")


def random_context(rng, p, q_max=400, allow_extension=True):
    """A context with random q < q_max and random admissible n (not 2p)."""
    while True:
        q = rng.randrange(3, q_max)
        if not is_prime(q) or q == p:
            continue
        if not allow_extension and mult_order(q, p) > 1:
            continue
        ns = [n for n in divisors(q - 1) if n != 2 * p]
        n = rng.choice(ns)
        params = CycloParams.build(p, q, n)
        z_choice = None if params.r else rng.randrange(1, p)
        return make_context(params, z_choice=z_choice)


@pytest.fixture
def rng():
    return random.Random(20240521)


@pytest.fixture(scope="session")
def ctx31():
    # the (p=5, u=1, v=3, q=31) instance: xi_bar = 3, z = 16
    return make_context(attach_pair(5, 31, IntPair(1, 3)))


@pytest.fixture(scope="session")
def ctx11():
    # (p=5, u=3, v=1, q=11): n = 5
    return make_context(attach_pair(5, 11, IntPair(3, 1)))
