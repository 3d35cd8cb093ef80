"""Shared randomized-instance factories for the test suite."""

import random
from fractions import Fraction

from wfalab import (Instance, ProductPoint, RealLine, RequestPoint, Scaled,
                    idx, pt, request)
from wfalab.harness import uniform_metric


def quarter(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-4 * bound, 4 * bound), 4)


def plane_instance(rng: random.Random, n: int, bound: int = 4) -> Instance:
    reqs = tuple(request(quarter(rng, bound), quarter(rng, bound))
                 for _ in range(n))
    return Instance(RealLine(), RealLine(), pt(0, 0), reqs)


def finite_instance(rng: random.Random, n: int, size: int = 4) -> Instance:
    space = uniform_metric(size)
    reqs = tuple(RequestPoint(idx(rng.randrange(size)),
                              idx(rng.randrange(size)))
                 for _ in range(n))
    return Instance(space, space, ProductPoint(idx(0), idx(0)), reqs)


def weighted_instance(rng: random.Random, n: int, bound: int = 4,
                      wx=1, wy=3) -> Instance:
    reqs = tuple(request(quarter(rng, bound), quarter(rng, bound))
                 for _ in range(n))
    return Instance(Scaled(RealLine(), Fraction(wx)),
                    Scaled(RealLine(), Fraction(wy)), pt(0, 0), reqs)
