"""Shared sampling helpers for the test suite."""

import random
from fractions import Fraction as F


def rational(rng: random.Random, bound=20):
    """A non-integer rational with numerator and denominator bounded by 20."""
    while True:
        q = F(rng.randint(-bound, bound), rng.randint(2, bound))
        if q.denominator > 1:
            return q


def generic(rng: random.Random, names, avoid=()):
    """Sample rationals for names, redrawing until every expression in avoid
    (a callable of the sample) is a non-integer."""
    while True:
        env = {n: rational(rng) for n in names}
        vals = [f(env) for f in avoid]
        if all(F(v).denominator > 1 for v in vals):
            return env


def rng_for(name, seed=1):
    return random.Random(f"{seed}:{name}")
