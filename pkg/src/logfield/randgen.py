"""Seeded random inputs for the property and oracle suites."""

import random

from .monomials import Monomial
from .rationals import Q, ONE
from .series import from_terms

LEVELS = (-1, 0, 1, 2, 3)


def rng_for(seed):
    return random.Random(seed)


def rational(rng, max_num=5, max_den=6, nonzero=True):
    while True:
        q = Q(rng.randint(-max_num, max_num), rng.randint(1, max_den))
        if q != 0 or not nonzero:
            return q


def exponent(rng, max_abs=3, max_den=6):
    den = rng.randint(1, max_den)
    return Q(rng.randint(-max_abs * den, max_abs * den), den)


def monomial(rng, levels=LEVELS, max_abs=3, max_den=6, max_factors=3):
    exps = {}
    for level in rng.sample(list(levels), rng.randint(0, min(max_factors, len(levels)))):
        exps[level] = exponent(rng, max_abs, max_den)
    return Monomial.from_dict(exps)


def finite_series(rng, max_terms=8, levels=LEVELS, max_abs=3, max_den=6, min_terms=1):
    terms = {}
    target = rng.randint(min_terms, max_terms)
    for _ in range(4 * target):
        if len(terms) >= target:
            break
        terms[monomial(rng, levels, max_abs, max_den)] = rational(rng)
    return from_terms([(c, m) for m, c in terms.items()])


def small_series(rng, max_terms=4, levels=(-1, 0, 1, 2), max_den=4):
    """A finite series whose monomials are all small."""
    terms = {}
    target = rng.randint(1, max_terms)
    while len(terms) < target:
        m = monomial(rng, levels, 3, max_den)
        if m.is_small():
            terms[m] = rational(rng)
    return from_terms([(c, m) for m, c in terms.items()])


def _small_x_power(rng, max_den=2):
    # x^-q with 0 < q <= 2
    den = rng.randint(1, max_den)
    return Monomial.level(0, -Q(rng.randint(1, 2 * den), den))


def inf_increasing(rng, family=None, lead_coeffs=(ONE, Q(4))):
    """An infinitely increasing finite series from a small constructor family."""
    family = family if family is not None else rng.randrange(5)
    a = rng.choice(lead_coeffs)
    c = rational(rng, 2, 2)
    if family == 0:
        p = rng.choice([Q(1, 2), ONE, Q(3, 2), Q(2)])
        lead = Monomial.level(0, p)
        rest = [(c, lead * _small_x_power(rng))]
    elif family == 1:
        b = rng.choice([ONE, -ONE, Q(1, 2)])
        lead = Monomial.from_dict({0: 1, 1: b})
        rest = [(c, Monomial())]
    elif family == 2:
        s = rng.choice([Q(1, 2), ONE, Q(2)])
        lead = Monomial.level(-1, s)
        rest = [(c, Monomial.level(0, rng.choice([ONE, Q(2)])))]
    elif family == 3:
        lead = Monomial.level(0)
        rest = [(c, Monomial.level(1)), (rational(rng, 2, 2), Monomial())]
    else:
        lead = Monomial.level(1)
        rest = [(c, Monomial.level(2))]
    return from_terms([(a, lead)] + rest)


def graded_series(rng, max_grades=4, grades=(-1, Q(-1, 2), 0, Q(1, 2), 1, 2), max_terms=2):
    """Finite series with at most ``max_grades`` E-grades and integer log-level exponents."""
    chosen = rng.sample(list(grades), rng.randint(1, max_grades))
    terms = []
    for r in chosen:
        for _ in range(rng.randint(1, max_terms)):
            exps = {-1: -Q(r)}
            for level in (0, 1, 2):
                if rng.random() < 0.5:
                    exps[level] = rng.randint(-2, 2)
            terms.append((rational(rng, 3, 3), Monomial.from_dict(exps)))
    return from_terms(terms)


def logfree_series(rng, max_terms=4):
    """Finite L'-series with integer exponents on x and log."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        exps = {0: rng.randint(-2, 2), 1: rng.randint(-2, 2)}
        terms.append((rational(rng, 3, 3), Monomial.from_dict(exps)))
    return from_terms(terms)
