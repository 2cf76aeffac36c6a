import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from logfield import randgen
from logfield.monomials import Monomial
from logfield.rationals import Q

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

LEVELS = (-1, 0, 1, 2, 3)


@st.composite
def rationals(draw, max_num=5, max_den=6, nonzero=False):
    den = draw(st.integers(1, max_den))
    num = draw(st.integers(-max_num, max_num).filter(lambda n: n != 0 or not nonzero))
    return Q(num, den)


@st.composite
def monomials(draw, levels=LEVELS, max_abs=3, max_den=6):
    chosen = draw(st.lists(st.sampled_from(levels), unique=True, max_size=3))
    return Monomial.from_dict({lv: draw(rationals(max_abs * max_den, max_den)) for lv in chosen})


@st.composite
def finite_series(draw, max_terms=8, levels=LEVELS):
    # seeded through the same generator used by the acceptance suites
    seed = draw(st.integers(0, 2**32 - 1))
    return randgen.finite_series(random.Random(seed), max_terms=max_terms, levels=levels)


@st.composite
def small_series(draw, max_terms=4):
    seed = draw(st.integers(0, 2**32 - 1))
    return randgen.small_series(random.Random(seed), max_terms)


@st.composite
def inf_increasing(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return randgen.inf_increasing(random.Random(seed))


@pytest.fixture
def rng():
    return random.Random(1234)
