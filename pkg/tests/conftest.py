import random
from fractions import Fraction

import pytest

from crjet.hypersurface import THETA_VARS, Hypersurface, validate
from crjet.scalars import ExactComplex
from crjet.series import TruncatedSeries


def rand_frac(rng: random.Random, span: int = 4) -> Fraction:
    num = rng.randint(-span, span)
    den = rng.randint(1, span)
    return Fraction(num, den)


def rand_complex(rng: random.Random, span: int = 4) -> ExactComplex:
    return ExactComplex(rand_frac(rng, span), rand_frac(rng, span))


def random_series(rng: random.Random, variables, degree, nterms,
                  min_order=0, allow_zero=True) -> TruncatedSeries:
    coeffs = {}
    for _ in range(nterms):
        while True:
            exps = tuple(rng.randint(0, degree) for _ in variables)
            if min_order <= sum(exps) <= degree:
                break
        c = rand_complex(rng)
        if not c.is_zero():
            coeffs[exps] = c
    if not coeffs and not allow_zero:
        coeffs[(min_order,) + (0,) * (len(variables) - 1)] = ExactComplex(1)
    return TruncatedSeries(tuple(variables), degree, coeffs)


def random_hypersurface(rng: random.Random, degree=10, nterms=5,
                        s_orders=(1, 2), max_e=3) -> Hypersurface:
    """A valid 1-infinite-type input: Hermitian in (z,chi), normal, min s-order 1."""
    coeffs = {}
    # guarantee the type: one s^1 term
    a, b = rng.randint(1, max_e), rng.randint(1, max_e)
    coeffs[(a, b, 1)] = rand_complex(rng) if a != b else ExactComplex(rng.randint(1, 3))
    for _ in range(nterms):
        a = rng.randint(1, max_e)
        b = rng.randint(1, max_e)
        c = rng.choice(s_orders)
        if a + b + c > degree:
            continue
        coeffs[(a, b, c)] = rand_complex(rng)
    # impose reality: coeff(a,b,c) = conj(coeff(b,a,c))
    fixed = {}
    for (a, b, c), v in coeffs.items():
        if (b, a, c) in fixed or (a, b, c) in fixed:
            continue
        if a == b:
            fixed[(a, b, c)] = ExactComplex(v.re)
        else:
            fixed[(a, b, c)] = v
            fixed[(b, a, c)] = v.conj()
    fixed = {k: v for k, v in fixed.items() if not v.is_zero()}
    if not any(c == 1 for _, _, c in fixed):
        fixed[(1, 1, 1)] = ExactComplex(1)
    Theta = TruncatedSeries(THETA_VARS, degree, fixed)
    return validate(Theta)


@pytest.fixture
def rng():
    return random.Random(20240817)
