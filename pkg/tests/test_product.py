import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausslucas.product import (CanonicalProductSpec, LogValue, PowerSumLedger, convergence_probe,
                                corrected_partial_product, h_N, partial_product)
from gausslucas.rearrange import RearrangementPlan
from gausslucas.roots import RootSequenceFamily, paired

SIN = CanonicalProductSpec(q=0, p=1, family=paired(10_000))


def explicit(roots, q=0, p=None):
    return CanonicalProductSpec(q=q, p=p, family=RootSequenceFamily.explicit(roots))


def test_two_factor_product():
    assert partial_product(explicit([1, -1]), 2, 2) == -3


def test_monomial_zero():
    assert partial_product(explicit([1, 2, 3], q=2), 3, 0) == 0


@pytest.mark.parametrize("n, tol", [(500, 1e-3), (5000, 1e-4)])
def test_sin_product_matches_closed_form(n, tol):
    oracle = math.sin(math.pi * 0.5) / (math.pi * 0.5)
    assert oracle == pytest.approx(0.6366198, abs=1e-7)
    assert abs(partial_product(SIN, 2 * n, 0.5) - oracle) <= tol


def test_genus_filled_from_family():
    assert CanonicalProductSpec(family=RootSequenceFamily(alpha=0.5)).p == 2
    with pytest.raises(ValueError):
        CanonicalProductSpec(q=-1)


def test_h_examples():
    spec1 = explicit([1], p=1)
    assert h_N(spec1, PowerSumLedger(1, 0, (0j,)), 3.7) == 0
    assert h_N(spec1, PowerSumLedger(1, 1, (0.5 + 0j,)), 2) == pytest.approx(1.0)
    spec2 = explicit([1], p=2)
    assert h_N(spec2, PowerSumLedger(2, 1, (1 + 0j, 1j)), 1) == pytest.approx(1 + 0.5j)


def test_corrected_equals_plain_for_genus_zero():
    spec = explicit([1 + 1j, 2, -3j, 4], q=1, p=0)
    for z in (0.3, 1 - 2j, 5j):
        assert corrected_partial_product(spec, 4, z) == partial_product(spec, 4, z)


@pytest.mark.parametrize("N", [2, 10, 100, 1000])
def test_corrected_equals_plain_when_power_sum_vanishes(N):
    for z in (0.5, 1.5 + 0.5j):
        assert corrected_partial_product(SIN, N, z) == pytest.approx(partial_product(SIN, N, z),
                                                                      abs=1e-14)


def _mp_product(n, z, dps=30):
    with mpmath.workdps(dps):
        z = mpmath.mpf(z)
        acc = mpmath.mpf(1)
        for k in range(1, n + 1):
            acc *= (1 - z / k) * mpmath.exp(z / k)
        return complex(acc)


def test_corrected_product_against_high_precision_oracle():
    spec = CanonicalProductSpec(p=1, family=RootSequenceFamily(alpha=1.0, count_limit=4000))
    N, z = 1000, 0.5
    oracle = _mp_product(2 * N, z)
    assert abs(corrected_partial_product(spec, N, z) - oracle) <= 1e-3
    # limit value e^{gamma z} / Gamma(1 - z), derived from the Weierstrass form of 1/Gamma
    limit = complex(mpmath.exp(mpmath.euler * z) / mpmath.gamma(1 - z))
    assert abs(corrected_partial_product(spec, N, z) - limit) <= 1e-3
    assert corrected_partial_product(spec, N, 1.0) == 0


def test_probe_sin_family_strictly_decreasing():
    d = convergence_probe(SIN, 0.5, (100, 200, 400))
    assert d[0] > d[1] > d[2] > 0
    # tail bound z^2 sum_{n>N} n^-2 ~ z^2 / N
    assert all(delta <= 0.25 / N for delta, N in zip(d, (100, 200, 400)))


def test_probe_at_a_root_is_zero():
    assert convergence_probe(SIN, 3.0, (10, 20, 40)) == [0.0, 0.0, 0.0]


def test_probe_of_empty_product():
    assert convergence_probe(CanonicalProductSpec(), 2 + 1j, (1, 2, 4)) == [0.0, 0.0, 0.0]


def test_exact_mode_vanishes_at_every_root():
    roots = [1, -2, 0.5 + 0.25j, 3j, -1.5 - 0.5j]
    spec = explicit(roots, q=1)
    for k, d in enumerate(roots, 1):
        assert partial_product(spec, len(roots), d, exact=True) == (Fraction(0), Fraction(0))
        v = partial_product(spec, k, d)
        assert abs(v) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=5, allow_nan=False,
                                   allow_infinity=False), min_size=1, max_size=40),
       st.integers(0, 3))
def test_float_mode_vanishes_at_roots(roots, p):
    spec = explicit(roots, p=p)
    arr = np.array(roots, dtype=complex)
    for d in roots:
        scale = float(np.prod(1 + np.abs(d / arr)))
        assert abs(complex(partial_product(spec, len(roots), d))) <= 1e-12 * scale


def test_overflow_switches_to_log_form():
    spec = CanonicalProductSpec(p=1, family=RootSequenceFamily(alpha=1.0, count_limit=5000))
    z = 1e4 + 1e4j
    v = partial_product(spec, 5000, z)
    assert isinstance(v, LogValue)
    oracle = float(np.sum(np.log(np.abs(1 - z / np.arange(1, 5001)))))
    assert v.log_abs == pytest.approx(oracle, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                                   allow_infinity=False), max_size=50),
       st.integers(1, 4))
def test_incremental_ledger_matches_recompute(roots, p):
    inc = PowerSumLedger(p).extend(roots)
    ref = PowerSumLedger.from_roots(roots, p)
    for a, b in zip(inc.V, ref.V):
        assert abs(a - b) <= 1e-10 * max(1.0, sum(abs(1 / complex(d)) ** r for d in roots
                                                   for r in range(1, p + 1)))


def test_ledger_checkpoints():
    led = PowerSumLedger(1).extend([1, -1, 2, -2], every=2)
    assert led.checkpoints == ((2, 0.0), (4, 0.0))


def test_rearrangement_invariance_of_corrected_product():
    roots = paired(5000).roots()
    rng = np.random.default_rng(7)
    perm = tuple(int(i) + 1 for i in rng.permutation(len(roots)))
    a = CanonicalProductSpec(p=1, family=RootSequenceFamily.explicit(roots))
    b = CanonicalProductSpec(p=1, family=a.family,
                             ordering=RearrangementPlan(perm, p=1, n_target=len(perm)))
    for z in (0.5, 0.3 + 0.7j, -0.9j, cmath.exp(2j)):
        va = corrected_partial_product(a, 10_000, z)
        vb = corrected_partial_product(b, 10_000, z)
        assert abs(va - vb) <= 1e-6


@settings(max_examples=100, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=10, allow_nan=False,
                                   allow_infinity=False), min_size=1, max_size=30),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.integers(1, 3))
def test_domination_bound(roots, z, p):
    spec = explicit(roots, p=p)
    N = len(roots)
    f = complex(partial_product(spec, N, z))
    g = complex(corrected_partial_product(spec, N, z))
    h = h_N(spec, PowerSumLedger.from_roots(roots, p), z)
    bound = (math.exp(abs(h)) - 1) * abs(g)
    assert abs(f - g) <= bound * (1 + 1e-9) + 1e-12 * max(abs(f), abs(g), 1e-300)
