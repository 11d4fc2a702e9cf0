import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausslucas.roots import (IndexOutOfRange, NoGenusFound, RootSequenceFamily, estimate_genus,
                              nth_root, paired, rearrangeability_diagnostic, signed_blocks)

QUARTER = (1, 1j, -1, -1j)


def test_pairing_convention():
    fam = RootSequenceFamily(alpha=1, c=1, phases=(1, -1))
    assert [nth_root(fam, n) for n in (1, 2, 3, 4)] == [1, -1, 2, -2]


def test_explicit_list_indexing():
    fam = RootSequenceFamily.explicit([1j, -1j])
    assert nth_root(fam, 2) == -1j
    with pytest.raises(IndexOutOfRange):
        nth_root(fam, 3)


def test_index_shell_sqrt_family():
    fam = RootSequenceFamily(alpha=0.5, phases=QUARTER, shell="index")
    assert nth_root(fam, 5) == pytest.approx(math.sqrt(5), abs=1e-12)


def test_cycle_shell_uses_one_modulus_per_phase_cycle():
    fam = RootSequenceFamily(alpha=0.5, phases=QUARTER)
    assert abs(nth_root(fam, 5)) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("kwargs", [dict(c=0), dict(alpha=0), dict(phases=(1.5,)),
                                    dict(phases=()), dict(shell="spiral")])
def test_invalid_parametric_family(kwargs):
    with pytest.raises(ValueError):
        RootSequenceFamily(**kwargs)


def test_zero_root_rejected():
    with pytest.raises(ValueError):
        RootSequenceFamily.explicit([1, 0])


def test_repeated_roots_are_kept():
    fam = RootSequenceFamily.explicit([2, 2, 3])
    assert list(fam.roots()) == [2, 2, 3]


@given(st.integers(1, 400), st.floats(0.2, 3), st.sampled_from(["cycle", "index"]))
def test_enumeration_is_order_independent(n, alpha, shell):
    fam = RootSequenceFamily(alpha=alpha, phases=QUARTER, shell=shell, count_limit=400)
    vec = fam.roots(400)
    assert nth_root(fam, n) == vec[n - 1]
    assert nth_root(fam, n) == nth_root(fam, n)


@pytest.mark.parametrize("alpha, p", [(1.0, 1), (0.5, 2), (2.0, 0), (1 / 3, 3), (0.4, 2)])
def test_declared_genus_matches_p_series_threshold(alpha, p):
    est = estimate_genus(RootSequenceFamily(alpha=alpha))
    assert est.p == p
    # smallest p with (1 + p) alpha > 1
    assert (1 + p) * alpha > 1 and (p == 0 or p * alpha <= 1)
    assert est.certified


def test_finite_list_has_genus_zero():
    est = estimate_genus(RootSequenceFamily.explicit([1, 2, 3, 4, 5]))
    assert est.p == 0


def test_numeric_genus_is_flagged_and_monotone():
    # the 1e-6 doubling rule needs ~10^6 terms before sum 1/n^2 looks settled
    fam = RootSequenceFamily(alpha=1.0, phases=(1, -1), count_limit=2 ** 22)
    est = estimate_genus(fam, method="numeric")
    assert est.p == 1
    assert not est.certified
    assert set(est.tail_evidence) == {0, 1}
    short = RootSequenceFamily(alpha=1.0, phases=(1, -1), count_limit=200_000)
    assert estimate_genus(short, method="numeric").p >= 1
    with pytest.raises(NoGenusFound):
        estimate_genus(fam, p_max=0, method="numeric")


def test_diagnostic_paired_harmonic_parts():
    diag = rearrangeability_diagnostic(paired(500), 1, n_probe=1000)
    harmonic = sum(1 / n for n in range(1, 501))
    rows = {r.projection: r for r in diag.rows if r.r == 1}
    assert rows["Re"].nonneg_sum == pytest.approx(harmonic, rel=1e-12)
    # the negative part is reported through the -Re projection
    assert rows["-Re"].nonneg_sum == pytest.approx(harmonic, rel=1e-12)
    assert rows["Re"].diverging and rows["-Re"].diverging
    assert harmonic == pytest.approx(6.79, abs=5e-3)
    assert diag.verdict == "likely-rearrangeable"


def test_diagnostic_all_positive_is_likely_not():
    fam = RootSequenceFamily(alpha=1.0, count_limit=2000)
    assert rearrangeability_diagnostic(fam, 1, n_probe=1000).verdict == "likely-not"


def test_diagnostic_genus_zero_is_vacuous():
    diag = rearrangeability_diagnostic(paired(10), 0)
    assert diag.verdict == "likely-rearrangeable" and diag.rows == ()


def test_signed_blocks_layout():
    fam = signed_blocks(100, 50)
    r = fam.roots().real
    assert list(r[:3]) == [1, 2, 3] and r[50] == -1 and r[100] == 51
    assert fam.size == 200
