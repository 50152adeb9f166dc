import math

import numpy as np
import pytest

from fracdecay.errors import InadmissibleParams, NonConvergence
from fracdecay.specfun import (KilbasSaigoParams, SeriesAccuracy,
                               kilbas_saigo, kilbas_saigo_bounds,
                               kilbas_saigo_with_info, mittag_leffler,
                               reduce_to_mittag_leffler)

TIGHT = SeriesAccuracy(abs_tol=1e-15, rel_tol=1e-14, max_terms=512)

# frozen 60-digit big-float series references
KS_HALF_2 = {  # alpha=0.5, m=2, l=1
    -1.0: 0.48571956423992094,
    -5.0: 0.12533708631263858,
    -10.0: 0.061180387483541345,
}
KS_03_15 = 0.29694398836240667971      # alpha=0.3, m=1.5, l=0.5, z=-2
KS_07_3 = 0.18807199388009463848       # alpha=0.7, m=3,   l=2,   z=-4
KS_M1 = 0.50729084738210196063         # alpha=0.5, m=1,   l=1,   z=-1
ML_HALF_5 = 0.11070463773306862637     # E_{1/2,1}(-5) = e^{25} erfc(5)
ML_HALF_50 = 0.0112815362653237725


def test_value_at_zero_is_one():
    p = KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)
    assert kilbas_saigo(p, 0.0) == 1.0


def test_frozen_series_references():
    p = KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)
    for z, ref in KS_HALF_2.items():
        assert kilbas_saigo(p, z, TIGHT) == pytest.approx(ref, rel=1e-12)
    # alternating double-precision sums lose a few digits to cancellation
    p = KilbasSaigoParams(alpha=0.3, m=1.5, l=0.5)
    assert kilbas_saigo(p, -2.0, TIGHT) == pytest.approx(KS_03_15, rel=1e-10)
    p = KilbasSaigoParams(alpha=0.7, m=3.0, l=2.0)
    assert kilbas_saigo(p, -4.0, TIGHT) == pytest.approx(KS_07_3, rel=1e-10)


def test_exponential_identity_alpha_one():
    # E_{1,m,m-1}(z) = exp(z/m)
    for m in (1.5, 2.0, 3.0):
        p = KilbasSaigoParams(alpha=1.0, m=m, l=m - 1.0)
        for z in (-5.0, -1.0, 0.5, 3.0):
            assert kilbas_saigo(p, z, TIGHT) == pytest.approx(
                math.exp(z / m), rel=1e-12, abs=1e-13)


def test_m_one_reduction():
    p = KilbasSaigoParams(alpha=0.5, m=1.0, l=1.0)
    assert kilbas_saigo(p, -1.0, TIGHT) == pytest.approx(KS_M1, rel=1e-12)
    scale, a, b = reduce_to_mittag_leffler(p)
    assert scale == pytest.approx(math.gamma(1.5))
    assert kilbas_saigo(p, -1.0, TIGHT) == pytest.approx(
        scale * mittag_leffler(a, b, -1.0, TIGHT), rel=1e-10)
    assert reduce_to_mittag_leffler(
        KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)) is None


def test_two_sided_bounds_contain_series():
    zs = np.logspace(-3, 1, 30)
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        for m in (1.5, 2.0, 5.0):
            p = KilbasSaigoParams(alpha=alpha, m=m, l=m - 1.0)
            for z in zs:
                v = kilbas_saigo(p, -z)
                b = kilbas_saigo_bounds(alpha, m, z)
                assert b.lower - 1e-9 <= v <= b.upper + 1e-9


def test_bounds_ordering_and_limits():
    b = kilbas_saigo_bounds(0.5, 2.0, 0.0)
    assert b.lower == b.upper == 1.0
    b = kilbas_saigo_bounds(0.5, 2.0, 3.0)
    assert 0.0 < b.lower < b.upper < 1.0


def test_monotone_decay_across_surrogate_seam():
    # deep negative arguments switch to the bound-anchored surrogate;
    # the curve must stay decreasing through the seam
    p = KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)
    zs = np.linspace(8.0, 14.0, 61)
    vals = [kilbas_saigo(p, -z) for z in zs]
    assert np.all(np.diff(vals) < 0.0)
    _, approx_near = kilbas_saigo_with_info(p, -9.0)
    _, approx_far = kilbas_saigo_with_info(p, -14.0)
    assert not approx_near and approx_far


def test_small_alpha_deep_argument_stays_in_bounds():
    p = KilbasSaigoParams(alpha=0.1, m=2.0, l=1.0)
    for z in (2.0, 5.0, 10.0):
        v, _ = kilbas_saigo_with_info(p, -z)
        b = kilbas_saigo_bounds(0.1, 2.0, z)
        assert b.lower <= v <= b.upper


def test_gamma_pole_rejected():
    with pytest.raises(InadmissibleParams):
        KilbasSaigoParams(alpha=0.5, m=1.0, l=-2.0)
    with pytest.raises(InadmissibleParams):
        KilbasSaigoParams(alpha=-0.5, m=2.0, l=1.0)


def test_nonconvergence_outside_decay_family():
    # no surrogate applies off the decay family, so an infeasible series
    # must fail loudly instead of returning garbage
    p = KilbasSaigoParams(alpha=0.1, m=2.0, l=0.5)
    with pytest.raises(NonConvergence):
        kilbas_saigo(p, -50.0, SeriesAccuracy(max_terms=64))


def test_mittag_leffler_classical_values():
    assert mittag_leffler(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-12)
    assert mittag_leffler(2.0, 1.0, -1.0) == pytest.approx(
        math.cos(1.0), rel=1e-12)
    assert mittag_leffler(0.5, 1.0, -5.0) == pytest.approx(
        ML_HALF_5, rel=1e-9)


def test_mittag_leffler_asymptotic_branch():
    # |z| beyond the series range uses the algebraic tail expansion
    assert mittag_leffler(0.5, 1.0, -50.0) == pytest.approx(
        ML_HALF_50, rel=1e-6)
