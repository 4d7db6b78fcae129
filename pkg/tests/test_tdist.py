"""Student-t tail probabilities against direct numerical integration."""

import mpmath
import numpy as np
import pytest

from eyeband.statfit import t_cdf, t_quantile

mpmath.mp.dps = 30


def _oracle_two_tailed(t, df):
    nu = mpmath.mpf(df)
    c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
    pdf = lambda u: c * (1 + u * u / nu) ** (-(nu + 1) / 2)
    tail = mpmath.quad(pdf, [abs(t), mpmath.inf])
    return float(2 * tail)


@pytest.mark.parametrize("df", [1, 2, 3, 6, 10, 25, 50, 100])
def test_two_tailed_p_matches_quadrature(df):
    for t in np.linspace(0, 10, 21):
        p = float(2 * t_cdf(-t, df))
        assert p == pytest.approx(_oracle_two_tailed(t, df), abs=1e-6)


def test_all_df_spot_grid():
    for df in range(1, 101, 7):
        for t in (0.5, 2.0, 4.09, 9.5):
            assert float(2 * t_cdf(-t, df)) == pytest.approx(_oracle_two_tailed(t, df), abs=1e-6)


def test_quantile_inverts_cdf():
    for df in (1, 5, 1031):
        q = t_quantile(0.975, df)
        assert t_cdf(q, df) == pytest.approx(0.975, abs=1e-12)


def test_reported_t_statistic_is_consistent():
    # t = 4.09 with df = 6 gives p ~ 0.006 two-tailed
    assert float(2 * t_cdf(-4.09, 6)) == pytest.approx(0.006, abs=0.0005)
