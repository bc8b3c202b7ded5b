import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fxtail.evt import (
    DegenerateTailError,
    HillSpectrum,
    TailSample,
    crossing_m,
    fit_tails,
    hill_estimate,
    hill_spectrum,
    huisman_wls,
    moment_test,
    split_tails,
    stability_test,
    tail_sample,
    wls_line,
)
from fxtail.synthetic import GeneratorSpec, deterministic_pareto_grid, gen_pareto, replication_rng, symmetric_returns


def oracle_hill(values, m):
    """Textbook Hill gamma, written independently of the package."""
    xs = sorted(values, reverse=True)
    thr = math.log(xs[m])
    return sum(math.log(v) - thr for v in xs[:m]) / m


def est(alpha, se, side="upper"):
    from fxtail.evt import TailEstimate

    return TailEstimate(side, 10, 1 / alpha, alpha, se / alpha**2, se, 1.0, 100, 0.1)


# --- tails -----------------------------------------------------------------

def test_split_tails_definition():
    up, lo, com = split_tails([1.0, -2.0, 3.0])
    assert up.exceedances.tolist() == [3.0, 1.0]
    assert lo.exceedances.tolist() == [2.0]
    assert com.exceedances.tolist() == [3.0, 2.0, 1.0]
    assert up.n_source == 3


def test_empty_lower_tail_errors():
    with pytest.raises(ValueError, match="lower"):
        split_tails([1.0, 2.0, 0.0])


@given(st.lists(st.floats(-1e3, 1e3).filter(lambda v: v != 0), min_size=2, max_size=80))
def test_partition_identity(x):
    x = np.asarray(x)
    if not ((x > 0).any() and (x < 0).any()):
        return
    up, lo, com = split_tails(x)
    assert len(com) == len(up) + len(lo)


def test_zeros_excluded_and_counted():
    t = tail_sample([0.0, 1.0, -1.0, 0.0, 2.0], "common")
    assert t.zeros_excluded == 2
    assert t.exceedances.tolist() == [2.0, 1.0, 1.0]


# --- Hill ------------------------------------------------------------------

def test_hill_hand_value():
    e = hill_estimate(TailSample.from_values([8, 4, 2, 1]), 3)
    assert e.gamma == pytest.approx(2 * math.log(2), rel=1e-14)
    assert e.alpha == pytest.approx(0.721348, rel=1e-6)
    assert e.r_m == 1.0
    assert e.se_gamma == pytest.approx(e.gamma / math.sqrt(3))


def test_hill_degenerate():
    with pytest.raises(DegenerateTailError, match="degenerate"):
        hill_estimate(TailSample.from_values([5, 5, 5, 5]), 3)


@pytest.mark.parametrize("m", [1, 4, 2.5])
def test_hill_m_range(m):
    with pytest.raises(ValueError):
        hill_estimate(TailSample.from_values([8, 4, 2, 1]), m)


def test_hill_matches_independent_oracle_on_pareto():
    x = gen_pareto(GeneratorSpec("pareto", 3.0, 1000, seed=2024))
    e = hill_estimate(TailSample.from_values(x), 50)
    assert e.gamma == pytest.approx(oracle_hill(x.tolist(), 50), rel=1e-12)


def test_estimate_invariants():
    x = gen_pareto(GeneratorSpec("pareto", 2.5, 400, seed=1))
    e = hill_estimate(TailSample.from_values(x), 40)
    assert e.alpha * e.gamma == pytest.approx(1.0, rel=1e-15)
    assert e.se_gamma * e.alpha == pytest.approx(e.se_alpha * e.gamma, rel=1e-14)
    assert e.scale_a == pytest.approx(40 / 400 * e.r_m**e.alpha)
    assert 0 < e.r_m <= x.max()


@given(
    st.lists(st.floats(0.01, 1e4), min_size=6, max_size=60, unique=True),
    st.floats(1e-6, 1e6),
)
def test_hill_scale_invariance(vals, c):
    t = TailSample.from_values(vals)
    ts = TailSample.from_values(np.asarray(vals) * c)
    m = len(vals) // 2
    assert hill_estimate(ts, m).gamma == pytest.approx(hill_estimate(t, m).gamma, rel=1e-9, abs=1e-12)


@given(st.lists(st.floats(0.01, 1e3), min_size=6, max_size=60, unique=True), st.floats(1.0001, 10))
def test_new_maximum_cannot_lower_gamma(vals, bump):
    vals = sorted(vals, reverse=True)
    m = len(vals) // 2
    before = hill_estimate(TailSample.from_values(vals), m).gamma
    # replace the top order statistic with a strictly larger value
    after = hill_estimate(TailSample.from_values([vals[0] * bump] + vals[1:]), m).gamma
    assert after > before


def test_hill_converges_on_pareto():
    errs = []
    for n, m in ((500, 25), (20_000, 1000)):
        g = [hill_estimate(TailSample.from_values(gen_pareto(GeneratorSpec("pareto", 3.0, n), rng=replication_rng(n, i))), m).gamma
             for i in range(100)]
        errs.append(abs(np.mean(g) - 1 / 3) + np.std(g))
    assert errs[1] < errs[0] / 2


# --- spectrum --------------------------------------------------------------

def test_spectrum_single_point():
    t = TailSample.from_values(gen_pareto(GeneratorSpec("pareto", 3.0, 100, seed=5)))
    s = hill_spectrum(t, 17, 17)
    assert s.pairs == [(17, pytest.approx(hill_estimate(t, 17).gamma, rel=1e-12))]


def test_spectrum_incremental_equals_scratch():
    x = gen_pareto(GeneratorSpec("pareto", 2.0, 300, seed=8))
    t = TailSample.from_values(x)
    s = hill_spectrum(t)
    assert s.m[0] == 2 and s.m[-1] == 150
    for m, g in s.pairs:
        assert g == pytest.approx(oracle_hill(x.tolist(), m), rel=1e-11)


def test_spectrum_on_quantile_grid_is_flat():
    # gamma(m) on the exact grid is (ln(m+1) - ln(m!)/m)/alpha: within 3% of 1/alpha for m >= 100
    t = TailSample.from_values(deterministic_pareto_grid(3.0, 10_000))
    s = hill_spectrum(t, 100, 5000)
    assert (s.gamma.max() - s.gamma.min()) * 3.0 < 0.03


def test_spectrum_range_errors():
    t = TailSample.from_values([8.0, 4.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        hill_spectrum(t, 3, 2)
    with pytest.raises(ValueError):
        hill_spectrum(t, 2, 4)
    with pytest.raises(ValueError):
        hill_spectrum(t, 1, 2)


# --- WLS correction ----------------------------------------------------------

def _fake_spectrum(gammas, n_tail=400):
    t = TailSample.from_values(deterministic_pareto_grid(2.0, n_tail))
    m = np.arange(2, 2 + len(gammas))
    return HillSpectrum(m, np.asarray(gammas, dtype=float), t)


def test_wls_constant_spectrum():
    e = huisman_wls(_fake_spectrum([0.37] * 50))
    assert e.gamma == pytest.approx(0.37, abs=1e-13)
    b0, b1 = wls_line(np.arange(2.0, 52.0), np.full(50, 0.37), np.arange(2.0, 52.0))
    assert b1 == pytest.approx(0.0, abs=1e-14)


def test_wls_linear_spectrum():
    m = np.arange(2, 120)
    e = huisman_wls(_fake_spectrum(0.4 + 0.001 * m))
    assert e.gamma == pytest.approx(0.4, abs=1e-12)


def test_wls_matches_weighted_lstsq():
    rng = np.random.default_rng(0)
    m = np.arange(2.0, 80.0)
    y = 0.3 + 0.002 * m + rng.normal(0, 0.02, m.size)
    w = np.sqrt(m)  # row scaling -> objective weight m
    ref = np.linalg.lstsq(np.column_stack([np.ones_like(m), m]) * w[:, None], y * w, rcond=None)[0]
    assert wls_line(m, y, m) == pytest.approx(tuple(ref), rel=1e-10)


def test_wls_errors():
    with pytest.raises(ValueError, match="non-heavy"):
        huisman_wls(_fake_spectrum(-0.1 + 0.0 * np.arange(10)))
    with pytest.raises(ValueError):
        huisman_wls(_fake_spectrum([0.3, 0.3]))
    with pytest.raises(ValueError, match="singular"):
        wls_line(np.full(5, 3.0), np.arange(5.0), np.ones(5))


def test_crossing_takes_median_crossing():
    m = np.array([2.0, 3.0, 4.0, 5.0, 6.0])
    g = np.array([0.5, 0.2, 0.6, 0.3, 0.6])
    # crossings of 0.45 near m = 2.17, 3.63, 4.5, 5.5; the upper median is 4.5
    assert crossing_m(m, g, 0.45) == pytest.approx(4.5)
    # two crossings (m = 2.33, 3.5): upper median
    assert crossing_m(m[:3], g[:3], 0.4) == pytest.approx(3.5)
    # never reached: nearest point
    assert crossing_m(m, g, 0.9) == 4.0


def test_huisman_effective_m_and_threshold():
    x = gen_pareto(GeneratorSpec("pareto", 3.0, 2000, seed=3))
    t = TailSample.from_values(x)
    e = huisman_wls(hill_spectrum(t))
    lo = int(e.m)
    assert t.exceedances[lo + 1] <= e.r_m <= t.exceedances[lo]
    assert e.se_gamma == pytest.approx(e.gamma / math.sqrt(e.m))
    assert e.method == "huisman"


# --- tests on alpha --------------------------------------------------------

def test_moment_test_values():
    e = est(2.0, 0.4)
    assert moment_test(e, 2) == 0
    assert moment_test(e, 0) == pytest.approx(5.0)
    e25 = hill_estimate(TailSample.from_values(deterministic_pareto_grid(2.0, 100)), 25)
    assert e25.se_alpha == pytest.approx(e25.alpha / 5)


def test_moment_test_supplied_se():
    e = est(2.46, 0.22)
    got = [moment_test(e, c, se=0.434) for c in (0, 2, 4)]
    assert got == pytest.approx([5.67, 1.06, -3.55], abs=0.01)


def test_stability_values():
    a, b = est(2.44, 0.24), est(2.78, 0.29)
    assert stability_test(a, a) == 0
    assert stability_test(a, b) == pytest.approx(-0.9032, abs=1e-4)
    assert stability_test(a, b) == -stability_test(b, a)


def test_fit_tails_identical_series():
    r = symmetric_returns(GeneratorSpec("pareto", 3.0, 3000, seed=4))
    rep = fit_tails(r, r)
    assert len(rep.rows) == 6
    for side in ("common", "lower", "upper"):
        assert rep.stability(side) == 0
    header, rows = rep.table()
    assert header[:8] == ["tail", "order", "alpha", "se", "t0", "t2", "t4", "stability"]
    assert [(r[0], r[1]) for r in rows] == [
        ("common", "limit"), ("common", "market"), ("lower", "limit"),
        ("lower", "market"), ("upper", "limit"), ("upper", "market"),
    ]
    assert sum(r[7] is not None for r in rows) == 3


def test_fit_tails_false_rejection_rate():
    ok = 0
    runs = 60
    for i in range(runs):
        a = symmetric_returns(GeneratorSpec("pareto", 3.0, 5000, seed=10_000 + 2 * i))
        b = symmetric_returns(GeneratorSpec("pareto", 3.0, 5000, seed=10_001 + 2 * i))
        rep = fit_tails(a, b, sides=("common",))
        ok += abs(rep.stability("common")) < 1.96
    assert ok >= 0.9 * runs
