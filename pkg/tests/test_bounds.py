"""Closed-form bounds, the intra-traffic assumption, and derived metrics."""

from __future__ import annotations

import warnings

import numpy as np
import pytest

import tiersched as ts
from _util import HAND3, topo

RATIO_9 = topo(4, 8, ratio=9.0)


def server(totals):
    return ts.ServerMatrix(totals=np.array(totals, dtype=np.int64))


class TestOptimalTime:
    def test_hand_arithmetic(self):
        s = server(HAND3)
        t = ts.Topology(3, 2, scaleup_bw=100.0, scaleout_bw=10.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert ts.optimal_time(s, t) == pytest.approx(8 / (2 * 10.0))

    def test_warns_when_intra_dominates(self):
        totals = np.array([[90, 3, 3], [0, 0, 3], [3, 3, 0]], dtype=np.int64)
        with pytest.warns(UserWarning, match="intra"):
            ts.optimal_time(ts.ServerMatrix(totals=totals), RATIO_9)

    def test_quiet_when_assumption_holds(self):
        s = server(HAND3)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ts.optimal_time(s, topo(3, 2, ratio=4.0))

    def test_assumption_predicate(self):
        assert ts.intra_assumption_holds(server(HAND3))
        bad = np.array([[9, 3, 3], [0, 0, 3], [3, 3, 0]], dtype=np.int64)
        assert not ts.intra_assumption_holds(ts.ServerMatrix(totals=bad))


class TestWorstCase:
    def test_component_arithmetic(self):
        # n=2, m=2: row max 6, max_rc 6, largest entry 6.
        s = server([[0, 6], [4, 0]])
        t = ts.Topology(2, 2, scaleup_bw=100.0, scaleout_bw=10.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = ts.fast_worstcase_time(s, t)
        t0 = (2 - 1) * 6 / (2 * 100.0)
        t1 = 6 / (2 * 100.0)
        t2 = 6 / (2 * 10.0)
        t3 = 6 / (2 * 100.0)
        assert got == pytest.approx(t0 + t1 + t2 + t3)

    def test_dominates_optimal(self):
        s = server(HAND3)
        t = topo(3, 2, ratio=4.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert ts.fast_worstcase_time(s, t) > ts.optimal_time(s, t)


class TestRatioBound:
    def test_reference_value(self):
        # m=8, n=4, B1/B2=9: 1 + (1/9)(8 + 2) = 19/9.
        assert ts.ratio_bound(RATIO_9) == pytest.approx(19 / 9)

    def test_tightens_with_faster_scale_up(self):
        loose = ts.ratio_bound(topo(4, 8, ratio=2.0))
        tight = ts.ratio_bound(topo(4, 8, ratio=36.0))
        assert tight < loose


class TestAlgorithmicBandwidth:
    def test_value(self):
        assert ts.algorithmic_bandwidth(120, 4, 3.0) == pytest.approx(10.0)

    def test_zero_bytes_is_zero(self):
        assert ts.algorithmic_bandwidth(0, 4, 3.0) == 0.0

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(ts.ValidationError):
            ts.algorithmic_bandwidth(10, 0, 1.0)
        with pytest.raises(ts.ValidationError):
            ts.algorithmic_bandwidth(10, 4, 0.0)


class TestBoundsReport:
    def test_assembly(self):
        s = server(HAND3)
        t = topo(3, 2, ratio=4.0)
        report = ts.bounds_report(s, t, total_bytes=24, completion_s=0.5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert report.t_optimal == ts.optimal_time(s, t)
            assert report.t_fast_worstcase == ts.fast_worstcase_time(s, t)
        assert report.ratio_bound == ts.ratio_bound(t)
        assert report.algo_bw == pytest.approx(24 / (6 * 0.5))
        assert report.assumption_ok
