"""Seeded workload generators: determinism, shape, and distribution facts."""

from __future__ import annotations

import numpy as np
import pytest

import tiersched as ts
from _util import topo

T42 = topo(4, 2, ratio=4.0)


class TestUniform:
    def test_range_and_diagonal(self):
        d = ts.gen_uniform(5, T42, 100)
        assert d.sizes.max() <= 200
        assert d.sizes.min() >= 0
        assert np.diagonal(d.sizes).sum() == 0

    def test_deterministic_and_seed_sensitive(self):
        a = ts.gen_uniform(5, T42, 100)
        b = ts.gen_uniform(5, T42, 100)
        c = ts.gen_uniform(6, T42, 100)
        assert np.array_equal(a.sizes, b.sizes)
        assert not np.array_equal(a.sizes, c.sizes)

    def test_mean_is_roughly_respected(self):
        t = topo(4, 8, ratio=4.0)
        d = ts.gen_uniform(0, t, 1_000_000)
        off = d.sizes[~np.eye(t.gpu_count, dtype=bool)]
        assert off.mean() == pytest.approx(1_000_000, rel=0.05)

    def test_rejects_bad_mean(self):
        with pytest.raises(ts.ValidationError):
            ts.gen_uniform(0, T42, 0)


class TestZipf:
    def test_total_is_exact(self):
        for total in [1, 999, 10_000_000_001]:
            d = ts.gen_zipf(3, T42, 0.9, total)
            assert d.total_bytes() == total

    def test_skew_orders_pairs_by_rank(self):
        d = ts.gen_zipf(7, T42, 0.9, 1_000_000)
        off = d.sizes[~np.eye(8, dtype=bool)]
        ordered = np.sort(off)[::-1]
        # Top-ranked pair holds the largest share; shares fall with rank.
        assert ordered[0] == d.sizes.max()
        assert ordered[0] > ordered[-1]

    def test_skew_zero_is_near_uniform(self):
        d = ts.gen_zipf(1, T42, 0.0, 10_007)
        off = d.sizes[~np.eye(8, dtype=bool)]
        assert off.max() - off.min() <= 1

    def test_higher_skew_concentrates(self):
        lo = ts.gen_zipf(2, T42, 0.1, 1_000_000)
        hi = ts.gen_zipf(2, T42, 0.9, 1_000_000)
        assert hi.sizes.max() > lo.sizes.max()

    def test_deterministic(self):
        a = ts.gen_zipf(11, T42, 0.5, 12345)
        b = ts.gen_zipf(11, T42, 0.5, 12345)
        assert np.array_equal(a.sizes, b.sizes)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ts.ValidationError, match="skew"):
            ts.gen_zipf(0, T42, 1.0, 100)
        with pytest.raises(ts.ValidationError, match="skew"):
            ts.gen_zipf(0, T42, -0.1, 100)
        with pytest.raises(ts.ValidationError, match="total"):
            ts.gen_zipf(0, T42, 0.5, 0)


class TestAdversarial:
    def test_structure(self):
        t = topo(3, 2, ratio=4.0)
        d = ts.gen_adversarial(t, 77)
        for i in range(3):
            for j in range(3):
                block = d.sizes[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                if i == j:
                    assert block.sum() == 0
                else:
                    assert block[0, 0] == 77
                    assert block.sum() == 77

    def test_server_level_is_complete_graph(self):
        t = topo(4, 2, ratio=4.0)
        s = ts.reduce_to_server_level(ts.gen_adversarial(t, 10), t)
        off = s.off_diagonal()
        assert (off[~np.eye(4, dtype=bool)] == 10).all()

    def test_rejects_bad_bytes(self):
        with pytest.raises(ts.ValidationError):
            ts.gen_adversarial(T42, 0)


class TestLoadTrace:
    def test_roundtrip(self, tmp_path):
        d = ts.gen_uniform(1, T42, 50)
        path = str(tmp_path / "trace.json")
        ts.save_matrix(d, path)
        back = ts.load_trace(path)
        assert np.array_equal(back.sizes, d.sizes)

    @pytest.mark.parametrize("name", ["trace.json", "trace.csv"])
    def test_missing_file(self, name):
        with pytest.raises(ts.ValidationError, match="cannot read"):
            ts.load_trace(f"/nonexistent/{name}")
