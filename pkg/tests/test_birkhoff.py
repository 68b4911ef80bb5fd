"""Embedding, decomposition, stripping, and stage ordering."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tiersched as ts
from _util import HAND3, HAND4, reconstruct, seeded_server_matrix

settings.register_profile(
    "suite", max_examples=60, deadline=None, derandomize=True
)
settings.load_profile("suite")


def ds_matrices(max_n=7, max_terms=6, max_weight=40):
    """Doubly stochastic integer matrices, built as weighted permutation sums."""

    def build(args):
        n, perm_seeds, weights = args
        out = np.zeros((n, n), dtype=np.int64)
        for seed, w in zip(perm_seeds, weights):
            perm = np.argsort(
                ts.rng.stream(seed, n).astype(np.int64), kind="stable"
            )
            out[np.arange(n), perm] += w
        return out

    return st.tuples(
        st.integers(2, max_n),
        st.lists(st.integers(0, 999), min_size=1, max_size=max_terms),
        st.lists(st.integers(1, max_weight), min_size=max_terms, max_size=max_terms),
    ).map(build)


class TestEmbed:
    def test_row_and_column_sums_equalize(self):
        s = ts.ServerMatrix(totals=HAND4.copy())
        embedded, aux = ts.embed_doubly_stochastic(s)
        common = ts.max_rc(s)
        assert common == 14
        assert (embedded.sum(axis=1) == common).all()
        assert (embedded.sum(axis=0) == common).all()
        assert (aux >= 0).all()
        assert np.array_equal(embedded - aux, s.off_diagonal())

    def test_diagonal_padding_when_forced(self):
        # Server 0 sends and receives nothing, so its deficit can only sit
        # on the diagonal without overshooting another row or column.
        totals = np.array(
            [[0, 0, 0], [0, 0, 5], [0, 5, 0]], dtype=np.int64
        )
        embedded, aux = ts.embed_doubly_stochastic(
            ts.ServerMatrix(totals=totals)
        )
        assert aux[0, 0] == 5
        assert (embedded.sum(axis=1) == 5).all()

    def test_zero_matrix(self):
        embedded, aux = ts.embed_doubly_stochastic(
            ts.ServerMatrix(totals=np.zeros((3, 3), dtype=np.int64))
        )
        assert embedded.sum() == 0 and aux.sum() == 0


class TestPerfectMatching:
    def test_permutation_support(self):
        support = np.zeros((3, 3), dtype=bool)
        for i, j in [(0, 2), (1, 0), (2, 1)]:
            support[i, j] = True
        assert ts.find_perfect_matching(support) == {0: 2, 1: 0, 2: 1}

    def test_needs_augmenting_path(self):
        support = np.array(
            [[1, 1, 0], [1, 0, 0], [0, 1, 1]], dtype=bool
        )
        match = ts.find_perfect_matching(support)
        assert sorted(match) == [0, 1, 2]
        assert sorted(match.values()) == [0, 1, 2]
        assert all(support[u, v] for u, v in match.items())

    def test_no_matching_raises(self):
        support = np.array(
            [[1, 0, 0], [1, 0, 0], [1, 1, 1]], dtype=bool
        )
        with pytest.raises(ts.InternalInvariantError):
            ts.find_perfect_matching(support)

    def test_deterministic(self):
        # Index-order augmenting reseats earlier rows through their first
        # occupied column, so full support pins the anti-diagonal.
        support = np.ones((4, 4), dtype=bool)
        match = ts.find_perfect_matching(support)
        assert match == {0: 3, 1: 2, 2: 1, 3: 0}
        assert match == ts.find_perfect_matching(support)


class TestDecompose:
    @pytest.mark.parametrize(
        "bad, needle",
        [
            (np.zeros((2, 3), dtype=np.int64), "square"),
            (np.zeros((2, 2), dtype=np.float64), "integer"),
            (np.array([[1, -1], [-1, 1]], dtype=np.int64), "non-negative"),
            (np.array([[2, 0], [0, 1]], dtype=np.int64), "equal row"),
        ],
    )
    def test_input_validation(self, bad, needle):
        with pytest.raises(ts.ValidationError, match=needle):
            ts.decompose(bad)

    def test_zero_matrix_gives_no_stages(self):
        assert ts.decompose(np.zeros((3, 3), dtype=np.int64)) == []

    def test_identity_times_weight(self):
        stages = ts.decompose(7 * np.eye(4, dtype=np.int64))
        assert len(stages) == 1
        assert stages[0].weight == 7
        assert stages[0].matching == {0: 0, 1: 1, 2: 2, 3: 3}

    @given(ds_matrices())
    def test_exact_reconstruction(self, embedded):
        n = embedded.shape[0]
        stages = ts.decompose(embedded)
        assert np.array_equal(
            reconstruct(stages, n, use_weight=True), embedded
        )
        assert len(stages) <= n * n - 2 * n + 2
        assert all(st.weight > 0 for st in stages)
        assert sum(st.weight for st in stages) == int(embedded.sum(axis=1)[0])
        # Every stage of an un-stripped decomposition is a full permutation.
        assert all(len(st.edges) == n for st in stages)

    @given(ds_matrices(max_n=5))
    def test_deterministic(self, embedded):
        first = ts.decompose(embedded.copy())
        second = ts.decompose(embedded.copy())
        assert first == second


class TestStrip:
    def test_aux_charged_before_real(self):
        stages = [
            ts.PermutationStage(weight=3, edges=((0, 0, 3), (1, 1, 3))),
            ts.PermutationStage(weight=2, edges=((0, 1, 2), (1, 0, 2))),
        ]
        aux = np.array([[3, 1], [0, 0]], dtype=np.int64)
        stripped = ts.strip_auxiliary(stages, aux)
        # Stage 1 loses its (0,0) edge entirely and keeps (1,1) partially;
        # stage 2 keeps (1,0) whole and (0,1) partially.
        assert len(stripped) == 2
        assert stripped[0].edges == ((1, 1, 3),)
        assert stripped[0].weight == 3
        assert stripped[1].edges == ((0, 1, 1), (1, 0, 2))

    def test_pure_aux_stage_disappears(self):
        stages = [ts.PermutationStage(weight=4, edges=((0, 1, 4), (1, 0, 4)))]
        aux = np.array([[0, 4], [4, 0]], dtype=np.int64)
        assert ts.strip_auxiliary(stages, aux) == []

    def test_leftover_aux_is_loud(self):
        stages = [ts.PermutationStage(weight=1, edges=((0, 0, 1), (1, 1, 1)))]
        aux = np.array([[5, 0], [0, 0]], dtype=np.int64)
        with pytest.raises(ts.InternalInvariantError):
            ts.strip_auxiliary(stages, aux)

    @given(ds_matrices(max_n=6))
    def test_stripped_stages_cover_exactly_the_real_bytes(self, embedded):
        n = embedded.shape[0]
        # Treat a deterministic slice of the matrix as auxiliary: the
        # difference against a smaller real demand with the same support.
        real = embedded // 2
        aux = embedded - real
        stages = ts.decompose(embedded)
        stripped = ts.strip_auxiliary(stages, aux)
        assert np.array_equal(reconstruct(stripped, n), real)
        for stage in stripped:
            assert stage.edges
            assert all(0 < b <= stage.weight for _, _, b in stage.edges)


class TestSortStages:
    def test_ascending_with_edge_tiebreak(self):
        a = ts.PermutationStage(weight=2, edges=((1, 0, 2),))
        b = ts.PermutationStage(weight=1, edges=((0, 1, 1),))
        c = ts.PermutationStage(weight=2, edges=((0, 1, 2),))
        assert ts.sort_stages_ascending([a, b, c]) == [b, c, a]

    def test_stable_for_full_ties(self):
        a = ts.PermutationStage(weight=2, edges=((0, 1, 2), (1, 0, 2)))
        b = ts.PermutationStage(weight=2, edges=((0, 1, 2), (2, 2, 2)))
        assert ts.sort_stages_ascending([a, b]) == [a, b]
        assert ts.sort_stages_ascending([b, a]) == [b, a]


class TestServerMatrixDecomposition:
    def test_hand_instance(self):
        s = ts.ServerMatrix(totals=HAND3.copy())
        d = ts.decompose_server_matrix(s)
        assert d.common_sum == 8
        assert sum(st.weight for st in d.stages) == 8
        assert np.array_equal(
            reconstruct(list(d.stages), 3, use_weight=True),
            s.off_diagonal() + d.aux,
        )

    def test_random_instances_reconstruct(self):
        for seed in range(25):
            s = seeded_server_matrix(seed, 2 + seed % 7)
            d = ts.decompose_server_matrix(s)
            n = s.n_servers
            assert np.array_equal(
                reconstruct(list(d.stages), n, use_weight=True),
                s.off_diagonal() + d.aux,
            )
            stripped = ts.strip_auxiliary(list(d.stages), d.aux)
            assert np.array_equal(
                reconstruct(stripped, n), s.off_diagonal()
            )
