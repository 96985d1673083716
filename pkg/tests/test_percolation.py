import numpy as np
import pytest

from secperc import (
    ValidationError,
    build_square,
    compare_window,
    connection_probability,
    crossing_probability,
    estimate_threshold,
    sample_clusters,
    spanning_onsets,
    spanning_probability,
    transform_to_triangular,
)
from secperc.percolation import family_builder


class TestSampleClusters:
    def test_all_open_is_one_spanning_cluster(self):
        g = build_square(6, 7).with_edge_probability(1.0)
        stats = sample_clusters(g, seed=5)
        assert stats.largest_fraction == 1.0
        assert stats.spanning
        assert len(stats.sizes) == 1

    def test_all_closed_is_all_singletons(self):
        g = build_square(6, 7).with_edge_probability(0.0)
        stats = sample_clusters(g, seed=5)
        assert not stats.spanning
        assert len(stats.sizes) == g.n_nodes
        assert stats.largest_fraction == 1.0 / g.n_nodes

    @pytest.mark.parametrize("seed", [1, 2, 3, 4])
    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    def test_sizes_partition_the_node_set(self, seed, p):
        g = build_square(10, 11).with_edge_probability(p)
        stats = sample_clusters(g, seed=seed)
        assert stats.sizes.sum() == g.n_nodes
        assert stats.sizes.max() == stats.sizes[0]

    def test_requires_resolved_graph(self):
        with pytest.raises(ValidationError):
            sample_clusters(build_square(4, 4), seed=1)

    def test_deterministic_per_seed(self):
        g = build_square(8, 9).with_edge_probability(0.5)
        a = sample_clusters(g, seed=11)
        b = sample_clusters(g, seed=11)
        assert np.array_equal(a.sizes, b.sizes) and a.spanning == b.spanning


class TestCrossingProbability:
    def test_certain_edges_always_cross(self):
        est = crossing_probability(family_builder("square"), 8, 1.0, 64, seed=3)
        assert est.frequency == 1.0
        assert est.std_error == 0.0

    def test_absent_edges_never_cross(self):
        est = crossing_probability(family_builder("square"), 8, 0.0, 64, seed=3)
        assert est.frequency == 0.0

    def test_monotone_in_edge_probability(self):
        """Shared onsets couple the sweep, so the curve is exactly monotone
        for one seed; it stays monotone within noise across seeds."""
        onsets = spanning_onsets(build_square(16, 17), 500, seed=9)
        freqs = [float(np.mean(onsets <= p)) for p in np.linspace(0.1, 0.9, 9)]
        assert all(a <= b for a, b in zip(freqs, freqs[1:]))

    def test_square_calibration_near_half(self):
        est = crossing_probability(family_builder("square"), 48, 0.5, 1500, seed=12)
        assert 0.42 <= est.frequency <= 0.58

    def test_rejects_resolved_graph(self):
        with pytest.raises(ValidationError):
            crossing_probability(
                lambda L: build_square(L, L).with_edge_probability(0.3), 8, 0.5, 10, 1
            )

    def test_thread_count_does_not_change_results(self):
        g = build_square(12, 13)
        a = spanning_onsets(g, 300, seed=21, threads=1)
        b = spanning_onsets(g, 300, seed=21, threads=3)
        assert np.array_equal(a, b)


class TestSpanningProbability:
    def test_resolved_graph_at_own_probabilities(self):
        g = build_square(10, 11).with_edge_probability(0.95)
        est = spanning_probability(g, 200, seed=4)
        assert est.frequency > 0.9

    def test_requires_resolved(self):
        with pytest.raises(ValidationError):
            spanning_probability(build_square(4, 4), 10, 1)


class TestConnectionProbability:
    def test_adjacent_nodes_with_certain_edge(self):
        g = build_square(4, 5).with_edge_probability(1.0)
        assert connection_probability(g, 0, 1, 32, seed=2).frequency == 1.0

    def test_disconnected_when_all_edges_closed(self):
        g = build_square(4, 5).with_edge_probability(0.0)
        assert connection_probability(g, 0, 1, 32, seed=2).frequency == 0.0

    def test_identical_nodes_rejected(self):
        g = build_square(4, 5).with_edge_probability(0.5)
        with pytest.raises(ValidationError):
            connection_probability(g, 3, 3, 10, 1)

    def test_unknown_node_rejected(self):
        g = build_square(4, 5).with_edge_probability(0.5)
        with pytest.raises(ValidationError):
            connection_probability(g, 0, 10_000, 10, 1)

    def test_transformed_beats_naive_for_distant_pair(self):
        """Inside the window the transformed lattice connects a distant node
        pair more often than the naive strategy on the same resource.  The
        pair lives on the kept sublattice so both graphs contain it."""
        p = 0.176
        hex_graph = family_builder("honeycomb", multiplicity=2)(64)
        naive = hex_graph.with_naive_strategy(p)
        transformed = transform_to_triangular(hex_graph, p)
        ta = int(transformed.left[len(transformed.left) // 2])
        tb = int(transformed.right[len(transformed.right) // 2])
        pos_to_hex = {
            tuple(q): i for i, q in enumerate(np.round(hex_graph.positions, 9).tolist())
        }
        ha = pos_to_hex[tuple(np.round(transformed.positions[ta], 9).tolist())]
        hb = pos_to_hex[tuple(np.round(transformed.positions[tb], 9).tolist())]
        f_naive = connection_probability(naive, ha, hb, 1500, seed=31)
        f_trans = connection_probability(transformed, ta, tb, 1500, seed=32)
        assert f_trans.frequency > f_naive.frequency + 2 * (
            f_trans.std_error + f_naive.std_error
        )


class TestEstimateThreshold:
    def test_square_small_sizes(self):
        est = estimate_threshold(family_builder("square"), [16, 32], 2000, seed=40)
        assert abs(est.estimate - 0.5) < 0.02
        assert est.half_width > 0
        assert est.sizes == (16, 32)
        assert est.trials_per_point == 2000

    def test_sweep_table_shape(self):
        est = estimate_threshold(family_builder("square"), [12, 16], 500, seed=41)
        sizes_in_sweep = {row[0] for row in est.sweep}
        assert sizes_in_sweep == {12, 16}
        for _, p, freq in est.sweep:
            assert 0.0 <= freq <= 1.0

    def test_non_bracketing_interval_rejected(self):
        with pytest.raises(ValidationError):
            estimate_threshold(
                family_builder("square"), [12], 500, seed=42, bracket=(0.9, 0.95)
            )

    def test_minimum_trials_enforced(self):
        with pytest.raises(ValidationError):
            estimate_threshold(family_builder("square"), [12], 50, seed=43)

    def test_needs_a_size(self):
        with pytest.raises(ValidationError):
            estimate_threshold(family_builder("square"), [], 500, seed=44)


class TestFamilyBuilder:
    def test_known_families(self):
        assert family_builder("square")(8).family == "square"
        assert family_builder("triangular")(8).family == "triangular"
        assert family_builder("honeycomb", 2)(8).family == "honeycomb"

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            family_builder("kagome")

    def test_multiplicity_only_for_honeycomb(self):
        with pytest.raises(ValidationError):
            family_builder("square", multiplicity=2)


class TestCompareWindow:
    def test_both_strategies_percolate_above_window(self):
        cmp = compare_window(0.25, [24], 400, seed=50)
        row = cmp.rows[0]
        assert row.naive_frequency > 0.8
        assert row.transformed_frequency > 0.8

    def test_neither_percolates_below_window(self):
        cmp = compare_window(0.05, [24], 400, seed=51)
        row = cmp.rows[0]
        assert row.naive_frequency < 0.1
        assert row.transformed_frequency < 0.1

    def test_edge_probabilities_reported(self):
        cmp = compare_window(0.176, [16], 200, seed=52)
        assert cmp.naive_edge_prob == pytest.approx(2 * 0.176 * (2 - 0.176), abs=1e-12)
        assert cmp.transformed_edge_prob == pytest.approx(0.352, abs=1e-12)
