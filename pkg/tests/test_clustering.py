"""Pairwise matrix construction, linkage algebra, dendrogram cuts, file formats."""

import numpy as np
import pytest

from cepclust import clustering, distances, signals
from cepclust.errors import DataFormatError, UsageError, ValidationError


class CountingMeasure:
    """Trivial measure that records how often its two phases run."""

    name = "counting"

    def __init__(self):
        self.prepare_calls = 0
        self.compute_calls = 0

    def prepare(self, dataset):
        self.prepare_calls += 1
        return list(range(len(dataset.pairs)))

    def compute(self, left, right):
        self.compute_calls += 1
        return abs(left - right)


def euclidean_output_measure():
    return clustering.FunctionMeasure(
        lambda a, b: distances.d_euclidean(a.output.values, b.output.values), name="euclid"
    )


def two_blob_matrix(rng, sizes=(5, 4), within=1.0, cross=100.0):
    n = sum(sizes)
    entries = np.full((n, n), cross)
    entries[: sizes[0], : sizes[0]] = within * rng.uniform(0.5, 1.0, (sizes[0], sizes[0]))
    entries[sizes[0] :, sizes[0] :] = within * rng.uniform(0.5, 1.0, (sizes[1], sizes[1]))
    entries = np.triu(entries, 1)
    entries = entries + entries.T
    return clustering.DistanceMatrix(entries)


class TestDistanceMatrix:
    def test_rejects_asymmetry(self):
        with pytest.raises(ValidationError):
            clustering.DistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            clustering.DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValidationError):
            clustering.DistanceMatrix(np.array([[1.0, 2.0], [2.0, 0.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            clustering.DistanceMatrix(np.array([[0.0, np.inf], [np.inf, 0.0]]))


class TestPairwiseMatrix:
    def make_dataset(self, n_pairs):
        ts = signals.TimeSeries(np.arange(4, dtype=float))
        pairs = [signals.IOPair(ts, ts, f"p{i}") for i in range(n_pairs)]
        return signals.LabeledDataset(pairs, np.zeros(n_pairs, dtype=int))

    def test_identical_pairs_give_zero_matrix(self):
        matrix = clustering.pairwise_matrix(self.make_dataset(3), euclidean_output_measure())
        assert np.array_equal(matrix.entries, np.zeros((3, 3)))

    def test_compute_runs_once_per_unordered_pair(self):
        # 400 pairs -> 400 * 399 / 2 = 79800 evaluations, none repeated.
        measure = CountingMeasure()
        clustering.pairwise_matrix(self.make_dataset(400), measure)
        assert measure.compute_calls == 79800

    def test_prepare_runs_once(self):
        measure = CountingMeasure()
        clustering.pairwise_matrix(self.make_dataset(40), measure)
        assert measure.prepare_calls == 1
        assert measure.compute_calls == 40 * 39 // 2

    def test_result_is_exactly_symmetric_with_zero_diagonal(self, small_dataset):
        matrix = clustering.pairwise_matrix(small_dataset, euclidean_output_measure())
        assert np.array_equal(matrix.entries, matrix.entries.T)
        assert np.all(np.diag(matrix.entries) == 0)

    def test_thread_count_does_not_change_result(self, small_dataset):
        measure = euclidean_output_measure()
        serial = clustering.pairwise_matrix(small_dataset, measure, threads=1)
        threaded = clustering.pairwise_matrix(small_dataset, measure, threads=8)
        assert np.array_equal(serial.entries, threaded.entries)

    def test_measure_error_names_the_pair(self):
        def broken(left, right):
            raise ValueError("boom")

        with pytest.raises(ValueError, match=r"pair \(0, 1\)"):
            clustering.pairwise_matrix(self.make_dataset(3), broken)

    def test_extended_measure_separates_systems(self, medium_dataset):
        # On the benchmark dataset the two circuits form clean blocks:
        # every within-system distance sits below every cross-system one.
        from cepclust import evaluation

        measure = evaluation.make_measure("extended-cepstral")
        matrix = clustering.pairwise_matrix(medium_dataset, measure)
        labels = medium_dataset.ground_truth
        same = matrix.entries[np.ix_(labels == 0, labels == 0)]
        cross = matrix.entries[np.ix_(labels == 0, labels == 1)]
        within_max = max(same[np.triu_indices_from(same, 1)].max(),
                         matrix.entries[np.ix_(labels == 1, labels == 1)].max())
        assert within_max < cross.min()


class TestHierarchicalCluster:
    def test_hand_traced_average_linkage(self):
        entries = np.array(
            [
                [0.0, 2.0, 6.0, 10.0],
                [2.0, 0.0, 5.0, 9.0],
                [6.0, 5.0, 0.0, 4.0],
                [10.0, 9.0, 4.0, 0.0],
            ]
        )
        dendrogram = clustering.hierarchical_cluster(clustering.DistanceMatrix(entries), "average")
        assert dendrogram.merges == [(0, 1, 2.0), (2, 3, 4.0), (4, 5, 7.5)]

    def test_two_points_single_merge(self):
        matrix = clustering.DistanceMatrix(np.array([[0.0, 3.0], [3.0, 0.0]]))
        dendrogram = clustering.hierarchical_cluster(matrix)
        assert dendrogram.merges == [(0, 1, 3.0)]

    @pytest.mark.parametrize("linkage", ["average", "complete", "single"])
    def test_two_blobs_merge_last(self, linkage, rng):
        dendrogram = clustering.hierarchical_cluster(two_blob_matrix(rng), linkage)
        heights = [h for (_a, _b, h) in dendrogram.merges]
        assert max(heights[:-1]) <= 1.0
        assert heights[-1] >= 100.0

    @pytest.mark.parametrize("linkage", ["average", "complete"])
    def test_heights_nondecreasing(self, linkage, rng):
        # Average and complete linkage cannot produce inversions.
        for _ in range(5):
            raw = rng.uniform(0.1, 5.0, (12, 12))
            raw = np.triu(raw, 1)
            matrix = clustering.DistanceMatrix(raw + raw.T)
            heights = [h for (_a, _b, h) in clustering.hierarchical_cluster(matrix, linkage).merges]
            assert all(a <= b + 1e-12 for a, b in zip(heights, heights[1:]))

    def test_unknown_linkage(self):
        matrix = clustering.DistanceMatrix(np.zeros((2, 2)))
        with pytest.raises(UsageError):
            clustering.hierarchical_cluster(matrix, "ward")

    def test_scale_invariance_of_merge_order(self, rng):
        raw = rng.uniform(0.1, 5.0, (10, 10))
        raw = np.triu(raw, 1)
        base = clustering.DistanceMatrix(raw + raw.T)
        scaled = clustering.DistanceMatrix(7.0 * base.entries)
        merges_base = clustering.hierarchical_cluster(base).merges
        merges_scaled = clustering.hierarchical_cluster(scaled).merges
        assert [(a, b) for a, b, _h in merges_base] == [(a, b) for a, b, _h in merges_scaled]
        for k in (2, 3):
            cut_base = clustering.cut(clustering.hierarchical_cluster(base), k)
            cut_scaled = clustering.cut(clustering.hierarchical_cluster(scaled), k)
            assert np.array_equal(cut_base.labels, cut_scaled.labels)


class TestCut:
    def test_k_equals_n_gives_singletons(self, rng):
        dendrogram = clustering.hierarchical_cluster(two_blob_matrix(rng))
        partition = clustering.cut(dendrogram, 9)
        assert sorted(partition.labels) == list(range(9))

    def test_k_equals_one_gives_single_cluster(self, rng):
        dendrogram = clustering.hierarchical_cluster(two_blob_matrix(rng))
        assert np.array_equal(clustering.cut(dendrogram, 1).labels, np.zeros(9, dtype=int))

    def test_two_blobs_recovered_at_k2(self, rng):
        dendrogram = clustering.hierarchical_cluster(two_blob_matrix(rng, sizes=(5, 4)))
        labels = clustering.cut(dendrogram, 2).labels
        assert np.array_equal(labels, np.array([0] * 5 + [1] * 4))

    @pytest.mark.parametrize("k", [0, 10, -1])
    def test_k_out_of_range(self, k, rng):
        dendrogram = clustering.hierarchical_cluster(two_blob_matrix(rng))
        with pytest.raises(UsageError):
            clustering.cut(dendrogram, k)


class TestMatrixIO:
    def test_round_trip_bitwise(self, rng, tmp_path):
        raw = rng.uniform(0.0, 3.0, (6, 6))
        raw = np.triu(raw, 1)
        matrix = clustering.DistanceMatrix(raw + raw.T)
        path = tmp_path / "matrix.csv"
        clustering.save_matrix(matrix, path)
        assert np.array_equal(clustering.load_matrix(path).entries, matrix.entries)

    def test_malformed_row_reports_row_number(self, tmp_path):
        path = tmp_path / "matrix.csv"
        path.write_text("0.0,1.0\n1.0,zero\n")
        with pytest.raises(DataFormatError, match="row 2"):
            clustering.load_matrix(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "matrix.csv"
        path.write_text("0.0,1.0\n1.0\n")
        with pytest.raises(DataFormatError, match="row 2"):
            clustering.load_matrix(path)

    def test_non_square_rejected(self, tmp_path):
        path = tmp_path / "matrix.csv"
        path.write_text("0.0,1.0,2.0\n1.0,0.0,1.0\n")
        with pytest.raises(DataFormatError):
            clustering.load_matrix(path)


class TestPartitionIO:
    def test_round_trip(self, tmp_path):
        partition = clustering.Partition(np.array([0, 0, 1, 2, 1]))
        ids = [f"p{i}" for i in range(5)]
        path = tmp_path / "partition.csv"
        clustering.save_partition(partition, ids, path)
        back_ids, back = clustering.load_partition(path)
        assert back_ids == ids
        assert np.array_equal(back.labels, partition.labels)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "partition.csv"
        path.write_text("id,cluster\np0,0\n")
        with pytest.raises(DataFormatError):
            clustering.load_partition(path)

    def test_bad_label_reports_row(self, tmp_path):
        path = tmp_path / "partition.csv"
        path.write_text("pair_id,label\np0,zero\n")
        with pytest.raises(DataFormatError, match="row 2"):
            clustering.load_partition(path)
