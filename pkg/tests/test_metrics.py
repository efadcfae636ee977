import numpy as np
import pytest

from cellbench import metrics

from oracles import exhaustive_match, random_label_map


def no_boundary():
    return metrics.MatchConfig(remove_boundary="none")


class TestIouMatrix:
    def test_identical_maps_identity_diagonal(self, disk_map_factory):
        labels = disk_map_factory((30, 30), [(8, 8), (8, 22), (22, 15)], [3, 3, 3])
        iou = metrics.iou_matrix(labels, labels)
        assert iou.shape == (3, 3)
        assert np.allclose(np.diag(iou), 1.0)
        assert np.allclose(iou - np.diag(np.diag(iou)), 0.0)

    def test_disjoint_cells_all_zero(self):
        gt = np.zeros((10, 10), int)
        gt[1:3, 1:3] = 1
        pred = np.zeros((10, 10), int)
        pred[6:8, 6:8] = 1
        assert np.all(metrics.iou_matrix(gt, pred) == 0.0)

    def test_nested_cell_fraction(self):
        gt = np.zeros((12, 12), int)
        gt[3:7, 3:7] = 1  # 16 px
        pred = np.zeros((12, 12), int)
        pred[3:7, 3:6] = 1  # 12 px inside
        iou = metrics.iou_matrix(gt, pred)
        assert iou.shape == (1, 1)
        assert iou[0, 0] == pytest.approx(12 / 16, abs=0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            metrics.iou_matrix(np.zeros((3, 3), int), np.zeros((3, 4), int))

    def test_arbitrary_ids_follow_sorted_order(self):
        gt = np.zeros((8, 8), int)
        gt[1:3, 1:3] = 9
        gt[5:7, 5:7] = 4
        iou = metrics.iou_matrix(gt, gt)
        assert iou.shape == (2, 2)
        assert np.allclose(np.diag(iou), 1.0)


class TestMatchInstances:
    def test_perfect_prediction(self, disk_map_factory):
        labels = disk_map_factory((30, 30), [(10, 10), (20, 20)], [3, 3])
        result = metrics.match_instances(labels, labels, no_boundary())
        assert (result.tp, result.fp, result.fn_) == (2, 0, 0)

    def test_empty_prediction(self, disk_map_factory):
        gt = disk_map_factory((30, 30), [(8, 8), (8, 22), (22, 15)], [3, 3, 3])
        result = metrics.match_instances(gt, np.zeros_like(gt), no_boundary())
        assert (result.tp, result.fp, result.fn_) == (0, 0, 3)
        assert result.pairs == []

    def test_iou_exactly_half_fails_strict_test(self):
        gt = np.zeros((8, 8), int)
        gt[3, 3:5] = 1  # 2 px
        pred = np.zeros((8, 8), int)
        pred[3, 3:5] = 1
        pred[4, 3:5] = 1  # 4 px total, IoU = 2/4
        result = metrics.match_instances(gt, pred, no_boundary())
        assert (result.tp, result.fp, result.fn_) == (0, 1, 1)
        relaxed = metrics.MatchConfig(strict_inequality=False, remove_boundary="none")
        result = metrics.match_instances(gt, pred, relaxed)
        assert (result.tp, result.fp, result.fn_) == (1, 0, 0)

    def test_boundary_cells_removed_from_both_by_default(self):
        labels = np.zeros((8, 8), int)
        labels[2:5, 2:5] = 1
        labels[2:5, 7] = 2
        result = metrics.match_instances(labels, labels)  # default cfg
        assert (result.tp, result.fp, result.fn_) == (1, 0, 0)

    def test_gt_only_boundary_mode(self):
        labels = np.zeros((8, 8), int)
        labels[2:5, 2:5] = 1
        labels[2:5, 7] = 2
        cfg = metrics.MatchConfig(remove_boundary="gt_only")
        result = metrics.match_instances(labels, labels, cfg)
        # boundary cell kept in pred becomes a false positive
        assert (result.tp, result.fp, result.fn_) == (1, 1, 0)

    def test_pairs_one_to_one_and_above_threshold(self, rng):
        for _ in range(20):
            gt = random_label_map(rng, 24, 24, int(rng.integers(1, 6)))
            pred = random_label_map(rng, 24, 24, int(rng.integers(1, 6)))
            result = metrics.match_instances(gt, pred, no_boundary())
            gts = [g for g, _, _ in result.pairs]
            preds = [p for _, p, _ in result.pairs]
            assert len(set(gts)) == len(gts)
            assert len(set(preds)) == len(preds)
            assert all(iou > 0.5 for _, _, iou in result.pairs)

    def test_agrees_with_exhaustive_matcher(self, rng):
        for _ in range(100):
            h, w = int(rng.integers(4, 33)), int(rng.integers(4, 33))
            gt = random_label_map(rng, h, w, int(rng.integers(0, 7)))
            pred = random_label_map(rng, h, w, int(rng.integers(0, 7)))
            result = metrics.match_instances(gt, pred)
            expected = exhaustive_match(gt, pred, boundary="both")
            assert (result.tp, result.fp, result.fn_) == expected


class TestPrecisionRecallF1:
    def test_perfect(self):
        rec = metrics.precision_recall_f1(1, 0, 0)
        assert (rec.precision, rec.recall, rec.f1) == (1.0, 1.0, 1.0)

    def test_zero_tp_convention(self):
        rec = metrics.precision_recall_f1(0, 2, 3)
        assert (rec.precision, rec.recall, rec.f1) == (0.0, 0.0, 0.0)
        rec = metrics.precision_recall_f1(0, 0, 0)
        assert rec.f1 == 0.0

    def test_harmonic_mean_value(self):
        rec = metrics.precision_recall_f1(3, 1, 2)
        assert rec.precision == pytest.approx(0.75, abs=0)
        assert rec.recall == pytest.approx(0.6, abs=0)
        assert rec.f1 == pytest.approx(2 / 3)

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            metrics.precision_recall_f1(-1, 0, 0)


class TestEvaluateImagePair:
    def test_identity_scores_one(self, disk_map_factory):
        labels = disk_map_factory((30, 30), [(10, 10), (20, 20)], [4, 4])
        assert metrics.evaluate_image_pair(labels, labels).f1 == 1.0

    def test_border_cell_removed_from_both_still_one(self):
        labels = np.zeros((10, 10), int)
        labels[3:6, 3:6] = 1
        labels[0, 4:7] = 2  # touches top border
        assert metrics.evaluate_image_pair(labels, labels).f1 == 1.0

    def test_partial_match_scores_half(self):
        gt = np.zeros((20, 20), int)
        gt[3:8, 3:8] = 1
        gt[12:17, 12:17] = 2
        pred = np.zeros((20, 20), int)
        pred[3:8, 3:7] = 1  # IoU 0.8 with gt cell 1
        pred[3:8, 14:18] = 2  # spurious
        rec = metrics.evaluate_image_pair(gt, pred)
        assert rec.f1 == pytest.approx(0.5)


class TestProperties:
    def test_swap_symmetry(self, rng):
        for _ in range(20):
            gt = random_label_map(rng, 20, 20, 4)
            pred = random_label_map(rng, 20, 20, 4)
            a = metrics.evaluate_image_pair(gt, pred)
            b = metrics.evaluate_image_pair(pred, gt)
            assert a.precision == pytest.approx(b.recall)
            assert a.recall == pytest.approx(b.precision)
            assert a.f1 == pytest.approx(b.f1)

    def test_label_permutation_invariance(self, rng):
        gt = random_label_map(rng, 20, 20, 5)
        pred = random_label_map(rng, 20, 20, 5)
        base = metrics.evaluate_image_pair(gt, pred)
        perm = rng.permutation(np.arange(1, 10)).astype(np.int64)
        lut = np.concatenate([[0], perm])
        shuffled = lut[np.minimum(pred, 9)]
        rec = metrics.evaluate_image_pair(gt, shuffled)
        assert rec.f1 == pytest.approx(base.f1)
        assert rec.precision == pytest.approx(base.precision)

    def test_deleting_false_positive_never_hurts(self, rng):
        for _ in range(10):
            gt = random_label_map(rng, 24, 24, 3)
            pred = random_label_map(rng, 24, 24, 5)
            result = metrics.match_instances(gt, pred, no_boundary())
            if result.fp == 0:
                continue
            matched_preds = {p for _, p, _ in result.pairs}
            # remove one unmatched component from the normalized prediction
            from cellbench.labelmap import relabel_connected

            norm = relabel_connected(pred)
            fp_ids = sorted(set(range(1, int(norm.max()) + 1)) - matched_preds)
            before = metrics.evaluate_image_pair(gt, norm, no_boundary())
            pruned = norm.copy()
            pruned[pruned == fp_ids[0]] = 0
            after = metrics.evaluate_image_pair(gt, pruned, no_boundary())
            assert after.precision >= before.precision - 1e-12
            assert after.f1 >= before.f1 - 1e-12
