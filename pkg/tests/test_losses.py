import dataclasses
import math
import random

import pytest

from rotbox.boxes import (
    EncodedFiveParam,
    EncodedQuad,
    FiveParamBox,
    encode_five,
    encode_quad,
    five_to_quad,
)
from rotbox.errors import AnchorMismatch, EmptyBatch
from rotbox.losses import (
    ABSOLUTE,
    Branch,
    PenaltyConfig,
    PenaltyKind,
    Reduction,
    batch_loss,
    grad_lmr_5p,
    grad_lmr_8p,
    l1_5p,
    l1_8p,
    lmr_5p,
    lmr_5p_unnormalized,
    lmr_8p,
    penalty,
)

from conftest import random_canonical_box

SMOOTH = PenaltyConfig(PenaltyKind.SMOOTH_L1, beta=1.0 / 9.0)

ANCHOR = FiveParamBox(0, 0, 10, 25, -90)
BOUNDARY_PRED = FiveParamBox(0, 0, 10, 25, -89)
BOUNDARY_GT = FiveParamBox(0, 0, 25, 10, -1)


def random_enc5(rng, r=2.5):
    return EncodedFiveParam(
        rng.uniform(-1, 1), rng.uniform(-1, 1),
        rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
        rng.uniform(-math.pi / 2, 0), r)


def random_enc8(rng):
    return EncodedQuad(tuple(
        (rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)))


class TestPenalty:
    def test_zero(self):
        assert penalty(0, ABSOLUTE) == 0
        assert penalty(0, SMOOTH) == 0

    def test_absolute(self):
        assert penalty(1, ABSOLUTE) == 1
        assert penalty(-2.5, ABSOLUTE) == 2.5

    def test_smooth_l1_quadratic_region(self):
        assert penalty(0.05, SMOOTH) == pytest.approx(0.5 * 0.05**2 * 9, rel=1e-12)

    def test_smooth_l1_linear_region(self):
        assert penalty(1.0, SMOOTH) == pytest.approx(1.0 - 0.5 / 9, rel=1e-12)

    def test_even_and_continuous(self, rng):
        for _ in range(100):
            d = rng.uniform(-3, 3)
            assert penalty(d, SMOOTH) == penalty(-d, SMOOTH)
        beta = SMOOTH.beta
        assert penalty(beta - 1e-12, SMOOTH) == pytest.approx(
            penalty(beta + 1e-12, SMOOTH), abs=1e-9)


class TestLmr5p:
    def test_identical_is_zero_straight(self):
        e = encode_five(BOUNDARY_GT, ANCHOR)
        lv = lmr_5p(e, e)
        assert lv.value == 0
        assert lv.branch is Branch.STRAIGHT

    def test_boundary_example(self):
        pe = encode_five(BOUNDARY_PRED, ANCHOR)
        ge = encode_five(BOUNDARY_GT, ANCHOR)
        lv = lmr_5p(pe, ge)
        assert lv.value == pytest.approx(2 * math.pi / 180, abs=1e-9)
        assert lv.branch is Branch.SWAPPED
        straight = l1_5p(pe, ge)
        assert straight == pytest.approx(2 * math.log(2.5) + 88 * math.pi / 180,
                                         abs=1e-9)

    def test_small_rotation_straight_branch(self):
        pred = FiveParamBox(0, 0, 10, 25, -50)
        gt = FiveParamBox(0, 0, 10, 25, -40)
        lv = lmr_5p(encode_five(pred, ANCHOR), encode_five(gt, ANCHOR))
        assert lv.branch is Branch.STRAIGHT
        assert lv.value == pytest.approx(10 * math.pi / 180, rel=1e-12)

    def test_anchor_mismatch(self):
        a2 = FiveParamBox(0, 0, 10, 20, -90)
        with pytest.raises(AnchorMismatch):
            lmr_5p(encode_five(BOUNDARY_GT, ANCHOR), encode_five(BOUNDARY_GT, a2))

    def test_min_property_and_symmetry(self, rng):
        for _ in range(2000):
            a, b = random_enc5(rng), random_enc5(rng)
            for cfg in (ABSOLUTE, SMOOTH):
                lv = lmr_5p(a, b, cfg)
                assert lv.value <= l1_5p(a, b, cfg) + 1e-15
                assert lv.value == pytest.approx(lmr_5p(b, a, cfg).value,
                                                 rel=1e-12, abs=1e-12)
                assert lv.value >= 0


class TestLmr5pUnnormalized:
    def test_zero(self):
        assert lmr_5p_unnormalized(BOUNDARY_GT, BOUNDARY_GT).value == 0

    def test_boundary_example_degrees(self):
        lv = lmr_5p_unnormalized(BOUNDARY_PRED, BOUNDARY_GT)
        assert lv.value == pytest.approx(2.0, abs=1e-9)
        assert lv.branch is Branch.SWAPPED

    def test_interior_straight(self):
        lv = lmr_5p_unnormalized(FiveParamBox(0, 0, 10, 25, -45),
                                 FiveParamBox(0, 0, 10, 25, -40))
        assert lv.value == pytest.approx(5.0)
        assert lv.branch is Branch.STRAIGHT


class TestLmr8p:
    def test_identical_zero_no_shift(self):
        e = encode_quad(five_to_quad(BOUNDARY_GT), ANCHOR)
        lv = lmr_8p(e, e)
        assert lv.value == 0
        assert lv.branch is Branch.NO_SHIFT

    def test_cyclic_shift_compensated(self, rng):
        gt = random_enc8(rng)
        shifted = EncodedQuad(tuple(gt.offsets[(i + 1) % 4] for i in range(4)))
        # all three branch sums by brute force
        sums = {
            s: sum(abs(shifted.offsets[(i + s) % 4][0] - gt.offsets[i][0])
                   + abs(shifted.offsets[(i + s) % 4][1] - gt.offsets[i][1])
                   for i in range(4))
            for s in (0, 1, 3)
        }
        lv = lmr_8p(shifted, gt)
        assert lv.value == pytest.approx(min(sums.values()), abs=1e-15)
        assert sums[3] == pytest.approx(0, abs=1e-15)
        assert lv.value == pytest.approx(0, abs=1e-15)

    def test_small_perturbation_no_shift(self, rng):
        gt = random_enc8(rng)
        pred = EncodedQuad(tuple(
            (dx + rng.uniform(-0.01, 0.01), dy + rng.uniform(-0.01, 0.01))
            for dx, dy in gt.offsets))
        lv = lmr_8p(pred, gt)
        assert lv.branch is Branch.NO_SHIFT
        expect = sum(abs(p[0] - g[0]) + abs(p[1] - g[1])
                     for p, g in zip(pred.offsets, gt.offsets))
        assert lv.value == pytest.approx(expect, rel=1e-12)

    def test_l1_8p_is_no_shift_branch(self, rng):
        gt = random_enc8(rng)
        shifted = EncodedQuad(tuple(gt.offsets[(i + 1) % 4] for i in range(4)))
        assert l1_8p(shifted, gt) > 0.1
        pred = random_enc8(rng)
        lv = lmr_8p(pred, gt)
        if lv.branch is Branch.NO_SHIFT:
            assert lv.value == l1_8p(pred, gt)

    def test_anchor_mismatch(self):
        a = encode_quad(five_to_quad(BOUNDARY_GT), ANCHOR)
        b = encode_quad(five_to_quad(BOUNDARY_GT), FiveParamBox(0, 0, 9, 25, -90))
        with pytest.raises(AnchorMismatch):
            lmr_8p(a, b)

    def test_min_property_symmetry_and_reindexing(self, rng):
        for _ in range(2000):
            a, b = random_enc8(rng), random_enc8(rng)
            for cfg in (ABSOLUTE, SMOOTH):
                lv = lmr_8p(a, b, cfg)
                assert lv.value <= l1_8p(a, b, cfg) + 1e-15
                assert lv.value == pytest.approx(lmr_8p(b, a, cfg).value,
                                                 rel=1e-12, abs=1e-12)
            # joint cyclic re-indexing leaves the min unchanged
            k = rng.randrange(4)
            a2 = EncodedQuad(tuple(a.offsets[(i + k) % 4] for i in range(4)))
            b2 = EncodedQuad(tuple(b.offsets[(i + k) % 4] for i in range(4)))
            assert lmr_8p(a2, b2).value == pytest.approx(lmr_8p(a, b).value,
                                                         rel=1e-12, abs=1e-12)


def fd_grad_5p(pred, gt, cfg, h=1e-6):
    fields = ("t_x", "t_y", "t_w", "t_h", "t_theta")
    out = []
    for f in fields:
        hi = dataclasses.replace(pred, **{f: getattr(pred, f) + h})
        lo = dataclasses.replace(pred, **{f: getattr(pred, f) - h})
        out.append((lmr_5p(hi, gt, cfg).value - lmr_5p(lo, gt, cfg).value) / (2 * h))
    return out


def fd_grad_8p(pred, gt, cfg, h=1e-6):
    out = []
    flat = [v for p in pred.offsets for v in p]
    for k in range(8):
        hi_flat = list(flat)
        hi_flat[k] += h
        lo_flat = list(flat)
        lo_flat[k] -= h
        hi = EncodedQuad(tuple(zip(hi_flat[0::2], hi_flat[1::2])))
        lo = EncodedQuad(tuple(zip(lo_flat[0::2], lo_flat[1::2])))
        out.append((lmr_8p(hi, gt, cfg).value - lmr_8p(lo, gt, cfg).value) / (2 * h))
    return out


def smooth_point_5p(rng, cfg):
    """Sample pred/gt encodings away from every kink of both branches."""
    while True:
        pred, gt = random_enc5(rng), random_enc5(rng)
        log_r = math.log(pred.anchor_ratio_r)
        dtheta = pred.t_theta - gt.t_theta
        terms = [pred.t_x - gt.t_x, pred.t_y - gt.t_y,
                 pred.t_w - gt.t_w, pred.t_h - gt.t_h, dtheta,
                 pred.t_w - gt.t_h - log_r, pred.t_h - gt.t_w + log_r,
                 abs(dtheta) - math.pi / 2]
        if any(abs(t) < 1e-3 for t in terms):
            continue
        if cfg.kind is PenaltyKind.SMOOTH_L1 and any(
                abs(abs(t) - cfg.beta) < 1e-3 for t in terms):
            continue
        from rotbox.losses import _branches_5p
        b1, b2 = _branches_5p(pred, gt, cfg)
        if abs(b1 - b2) < 1e-3:
            continue
        return pred, gt


def smooth_point_8p(rng, cfg):
    from rotbox.losses import _branch_sum_8p
    while True:
        pred, gt = random_enc8(rng), random_enc8(rng)
        terms = [
            pred.offsets[(i + s) % 4][c] - gt.offsets[i][c]
            for s in (0, 1, 3) for i in range(4) for c in (0, 1)
        ]
        if any(abs(t) < 1e-3 for t in terms):
            continue
        if cfg.kind is PenaltyKind.SMOOTH_L1 and any(
                abs(abs(t) - cfg.beta) < 1e-3 for t in terms):
            continue
        sums = sorted(_branch_sum_8p(pred, gt, s, cfg) for s in (0, 1, 3))
        if sums[1] - sums[0] < 1e-3:
            continue
        return pred, gt


class TestGradients:
    def test_zero_at_perfect_fit(self):
        e = encode_five(BOUNDARY_GT, ANCHOR)
        assert grad_lmr_5p(e, e) == (0, 0, 0, 0, 0)
        q = encode_quad(five_to_quad(BOUNDARY_GT), ANCHOR)
        assert grad_lmr_8p(q, q) == (0,) * 8

    def test_straight_sign_rule(self):
        gt = EncodedFiveParam(0, 0, 0, 0, -0.5, 2.5)
        pred = EncodedFiveParam(0.1, -0.1, 0.3, -0.2, -0.4, 2.5)
        g = grad_lmr_5p(pred, gt, ABSOLUTE)
        assert g == (1, -1, 1, -1, 1)

    @pytest.mark.parametrize("cfg", [ABSOLUTE, SMOOTH], ids=["abs", "smoothl1"])
    def test_finite_difference_5p(self, cfg):
        rng = random.Random(7)
        for _ in range(300):
            pred, gt = smooth_point_5p(rng, cfg)
            analytic = grad_lmr_5p(pred, gt, cfg)
            fd = fd_grad_5p(pred, gt, cfg)
            for a, f in zip(analytic, fd):
                assert abs(a - f) <= 1e-5 * max(1.0, abs(a))

    @pytest.mark.parametrize("cfg", [ABSOLUTE, SMOOTH], ids=["abs", "smoothl1"])
    def test_finite_difference_8p(self, cfg):
        rng = random.Random(11)
        for _ in range(300):
            pred, gt = smooth_point_8p(rng, cfg)
            analytic = grad_lmr_8p(pred, gt, cfg)
            fd = fd_grad_8p(pred, gt, cfg)
            for a, f in zip(analytic, fd):
                assert abs(a - f) <= 1e-5 * max(1.0, abs(a))

    def test_shift_branch_gradient_is_permuted(self):
        rng = random.Random(3)
        gt = random_enc8(rng)
        # pred equal to gt shifted forward, plus a small perturbation:
        # the compensating branch is active, gradient lives on permuted slots
        pred = EncodedQuad(tuple(
            (gt.offsets[(i + 1) % 4][0] + 0.01 * (i + 1),
             gt.offsets[(i + 1) % 4][1] - 0.01 * (i + 1))
            for i in range(4)))
        analytic = grad_lmr_8p(pred, gt, ABSOLUTE)
        fd = fd_grad_8p(pred, gt, ABSOLUTE)
        for a, f in zip(analytic, fd):
            assert abs(a - f) <= 1e-5


class TestBatchLoss:
    def test_single_pair(self):
        pe = encode_five(BOUNDARY_PRED, ANCHOR)
        ge = encode_five(BOUNDARY_GT, ANCHOR)
        single = lmr_5p(pe, ge).value
        assert batch_loss([(pe, ge)]) == single

    def test_mean_of_identical(self):
        pe = encode_five(BOUNDARY_PRED, ANCHOR)
        ge = encode_five(BOUNDARY_GT, ANCHOR)
        single = lmr_5p(pe, ge).value
        assert batch_loss([(pe, ge)] * 4, reduction=Reduction.MEAN) == \
            pytest.approx(single, rel=1e-12)
        assert batch_loss([(pe, ge)] * 4, reduction=Reduction.SUM) == \
            pytest.approx(4 * single, rel=1e-12)

    def test_empty_mean_raises(self):
        with pytest.raises(EmptyBatch):
            batch_loss([], reduction=Reduction.MEAN)
        assert batch_loss([], reduction=Reduction.SUM) == 0

    def test_mixed_kinds(self):
        pe = encode_five(BOUNDARY_PRED, ANCHOR)
        ge = encode_five(BOUNDARY_GT, ANCHOR)
        q = encode_quad(five_to_quad(BOUNDARY_GT), ANCHOR)
        total = batch_loss([(pe, ge), (q, q)], reduction=Reduction.SUM)
        assert total == pytest.approx(lmr_5p(pe, ge).value, rel=1e-12)
