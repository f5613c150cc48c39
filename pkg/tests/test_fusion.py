import itertools
import logging
import numpy as np
import pytest

from dipl0 import (RegionGraph, RegionFusion, FusionConfig, FusionGraphError,
                   init_graph, try_fuse, solve_prox, l0_smooth, eval_loss)


def brute_force_optimum(signal, lam):
    """Exact optimum of the 1-D problem over all segmentations of `signal` [shape=(n, c)]."""
    n = len(signal)
    best = np.inf
    for cuts in itertools.product((False, True), repeat=n - 1):
        start = 0
        cost = 0.0
        for k in range(n):
            if k == n - 1 or cuts[k]:
                seg = signal[start:k + 1]
                cost += float(np.sum((seg - seg.mean(axis=0)) ** 2))
                start = k + 1
        cost += lam * sum(cuts)
        best = min(best, cost)
    return best


def test_init_graph_links():
    graph = init_graph(np.zeros((3, 4, 1)))
    assert graph.num_groups == 12
    # 3 rows x 3 horizontal + 2 x 4 vertical
    assert graph.num_links == 17
    assert graph.validate()


def test_try_fuse_threshold():
    target = np.array([[0.0, 1.0]])[..., None]
    graph = init_graph(target)
    # w_i w_j d^2 = 1, c (w_i + w_j) = 2
    assert not try_fuse(graph, 0, 1, 0.49)
    assert try_fuse(graph, 0, 1, 0.5)
    assert graph.num_groups == 1
    assert graph.values[0] == [0.5]
    assert graph.validate()


def test_try_fuse_rejects_dead_or_unlinked():
    graph = init_graph(np.zeros((2, 2, 1)))
    with pytest.raises(FusionGraphError):
        graph.try_fuse(0, 3, 1.0)
    graph.try_fuse(0, 1, 1.0)
    with pytest.raises(FusionGraphError):
        graph.try_fuse(1, 3, 1.0)


def test_merge_keeps_smaller_index_and_sums_links():
    graph = init_graph(np.zeros((2, 2, 1)))
    graph.try_fuse(1, 0, 0.0)
    assert graph.alive[0] and not graph.alive[1]
    assert graph.links[0] == {2: 1, 3: 1}
    graph.try_fuse(0, 2, 0.0)
    assert graph.links[0] == {3: 2}
    assert graph.validate()


def test_find_compresses_paths():
    graph = init_graph(np.zeros((1, 4, 1)))
    graph.try_fuse(2, 3, 0.0)
    graph.try_fuse(1, 2, 0.0)
    graph.try_fuse(0, 1, 0.0)
    assert graph.find(3) == 0
    assert graph._parent[3] == 0
    np.testing.assert_array_equal(graph.labels(), [[0, 0, 0, 0]])


@pytest.mark.parametrize('lam, fused', [(0.99, False), (1.0, True), (1.5, True)])
def test_step_signal_fuses_at_unit_lambda(lam, fused):
    target = np.array([[0.0, 0.0, 1.0, 1.0]])[..., None]
    out = solve_prox(target, FusionConfig(lambda_eff=lam))
    if fused:
        np.testing.assert_allclose(out[..., 0], [[0.5] * 4])
    else:
        np.testing.assert_array_equal(out, target)


def test_two_level_steps_match_analytic_threshold():
    rng = np.random.default_rng(7)
    for _ in range(50):
        m, n = rng.integers(1, 5, size=2)
        a, b = rng.uniform(size=(2, 3))
        signal = np.concatenate([np.tile(a, (m, 1)), np.tile(b, (n, 1))])
        threshold = m * n * np.sum((a - b) ** 2) / (m + n)
        for lam in (0.9 * threshold, 1.1 * threshold):
            out = solve_prox(signal[None], FusionConfig(lambda_eff=lam))
            expected = brute_force_optimum(signal, lam)
            assert eval_loss(signal[None], out, lam) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_matches_brute_force_on_random_signals():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(2, 11))
        levels = rng.uniform(size=(int(rng.integers(1, 4)), 3))
        signal = levels[np.sort(rng.integers(0, len(levels), size=n))]
        signal = signal + rng.normal(scale=0.05, size=signal.shape)
        lam = float(rng.uniform(0.05, 0.5))
        out = solve_prox(signal[None], FusionConfig(lambda_eff=lam))
        value = eval_loss(signal[None], out, lam)
        assert value <= 1.1 * brute_force_optimum(signal, lam) + 1e-12


def test_zero_lambda_is_identity(rng):
    target = rng.uniform(size=(6, 5, 3))
    np.testing.assert_array_equal(solve_prox(target, FusionConfig(lambda_eff=0.0)), target)


def test_prox_lowers_objective_of_noisy_blocks(rng):
    target = np.zeros((12, 12, 3))
    target[:, 6:] = [0.8, 0.2, 0.5]
    target += rng.normal(scale=0.02, size=target.shape)
    lam = 0.05
    out = solve_prox(target, FusionConfig(lambda_eff=lam, ramp_steps=20))
    assert eval_loss(target, out, lam) <= eval_loss(target, target, lam)


def test_constant_image_collapses_to_one_region():
    rf = RegionFusion(lambda_eff=0.1, ramp_steps=5)
    out = rf.solve(np.full((4, 4, 1), 0.25))
    assert rf.num_regions == 1
    np.testing.assert_array_equal(out, 0.25)


def test_partition_invariants_after_solve(rng):
    rf = RegionFusion(lambda_eff=0.2, ramp_steps=10)
    rf.solve(rng.uniform(size=(8, 9, 3)))
    assert rf.graph.validate()
    assert rf.num_passes >= 10


def test_unclamped_targets_allowed():
    target = np.array([[-0.5, -0.5, 1.5]])[..., None]
    out = solve_prox(target, FusionConfig(lambda_eff=0.01))
    np.testing.assert_array_equal(out, target)


def test_l0_smooth_accepts_gray():
    out = l0_smooth(np.array([[0.0, 0.0, 1.0, 1.0]]), 2.0)
    assert out.shape == (1, 4, 1)


def test_config_validation():
    with pytest.raises(ValueError):
        FusionConfig(lambda_eff=-1.0)
    with pytest.raises(ValueError):
        FusionConfig(ramp_steps=0)
    with pytest.raises(ValueError):
        RegionGraph(np.zeros((2, 2, 2)))


def test_try_fuse_weighted_groups():
    graph = init_graph(np.array([[0.0, 0.0, 1.0, 1.0]])[..., None])
    assert try_fuse(graph, 0, 1, 0.0)
    assert try_fuse(graph, 2, 3, 0.0)
    # w_i = w_j = 2, c = 1, |dY|^2 = 1: fuse iff 4 <= 4 lambda
    assert graph.fusion_cost(0, 2) == (4.0, 4)
    assert not try_fuse(graph, 0, 2, 0.9)
    assert try_fuse(graph, 0, 2, 1.0)
    assert graph.values[0] == [0.5]


@pytest.mark.parametrize('lam', [0.0, 0.01, 0.1, 1.0, 10.0])
def test_prox_preserves_global_mean(rng, lam):
    target = rng.uniform(-0.2, 1.2, size=(9, 7, 3))
    out = solve_prox(target, FusionConfig(lambda_eff=lam, ramp_steps=20))
    np.testing.assert_allclose(out.mean(axis=(0, 1)), target.mean(axis=(0, 1)), rtol=0, atol=1e-9)


def test_collapses_to_global_mean_above_full_merge_threshold():
    rng = np.random.default_rng(5)
    for _ in range(20):
        signal = rng.uniform(size=(int(rng.integers(2, 8)), 3))
        spread = float(np.sum((signal - signal.mean(axis=0)) ** 2))
        # any cut costs at least lambda, so one region is optimal once lambda reaches the spread
        lam = 1.01 * spread
        assert brute_force_optimum(signal, lam) == pytest.approx(spread)
        rf = RegionFusion(lambda_eff=lam, ramp_steps=10)
        out = rf.solve(signal[None])
        assert rf.num_regions == 1
        np.testing.assert_allclose(out[0], np.tile(signal.mean(axis=0), (len(signal), 1)), atol=1e-12)


def test_region_count_non_increasing_in_lambda():
    corpus = [
        np.array([[0.0, 0.0, 0.3, 0.3, 1.0, 1.0, 1.2, 1.2]])[..., None],
        np.array([[0.5, 0.5, 0.5, 0.0, 0.0, 0.9, 0.9, 0.9]])[..., None],
    ]
    grid = [0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 50.0]
    for target in corpus:
        regions = []
        for lam in grid:
            rf = RegionFusion(lambda_eff=lam, ramp_steps=20)
            rf.solve(target)
            regions.append(rf.num_regions)
        assert regions == sorted(regions, reverse=True)
        assert regions[0] == len(np.unique(target)) and regions[-1] == 1


def test_prox_keeps_target_when_fusion_raises_objective(caplog):
    # one corner pixel is a single edge pixel, yet its fusion is priced on two links
    target = np.zeros((2, 2, 1))
    target[0, 0] = np.sqrt(2.0)
    lam = 1.0
    fused = RegionFusion(lambda_eff=lam).solve(target)
    assert eval_loss(target, fused, lam) == pytest.approx(1.5)
    with caplog.at_level(logging.INFO, logger='dipl0.fusion'):
        out = solve_prox(target, FusionConfig(lambda_eff=lam))
    np.testing.assert_array_equal(out, target)
    assert out is not target
    assert 'keeping target' in caplog.text
