import math
import numpy as np
import pytest

from dipl0 import psnr, ssim, compare, ssim_per_channel


def test_psnr_oracles():
    z = np.zeros((8, 8, 3))
    assert psnr(z, np.full_like(z, 0.5)) == pytest.approx(6.0206, abs=1e-3)
    assert psnr(z, np.full_like(z, 0.1)) == pytest.approx(20.0)
    assert psnr(z, z) == math.inf


def test_psnr_decreases_with_noise(rng):
    img = rng.uniform(0.2, 0.8, size=(16, 16, 3))
    noise = rng.uniform(-1, 1, size=img.shape)
    values = [psnr(img, img + a * noise) for a in (0.01, 0.02, 0.05, 0.1, 0.2)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_symmetry(rng):
    a, b = rng.uniform(size=(2, 16, 16, 3))
    assert psnr(a, b) == psnr(b, a)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)


def test_ssim_oracles(rng):
    a = rng.uniform(size=(16, 16, 3))
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)
    assert ssim(np.full((12, 12, 1), 0.4), np.full((12, 12, 1), 0.4)) == pytest.approx(1.0, abs=1e-9)
    c1 = 0.01 ** 2
    assert ssim(np.zeros((12, 12, 1)), np.ones((12, 12, 1))) == pytest.approx(c1 / (1 + c1), abs=1e-8)


def test_ssim_below_one_for_different_images(rng):
    a = rng.uniform(size=(16, 16, 3))
    b = a + rng.normal(scale=0.05, size=a.shape)
    assert ssim(a, b) < 1.0
    assert -1.0 <= ssim(a, b)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim_per_channel(np.zeros((10, 20, 1)), np.ones((10, 20, 1)))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4, 1)), np.zeros((4, 4, 3)))


def test_compare_per_channel(rng):
    a, b = rng.uniform(size=(2, 16, 16, 3))
    report = compare(a, b)
    assert len(report.per_channel) == 3
    assert report.ssim == pytest.approx(np.mean(report.per_channel))
    assert report.psnr == psnr(a, b)
