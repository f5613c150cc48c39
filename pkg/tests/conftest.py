import numpy as np
import pytest

import dipl0


def numeric_grad(fn, arr, h=1e-5):
    """Central finite differences of the scalar `fn()` with respect to `arr`, perturbed in place."""
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=['multi_index'])
    for _ in it:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + h
        fp = fn()
        arr[idx] = orig - h
        fm = fn()
        arr[idx] = orig
        grad[idx] = (fp - fm) / (2 * h)
    return grad


def rel_error(a, b, floor=1e-8):
    """Relative distance of `a` and `b`; gradients that are zero by construction compare against `floor`."""
    denom = max(np.linalg.norm(a) + np.linalg.norm(b), floor)
    return np.linalg.norm(a - b) / denom


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_spec():
    """Depth-1 network small enough for whole-network finite differences."""
    return dipl0.NetSpec(input_channels=2, output_channels=1, depth=1,
                         channels_per_level=(4,), skip_channels=(2,))


@pytest.fixture
def small_spec():
    return dipl0.NetSpec(input_channels=4, output_channels=3, depth=2,
                         channels_per_level=(4, 8), skip_channels=(2, 2))


@pytest.fixture
def small_cfg(small_spec):
    return dipl0.RunConfig(T=3, K=2, net=small_spec, ramp_steps=10)


@pytest.fixture(scope='session')
def reference_pair():
    return dipl0.utils.reference_pair()
