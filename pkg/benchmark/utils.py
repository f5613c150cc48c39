import numpy as np


def gen_data(size, channels=3, seed=None):
    """Textured piecewise-constant test image of side `size`."""
    rng = np.random.default_rng(seed)
    n_regions = max(2, size // 16)
    sites = rng.uniform(0, size, size=(n_regions, 2))
    colors = rng.uniform(size=(n_regions, channels))
    yy, xx = np.mgrid[0:size, 0:size]
    d = (yy[..., None] - sites[:, 0]) ** 2 + (xx[..., None] - sites[:, 1]) ** 2
    img = colors[np.argmin(d, axis=-1)] + rng.uniform(-0.05, 0.05, size=(size, size, channels))
    return np.clip(img, 0, 1)
