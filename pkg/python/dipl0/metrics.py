import math
from dataclasses import dataclass, field
import numpy as np
from scipy.ndimage import correlate1d

from dipl0.utils import as_image, check_same_shape

__all__ = [
    'SSIM_WINDOW',
    'SSIM_SIGMA',
    'MetricReport',
    'psnr',
    'ssim',
    'ssim_per_channel',
    'compare',
]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
_K1 = 0.01
_K2 = 0.03


@dataclass
class MetricReport:
    """
    PSNR and SSIM of one image pair.

    `psnr` is ``math.inf`` for identical images.
    """
    psnr: float
    ssim: float
    per_channel: list = field(default_factory=list)


def psnr(a, b):
    """
    Peak signal-to-noise ratio with peak 1.

    :math:`10\\log_{10}(1/\\mathrm{MSE})`, MSE over all pixels and channels.

    Parameters
    ----------
    a, b: np.ndarray [shape=(h, w, c)]
        Normalized images

    Returns
    -------
    out: float
        Decibels; ``math.inf`` when `a` equals `b`.

    Examples
    --------
    >>> import numpy as np
    >>> import dipl0
    >>> round(dipl0.psnr(np.zeros((4, 4, 1)), np.full((4, 4, 1), 0.5)), 4)
    6.0206
    """
    a = as_image(a)
    b = as_image(b)
    check_same_shape(a, b)
    d = a - b
    mse = float(np.mean(d * d))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size, sigma):
    r = np.arange(size) - (size - 1) / 2
    g = np.exp(-(r * r) / (2 * sigma * sigma))
    return g / g.sum()


def _filter(X, g, crop):
    out = correlate1d(X, g, axis=0, mode='reflect')
    out = correlate1d(out, g, axis=1, mode='reflect')
    return out[crop:-crop, crop:-crop]


def ssim_per_channel(a, b):
    """
    Mean SSIM of each channel.

    11x11 Gaussian window with :math:`\\sigma=1.5`, :math:`K_1=0.01, K_2=0.03, L=1`,
    averaged over the positions where the window fits inside the image.

    Returns
    -------
    out: list of float
    """
    a = as_image(a)
    b = as_image(b)
    check_same_shape(a, b)
    h, w, c = a.shape
    if min(h, w) < SSIM_WINDOW:
        raise ValueError(f'Image ({h}, {w}) is smaller than the SSIM window {SSIM_WINDOW}')

    g = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    crop = SSIM_WINDOW // 2
    c1 = _K1 ** 2
    c2 = _K2 ** 2
    out = []
    for k in range(c):
        x = a[..., k]
        y = b[..., k]
        mu_x = _filter(x, g, crop)
        mu_y = _filter(y, g, crop)
        sxx = _filter(x * x, g, crop) - mu_x * mu_x
        syy = _filter(y * y, g, crop) - mu_y * mu_y
        sxy = _filter(x * y, g, crop) - mu_x * mu_y
        num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
        den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
        out.append(float(np.mean(num / den)))
    return out


def ssim(a, b):
    """
    Structural similarity, averaged over channels.

    Parameters
    ----------
    a, b: np.ndarray [shape=(h, w, c)]
        Normalized images, at least 11 pixels on each side.

    Returns
    -------
    out: float
        In [-1, 1]; 1 for identical images.
    """
    if np.array_equal(as_image(a), as_image(b)):
        return 1.0
    return float(np.mean(ssim_per_channel(a, b)))


def compare(a, b):
    """
    PSNR and SSIM of `a` against `b`.

    Returns
    -------
    out: MetricReport
    """
    per_channel = ssim_per_channel(a, b)
    value = 1.0 if np.array_equal(as_image(a), as_image(b)) else float(np.mean(per_channel))
    return MetricReport(psnr=psnr(a, b), ssim=value, per_channel=per_channel)
