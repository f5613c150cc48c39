"""
Layer operations of the encoder-decoder.

Every op works on channel-first arrays ``(c, h, w)`` and exposes

* ``forward(inputs, weights) -> (out, cache)``
* ``backward(cache, grad, weights) -> (input_grads, weight_grads)``

where `inputs` / `input_grads` are tuples aligned with each other and
`weights` / `weight_grads` are dicts keyed by parameter name.
"""
from functools import lru_cache
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

__all__ = [
    'reflect_pad',
    'reflect_pad_adjoint',
    'upsample_matrix',
    'Conv2d',
    'ChannelNorm',
    'LeakyReLU',
    'Sigmoid',
    'Upsample2x',
    'Concat',
]


def _reflect_index(n, pad):
    idx = np.abs(np.arange(-pad, n + pad))
    return np.where(idx > n - 1, 2 * (n - 1) - idx, idx)


def reflect_pad(x, pad):
    """
    Reflection padding of the two spatial axes of a ``(c, h, w)`` array.

    Parameters
    ----------
    x: np.ndarray [shape=(c, h, w)]

    pad: int
        Rows/columns added on each side. Requires ``h, w > pad``.

    Returns
    -------
    out: np.ndarray [shape=(c, h + 2 pad, w + 2 pad)]
    """
    if pad == 0:
        return x
    _, h, w = x.shape
    if h <= pad or w <= pad:
        raise ValueError(f'Reflection padding {pad} needs spatial size > {pad}, given ({h}, {w})')
    return np.take(np.take(x, _reflect_index(h, pad), axis=1), _reflect_index(w, pad), axis=2)


def reflect_pad_adjoint(g, pad, h, w):
    """Adjoint of `reflect_pad`: fold the padded border back onto the source pixels."""
    if pad == 0:
        return g
    c = g.shape[0]
    gh = np.zeros((c, h, g.shape[2]), dtype=g.dtype)
    np.add.at(gh, (slice(None), _reflect_index(h, pad), slice(None)), g)
    gx = np.zeros((c, h, w), dtype=g.dtype)
    np.add.at(gx, (slice(None), slice(None), _reflect_index(w, pad)), gh)
    return gx


@lru_cache(maxsize=64)
def _upsample_matrix(n, dtype_name):
    m = np.zeros((2 * n, n), dtype=dtype_name)
    for i in range(2 * n):
        src = (i + 0.5) / 2 - 0.5
        i0 = int(np.floor(src))
        frac = src - i0
        m[i, min(max(i0, 0), n - 1)] += 1 - frac
        m[i, min(max(i0 + 1, 0), n - 1)] += frac
    m.setflags(write=False)
    return m


def upsample_matrix(n, dtype=np.float64):
    """
    Bilinear 2x interpolation along one axis as a ``(2n, n)`` matrix.

    Half-pixel centres, edges clamped.
    """
    return _upsample_matrix(n, np.dtype(dtype).name)


class Conv2d(object):
    """
    2-D convolution (cross-correlation) with bias.

    Weights ``weight [shape=(c_out, c_in, k, k)]`` and ``bias [shape=(c_out,)]``.
    3x3 kernels are reflection padded by one pixel; 1x1 kernels are not padded.

    Parameters
    ----------
    kernel_size: int
    stride: int
    """

    def __init__(self, kernel_size=3, stride=1):
        self.kernel_size = kernel_size
        self.stride = stride
        self.pad = kernel_size // 2

    def forward(self, inputs, weights):
        x, = inputs
        w = weights['weight']
        k, s = self.kernel_size, self.stride
        xp = reflect_pad(x, self.pad)
        cols = sliding_window_view(xp, (k, k), axis=(1, 2))[:, ::s, ::s]
        out = np.tensordot(w, cols, axes=([1, 2, 3], [0, 3, 4]))
        out += weights['bias'][:, None, None]
        return out, (x.shape, xp.shape, cols)

    def backward(self, cache, grad, weights):
        x_shape, xp_shape, cols = cache
        w = weights['weight']
        k, s = self.kernel_size, self.stride
        _, ho, wo = grad.shape

        dw = np.tensordot(grad, cols, axes=([1, 2], [1, 2]))
        db = grad.sum(axis=(1, 2))

        dcols = np.tensordot(w, grad, axes=([0], [0]))  # (c_in, k, k, ho, wo)
        dxp = np.zeros(xp_shape, dtype=grad.dtype)
        for a in range(k):
            for b in range(k):
                dxp[:, a:a + s * ho:s, b:b + s * wo:s] += dcols[:, a, b]
        dx = reflect_pad_adjoint(dxp, self.pad, x_shape[1], x_shape[2])
        return (dx,), {'weight': dw, 'bias': db}


class ChannelNorm(object):
    """
    Per-channel spatial standardization with learned scale and shift.

    :math:`y_c = s_c \\frac{x_c-\\mu_c}{\\sqrt{\\sigma_c^2+\\epsilon}} + b_c`,
    statistics taken over the spatial axes of the single image.

    Weights ``scale`` and ``shift`` of shape ``(c,)``.
    """

    def __init__(self, eps=1e-5):
        self.eps = eps

    def forward(self, inputs, weights):
        x, = inputs
        mu = x.mean(axis=(1, 2), keepdims=True)
        xc = x - mu
        var = (xc * xc).mean(axis=(1, 2), keepdims=True)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = xc * inv_std
        out = weights['scale'][:, None, None] * xhat + weights['shift'][:, None, None]
        return out, (xhat, inv_std)

    def backward(self, cache, grad, weights):
        xhat, inv_std = cache
        n = xhat.shape[1] * xhat.shape[2]
        dscale = (grad * xhat).sum(axis=(1, 2))
        dshift = grad.sum(axis=(1, 2))
        dxhat = grad * weights['scale'][:, None, None]
        dx = inv_std * (dxhat
                        - dxhat.sum(axis=(1, 2), keepdims=True) / n
                        - xhat * (dxhat * xhat).sum(axis=(1, 2), keepdims=True) / n)
        return (dx,), {'scale': dscale, 'shift': dshift}


class LeakyReLU(object):
    """Leaky rectifier, slope `negative_slope` below zero."""

    def __init__(self, negative_slope=0.2):
        self.negative_slope = negative_slope

    def forward(self, inputs, weights):
        x, = inputs
        mask = x > 0
        return np.where(mask, x, self.negative_slope * x), mask

    def backward(self, cache, grad, weights):
        mask = cache
        return (np.where(mask, grad, self.negative_slope * grad),), {}


class Sigmoid(object):
    """Logistic squashing into (0, 1)."""

    def forward(self, inputs, weights):
        x, = inputs
        y = expit(x)
        return y, y

    def backward(self, cache, grad, weights):
        y = cache
        return (grad * y * (1 - y),), {}


class Upsample2x(object):
    """Bilinear 2x upsampling of both spatial axes."""

    def forward(self, inputs, weights):
        x, = inputs
        _, h, w = x.shape
        uh = upsample_matrix(h, x.dtype)
        uw = upsample_matrix(w, x.dtype)
        return uh @ x @ uw.T, (uh, uw)

    def backward(self, cache, grad, weights):
        uh, uw = cache
        return (uh.T @ grad @ uw,), {}


class Concat(object):
    """Concatenation along channels."""

    def forward(self, inputs, weights):
        sizes = [x.shape[0] for x in inputs]
        return np.concatenate(inputs, axis=0), sizes

    def backward(self, cache, grad, weights):
        splits = np.cumsum(cache)[:-1]
        return tuple(np.split(grad, splits, axis=0)), {}
