import warnings
from collections import namedtuple
import numpy as np

__all__ = [
    'CropBox',
    'as_image',
    'check_image',
    'check_same_shape',
    'pad_to_multiple',
    'crop_image',
]

CropBox = namedtuple('CropBox', ['height', 'width'])


def as_image(X, dtype=np.float64):
    """
    Convert array-like data to an image tensor.

    A 2-D array is treated as a single-channel image.

    Parameters
    ----------
    X: array_like [shape=(h, w) or (h, w, c)]
        Image data

    dtype: dtype
        Data-type of the returned array.

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
        C-contiguous image tensor
    """
    X = np.asarray(X, dtype=dtype)
    if X.ndim == 2:
        X = X[:, :, np.newaxis]
    return np.ascontiguousarray(X)


def check_image(X, channels=(1, 3), normalized=False):
    """
    Check image data

    Parameters
    ----------
    X: np.ndarray [shape=(h, w, c)]
        Image tensor

    channels: tuple or None
        Allowed channel counts. None accepts any count (e.g. the 32-channel network input).

    normalized: bool
        Whether every value must lie in [0, 1].

    Returns
    -------
    out: bool
    """
    if not isinstance(X, np.ndarray):
        raise TypeError(f'Image data must be of type np.ndarray, given {type(X).__name__}')

    if X.ndim != 3:
        raise ValueError(f'Image data must have 3 dimensions (h, w, c), given X.shape={X.shape}')

    h, w, c = X.shape
    if h < 1 or w < 1:
        raise ValueError(f'Image data must not be empty, given X.shape={X.shape}')

    if channels is not None and c not in channels:
        raise ValueError(f'Image channels={c} not supported, must be one of {channels}')

    if not np.all(np.isfinite(X)):
        raise ValueError('Image data must be finite')

    if normalized and (X.min() < 0 or X.max() > 1):
        raise ValueError(f'Image data must be normalized to [0, 1], '
                         f'given min={X.min()}, max={X.max()}')
    return True


def check_same_shape(*arrs):
    """Raise ValueError unless all arrays share one shape."""
    shape = arrs[0].shape
    for arr in arrs[1:]:
        if arr.shape != shape:
            raise ValueError(f'Shape mismatch: {shape} vs {arr.shape}')
    return shape


def pad_to_multiple(X, multiple, minimum=1):
    """
    Reflect-pad the bottom and right edges so height and width are multiples of `multiple`.

    Padding is an automatic correction and emits a warning.

    Parameters
    ----------
    X: np.ndarray [shape=(h, w, c)]
        Image tensor

    multiple: int
        Alignment, e.g. ``2**depth`` of the network.

    minimum: int
        Smallest padded height and width, e.g. ``2**(depth + 1)``.

    Returns
    -------
    out: np.ndarray [shape=(h', w', c)]
        Padded image

    crop: CropBox
        Original height and width, for `crop_image`.
    """
    h, w = X.shape[:2]
    crop = CropBox(h, w)
    multiple = max(int(multiple), 1)

    def target(n):
        n = max(n, int(minimum))
        return n + (-n % multiple)

    pad_h = target(h) - h
    pad_w = target(w) - w
    if pad_h == 0 and pad_w == 0:
        return X, crop

    mode = 'reflect'
    if pad_h > h - 1 or pad_w > w - 1:
        # reflection needs at least pad + 1 source rows/cols
        mode = 'symmetric' if pad_h <= h and pad_w <= w else 'edge'
    warnings.warn(f'Image size ({h}, {w}) does not fit alignment={multiple} with minimum side={minimum}, '
                  f'it is padded to ({h + pad_h}, {w + pad_w}) with mode={mode} and cropped back afterwards')
    return np.pad(X, ((0, pad_h), (0, pad_w), (0, 0)), mode=mode), crop


def crop_image(X, crop):
    """
    Undo `pad_to_multiple`.

    Parameters
    ----------
    X: np.ndarray [shape=(h', w', c)]

    crop: CropBox or None

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    if crop is None:
        return X
    return np.ascontiguousarray(X[:crop.height, :crop.width])
