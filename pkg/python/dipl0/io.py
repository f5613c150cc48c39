import os
import logging
import numpy as np
from PIL import Image, UnidentifiedImageError

from dipl0.utils import as_image, check_image, pad_to_multiple, crop_image

__all__ = [
    'load_image',
    'save_image',
    'quantize',
]

logger = logging.getLogger(__name__)

_GRAY_MODES = ('L', 'LA', '1')
_COLOR_MODES = ('RGB', 'RGBA', 'P', 'CMYK', 'YCbCr')


def load_image(path, multiple=1):
    """
    Load a PNG or JPEG image normalized to [0, 1].

    8-bit values are divided by 255. Grayscale images give one channel,
    color images three (alpha is dropped).

    Parameters
    ----------
    path: str
        Image file

    multiple: int
        Reflect-pad the bottom/right edges to this alignment, typically ``2**depth``.

    Returns
    -------
    out: np.ndarray [shape=(h', w', c)]
        Image data

    crop: CropBox
        Original size, for `save_image` / `crop_image`.

    Examples
    --------
    >>> import dipl0
    >>> img, crop = dipl0.load_image('photo.png', multiple=8)
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f'{path} not found')
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in _GRAY_MODES:
                arr = np.asarray(im.convert('L'))
            elif mode in _COLOR_MODES:
                arr = np.asarray(im.convert('RGB'))
            else:
                raise ValueError(f'{path}: image mode {mode} not supported, only 8-bit gray/color')
    except UnidentifiedImageError as e:
        raise OSError(f'{path}: unreadable image') from e

    X = as_image(arr.astype(np.float64) / 255.0)
    logger.debug('loaded %s: mode=%s shape=%s', path, mode, X.shape)
    return pad_to_multiple(X, multiple)


def quantize(u):
    """
    Clamp to [0, 1] and quantize to 8 bits, rounding half up.

    Returns
    -------
    out: np.ndarray [dtype=np.uint8]
    """
    u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
    return np.floor(u * 255.0 + 0.5).astype(np.uint8)


def save_image(u, path, crop=None):
    """
    Write `u` as an 8-bit PNG.

    Values are clamped to [0, 1] and rounded half up; 0.5 becomes 128.

    Parameters
    ----------
    u: np.ndarray [shape=(h, w) or (h, w, c)]
        Finite image data, 1 or 3 channels.

    path: str
        Output file. Written as PNG whatever the extension.

    crop: CropBox or None
        Crop back to the size before padding.
    """
    u = as_image(u)
    check_image(u)
    data = quantize(crop_image(u, crop))
    if data.shape[2] == 1:
        im = Image.fromarray(data[..., 0])
    else:
        im = Image.fromarray(data)
    im.save(path, format='PNG')
    logger.debug('saved %s: shape=%s', path, data.shape)
