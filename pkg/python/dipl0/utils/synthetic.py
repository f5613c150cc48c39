import io
import numpy as np
from PIL import Image

__all__ = [
    'gen_synthetic',
    'gen_jpeg_pair',
    'reference_pair',
]


def _voronoi(size, n_regions, channels, rng):
    sites = rng.uniform(0, size, size=(n_regions, 2))
    colors = rng.uniform(0.0, 1.0, size=(n_regions, channels))
    yy, xx = np.mgrid[0:size, 0:size]
    d = (yy[..., None] - sites[:, 0]) ** 2 + (xx[..., None] - sites[:, 1]) ** 2
    return colors[np.argmin(d, axis=-1)]


def gen_synthetic(size=64, n_regions=8, noise_amplitude=0.1, texture_frequency=0.25,
                  seed=0, channels=3):
    """
    Seeded piecewise-constant image and a textured, noisy copy.

    The clean image is a Voronoi partition over random sites with a random
    constant color per cell. The corrupted image adds a sinusoidal texture
    of amplitude `noise_amplitude` / 2 and uniform noise on
    ``[-noise_amplitude/2, noise_amplitude/2]``, then clamps to [0, 1].

    Parameters
    ----------
    size: int
        Side length, >= 32.

    n_regions: int
        Number of Voronoi sites, >= 1.

    noise_amplitude: float
        >= 0. 0 gives ``corrupted == clean``.

    texture_frequency: float
        Texture frequency in cycles per pixel. 0 turns the texture off.

    seed: int

    channels: int
        1 or 3.

    Returns
    -------
    clean: np.ndarray [shape=(size, size, channels)]

    corrupted: np.ndarray [shape=(size, size, channels)]

    Examples
    --------
    >>> import dipl0
    >>> clean, noisy = dipl0.utils.gen_synthetic(64, seed=0)
    >>> clean.shape
    (64, 64, 3)
    """
    if size < 32:
        raise ValueError(f'size={size} must be >= 32')
    if n_regions < 1:
        raise ValueError(f'n_regions={n_regions} must be >= 1')
    if noise_amplitude < 0 or texture_frequency < 0:
        raise ValueError('noise_amplitude and texture_frequency must be >= 0')
    if channels not in (1, 3):
        raise ValueError(f'channels={channels} must be 1 or 3')

    rng = np.random.default_rng(seed)
    clean = _voronoi(size, n_regions, channels, rng)

    angle, phase = rng.uniform(0, 2 * np.pi, size=2)
    noise = rng.uniform(-0.5, 0.5, size=clean.shape) * noise_amplitude
    if noise_amplitude == 0:
        return clean, clean.copy()

    corrupted = clean + noise
    if texture_frequency > 0:
        yy, xx = np.mgrid[0:size, 0:size]
        wave = np.sin(2 * np.pi * texture_frequency * (xx * np.cos(angle) + yy * np.sin(angle)) + phase)
        corrupted += 0.5 * noise_amplitude * wave[..., None]
    return clean, np.clip(corrupted, 0.0, 1.0)


def gen_jpeg_pair(size=64, n_regions=8, quality=10, seed=0, channels=3):
    """
    Piecewise-constant image and its JPEG-compressed version.

    Parameters
    ----------
    size, n_regions, seed, channels:
        As in `gen_synthetic`.

    quality: int
        JPEG quality factor in [1, 95].

    Returns
    -------
    clean: np.ndarray [shape=(size, size, channels)]
        Quantized to 8-bit levels.

    compressed: np.ndarray [shape=(size, size, channels)]
    """
    if not 1 <= quality <= 95:
        raise ValueError(f'quality={quality} must be in [1, 95]')
    clean, _ = gen_synthetic(size, n_regions, 0.0, 0.0, seed, channels)
    data = np.floor(clean * 255.0 + 0.5).astype(np.uint8)
    im = Image.fromarray(data[..., 0] if channels == 1 else data)

    buf = io.BytesIO()
    im.save(buf, format='JPEG', quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as decoded:
        out = np.asarray(decoded.convert('L' if channels == 1 else 'RGB'), dtype=np.float64) / 255.0
    if out.ndim == 2:
        out = out[..., None]
    return data.astype(np.float64) / 255.0, out


def reference_pair():
    """
    The pinned 64x64 test instance: 6 regions, amplitude 0.1, texture 0.25, seed 0.

    Returns
    -------
    clean, corrupted: np.ndarray [shape=(64, 64, 3)]
    """
    return gen_synthetic(64, n_regions=6, noise_amplitude=0.1, texture_frequency=0.25, seed=0)
