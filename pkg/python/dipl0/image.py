from collections import namedtuple
import numpy as np

from dipl0.utils import check_same_shape

__all__ = [
    'GradientField',
    'DEFAULT_EPSILON',
    'gradient',
    'gradient_magnitude',
    'l0_gradient_count',
    'fidelity',
    'eval_loss',
    'axpy_combine',
]

#: Tolerance under which a pooled per-pixel gradient counts as zero.
DEFAULT_EPSILON = 1e-12

GradientField = namedtuple('GradientField', ['dx', 'dy'])
GradientField.__doc__ = """
Forward differences of an image.

dx: np.ndarray [shape=(h, w, c)]
    Differences along the width, zero at the last column.
dy: np.ndarray [shape=(h, w, c)]
    Differences along the height, zero at the last row.
"""


def gradient(u):
    """
    Discrete gradient with forward differences and replicate boundary.

    :math:`dx_{i,j,c}=u_{i,j+1,c}-u_{i,j,c}` for :math:`j<w-1`, else 0; `dy` likewise along rows.

    Parameters
    ----------
    u: np.ndarray [shape=(h, w, c)]
        Image tensor

    Returns
    -------
    out: GradientField
    """
    dx = np.zeros_like(u)
    dy = np.zeros_like(u)
    dx[:, :-1] = u[:, 1:] - u[:, :-1]
    dy[:-1, :] = u[1:, :] - u[:-1, :]
    return GradientField(dx, dy)


def gradient_magnitude(u):
    """
    Per-pixel gradient magnitude with channels pooled.

    :math:`m_p=\\sum_c |dx_{p,c}| + \\sum_c |dy_{p,c}|`

    Parameters
    ----------
    u: np.ndarray [shape=(h, w, c)]

    Returns
    -------
    out: np.ndarray [shape=(h, w)]
    """
    dx, dy = gradient(u)
    return np.abs(dx).sum(axis=-1) + np.abs(dy).sum(axis=-1)


def l0_gradient_count(u, epsilon=DEFAULT_EPSILON):
    """
    Number of pixels with a non-zero gradient, :math:`\\|\\nabla u\\|_0`.

    One count per pixel: the absolute differences along both axes and all
    channels are summed and compared against `epsilon`.

    Parameters
    ----------
    u: np.ndarray [shape=(h, w, c)]
        Image tensor

    epsilon: float
        Values at or below `epsilon` count as zero. Must be >= 0.

    Returns
    -------
    out: int
    """
    if epsilon < 0:
        raise ValueError(f'epsilon={epsilon} must be >= 0')
    return int(np.count_nonzero(gradient_magnitude(u) > epsilon))


def fidelity(f, u):
    """
    Unnormalized squared distance :math:`\\|f-u\\|_2^2` over all pixels and channels.

    Parameters
    ----------
    f, u: np.ndarray [shape=(h, w, c)]

    Returns
    -------
    out: float
    """
    check_same_shape(f, u)
    r = f - u
    return float(np.sum(r * r))


def eval_loss(f, u, lam, epsilon=DEFAULT_EPSILON):
    """
    The smoothing objective :math:`\\|f-u\\|_2^2 + \\lambda \\|\\nabla u\\|_0`.

    With `f` set to a prox target and `lam` to :math:`2\\lambda/\\beta` this is also
    the objective of the v-subproblem.

    Parameters
    ----------
    f: np.ndarray [shape=(h, w, c)]
        Input image

    u: np.ndarray [shape=(h, w, c)]
        Candidate image

    lam: float
        Regularizer weight, >= 0.

    epsilon: float
        Zero tolerance of the gradient count.

    Returns
    -------
    out: float
    """
    if lam < 0:
        raise ValueError(f'lam={lam} must be >= 0')
    return fidelity(f, u) + lam * l0_gradient_count(u, epsilon)


def axpy_combine(a, u, b, v):
    """
    Elementwise :math:`a u + b v`, unclamped.

    Parameters
    ----------
    a, b: float
    u, v: np.ndarray [shape=(h, w, c)]

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    check_same_shape(u, v)
    return a * u + b * v

