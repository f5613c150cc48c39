import logging
import numpy as np

from dipl0.exceptions import NonFiniteError
from dipl0.utils import check_same_shape
from dipl0.net.network import forward, backward
from dipl0.net.optim import adam_step

__all__ = [
    'theta_objective',
    'solve_theta_subproblem',
]

logger = logging.getLogger(__name__)


def theta_objective(f, v, w, beta, output):
    """
    Objective of the network-weight subproblem at a given network output.

    :math:`\\|f-o\\|_2^2 + \\frac{\\beta}{2}\\|v-o+w/\\beta\\|_2^2`

    Parameters
    ----------
    f: np.ndarray [shape=(h, w, c)]
        Input image

    v, w: np.ndarray [shape=(h, w, c)]
        Auxiliary and dual variables

    beta: float
        Penalty parameter, > 0.

    output: np.ndarray [shape=(h, w, c)]
        Network output o

    Returns
    -------
    value: float

    output_grad: np.ndarray [shape=(h, w, c)]
        :math:`-2(f-o) - \\beta(v-o+w/\\beta)`
    """
    if not beta > 0:
        raise ValueError(f'beta={beta} must be > 0')
    check_same_shape(f, v, w, output)
    r = f - output
    s = v - output + w / beta
    value = float(np.sum(r * r) + 0.5 * beta * np.sum(s * s))
    return value, -2.0 * r - beta * s


def solve_theta_subproblem(params, x, f, v, w, beta, alpha, K):
    """
    Run `K` Adam steps on `theta_objective`, warm-started from `params`.

    Adam moments and the step counter carry over between calls.

    Parameters
    ----------
    params: ParamStore
        Updated in place.

    x: np.ndarray [shape=(h, w, input_channels)]
        Fixed network input

    f, v, w: np.ndarray [shape=(h, w, c)]

    beta: float

    alpha: float
        Learning rate

    K: int
        Number of inner steps, >= 1.

    Returns
    -------
    params: ParamStore

    output: np.ndarray [shape=(h, w, c)]
        Network output after the K-th step.
    """
    if int(K) != K or K < 1:
        raise ValueError(f'K={K} must be an integer >= 1')
    for k in range(int(K)):
        output, tape = forward(params, x, record=True)
        value, grad = theta_objective(f, v, w, beta, output)
        if not np.isfinite(value):
            raise NonFiniteError('theta', detail=f'objective at inner step {k}')
        adam_step(params, backward(tape, grad), alpha)
        logger.debug('theta step %d: objective=%.6g', k, value)
    output, _ = forward(params, x)
    return params, output
