import numpy as np

from dipl0.exceptions import NonFiniteError

__all__ = [
    'ADAM_BETA1',
    'ADAM_BETA2',
    'ADAM_EPS',
    'adam_step',
]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def adam_step(params, grads, alpha):
    """
    One Adam update of every weight in place.

    :math:`m \\leftarrow \\beta_1 m + (1-\\beta_1) g`,
    :math:`v \\leftarrow \\beta_2 v + (1-\\beta_2) g^2`,
    :math:`\\theta \\leftarrow \\theta - \\alpha \\hat m / (\\sqrt{\\hat v} + \\epsilon)`
    with bias-corrected :math:`\\hat m, \\hat v`.

    Parameters
    ----------
    params: ParamStore
        Updated in place; `step_count` is incremented.

    grads: dict
        ``{layer_name: {param_name: gradient}}`` as returned by `backward`.

    alpha: float
        Learning rate, > 0.

    Returns
    -------
    out: ParamStore
        `params`, for chaining.
    """
    if not alpha > 0:
        raise ValueError(f'alpha={alpha} must be > 0')
    if set(grads) != set(params.layers):
        raise ValueError('gradients are not aligned with the parameter store')
    for layer in params:
        g_layer = grads[layer.name]
        if set(g_layer) != set(layer.weights):
            raise ValueError(f'gradients of layer {layer.name} do not match its weights')
        for key, g in g_layer.items():
            if g.shape != layer.weights[key].shape:
                raise ValueError(f'gradient {layer.name}.{key} has shape {g.shape}, '
                                 f'expected {layer.weights[key].shape}')
            if not np.all(np.isfinite(g)):
                raise NonFiniteError('adam', detail=f'gradient of {layer.name}.{key}')

    t = params.step_count + 1
    bc1 = 1.0 - ADAM_BETA1 ** t
    bc2 = 1.0 - ADAM_BETA2 ** t
    for layer in params:
        for key, g in grads[layer.name].items():
            m = layer.adam_m[key]
            v = layer.adam_v[key]
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * (g * g)
            layer.weights[key] -= alpha * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
    params.step_count = t
    return params
