"""
Weight checkpoints.

An ``.npz`` archive with one little-endian array per layer parameter and
Adam moment (``<layer>/<param>``, ``<layer>/<param>@m``, ``<layer>/<param>@v``),
plus ``step_count`` and the ``NetSpec`` as JSON in ``spec``.
"""
import json
import logging
import numpy as np

from dipl0.net.network import NetSpec, ParamStore, Layer, layer_schema

__all__ = [
    'save_checkpoint',
    'load_checkpoint',
]

logger = logging.getLogger(__name__)


def _le(arr):
    return np.ascontiguousarray(arr, dtype=arr.dtype.newbyteorder('<'))


def save_checkpoint(params, path):
    """
    Write `params` to `path`.

    Parameters
    ----------
    params: ParamStore

    path: str
    """
    arrays = {
        'step_count': np.array(params.step_count, dtype='<i8'),
        'spec': np.array(json.dumps(params.spec.to_dict(), sort_keys=True)),
    }
    for layer in params:
        for key, arr in layer.weights.items():
            name = f'{layer.name}/{key}'
            arrays[name] = _le(arr)
            arrays[f'{name}@m'] = _le(layer.adam_m[key])
            arrays[f'{name}@v'] = _le(layer.adam_v[key])
    with open(path, 'wb') as fp:
        np.savez(fp, **arrays)
    logger.debug('checkpoint written to %s (%d layers)', path, len(params))


def load_checkpoint(path):
    """
    Read a checkpoint written by `save_checkpoint`.

    Parameters
    ----------
    path: str

    Returns
    -------
    out: ParamStore
    """
    with np.load(path, allow_pickle=False) as data:
        spec = NetSpec.from_dict(json.loads(str(data['spec'])))
        dtype = spec.dtype
        layers = []
        for entry in layer_schema(spec):
            weights, m, v = {}, {}, {}
            for key, shape in entry.shapes.items():
                name = f'{entry.name}/{key}'
                if name not in data.files:
                    raise ValueError(f'checkpoint {path} is missing {name}')
                weights[key] = data[name].astype(dtype)
                m[key] = data[f'{name}@m'].astype(dtype)
                v[key] = data[f'{name}@v'].astype(dtype)
                if weights[key].shape != tuple(shape):
                    raise ValueError(f'checkpoint {name} has shape {weights[key].shape}, expected {shape}')
            layers.append(Layer(entry.name, entry.kind, weights, m, v))
        step_count = int(data['step_count'])
    return ParamStore(spec, layers, step_count)
