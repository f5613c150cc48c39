import os
import json
import logging

from dipl0.type import ExecutionModeType, TaskPresetType, get_enum
from dipl0.admm import RunConfig, PRESETS

__all__ = [
    'MODE_ENV',
    'get_execution_mode',
    'load_config_file',
    'build_run_config',
]

logger = logging.getLogger(__name__)

MODE_ENV = 'DIPL0_MODE'


def get_execution_mode(environ=None):
    """
    Execution mode from ``DIPL0_MODE``: ``deterministic`` (default) or ``parallel``.

    Returns
    -------
    out: ExecutionModeType
    """
    environ = os.environ if environ is None else environ
    value = environ.get(MODE_ENV, '').strip()
    if not value:
        return ExecutionModeType.DETERMINISTIC
    return get_enum(ExecutionModeType, value)


def load_config_file(path):
    """
    Read a JSON configuration object.

    Keys are those of `RunConfig.to_dict`; ``net`` and ``fusion`` may be
    nested objects.

    Returns
    -------
    out: dict
    """
    with open(path, 'r') as fp:
        data = json.load(fp)
    if not isinstance(data, dict):
        raise ValueError(f'{path}: configuration must be a JSON object')
    return data


def build_run_config(preset=None, config_path=None, overrides=None):
    """
    Resolve a `RunConfig`: overrides > config file > preset > defaults.

    Parameters
    ----------
    preset: TaskPresetType or str or None

    config_path: str or None

    overrides: dict or None
        Values given on the command line; None entries are skipped.
        ``net`` may be a partial dict merged into the architecture.

    Returns
    -------
    out: RunConfig
    """
    values = RunConfig().to_dict()
    if preset is not None:
        values.update(PRESETS[get_enum(TaskPresetType, preset)])

    layers = []
    if config_path is not None:
        layers.append(load_config_file(config_path))
        logger.debug('configuration file %s', config_path)
    if overrides:
        layers.append({k: v for k, v in overrides.items() if v is not None})

    for layer in layers:
        layer = dict(layer)
        if 'lambda' in layer:
            layer['lam'] = layer.pop('lambda')
        fusion = layer.pop('fusion', None) or {}
        for key in ('ramp_steps', 'epsilon', 'max_extra_passes'):
            if key in fusion:
                layer.setdefault(key, fusion[key])
        net = layer.pop('net', None)
        if net:
            values['net'] = dict(values['net'], **net)
        if 'seed' in layer:
            seed = layer.pop('seed')
            layer.setdefault('weight_seed', seed)
            layer.setdefault('input_seed', seed + 1)
            layer.setdefault('state_seed', seed + 2)
        values.update(layer)
    return RunConfig.from_dict(values)
