import json
import pytest

from dipl0 import ExecutionModeType, get_execution_mode, build_run_config, load_config_file


def test_execution_mode():
    assert get_execution_mode({}) is ExecutionModeType.DETERMINISTIC
    assert get_execution_mode({'DIPL0_MODE': 'parallel'}) is ExecutionModeType.PARALLEL
    assert get_execution_mode({'DIPL0_MODE': 'Deterministic'}) is ExecutionModeType.DETERMINISTIC
    with pytest.raises(ValueError):
        get_execution_mode({'DIPL0_MODE': 'gpu'})


def test_execution_mode_from_environment(monkeypatch):
    monkeypatch.setenv('DIPL0_MODE', 'parallel')
    assert get_execution_mode() is ExecutionModeType.PARALLEL


def test_defaults_are_smoothing_optimum():
    cfg = build_run_config()
    assert (cfg.lam, cfg.beta, cfg.gamma, cfg.T, cfg.K, cfg.alpha) == (0.025, 2.25, 0.9, 100, 25, 1e-3)


def test_precedence(tmp_path):
    path = tmp_path / 'cfg.json'
    path.write_text(json.dumps({'beta': 1.5, 'T': 7, 'lambda': 0.05, 'net': {'depth': 2,
                                'channels_per_level': [8, 8], 'skip_channels': [2, 2]}}))
    cfg = build_run_config('jpeg', str(path), {'T': 3, 'alpha': None, 'seed': 5})
    assert cfg.beta == 1.5
    assert cfg.lam == 0.05
    assert cfg.T == 3
    assert cfg.alpha == 1e-3
    assert cfg.net.depth == 2
    assert (cfg.weight_seed, cfg.input_seed, cfg.state_seed) == (5, 6, 7)


def test_preset_below_file(tmp_path):
    path = tmp_path / 'cfg.json'
    path.write_text(json.dumps({'fusion': {'ramp_steps': 20, 'lambda_eff': 99.0}}))
    cfg = build_run_config('jpeg', str(path))
    assert cfg.beta == 2.0
    assert cfg.ramp_steps == 20
    assert cfg.fusion.lambda_eff == pytest.approx(0.025)


def test_bad_files(tmp_path):
    path = tmp_path / 'cfg.json'
    path.write_text('[1, 2]')
    with pytest.raises(ValueError):
        load_config_file(str(path))
    path.write_text(json.dumps({'unknown': 1}))
    with pytest.raises(ValueError):
        build_run_config(config_path=str(path))
