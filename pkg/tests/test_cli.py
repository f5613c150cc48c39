import os
import numpy as np
import pytest

from dipl0 import save_image, load_image, read_report, load_checkpoint
from dipl0.cli import main
from dipl0.utils import gen_synthetic

SMALL_NET = ['--depth', '2', '-K', '1', '--ramp-steps', '5']


@pytest.fixture
def images(tmp_path):
    clean, corrupted = gen_synthetic(32, seed=0)
    paths = {'clean': str(tmp_path / 'clean.png'), 'noisy': str(tmp_path / 'noisy.png')}
    save_image(clean, paths['clean'])
    save_image(corrupted, paths['noisy'])
    return paths


def test_metrics_identical(images, capsys):
    assert main(['metrics', '--a', images['clean'], '--b', images['clean']]) == 0
    out = capsys.readouterr().out
    assert 'psnr: inf' in out
    assert 'ssim: 1.000000' in out


def test_smooth_writes_image_and_report(images, tmp_path):
    out = str(tmp_path / 'out.png')
    report = str(tmp_path / 'report.txt')
    ckpt = str(tmp_path / 'weights.npz')
    status = main(['-q', 'smooth', '--input', images['noisy'], '--reference', images['clean'], '-T', '2',
                   '--out', out, '--report', report, '--checkpoint', ckpt, '--timing'] + SMALL_NET)
    assert status == 0
    assert load_image(out)[0].shape == (32, 32, 3)
    rep = read_report(report)
    assert len(rep.history) == 2
    assert rep.config['T'] == 2 and rep.config['net']['depth'] == 2
    assert rep.history[0].psnr is not None
    assert set(rep.timing) == {'theta_step', 'v_step', 'total'}
    assert rep.outputs == {'image': out, 'checkpoint': ckpt}
    assert os.path.isfile(ckpt)


def test_smooth_preset(images, tmp_path):
    report = str(tmp_path / 'report.txt')
    status = main(['-q', 'smooth', '--input', images['noisy'], '--preset', 'jpeg', '-T', '1',
                   '--out', str(tmp_path / 'out.png'), '--report', report] + SMALL_NET)
    assert status == 0
    assert read_report(report).config['beta'] == 2.0


def test_l0_zero_lambda_is_lossless(images, tmp_path):
    out = str(tmp_path / 'l0.png')
    assert main(['l0', '--input', images['noisy'], '--lambda', '0', '--ramp-steps', '3', '--out', out]) == 0
    np.testing.assert_array_equal(load_image(out)[0], load_image(images['noisy'])[0])


def test_l0_smooths(images, tmp_path):
    out = str(tmp_path / 'l0.png')
    assert main(['l0', '--input', images['noisy'], '--lambda', '0.5', '--ramp-steps', '10', '--out', out]) == 0
    assert len(np.unique(load_image(out)[0].reshape(-1, 3), axis=0)) < 32 * 32 // 2


def test_demo(tmp_path, capsys):
    out_dir = str(tmp_path / 'demo')
    assert main(['-q', 'demo', '--size', '32', '--seed', '1', '-T', '1', '--out-dir', out_dir] + SMALL_NET) == 0
    for name in ('clean.png', 'corrupted.png', 'smoothed.png', 'report.txt'):
        assert os.path.isfile(os.path.join(out_dir, name))
    assert 'smoothed vs clean' in capsys.readouterr().out


def test_missing_file_exits_nonzero(tmp_path, capsys):
    assert main(['metrics', '--a', str(tmp_path / 'no.png'), '--b', str(tmp_path / 'no.png')]) == 1
    assert 'dipl0 metrics' in capsys.readouterr().err


def test_invalid_value_exits_nonzero(images, tmp_path):
    assert main(['-q', 'smooth', '--input', images['noisy'], '--beta', '0', '--out',
                 str(tmp_path / 'o.png')]) == 1


def test_unknown_flag():
    with pytest.raises(SystemExit) as info:
        main(['smooth', '--nope'])
    assert info.value.code == 2


def test_smooth_resumes_from_checkpoint(images, tmp_path):
    first = str(tmp_path / 'first.npz')
    second = str(tmp_path / 'second.npz')
    report = str(tmp_path / 'report.txt')
    args = ['-q', 'smooth', '--input', images['noisy'], '-T', '2', '--out', str(tmp_path / 'out.png')] + SMALL_NET
    assert main(args + ['--checkpoint', first]) == 0
    assert main(args + ['--init-checkpoint', first, '--checkpoint', second, '--report', report]) == 0

    before = load_checkpoint(first)
    after = load_checkpoint(second)
    assert before.step_count == 2
    assert after.step_count == 4
    assert after.spec == before.spec
    assert not np.array_equal(after['head.conv'].weights['weight'], before['head.conv'].weights['weight'])
    assert read_report(report).outputs['init_checkpoint'] == first


def test_smooth_missing_checkpoint_exits_nonzero(images, tmp_path, capsys):
    assert main(['-q', 'smooth', '--input', images['noisy'], '--out', str(tmp_path / 'o.png'),
                 '--init-checkpoint', str(tmp_path / 'none.npz')] + SMALL_NET) == 1
    assert 'dipl0 smooth' in capsys.readouterr().err


def test_demo_jpeg_preset_uses_compressed_pair(tmp_path, capsys):
    out_dir = str(tmp_path / 'demo')
    assert main(['-q', 'demo', '--preset', 'jpeg', '--quality', '5', '--size', '32', '--seed', '1', '-T', '1',
                 '--out-dir', out_dir] + SMALL_NET) == 0
    clean, _ = load_image(os.path.join(out_dir, 'clean.png'))
    corrupted, _ = load_image(os.path.join(out_dir, 'corrupted.png'))
    # a piecewise-constant image has a handful of colours; JPEG blocks add many more
    assert len(np.unique(clean.reshape(-1, 3), axis=0)) <= 8
    assert len(np.unique(corrupted.reshape(-1, 3), axis=0)) > 8
    assert 'corrupted vs clean' in capsys.readouterr().out
