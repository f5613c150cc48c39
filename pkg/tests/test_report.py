import math

from dipl0 import RunConfig, IterationRecord, RunReport, write_report, read_report


def make_history(n=3):
    return [IterationRecord(t=t, eq3_loss=1.0 / t, eq3_loss_output=0.1 + t, fidelity=1 / 3, l0_count=10 * t,
                            l0_count_v=5, dual_residual=0.25, prox_before=2.0, prox_after=1.5,
                            psnr=math.inf if t == 1 else 20.123456789, ssim=None if t == 2 else 0.9,
                            prox_identity=t == 1)
            for t in range(1, n + 1)]


def test_round_trip(tmp_path):
    report = RunReport.from_run(RunConfig(T=3), make_history(), outputs={'image': 'out.png'})
    path = str(tmp_path / 'report.txt')
    write_report(report, path)
    assert read_report(path) == report


def test_round_trip_with_timing():
    report = RunReport.from_run(RunConfig(T=0), [], timing={'theta_step': 0.5, 'v_step': 0.25, 'total': 1.0})
    assert RunReport.from_text(report.to_text()) == report


def test_layout():
    text = RunReport.from_run(RunConfig(T=3), make_history()).to_text()
    assert '[timing]' not in text
    assert 'lam = 0.025' in text
    assert 'net.depth = 3' in text
    history = text.split('[history]\n')[1].splitlines()
    assert history[0].startswith('t,eq3_loss,')
    assert len(history) == 4


def test_config_restores_run_config():
    cfg = RunConfig(T=7, lam=0.05)
    report = RunReport.from_text(RunReport.from_run(cfg, []).to_text())
    assert RunConfig.from_dict(report.config) == cfg


def test_prox_identity_column():
    text = RunReport.from_run(RunConfig(T=3), make_history()).to_text()
    rows = text.split('[history]\n')[1].splitlines()
    assert rows[0].endswith(',prox_identity')
    assert rows[1].endswith(',True') and rows[2].endswith(',False')
    history = RunReport.from_text(text).history
    assert [rec.prox_identity for rec in history] == [True, False, False]
