import csv
import numpy as np

from dipl0 import RunConfig, SweepParamType, NetSpec, plan_sweep, run_sweep, write_sweep_table


def test_plan_covers_one_at_a_time_grid():
    jobs, points = plan_sweep()
    # per alpha: 3 lambdas + 4 betas + 3 Ts
    assert len(points) == 3 * 10
    # per alpha: lambda in {0.05, 0.075}, beta in {1.5, 1.75, 2.0}, and the base point
    assert len(jobs) == 3 * 6
    lambdas = sorted({v for a, p, v, _, _ in points if p is SweepParamType.LAMBDA})
    betas = sorted({v for a, p, v, _, _ in points if p is SweepParamType.BETA})
    Ts = sorted({v for a, p, v, _, _ in points if p is SweepParamType.T})
    assert lambdas == [0.025, 0.05, 0.075]
    assert betas == [1.5, 1.75, 2.0, 2.25]
    assert Ts == [100, 200, 300]
    assert sorted({j.alpha for j in jobs}) == [1e-5, 1e-4, 1e-3]
    base = [j for j in jobs if j.lam == 0.025 and j.beta == 2.25]
    assert all(j.T == 300 for j in base)
    assert all(j.T == 100 for j in jobs if j not in base)


def test_T_scale():
    jobs, points = plan_sweep(T_scale=0.01)
    assert sorted({T for *_, T in points}) == [1, 2, 3]
    assert max(j.T for j in jobs) == 3


def test_small_sweep(tmp_path):
    rng = np.random.default_rng(0)
    f = rng.uniform(size=(16, 16, 1))
    reference = rng.uniform(size=(16, 16, 1))
    base = RunConfig(K=1, ramp_steps=5, net=NetSpec(input_channels=2, output_channels=1, depth=2,
                                                     channels_per_level=(2, 2), skip_channels=(1, 1)))
    rows = run_sweep(f, reference, base, T_scale=0.01, lambdas=(0.025, 0.075), betas=(2.25,), alphas=(1e-3,))
    assert len(rows) == 2 + 1 + 3
    assert all(row.psnr is not None for row in rows)
    path = str(tmp_path / 'sweep.csv')
    write_sweep_table(rows, path)
    with open(path) as fp:
        table = list(csv.reader(fp))
    assert table[0] == ['alpha', 'param', 'value', 'T', 'psnr', 'ssim']
    assert len(table) == len(rows) + 1
