import csv
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

from dipl0.type import ExecutionModeType, SweepParamType, get_enum
from dipl0.admm import RunConfig, run

__all__ = [
    'SWEEP_LAMBDAS',
    'SWEEP_BETAS',
    'SWEEP_TS',
    'SWEEP_ALPHAS',
    'SweepRow',
    'SweepJob',
    'plan_sweep',
    'run_sweep',
    'write_sweep_table',
]

logger = logging.getLogger(__name__)

SWEEP_LAMBDAS = (0.025, 0.05, 0.075)
SWEEP_BETAS = (1.5, 1.75, 2.0, 2.25)
SWEEP_TS = (100, 200, 300)
SWEEP_ALPHAS = (1e-3, 1e-4, 1e-5)

SweepRow = namedtuple('SweepRow', ['alpha', 'param', 'value', 'T', 'psnr', 'ssim'])
SweepJob = namedtuple('SweepJob', ['alpha', 'lam', 'beta', 'T'])


def _scale(T, T_scale):
    return max(1, int(round(T * T_scale)))


def plan_sweep(base=None, T_scale=1.0, lambdas=SWEEP_LAMBDAS, betas=SWEEP_BETAS,
               Ts=SWEEP_TS, alphas=SWEEP_ALPHAS):
    """
    One-at-a-time parameter grid, repeated for every learning rate.

    Around the base point (``base.lam``, ``base.beta``, ``Ts[0]``) the grid
    varies lambda, then beta, then T. Points of the T axis are read from the
    history of a single run, so one run per distinct (alpha, lambda, beta)
    is enough; it lasts as long as its longest read-out.

    Parameters
    ----------
    base: RunConfig or None

    T_scale: float
        Multiplies every T, for desk-scale runs.

    Returns
    -------
    jobs: list of SweepJob

    points: list of (alpha, SweepParamType, value, job_index, T)
    """
    base = RunConfig() if base is None else base
    if T_scale <= 0:
        raise ValueError(f'T_scale={T_scale} must be > 0')
    Ts = [_scale(T, T_scale) for T in Ts]
    T_base = Ts[0]

    jobs = {}
    points = []

    def need(alpha, lam, beta, T):
        key = (alpha, lam, beta)
        jobs[key] = max(jobs.get(key, 0), T)
        return key

    for alpha in alphas:
        for lam in lambdas:
            points.append((alpha, SweepParamType.LAMBDA, lam, need(alpha, lam, base.beta, T_base), T_base))
        for beta in betas:
            points.append((alpha, SweepParamType.BETA, beta, need(alpha, base.lam, beta, T_base), T_base))
        for T in Ts:
            points.append((alpha, SweepParamType.T, T, need(alpha, base.lam, base.beta, T), T))

    keys = list(jobs)
    job_list = [SweepJob(a, lam, beta, jobs[(a, lam, beta)]) for a, lam, beta in keys]
    index = {key: i for i, key in enumerate(keys)}
    points = [(a, p, v, index[key], T) for a, p, v, key, T in points]
    return job_list, points


def _execute(args):
    f, reference, cfg = args
    _, history = run(f, cfg, reference)
    return [(rec.psnr, rec.ssim) for rec in history]


def run_sweep(f, reference, base=None, T_scale=1.0, mode=ExecutionModeType.DETERMINISTIC,
              max_workers=None, **grid):
    """
    Run the sensitivity sweep.

    Parameters
    ----------
    f: np.ndarray [shape=(h, w, c)]
        Input image

    reference: np.ndarray [shape=(h, w, c)]
        Clean image the PSNR/SSIM are measured against.

    base: RunConfig or None
        Fixed parameters (gamma, K, seeds, network).

    T_scale: float

    mode: ExecutionModeType or str
        ``PARALLEL`` distributes the runs over worker processes.

    max_workers: int or None

    grid:
        ``lambdas``, ``betas``, ``Ts``, ``alphas`` overrides.

    Returns
    -------
    out: list of SweepRow
    """
    base = RunConfig() if base is None else base
    mode = get_enum(ExecutionModeType, mode)
    jobs, points = plan_sweep(base, T_scale, **grid)
    tasks = [(f, reference, base.replace(alpha=j.alpha, lam=j.lam, beta=j.beta, T=j.T)) for j in jobs]
    logger.info('sweep: %d runs, %d table rows, mode=%s', len(tasks), len(points), mode.name.lower())

    if mode is ExecutionModeType.PARALLEL:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_execute, tasks))
    else:
        results = [_execute(task) for task in tasks]

    rows = []
    for alpha, param, value, idx, T in points:
        psnr, ssim = results[idx][T - 1]
        rows.append(SweepRow(alpha, param.name.lower(), value, T, psnr, ssim))
    return rows


def write_sweep_table(rows, path):
    """Write sweep rows as CSV with a header line."""
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(SweepRow._fields)
        for row in rows:
            writer.writerow(['' if v is None else repr(v) if isinstance(v, float) else v for v in row])
