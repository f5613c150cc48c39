import os
import sys
import argparse
import logging

from dipl0.__version__ import __version__
from dipl0.exceptions import Dipl0Error
from dipl0.type import TaskPresetType
from dipl0.utils import gen_synthetic, gen_jpeg_pair
from dipl0.io import load_image, save_image
from dipl0.fusion import FusionConfig, solve_prox
from dipl0.metrics import compare
from dipl0.admm import DipL0
from dipl0.config import build_run_config, get_execution_mode
from dipl0.report import RunReport, write_report
from dipl0.sweep import run_sweep, write_sweep_table
from dipl0.net import save_checkpoint, load_checkpoint

__all__ = [
    'build_parser',
    'cmd_smooth',
    'cmd_l0',
    'cmd_metrics',
    'cmd_sweep',
    'cmd_demo',
    'main',
]

logger = logging.getLogger('dipl0')


def _add_run_args(p):
    p.add_argument('--preset', choices=[t.name.lower() for t in TaskPresetType], default=None)
    p.add_argument('--config', default=None, help='JSON configuration file')
    p.add_argument('--lambda', dest='lam', type=float, default=None)
    p.add_argument('--beta', type=float, default=None)
    p.add_argument('--gamma', type=float, default=None)
    p.add_argument('-T', dest='T', type=int, default=None)
    p.add_argument('-K', dest='K', type=int, default=None)
    p.add_argument('--alpha', type=float, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--ramp-steps', dest='ramp_steps', type=int, default=None)
    p.add_argument('--depth', type=int, default=None, help='network depth')
    p.add_argument('--progress', action='store_true')


def _run_config(args, **extra):
    overrides = {k: getattr(args, k) for k in ('lam', 'beta', 'gamma', 'T', 'K', 'alpha', 'seed', 'ramp_steps')}
    overrides.update(extra)
    if args.depth is not None:
        depth = args.depth
        overrides['net'] = {'depth': depth,
                            'channels_per_level': [16 * 2 ** min(i, 2) for i in range(depth)],
                            'skip_channels': [4] * depth}
    return build_run_config(args.preset, args.config, overrides)


def cmd_smooth(args):
    cfg = _run_config(args)
    f, _ = load_image(args.input)
    reference = None
    if args.reference:
        reference, _ = load_image(args.reference)

    params = None
    if args.init_checkpoint:
        params = load_checkpoint(args.init_checkpoint)
        logger.info('resuming from %s at Adam step %d', args.init_checkpoint, params.step_count)

    model = DipL0(cfg, progress=args.progress, params=params)
    u = model.smooth(f, reference)
    save_image(u, args.out)

    if args.checkpoint:
        save_checkpoint(model.params, args.checkpoint)
    if args.report:
        outputs = {'image': args.out}
        if args.init_checkpoint:
            outputs['init_checkpoint'] = args.init_checkpoint
        if args.checkpoint:
            outputs['checkpoint'] = args.checkpoint
        report = RunReport.from_run(cfg, model.history, model.timing if args.timing else None, outputs)
        write_report(report, args.report)
    logger.info('wrote %s', args.out)
    return 0


def cmd_l0(args):
    f, _ = load_image(args.input)
    save_image(solve_prox(f, FusionConfig(lambda_eff=args.lam, ramp_steps=args.ramp_steps)), args.out)
    logger.info('wrote %s', args.out)
    return 0


def _fmt_metrics(report):
    return f'psnr: {report.psnr:.4f}\nssim: {report.ssim:.6f}'


def cmd_metrics(args):
    a, _ = load_image(args.a)
    b, _ = load_image(args.b)
    print(_fmt_metrics(compare(a, b)))
    return 0


def cmd_sweep(args):
    base = _run_config(args)
    f, _ = load_image(args.input)
    reference, _ = load_image(args.reference)
    rows = run_sweep(f, reference, base, T_scale=args.T_scale, mode=get_execution_mode(),
                     max_workers=args.workers)
    write_sweep_table(rows, args.out_table)
    logger.info('wrote %s (%d rows)', args.out_table, len(rows))
    return 0


def cmd_demo(args):
    cfg = _run_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    seed = args.seed or 0
    if args.preset == 'jpeg':
        clean, corrupted = gen_jpeg_pair(args.size, quality=args.quality, seed=seed)
    else:
        clean, corrupted = gen_synthetic(args.size, seed=seed)
    paths = {name: os.path.join(args.out_dir, f'{name}.png') for name in ('clean', 'corrupted', 'smoothed')}
    save_image(clean, paths['clean'])
    save_image(corrupted, paths['corrupted'])

    model = DipL0(cfg, progress=args.progress)
    u = model.smooth(corrupted, clean)
    save_image(u, paths['smoothed'])
    write_report(RunReport.from_run(cfg, model.history, outputs=paths),
                 os.path.join(args.out_dir, 'report.txt'))

    print('corrupted vs clean')
    print(_fmt_metrics(compare(corrupted, clean)))
    print('smoothed vs clean')
    print(_fmt_metrics(compare(u, clean)))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog='dipl0', description='DIP-l0 image smoothing')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true')
    parser.add_argument('-q', '--quiet', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('smooth', help='smooth an image with DIP-l0')
    p.add_argument('--input', required=True)
    p.add_argument('--reference', default=None)
    p.add_argument('--out', required=True)
    p.add_argument('--report', default=None)
    p.add_argument('--timing', action='store_true', help='include wall-clock times in the report')
    p.add_argument('--checkpoint', default=None, help='write the final weights here')
    p.add_argument('--init-checkpoint', dest='init_checkpoint', default=None,
                   help='resume from weights written by --checkpoint')
    _add_run_args(p)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser('l0', help='Region Fusion l0 smoothing')
    p.add_argument('--input', required=True)
    p.add_argument('--lambda', dest='lam', type=float, required=True)
    p.add_argument('--ramp-steps', dest='ramp_steps', type=int, default=100)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_l0)

    p = sub.add_parser('metrics', help='PSNR and SSIM of two images')
    p.add_argument('--a', required=True)
    p.add_argument('--b', required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser('sweep', help='one-at-a-time parameter sweep')
    p.add_argument('--input', required=True)
    p.add_argument('--reference', required=True)
    p.add_argument('--out-table', dest='out_table', required=True)
    p.add_argument('--T-scale', dest='T_scale', type=float, default=1.0)
    p.add_argument('--workers', type=int, default=None)
    _add_run_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('demo', help='smooth a synthetic image')
    p.add_argument('--size', type=int, default=64)
    p.add_argument('--quality', type=int, default=10, help='JPEG quality of the jpeg preset demo')
    p.add_argument('--out-dir', dest='out_dir', required=True)
    _add_run_args(p)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except (Dipl0Error, ValueError, OSError) as e:
        print(f'dipl0 {args.command}: {e}', file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
