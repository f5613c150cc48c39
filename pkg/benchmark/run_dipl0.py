import os
import sys
import time
import argparse

sys.path.append(__file__.rsplit(os.path.sep, 1)[0])  # NOQA
import dipl0

from utils import gen_data


def dipl0_run(size, runtimes, T=10, K=25):
    """Full DIP-l0 runs; also reports the share spent in each phase."""
    cfg = dipl0.RunConfig(T=T, K=K)
    total = {'theta_step': 0.0, 'v_step': 0.0, 'total': 0.0}
    for _ in range(runtimes):
        model = dipl0.DipL0(cfg)
        s = time.time()
        model.smooth(gen_data(size))
        e = time.time()
        total['theta_step'] += model.timing['theta_step']
        total['v_step'] += model.timing['v_step']
        total['total'] += e - s
    return total


def main(runtimes, sizes, T, K):
    print(f'project:{dipl0.__name__}-{dipl0.__version__}')
    print(f'runtimes:{runtimes}')
    print(f'sizes:{sizes}')
    print(f'T:{T}')
    print(f'K:{K}')
    print('-' * 10)

    for size in map(int, sizes.split(',')):
        use_time = dipl0_run(size, runtimes, T, K)
        for phase in ('theta_step', 'v_step', 'total'):
            print(dipl0.__name__, phase, size, f'{use_time[phase]:>.8f}')


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument('-r', '--runtimes', default=1, type=int, help='run times')
    parser.add_argument('-s', '--sizes', default='64', type=str, help='image sizes, like: 64,128')
    parser.add_argument('-T', default=10, type=int, help='outer iterations')
    parser.add_argument('-K', default=25, type=int, help='inner iterations')
    args = parser.parse_args()

    main(runtimes=args.runtimes, sizes=args.sizes, T=args.T, K=args.K)
