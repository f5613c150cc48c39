import os
import sys
import time
import argparse

sys.path.append(__file__.rsplit(os.path.sep, 1)[0])  # NOQA
import dipl0

from utils import gen_data


def region_fusion(size, runtimes, lam=0.025):
    rf = dipl0.RegionFusion(lambda_eff=lam)
    rf.solve(gen_data(size))

    total_time = 0
    for _ in range(runtimes):
        data = gen_data(size)
        s = time.time()
        rf.solve(data)
        e = time.time()
        total_time += e - s
    return total_time


PHASES_DIC = {'region_fusion': region_fusion}


def main(runtimes, sizes, lam):
    print(f'project:{dipl0.__name__}-{dipl0.__version__}')
    print(f'runtimes:{runtimes}')
    print(f'sizes:{sizes}')
    print(f'lambda:{lam}')
    print('-' * 10)
    fn = PHASES_DIC['region_fusion']

    for size in map(int, sizes.split(',')):
        use_time = fn(size, runtimes, lam)
        print(dipl0.__name__, fn.__name__, size, f'{use_time:>.8f}')


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument('-r', '--runtimes', default=3, type=int, help='run times')
    parser.add_argument('-s', '--sizes', default='64', type=str, help='image sizes, like: 64,128,256')
    parser.add_argument('-l', '--lam', default=0.025, type=float, help='lambda_eff')
    args = parser.parse_args()

    main(runtimes=args.runtimes, sizes=args.sizes, lam=args.lam)
