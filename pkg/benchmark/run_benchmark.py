import os
import sys
import argparse
from collections import defaultdict
import matplotlib.pyplot as plt
import numpy as np

SCRIPTS = [
    'region_fusion',
    'dipl0',
]


def show(data, save_path=None):
    sizes = sorted({size for values in data.values() for size, _ in values})
    fig, axes = plt.subplots(1, 1, figsize=(15, 8))

    bar_width = 0.8 / max(len(data), 1)
    for i, key in enumerate(sorted(data)):
        times = dict(data[key])
        bar_pos = np.arange(len(sizes)) + (i * bar_width) - ((len(data) - 1) / 2 * bar_width)
        axes.bar(bar_pos, [times.get(s, 0) for s in sizes], width=bar_width, label=key)

    axes.set_xlabel('Image Size')
    axes.set_ylabel('Use Time(s)')
    axes.set_xticks(np.arange(len(sizes)), sizes)
    axes.legend()

    if save_path:
        plt.savefig(save_path)
    plt.show()


def main(scripts, runtimes, each_runtimes, sizes, show_img, img_path):
    bm_data = defaultdict(list)
    for script in scripts.split(','):
        script = script.strip()
        if script not in SCRIPTS:
            raise ValueError(f'not found script: {script}')
        script_path = os.path.join(os.path.abspath(__file__).rsplit(os.path.sep, 1)[0], f'run_{script}.py')
        cmd = f'{sys.executable} {script_path} --runtimes={each_runtimes} --sizes={sizes}'

        total_time = defaultdict(float)
        info = {}
        for _ in range(runtimes):
            start_flag = False
            msg = os.popen(cmd).read().strip()
            for row in msg.split('\n'):
                row = row.strip()
                if not start_flag and row.startswith('---'):
                    start_flag = True
                    continue
                if start_flag:
                    _, phase, size, t = row.split(' ')
                    total_time[(phase, int(size))] += float(t)
                else:
                    k, v = row.split(':', 1)
                    info.setdefault(k, v)

        for k, v in info.items():
            print(f'{k}:{v}')
        print('-' * 10)
        for phase, size in sorted(total_time):
            one_time = total_time[(phase, size)] / runtimes / each_runtimes
            print(script, phase, size, f'{one_time:>.8f}')
            bm_data[phase].append((size, one_time))
        print('=' * 10)
    if show_img:
        show(bm_data, img_path)


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument('-p', '--scripts', default='region_fusion,dipl0', type=str, help='scripts {%s}' % SCRIPTS)
    parser.add_argument('-r', '--runtimes', default=1, type=int, help='run times')
    parser.add_argument('-er', '--each_runtimes', default=1, type=int, help='each script run times')
    parser.add_argument('-s', '--sizes', default='64', type=str, help='image sizes, like: 64,128,256')
    parser.add_argument('--show_img', default=False, type=bool, help='show matplotlib')
    parser.add_argument('--img_path', default=None, type=str, help='image path, like: ./a.png')
    args = parser.parse_args()

    main(scripts=args.scripts, runtimes=args.runtimes, each_runtimes=args.each_runtimes,
         sizes=args.sizes, show_img=args.show_img, img_path=args.img_path)
