import logging
import math
from dataclasses import dataclass
import numpy as np

from dipl0.exceptions import FusionGraphError
from dipl0.image import DEFAULT_EPSILON, eval_loss
from dipl0.utils import as_image, check_image

__all__ = [
    'FusionConfig',
    'RegionGraph',
    'RegionFusion',
    'init_graph',
    'try_fuse',
    'solve_prox',
    'l0_smooth',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FusionConfig:
    """
    Parameters of the Region Fusion solver.

    Parameters
    ----------
    lambda_eff: float
        Weight of :math:`\\|\\nabla v\\|_0` in :math:`\\min_v \\lambda_{eff}\\|\\nabla v\\|_0 + \\|v-t\\|_2^2`.
        Inside ADMM this is always :math:`2\\lambda/\\beta`.

    ramp_steps: int
        Number of passes over which the working lambda grows linearly to `lambda_eff`.

    epsilon: float
        Zero tolerance used when the objective is evaluated on the result.

    max_extra_passes: int
        Passes at full lambda allowed after the ramp while fusions still happen.
    """
    lambda_eff: float = 0.0
    ramp_steps: int = 100
    epsilon: float = DEFAULT_EPSILON
    max_extra_passes: int = 50

    def __post_init__(self):
        if not math.isfinite(self.lambda_eff) or self.lambda_eff < 0:
            raise ValueError(f'lambda_eff={self.lambda_eff} must be finite and >= 0')
        if int(self.ramp_steps) != self.ramp_steps or self.ramp_steps < 1:
            raise ValueError(f'ramp_steps={self.ramp_steps} must be an integer >= 1')
        if self.epsilon < 0:
            raise ValueError(f'epsilon={self.epsilon} must be >= 0')
        if self.max_extra_passes < 0:
            raise ValueError(f'max_extra_passes={self.max_extra_passes} must be >= 0')


class RegionGraph(object):
    """
    Partition state of Region Fusion.

    Groups are identified by their representative, the smallest pixel
    index they contain (pixels are numbered row-major). Each group keeps
    its mean value :math:`Y_i`, pixel count :math:`w_i` and a map from
    neighbor group to connection weight :math:`c_{ij}`, the number of
    4-adjacent pixel pairs crossing the common boundary.

    Parameters
    ----------
    target: np.ndarray [shape=(h, w, c)]
        Image whose pixels start as singleton groups. Values may lie outside [0, 1].

    Examples
    --------
    >>> import numpy as np
    >>> from dipl0 import RegionGraph
    >>> graph = RegionGraph(np.array([[0., 0., 1., 1.]])[..., None])
    >>> graph.num_groups, graph.num_links
    (4, 3)
    """

    def __init__(self, target):
        target = as_image(target)
        check_image(target)

        self.height, self.width, self.channels = target.shape
        n = self.height * self.width
        flat = target.reshape(n, self.channels)

        self.values = flat.tolist()
        self.counts = [1] * n
        self.alive = [True] * n
        self.links = [dict() for _ in range(n)]
        self._parent = list(range(n))
        self._target = flat.copy()
        self.num_groups = n

        w = self.width
        for i in range(self.height):
            for j in range(w):
                p = i * w + j
                if j + 1 < w:
                    self.links[p][p + 1] = 1
                    self.links[p + 1][p] = 1
                if i + 1 < self.height:
                    self.links[p][p + w] = 1
                    self.links[p + w][p] = 1

    @property
    def num_links(self):
        """Number of distinct neighboring group pairs."""
        return sum(len(nb) for nb in self.links) // 2

    def find(self, p):
        """
        Live group of pixel `p`, with path compression.

        Parameters
        ----------
        p: int
            Row-major pixel index

        Returns
        -------
        out: int
        """
        parent = self._parent
        root = p
        while parent[root] != root:
            root = parent[root]
        while parent[p] != root:
            parent[p], p = root, parent[p]
        return root

    def groups(self):
        """Representatives of the live groups, ascending."""
        return [i for i, a in enumerate(self.alive) if a]

    def fusion_cost(self, i, j):
        """
        Left and right sides of the fusion test, before multiplying the right by lambda.

        Returns
        -------
        lhs: float
            :math:`w_i w_j \\|Y_i-Y_j\\|_2^2`
        rhs: float
            :math:`c_{ij}(w_i+w_j)`
        """
        yi = self.values[i]
        yj = self.values[j]
        d2 = 0.0
        for a, b in zip(yi, yj):
            d2 += (a - b) * (a - b)
        wi = self.counts[i]
        wj = self.counts[j]
        return wi * wj * d2, self.links[i][j] * (wi + wj)

    def try_fuse(self, i, j, lam):
        """
        Fuse groups `i` and `j` if that does not raise the objective at `lam`.

        Fusion happens iff :math:`w_i w_j \\|Y_i-Y_j\\|_2^2 \\le \\lambda c_{ij}(w_i+w_j)`.
        Ties fuse.

        Parameters
        ----------
        i, j: int
            Live, adjacent group representatives

        lam: float
            Working lambda

        Returns
        -------
        fused: bool
        """
        if not (self.alive[i] and self.alive[j]):
            raise FusionGraphError(f'groups {i} and {j} must both be alive')
        if i == j or j not in self.links[i]:
            raise FusionGraphError(f'groups {i} and {j} are not linked')

        lhs, rhs = self.fusion_cost(i, j)
        if lhs > lam * rhs:
            return False
        self._merge(i, j)
        return True

    def _merge(self, i, j):
        keep, drop = (i, j) if i < j else (j, i)
        wk = self.counts[keep]
        wd = self.counts[drop]
        total = wk + wd
        if self.values[keep] != self.values[drop]:
            self.values[keep] = [(wk * a + wd * b) / total
                                 for a, b in zip(self.values[keep], self.values[drop])]
        self.counts[keep] = total

        keep_links = self.links[keep]
        del keep_links[drop]
        for k, c in self.links[drop].items():
            if k == keep:
                continue
            keep_links[k] = keep_links.get(k, 0) + c
            nb = self.links[k]
            del nb[drop]
            nb[keep] = nb.get(keep, 0) + c

        self.links[drop] = {}
        self.alive[drop] = False
        self.counts[drop] = 0
        self._parent[drop] = keep
        self.num_groups -= 1

    def sweep(self, lam):
        """
        One pass over the live groups in ascending order, testing each current neighbor.

        Parameters
        ----------
        lam: float
            Working lambda

        Returns
        -------
        out: int
            Number of fusions performed.
        """
        fused = 0
        for i in range(len(self.alive)):
            if not self.alive[i]:
                continue
            for j in sorted(self.links[i]):
                if not self.alive[i]:
                    break
                if not self.alive[j] or j not in self.links[i]:
                    continue
                if self.try_fuse(i, j, lam):
                    fused += 1
        return fused

    def labels(self):
        """
        Group representative of every pixel.

        Returns
        -------
        out: np.ndarray [shape=(h, w), dtype=np.int64]
        """
        n = self.height * self.width
        return np.array([self.find(p) for p in range(n)], dtype=np.int64).reshape(self.height, self.width)

    def to_image(self):
        """
        Image whose pixels carry their group's value.

        Returns
        -------
        out: np.ndarray [shape=(h, w, c)]
        """
        values = np.asarray(self.values, dtype=np.float64)
        return values[self.labels()].reshape(self.height, self.width, self.channels)

    def validate(self):
        """
        Check the partition invariants; raises FusionGraphError on the first violation.

        * live pixel counts sum to h*w
        * links are symmetric, between distinct live groups, with weight >= 1
        * link weights sum to the number of 4-adjacent pixel pairs split across groups
        * each group value is the mean of the target over its pixels
        """
        n = self.height * self.width
        if sum(self.counts[i] for i in self.groups()) != n:
            raise FusionGraphError('live group counts do not sum to the pixel count')

        total_weight = 0
        for i, nb in enumerate(self.links):
            for j, c in nb.items():
                if i == j or not (self.alive[i] and self.alive[j]):
                    raise FusionGraphError(f'link ({i}, {j}) touches a dead group or itself')
                if c < 1 or self.links[j].get(i) != c:
                    raise FusionGraphError(f'link ({i}, {j}) is not symmetric with weight >= 1')
                total_weight += c
        labels = self.labels()
        crossing = int(np.count_nonzero(labels[:, 1:] != labels[:, :-1])
                       + np.count_nonzero(labels[1:, :] != labels[:-1, :]))
        if total_weight // 2 != crossing:
            raise FusionGraphError(f'link weights {total_weight // 2} != crossing pairs {crossing}')

        flat = labels.ravel()
        for g in self.groups():
            mean = self._target[flat == g].mean(axis=0)
            if not np.allclose(mean, self.values[g], rtol=1e-9, atol=1e-9):
                raise FusionGraphError(f'group {g} value is not the mean of its pixels')
        return True


class RegionFusion(object):
    """
    Region Fusion solver for the l0 gradient proximal problem

    :math:`\\min_v \\lambda_{eff}\\|\\nabla v\\|_0 + \\|v-t\\|_2^2`.

    Starting from one group per pixel, neighboring groups are fused
    greedily while the working lambda ramps linearly from
    ``lambda_eff / ramp_steps`` to ``lambda_eff``. Passes at full lambda
    continue until one completes without fusion.

    Parameters
    ----------
    lambda_eff: float
        Regularizer weight of the problem being solved.

    ramp_steps: int
        Number of ramp passes.

    epsilon: float
        Zero tolerance of the gradient count.

    max_extra_passes: int
        Upper bound on full-lambda passes after the ramp.

    Examples
    --------
    >>> import numpy as np
    >>> import dipl0
    >>> rf = dipl0.RegionFusion(lambda_eff=1.5)
    >>> rf.solve(np.array([[0., 0., 1., 1.]])[..., None])[..., 0]
    array([[0.5, 0.5, 0.5, 0.5]])
    """

    def __init__(self, lambda_eff=0.0, ramp_steps=100, epsilon=DEFAULT_EPSILON, max_extra_passes=50):
        self.config = FusionConfig(lambda_eff=float(lambda_eff), ramp_steps=int(ramp_steps),
                                   epsilon=epsilon, max_extra_passes=int(max_extra_passes))
        self.graph = None
        self.num_passes = 0
        self.num_fusions = 0

    @classmethod
    def from_config(cls, cfg):
        """Build from a `FusionConfig`."""
        return cls(lambda_eff=cfg.lambda_eff, ramp_steps=cfg.ramp_steps,
                   epsilon=cfg.epsilon, max_extra_passes=cfg.max_extra_passes)

    @property
    def num_regions(self):
        """Live groups left after the last solve."""
        return None if self.graph is None else self.graph.num_groups

    def solve(self, target):
        """
        Solve the proximal problem for `target`.

        Parameters
        ----------
        target: np.ndarray [shape=(h, w, c)]
            Prox target. Not clamped; values may leave [0, 1].

        Returns
        -------
        out: np.ndarray [shape=(h, w, c)]
            Piecewise-constant image.
        """
        cfg = self.config
        graph = RegionGraph(target)
        self.graph = graph
        self.num_passes = 0
        self.num_fusions = 0

        lam = cfg.lambda_eff
        fused = 0
        for step in range(1, cfg.ramp_steps + 1):
            fused = graph.sweep(lam * step / cfg.ramp_steps)
            self.num_fusions += fused
            self.num_passes += 1

        extra = 0
        while fused and extra < cfg.max_extra_passes:
            fused = graph.sweep(lam)
            self.num_fusions += fused
            self.num_passes += 1
            extra += 1

        logger.debug('region fusion: lambda_eff=%g passes=%d fusions=%d regions=%d',
                     lam, self.num_passes, self.num_fusions, graph.num_groups)
        return graph.to_image()


def init_graph(target):
    """
    One group per pixel, links between 4-adjacent pixels with weight 1.

    Parameters
    ----------
    target: np.ndarray [shape=(h, w, c)]

    Returns
    -------
    out: RegionGraph
    """
    return RegionGraph(target)


def try_fuse(graph, i, j, lambda_current):
    """
    Fuse groups `i` and `j` of `graph` if merging does not raise the objective.

    See `RegionGraph.try_fuse`.

    Returns
    -------
    fused: bool
    """
    return graph.try_fuse(i, j, lambda_current)


def solve_prox(target, cfg):
    """
    Approximate :math:`\\arg\\min_v \\lambda_{eff}\\|\\nabla v\\|_0 + \\|v-t\\|_2^2` by Region Fusion.

    The result never has a higher objective than `target` itself.

    Parameters
    ----------
    target: np.ndarray [shape=(h, w, c)]
        Prox target t. Not clamped.

    cfg: FusionConfig

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    target = as_image(target)
    out = RegionFusion.from_config(cfg).solve(target)
    before = eval_loss(target, target, cfg.lambda_eff, cfg.epsilon)
    after = eval_loss(target, out, cfg.lambda_eff, cfg.epsilon)
    if after > before:
        # the pooled per-pixel count can drop by less than c_ij on a fusion
        logger.info('prox: fused objective %g above target objective %g, keeping target', after, before)
        return target.copy()
    return out


def l0_smooth(X, lam, ramp_steps=100):
    """
    Region Fusion as a standalone l0 gradient smoothing filter.

    .. Note:: Use the `RegionFusion` class to inspect the final partition.

    Parameters
    ----------
    X: np.ndarray [shape=(h, w) or (h, w, c)]
        Input image, usually normalized to [0, 1].

    lam: float
        Weight of the l0 gradient term.

    ramp_steps: int
        Number of ramp passes.

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
        Piecewise-constant image.
    """
    return RegionFusion(lambda_eff=lam, ramp_steps=ramp_steps).solve(as_image(X))
