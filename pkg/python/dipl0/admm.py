import logging
import math
import time
import warnings
import dataclasses
from dataclasses import dataclass, field
import numpy as np
from tqdm import tqdm

from dipl0.exceptions import NonFiniteError
from dipl0.type import TaskPresetType, get_enum
from dipl0.utils import as_image, check_image, check_same_shape, pad_to_multiple, crop_image
from dipl0.image import DEFAULT_EPSILON, eval_loss, fidelity, l0_gradient_count, axpy_combine
from dipl0.fusion import FusionConfig, solve_prox
from dipl0.metrics import psnr, ssim, SSIM_WINDOW
from dipl0.net import NetSpec, build_network, make_input, solve_theta_subproblem

__all__ = [
    'PRESETS',
    'RunConfig',
    'IterationRecord',
    'AdmmState',
    'DipL0',
    'init_state',
    'prox_target',
    'dual_update',
    'average_output',
    'admm_step',
    'run',
]

logger = logging.getLogger(__name__)

PRESETS = {
    TaskPresetType.SMOOTHING: dict(lam=0.025, beta=2.25, T=100, alpha=1e-3, gamma=0.9, K=25),
    TaskPresetType.JPEG: dict(lam=0.025, beta=2.0, T=100, alpha=1e-3, gamma=0.9, K=25),
}

# relative slack of the prox monotonicity check
_PROX_RTOL = 1e-9


@dataclass
class RunConfig:
    """
    Hyper-parameters of one DIP-l0 run.

    Parameters
    ----------
    lam: float
        Weight :math:`\\lambda` of the l0 gradient term, >= 0.

    beta: float
        ADMM penalty :math:`\\beta`, > 0.

    gamma: float
        Output averaging weight, in (0, 1].

    T: int
        Outer iterations, >= 0.

    K: int
        Adam steps per outer iteration, >= 1.

    alpha: float
        Adam learning rate, > 0.

    weight_seed, input_seed, state_seed: int
        Seeds of the network weights, the fixed input x, and v0/w0.

    net: NetSpec
        Network architecture. Its output channels follow the image.

    ramp_steps: int
        Region Fusion ramp passes.

    epsilon: float
        Zero tolerance of the gradient count.

    max_extra_passes: int
        Region Fusion passes at full lambda after the ramp.
    """
    lam: float = 0.025
    beta: float = 2.25
    gamma: float = 0.9
    T: int = 100
    K: int = 25
    alpha: float = 1e-3
    weight_seed: int = 0
    input_seed: int = 1
    state_seed: int = 2
    net: NetSpec = field(default_factory=NetSpec)
    ramp_steps: int = 100
    epsilon: float = DEFAULT_EPSILON
    max_extra_passes: int = 50

    def __post_init__(self):
        if isinstance(self.net, dict):
            self.net = NetSpec.from_dict(self.net)
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f'lam={self.lam} must be finite and >= 0')
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise ValueError(f'beta={self.beta} must be finite and > 0')
        if not 0 < self.gamma <= 1:
            raise ValueError(f'gamma={self.gamma} must be in (0, 1]')
        if int(self.T) != self.T or self.T < 0:
            raise ValueError(f'T={self.T} must be an integer >= 0')
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f'K={self.K} must be an integer >= 1')
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise ValueError(f'alpha={self.alpha} must be finite and > 0')
        self.T = int(self.T)
        self.K = int(self.K)
        # validates ramp_steps, epsilon, max_extra_passes
        self.fusion

    @property
    def lambda_eff(self):
        """Weight of the l0 term in the v-subproblem, :math:`2\\lambda/\\beta`."""
        return 2.0 * self.lam / self.beta

    @property
    def fusion(self):
        """
        Region Fusion configuration of the v-subproblem.

        `lambda_eff` is always derived from `lam` and `beta`.
        """
        return FusionConfig(lambda_eff=self.lambda_eff, ramp_steps=self.ramp_steps,
                            epsilon=self.epsilon, max_extra_passes=self.max_extra_passes)

    @classmethod
    def from_seed(cls, seed, **kwargs):
        """Derive the three seeds from one: weights `seed`, input `seed+1`, v0/w0 `seed+2`."""
        return cls(weight_seed=seed, input_seed=seed + 1, state_seed=seed + 2, **kwargs)

    @classmethod
    def from_preset(cls, preset, **kwargs):
        """
        Parameters
        ----------
        preset: TaskPresetType or str

        kwargs:
            Overrides of the preset values.
        """
        values = dict(PRESETS[get_enum(TaskPresetType, preset)])
        values.update(kwargs)
        return cls(**values)

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d['net'] = self.net.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        """
        Inverse of `to_dict`. Accepts ``lambda`` for ``lam`` and a nested
        ``fusion`` object; a ``fusion.lambda_eff`` entry is ignored.
        """
        d = dict(d)
        if 'lambda' in d:
            d['lam'] = d.pop('lambda')
        fusion = d.pop('fusion', None) or {}
        for key in ('ramp_steps', 'epsilon', 'max_extra_passes'):
            if key in fusion:
                d.setdefault(key, fusion[key])
        if 'seed' in d:
            seed = d.pop('seed')
            d.setdefault('weight_seed', seed)
            d.setdefault('input_seed', seed + 1)
            d.setdefault('state_seed', seed + 2)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f'unknown configuration keys {sorted(unknown)}')
        return cls(**d)


@dataclass
class IterationRecord:
    """
    Quantities logged after outer iteration `t`.

    Attributes
    ----------
    t: int
        1-based outer iteration.
    eq3_loss: float
        :math:`\\|f-u^t\\|^2 + \\lambda\\|\\nabla u^t\\|_0`
    eq3_loss_output: float
        The same loss of the raw network output.
    fidelity: float
        :math:`\\|f-u^t\\|^2`
    l0_count: int
        :math:`\\|\\nabla u^t\\|_0`
    l0_count_v: int
        :math:`\\|\\nabla v^t\\|_0`
    dual_residual: float
        :math:`\\|v^t-g_\\theta(x)\\|_2`
    prox_before, prox_after: float
        v-subproblem objective of the prox target and of its solution.
    prox_identity: bool
        The v-step returned its target unchanged.
    psnr, ssim: float or None
        Against the reference image, when one is given.
    """
    t: int
    eq3_loss: float
    eq3_loss_output: float
    fidelity: float
    l0_count: int
    l0_count_v: int
    dual_residual: float
    prox_before: float
    prox_after: float
    psnr: float = None
    ssim: float = None
    prox_identity: bool = False

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class AdmmState:
    """
    Iterates of the ADMM loop.

    `history` holds one `IterationRecord` per completed iteration.
    """
    t: int
    theta: object
    x: np.ndarray
    f: np.ndarray
    v: np.ndarray
    w: np.ndarray
    u: np.ndarray
    output: np.ndarray = None
    history: list = field(default_factory=list)


def _check_finite(arr, step, t):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(step, t)


def init_state(f, cfg, params=None):
    """
    Initial ADMM state.

    :math:`v^0, w^0` uniform on [0, 1], :math:`u^0=f`, weights and input
    from their seeds.

    Parameters
    ----------
    f: np.ndarray [shape=(h, w, c)]
        Normalized input image, dims aligned to ``2**depth``.

    cfg: RunConfig

    params: ParamStore or None
        Weights and Adam state to resume from, e.g. from `load_checkpoint`.
        Copied; its architecture replaces ``cfg.net``.

    Returns
    -------
    out: AdmmState
    """
    f = as_image(f)
    check_image(f, normalized=True)
    h, w, c = f.shape
    if params is not None:
        spec = params.spec
        if spec.output_channels != c:
            raise ValueError(f'network has output_channels={spec.output_channels}, image has {c} channels')
    else:
        spec = cfg.net
        if spec.output_channels != c:
            spec = dataclasses.replace(spec, output_channels=c)

    rng = np.random.default_rng(cfg.state_seed)
    v0 = rng.uniform(0.0, 1.0, size=f.shape)
    w0 = rng.uniform(0.0, 1.0, size=f.shape)
    theta = build_network(spec, cfg.weight_seed) if params is None else params.copy()
    x = make_input(h, w, spec.input_channels, cfg.input_seed, spec.dtype)
    return AdmmState(t=0, theta=theta, x=x, f=f, v=v0, w=w0, u=f.copy())


def prox_target(output, w, beta):
    """
    Target of the v-subproblem, :math:`o - w/\\beta`. Not clamped.

    Parameters
    ----------
    output, w: np.ndarray [shape=(h, w, c)]

    beta: float

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    if not beta > 0:
        raise ValueError(f'beta={beta} must be > 0')
    return axpy_combine(1.0, output, -1.0 / beta, w)


def dual_update(w, v, output, beta):
    """
    Multiplier ascent :math:`w + \\beta(v - o)`.

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    check_same_shape(w, v, output)
    return w + beta * (v - output)


def average_output(u_prev, output, gamma):
    """
    Exponential averaging :math:`\\gamma o + (1-\\gamma) u`.

    Parameters
    ----------
    u_prev, output: np.ndarray [shape=(h, w, c)]

    gamma: float
        In (0, 1]; 1 returns `output` exactly.

    Returns
    -------
    out: np.ndarray [shape=(h, w, c)]
    """
    if not 0 < gamma <= 1:
        raise ValueError(f'gamma={gamma} must be in (0, 1]')
    if gamma == 1:
        check_same_shape(u_prev, output)
        return output.copy()
    return axpy_combine(gamma, output, 1.0 - gamma, u_prev)


def admm_step(state, cfg, reference=None, crop=None, timing=None):
    """
    One outer iteration: theta-step, v-step, dual update, averaging.

    Parameters
    ----------
    state: AdmmState
        Advanced in place.

    cfg: RunConfig

    reference: np.ndarray [shape=(h, w, c)] or None
        Clean image for PSNR/SSIM in the history.

    crop: CropBox or None
        Region of the state that corresponds to the user's image.

    timing: dict or None
        Accumulates seconds under ``theta_step`` and ``v_step``.

    Returns
    -------
    out: AdmmState
    """
    t = state.t + 1
    start = time.perf_counter()
    try:
        _, output = solve_theta_subproblem(state.theta, state.x, state.f, state.v, state.w,
                                           cfg.beta, cfg.alpha, cfg.K)
    except NonFiniteError as e:
        if e.iteration is not None:
            raise
        raise NonFiniteError(e.step, t, e.detail) from e
    _check_finite(output, 'theta', t)
    mid = time.perf_counter()

    target = prox_target(output, state.w, cfg.beta)
    _check_finite(target, 'prox_target', t)
    fusion = cfg.fusion
    v = solve_prox(target, fusion)
    _check_finite(v, 'prox', t)
    end = time.perf_counter()

    prox_before = eval_loss(target, target, fusion.lambda_eff, cfg.epsilon)
    prox_after = eval_loss(target, v, fusion.lambda_eff, cfg.epsilon)
    if prox_after > prox_before + _PROX_RTOL * max(abs(prox_before), 1.0):
        warnings.warn(f'v-step raised the prox objective at iteration {t}: '
                      f'{prox_before!r} -> {prox_after!r}', RuntimeWarning)

    w = dual_update(state.w, v, output, cfg.beta)
    _check_finite(w, 'dual', t)
    u = average_output(state.u, output, cfg.gamma)
    _check_finite(u, 'average', t)

    if timing is not None:
        timing['theta_step'] = timing.get('theta_step', 0.0) + (mid - start)
        timing['v_step'] = timing.get('v_step', 0.0) + (end - mid)

    f_c = crop_image(state.f, crop)
    u_c = crop_image(u, crop)
    record = IterationRecord(
        t=t,
        eq3_loss=eval_loss(f_c, u_c, cfg.lam, cfg.epsilon),
        eq3_loss_output=eval_loss(f_c, crop_image(output, crop), cfg.lam, cfg.epsilon),
        fidelity=fidelity(f_c, u_c),
        l0_count=l0_gradient_count(u_c, cfg.epsilon),
        l0_count_v=l0_gradient_count(crop_image(v, crop), cfg.epsilon),
        dual_residual=float(np.linalg.norm(v - output)),
        prox_before=prox_before,
        prox_after=prox_after,
        prox_identity=bool(np.array_equal(v, target)),
    )
    if reference is not None:
        record.psnr = psnr(u_c, reference)
        if min(u_c.shape[:2]) >= SSIM_WINDOW:
            record.ssim = ssim(u_c, reference)

    state.t = t
    state.v = v
    state.w = w
    state.u = u
    state.output = output
    state.history.append(record)
    return state


def _log_record(rec):
    msg = 't=%d eq3_loss=%.6g l0=%d dual_residual=%.4g'
    args = [rec.t, rec.eq3_loss, rec.l0_count, rec.dual_residual]
    if rec.psnr is not None:
        msg += ' psnr=%.4f'
        args.append(rec.psnr)
    logger.info(msg, *args)


class DipL0(object):
    """
    DIP-l0 image smoothing.

    Minimizes :math:`\\|f-u\\|_2^2 + \\lambda\\|\\nabla u\\|_0` with
    :math:`u=g_\\theta(x)` an untrained encoder-decoder, by ADMM: Adam
    steps on the network weights alternate with a Region Fusion l0 prox
    and a multiplier update; the returned image is the exponential
    average of the network outputs.

    Images of any size are accepted; they are reflect-padded to the
    network alignment (at least twice the alignment on each side) and the
    result is cropped back.

    Parameters
    ----------
    cfg: RunConfig or None
        Defaults to ``RunConfig()``.

    progress: bool
        Show a progress bar over the outer iterations.

    params: ParamStore or None
        Weights and Adam state to resume from instead of a fresh network.

    kwargs:
        Overrides of `cfg` fields.

    Examples
    --------
    >>> import dipl0
    >>> clean, noisy = dipl0.utils.reference_pair()
    >>> model = dipl0.DipL0(T=20)
    >>> u = model.smooth(noisy, reference=clean)
    >>> len(model.history)
    20
    """

    def __init__(self, cfg=None, progress=False, params=None, **kwargs):
        cfg = RunConfig() if cfg is None else cfg
        if kwargs:
            cfg = cfg.replace(**kwargs)
        self.cfg = cfg
        self.progress = progress
        self.init_params = params
        self.state = None
        self.timing = {}

    @property
    def history(self):
        return [] if self.state is None else self.state.history

    @property
    def params(self):
        return None if self.state is None else self.state.theta

    def smooth(self, f, reference=None):
        """
        Smooth `f`.

        Parameters
        ----------
        f: np.ndarray [shape=(h, w) or (h, w, c)]
            Image normalized to [0, 1], 1 or 3 channels.

        reference: np.ndarray or None
            Clean image with `f`'s shape, for per-iteration PSNR/SSIM.

        Returns
        -------
        out: np.ndarray [shape=(h, w, c)]
            :math:`u^T`, unclamped. Values stay in [0, 1].
        """
        f = as_image(f)
        check_image(f, normalized=True)
        if reference is not None:
            reference = as_image(reference)
            check_same_shape(f, reference)

        cfg = self.cfg
        align = (cfg.net if self.init_params is None else self.init_params.spec).alignment
        padded, crop = pad_to_multiple(f, align, minimum=2 * align)
        self.timing = {'theta_step': 0.0, 'v_step': 0.0, 'total': 0.0}
        start = time.perf_counter()
        self.state = init_state(padded, cfg, self.init_params)
        for _ in tqdm(range(cfg.T), desc='dipl0', disable=not self.progress):
            admm_step(self.state, cfg, reference, crop, self.timing)
            _log_record(self.state.history[-1])
        self.timing['total'] = time.perf_counter() - start

        u = crop_image(self.state.u, crop)
        if u.min() < 0 or u.max() > 1:
            logger.warning('u left [0, 1]: min=%g max=%g', u.min(), u.max())
        return u


def run(f, cfg, reference=None, progress=False, params=None):
    """
    Run DIP-l0 smoothing.

    Parameters
    ----------
    f: np.ndarray [shape=(h, w, c)]
        Normalized input image.

    cfg: RunConfig

    reference: np.ndarray or None
        Clean image for PSNR/SSIM in the history.

    progress: bool

    params: ParamStore or None
        Weights and Adam state to resume from.

    Returns
    -------
    u: np.ndarray [shape=(h, w, c)]
        :math:`u^T`; `f` itself when ``cfg.T == 0``.

    history: list of IterationRecord
        One record per outer iteration.

    See Also
    --------
    DipL0
    """
    model = DipL0(cfg, progress=progress, params=params)
    u = model.smooth(f, reference)
    return u, model.history
