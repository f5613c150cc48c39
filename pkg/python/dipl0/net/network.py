from collections import OrderedDict, namedtuple
from dataclasses import dataclass, field, asdict
import numpy as np

from dipl0.exceptions import StaleTapeError
from dipl0.type import LayerKindType, PrecisionType, get_enum
from dipl0.utils import check_image
from dipl0.net.layers import Conv2d, ChannelNorm, LeakyReLU, Sigmoid, Upsample2x, Concat

__all__ = [
    'NetSpec',
    'Layer',
    'ParamStore',
    'Tape',
    'LayerSchema',
    'layer_schema',
    'build_network',
    'make_input',
    'forward',
    'backward',
]

LayerSchema = namedtuple('LayerSchema', ['name', 'kind', 'shapes'])


@dataclass
class NetSpec:
    """
    Architecture of the skip encoder-decoder.

    Level ``i`` (0 = full resolution) has

    * skip branch: 1x1 conv to ``skip_channels[i]``, norm, nonlinearity
    * down branch: 3x3 conv stride 2 to ``channels_per_level[i]``, norm, nonlinearity,
      3x3 conv stride 1, norm, nonlinearity, then the next level (if any), then bilinear 2x upsampling
    * up path: norm on concat(skip, upsampled), 3x3 conv to ``channels_per_level[i]``,
      norm, nonlinearity, 1x1 conv, norm, nonlinearity

    followed by a 1x1 head conv to `output_channels` and logistic squashing.

    Parameters
    ----------
    input_channels: int
        Channels of the fixed random input.

    output_channels: int
        Channels of the target image (1 or 3).

    depth: int
        Number of down/up levels. Inputs must be multiples of ``2**depth``
        and at least ``2**(depth + 1)`` pixels on each side.

    channels_per_level: tuple of int

    skip_channels: tuple of int

    kernel_size: int

    negative_slope: float
        Slope of the leaky rectifier.

    norm_eps: float

    precision: PrecisionType or str
    """
    input_channels: int = 32
    output_channels: int = 3
    depth: int = 3
    channels_per_level: tuple = (16, 32, 64)
    skip_channels: tuple = (4, 4, 4)
    kernel_size: int = 3
    negative_slope: float = 0.2
    norm_eps: float = 1e-5
    precision: PrecisionType = PrecisionType.FLOAT64

    def __post_init__(self):
        self.precision = get_enum(PrecisionType, self.precision)
        self.channels_per_level = tuple(int(c) for c in self.channels_per_level)
        self.skip_channels = tuple(int(c) for c in self.skip_channels)
        if self.depth < 1:
            raise ValueError(f'depth={self.depth} must be >= 1')
        if len(self.channels_per_level) != self.depth or len(self.skip_channels) != self.depth:
            raise ValueError(f'channels_per_level={self.channels_per_level} and '
                             f'skip_channels={self.skip_channels} must both have depth={self.depth} entries')
        if min(self.channels_per_level) < 1 or min(self.skip_channels) < 1:
            raise ValueError('channel counts must be >= 1')
        if self.input_channels < 1:
            raise ValueError(f'input_channels={self.input_channels} must be >= 1')
        if self.output_channels not in (1, 3):
            raise ValueError(f'output_channels={self.output_channels} must be 1 or 3')
        if self.kernel_size % 2 != 1:
            raise ValueError(f'kernel_size={self.kernel_size} must be odd')

    @classmethod
    def full_size(cls, output_channels=3):
        """The full-size DIP skip network: 5 levels of 128 channels."""
        return cls(output_channels=output_channels, depth=5,
                   channels_per_level=(128,) * 5, skip_channels=(4,) * 5)

    @property
    def alignment(self):
        """Required divisor of the input height and width."""
        return 2 ** self.depth

    @property
    def dtype(self):
        return self.precision.dtype

    def to_dict(self):
        d = asdict(self)
        d['channels_per_level'] = list(self.channels_per_level)
        d['skip_channels'] = list(self.skip_channels)
        d['precision'] = self.precision.name.lower()
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class Layer:
    """
    One trainable layer: its weights and the Adam moments of each weight.
    """
    name: str
    kind: LayerKindType
    weights: dict
    adam_m: dict = field(default_factory=dict)
    adam_v: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, arr in self.weights.items():
            self.adam_m.setdefault(key, np.zeros_like(arr))
            self.adam_v.setdefault(key, np.zeros_like(arr))


class ParamStore(object):
    """
    Network weights :math:`\\theta` with Adam state, addressable per layer.

    Parameters
    ----------
    spec: NetSpec

    layers: list of Layer
    """

    def __init__(self, spec, layers, step_count=0):
        self.spec = spec
        self.layers = OrderedDict((layer.name, layer) for layer in layers)
        self.step_count = step_count

    def __getitem__(self, name):
        return self.layers[name]

    def __iter__(self):
        return iter(self.layers.values())

    def __len__(self):
        return len(self.layers)

    @property
    def num_params(self):
        return sum(arr.size for layer in self for arr in layer.weights.values())

    def weights(self, name):
        return self.layers[name].weights

    def zeros_like(self):
        """Zero gradients aligned with the store."""
        return {layer.name: {k: np.zeros_like(v) for k, v in layer.weights.items()} for layer in self}

    def copy(self):
        layers = [Layer(layer.name, layer.kind,
                        {k: v.copy() for k, v in layer.weights.items()},
                        {k: v.copy() for k, v in layer.adam_m.items()},
                        {k: v.copy() for k, v in layer.adam_v.items()})
                  for layer in self]
        return ParamStore(self.spec, layers, self.step_count)


_Node = namedtuple('_Node', ['op', 'layer', 'inputs', 'cache'])


class Tape(object):
    """
    Forward values recorded for reverse-mode differentiation.

    A tape is bound to the parameter state it was recorded with; once the
    parameters take an optimizer step the tape is stale.
    """

    def __init__(self, params):
        self.params = params
        self.step_count = params.step_count
        self.nodes = []

    def record(self, op, layer, inputs, cache):
        self.nodes.append(_Node(op, layer, inputs, cache))
        return len(self.nodes) - 1

    def check(self, params=None):
        params = self.params if params is None else params
        if params is not self.params or params.step_count != self.step_count:
            raise StaleTapeError(f'tape recorded at step {self.step_count}, '
                                 f'parameters are at step {params.step_count}')


def layer_schema(spec):
    """
    The ordered list of trainable layers of `spec`.

    Order: for each level from the outermost in, its skip branch then its
    down branch; then for each level from the innermost out, its up path;
    then the head.

    Returns
    -------
    out: list of LayerSchema
        ``(name, kind, {param: shape})`` per layer.
    """
    k = spec.kernel_size

    def conv(name, c_in, c_out, size):
        return LayerSchema(name, LayerKindType.CONV, {'weight': (c_out, c_in, size, size), 'bias': (c_out,)})

    def norm(name, c):
        return LayerSchema(name, LayerKindType.NORM, {'scale': (c,), 'shift': (c,)})

    out = []
    c_in = spec.input_channels
    for i in range(spec.depth):
        c, s = spec.channels_per_level[i], spec.skip_channels[i]
        out.extend([
            conv(f'skip{i}.conv', c_in, s, 1), norm(f'skip{i}.norm', s),
            conv(f'down{i}.conv1', c_in, c, k), norm(f'down{i}.norm1', c),
            conv(f'down{i}.conv2', c, c, k), norm(f'down{i}.norm2', c),
        ])
        c_in = c
    for i in reversed(range(spec.depth)):
        c, s = spec.channels_per_level[i], spec.skip_channels[i]
        deeper = spec.channels_per_level[i + 1] if i + 1 < spec.depth else c
        out.extend([
            norm(f'up{i}.norm0', s + deeper),
            conv(f'up{i}.conv1', s + deeper, c, k), norm(f'up{i}.norm1', c),
            conv(f'up{i}.conv2', c, c, 1), norm(f'up{i}.norm2', c),
        ])
    out.append(conv('head.conv', spec.channels_per_level[0], spec.output_channels, 1))
    return out


def build_network(spec, seed=0):
    """
    Initialize the weights of `spec`.

    Convolutions draw weight and bias from :math:`U(-1/\\sqrt{fan_{in}}, 1/\\sqrt{fan_{in}})`;
    norms start at scale 1, shift 0. Adam moments start at zero.

    Parameters
    ----------
    spec: NetSpec

    seed: int

    Returns
    -------
    out: ParamStore
    """
    rng = np.random.default_rng(seed)
    dtype = spec.dtype
    layers = []
    for entry in layer_schema(spec):
        if entry.kind is LayerKindType.CONV:
            c_out, c_in, kh, kw = entry.shapes['weight']
            bound = 1.0 / np.sqrt(c_in * kh * kw)
            weights = {
                'weight': rng.uniform(-bound, bound, size=entry.shapes['weight']).astype(dtype),
                'bias': rng.uniform(-bound, bound, size=entry.shapes['bias']).astype(dtype),
            }
        else:
            weights = {
                'scale': np.ones(entry.shapes['scale'], dtype=dtype),
                'shift': np.zeros(entry.shapes['shift'], dtype=dtype),
            }
        layers.append(Layer(entry.name, entry.kind, weights))
    return ParamStore(spec, layers)


def make_input(height, width, channels=32, seed=0, dtype=np.float64):
    """
    The fixed random network input, uniform on [0, 0.1].

    Parameters
    ----------
    height, width: int

    channels: int

    seed: int

    Returns
    -------
    out: np.ndarray [shape=(height, width, channels)]
    """
    if height < 1 or width < 1 or channels < 1:
        raise ValueError(f'dims must be positive, given ({height}, {width}, {channels})')
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 0.1, size=(height, width, channels)).astype(dtype)


class _Graph(object):
    # Runs ops, optionally recording them on a tape.

    def __init__(self, params, tape):
        self.params = params
        self.tape = tape
        spec = params.spec
        self.act = LeakyReLU(spec.negative_slope)
        self.norm = ChannelNorm(spec.norm_eps)
        self.conv3 = Conv2d(spec.kernel_size, 1)
        self.conv3_down = Conv2d(spec.kernel_size, 2)
        self.conv1 = Conv2d(1, 1)
        self.up = Upsample2x()
        self.cat = Concat()
        self.sigmoid = Sigmoid()

    def apply(self, op, inputs, layer=None):
        weights = self.params.weights(layer) if layer is not None else None
        out, cache = op.forward(tuple(v for v, _ in inputs), weights)
        node = -1
        if self.tape is not None:
            node = self.tape.record(op, layer, tuple(n for _, n in inputs), cache)
        return out, node

    def block(self, conv, x, conv_name, norm_name):
        h = self.apply(conv, [x], conv_name)
        h = self.apply(self.norm, [h], norm_name)
        return self.apply(self.act, [h])

    def level(self, i, x):
        depth = self.params.spec.depth
        s = self.block(self.conv1, x, f'skip{i}.conv', f'skip{i}.norm')
        d = self.block(self.conv3_down, x, f'down{i}.conv1', f'down{i}.norm1')
        d = self.block(self.conv3, d, f'down{i}.conv2', f'down{i}.norm2')
        if i + 1 < depth:
            d = self.level(i + 1, d)
        d = self.apply(self.up, [d])
        h = self.apply(self.cat, [s, d])
        h = self.apply(self.norm, [h], f'up{i}.norm0')
        h = self.block(self.conv3, h, f'up{i}.conv1', f'up{i}.norm1')
        return self.block(self.conv1, h, f'up{i}.conv2', f'up{i}.norm2')

    def run(self, x):
        h = self.level(0, (x, -1))
        h = self.apply(self.conv1, [h], 'head.conv')
        return self.apply(self.sigmoid, [h])


def forward(params, x, record=False):
    """
    Network output :math:`g_\\theta(x)`.

    Parameters
    ----------
    params: ParamStore

    x: np.ndarray [shape=(h, w, input_channels)]
        Fixed network input. `h` and `w` must be multiples of ``2**depth``.

    record: bool
        Whether to record a tape for `backward`.

    Returns
    -------
    output: np.ndarray [shape=(h, w, output_channels)]
        Values in (0, 1).

    tape: Tape or None
    """
    spec = params.spec
    check_image(x, channels=(spec.input_channels,))
    h, w, _ = x.shape
    align = spec.alignment
    if h % align or w % align:
        raise ValueError(f'Input shape ({h}, {w}) must be a multiple of 2**depth={align}')
    if min(h, w) < 2 * align:
        raise ValueError(f'Input shape ({h}, {w}) must be at least {2 * align} for depth={spec.depth}')

    tape = Tape(params) if record else None
    graph = _Graph(params, tape)
    out, _ = graph.run(np.ascontiguousarray(x.transpose(2, 0, 1), dtype=spec.dtype))
    return np.ascontiguousarray(out.transpose(1, 2, 0)), tape


def backward(tape, loss_grad_at_output):
    """
    Reverse-mode gradients of a scalar loss with respect to every weight.

    Parameters
    ----------
    tape: Tape
        Tape of a recorded `forward` whose parameters have not moved since.

    loss_grad_at_output: np.ndarray [shape=(h, w, output_channels)]
        Derivative of the loss with respect to the network output.

    Returns
    -------
    out: dict
        ``{layer_name: {param_name: gradient}}`` aligned with the ParamStore.
    """
    if tape is None:
        raise StaleTapeError('forward was not recorded')
    tape.check()
    params = tape.params
    grads = params.zeros_like()

    node_grads = {len(tape.nodes) - 1: np.ascontiguousarray(
        np.asarray(loss_grad_at_output, dtype=params.spec.dtype).transpose(2, 0, 1))}
    for idx in range(len(tape.nodes) - 1, -1, -1):
        g = node_grads.pop(idx, None)
        if g is None:
            continue
        node = tape.nodes[idx]
        weights = params.weights(node.layer) if node.layer is not None else None
        input_grads, weight_grads = node.op.backward(node.cache, g, weights)
        for key, wg in weight_grads.items():
            grads[node.layer][key] += wg
        for parent, ig in zip(node.inputs, input_grads):
            if parent < 0:
                continue
            if parent in node_grads:
                node_grads[parent] = node_grads[parent] + ig
            else:
                node_grads[parent] = ig
    return grads
