"""Two-layer LSTM binary classifier written directly in numpy.

The network reads a (seq_len, vocab) one-hot matrix per word through two
stacked LSTM layers and maps the last hidden state of the second layer to
a sigmoid score. Training is full backpropagation through time with Adam
on mean binary cross-entropy. Everything runs in float64.
"""

from dataclasses import asdict, dataclass, field
import json

import numpy as np

from .encoder import SEQ_LEN, Scheme, encode_batch
from .errors import ModelFormatError, NumericError, SchemeMismatchError, ShapeError, SizingError

GATES = ("i", "f", "o", "g")
LOSS_EPS = 1e-7
FORMAT = "codemix-lid/lstm"
FORMAT_VERSION = 1

DEFAULT_HIDDEN = {Scheme.CHAR: (35, 25), Scheme.PHONETIC: (15, 40)}

_LO = np.nextafter(0.0, 1.0)
_HI = np.nextafter(1.0, 0.0)


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class NetworkConfig:
    scheme: Scheme = Scheme.CHAR
    seq_len: int = SEQ_LEN
    vocab_dim: int = None
    hidden: tuple = None
    epochs: int = 500
    batch_size: int = 1658
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    init_scale: float = 0.08
    seed: int = 0

    def __post_init__(self):
        self.scheme = Scheme(self.scheme)
        if self.vocab_dim is None:
            self.vocab_dim = self.scheme.vocab_dim
        self.hidden = tuple(int(h) for h in (self.hidden or DEFAULT_HIDDEN[self.scheme]))
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ValueError(f"need two positive hidden sizes, got {self.hidden}")
        if self.epochs < 1 or self.batch_size < 1 or self.seq_len < 1:
            raise ValueError("epochs, batch_size and seq_len must be positive")

    def to_dict(self):
        d = asdict(self)
        d["scheme"] = self.scheme.value
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def param_shapes(config):
    shapes = {}
    n_in = config.vocab_dim
    for k, h in enumerate(config.hidden, 1):
        for g in GATES:
            shapes[f"layer{k}.W_{g}"] = (h, n_in)
        for g in GATES:
            shapes[f"layer{k}.U_{g}"] = (h, h)
        for g in GATES:
            shapes[f"layer{k}.b_{g}"] = (h,)
        n_in = h
    shapes["head.w"] = (config.hidden[1],)
    shapes["head.b"] = (1,)
    return shapes


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step: int = 0


@dataclass
class LstmNetwork:
    config: NetworkConfig
    params: dict
    adam: AdamState = field(default_factory=AdamState)
    decision: dict = field(default_factory=dict)

    @classmethod
    def initialize(cls, config, rng=None):
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        a = config.init_scale
        params = {name: rng.uniform(-a, a, size=shape) for name, shape in param_shapes(config).items()}
        return cls(config, params)

    @classmethod
    def zeros(cls, config):
        return cls(config, {n: np.zeros(s) for n, s in param_shapes(config).items()})

    def copy(self):
        return LstmNetwork(self.config, {k: v.copy() for k, v in self.params.items()},
                           decision=dict(self.decision))

    def _stacked(self, k):
        p = self.params
        W = np.concatenate([p[f"layer{k}.W_{g}"] for g in GATES])
        U = np.concatenate([p[f"layer{k}.U_{g}"] for g in GATES])
        b = np.concatenate([p[f"layer{k}.b_{g}"] for g in GATES])
        return W, U, b

    def _check_input(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 2:
            X = X[None]
        want = (self.config.seq_len, self.config.vocab_dim)
        if X.ndim != 3 or X.shape[1:] != want:
            raise ShapeError(f"expected input of shape (batch, {want[0]}, {want[1]}), got {X.shape}")
        return X

    def forward(self, X, keep_cache=False):
        """Scores for a batch ``X`` of shape (batch, seq_len, vocab)."""
        X = self._check_input(X)
        H1, cache1 = _layer_forward(*self._stacked(1), np.ascontiguousarray(X.transpose(1, 0, 2)))
        H2, cache2 = _layer_forward(*self._stacked(2), H1)
        last = H2[-1]
        logit = last @ self.params["head.w"] + self.params["head.b"][0]
        s = sigmoid(logit)
        if keep_cache:
            return s, (X, cache1, cache2, last)
        return s

    def predict(self, X):
        return np.clip(self.forward(X), _LO, _HI)

    def loss(self, X, y):
        return float(np.mean(bce_loss(self.forward(X), np.asarray(y, dtype=float))))


# Layers work time-major: sequences are (T, B, features) so each step is a
# contiguous block.
def _layer_forward(W, U, b, X):
    T, B, _ = X.shape
    H = U.shape[1]
    Hs = np.zeros((T + 1, B, H))  # Hs[t + 1] is the output of step t
    Cs = np.zeros((T + 1, B, H))
    acts = (X.reshape(T * B, -1) @ W.T + b).reshape(T, B, 4 * H)
    UT = U.T
    for t in range(T):
        a = acts[t]
        a += Hs[t] @ UT
        a[:, :3 * H] = sigmoid(a[:, :3 * H])
        np.tanh(a[:, 3 * H:], out=a[:, 3 * H:])
        c = a[:, H:2 * H] * Cs[t] + a[:, :H] * a[:, 3 * H:]
        Cs[t + 1] = c
        Hs[t + 1] = a[:, 2 * H:3 * H] * np.tanh(c)
    return Hs[1:], (W, U, X, Hs, acts, Cs)


def _layer_backward(dHs, cache):
    W, U, X, Hs, acts, Cs = cache
    T, B, _ = dHs.shape
    H = U.shape[1]
    dZ = np.empty((T, B, 4 * H))
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    for t in reversed(range(T)):
        a = acts[t]
        i, f, o, g = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
        tc = np.tanh(Cs[t + 1])
        dh = dHs[t] + dh_next
        dc = dh * o * (1.0 - tc * tc) + dc_next
        dz = dZ[t]
        dz[:, :H] = dc * g * i * (1.0 - i)
        dz[:, H:2 * H] = dc * Cs[t] * f * (1.0 - f)
        dz[:, 2 * H:3 * H] = dh * tc * o * (1.0 - o)
        dz[:, 3 * H:] = dc * i * (1.0 - g * g)
        dc_next = dc * f
        dh_next = dz @ U
    flat = dZ.reshape(T * B, -1)
    dW = flat.T @ X.reshape(T * B, -1)
    dU = flat.T @ Hs[:-1].reshape(T * B, -1)
    db = flat.sum(axis=0)
    dX = (flat @ W).reshape(T, B, -1)
    return dX, dW, dU, db


def _split_gates(prefix, dW, dU, db, H, grads):
    for k, g in enumerate(GATES):
        rows = slice(k * H, (k + 1) * H)
        grads[f"{prefix}.W_{g}"] = dW[rows]
        grads[f"{prefix}.U_{g}"] = dU[rows]
        grads[f"{prefix}.b_{g}"] = db[rows]


def bce_loss(score, target):
    s = np.clip(score, LOSS_EPS, 1.0 - LOSS_EPS)
    return -(target * np.log(s) + (1.0 - target) * np.log(1.0 - s))


def backward(net, X, y):
    """Mean-over-batch BCE loss and its gradient for every parameter."""
    y = np.asarray(y, dtype=float)
    s, (X, cache1, cache2, last) = net.forward(X, keep_cache=True)
    if y.shape != s.shape:
        raise ShapeError(f"{len(y)} targets for a batch of {len(s)}")
    B = len(y)
    loss = float(np.mean(bce_loss(s, y)))
    # zero where the loss clamp is active, matching the clamped loss surface
    live = (s > LOSS_EPS) & (s < 1.0 - LOSS_EPS)
    dlogit = np.where(live, s - y, 0.0) / B

    grads = {"head.w": last.T @ dlogit, "head.b": np.array([dlogit.sum()])}
    dH2 = np.zeros((X.shape[1], B, net.config.hidden[1]))
    dH2[-1] = dlogit[:, None] * net.params["head.w"]
    dH1, dW2, dU2, db2 = _layer_backward(dH2, cache2)
    _, dW1, dU1, db1 = _layer_backward(dH1, cache1)
    _split_gates("layer2", dW2, dU2, db2, net.config.hidden[1], grads)
    _split_gates("layer1", dW1, dU1, db1, net.config.hidden[0], grads)

    for name in net.params:
        if not np.all(np.isfinite(grads[name])):
            raise NumericError(name, "non-finite gradient")
    if not np.isfinite(loss):
        raise NumericError("loss")
    return loss, {name: grads[name] for name in net.params}


def adam_step(net, grads):
    """One bias-corrected Adam update, applied in place; returns ``net``."""
    cfg, st = net.config, net.adam
    st.step += 1
    b1, b2 = cfg.beta1, cfg.beta2
    c1 = 1.0 - b1 ** st.step
    c2 = 1.0 - b2 ** st.step
    for name, g in grads.items():
        m = st.m.get(name)
        if m is None:
            m = st.m[name] = np.zeros_like(g)
            st.v[name] = np.zeros_like(g)
        v = st.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        net.params[name] -= cfg.lr * (m / c1) / (np.sqrt(v / c2) + cfg.epsilon)
    return net


@dataclass
class TrainResult:
    network: LstmNetwork
    loss_history: list
    dev_loss_history: list


def fit_arrays(config, X, y, X_dev=None, y_dev=None):
    """Train on pre-encoded arrays. Deterministic for a fixed ``config.seed``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(X) == 0:
        raise SizingError("training set is empty")
    rng = np.random.default_rng(config.seed)
    net = LstmNetwork.initialize(config, rng)
    history, dev_history = [], []
    n = len(X)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            loss, grads = backward(net, X[idx], y[idx])
            adam_step(net, grads)
            total += loss * len(idx)
        history.append(total / n)
        if X_dev is not None and len(X_dev):
            dev_history.append(net.loss(X_dev, y_dev))
    return TrainResult(net, history, dev_history)


def words_to_arrays(words, scheme, lib=None, seq_len=SEQ_LEN):
    X = encode_batch([lw.word for lw in words], scheme, lib, seq_len)
    y = np.array([lw.label.target for lw in words], dtype=float)
    return X, y


def train(config, train_words, dev_words=(), seed=None, lib=None):
    """Encode labelled words under ``config.scheme`` and train a network."""
    if seed is not None:
        config.seed = seed
    if not train_words:
        raise SizingError("training split is empty")
    X, y = words_to_arrays(train_words, config.scheme, lib, config.seq_len)
    X_dev = y_dev = None
    if dev_words:
        X_dev, y_dev = words_to_arrays(dev_words, config.scheme, lib, config.seq_len)
    return fit_arrays(config, X, y, X_dev, y_dev)


def score_words(net, words, lib=None):
    strs = [w.word if hasattr(w, "word") else w for w in words]
    if not strs:
        return np.zeros(0)
    return net.predict(encode_batch(strs, net.config.scheme, lib, net.config.seq_len))


def gradient_check(config=None, seed=0, step=1e-5, batch=4, init_scale=0.5):
    """Largest relative error between analytic and central-difference gradients.

    Inputs are dense Gaussian rows rather than one-hot so every weight
    receives a gradient large enough to compare against.
    """
    if config is None:
        config = NetworkConfig(scheme=Scheme.CHAR, seq_len=4, vocab_dim=5, hidden=(3, 2))
    rng = np.random.default_rng(seed)
    config = NetworkConfig(**{**config.to_dict(), "init_scale": init_scale, "seed": seed})
    net = LstmNetwork.initialize(config, rng)
    X = rng.normal(size=(batch, config.seq_len, config.vocab_dim))
    y = rng.integers(0, 2, size=batch).astype(float)
    _, grads = backward(net, X, y)
    worst = 0.0
    for name, p in net.params.items():
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            ix = it.multi_index
            orig = p[ix]
            p[ix] = orig + step
            up = net.loss(X, y)
            p[ix] = orig - step
            down = net.loss(X, y)
            p[ix] = orig
            num = (up - down) / (2 * step)
            ana = grads[name][ix]
            err = abs(ana - num) / max(abs(ana), abs(num), 1e-12)
            worst = max(worst, err)
    return worst


def to_dict(net):
    return {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "config": net.config.to_dict(),
        "params": {k: v.tolist() for k, v in net.params.items()},
        "decision": net.decision,
    }


def from_dict(d):
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise ModelFormatError("not an LSTM model file")
    if d.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {d.get('version')!r} (expected {FORMAT_VERSION})")
    try:
        config = NetworkConfig.from_dict(d["config"])
        shapes = param_shapes(config)
        params = {}
        for name, shape in shapes.items():
            arr = np.array(d["params"][name], dtype=float)
            if arr.shape != shape:
                raise ModelFormatError(f"{name}: shape {arr.shape} != {shape}")
            params[name] = arr
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    return LstmNetwork(config, params, decision=dict(d.get("decision") or {}))


def save_model(net, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(net), fh)
        fh.write("\n")


def load_model(path, scheme=None):
    """Load a network; ``scheme`` (if given) must match the stored one."""
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: corrupt model file ({exc})") from exc
    net = from_dict(d)
    if scheme is not None and Scheme(scheme) is not net.config.scheme:
        raise SchemeMismatchError(
            f"{path} is a {net.config.scheme.value} model, not {Scheme(scheme).value}")
    return net
