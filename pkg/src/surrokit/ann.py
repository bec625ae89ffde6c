"""Single-hidden-layer tanh network and its damped least-squares trainer.

The network computes

    out(x) = b_out + sum_j wout_j * tanh(slope * (W[j] . x + b_j))

and is trained as a nonlinear least-squares problem: Levenberg-Marquardt
steps on the full residual vector, damping multiplied up on rejected
steps and down on accepted ones. A held-out slice of the training data
picks the snapshot that generalizes best.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyVectors,
    LengthMismatch,
    NonFiniteLoss,
    TooFewSamples,
    check_format_version,
)

# Above this many Jacobian entries (params * samples) the trainer drops
# to plain gradient descent instead of forming the normal equations.
LM_MAX_JACOBIAN_ENTRIES = int(1e7)

FORMAT_VERSION = "1"


@dataclass
class NetworkTopology:
    """Weights and shape of one trained (or untrained) network."""

    input_dim: int
    hidden_units: int
    slope: float
    weights_hidden: np.ndarray  # (hidden, input_dim)
    bias_hidden: np.ndarray     # (hidden,)
    weights_out: np.ndarray     # (hidden,)
    bias_out: float

    def __post_init__(self):
        self.weights_hidden = np.asarray(self.weights_hidden, dtype=float)
        self.bias_hidden = np.asarray(self.bias_hidden, dtype=float)
        self.weights_out = np.asarray(self.weights_out, dtype=float)
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if self.slope <= 0:
            raise ValueError("slope must be > 0")
        if self.weights_hidden.shape != (self.hidden_units, self.input_dim):
            raise DimensionMismatch(
                f"weights_hidden shape {self.weights_hidden.shape} != "
                f"({self.hidden_units}, {self.input_dim})"
            )
        if self.bias_hidden.shape != (self.hidden_units,):
            raise DimensionMismatch("bias_hidden shape mismatch")
        if self.weights_out.shape != (self.hidden_units,):
            raise DimensionMismatch("weights_out shape mismatch")
        for arr in (self.weights_hidden, self.bias_hidden, self.weights_out):
            if not np.isfinite(arr).all():
                raise ValueError("network weights must be finite")
        if not np.isfinite(self.bias_out):
            raise ValueError("network weights must be finite")

    @property
    def n_params(self) -> int:
        return self.hidden_units * (self.input_dim + 2) + 1

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "input_dim": self.input_dim,
            "hidden_units": self.hidden_units,
            "slope": self.slope,
            "weights_hidden": self.weights_hidden.tolist(),
            "bias_hidden": self.bias_hidden.tolist(),
            "weights_out": self.weights_out.tolist(),
            "bias_out": self.bias_out,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkTopology":
        check_format_version(d)
        return cls(
            input_dim=int(d["input_dim"]),
            hidden_units=int(d["hidden_units"]),
            slope=float(d["slope"]),
            weights_hidden=np.array(d["weights_hidden"], dtype=float),
            bias_hidden=np.array(d["bias_hidden"], dtype=float),
            weights_out=np.array(d["weights_out"], dtype=float),
            bias_out=float(d["bias_out"]),
        )


@dataclass
class TrainingConfig:
    max_epochs: int = 200
    damping_init: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    target_rmse: float = 0.0
    holdout_fraction: float = 0.2
    patience: int = 40
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not self.damping_up > 1.0:
            raise ValueError("damping_up must be > 1")
        if not 0.0 < self.damping_down < 1.0:
            raise ValueError("damping_down must be in (0, 1)")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must be in (0, 1)")


def forward(net: NetworkTopology, x) -> float:
    """Scalar network output at one input vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_dim,):
        raise DimensionMismatch(f"expected length-{net.input_dim} input, got {x.shape}")
    hidden = np.tanh(net.slope * (net.weights_hidden @ x + net.bias_hidden))
    return float(net.bias_out + net.weights_out @ hidden)


def forward_batch(net: NetworkTopology, X) -> np.ndarray:
    """Vectorized forward pass over an (m, input_dim) batch."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        return np.empty(0)
    if X.shape[1] != net.input_dim:
        raise DimensionMismatch(f"expected (m, {net.input_dim}) batch, got {X.shape}")
    hidden = np.tanh(net.slope * (X @ net.weights_hidden.T + net.bias_hidden))
    return net.bias_out + hidden @ net.weights_out


def rmse(predicted, actual) -> float:
    """Root mean square error between two equal-length vectors."""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.ndim != 1 or actual.ndim != 1:
        raise ValueError("rmse expects 1-D vectors")
    if predicted.shape != actual.shape:
        raise LengthMismatch(f"lengths differ: {predicted.shape} vs {actual.shape}")
    if predicted.size == 0:
        raise EmptyVectors("rmse of empty vectors is undefined")
    return float(np.sqrt(np.mean((actual - predicted) ** 2)))


# ---------------------------------------------------------------------------
# parameter packing: [weights_hidden.ravel(), bias_hidden, weights_out, bias_out]
# ---------------------------------------------------------------------------

def _pack(net: NetworkTopology) -> np.ndarray:
    return np.concatenate([
        net.weights_hidden.ravel(),
        net.bias_hidden,
        net.weights_out,
        [net.bias_out],
    ])


def _unpack(theta: np.ndarray, input_dim: int, hidden: int, slope: float) -> NetworkTopology:
    hw = hidden * input_dim
    return NetworkTopology(
        input_dim=input_dim,
        hidden_units=hidden,
        slope=slope,
        weights_hidden=theta[:hw].reshape(hidden, input_dim).copy(),
        bias_hidden=theta[hw:hw + hidden].copy(),
        weights_out=theta[hw + hidden:hw + 2 * hidden].copy(),
        bias_out=float(theta[-1]),
    )


def jacobian(net: NetworkTopology, X) -> np.ndarray:
    """Analytic Jacobian d out / d theta, one row per input row.

    Column order matches the internal parameter packing (hidden weights
    row-major, hidden biases, output weights, output bias). Verified
    against central finite differences by the test suite; the trainer
    builds its normal equations from this.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    m = X.shape[0]
    pre = X @ net.weights_hidden.T + net.bias_hidden     # (m, h)
    t = np.tanh(net.slope * pre)
    dt = net.slope * (1.0 - t**2)                        # d tanh(slope*pre) / d pre
    gate = net.weights_out * dt                          # (m, h)

    J = np.empty((m, net.n_params))
    hw = net.hidden_units * net.input_dim
    J[:, :hw] = (gate[:, :, None] * X[:, None, :]).reshape(m, hw)
    J[:, hw:hw + net.hidden_units] = gate
    J[:, hw + net.hidden_units:hw + 2 * net.hidden_units] = t
    J[:, -1] = 1.0
    return J


def _init_network(input_dim: int, hidden: int, slope: float, y_mean: float,
                  rng: np.random.Generator) -> NetworkTopology:
    # Hidden layer: uniform +-1/sqrt(fan_in). Output layer starts as the
    # constant predictor y_mean, so the first accepted step is a pure
    # least-squares fit of the output weights onto the random features
    # and a constant target is matched exactly at initialization.
    bound = 1.0 / np.sqrt(input_dim)
    return NetworkTopology(
        input_dim=input_dim,
        hidden_units=hidden,
        slope=slope,
        weights_hidden=rng.uniform(-bound, bound, size=(hidden, input_dim)),
        bias_hidden=rng.uniform(-bound, bound, size=hidden),
        weights_out=np.zeros(hidden),
        bias_out=float(y_mean),
    )


def train(X, y, hidden_units: int, cfg: TrainingConfig | None = None,
          slope: float = 1.0):
    """Fit a network to (X, y) and return (best network, history).

    The trainer splits off ``cfg.holdout_fraction`` of the rows for
    snapshot selection, runs Levenberg-Marquardt on the rest, and stops
    at ``cfg.max_epochs``, at ``cfg.target_rmse`` on the holdout, or
    after ``cfg.patience`` epochs without holdout improvement. History
    holds one entry per accepted step: training RMSE (non-increasing by
    construction) and holdout RMSE. Fixed (X, y, cfg) reproduce the same
    weights bit for bit.

    Networks whose Jacobian would exceed ``LM_MAX_JACOBIAN_ENTRIES``
    train by plain descent on the same loss instead.
    """
    cfg = cfg or TrainingConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if y.shape != (n,):
        raise LengthMismatch(f"y shape {y.shape} does not match {n} rows")
    if n < hidden_units:
        raise TooFewSamples(f"{n} samples < {hidden_units} hidden units")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteLoss("training data contains non-finite values")

    rng = np.random.default_rng(cfg.seed)
    net0 = _init_network(d, hidden_units, slope, float(y.mean()), rng)

    n_hold = min(max(1, int(round(cfg.holdout_fraction * n))), n - 1)
    perm = rng.permutation(n)
    hold_idx, train_idx = np.sort(perm[:n_hold]), np.sort(perm[n_hold:])
    Xtr, ytr = X[train_idx], y[train_idx]
    Xho, yho = X[hold_idx], y[hold_idx]

    theta = _pack(net0)
    use_lm = net0.n_params * Xtr.shape[0] <= LM_MAX_JACOBIAN_ENTRIES

    def predictions(th):
        return forward_batch(_unpack(th, d, hidden_units, slope), Xtr)

    def sse(th):
        r = predictions(th) - ytr
        return float(r @ r), r

    cur_sse, residual = sse(theta)
    if not np.isfinite(cur_sse):
        raise NonFiniteLoss("initial loss is non-finite")

    best_theta = theta.copy()
    best_hold = rmse(forward_batch(net0, Xho), yho)
    history = {"train_rmse": [], "holdout_rmse": []}
    damping = cfg.damping_init
    lr = 1e-2
    stale = 0

    for _ in range(cfg.max_epochs):
        accepted = False
        if use_lm:
            J = jacobian(_unpack(theta, d, hidden_units, slope), Xtr)
            g = J.T @ residual
            H = J.T @ J
            eye = np.eye(H.shape[0])
            for _attempt in range(60):
                try:
                    step = np.linalg.solve(H + damping * eye, -g)
                except np.linalg.LinAlgError:
                    damping *= cfg.damping_up
                    continue
                cand = theta + step
                cand_sse, cand_resid = sse(cand)
                if np.isfinite(cand_sse) and cand_sse < cur_sse:
                    theta, cur_sse, residual = cand, cand_sse, cand_resid
                    damping = max(damping * cfg.damping_down, 1e-14)
                    accepted = True
                    break
                damping *= cfg.damping_up
                if damping > 1e14:
                    break
        else:
            grad = _loss_gradient(theta, Xtr, ytr, d, hidden_units, slope)
            for _attempt in range(60):
                cand = theta - lr * grad
                cand_sse, cand_resid = sse(cand)
                if np.isfinite(cand_sse) and cand_sse < cur_sse:
                    theta, cur_sse, residual = cand, cand_sse, cand_resid
                    lr = min(lr * 1.25, 1e2)
                    accepted = True
                    break
                lr *= 0.5
                if lr < 1e-16:
                    break

        if not accepted:
            break  # no descent direction left at this damping scale

        train_rmse = float(np.sqrt(cur_sse / len(ytr)))
        hold_rmse = rmse(predictions_at(theta, Xho, d, hidden_units, slope), yho)
        history["train_rmse"].append(train_rmse)
        history["holdout_rmse"].append(hold_rmse)

        if hold_rmse < best_hold:
            best_hold = hold_rmse
            best_theta = theta.copy()
            stale = 0
        else:
            stale += 1
        if best_hold <= cfg.target_rmse or stale >= cfg.patience:
            break

    history = {k: np.array(v) for k, v in history.items()}
    return _unpack(best_theta, d, hidden_units, slope), history


def predictions_at(theta, X, input_dim, hidden, slope):
    return forward_batch(_unpack(np.asarray(theta), input_dim, hidden, slope), X)


def _loss_gradient(theta, X, y, input_dim, hidden, slope):
    """Gradient of sum of squared residuals without materializing the Jacobian."""
    net = _unpack(theta, input_dim, hidden, slope)
    pre = X @ net.weights_hidden.T + net.bias_hidden
    t = np.tanh(slope * pre)
    r = (net.bias_out + t @ net.weights_out) - y
    dt = slope * (1.0 - t**2)
    gate = (net.weights_out * dt) * r[:, None]           # (m, h)
    g_w = gate.T @ X                                     # (h, d)
    g_b = gate.sum(axis=0)
    g_wout = t.T @ r
    g_bout = r.sum()
    return 2.0 * np.concatenate([g_w.ravel(), g_b, g_wout, [g_bout]])
