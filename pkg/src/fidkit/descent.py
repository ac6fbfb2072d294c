"""Gradient descent on input samples against fixed target statistics.

Two experiments are supported. ``minimize`` starts from Gaussian noise and
drives the distance down ("adversarial noise"); ``maximize`` starts from
samples of the target distribution and drives it up ("adversarial examples").
Parameters live in an unconstrained space and are mapped into ``[0, 1]`` by a
squashing rule before encoding:

* ``sigmoid``: samples are ``sigmoid(z)``.
* ``clip``: ``z`` is projected back onto ``[0, 1]`` after every update.
* ``none``: samples are ``z``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError
from .gradients import fid_gradient, fid_value
from .linalg import gaussian_matrix, make_rng
from .stats import GaussianStats, as_features

__all__ = [
    "AttackConfig",
    "AttackRecord",
    "AttackTrace",
    "Encoder",
    "Mode",
    "Squash",
    "SyntheticTarget",
    "default_init",
    "default_problem",
    "encode",
    "run_attack",
    "sample_from_stats",
    "synthetic_target",
]


class Mode(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Squash(str, enum.Enum):
    SIGMOID = "sigmoid"
    CLIP = "clip"
    NONE = "none"


@dataclass(frozen=True, eq=False)
class Encoder:
    """Stand-in for a feature network: identity or a fixed random linear map."""

    input_dim: int
    output_dim: int
    weights: np.ndarray | None = None
    seed: int | None = None

    @classmethod
    def identity(cls, dim: int) -> Encoder:
        return cls(dim, dim)

    @classmethod
    def fixed_linear(cls, input_dim: int, output_dim: int, seed: int) -> Encoder:
        w = gaussian_matrix(make_rng(seed), output_dim, input_dim) / np.sqrt(input_dim)
        return cls(input_dim, output_dim, w, seed)

    @property
    def kind(self) -> str:
        return "identity" if self.weights is None else "linear"

    def pullback(self, grad_features: np.ndarray) -> np.ndarray:
        """Chain a feature-space gradient back to the input samples."""
        if self.weights is None:
            return grad_features
        return self.weights.T @ grad_features


def encode(e: Encoder, samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] != e.input_dim:
        raise DimensionError(f"encoder expects {e.input_dim} x m input, got shape {samples.shape}")
    if e.weights is None:
        return samples
    return e.weights @ samples


@dataclass(frozen=True)
class AttackConfig:
    mode: Mode = Mode.MINIMIZE
    steps: int = 500
    learning_rate: float = 10.0
    batch: int = 64
    squash: Squash = Squash.SIGMOID
    seed: int = 0
    eval_every: int = 10
    scale_loss: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "squash", Squash(self.squash))
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")
        if self.batch < 2:
            raise ValueError("batch must be >= 2")


@dataclass(frozen=True)
class AttackRecord:
    step: int
    train_fid: float
    val_fid: float


@dataclass
class AttackTrace:
    records: list[AttackRecord] = field(default_factory=list)
    final_samples: np.ndarray | None = None

    @property
    def steps(self) -> list[int]:
        return [r.step for r in self.records]

    @property
    def train(self) -> np.ndarray:
        return np.array([r.train_fid for r in self.records])

    @property
    def val(self) -> np.ndarray:
        return np.array([r.val_fid for r in self.records])


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _squash(z, kind: Squash):
    if kind is Squash.SIGMOID:
        return _sigmoid(z)
    return z


def _squash_grad(samples, kind: Squash):
    if kind is Squash.SIGMOID:
        return samples * (1.0 - samples)
    return 1.0


def run_attack(
    cfg: AttackConfig,
    e: Encoder,
    train_stats: GaussianStats,
    val_stats: GaussianStats,
    init: np.ndarray,
) -> AttackTrace:
    """Plain gradient descent (or ascent) on the pre-squash parameters.

    The distance is recorded at step 0, every ``eval_every`` steps and at the
    final step. With ``scale_loss`` the gradient is divided by the current
    distance, i.e. the step follows ``grad log F``.
    """
    z = as_features(init).astype(np.float64, copy=True)
    if z.shape[0] != e.input_dim:
        raise DimensionError(f"init has {z.shape[0]} rows, encoder expects p={e.input_dim}")
    if train_stats.d != e.output_dim or val_stats.d != e.output_dim:
        raise DimensionError(
            f"stats dimension (train d={train_stats.d}, val d={val_stats.d}) "
            f"does not match encoder output d={e.output_dim}"
        )
    if cfg.squash is Squash.CLIP:
        z = np.clip(z, 0.0, 1.0)
    sign = -1.0 if cfg.mode is Mode.MINIMIZE else 1.0
    trace = AttackTrace()

    for step in range(cfg.steps + 1):
        samples = _squash(z, cfg.squash)
        feats = encode(e, samples)
        record = step == cfg.steps or step % cfg.eval_every == 0
        if step == cfg.steps:
            train_fid = fid_value(feats, train_stats).total
        else:
            grad = fid_gradient(feats, train_stats)
            train_fid = grad.value.total
        if record:
            val_fid = fid_value(feats, val_stats).total
            if not (np.isfinite(train_fid) and np.isfinite(val_fid)):
                raise NumericalError(f"non-finite distance at step {step}")
            trace.records.append(AttackRecord(step, train_fid, val_fid))
        if step == cfg.steps:
            break
        g = e.pullback(grad.wrt_features) * _squash_grad(samples, cfg.squash)
        if cfg.scale_loss:
            g = g / max(train_fid, np.finfo(float).tiny)
        z = z + sign * cfg.learning_rate * g
        if cfg.squash is Squash.CLIP:
            z = np.clip(z, 0.0, 1.0)
        if not np.all(np.isfinite(z)):
            raise NumericalError(f"parameters became non-finite at step {step}")
    trace.final_samples = _squash(z, cfg.squash)
    return trace


@dataclass(frozen=True, eq=False)
class SyntheticTarget:
    """Seeded stand-in for a real dataset: correlated samples inside ``(0, 1)``."""

    dim: int
    mixing: np.ndarray
    offset: np.ndarray

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        z = gaussian_matrix(rng, self.dim, count)
        return _sigmoid(self.offset[:, None] + self.mixing @ z)


def synthetic_target(dim: int, seed: int = 0) -> SyntheticTarget:
    rng = make_rng(seed)
    mixing = gaussian_matrix(rng, dim, dim) / np.sqrt(dim)
    offset = rng.uniform(-1.5, 1.5, size=dim)
    return SyntheticTarget(dim, mixing, offset)


def default_problem(dim: int = 64, seed: int = 0, n_train: int = 4096, n_val: int = 1024, factor: bool = True):
    """Synthetic target plus train and held-out statistics drawn from it."""
    target = synthetic_target(dim, seed)
    rng = make_rng([seed, 4])
    train = GaussianStats.from_samples(target.sample(rng, n_train), factor=factor)
    val = GaussianStats.from_samples(target.sample(rng, n_val), factor=factor)
    return target, train, val


def sample_from_stats(stats: GaussianStats, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` columns from ``N(mu, Sigma)``."""
    if stats.is_factor:
        c = stats.sigma.values
        return stats.mu[:, None] + c @ gaussian_matrix(rng, c.shape[1], count)
    lam, vec = np.linalg.eigh(stats.dense)
    root = vec * np.sqrt(np.clip(lam, 0.0, None))
    return stats.mu[:, None] + root @ gaussian_matrix(rng, stats.d, count)


def default_init(cfg: AttackConfig, input_dim: int, target: SyntheticTarget | None = None) -> np.ndarray:
    """Noise for ``minimize``; draws from ``target`` for ``maximize``."""
    rng = make_rng(cfg.seed)
    if cfg.mode is Mode.MINIMIZE or target is None:
        return gaussian_matrix(rng, input_dim, cfg.batch)
    return target.sample(rng, cfg.batch)
