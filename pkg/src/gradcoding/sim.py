"""Distributed gradient descent simulation with straggler injection.

The pipeline: split the samples into k contiguous partitions, compute the
per-partition least-squares gradients at the current model, form each
worker's encoded result (the plain sum of its assigned partial gradients),
drop the stragglers drawn by the configured model, pick a decoding class
from whatever arrived, and step the model with the recovered gradient.
Every iteration also computes the unencoded direct sum as an oracle and
records the reconstruction error against it.

Workers run in-process; summation orders are fixed (ascending partition,
then ascending worker) so runs are bit-reproducible given (config, seed).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .decoder import StragglerScenario, recover_gradient, select_decoder
from .encoder import EncodingMatrix, build_encoding
from .params import derive_params


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, labels, and the contiguous partition boundaries."""

    features: np.ndarray   # (N, p)
    labels: np.ndarray     # (N,)
    offsets: np.ndarray    # (k + 1,), partition j = slice(offsets[j], offsets[j+1])

    @property
    def num_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_partitions(self) -> int:
        return len(self.offsets) - 1

    def partition(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.offsets[j], self.offsets[j + 1]
        return self.features[lo:hi], self.labels[lo:hi]

    def partition_of(self, sample: int) -> int:
        return int(np.searchsorted(self.offsets, sample, side="right") - 1)


def partition_dataset(features: np.ndarray, labels: np.ndarray, k: int) -> Dataset:
    """Contiguous balanced split into k partitions; sizes differ by at most one."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n_samples = features.shape[0]
    if labels.shape[0] != n_samples:
        raise ValueError(f"{n_samples} samples but {labels.shape[0]} labels")
    if k <= 0 or n_samples < k:
        raise ValueError(f"need at least k={k} samples, got {n_samples}")
    base, extra = divmod(n_samples, k)
    sizes = [base + 1 if j < extra else base for j in range(k)]
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    return Dataset(features=features, labels=labels, offsets=offsets)


def synthetic_dataset(num_samples: int, dim: int, k: int, seed,
                      noise_std: float = 0.0,
                      integer_valued: bool = False) -> tuple[Dataset, np.ndarray]:
    """Random regression data plus the generating model vector.

    Standard-normal features and model by default; ``integer_valued`` draws
    small integers (exact in double precision) and no label noise. ``seed``
    may be anything ``numpy.random.default_rng`` accepts, including a
    SeedSequence.
    """
    rng = np.random.default_rng(seed)
    if integer_valued:
        features = rng.integers(-3, 4, size=(num_samples, dim)).astype(np.float64)
        theta_true = rng.integers(-3, 4, size=dim).astype(np.float64)
        labels = features @ theta_true
    else:
        features = rng.standard_normal((num_samples, dim))
        theta_true = rng.standard_normal(dim)
        labels = features @ theta_true
        if noise_std:
            labels = labels + noise_std * rng.standard_normal(num_samples)
    return partition_dataset(features, labels, k), theta_true


def load_csv(path: str, k: int, has_header: bool = False) -> Dataset:
    """One sample per line: p feature columns then the label column."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1 if has_header else 0, ndmin=2)
    if raw.shape[1] < 2:
        raise ValueError("need at least one feature column and one label column")
    return partition_dataset(raw[:, :-1], raw[:, -1], k)


def partial_gradient(dataset: Dataset, j: int, theta: np.ndarray) -> np.ndarray:
    """Least-squares gradient restricted to partition j: sum 2 x (x.theta - y)."""
    x, y = dataset.partition(j)
    if theta.shape[0] != dataset.dim:
        raise ValueError(f"model has dim {theta.shape[0]}, data has {dataset.dim}")
    return 2.0 * (x.T @ (x @ theta - y))


def partial_gradients(dataset: Dataset, theta: np.ndarray) -> np.ndarray:
    """All k partial gradients, one row per partition."""
    return np.stack([partial_gradient(dataset, j, theta)
                     for j in range(dataset.num_partitions)])


def direct_gradient(grads: np.ndarray) -> np.ndarray:
    """Unencoded oracle: the partial gradients summed in ascending partition order."""
    total = grads[0].copy()
    for j in range(1, grads.shape[0]):
        total += grads[j]
    return total


def worker_compute(matrix: EncodingMatrix, worker: int, grads: np.ndarray) -> np.ndarray:
    """One worker's encoded result: its assigned rows summed in ascending order."""
    row = matrix.rows[worker]
    total = grads[row[0]].copy()
    for j in row[1:]:
        total += grads[j]
    return total


def squared_loss(dataset: Dataset, theta: np.ndarray) -> float:
    residual = dataset.features @ theta - dataset.labels
    return float(residual @ residual)


# --- straggler models ---------------------------------------------------

class StragglerModel:
    """Draws the straggler set for one iteration; always exactly s workers."""

    def draw(self, rng: np.random.Generator, matrix: EncodingMatrix) -> tuple[int, ...]:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedStragglers(StragglerModel):
    workers: tuple[int, ...]

    def draw(self, rng, matrix):
        p = matrix.params
        chosen = tuple(sorted(set(self.workers)))
        if len(chosen) != p.s or any(not 0 <= w < p.n for w in chosen):
            raise ValueError(f"fixed straggler set must be {p.s} distinct workers in 0..{p.n - 1}")
        return chosen

    def describe(self):
        return {"kind": "fixed", "workers": list(self.workers)}


@dataclass(frozen=True)
class UniformStragglers(StragglerModel):
    def draw(self, rng, matrix):
        p = matrix.params
        return tuple(sorted(rng.choice(p.n, size=p.s, replace=False).tolist()))

    def describe(self):
        return {"kind": "uniform"}


@dataclass(frozen=True)
class DelayRace(StragglerModel):
    """Per-worker finish time = unit_time * load + exponential noise; slowest s lose."""

    unit_time: float = 1.0
    noise_scale: float = 0.5

    def draw(self, rng, matrix):
        p = matrix.params
        times = self.unit_time * np.asarray(matrix.loads(), dtype=np.float64)
        times = times + rng.exponential(self.noise_scale, size=p.n)
        slowest_first = np.argsort(-times, kind="stable")
        return tuple(sorted(slowest_first[: p.s].tolist()))

    def describe(self):
        return {"kind": "race", "unit_time": self.unit_time, "noise_scale": self.noise_scale}


def parse_straggler_model(text: str) -> StragglerModel:
    """Parse CLI syntax: 'uniform', 'race[:unit,noise]', or 'fixed:i,j,k'."""
    kind, _, rest = text.partition(":")
    if kind == "uniform":
        return UniformStragglers()
    if kind == "race":
        if rest:
            unit, noise = (float(v) for v in rest.split(","))
            return DelayRace(unit_time=unit, noise_scale=noise)
        return DelayRace()
    if kind == "fixed":
        workers = tuple(int(v) for v in rest.split(",")) if rest else ()
        return FixedStragglers(workers=workers)
    raise ValueError(f"unknown straggler model {text!r}")


# --- descent driver ------------------------------------------------------

def theta_digest(theta: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(theta).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    selected_class: int | None       # None on uncoded oracle runs
    stragglers: tuple[int, ...]
    recon_abs_err: float
    recon_rel_err: float
    loss: float                      # loss at the model the step was taken from
    theta_hash: str                  # digest of the post-step model

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration, "class": self.selected_class,
            "stragglers": list(self.stragglers), "recon_abs_err": self.recon_abs_err,
            "recon_rel_err": self.recon_rel_err, "loss": self.loss,
            "theta_hash": self.theta_hash,
        }


@dataclass(frozen=True)
class SimConfig:
    n: int
    s: int
    iterations: int
    learning_rate: float
    seed: int = 0
    straggler_model: StragglerModel = UniformStragglers()
    data_path: str | None = None
    has_header: bool = False
    synthetic_samples: int | None = None
    synthetic_dim: int | None = None
    noise_std: float = 0.0
    integer_data: bool = False
    coded: bool = True

    def resolved(self) -> dict:
        return {
            "n": self.n, "s": self.s, "iterations": self.iterations,
            "learning_rate": self.learning_rate, "seed": self.seed,
            "straggler_model": self.straggler_model.describe(),
            "data_path": self.data_path, "has_header": self.has_header,
            "synthetic_samples": self.synthetic_samples,
            "synthetic_dim": self.synthetic_dim, "noise_std": self.noise_std,
            "integer_data": self.integer_data, "coded": self.coded,
        }


@dataclass
class RunLog:
    config: dict
    seed: int
    records: list[IterationRecord] = field(default_factory=list)
    final_loss: float = 0.0
    final_theta: np.ndarray | None = None

    def to_jsonl(self) -> str:
        lines = [json.dumps({"config": self.config}, sort_keys=True)]
        lines += [json.dumps(rec.as_dict(), sort_keys=True) for rec in self.records]
        lines.append(json.dumps(
            {"final_loss": self.final_loss,
             "final_theta_hash": theta_digest(self.final_theta)},
            sort_keys=True,
        ))
        return "\n".join(lines) + "\n"

    def losses(self) -> list[float]:
        return [rec.loss for rec in self.records]


def run_iteration(matrix: EncodingMatrix, dataset: Dataset, theta: np.ndarray,
                  learning_rate: float, model: StragglerModel,
                  rng: np.random.Generator, iteration: int = 0,
                  coded: bool = True) -> tuple[np.ndarray, IterationRecord]:
    """One descent step under straggler injection.

    Draws the straggler set, computes the received workers' encoded sums,
    decodes, and steps the model with the recovered gradient (or the direct
    oracle when ``coded`` is false). Late results are discarded.
    """
    p = matrix.params
    grads = partial_gradients(dataset, theta)
    loss = squared_loss(dataset, theta)
    stragglers = model.draw(rng, matrix)
    scenario = StragglerScenario.from_stragglers(p.n, stragglers)

    encoded = {w: worker_compute(matrix, w, grads) for w in sorted(scenario.index_set)}
    vector = select_decoder(p, scenario)
    recovered = recover_gradient(vector, encoded)
    oracle = direct_gradient(grads)

    abs_err = float(np.max(np.abs(recovered - oracle)))
    scale = float(np.max(np.abs(oracle)))
    rel_err = abs_err / scale if scale > 0.0 else (0.0 if abs_err == 0.0 else float("inf"))

    step = recovered if coded else oracle
    theta_next = theta - learning_rate * step
    record = IterationRecord(
        iteration=iteration,
        selected_class=vector.class_index if coded else None,
        stragglers=stragglers, recon_abs_err=abs_err, recon_rel_err=rel_err,
        loss=loss, theta_hash=theta_digest(theta_next),
    )
    return theta_next, record


def build_dataset(config: SimConfig, data_seed) -> Dataset:
    if config.data_path is not None:
        return load_csv(config.data_path, config.n, has_header=config.has_header)
    if config.synthetic_samples is None or config.synthetic_dim is None:
        raise ValueError("config needs either data_path or synthetic_samples/dim")
    dataset, _ = synthetic_dataset(
        config.synthetic_samples, config.synthetic_dim, config.n, data_seed,
        noise_std=config.noise_std, integer_valued=config.integer_data,
    )
    return dataset


def run_descent(config: SimConfig,
                theta0: np.ndarray | None = None) -> RunLog:
    """Full gradient descent run; reproducible given (config, seed).

    The master seed is split once: child 0 feeds the synthetic data
    generator, child 1 the straggler model.
    """
    if config.iterations < 0:
        raise ValueError("iterations must be nonnegative")
    params = derive_params(config.n, config.s)
    matrix = build_encoding(params)
    data_seed, model_seed = np.random.SeedSequence(config.seed).spawn(2)
    dataset = build_dataset(config, data_seed)
    rng = np.random.default_rng(model_seed)

    theta = np.zeros(dataset.dim) if theta0 is None else np.array(theta0, dtype=np.float64)
    log = RunLog(config=config.resolved(), seed=config.seed)
    for it in range(config.iterations):
        theta, record = run_iteration(
            matrix, dataset, theta, config.learning_rate,
            config.straggler_model, rng, iteration=it, coded=config.coded,
        )
        log.records.append(record)
    log.final_loss = squared_loss(dataset, theta)
    log.final_theta = theta
    return log
