"""Dense-matrix GNN training: GCN and GraphSAGE layers with hand-written
reverse-mode gradients, softmax cross-entropy, Adam, and evaluation metrics.

Training is full-batch over the whole graph; determinism comes from the
seeded initializer and a fixed dropout stream.
"""

from __future__ import annotations

import hashlib
import json
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import psutil

from .mlgraph import MlGraph

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

_MAGIC = b"VKGCKPT1"
_VERSION = 1


class NumericError(RuntimeError):
    """Non-finite activations or diverged training."""


@dataclass(frozen=True)
class ModelConfig:
    model_kind: str = "gcn"  # "gcn" | "sage"
    num_layers: int = 1  # hidden layers between input and output
    hidden_dim: int = 16
    dropout: float = 0.0
    learning_rate: float = 0.01
    epochs: int = 100
    seed: int = 0
    early_stop_patience: int | None = None  # epochs without val-loss improvement

    def __post_init__(self):
        if self.model_kind not in ("gcn", "sage"):
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.hidden_dim < 1:
            raise ValueError("hidden_dim must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "num_layers": self.num_layers,
            "hidden_dim": self.hidden_dim,
            "dropout": self.dropout,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "seed": self.seed,
            "early_stop_patience": self.early_stop_patience,
        }


@dataclass
class ModelParams:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    m_weights: list[np.ndarray] = field(default_factory=list)
    v_weights: list[np.ndarray] = field(default_factory=list)
    m_biases: list[np.ndarray] = field(default_factory=list)
    v_biases: list[np.ndarray] = field(default_factory=list)
    step: int = 0

    def __post_init__(self):
        if not self.m_weights:
            self.m_weights = [np.zeros_like(w) for w in self.weights]
            self.v_weights = [np.zeros_like(w) for w in self.weights]
            self.m_biases = [np.zeros_like(b) for b in self.biases]
            self.v_biases = [np.zeros_like(b) for b in self.biases]

    def copy(self) -> "ModelParams":
        return ModelParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            m_weights=[m.copy() for m in self.m_weights],
            v_weights=[v.copy() for v in self.v_weights],
            m_biases=[m.copy() for m in self.m_biases],
            v_biases=[v.copy() for v in self.v_biases],
            step=self.step,
        )


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class EpochEvent:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    rss_bytes: int

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
            "rss_bytes": self.rss_bytes,
        }


@dataclass
class TrainReport:
    train_loss: list[float]
    val_loss: list[float]
    val_accuracy: list[float]
    rss_bytes: list[int]
    wall_time_s: float
    params: ModelParams
    config: ModelConfig

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
            "rss_bytes": self.rss_bytes,
            "wall_time_s": self.wall_time_s,
            "epochs_run": len(self.train_loss),
            "config": self.config.to_dict(),
        }


@dataclass
class Metrics:
    accuracy: float
    precision: list[float]
    recall: list[float]
    f1: list[float]
    support: list[int]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: np.ndarray  # (C, C), rows = true class
    classes: list[str]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": [
                {
                    "class": name,
                    "precision": self.precision[i],
                    "recall": self.recall[i],
                    "f1": self.f1[i],
                    "support": self.support[i],
                }
                for i, name in enumerate(self.classes)
            ],
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall,
                      "f1": self.macro_f1},
            "weighted": {"precision": self.weighted_precision,
                         "recall": self.weighted_recall, "f1": self.weighted_f1},
            "confusion_matrix": self.confusion.tolist(),
            "classes": self.classes,
        }


# --- graph operators ----------------------------------------------------------


def gcn_adjacency(graph: MlGraph) -> np.ndarray:
    """Symmetrically normalized adjacency with self-loops: the adjacency gets
    a unit diagonal, then both sides are scaled by 1/sqrt(row sum)."""
    n = graph.num_nodes
    a = np.zeros((n, n))
    for (src, dst), w in zip(graph.edges, graph.edge_weights):
        a[dst, src] += w
    a += np.eye(n)
    degree = a.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degree)
    return a * inv_sqrt[:, None] * inv_sqrt[None, :]


def sage_mean_matrix(graph: MlGraph) -> np.ndarray:
    """Row v averages the features of v's in-neighbors (zero row if none)."""
    n = graph.num_nodes
    p = np.zeros((n, n))
    counts = np.zeros(n)
    for src, dst in graph.edges:
        p[dst, src] += 1.0
        counts[dst] += 1.0
    nonzero = counts > 0
    p[nonzero] /= counts[nonzero, None]
    return p


def init_params(config: ModelConfig, feature_dim: int, num_classes: int) -> ModelParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer, seeded."""
    rng = np.random.default_rng(config.seed)
    dims = [feature_dim] + [config.hidden_dim] * config.num_layers + [num_classes]
    weights = []
    biases = []
    for i in range(len(dims) - 1):
        fan_in = dims[i] * (2 if config.model_kind == "sage" else 1)
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, dims[i + 1])))
        biases.append(rng.uniform(-bound, bound, size=dims[i + 1]))
    return ModelParams(weights=weights, biases=biases)


@dataclass
class ForwardCache:
    layer_inputs: list[np.ndarray]  # H entering each layer
    propagated: list[np.ndarray]  # A_hat @ H (gcn) or [H | P @ H] (sage)
    pre_activations: list[np.ndarray]
    dropout_masks: list[np.ndarray | None]
    operator: np.ndarray  # A_hat or P


def _forward(
    graph: MlGraph,
    params: ModelParams,
    config: ModelConfig,
    training: bool,
    rng: np.random.Generator | None,
) -> tuple[np.ndarray, ForwardCache]:
    is_sage = config.model_kind == "sage"
    operator = sage_mean_matrix(graph) if is_sage else gcn_adjacency(graph)
    h = graph.node_features
    cache = ForwardCache([], [], [], [], operator)
    last = len(params.weights) - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        cache.layer_inputs.append(h)
        if is_sage:
            propagated = np.concatenate([h, operator @ h], axis=1)
        else:
            propagated = operator @ h
        cache.propagated.append(propagated)
        z = propagated @ w + b
        if not np.isfinite(z).all():
            raise NumericError(f"non-finite activation in layer {layer}")
        cache.pre_activations.append(z)
        if layer == last:
            cache.dropout_masks.append(None)
            h = z
        else:
            h = np.maximum(z, 0.0)
            if training and config.dropout > 0.0:
                if rng is None:
                    raise ValueError("training forward with dropout needs an rng")
                keep = (rng.random(h.shape) >= config.dropout)
                h = h * keep / (1.0 - config.dropout)
                cache.dropout_masks.append(keep)
            else:
                cache.dropout_masks.append(None)
    return h, cache


def gcn_forward(
    graph: MlGraph, params: ModelParams, config: ModelConfig,
    training: bool = False, rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    assert config.model_kind == "gcn"
    return _forward(graph, params, config, training, rng)


def sage_forward(
    graph: MlGraph, params: ModelParams, config: ModelConfig,
    training: bool = False, rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    assert config.model_kind == "sage"
    return _forward(graph, params, config, training, rng)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def masked_loss(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    """Mean softmax cross-entropy over the masked nodes."""
    if not mask.any():
        raise ValueError("loss mask selects no nodes")
    rows = logits[mask]
    targets = labels[mask]
    shifted = rows - rows.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(targets)), targets].mean())


def loss_and_grad(
    logits: np.ndarray,
    labels: np.ndarray,
    mask: np.ndarray,
    cache: ForwardCache,
    params: ModelParams,
    config: ModelConfig,
) -> tuple[float, Gradients]:
    """Backpropagate the masked cross-entropy through the cached forward."""
    loss = masked_loss(logits, labels, mask)
    n_masked = int(mask.sum())

    probs = softmax(logits)
    grad_z = np.zeros_like(logits)
    grad_z[mask] = probs[mask]
    grad_z[mask, labels[mask]] -= 1.0
    grad_z /= n_masked

    is_sage = config.model_kind == "sage"
    operator = cache.operator
    grad_weights: list[np.ndarray] = [np.empty(0)] * len(params.weights)
    grad_biases: list[np.ndarray] = [np.empty(0)] * len(params.biases)

    for layer in range(len(params.weights) - 1, -1, -1):
        grad_weights[layer] = cache.propagated[layer].T @ grad_z
        grad_biases[layer] = grad_z.sum(axis=0)
        if layer == 0:
            break
        grad_prop = grad_z @ params.weights[layer].T
        if is_sage:
            f_in = cache.layer_inputs[layer].shape[1]
            grad_h = grad_prop[:, :f_in] + operator.T @ grad_prop[:, f_in:]
        else:
            grad_h = operator.T @ grad_prop
        keep = cache.dropout_masks[layer - 1]
        if keep is not None:
            grad_h = grad_h * keep / (1.0 - config.dropout)
        grad_z = grad_h * (cache.pre_activations[layer - 1] > 0.0)
    return loss, Gradients(weights=grad_weights, biases=grad_biases)


def adam_step(params: ModelParams, grads: Gradients, learning_rate: float) -> None:
    """In-place Adam update with bias correction."""
    params.step += 1
    t = params.step

    def update(value: np.ndarray, grad: np.ndarray, m: np.ndarray, v: np.ndarray) -> None:
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * grad
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * grad * grad
        m_hat = m / (1.0 - ADAM_BETA1**t)
        v_hat = v / (1.0 - ADAM_BETA2**t)
        value -= learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    for w, g, m, v in zip(params.weights, grads.weights, params.m_weights, params.v_weights):
        update(w, g, m, v)
    for b, g, m, v in zip(params.biases, grads.biases, params.m_biases, params.v_biases):
        update(b, g, m, v)


def train(
    graph: MlGraph,
    config: ModelConfig,
    telemetry: Callable[[EpochEvent], None] | None = None,
) -> TrainReport:
    """Full-batch training loop; one telemetry event per epoch."""
    if not graph.train_mask.any() or not graph.val_mask.any():
        raise ValueError("train and val masks must be non-empty")
    started = time.perf_counter()
    params = init_params(config, graph.node_features.shape[1], graph.num_classes)
    dropout_rng = np.random.default_rng(config.seed + 1)
    process = psutil.Process()

    report = TrainReport([], [], [], [], 0.0, params, config)
    best_val = np.inf
    stale = 0
    for epoch in range(config.epochs):
        logits, cache = _forward(graph, params, config, True, dropout_rng)
        loss, grads = loss_and_grad(logits, graph.labels, graph.train_mask, cache, params, config)
        if not np.isfinite(loss):
            raise NumericError(f"training diverged at epoch {epoch}")
        adam_step(params, grads, config.learning_rate)

        eval_logits, _ = _forward(graph, params, config, False, None)
        val_loss = masked_loss(eval_logits, graph.labels, graph.val_mask)
        val_pred = eval_logits[graph.val_mask].argmax(axis=1)
        val_acc = float((val_pred == graph.labels[graph.val_mask]).mean())

        event = EpochEvent(epoch, loss, val_loss, val_acc, process.memory_info().rss)
        report.train_loss.append(loss)
        report.val_loss.append(val_loss)
        report.val_accuracy.append(val_acc)
        report.rss_bytes.append(event.rss_bytes)
        if telemetry is not None:
            telemetry(event)

        if config.early_stop_patience is not None:
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                stale = 0
            else:
                stale += 1
                if stale >= config.early_stop_patience:
                    break
    report.wall_time_s = time.perf_counter() - started
    return report


def evaluate(
    params: ModelParams, graph: MlGraph, mask: np.ndarray, config: ModelConfig
) -> Metrics:
    """Argmax predictions on the masked nodes; all aggregates are derived
    from the confusion matrix (rows = true class)."""
    if not mask.any():
        raise ValueError("evaluation mask selects no nodes")
    logits, _ = _forward(graph, params, config, False, None)
    predictions = logits[mask].argmax(axis=1)
    return compute_metrics(graph.labels[mask], predictions, graph.num_classes,
                           graph.dictionaries.label_classes)


def compute_metrics(
    true: np.ndarray, predicted: np.ndarray, num_classes: int,
    class_names: list[str] | None = None,
) -> Metrics:
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    for t, p in zip(true, predicted):
        confusion[int(t), int(p)] += 1
    support = confusion.sum(axis=1)
    predicted_counts = confusion.sum(axis=0)
    diag = np.diag(confusion)

    precision = np.divide(diag, predicted_counts, out=np.zeros(num_classes),
                          where=predicted_counts > 0)
    recall = np.divide(diag, support, out=np.zeros(num_classes), where=support > 0)
    pr_sum = precision + recall
    f1 = np.divide(2 * precision * recall, pr_sum, out=np.zeros(num_classes),
                   where=pr_sum > 0)

    total = int(confusion.sum())
    weights = support / total if total else np.zeros(num_classes)
    names = class_names or [str(i) for i in range(num_classes)]
    return Metrics(
        accuracy=float(np.trace(confusion) / total) if total else 0.0,
        precision=precision.tolist(),
        recall=recall.tolist(),
        f1=f1.tolist(),
        support=support.tolist(),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        weighted_precision=float((precision * weights).sum()),
        weighted_recall=float((recall * weights).sum()),
        weighted_f1=float((f1 * weights).sum()),
        confusion=confusion,
        classes=names,
    )


# --- checkpoints ---------------------------------------------------------------


def save_checkpoint(path: str | Path, config: ModelConfig, params: ModelParams) -> None:
    header = {
        "config": config.to_dict(),
        "shapes": [list(w.shape) for w in params.weights],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    digest = hashlib.sha256()
    with open(path, "wb") as fh:
        def emit(data: bytes) -> None:
            digest.update(data)
            fh.write(data)

        emit(_MAGIC)
        emit(struct.pack("<I", _VERSION))
        emit(struct.pack("<I", len(header_bytes)))
        emit(header_bytes)
        for w, b in zip(params.weights, params.biases):
            emit(np.ascontiguousarray(w, dtype="<f8").tobytes())
            emit(np.ascontiguousarray(b, dtype="<f8").tobytes())
        fh.write(digest.digest())


def load_checkpoint(path: str | Path) -> tuple[ModelConfig, ModelParams]:
    raw = Path(path).read_bytes()
    payload, checksum = raw[:-32], raw[-32:]
    if hashlib.sha256(payload).digest() != checksum:
        raise NumericError("checkpoint checksum mismatch")
    if payload[: len(_MAGIC)] != _MAGIC:
        raise NumericError("not a model checkpoint")
    pos = len(_MAGIC)
    (version,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    if version != _VERSION:
        raise NumericError(f"unsupported checkpoint version {version}")
    (header_len,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    header = json.loads(payload[pos:pos + header_len].decode("utf-8"))
    pos += header_len
    config = ModelConfig(**header["config"])
    weights = []
    biases = []
    for shape in header["shapes"]:
        rows, cols = shape
        nbytes = rows * cols * 8
        weights.append(np.frombuffer(payload[pos:pos + nbytes], dtype="<f8").reshape(rows, cols).copy())
        pos += nbytes
        biases.append(np.frombuffer(payload[pos:pos + 8 * cols], dtype="<f8").copy())
        pos += 8 * cols
    return config, ModelParams(weights=weights, biases=biases)
