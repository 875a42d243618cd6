"""
src/maxent.py — Conditional maximum-entropy classifier over string features.

Features are binary: a sample is a set of feature strings plus its label.
train() indexes the features that pass the count cutoff, builds a sparse
design matrix and minimizes the negated penalized log-likelihood

    -sum_i log p(y_i | x_i) + sum_{f,l} w[f,l]^2 / (2 sigma2)

with scipy's L-BFGS-B. predict_proba() sums the weight rows of the known
features (unseen strings are dropped) and applies a softmax.

Model files are versioned text: a header, the label list, the full feature
list in index order and the non-zero (feature, label, weight) triples, with
floats written by repr() so predictions survive a save/load bit-for-bit.
"""
import logging
import os
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.special import logsumexp

from src.config import DEFAULT_SETTINGS, SrlError
from src.labels import order_labels

logger = logging.getLogger(__name__)

MODEL_MAGIC = '# srl-pairs maxent model'
MODEL_VERSION = 1


class MaxEntError(SrlError):
    """Raised for invalid training input or inconsistent dimensions."""


class ModelFormatError(MaxEntError):
    """Raised when a model file is corrupted or has an unknown version."""


@dataclass(frozen=True)
class TrainConfig:
    sigma2: float = 1.0
    memory: int = 10
    max_iterations: int = 200
    tolerance: float = 1e-5
    cutoff: int = 1

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise MaxEntError(f"sigma2 must be positive, got {self.sigma2}")
        if self.memory < 1:
            raise MaxEntError(f"L-BFGS memory must be >= 1, got {self.memory}")

    @classmethod
    def from_settings(cls, settings):
        section = settings.get('maxent', DEFAULT_SETTINGS['maxent'])
        return cls(**section)


class FeatureIndex:
    """Feature string <-> dense id. Once frozen, unknown strings map to None."""

    def __init__(self, features=()):
        self._ids = {}
        self._strings = []
        self.frozen = False
        for f in features:
            self.add(f)

    def add(self, feature):
        if feature in self._ids:
            return self._ids[feature]
        if self.frozen:
            raise MaxEntError(f"feature index is frozen; cannot add {feature!r}")
        self._ids[feature] = len(self._strings)
        self._strings.append(feature)
        return self._ids[feature]

    def get(self, feature):
        return self._ids.get(feature)

    def freeze(self):
        self.frozen = True
        return self

    def __len__(self):
        return len(self._strings)

    def __contains__(self, feature):
        return feature in self._ids

    @property
    def strings(self):
        return tuple(self._strings)

    def ids(self, features):
        """Sorted unique ids of the known features."""
        return sorted({self._ids[f] for f in features if f in self._ids})


@dataclass
class SampleMatrix:
    X: sparse.csr_matrix
    y: np.ndarray
    n_labels: int

    @property
    def shape(self):
        return self.X.shape[1], self.n_labels


def compile_samples(samples, index, labels):
    """Design matrix over ``index`` (unknown features dropped) and label ids."""
    label_ids = {label: i for i, label in enumerate(labels)}
    rows, cols = [], []
    y = np.empty(len(samples), dtype=np.int64)
    for i, (features, label) in enumerate(samples):
        if label not in label_ids:
            raise MaxEntError(f"sample {i} has label {label!r} outside the label list")
        y[i] = label_ids[label]
        ids = index.ids(features)
        rows.extend([i] * len(ids))
        cols.extend(ids)
    data = np.ones(len(rows), dtype=np.float64)
    X = sparse.csr_matrix((data, (rows, cols)), shape=(len(samples), len(index)))
    return SampleMatrix(X, y, len(labels))


def objective_and_gradient(weights, data, sigma2):
    """Negated penalized log-likelihood and its gradient (same shape as ``weights``)."""
    n_features, n_labels = data.shape
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size != n_features * n_labels:
        raise MaxEntError(
            f"weights have {weights.size} entries, expected {n_features} x {n_labels}")
    W = weights.reshape(n_features, n_labels)
    scores = np.asarray(data.X @ W)
    log_z = logsumexp(scores, axis=1) if n_labels else np.zeros(len(data.y))
    rows = np.arange(len(data.y))
    nll = float(np.sum(log_z - scores[rows, data.y]))
    prior = float(np.sum(W * W)) / (2.0 * sigma2)
    expected = np.exp(scores - log_z[:, None])
    expected[rows, data.y] -= 1.0
    grad = np.asarray(data.X.T @ expected) + W / sigma2
    return nll + prior, grad.reshape(weights.shape)


@dataclass
class MaxEntModel:
    labels: tuple
    index: FeatureIndex
    weights: np.ndarray
    sigma2: float = 1.0
    iterations: int = 0
    objective: float = 0.0
    converged: bool = False
    provenance: str = ''
    _label_ids: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(len(self.index), len(self.labels))
        if not np.all(np.isfinite(self.weights)):
            raise MaxEntError("model weights must be finite")
        self._label_ids = {label: i for i, label in enumerate(self.labels)}

    def label_id(self, label):
        return self._label_ids.get(label)

    def scores(self, features):
        ids = self.index.ids(features)
        if not ids:
            return np.zeros(len(self.labels))
        return self.weights[ids].sum(axis=0)

    def distribution(self, features):
        return dict(zip(self.labels, predict_proba(self, features)))


def zero_model(labels, features=(), sigma2=1.0):
    """Untrained model: every distribution is uniform."""
    index = FeatureIndex(features).freeze()
    return MaxEntModel(tuple(labels), index, np.zeros((len(index), len(labels))), sigma2)


def predict_proba(model, features):
    if not model.labels:
        return np.zeros(0)
    scores = model.scores(features)
    return np.exp(scores - logsumexp(scores))


def _build_index(samples, cutoff):
    counts = Counter()
    order = []
    for features, _ in samples:
        for f in dict.fromkeys(features):
            if f not in counts:
                order.append(f)
            counts[f] += 1
    return FeatureIndex(f for f in order if counts[f] >= cutoff).freeze()


def train(samples, config=None, provenance='', labels=None):
    """
    Fit a model to ``samples``, a list of (feature-string collection, label) pairs.

    ``labels`` fixes the model's label list, usually a scheme's full inventory;
    labels absent from the samples are trained toward low probability and
    sample labels missing from it are appended. Without it the label list is
    the set of sample labels in inventory order. Training is deterministic
    for a fixed sample order and config.
    """
    config = config or TrainConfig()
    if not samples:
        raise MaxEntError("cannot train on an empty sample set")
    seen = order_labels(label for _, label in samples)
    if labels is None:
        labels = tuple(seen)
    else:
        labels = tuple(labels)
        extra = tuple(label for label in seen if label not in labels)
        if extra:
            logger.warning("Training labels outside the label list: %s", ', '.join(extra))
            labels += extra
    if len(labels) == 1:
        logger.warning("Only one label (%s) in the training data; the model will always predict it",
                       labels[0])
    index = _build_index(samples, config.cutoff)
    data = compile_samples(samples, index, labels)
    logger.info("Training on %d samples, %d features, %d labels",
                len(samples), len(index), len(labels))
    w0 = np.zeros(len(index) * len(labels))
    if config.max_iterations == 0 or w0.size == 0:
        objective, _ = objective_and_gradient(w0, data, config.sigma2)
        return MaxEntModel(labels, index, w0, config.sigma2, 0, objective, True, provenance)

    result = minimize(
        objective_and_gradient, w0, args=(data, config.sigma2), jac=True, method='L-BFGS-B',
        options={'maxcor': config.memory, 'maxiter': config.max_iterations, 'gtol': config.tolerance})
    if not result.success:
        logger.warning("L-BFGS stopped without converging: %s", result.message)
    logger.info("Finished after %d iterations, objective %.6f", result.nit, result.fun)
    return MaxEntModel(labels, index, result.x, config.sigma2, int(result.nit), float(result.fun),
                       bool(result.success), provenance)


def save_model(model, path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    lines = [
        MODEL_MAGIC,
        f"version\t{MODEL_VERSION}",
        f"sigma2\t{float(model.sigma2)!r}",
        f"iterations\t{model.iterations}",
        f"objective\t{float(model.objective)!r}",
        f"converged\t{'true' if model.converged else 'false'}",
        f"provenance\t{model.provenance}",
        f"labels\t{len(model.labels)}",
        *model.labels,
        f"features\t{len(model.index)}",
        *model.index.strings,
    ]
    nonzero = np.argwhere(model.weights != 0.0)
    lines.append(f"weights\t{len(nonzero)}")
    for f, l in nonzero:
        lines.append(f"{f}\t{l}\t{float(model.weights[f, l])!r}")
    with open(path, 'w', encoding='utf-8') as out:
        out.write('\n'.join(lines) + '\n')
    return path


class _Reader:
    def __init__(self, path):
        self.path = path
        with open(path, encoding='utf-8') as f:
            self.lines = f.read().split('\n')
        self.pos = 0

    def fail(self, message):
        raise ModelFormatError(f"{self.path}, line {self.pos}: {message}")

    def line(self):
        if self.pos >= len(self.lines):
            self.fail("unexpected end of file")
        self.pos += 1
        return self.lines[self.pos - 1]

    def field(self, name, convert=str):
        parts = self.line().split('\t', 1)
        if len(parts) != 2 or parts[0] != name:
            self.fail(f"expected field {name!r}")
        try:
            return convert(parts[1])
        except ValueError:
            self.fail(f"bad value for {name!r}: {parts[1]!r}")


def load_model(path):
    r = _Reader(path)
    if r.line() != MODEL_MAGIC:
        r.fail("not a model file")
    version = r.field('version', int)
    if version != MODEL_VERSION:
        r.fail(f"unsupported model version {version}")
    sigma2 = r.field('sigma2', float)
    iterations = r.field('iterations', int)
    objective = r.field('objective', float)
    converged = r.field('converged') == 'true'
    provenance = r.field('provenance')
    labels = [r.line() for _ in range(r.field('labels', int))]
    index = FeatureIndex(r.line() for _ in range(r.field('features', int))).freeze()
    weights = np.zeros((len(index), len(labels)))
    for _ in range(r.field('weights', int)):
        parts = r.line().split('\t')
        try:
            f, l, w = int(parts[0]), int(parts[1]), float(parts[2])
        except (ValueError, IndexError):
            r.fail(f"bad weight line {parts!r}")
        if not (0 <= f < len(index) and 0 <= l < len(labels)):
            r.fail(f"weight index out of range: feature {f}, label {l}")
        weights[f, l] = w
    try:
        return MaxEntModel(labels, index, weights, sigma2, iterations, objective, converged, provenance)
    except MaxEntError as e:
        r.fail(str(e))
