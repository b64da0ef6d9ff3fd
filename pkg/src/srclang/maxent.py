"""Conditional maximum-entropy classifier over grammar-production features.

Each (production, language) pair carries one weight.  A sample's score
for a language is the sum of the weights of the productions present in
it, probabilities are the softmax of the scores, and training maximizes
the log likelihood of the labels minus a Gaussian penalty sum(w^2)/(2
sigma^2) that keeps weights bounded.  The penalized objective is
strictly concave, so the optimum is unique and zero initialization is
only a choice of starting point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .grammar import Grammar
from .optimize import minimize_lbfgs

log = logging.getLogger(__name__)

DEFAULT_SIGMA = 10.0
DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITERS = 500


@dataclass
class MaxentModel:
    languages: tuple[str, ...]
    grammar: Grammar
    weights: np.ndarray  # shape (len(grammar), len(languages))
    sigma: float

    def __post_init__(self) -> None:
        if not self.languages:
            raise ValueError("model needs at least one language")
        if len(set(self.languages)) != len(self.languages):
            raise ValueError("duplicate language ids")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        expected = (len(self.grammar), len(self.languages))
        if self.weights.shape != expected:
            raise ValueError(f"weights shape {self.weights.shape} != {expected}")


@dataclass(frozen=True)
class Prediction:
    languages: tuple[str, ...]
    probabilities: np.ndarray

    @property
    def best(self) -> str:
        # argmax returns the first maximum, so ties go to model order.
        return self.languages[int(np.argmax(self.probabilities))]


@dataclass
class TrainingSet:
    """Feature ids and label index per sample; every sample weighs the same."""

    samples: list[tuple[np.ndarray, int]]
    languages: tuple[str, ...]


def make_training_set(
    feature_sets: Iterable[set[int]],
    labels: Iterable[str],
    languages: Sequence[str],
) -> TrainingSet:
    languages = tuple(languages)
    index = {language: j for j, language in enumerate(languages)}
    samples = []
    for features, label in zip(feature_sets, labels):
        ids = np.fromiter(sorted(features), dtype=np.int64, count=len(features))
        samples.append((ids, index[label]))
    return TrainingSet(samples=samples, languages=languages)


def _feature_ids(features: Iterable[int], size: int) -> np.ndarray:
    ids = np.unique(np.fromiter(features, dtype=np.int64))
    if ids.size and (ids[0] < 0 or ids[-1] >= size):
        raise ValueError("feature id outside grammar range (model/grammar mismatch)")
    return ids


def predict(features: Iterable[int], model: MaxentModel) -> Prediction:
    """Per-language probabilities for the given present-production ids."""
    ids = _feature_ids(features, len(model.grammar))
    if ids.size:
        scores = model.weights[ids].sum(axis=0)
    else:
        scores = np.zeros(len(model.languages))
    scores = scores - scores.max()
    exp = np.exp(scores)
    return Prediction(languages=model.languages, probabilities=exp / exp.sum())


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    return shifted - np.log(np.exp(shifted).sum())


def log_likelihood(data: TrainingSet, model: MaxentModel) -> float:
    """Unpenalized sum of log p(label | sample)."""
    weights = model.weights
    n_languages = len(model.languages)
    total = 0.0
    for ids, label in data.samples:
        scores = weights[ids].sum(axis=0) if ids.size else np.zeros(n_languages)
        total += float(_log_softmax(scores)[label])
    return total


def penalty(model: MaxentModel) -> float:
    return float((model.weights**2).sum()) / (2.0 * model.sigma**2)


def penalized_log_likelihood(data: TrainingSet, model: MaxentModel) -> float:
    return log_likelihood(data, model) - penalty(model)


def gradient(data: TrainingSet, model: MaxentModel) -> np.ndarray:
    """Gradient of the penalized log likelihood in the weights.

    Empirical feature counts minus model-expected counts, minus the
    penalty pull w / sigma^2.  Its zero is the constrained-model
    optimality condition shifted by the penalty term.
    """
    weights = model.weights
    n_languages = len(model.languages)
    grad = np.zeros_like(weights)
    for ids, label in data.samples:
        scores = weights[ids].sum(axis=0) if ids.size else np.zeros(n_languages)
        shifted = np.exp(scores - scores.max())
        probs = shifted / shifted.sum()
        delta = -probs
        delta[label] += 1.0
        if ids.size:
            grad[ids] += delta
    grad -= weights / model.sigma**2
    return grad


@dataclass
class TrainConfig:
    sigma: float = DEFAULT_SIGMA
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    history: int = 10


@dataclass
class TrainResult:
    model: MaxentModel
    converged: bool
    iterations: int
    # (iteration, penalized log likelihood, gradient max-norm)
    trace: list[tuple[int, float, float]] = field(default_factory=list)


def train(
    data: TrainingSet,
    grammar: Grammar,
    config: TrainConfig | None = None,
    progress: Callable[[str], None] | None = None,
) -> TrainResult:
    """Fit weights by maximizing the penalized log likelihood.

    Weights start at zero; the quasi-Newton driver guarantees the
    penalized likelihood never decreases across accepted iterates and
    stops once the gradient max-norm drops below ``config.tol``.  Hitting
    the iteration cap returns the best iterate with a warning rather
    than failing.
    """
    if config is None:
        config = TrainConfig()
    if not data.samples:
        raise ValueError("empty training set")
    if not data.languages:
        raise ValueError("no languages")

    shape = (len(grammar), len(data.languages))
    model = MaxentModel(
        languages=data.languages,
        grammar=grammar,
        weights=np.zeros(shape),
        sigma=config.sigma,
    )

    def negated(x: np.ndarray) -> tuple[float, np.ndarray]:
        model.weights = x.reshape(shape)
        value = penalized_log_likelihood(data, model)
        grad = gradient(data, model)
        return -value, -grad.ravel()

    def announce(iteration: int, value: float, gnorm: float) -> None:
        progress(f"iter {iteration:4d}  penalized-ll {-value:.6f}  grad-max {gnorm:.3e}")

    result = minimize_lbfgs(
        negated,
        np.zeros(shape[0] * shape[1]),
        gtol=config.tol,
        max_iters=config.max_iters,
        history=config.history,
        on_iteration=announce if progress is not None else None,
    )
    model.weights = result.x.reshape(shape)
    trace = [(it, -f, gnorm) for it, f, gnorm in result.trace]
    if not result.converged:
        log.warning("training stopped before tolerance: %s", result.message)
    return TrainResult(
        model=model,
        converged=result.converged,
        iterations=result.iterations,
        trace=trace,
    )
