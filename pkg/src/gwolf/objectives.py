"""Benchmark objectives registered by name."""

from dataclasses import dataclass, field

import numpy as np


def _sphere(x):
    return np.sum(x * x, axis=1)


def _rastrigin(x):
    return 10.0 * x.shape[1] + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x),
                                      axis=1)


def _rosenbrock(x):
    return np.sum(100.0 * (x[:, 1:] - x[:, :-1] ** 2) ** 2
                  + (1.0 - x[:, :-1]) ** 2, axis=1)


# name -> (batch evaluator, symmetric bound)
_REGISTRY = {
    "sphere": (_sphere, 100.0),
    "rastrigin": (_rastrigin, 5.12),
    "rosenbrock": (_rosenbrock, 30.0),
}


@dataclass(frozen=True)
class Objective:
    """A minimization problem: deterministic evaluator plus box bounds."""

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    batch_fn: callable = field(repr=False)

    def evaluate(self, position):
        """Fitness of a single position vector."""
        x = np.asarray(position, dtype=np.float64).reshape(1, -1)
        return float(self.batch_fn(x)[0])

    def evaluate_batch(self, positions):
        """Fitness of each row of a (n, dim) position matrix."""
        return np.asarray(self.batch_fn(np.asarray(positions, dtype=np.float64)),
                          dtype=np.float64)


def make_objective(name, dim):
    """Look up a registered objective at the given dimension."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    try:
        fn, bound = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; known: {sorted(_REGISTRY)}") from None
    full = np.full(dim, float(bound))
    return Objective(name=name, dim=dim, lower=-full, upper=full, batch_fn=fn)


def objective_names():
    return sorted(_REGISTRY)
