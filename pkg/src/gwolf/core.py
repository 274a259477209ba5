"""Grey wolf optimizer: coefficient schedule, position update, leader
replacement, and the full optimization loop.

Reproducibility: all randomness is drawn from counter-based streams keyed by
(seed, agent, iteration), so results are identical for any worker count and
across repeated runs. The per-update draw order is fixed (see gwolf.rng).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng


class EvaluationError(RuntimeError):
    """Objective returned a non-finite value; carries the offending position."""

    def __init__(self, position, value):
        self.position = np.array(position, dtype=np.float64)
        self.value = value
        super().__init__(f"objective evaluated to {value} at {self.position}")


def schedule_a(t, T):
    """Exploration coefficient a(t) = 2(1 - t/T), linear from 2 down to 0."""
    if T < 1:
        raise ValueError(f"total iterations must be positive, got {T}")
    if not 1 <= t <= T:
        raise ValueError(f"iteration {t} outside 1..{T}")
    return 2.0 * (1.0 - t / T)


@dataclass(frozen=True)
class LeaderTriple:
    """Best three positions and their fitness, ordered f1 <= f2 <= f3."""

    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    f1: float
    f2: float
    f3: float

    def __post_init__(self):
        if not (self.f1 <= self.f2 <= self.f3):
            raise ValueError(
                f"leader fitness out of order: {self.f1}, {self.f2}, {self.f3}")
        if not (len(self.p1) == len(self.p2) == len(self.p3)):
            raise ValueError("leader positions must share one dimension")

    @property
    def dim(self):
        return len(self.p1)

    def stacked(self):
        """(3, D) matrix of the leader positions."""
        return np.stack([np.asarray(self.p1, dtype=np.float64),
                         np.asarray(self.p2, dtype=np.float64),
                         np.asarray(self.p3, dtype=np.float64)])


def update_leaders(leaders, candidate, fitness):
    """Three-way replacement cascade; the candidate fills at most one slot.

    Slot 1 requires a strict improvement; a tie with f1 (or f2) falls through
    to the next slot; a tie with f3 leaves the triple unchanged.
    """
    fitness = float(fitness)
    candidate = np.array(candidate, dtype=np.float64)
    if fitness < leaders.f1:
        return LeaderTriple(candidate, leaders.p2, leaders.p3,
                            fitness, leaders.f2, leaders.f3)
    if fitness < leaders.f2:
        return LeaderTriple(leaders.p1, candidate, leaders.p3,
                            leaders.f1, fitness, leaders.f3)
    if fitness < leaders.f3:
        return LeaderTriple(leaders.p1, leaders.p2, candidate,
                            leaders.f1, leaders.f2, fitness)
    return leaders


def update_agent(x, leaders, a, stream):
    """One position update: average of the three guided steps.

    Draws 6 uniforms per dimension from ``stream`` in the fixed order
    (dimension ascending; leaders k = 1..3 within a dimension; A before C)
    and returns (1/3) sum_k (p_k + A_k |C_k p_k - x|) componentwise.
    """
    if not 0.0 <= a <= 2.0:
        raise ValueError(f"coefficient a must lie in [0, 2], got {a}")
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    p = leaders.stacked()
    if p.shape[1] != d:
        raise ValueError(f"dimension mismatch: agent {d}, leaders {p.shape[1]}")
    u = stream.uniforms(6 * d).reshape(d, 3, 2)
    amp = a * (2.0 * u[:, :, 0] - 1.0)           # (D, 3)
    cof = 2.0 * u[:, :, 1]
    y = p.T + amp * np.abs(cof * p.T - x[:, None])
    return ((y[:, 0] + y[:, 1]) + y[:, 2]) / 3.0


def _update_block(X, p, a, seed, iteration, agent0):
    """Vectorized update of a contiguous agent block; matches update_agent."""
    n, d = X.shape
    agents = agent0 + np.arange(n)[:, None]
    blocks = np.arange(3 * d)[None, :]
    word1 = rng.purpose_word(rng.PURPOSE_UPDATE)
    d0, d1 = rng.uniform_pairs(seed, word1, agents, iteration, blocks)
    u = np.stack([d0, d1], axis=-1).reshape(n, d, 3, 2)
    amp = a * (2.0 * u[:, :, :, 0] - 1.0)        # (n, D, 3)
    cof = 2.0 * u[:, :, :, 1]
    pk = p.T[None, :, :]                          # (1, D, 3)
    y = pk + amp * np.abs(cof * pk - X[:, :, None])
    return ((y[:, :, 0] + y[:, :, 1]) + y[:, :, 2]) / 3.0


def _initial_positions(objective, n_agents, seed):
    d = objective.dim
    word1 = rng.purpose_word(rng.PURPOSE_INIT)
    nblocks = (d + 1) // 2
    agents = np.arange(n_agents)[:, None]
    blocks = np.arange(nblocks)[None, :]
    d0, d1 = rng.uniform_pairs(seed, word1, agents, 0, blocks)
    u = np.stack([d0, d1], axis=-1).reshape(n_agents, 2 * nblocks)[:, :d]
    return objective.lower + (objective.upper - objective.lower) * u


def _evaluate(objective, X):
    f = objective.evaluate_batch(X)
    bad = ~np.isfinite(f)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError(X[i], f[i])
    return f


@dataclass(frozen=True)
class GwoResult:
    """Run output: final best position/fitness and the per-iteration trace."""

    best_position: np.ndarray
    best_fitness: float
    initial_fitness: float
    trace: np.ndarray
    seed: int
    n_agents: int
    iterations: int


def run_gwo(objective, n_agents, iterations, seed, *, clamp=False, workers=1):
    """Run the optimizer loop and return the best leader.

    All agents move every iteration; the leader triple is refreshed once per
    iteration by applying the replacement cascade to each agent in index
    order. The best-fitness trace is non-increasing by construction.
    """
    if n_agents < 3:
        raise ValueError(f"need at least 3 agents, got {n_agents}")
    if iterations < 1:
        raise ValueError(f"iterations must be positive, got {iterations}")
    workers = max(1, int(workers))

    X = _initial_positions(objective, n_agents, seed)
    f = _evaluate(objective, X)
    order = np.argsort(f, kind="stable")
    leaders = LeaderTriple(X[order[0]].copy(), X[order[1]].copy(),
                           X[order[2]].copy(),
                           float(f[order[0]]), float(f[order[1]]),
                           float(f[order[2]]))
    initial_fitness = leaders.f1

    trace = np.empty(iterations)
    for t in range(1, iterations + 1):
        a = schedule_a(t, iterations)
        p = leaders.stacked()
        if workers == 1 or n_agents < 2 * workers:
            X = _update_block(X, p, a, seed, t, 0)
        else:
            bounds = np.linspace(0, n_agents, workers + 1).astype(int)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(
                    lambda se: _update_block(X[se[0]:se[1]], p, a, seed, t, se[0]),
                    zip(bounds[:-1], bounds[1:])))
            X = np.concatenate(parts, axis=0)
        if clamp:
            X = np.clip(X, objective.lower, objective.upper)
        f = _evaluate(objective, X)
        for i in range(n_agents):
            leaders = update_leaders(leaders, X[i], f[i])
        trace[t - 1] = leaders.f1

    return GwoResult(best_position=np.asarray(leaders.p1),
                     best_fitness=leaders.f1, initial_fitness=initial_fitness,
                     trace=trace, seed=int(seed), n_agents=int(n_agents),
                     iterations=int(iterations))
