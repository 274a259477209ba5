"""Reproducible Monte-Carlo harness for the distribution and stability claims.

Sampling is driven by counter-based streams keyed per (seed, purpose, unit),
so any chunking or worker count reproduces the same draws; moment
accumulators combine fixed-size chunks in index order, which keeps the
reported statistics bit-identical for any execution schedule.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend, rng
from .core import schedule_a
from .dist import KIND_CDF, GridCurve

CHUNK_TRIALS = 16384
RETAIN_CAP = 1 << 23  # doubles kept in memory before switching to streaming


def sample_leader_step(a, p, x, count, seed, *, dim=0):
    """i.i.d. draws of one guided step p + A|Cp - x|."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    word1 = rng.purpose_word(rng.PURPOSE_LEADER_STEP, dim)
    d0, d1 = rng.uniform_pairs(seed, word1, np.arange(count), 0, 0)
    amp = a * (2.0 * d0 - 1.0)
    cof = 2.0 * d1
    return p + amp * np.abs(cof * p - x)


def sample_update(a, p1, p2, p3, x, count, seed, *, dim=0):
    """i.i.d. draws of the updated coordinate (mean of three guided steps)."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    word1 = rng.purpose_word(rng.PURPOSE_UPDATE_CONSTANT, dim)
    units = np.arange(count)[:, None]
    blocks = np.arange(3)[None, :]
    d0, d1 = rng.uniform_pairs(seed, word1, units, 0, blocks)
    amp = a * (2.0 * d0 - 1.0)
    cof = 2.0 * d1
    p = np.array([p1, p2, p3])[None, :]
    y = p + amp * np.abs(cof * p - x)
    return ((y[:, 0] + y[:, 1]) + y[:, 2]) / 3.0


@dataclass(frozen=True)
class SimConfig:
    """Stagnation-run configuration: one frozen leader triple per run.

    The process is coordinatewise independent, so multi-dimensional studies
    run one config per dimension with distinct ``dim`` tags (this keeps the
    streams of a shared seed disjoint).
    """

    p: tuple
    T: int
    trials: int
    init_lo: float = -4.0
    init_hi: float = 4.0
    seed: int = 0
    mode: str = "stagnation"
    dim: int = 0

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 3:
            raise ValueError(f"p must hold exactly three leaders, got {len(p)}")
        object.__setattr__(self, "p", p)
        if self.T < 2:
            raise ValueError(f"need T >= 2, got {self.T}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not self.init_lo < self.init_hi:
            raise ValueError(
                f"need init_lo < init_hi, got {self.init_lo}, {self.init_hi}")
        if self.mode not in ("stagnation", "constant-x"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def center(self):
        return sum(self.p) / 3.0

    def to_dict(self):
        return {"p": list(self.p), "T": self.T, "trials": self.trials,
                "init_lo": self.init_lo, "init_hi": self.init_hi,
                "seed": self.seed, "mode": self.mode, "dim": self.dim}


@dataclass(frozen=True)
class StagnationStats:
    """Per-iteration statistics of a stagnation run (t = 1..T).

    ``central3``/``central4`` are moments about the analytic center
    sum(p)/3; ``var`` is the sample variance (about the empirical mean).
    ``samples`` holds the full (T, trials) matrix when it fits the retention
    cap, else None.
    """

    config: SimConfig
    t: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    se_mean: np.ndarray
    se_var: np.ndarray
    central3: np.ndarray
    central4: np.ndarray
    samples: np.ndarray = field(repr=False, default=None)

    def row(self, t):
        """Retained samples at iteration t (1-based)."""
        if self.samples is None:
            raise ValueError("samples were not retained for this run")
        return self.samples[t - 1]

    def to_csv(self, path):
        """Trace CSV with columns t, mean, var, se_mean, se_var."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("t,mean,var,se_mean,se_var\n")
            for i, t in enumerate(self.t):
                fh.write(f"{int(t)},{self.mean[i]:.17g},{self.var[i]:.17g},"
                         f"{self.se_mean[i]:.17g},{self.se_var[i]:.17g}\n")
        return path


def simulate_stagnation(cfg, *, workers=1, keep_samples=None):
    """Evolve the frozen-leader recursion for all trials and reduce stats.

    Trials are generated in fixed-size chunks (independent keyed streams per
    trial) and reduced in chunk order; ``workers`` only parallelizes chunk
    generation. ``keep_samples`` overrides the memory-cap heuristic for
    retaining the full sample matrix.
    """
    if cfg.mode != "stagnation":
        raise ValueError("simulate_stagnation requires mode='stagnation'")
    T, trials = cfg.T, cfg.trials
    if keep_samples is None:
        keep_samples = T * trials <= RETAIN_CAP
    if keep_samples and T * trials > 4 * RETAIN_CAP:
        raise MemoryError(
            f"refusing to retain {T * trials} samples; use streaming stats")
    p1, p2, p3 = cfg.p
    c = cfg.center
    a_sched = np.array([schedule_a(t, T) for t in range(1, T)])
    word1 = rng.purpose_word(rng.PURPOSE_STAGNATION, cfg.dim)
    k0, k1 = rng.split_seed(cfg.seed)

    starts = list(range(0, trials, CHUNK_TRIALS))
    spans = [(s, min(s + CHUNK_TRIALS, trials)) for s in starts]

    def generate(span):
        lo, hi = span
        return np.asarray(backend.stagnation_chain(
            p1, p2, p3, a_sched, cfg.init_lo, cfg.init_hi, hi - lo, lo,
            word1, k0, k1))

    s1 = np.zeros(T)
    s2 = np.zeros(T)
    s3 = np.zeros(T)
    s4 = np.zeros(T)
    kept = [] if keep_samples else None

    def reduce_chunk(mat):
        d = mat - c
        d2 = d * d
        s1[:] += d.sum(axis=1)
        s2[:] += d2.sum(axis=1)
        s3[:] += (d2 * d).sum(axis=1)
        s4[:] += (d2 * d2).sum(axis=1)

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for mat in pool.map(generate, spans):
                reduce_chunk(mat)
                if kept is not None:
                    kept.append(mat)
    else:
        for span in spans:
            mat = generate(span)
            reduce_chunk(mat)
            if kept is not None:
                kept.append(mat)

    n = float(trials)
    m1 = s1 / n
    m2 = s2 / n
    m3 = s3 / n
    m4 = s4 / n
    # moments about the empirical mean, from the center-based sums
    v2 = m2 - m1 * m1
    v4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1**4
    var = v2 * (n / (n - 1.0)) if trials > 1 else np.zeros(T)
    se_mean = np.sqrt(np.maximum(v2, 0.0) / n)
    se_var = np.sqrt(np.maximum(v4 - v2 * v2, 0.0) / n)
    samples = np.concatenate(kept, axis=1) if kept is not None else None
    return StagnationStats(config=cfg, t=np.arange(1, T + 1), mean=c + m1,
                           var=var, se_mean=se_mean, se_var=se_var,
                           central3=m3, central4=m4, samples=samples)


def ks_statistic(samples, cdf):
    """Sup distance between the empirical CDF of the samples and ``cdf``."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = s.size
    if n == 0:
        raise ValueError("cannot compute a KS statistic on an empty sample")
    f = np.asarray(cdf(s), dtype=np.float64)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - f), np.max(f - (steps - 1.0 / n))))


def ks_critical(n, factor=1.95):
    """Asymptotic KS critical value factor/sqrt(n) (1.95 ~ alpha 0.001)."""
    return factor / np.sqrt(n)


def trapezoid_cdf(curve):
    """Cumulative trapezoid integral of a PDF curve, renormalized to end at 1."""
    v = curve.values
    inc = 0.5 * (v[:-1] + v[1:]) * curve.step
    cum = np.concatenate([[0.0], np.cumsum(inc)])
    if cum[-1] <= 0:
        raise ValueError("pdf curve has zero mass")
    cum /= cum[-1]
    return GridCurve(lo=curve.lo, hi=curve.hi, values=cum, kind=KIND_CDF,
                     support=curve.support, params=curve.params)


def empirical_central_moment(samples, r, center):
    """Mean of (s - center)^r plus its standard error (order-2r based)."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    s = np.asarray(samples, dtype=np.float64)
    if s.size == 0:
        raise ValueError("empty sample set")
    if r == 0:
        return 1.0, 0.0
    d = s - center
    dr = d**r
    value = float(dr.mean())
    se = float(np.sqrt(max(float((dr * dr).mean()) - value * value, 0.0)
                       / s.size))
    return value, se


@dataclass(frozen=True)
class Histogram:
    """Uniform-bin frequency histogram."""

    edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.float64)
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "counts", c)
        if e.ndim != 1 or e.size != c.size + 1:
            raise ValueError("need len(edges) == len(counts) + 1")
        if np.any(np.diff(e) <= 0):
            raise ValueError("edges must be strictly increasing")
        if int(c.sum()) != self.total:
            raise ValueError("counts must sum to total")

    @staticmethod
    def from_samples(samples, bins=60, value_range=None):
        """Bin the samples; an explicit range must contain every sample."""
        s = np.asarray(samples, dtype=np.float64)
        if value_range is not None:
            lo, hi = value_range
            if s.min() < lo or s.max() > hi:
                raise ValueError("samples fall outside the requested range")
        counts, edges = np.histogram(s, bins=bins, range=value_range)
        return Histogram(edges=edges, counts=counts, total=int(s.size))

    def density(self):
        """Counts rescaled to a density over the bin widths."""
        width = np.diff(self.edges)
        return self.counts / (self.total * width)

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("bin_lo,bin_hi,count\n")
            for lo, hi, ct in zip(self.edges[:-1], self.edges[1:], self.counts):
                fh.write(f"{lo:.17g},{hi:.17g},{int(ct)}\n")
        return path

    @staticmethod
    def from_csv(path):
        rows = Path(path).read_text().splitlines()
        if rows[0] != "bin_lo,bin_hi,count":
            raise ValueError(f"unexpected histogram header {rows[0]!r}")
        lo, hi, counts = zip(*(r.split(",") for r in rows[1:]))
        edges = np.array([float(v) for v in lo] + [float(hi[-1])])
        counts = np.array([int(v) for v in counts])
        return Histogram(edges=edges, counts=counts, total=int(counts.sum()))


@dataclass
class RunReport:
    """Verification-run record: config echo, per-check stats, verdicts."""

    config: dict
    backend: str
    checks: list

    @property
    def all_passed(self):
        return all(c["passed"] for c in self.checks)

    def to_json(self, path):
        path = Path(path)
        payload = {"config": self.config, "backend": self.backend,
                   "all_passed": self.all_passed, "checks": self.checks}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        return path

    @staticmethod
    def from_json(path):
        payload = json.loads(Path(path).read_text())
        return RunReport(config=payload["config"], backend=payload["backend"],
                         checks=payload["checks"])
