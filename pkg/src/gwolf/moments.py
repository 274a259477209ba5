"""Exact moment machinery for the stagnation process.

With leaders frozen at (p1, p2, p3) and coordinates tracked about the fixed
attractor c = sum(p)/3, every central moment of the next position is a linear
combination of the current raw moments. The generic step expands the r-th
power of the summed driver terms over the three leaders; driver moments are
E A^r = a^r/(r+1) for even r (0 for odd) and E C^r = 2^r/(r+1). Odd central
moments vanish from the second iteration on by symmetry, so odd orders short
circuit to zero.

The variance obeys the first-order system D(t+1) = b_t (D(t) + p0) with
b_t = a(t)^2 / 9 and the leader-spread constant p0 = (4/9) sum(p^2)
- (1/9) (sum p)^2 >= 0; its instantaneous fixed point is b_t p0 / (1 - b_t).
Moments at t = 1 are taken about c as well (for a uniform initial population
the mean is not yet c, and this seeding is what makes the packaged recursion
exact from the first step).
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import schedule_a


def uniform_offset_moment(r, lo, hi, c):
    """E (U[lo, hi] - c)^r, closed form."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    if r == 0:
        return 1.0
    return ((hi - c) ** (r + 1) - (lo - c) ** (r + 1)) / ((hi - lo) * (r + 1))


def coeff_a_moment(r, a):
    """E A^r for A ~ U[-a, a]: a^r/(r+1) for even r, 0 for odd r."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if r % 2:
        return 0.0
    return a**r / (r + 1)


def coeff_c_moment(r):
    """E C^r for C ~ U[0, 2]: 2^r/(r+1)."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    return 2.0**r / (r + 1)


def central_moment_update(r, a, p, raw):
    """Order-r central moment (about sum(p)/3) after one update step.

    ``raw`` must hold the current raw moments E x^m for m = 0..r. Odd r
    returns 0 by symmetry. The even case evaluates the full expansion over
    leader powers (2p, 2q, 2s) and the binomial split of each
    (C p_k - x)^(2p) factor; the x-power terms alternate sign.
    """
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if r == 0:
        return 1.0
    if r % 2:
        return 0.0
    if len(raw) < r + 1:
        raise ValueError(f"need raw moments up to order {r}, got {len(raw) - 1}")
    p1, p2, p3 = (float(v) for v in p)
    half = r // 2
    total = 0.0
    for i in range(half + 1):
        for j in range(half - i + 1):
            s = half - i - j
            outer = (math.comb(r, 2 * i) * math.comb(r - 2 * i, 2 * j)
                     / ((2 * i + 1) * (2 * j + 1) * (2 * s + 1)))
            inner = 0.0
            for l1 in range(2 * i + 1):
                c1 = (math.comb(2 * i, l1) * p1 ** (2 * i - l1)
                      / (2 * i - l1 + 1))
                for l2 in range(2 * j + 1):
                    c2 = c1 * (math.comb(2 * j, l2) * p2 ** (2 * j - l2)
                               / (2 * j - l2 + 1))
                    for l3 in range(2 * s + 1):
                        l = l1 + l2 + l3
                        term = (c2 * math.comb(2 * s, l3)
                                * p3 ** (2 * s - l3) / (2 * s - l3 + 1)
                                * 2.0 ** (r - l) * raw[l])
                        inner += -term if l % 2 else term
            total += outer * inner
    return (a / 3.0) ** r * total


def raw_from_central(r, c, central):
    """E x^r from central moments about c: sum_m C(r, m) c^(r-m) sigma^m."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if len(central) < r + 1:
        raise ValueError(f"need central moments up to order {r}")
    return sum(math.comb(r, m) * c ** (r - m) * central[m]
               for m in range(r + 1))


def leader_spread(p):
    """Leader-spread constant p0 = (4/9) sum(p^2) - (1/9) (sum p)^2 >= 0."""
    p = np.asarray(p, dtype=np.float64)
    return float((4.0 / 9.0) * np.sum(p * p) - (np.sum(p) / 3.0) ** 2)


def variance_gain(t, T):
    """b_t = a(t)^2 / 9, the variance contraction factor of one step."""
    return schedule_a(t, T) ** 2 / 9.0


def variance_step(d, t, T, p):
    """One step of the variance recursion: D(t+1) = b_t (D(t) + p0)."""
    return variance_gain(t, T) * (d + leader_spread(p))


def variance_attractor(t, T, p):
    """Instantaneous fixed point b_t p0 / (1 - b_t) of the variance step."""
    b = variance_gain(t, T)
    return b * leader_spread(p) / (1.0 - b)


def variance_sequence(p, T, init_lo=-4.0, init_hi=4.0):
    """Variance-about-center trajectory D_1..D_T for a uniform start.

    The first entry is the second moment of U[init_lo, init_hi] about
    c = sum(p)/3 (at t = 1 the mean has not yet reached c, so seeding with
    the raw second moment about c is what keeps the packaged recursion
    exact); later entries follow the one-step recursion.
    """
    if T < 1:
        raise ValueError(f"need T >= 1, got {T}")
    c = float(np.sum(np.asarray(p, dtype=np.float64))) / 3.0
    out = np.empty(T)
    out[0] = uniform_offset_moment(2, init_lo, init_hi, c)
    for t in range(1, T):
        out[t] = variance_step(out[t - 1], t, T, p)
    return out


def stability_bounds(d1, t, p, T):
    """Attractor-distance and terminal variance bounds.

    Returns ``(geometric, terminal)``: the geometric envelope
    (4/9)^(t-1) |D_1 - b_1 p0/(1 - b_1)| for the gap at iteration t, and the
    terminal bound 4 (D_1 + p0 (T-1)) / (9 T^2) on D_T.
    """
    if not 1 <= t <= T:
        raise ValueError(f"iteration {t} outside 1..{T}")
    p0 = leader_spread(p)
    b1 = variance_gain(1, T)
    geometric = (4.0 / 9.0) ** (t - 1) * abs(d1 - b1 * p0 / (1.0 - b1))
    terminal = 4.0 / (9.0 * T * T) * (d1 + p0 * (T - 1))
    return geometric, terminal


@dataclass(frozen=True)
class MomentTrajectory:
    """Central (about sum(p)/3) and raw moments over t = 1..T, orders 0..r_max."""

    p: tuple
    T: int
    r_max: int
    init_lo: float
    init_hi: float
    central: np.ndarray  # (T, r_max + 1); [t - 1, r] = sigma^r x(t)
    raw: np.ndarray      # (T, r_max + 1); [t - 1, m] = E x^m(t)

    @property
    def center(self):
        return sum(self.p) / 3.0

    def sigma(self, r):
        """Trajectory of the order-r central moment, t = 1..T."""
        return self.central[:, r]

    def mean(self):
        return self.raw[:, 1]

    def to_csv(self, path):
        """Columns t, sigma2, E, D0, bound_cor31, then sigma4, sigma6, ..."""
        path = Path(path)
        extra = list(range(4, self.r_max + 1, 2))
        d1 = self.central[0, 2]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "sigma2", "E", "D0", "bound_cor31"]
                            + [f"sigma{r}" for r in extra])
            for t in range(1, self.T + 1):
                geo, _ = stability_bounds(d1, t, self.p, self.T)
                row = [t, f"{self.central[t - 1, 2]:.17g}",
                       f"{self.raw[t - 1, 1]:.17g}",
                       f"{variance_attractor(t, self.T, self.p):.17g}",
                       f"{geo:.17g}"]
                row += [f"{self.central[t - 1, r]:.17g}" for r in extra]
                writer.writerow(row)
        return path


def moment_trajectory(r_max, p, T, init_lo=-4.0, init_hi=4.0):
    """Solve the moment recursion up to order ``r_max`` for t = 1..T.

    Seeds t = 1 from the uniform initial population (moments about the
    center sum(p)/3), then alternates the central-moment step with the
    raw-moment reconstruction. Odd central moments are exactly zero from
    t = 2 on.
    """
    if r_max < 2 or r_max % 2:
        raise ValueError(f"r_max must be a positive even order, got {r_max}")
    if T < 2:
        raise ValueError(f"need T >= 2, got {T}")
    p = tuple(float(v) for v in p)
    c = sum(p) / 3.0
    central = np.empty((T, r_max + 1))
    raw = np.empty((T, r_max + 1))
    for m in range(r_max + 1):
        central[0, m] = uniform_offset_moment(m, init_lo, init_hi, c)
        raw[0, m] = uniform_offset_moment(m, init_lo, init_hi, 0.0)
    for t in range(1, T):
        a = schedule_a(t, T)
        central[t, 0] = 1.0
        for r in range(1, r_max + 1):
            central[t, r] = (0.0 if r % 2 else
                             central_moment_update(r, a, p, raw[t - 1]))
        for m in range(r_max + 1):
            raw[t, m] = raw_from_central(m, c, central[t])
    return MomentTrajectory(p=p, T=int(T), r_max=int(r_max),
                            init_lo=float(init_lo), init_hi=float(init_hi),
                            central=central, raw=raw)


def gap_table(p, T_values, init_lo=-4.0, init_hi=4.0):
    """|D_T - D_0| and the terminal bound for each requested horizon.

    D_0 is the attractor at the final iteration, which is 0 because the
    schedule ends at a(T) = 0; the gap therefore equals D_T itself.
    """
    rows = []
    for T in T_values:
        d = variance_sequence(p, int(T), init_lo, init_hi)
        gap = abs(d[-1] - variance_attractor(int(T), int(T), p))
        _, bound = stability_bounds(d[0], int(T), p, int(T))
        rows.append((int(T), gap, bound))
    return rows


def write_gap_table(rows, path):
    """CSV with columns T, gap, bound_prop35."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["T", "gap", "bound_prop35"])
        for T, gap, bound in rows:
            writer.writerow([T, f"{gap:.17g}", f"{bound:.17g}"])
    return path
