"""Exact sampling distributions of the guided leader step and of the updated
position, under frozen leaders and a frozen current position.

One guided step toward leader p is p + A|Cp - x| with A ~ U[-a, a] and
C ~ U[0, 2]. Its density is a piecewise-logarithmic law on the open interval
(p - n, p + n), where

    m = a(-|p| + |x - p|),    n = a(|p| + |x - p|).

For m > 0 the density has a flat central plateau; for m <= 0 it has an
integrable logarithmic singularity at the center. The updated position is
the mean of three such independent steps, so its density is assembled by
discrete convolution of exact per-cell masses (cell masses come from the
closed-form CDF, which keeps the singular case well-behaved).
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve


class DegenerateDistributionError(ValueError):
    """The requested density collapses to a point mass."""


@dataclass(frozen=True)
class SupportParams:
    """Half-widths (m, n) plus the center and inputs that produced them."""

    m: float
    n: float
    p: float
    a: float
    x: float

    def __post_init__(self):
        if self.n < 0 or self.n < abs(self.m) - 1e-12 * max(1.0, self.n):
            raise ValueError(f"invalid support half-widths m={self.m}, n={self.n}")

    @property
    def degenerate(self):
        return self.n == 0.0


def support_params(a, p, x):
    """Support half-widths of one guided step: m = a(-|p|+|x-p|), n = a(|p|+|x-p|)."""
    if not a > 0:
        raise ValueError(f"coefficient a must be positive, got {a}")
    p = float(p)
    x = float(x)
    r = abs(x - p)
    return SupportParams(m=a * (-abs(p) + r), n=a * (abs(p) + r), p=p,
                         a=float(a), x=x)


def _require_nondegenerate(sp):
    if sp.degenerate:
        raise DegenerateDistributionError(
            f"point mass at {sp.p}: both |p| and |x - p| vanish")


def leader_step_pdf(u, sp):
    """Density of one guided step at u (array-aware).

    Plateau branch for m > 0; singular branch for m <= 0 (the exact value at
    the center is +inf there). Zero outside the open support interval.
    """
    _require_nondegenerate(sp)
    u = np.asarray(u, dtype=np.float64)
    v = np.abs(u - sp.p)
    m, n = sp.m, sp.n
    out = np.zeros_like(v)
    if m == n:
        # p == 0: the step is A|x| ~ uniform on (-n, n)
        out[v < n] = 1.0 / (2.0 * n)
        return out if out.ndim else float(out)
    k = 1.0 / (2.0 * (n - m))
    with np.errstate(divide="ignore"):
        if m > 0:
            inner = v < m
            out[inner] = k * math.log(n / m)
            mid = (v >= m) & (v < n)
            out[mid] = k * np.log(n / v[mid])
        else:
            mu = -m
            inner = v < mu
            out[inner] = 2.0 * k * np.log(math.sqrt(mu * n) / v[inner])
            mid = (v >= mu) & (v < n)
            out[mid] = k * np.log(n / v[mid])
            out[v == 0.0] = np.inf
    return out if out.ndim else float(out)


def _cdf_half(w, sp):
    """Integral of the density from the center out to offset w >= 0."""
    m, n = sp.m, sp.n
    w = np.minimum(w, n)
    if m == n:
        return w / (2.0 * n)
    k = 1.0 / (2.0 * (n - m))
    out = np.empty_like(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        if m > 0:
            inner = w <= m
            out[inner] = k * w[inner] * math.log(n / m)
            rest = ~inner
            wr = w[rest]
            out[rest] = k * (wr * np.log(n / wr) + wr - m)
        else:
            mu = -m
            inner = w <= mu
            wi = w[inner]
            out[inner] = 2.0 * k * (wi * np.log(math.sqrt(mu * n) / wi) + wi)
            rest = ~inner
            wr = w[rest]
            out[rest] = k * (wr * np.log(n / wr) + wr - m)
    out[w == 0.0] = 0.0
    return out


def leader_step_cdf(u, sp):
    """Closed-form CDF of one guided step (array-aware).

    Continuous and non-decreasing, 0 at p - n, 1/2 at p, 1 at p + n.
    """
    _require_nondegenerate(sp)
    u = np.asarray(u, dtype=np.float64)
    v = u - sp.p
    half = _cdf_half(np.abs(v), sp)
    out = 0.5 + np.sign(v) * half
    out = np.where(v <= -sp.n, 0.0, out)
    out = np.where(v >= sp.n, 1.0, out)
    return out if out.ndim else float(out)


def leader_step_support(sp):
    """Open support interval (p - n, p + n); empty when degenerate."""
    return (sp.p - sp.n, sp.p + sp.n)


@dataclass(frozen=True)
class BoxD:
    """Axis-aligned open box: per-dimension center and positive half-width."""

    center: np.ndarray
    half_width: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        h = np.asarray(self.half_width, dtype=np.float64)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_width", h)
        if c.shape != h.shape or c.ndim != 1:
            raise ValueError("center and half_width must be 1-D with equal length")
        if not np.all(h > 0):
            raise ValueError("box half-widths must be positive")

    @property
    def lower(self):
        return self.center - self.half_width

    @property
    def upper(self):
        return self.center + self.half_width

    @property
    def side_lengths(self):
        return 2.0 * self.half_width

    def contains(self, points):
        """True where every coordinate lies strictly inside the open box."""
        pts = np.asarray(points, dtype=np.float64)
        return np.all((pts > self.lower) & (pts < self.upper), axis=-1)


def leader_step_box(a, p, x):
    """Box bounding one guided step toward leader position p from x."""
    p = np.asarray(p, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = np.array([support_params(a, pj, xj).n for pj, xj in zip(p, x)])
    return BoxD(center=p.copy(), half_width=n)


def update_box(a, p1, p2, p3, x):
    """Box bounding the updated position: center sum(p)/3, half-width sum(n)/3."""
    p1, p2, p3, x = (np.asarray(v, dtype=np.float64) for v in (p1, p2, p3, x))
    n_sum = np.zeros_like(x)
    for p in (p1, p2, p3):
        n_sum += np.array([support_params(a, pj, xj).n for pj, xj in zip(p, x)])
    return BoxD(center=(p1 + p2 + p3) / 3.0, half_width=n_sum / 3.0)


def count_plateau_factors(p1, p2, p3, x):
    """Number of leaders whose step density has a central plateau (m > 0).

    The sign of m does not depend on a: m > 0 exactly when |x - p| > |p|.
    """
    return int(sum(abs(x - p) > abs(p) for p in (p1, p2, p3)))


KIND_PDF = "pdf"
KIND_CDF = "cdf"


@dataclass(frozen=True)
class GridCurve:
    """Uniform-grid tabulation of a univariate PDF or CDF.

    ``values[i]`` sits at ``lo + i * (hi - lo) / (len - 1)``. PDF curves hold
    cell-average densities (trapezoid integral within 1e-6 of one); CDF
    curves are non-decreasing with endpoints 0 and 1 within 1e-9. ``support``
    records exact analytic endpoints when known.
    """

    lo: float
    hi: float
    values: np.ndarray
    kind: str
    support: tuple = None
    params: dict = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got {self.lo}, {self.hi}")
        if v.ndim != 1 or v.size < 2:
            raise ValueError("values must be a 1-D array with at least 2 entries")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve values must be finite")
        if self.kind == KIND_PDF:
            total = np.trapezoid(v, dx=self.step)
            if abs(total - 1.0) > 1e-6:
                raise ValueError(f"pdf curve integrates to {total}, not 1")
            if np.any(v < 0):
                raise ValueError("pdf curve must be nonnegative")
        elif self.kind == KIND_CDF:
            if np.any(np.diff(v) < 0):
                raise ValueError("cdf curve must be non-decreasing")
            if abs(v[0]) > 1e-9 or abs(v[-1] - 1.0) > 1e-9:
                raise ValueError("cdf curve endpoints must be 0 and 1")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @property
    def step(self):
        return (self.hi - self.lo) / (self.values.size - 1)

    def grid(self):
        return np.linspace(self.lo, self.hi, self.values.size)

    def __call__(self, u):
        """Linear interpolation; 0 outside for a PDF, {0, 1} for a CDF."""
        right = 1.0 if self.kind == KIND_CDF else 0.0
        return np.interp(u, self.grid(), self.values, left=0.0, right=right)

    def to_csv(self, path):
        """Write ``u,value`` rows plus a JSON metadata sidecar."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u", "value"])
            for u, v in zip(self.grid(), self.values):
                writer.writerow([f"{u:.17g}", f"{v:.17g}"])
        meta = {"lo": self.lo, "hi": self.hi, "kind": self.kind,
                "parameters": self.params or {}}
        if self.support is not None:
            meta["support"] = [self.support[0], self.support[1]]
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2))
        return path

    @staticmethod
    def from_csv(path):
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["u", "value"]:
                raise ValueError(f"unexpected CSV header {header}")
            rows = [(float(u), float(v)) for u, v in reader]
        us = np.array([r[0] for r in rows])
        vals = np.array([r[1] for r in rows])
        meta_path = path.with_suffix(".json")
        support = None
        params = None
        kind = KIND_PDF
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
            kind = meta["kind"]
            params = meta.get("parameters")
            if "support" in meta:
                support = tuple(meta["support"])
        return GridCurve(lo=float(us[0]), hi=float(us[-1]), values=vals,
                         kind=kind, support=support, params=params)


def _cell_masses(sp, delta):
    """Exact per-cell masses of one step density on a delta lattice.

    The lattice is symmetric about the center p (cells may overhang the
    support; they just get zero mass), which makes the mass vector an exact
    palindrome and keeps the convolution symmetric.
    """
    cells = max(int(np.ceil(2.0 * sp.n / delta - 1e-9)), 1)
    i = np.arange(cells + 1, dtype=np.float64)
    edges = sp.p + (i - 0.5 * cells) * delta
    mass = np.diff(leader_step_cdf(edges, sp))
    first_center = sp.p + (0.5 - 0.5 * cells) * delta
    return mass, first_center


def update_pdf(a, p1, p2, p3, x, *, cells=4096, refine_tol=1e-4,
               max_cells=32768):
    """Density of the updated coordinate (mean of the three guided steps).

    Builds exact per-cell masses for each non-degenerate step density,
    convolves them on a shared lattice, and rescales to the mean domain.
    The grid is doubled until successive tabulations differ by less than
    ``refine_tol`` in sup norm (or ``max_cells`` is reached).
    """
    sps = [support_params(a, float(p), float(x)) for p in (p1, p2, p3)]
    active = [sp for sp in sps if not sp.degenerate]
    if not active:
        raise DegenerateDistributionError(
            "all three step densities are point masses")
    shift = sum(sp.p for sp in sps if sp.degenerate)
    total_n = sum(sp.n for sp in sps)
    total_p = sum(sp.p for sp in sps)
    support = ((total_p - total_n) / 3.0, (total_p + total_n) / 3.0)
    params = {"a": a, "p": [float(p1), float(p2), float(p3)], "x": float(x)}

    def assemble(ncells):
        delta = max(2.0 * sp.n for sp in active) / ncells
        conv = None
        left = shift
        for sp in active:
            mass, first = _cell_masses(sp, delta)
            left += first
            conv = mass if conv is None else fftconvolve(conv, mass)
        conv = np.maximum(conv, 0.0)
        # zero sample padding at either end: those points carry no mass, and
        # with them the trapezoid integral equals the total mass exactly
        values = np.concatenate([[0.0], conv * (3.0 / delta), [0.0]])
        lo = (left - delta) / 3.0
        hi = (left + conv.size * delta) / 3.0
        return GridCurve(lo=lo, hi=hi, values=values, kind=KIND_PDF,
                         support=support, params=dict(params, cells=ncells))

    curve = assemble(cells)
    n = cells
    while 2 * n <= max_cells:
        finer = assemble(2 * n)
        resampled = finer(curve.grid())
        if np.max(np.abs(resampled - curve.values)) < refine_tol:
            return finer
        curve = finer
        n *= 2
    return curve


def leader_step_curve(sp, cells=4096):
    """Cell-average tabulation of one step density (singularity-safe)."""
    _require_nondegenerate(sp)
    delta = 2.0 * sp.n / cells
    mass, first = _cell_masses(sp, delta)
    values = np.concatenate([[0.0], mass / delta, [0.0]])
    return GridCurve(lo=first - delta, hi=first + mass.size * delta,
                     values=values, kind=KIND_PDF,
                     support=leader_step_support(sp),
                     params={"a": sp.a, "p": sp.p, "x": sp.x, "cells": cells})


def leader_step_cdf_curve(sp, points=4097):
    """Pointwise tabulation of the closed-form step CDF on its support."""
    _require_nondegenerate(sp)
    lo, hi = leader_step_support(sp)
    u = np.linspace(lo, hi, points)
    return GridCurve(lo=lo, hi=hi, values=leader_step_cdf(u, sp),
                     kind=KIND_CDF, support=(lo, hi),
                     params={"a": sp.a, "p": sp.p, "x": sp.x})


class ProductDensity:
    """Joint density on R^D as the product of per-dimension curves."""

    def __init__(self, curves):
        curves = list(curves)
        if not curves:
            raise ValueError("need at least one curve")
        for c in curves:
            if c.kind != KIND_PDF:
                raise ValueError("product density requires pdf curves")
        self.curves = curves

    @property
    def dim(self):
        return len(self.curves)

    def __call__(self, points):
        """Evaluate at points with shape (..., D); zero outside the box."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape[-1] != self.dim:
            raise ValueError(
                f"points have dimension {pts.shape[-1]}, expected {self.dim}")
        out = np.ones(pts.shape[:-1])
        for j, curve in enumerate(self.curves):
            out = out * curve(pts[..., j])
        return out


def product_density(curves):
    """Evaluator for the joint density of independent per-dimension laws."""
    return ProductDensity(curves)
