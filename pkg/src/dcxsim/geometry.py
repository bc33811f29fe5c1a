"""Geometric primitives: windows, boxes, patterns, fields, measures, RNG streams.

All sampling windows are axis-aligned boxes in R^d with either torus
(periodic) or plain topology.  Boxes are half-open [low, high) so that a
partition of a box counts every point exactly once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np


# ---------------------------------------------------------------------------
# Windows and boxes

TORUS = "torus"
PLAIN = "plain"


@dataclass(frozen=True)
class Window:
    """Bounded axis-aligned sampling arena in R^d."""

    lows: np.ndarray
    highs: np.ndarray
    topology: str = TORUS

    def __post_init__(self):
        lows = np.atleast_1d(np.asarray(self.lows, dtype=float))
        highs = np.atleast_1d(np.asarray(self.highs, dtype=float))
        if lows.shape != highs.shape or lows.ndim != 1:
            raise ValueError("lows/highs must be 1-D vectors of equal length")
        if np.any(lows >= highs):
            raise ValueError("degenerate axis: need lows[i] < highs[i] for all i")
        if self.topology not in (TORUS, PLAIN):
            raise ValueError(f"unknown topology {self.topology!r}")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def dim(self) -> int:
        return self.lows.shape[0]

    @property
    def lengths(self) -> np.ndarray:
        return self.highs - self.lows

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lows) & (pts <= self.highs), axis=1)

    def wrap(self, points: np.ndarray) -> np.ndarray:
        """Map points into the window by periodic wrapping (torus only)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.lows + np.mod(pts - self.lows, self.lengths)


@dataclass(frozen=True)
class Box:
    """Half-open sub-box [low, high) of a window."""

    lows: np.ndarray
    highs: np.ndarray

    def __post_init__(self):
        lows = np.atleast_1d(np.asarray(self.lows, dtype=float))
        highs = np.atleast_1d(np.asarray(self.highs, dtype=float))
        if lows.shape != highs.shape or np.any(lows >= highs):
            raise ValueError("box needs lows[i] < highs[i] for all i")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def volume(self) -> float:
        return float(np.prod(self.highs - self.lows))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Half-open membership: low <= x < high per axis."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lows) & (pts < self.highs), axis=1)


def make_window(lows, highs, topology: str = TORUS) -> Window:
    return Window(np.asarray(lows, dtype=float), np.asarray(highs, dtype=float), topology)


def boxes_disjoint(boxes: Sequence[Box]) -> bool:
    """Pairwise disjointness of half-open boxes, decidable from coordinates."""
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            a, b = boxes[i], boxes[j]
            if np.all(np.maximum(a.lows, b.lows) < np.minimum(a.highs, b.highs)):
                return False
    return True


# ---------------------------------------------------------------------------
# Distances

def distance(w: Window, x, y) -> float:
    """Euclidean distance; on a torus, minimum over periodic images."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (w.contains(x).all() and w.contains(y).all()):
        raise ValueError("point outside window")
    diff = np.abs(x - y)
    if w.topology == TORUS:
        diff = np.minimum(diff, w.lengths - diff)
    return float(np.sqrt(np.sum(diff**2)))


def pairwise_distances(w: Window, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix (len(a), len(b)) under the window's topology."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if w.topology == TORUS:
        diff = np.minimum(diff, w.lengths - diff)
    return np.sqrt(np.sum(diff**2, axis=2))


# ---------------------------------------------------------------------------
# Realization containers

@dataclass(frozen=True)
class PointPattern:
    """Finite point-process realization in a window, optionally marked."""

    window: Window
    points: np.ndarray
    marks: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, self.window.dim)
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.window.dim:
            raise ValueError("point dimension does not match window")
        if pts.shape[0] and not self.window.contains(pts).all():
            raise ValueError("point outside window")
        object.__setattr__(self, "points", pts)
        if self.marks is not None:
            marks = np.asarray(self.marks)
            if marks.shape[0] != pts.shape[0]:
                raise ValueError("marks length must equal number of points")
            object.__setattr__(self, "marks", marks)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class GridField:
    """Piecewise-constant non-negative intensity on a regular grid."""

    window: Window
    cells_per_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        cpa = np.atleast_1d(np.asarray(self.cells_per_axis, dtype=int))
        if cpa.shape[0] != self.window.dim or np.any(cpa < 1):
            raise ValueError("cells_per_axis must be positive, one entry per axis")
        vals = np.asarray(self.values, dtype=float).reshape(tuple(cpa))
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite and non-negative")
        object.__setattr__(self, "cells_per_axis", cpa)
        object.__setattr__(self, "values", vals)

    @property
    def cell_lengths(self) -> np.ndarray:
        return self.window.lengths / self.cells_per_axis

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_lengths))

    def midpoints(self) -> np.ndarray:
        """(n_cells, d) cell midpoints in C order matching values.ravel()."""
        axes = [
            self.window.lows[k] + (np.arange(self.cells_per_axis[k]) + 0.5) * self.cell_lengths[k]
            for k in range(self.window.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def value_at(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.floor((pts - self.window.lows) / self.cell_lengths).astype(int)
        idx = np.clip(idx, 0, self.cells_per_axis - 1)
        return self.values[tuple(idx.T)]


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite purely atomic measure: (location, non-negative mass) pairs."""

    window: Window
    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        locs = np.asarray(self.locations, dtype=float)
        if locs.size == 0:
            locs = locs.reshape(0, self.window.dim)
        locs = np.atleast_2d(locs)
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if locs.shape[0] != masses.shape[0]:
            raise ValueError("locations/masses length mismatch")
        if np.any(masses < 0):
            raise ValueError("masses must be non-negative")
        if locs.shape[0] and not self.window.contains(locs).all():
            raise ValueError("atom outside window")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "masses", masses)

    @property
    def n(self) -> int:
        return self.locations.shape[0]


# ---------------------------------------------------------------------------
# Counting and mass

def count_in(p: PointPattern, b: Box) -> int:
    """Number of points of p in the half-open box b."""
    if p.n == 0:
        return 0
    return int(np.count_nonzero(b.contains(p.points)))


def mass_in(m: Union[GridField, AtomicMeasure], b: Box) -> float:
    """Measure of the half-open box b under a grid field or atomic measure.

    For a grid field this is the exact integral of the piecewise-constant
    density over b (fractional cell overlaps included).
    """
    if isinstance(m, AtomicMeasure):
        if m.n == 0:
            return 0.0
        return float(np.sum(m.masses[b.contains(m.locations)]))
    # grid field: per-axis overlap lengths factorize the integral
    t = m.values
    for k in range(m.window.dim):
        edges = m.window.lows[k] + np.arange(m.cells_per_axis[k] + 1) * m.cell_lengths[k]
        ov = np.clip(
            np.minimum(edges[1:], b.highs[k]) - np.maximum(edges[:-1], b.lows[k]),
            0.0,
            None,
        )
        t = np.tensordot(ov, t, axes=(0, 0))
    return float(t)


# ---------------------------------------------------------------------------
# Random streams

def _splitmix64(x: int) -> int:
    """One splitmix64 step; decorrelates derived stream ids."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    """Counter-based splittable stream: (seed, stream_id) keys a Philox generator."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, i: int) -> "RngStream":
        """Derive an independent substream; deterministic in (stream_id, i)."""
        return RngStream(self.seed, _splitmix64(self.stream_id * 0x10001 + i + 1))


def make_stream(seed: int, stream_id: int = 0) -> RngStream:
    return RngStream(int(seed), int(stream_id))


def as_generator(rng) -> np.random.Generator:
    """Accept either an RngStream or a ready numpy Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng
