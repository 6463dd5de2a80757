"""Fractal interpolation functions (FIF) built from affine iterated function systems.

For nodes (x_0, y_0) .. (x_N, y_N) and vertical scaling factors s_1 .. s_N, map i is

    f_i(x, y) = (a_i x + c_i, d_i x + s_i y + e_i)

and sends the end nodes (x_0, y_0), (x_N, y_N) onto the gap nodes (x_{i-1}, y_{i-1}),
(x_i, y_i). The interpolant is the attractor of {f_1 .. f_N}; it passes through every
node and its roughness is governed by the s_i.
"""
import logging
from dataclasses import dataclass

import numpy as np

from . import perflog
from .errors import (
    AbscissaOutOfRange,
    DegenerateSeries,
    IndexOutOfRange,
    IterationLimitExceeded,
    ScalingOutOfRange,
    SegmentTooShort,
)
from .series import TimeSeries

logger = logging.getLogger(__name__)

DEFAULT_N_INTERPOLATION = 17
MAX_ITERATIONS = 12
X_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FifModel:
    """Per-interval affine coefficients of the IFS, plus the nodes it interpolates."""

    a: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    s: np.ndarray
    x_nodes: np.ndarray
    y_nodes: np.ndarray

    @property
    def n_maps(self):
        return len(self.a)

    @property
    def x0(self):
        return self.x_nodes[0]

    @property
    def xN(self):
        return self.x_nodes[-1]

    @property
    def y0(self):
        return self.y_nodes[0]

    @property
    def yN(self):
        return self.y_nodes[-1]

    def apply_all(self, x, y):
        """Images of the points (x, y) under every map, stacked map by map."""
        xs = self.a[:, None] * x[None, :] + self.c[:, None]
        ys = self.d[:, None] * x[None, :] + self.s[:, None] * y[None, :] + self.e[:, None]
        return xs.ravel(), ys.ravel()


@dataclass(frozen=True, eq=False)
class InterpolatedSeries:
    """Original nodes plus exactly `n_interpolation` generated points per gap.

    `attractor` holds the full Hutchinson point set the generated points were picked from.
    """

    points: TimeSeries
    node_indices: np.ndarray
    n_interpolation: int
    attractor: TimeSeries = None

    @property
    def x(self):
        return self.points.x

    @property
    def y(self):
        return self.points.y

    @property
    def nodes(self):
        return TimeSeries(self.points.x[self.node_indices], self.points.y[self.node_indices])

    def generated_mask(self):
        mask = np.ones(len(self.points), dtype=bool)
        mask[self.node_indices] = False
        return mask

    def __len__(self):
        return len(self.points)


def _scaling_vector(s, n_maps):
    s = np.asarray(s, dtype=float)
    if s.ndim == 0:
        s = np.full(n_maps, float(s))
    if s.shape != (n_maps,):
        raise ValueError(f"Expected {n_maps} scaling factors, got {s.shape}")
    if np.any(~np.isfinite(s)) or np.any(np.abs(s) >= 1):
        raise ScalingOutOfRange(f"Vertical scaling factors must satisfy |s_i| < 1, got {s.tolist()}")
    return s


def compute_coefficients(segment: TimeSeries, s) -> FifModel:
    """The IFS for `segment` with scaling factors `s` (a scalar means the same s for every map)."""
    if not isinstance(segment, TimeSeries):
        segment = TimeSeries.from_points(segment)
    segment.require_length(3, SegmentTooShort)

    x, y = segment.x, segment.y
    n_maps = len(x) - 1
    s = _scaling_vector(s, n_maps)

    x0, xN, y0, yN = x[0], x[-1], y[0], y[-1]
    span = xN - x0
    a = (x[1:] - x[:-1]) / span
    c = (xN * x[:-1] - x0 * x[1:]) / span
    d = (y[1:] - y[:-1]) / span - s * (yN - y0) / span
    e = (xN * y[:-1] - x0 * y[1:]) / span - s * (xN * y0 - x0 * yN) / span

    return FifModel(a=a, c=c, d=d, e=e, s=s, x_nodes=x, y_nodes=y)


def apply_map(model: FifModel, i, p):
    """Apply map `i` (1-based, like the interval numbering) to the point `p`."""
    if not 1 <= i <= model.n_maps:
        raise IndexOutOfRange(f"Map index must be in [1, {model.n_maps}], got {i}")
    x, y = p
    tol = X_TOLERANCE * (model.xN - model.x0)
    if not model.x0 - tol <= x <= model.xN + tol:
        raise AbscissaOutOfRange(f"x={x} outside [{model.x0}, {model.xN}]")
    k = i - 1
    return (model.a[k] * x + model.c[k], model.d[k] * x + model.s[k] * y + model.e[k])


def _dedupe(x, y, tol):
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    keep = np.ones(len(x), dtype=bool)
    keep[1:] = np.diff(x) > tol
    return x[keep], y[keep]


def _interior_counts(x, x_nodes, tol):
    """Number of points strictly inside every gap (further than `tol` from its nodes)."""
    n_gaps = len(x_nodes) - 1
    gap = np.clip(np.searchsorted(x_nodes, x, side="right") - 1, 0, n_gaps - 1)
    near_node = (np.abs(x - x_nodes[gap]) <= tol) | (np.abs(x - x_nodes[gap + 1]) <= tol)
    return np.bincount(gap[~near_node], minlength=n_gaps), near_node


def _pick_nearest_to_grid(candidates, left, right, n):
    """Indices of `n` distinct candidates (sorted x) nearest to the uniform grid of the gap."""
    m = len(candidates)
    grid = left + (right - left) * np.arange(1, n + 1) / (n + 1)
    idx = np.searchsorted(candidates, grid)
    lower = np.clip(idx - 1, 0, m - 1)
    upper = np.clip(idx, 0, m - 1)
    nearest = np.where(np.abs(candidates[lower] - grid) <= np.abs(candidates[upper] - grid), lower, upper)

    # Resolve collisions: strictly increasing, and leave room for the points still to come.
    picked = nearest.copy()
    for j in range(1, n):
        picked[j] = max(picked[j], picked[j - 1] + 1)
    picked[-1] = min(picked[-1], m - 1)
    for j in range(n - 2, -1, -1):
        picked[j] = min(picked[j], picked[j + 1] - 1)
    return picked


@perflog.timed_as("fif_generate")
def generate_fif(segment: TimeSeries, s, n_interpolation=DEFAULT_N_INTERPOLATION) -> InterpolatedSeries:
    """Interpolate `segment` with exactly `n_interpolation` fractal points in every gap.

    The Hutchinson operator is iterated on the node set until every gap holds at least
    `n_interpolation` interior points; then, per gap, the points nearest to the gap's
    uniform grid are kept. Node values are copied from the input unchanged.
    """
    if not isinstance(segment, TimeSeries):
        segment = TimeSeries.from_points(segment)
    if n_interpolation < 0:
        raise ValueError(f"n_interpolation must be >= 0, got {n_interpolation}")
    model = compute_coefficients(segment, s)
    x_nodes, y_nodes = segment.x, segment.y
    n_gaps = model.n_maps
    tol = X_TOLERANCE * (model.xN - model.x0)

    x, y = x_nodes.copy(), y_nodes.copy()
    iterations = 0
    counts = np.zeros(n_gaps, dtype=int)
    while n_interpolation > 0:
        counts, _ = _interior_counts(x, x_nodes, tol)
        if counts.min() >= n_interpolation:
            break
        if iterations == MAX_ITERATIONS:
            raise IterationLimitExceeded(
                f"{MAX_ITERATIONS} operator iterations left only {counts.min()} points in some gap, "
                f"{n_interpolation} needed")
        x, y = _dedupe(*model.apply_all(x, y), tol)
        iterations += 1

    # Shared endpoints come back from two maps with rounding noise; the input is authoritative.
    _, near_node = _interior_counts(x, x_nodes, tol)
    interior_x, interior_y = x[~near_node], y[~near_node]
    attractor = TimeSeries(*_dedupe(np.concatenate([x_nodes, interior_x]),
                                    np.concatenate([y_nodes, interior_y]), tol))

    out_x = [x_nodes[:1]]
    out_y = [y_nodes[:1]]
    gap_of = np.searchsorted(x_nodes, interior_x, side="right") - 1
    for i in range(n_gaps):
        if n_interpolation > 0:
            in_gap = gap_of == i
            cx, cy = interior_x[in_gap], interior_y[in_gap]
            picked = _pick_nearest_to_grid(cx, x_nodes[i], x_nodes[i + 1], n_interpolation)
            out_x.append(cx[picked])
            out_y.append(cy[picked])
        out_x.append(x_nodes[i + 1:i + 2])
        out_y.append(y_nodes[i + 1:i + 2])

    points = TimeSeries(np.concatenate(out_x), np.concatenate(out_y))
    node_indices = np.arange(n_gaps + 1) * (n_interpolation + 1)
    logger.debug("FIF over %d nodes: %d operator iterations, %d attractor points",
                 len(x_nodes), iterations, len(attractor))
    perflog.log_counter("fif_points", n_gaps * n_interpolation)
    return InterpolatedSeries(points=points, node_indices=node_indices,
                              n_interpolation=n_interpolation, attractor=attractor)


def generate_linear(segment: TimeSeries, n_interpolation=DEFAULT_N_INTERPOLATION) -> InterpolatedSeries:
    """Exactly `n_interpolation` evenly spaced points per gap on the piecewise-linear interpolant."""
    if not isinstance(segment, TimeSeries):
        segment = TimeSeries.from_points(segment)
    segment.require_length(2, SegmentTooShort)
    if n_interpolation < 0:
        raise ValueError(f"n_interpolation must be >= 0, got {n_interpolation}")
    x_nodes, y_nodes = segment.x, segment.y
    fractions = np.arange(1, n_interpolation + 1) / (n_interpolation + 1)

    out_x, out_y = [x_nodes[:1]], [y_nodes[:1]]
    for i in range(len(x_nodes) - 1):
        left, right = x_nodes[i], x_nodes[i + 1]
        out_x.append(left + (right - left) * fractions)
        out_y.append(y_nodes[i] + (y_nodes[i + 1] - y_nodes[i]) * fractions)
        out_x.append(x_nodes[i + 1:i + 2])
        out_y.append(y_nodes[i + 1:i + 2])

    points = TimeSeries(np.concatenate(out_x), np.concatenate(out_y))
    node_indices = np.arange(len(x_nodes)) * (n_interpolation + 1)
    return InterpolatedSeries(points=points, node_indices=node_indices, n_interpolation=n_interpolation)


def evaluate_linear(segment: TimeSeries, xs):
    """Piecewise-linear interpolant of the segment nodes, evaluated at `xs`."""
    if not isinstance(segment, TimeSeries):
        segment = TimeSeries.from_points(segment)
    segment.require_length(2, SegmentTooShort)
    xs = np.asarray(xs, dtype=float)
    tol = X_TOLERANCE * (segment.x[-1] - segment.x[0])
    if np.any(xs < segment.x[0] - tol) or np.any(xs > segment.x[-1] + tol):
        raise AbscissaOutOfRange(f"Abscissae must lie in [{segment.x[0]}, {segment.x[-1]}]")
    return np.interp(xs, segment.x, segment.y)


def fixed_point_residual(model: FifModel, series: InterpolatedSeries):
    """Largest distance between a generated point and the image of its preimage on the attractor.

    A generated point p in gap i should equal f_i(q) where q is the attractor point at
    abscissa (p.x - c_i) / a_i.
    """
    mask = series.generated_mask()
    if not mask.any():
        raise DegenerateSeries("Series has no generated points")
    attractor = series.attractor if series.attractor is not None else series.points

    px, py = series.x[mask], series.y[mask]
    gap = np.clip(np.searchsorted(model.x_nodes, px, side="right") - 1, 0, model.n_maps - 1)
    qx = (px - model.c[gap]) / model.a[gap]

    ax, ay = attractor.x, attractor.y
    idx = np.clip(np.searchsorted(ax, qx), 1, len(ax) - 1)
    idx = np.where(np.abs(ax[idx - 1] - qx) <= np.abs(ax[idx] - qx), idx - 1, idx)

    image_x = model.a[gap] * ax[idx] + model.c[gap]
    image_y = model.d[gap] * ax[idx] + model.s[gap] * ay[idx] + model.e[gap]
    return float(np.max(np.hypot(image_x - px, image_y - py)))
