"""Deterministic visual-feature extractors and criterion-based label suggestion.

Extractors compute measurable proxies (luminance key, symmetry, negative
space, warmth gradient, edge hardness, ...) from 8-bit RGB rasters or from
annotator-supplied geometry (polyline paths, line segments). They grade
proxies, not art judgments: suggestion output is advisory only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import (
    AllParallel,
    BandsExceedHeight,
    DegeneratePath,
    ImageTooSmall,
)
from .schema import Schema

# Engine constants. Values are design decisions, not sourced from theory;
# schema criteria may override the derived thresholds per node.
CONSTANTS = {
    "tonal_high_threshold": 0.60,
    "tonal_low_threshold": 0.40,
    "flat_local_std": 0.02,
    "flat_component_min_area": 0.01,
    "hard_edge_gradient": 0.05,
    "hard_edge_max_width_px": 2,
    "warmth_bands_default": 5,
    "parallel_tolerance": 1e-9,
}
CONSTANTS_VERSION = "1"

# Rec.709 luminance weights.
_LUMA = np.array([0.2126, 0.7152, 0.0722])

GOLDEN_POINTS = [(x, y) for x in (0.382, 0.618) for y in (0.382, 0.618)]

TONAL_CLASSES = {"low": 0, "full": 1, "high": 2}


def _as_raster(img) -> np.ndarray:
    """Coerce to a (h, w, 3) uint8 array; alpha channels are dropped."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValueError(f"expected (h, w, 3) RGB raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("raster must be at least 1x1")
    return arr[:, :, :3].astype(np.uint8)


def _luminance(img: np.ndarray) -> np.ndarray:
    return img.astype(np.float64) @ _LUMA / 255.0


def luminance_stats(img) -> dict[str, float]:
    lum = _luminance(_as_raster(img))
    return {"mean_luminance": float(lum.mean()), "luminance_std": float(lum.std())}


def tonal_key(img) -> str:
    mean = luminance_stats(img)["mean_luminance"]
    if mean >= CONSTANTS["tonal_high_threshold"]:
        return "high"
    if mean <= CONSTANTS["tonal_low_threshold"]:
        return "low"
    return "full"


def symmetry_score(img, axis: str) -> float:
    """1 minus the mean |L(p) - L(mirror(p))|; a mirror-symmetric image scores 1.

    ``vertical_mirror`` reflects across the vertical axis (left-right),
    ``horizontal_mirror`` across the horizontal axis (top-bottom).
    """
    lum = _luminance(_as_raster(img))
    if axis == "vertical_mirror":
        mirrored = lum[:, ::-1]
    elif axis == "horizontal_mirror":
        mirrored = lum[::-1, :]
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return float(1.0 - np.abs(lum - mirrored).mean())


def negative_space_ratio(img) -> float:
    """Fraction of pixels in large flat regions (local 3x3 luminance std
    below the flatness constant, connected component at least 1% of the
    image)."""
    lum = _luminance(_as_raster(img))
    mean = ndimage.uniform_filter(lum, size=3, mode="nearest")
    mean_sq = ndimage.uniform_filter(lum * lum, size=3, mode="nearest")
    local_var = np.maximum(mean_sq - mean * mean, 0.0)
    flat = np.sqrt(local_var) < CONSTANTS["flat_local_std"]
    labeled, count = ndimage.label(flat)
    if count == 0:
        return 0.0
    sizes = ndimage.sum_labels(np.ones_like(lum), labeled, index=np.arange(1, count + 1))
    min_area = CONSTANTS["flat_component_min_area"] * lum.size
    kept = sizes[sizes >= min_area].sum()
    return float(kept / lum.size)


def fill_ratio(img) -> float:
    return 1.0 - negative_space_ratio(img)


def warm_cold_gradient(img, bands: int = None) -> float:
    """Least-squares slope of band-mean warmth (R-B)/255 from the bottom
    band to the top, scaled so a full warm-to-cold ramp maps to -1.

    Negative values mean cooler toward the top of the picture, the
    aerial-perspective signature.
    """
    if bands is None:
        bands = CONSTANTS["warmth_bands_default"]
    if bands < 2:
        raise ValueError("bands must be >= 2")
    arr = _as_raster(img).astype(np.float64)
    height = arr.shape[0]
    if bands > height:
        raise BandsExceedHeight(f"{bands} bands requested for a {height}-row image")
    warmth = (arr[:, :, 0] - arr[:, :, 2]) / 255.0
    # Band 0 is the bottom of the picture; image rows run top to bottom.
    edges = np.linspace(0, height, bands + 1).astype(int)
    band_means = [
        warmth[edges[i]:edges[i + 1]].mean() for i in range(bands)
    ][::-1]
    x = np.arange(bands, dtype=np.float64)
    slope = np.polyfit(x, band_means, 1)[0]
    scaled = slope * (bands - 1) / 2.0
    return float(np.clip(scaled, -1.0, 1.0))


def saturation_stats(img) -> dict[str, float]:
    arr = _as_raster(img).astype(np.float64) / 255.0
    maxc = arr.max(axis=2)
    minc = arr.min(axis=2)
    sat = np.where(maxc > 0, (maxc - minc) / np.where(maxc > 0, maxc, 1.0), 0.0)
    return {"mean_saturation": float(sat.mean())}


# Quantized gradient directions as (dy, dx), one per 45-degree sector of
# atan2(gy, gx).
_DIRECTIONS8 = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
]


def _shifted(padded: np.ndarray, shape: tuple[int, int], dy: int, dx: int, pad: int) -> np.ndarray:
    h, w = shape
    return padded[pad + dy : pad + dy + h, pad + dx : pad + dx + w]


def hard_edge_fraction(img) -> float:
    """Among pixels with luminance gradient above the threshold, the
    fraction whose monotone transition along the gradient direction spans
    at most the hard-edge width."""
    raster = _as_raster(img)
    h, w = raster.shape[:2]
    if h < 3 or w < 3:
        raise ImageTooSmall(f"need at least 3x3, got {h}x{w}")
    lum = _luminance(raster)
    gy, gx = np.gradient(lum)
    magnitude = np.hypot(gx, gy)
    candidates = magnitude > CONSTANTS["hard_edge_gradient"]
    n_candidates = int(candidates.sum())
    if n_candidates == 0:
        return 0.0
    angle = np.arctan2(gy, gx)
    sector = np.rint(angle / (math.pi / 4)).astype(int) % 8

    max_width = CONSTANTS["hard_edge_max_width_px"]
    steps = max_width + 1  # one step past the limit decides hard vs soft
    eps = 1e-9
    pad = steps
    padded = np.pad(lum, pad, constant_values=np.nan)

    width = np.zeros_like(lum)
    for s, (dy, dx) in enumerate(_DIRECTIONS8):
        mask = sector == s
        if not mask.any():
            continue
        # Count monotone rising steps along +d and falling steps along -d.
        run = np.zeros_like(lum)
        alive = np.ones_like(lum, dtype=bool)
        prev = lum
        for k in range(1, steps + 1):
            nxt = _shifted(padded, lum.shape, k * dy, k * dx, pad)
            alive = alive & (nxt > prev + eps)
            run += alive
            prev = nxt
        alive = np.ones_like(lum, dtype=bool)
        prev = lum
        for k in range(1, steps + 1):
            nxt = _shifted(padded, lum.shape, -k * dy, -k * dx, pad)
            alive = alive & (nxt < prev - eps)
            run += alive
            prev = nxt
        width[mask] = run[mask]

    hard = candidates & (width <= max_width)
    return float(hard.sum() / n_candidates)


def s_curve_coverage(path, axis: str = "height") -> float:
    """Extent of the polyline along the picture axis, as a [0, 1] ratio.

    Depends only on the point set, so any reparameterization of the same
    polyline scores identically.
    """
    points = [tuple(p) for p in path]
    if len(points) < 2:
        raise DegeneratePath("polyline needs at least 2 points")
    idx = 1 if axis == "height" else 0
    if axis not in ("height", "width"):
        raise ValueError(f"unknown axis {axis!r}")
    coords = [p[idx] for p in points]
    return float(max(coords) - min(coords))


@dataclass(frozen=True)
class VanishingPoint:
    point: tuple[float, float]
    convergence_rms: float


def vanishing_point(lines) -> VanishingPoint:
    """Least-squares point minimizing squared perpendicular distance to the
    infinite extensions of the given segments.

    Raises AllParallel when the normal-equations matrix is singular within
    tolerance (parallel bundle or fewer than two distinct directions).
    """
    normals = []
    offsets = []
    for (x1, y1), (x2, y2) in lines:
        dx, dy = x2 - x1, y2 - y1
        norm = math.hypot(dx, dy)
        if norm == 0:
            continue
        n = (-dy / norm, dx / norm)
        normals.append(n)
        offsets.append(n[0] * x1 + n[1] * y1)
    if len(normals) < 2:
        raise AllParallel("need at least 2 non-degenerate lines")
    N = np.array(normals)
    c = np.array(offsets)
    A = N.T @ N
    if np.linalg.eigvalsh(A)[0] < CONSTANTS["parallel_tolerance"]:
        raise AllParallel("lines have no unique least-squares intersection")
    p = np.linalg.solve(A, N.T @ c)
    residuals = N @ p - c
    rms = float(np.sqrt(np.mean(residuals**2)))
    return VanishingPoint(point=(float(p[0]), float(p[1])), convergence_rms=rms)


def golden_point_min_distance(center) -> float:
    """Euclidean distance from a point in the unit square to the nearest of
    the four golden-section points."""
    x, y = center
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ValueError("point must lie in the unit square")
    return min(math.hypot(x - gx, y - gy) for gx, gy in GOLDEN_POINTS)


def extract_all(img, path=None, lines=None, path_axis: str = "height") -> dict[str, float]:
    """Compute every applicable feature key; keys needing absent inputs are
    omitted. Deterministic for identical inputs."""
    raster = _as_raster(img)
    fv = {}
    fv.update(luminance_stats(raster))
    fv["tonal_key_class"] = TONAL_CLASSES[tonal_key(raster)]
    fv["symmetry_h"] = symmetry_score(raster, "horizontal_mirror")
    fv["symmetry_v"] = symmetry_score(raster, "vertical_mirror")
    fv["negative_space_ratio"] = negative_space_ratio(raster)
    fv["fill_ratio"] = 1.0 - fv["negative_space_ratio"]
    fv.update(saturation_stats(raster))
    bands = min(CONSTANTS["warmth_bands_default"], raster.shape[0])
    if bands >= 2:
        fv["warm_cold_gradient"] = warm_cold_gradient(raster, bands=bands)
    if raster.shape[0] >= 3 and raster.shape[1] >= 3:
        fv["hard_edge_fraction"] = hard_edge_fraction(raster)
    if path is not None:
        fv["s_curve_coverage"] = s_curve_coverage(path, axis=path_axis)
    if lines is not None:
        vp = vanishing_point(lines)
        fv["vanishing_convergence"] = vp.convergence_rms
        clamped = (min(max(vp.point[0], 0.0), 1.0), min(max(vp.point[1], 0.0), 1.0))
        fv["golden_point_min_distance"] = golden_point_min_distance(clamped)
    return fv


@dataclass(frozen=True)
class Suggestion:
    node_id: str
    satisfied_criteria: tuple[str, ...]
    score: float

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "satisfied_criteria": list(self.satisfied_criteria),
            "score": self.score,
        }


def suggest_labels(schema: Schema, fv: dict[str, float]) -> list[Suggestion]:
    """Advisory label suggestions from measurable criteria.

    A node is listed iff it has at least one criterion whose feature key is
    present in the vector and every such present-key criterion is
    satisfied. Score is the satisfied fraction over all of the node's
    criteria; ties break by node id.
    """
    suggestions = []
    for node in schema.nodes.values():
        if not node.criteria:
            continue
        present = [c for c in node.criteria if c.feature_key in fv]
        if not present:
            continue
        if not all(c.is_satisfied(fv[c.feature_key]) for c in present):
            continue
        satisfied = tuple(c.feature_key for c in present)
        suggestions.append(
            Suggestion(
                node_id=node.id,
                satisfied_criteria=satisfied,
                score=len(present) / len(node.criteria),
            )
        )
    return sorted(suggestions, key=lambda s: (-s.score, s.node_id))
