"""Click-guided subject extraction.

Pixels are clustered over (R, G, B, distance-to-positive-clicks,
distance-to-negative-clicks) features; the subject mask is the union of
connected components that contain a positive click, minus components a
negative click lands in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ClickConflictError
from .imagecore import ClickSet, ImageBuffer, Mask, closing, connected_components, distance_transform

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 0.5, 0.5)
DEFAULT_K = 6
DEFAULT_CLOSING_RADIUS = 2
DEFAULT_POLICY = "clicked"

_MAX_LLOYD_ITERS = 500
_OBJECTIVE_SLACK = 1e-7  # float noise allowance for the monotonicity check


@dataclass(frozen=True)
class FeatureField:
    """Per-pixel (R, G, B, dpos, dneg) features, already weighted."""

    features: np.ndarray  # (height, width, 5) float64
    weights: tuple

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        if f.ndim != 3 or f.shape[2] != 5:
            raise ValueError(f"expected (h, w, 5) feature array, got {f.shape}")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def width(self) -> int:
        return self.features.shape[1]

    @property
    def height(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class ClusterModel:
    """Converged clustering: k centers plus a per-pixel label field."""

    k: int
    centers: np.ndarray  # (k, 5) float64
    labels: np.ndarray   # (height, width) int64 in [0, k)

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        l = np.asarray(self.labels)
        if c.shape[0] != self.k:
            raise ValueError("center count does not match k")
        if l.min(initial=0) < 0 or (self.k and l.max(initial=0) >= self.k):
            raise ValueError("labels outside [0, k)")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "labels", l)


def build_feature_field(
    image: ImageBuffer, clicks: ClickSet, weights=DEFAULT_WEIGHTS
) -> FeatureField:
    """Stack color channels with the two click-distance channels.

    Distance channels are clamped to twice the image diagonal so a lone
    far-away click cannot dominate color; each channel is then scaled by
    its weight. All five weights must be positive.
    """
    weights = tuple(float(w) for w in weights)
    if len(weights) != 5:
        raise ValueError(f"expected 5 channel weights, got {len(weights)}")
    if any(w <= 0 for w in weights):
        raise ValueError(f"channel weights must be positive, got {weights}")
    clicks.validate_bounds(image.width, image.height)
    h, w = image.height, image.width
    cap = 2.0 * float(np.hypot(w, h))
    dpos = np.minimum(distance_transform(clicks.positives, w, h).values, cap)
    dneg = np.minimum(distance_transform(clicks.negatives, w, h).values, cap)
    feats = np.empty((h, w, 5), dtype=np.float64)
    for c in range(3):
        feats[:, :, c] = image.pixels[:, :, c].astype(np.float64) * weights[c]
    feats[:, :, 3] = dpos * weights[3]
    feats[:, :, 4] = dneg * weights[4]
    return FeatureField(feats, weights)


def kmeans(
    features: FeatureField,
    k: int = DEFAULT_K,
    seed: int = 0,
    merge_threshold: float | None = None,
) -> ClusterModel:
    """Lloyd clustering with close-center merging.

    Runs Lloyd iterations to an assignment fixpoint, merges every center
    pair closer than `merge_threshold`, and repeats until no merge occurs.
    Deterministic for a fixed seed; the within-cluster sum of squares is
    checked to be non-increasing throughout. `merge_threshold` defaults to
    10% of the feature bounding-box diagonal.
    """
    flat = features.features.reshape(-1, 5)
    n = flat.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds pixel count {n}")
    if merge_threshold is None:
        span = flat.max(axis=0) - flat.min(axis=0)
        merge_threshold = 0.1 * float(np.linalg.norm(span))

    rng = np.random.default_rng(seed)
    centers = _seed_centers(flat, k, rng)
    guard = _MonotoneObjective()
    while True:
        centers, labels = _lloyd(flat, centers, guard)
        merged = _merge_close(flat, centers, labels, merge_threshold)
        if merged is None:
            break
        centers = merged
        guard.reset()  # merging trades objective for fewer clusters
    return ClusterModel(
        k=centers.shape[0],
        centers=centers,
        labels=labels.reshape(features.height, features.width),
    )


class _MonotoneObjective:
    def __init__(self):
        self.value = np.inf

    def reset(self):
        self.value = np.inf

    def check(self, flat, centers, labels):
        d = flat - centers[labels]
        obj = float(np.sum(d * d))
        if obj > self.value + _OBJECTIVE_SLACK * (1.0 + self.value):
            raise RuntimeError(
                f"clustering objective increased: {self.value} -> {obj}"
            )
        self.value = obj
        return obj


def _seed_centers(flat, k, rng):
    # farthest-point seeding after a seeded random first pick
    first = int(rng.integers(flat.shape[0]))
    centers = [flat[first]]
    d = np.sum((flat - flat[first]) ** 2, axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(d))
        centers.append(flat[nxt])
        d = np.minimum(d, np.sum((flat - flat[nxt]) ** 2, axis=1))
    return np.array(centers, dtype=np.float64)


def _lloyd(flat, centers, guard):
    prev = None
    for _ in range(_MAX_LLOYD_ITERS):
        labels = kernels.assign_labels(flat, centers)
        centers, labels = _fix_empty(flat, centers, labels)
        guard.check(flat, centers, labels)
        if prev is not None and np.array_equal(labels, prev):
            return centers, labels
        prev = labels
        centers = _means(flat, labels, centers.shape[0])
        guard.check(flat, centers, labels)
    return centers, labels


def _fix_empty(flat, centers, labels):
    # reseed empty clusters to the feature farthest from its center;
    # clusters that stay empty (duplicate features) are dropped
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    if (counts > 0).all():
        return centers, labels
    for _ in range(k):
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            break
        d = np.sum((flat - centers[labels]) ** 2, axis=1)
        moved = False
        for e in empties:
            far = int(np.argmax(d))
            if d[far] <= 0.0:
                break
            centers = centers.copy()
            centers[e] = flat[far]
            d[far] = 0.0
            moved = True
        labels = kernels.assign_labels(flat, centers)
        counts = np.bincount(labels, minlength=k)
        if not moved:
            break
    keep = np.flatnonzero(counts > 0)
    if keep.size < k:
        remap = np.full(k, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        centers = centers[keep]
        labels = remap[labels]
    return centers, labels


def _means(flat, labels, k):
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    centers = np.empty((k, flat.shape[1]), dtype=np.float64)
    for f in range(flat.shape[1]):
        centers[:, f] = np.bincount(labels, weights=flat[:, f], minlength=k) / counts
    return centers


def _merge_close(flat, centers, labels, threshold):
    k = centers.shape[0]
    if k < 2:
        return None
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    merged = False
    for i in range(k):
        for j in range(i + 1, k):
            if np.linalg.norm(centers[i] - centers[j]) < threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
                    merged = True
    if not merged:
        return None
    roots = sorted({find(i) for i in range(k)})
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    new_centers = []
    for r in roots:
        members = [i for i in range(k) if find(i) == r]
        w = counts[members]
        new_centers.append((centers[members] * w[:, None]).sum(axis=0) / w.sum())
    return np.array(new_centers, dtype=np.float64)


def extract_subject(model: ClusterModel, clicks: ClickSet) -> Mask:
    """Mask from the cluster model: components of positively clicked
    clusters that contain a positive click, minus any component holding a
    negative click. Raises ClickConflictError if nothing survives.
    """
    if not clicks.positives:
        raise ValueError("at least one positive click is required")
    h, w = model.labels.shape
    clicks.validate_bounds(w, h)

    pos_clusters = {int(model.labels[y, x]) for x, y in clicks.positives}
    candidate = np.isin(model.labels, sorted(pos_clusters))
    comp, _ = connected_components(Mask(candidate))
    pos_ids = {int(comp[y, x]) for x, y in clicks.positives}
    neg_ids = {int(comp[y, x]) for x, y in clicks.negatives} - {0}
    keep = pos_ids - neg_ids
    if not keep:
        raise ClickConflictError(
            "clicks conflict: every positively clicked region also has a negative click"
        )
    return Mask(np.isin(comp, sorted(keep)))


def refine_mask(
    mask: Mask,
    closing_radius: float = DEFAULT_CLOSING_RADIUS,
    keep: str = DEFAULT_POLICY,
    clicks: ClickSet | None = None,
) -> Mask:
    """Morphological closing followed by component filtering.

    `keep` is one of "all", "largest" (ties to the first component in
    raster order) or "clicked" (components containing a positive click;
    requires `clicks`).
    """
    if closing_radius < 0:
        raise ValueError("closing_radius must be >= 0")
    if keep not in ("all", "largest", "clicked"):
        raise ValueError(f"unknown component policy {keep!r}")
    closed = closing(mask, closing_radius)
    if keep == "all":
        return closed
    labels, count = connected_components(closed)
    if count == 0:
        return closed
    if keep == "largest":
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        best = int(np.argmax(sizes[1:])) + 1
        return Mask(labels == best)
    if clicks is None or not clicks.positives:
        raise ValueError('policy "clicked" requires a ClickSet with positive clicks')
    clicks.validate_bounds(mask.width, mask.height)
    ids = {int(labels[y, x]) for x, y in clicks.positives} - {0}
    return Mask(np.isin(labels, sorted(ids)))
