"""Saliency thresholding, region selection, and image refinement.

The fused saliency map is cut at its top-p percentile (nearest-rank:
the threshold is the k-th largest value with k = ceil(p * H * W), and
every pixel >= threshold survives, so ties can keep more than k).
Survivors are grouped into connected regions, the K regions with the
highest cumulative saliency are kept, and the image is refined by
filling everything else, cropping to the kept regions' tight bounding
box, and resizing back to the original frame.

All orderings are deterministic: regions enumerate by bounding box
(top, left, bottom, right) then first pixel in row-major order, and
selection breaks score ties by that enumeration order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .attention import AttentionStack, layer_entropies
from .contrast import (
    DEFAULT_LAMBDA,
    RESHAPE_MODES,
    STEP_SELECTORS,
    ContrastConfig,
    FusedSaliency,
    contrast_refine,
    fuse,
    resolve_steps,
)
from .errors import EmptyMaskWarning, ValidationError
from .imaging import ImageRGB

CONNECTIVITIES = (4, 8)
RESIZE_POLICIES = ("fit_pad", "stretch")


@dataclass(frozen=True)
class CarveConfig:
    """Tunables for the mask-generation pipeline (defaults in braces)."""

    p: float = 0.4
    k: int = 2
    lam: float = DEFAULT_LAMBDA
    layer_start: int = 20
    layer_end: int = 25
    step_select: str = "end"
    connectivity: int = 8
    fill: tuple = (0, 0, 0)
    resize_policy: str = "fit_pad"
    reshape_mode: str = "nearest"

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValidationError("p must be in (0, 1]")
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValidationError("lam must be finite and >= 0")
        if self.layer_start > self.layer_end:
            raise ValidationError("layer range must be non-empty")
        if self.step_select not in STEP_SELECTORS:
            raise ValidationError(f"step_select must be one of {STEP_SELECTORS}")
        if self.connectivity not in CONNECTIVITIES:
            raise ValidationError(f"connectivity must be one of {CONNECTIVITIES}")
        fill = tuple(int(c) for c in self.fill)
        if len(fill) != 3 or any(not 0 <= c <= 255 for c in fill):
            raise ValidationError("fill must be three channel values in [0, 255]")
        if self.resize_policy not in RESIZE_POLICIES:
            raise ValidationError(f"resize_policy must be one of {RESIZE_POLICIES}")
        if self.reshape_mode not in RESHAPE_MODES:
            raise ValidationError(f"reshape_mode must be one of {RESHAPE_MODES}")
        object.__setattr__(self, "fill", fill)

    @property
    def layer_range(self) -> tuple:
        return (self.layer_start, self.layer_end)


@dataclass(frozen=True)
class Region:
    """One connected component of above-threshold saliency."""

    pixels: np.ndarray  # (n, 2) row, col in row-major order
    bbox: tuple  # (top, left, bottom, right), inclusive
    cumulative_score: float

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.int64)
        if px.ndim != 2 or px.shape[1] != 2 or px.shape[0] == 0:
            raise ValidationError("pixels must be a non-empty (n, 2) array")
        px = np.ascontiguousarray(px).copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "bbox", tuple(int(v) for v in self.bbox))

    @property
    def size(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class CarveMask:
    """Binary keep-mask plus the regions that formed it."""

    bits: np.ndarray
    regions: tuple = ()

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.size == 0:
            raise ValidationError("mask bits must be a non-empty 2-d array")
        bits = (bits != 0).astype(np.uint8)
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "regions", tuple(self.regions))

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def coverage(self) -> float:
        return float(self.bits.mean(dtype=np.float64))

    def is_empty(self) -> bool:
        return not bool(self.bits.any())


def _saliency_values(s) -> np.ndarray:
    if isinstance(s, FusedSaliency):
        return s.values
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError("saliency must be a non-empty 2-d array")
    if not np.isfinite(arr).all():
        raise ValidationError("saliency must be finite")
    return arr


def percentile_threshold(saliency, p: float) -> float:
    """Nearest-rank top-p cut: the k-th largest value, k = ceil(p * n).

    Retaining {values >= threshold} keeps at least k pixels; ties at
    the threshold keep their whole tier.
    """
    values = _saliency_values(saliency)
    if not (0.0 < p <= 1.0):
        raise ValidationError("p must be in (0, 1]")
    flat = np.sort(values, axis=None)
    n = flat.size
    k = int(np.ceil(p * n))
    k = min(max(k, 1), n)
    return float(flat[n - k])


def connected_components(mask, connectivity: int, saliency) -> list:
    """Regions of the mask, ordered by (bbox, first pixel); scores from S."""
    if connectivity not in CONNECTIVITIES:
        raise ValidationError(f"connectivity must be one of {CONNECTIVITIES}")
    values = _saliency_values(saliency)
    mask = np.asarray(mask)
    if mask.shape != values.shape:
        raise ValidationError(
            f"mask shape {mask.shape} does not match saliency {values.shape}"
        )
    labels = kernels.label_components(mask, connectivity)
    n = int(labels.max())
    if n == 0:
        return []
    flat_labels = labels.ravel()
    fg = np.flatnonzero(flat_labels)
    # group pixel indices by label without an O(n_labels * n_pixels) scan
    order = fg[np.argsort(flat_labels[fg], kind="stable")]
    bounds = np.searchsorted(flat_labels[order], np.arange(1, n + 2))
    width = values.shape[1]
    regions = []
    for lbl in range(n):
        lin = np.sort(order[bounds[lbl]:bounds[lbl + 1]])
        rows = lin // width
        cols = lin % width
        px = np.stack([rows, cols], axis=1)
        bbox = (int(rows.min()), int(cols.min()), int(rows.max()), int(cols.max()))
        score = float(values[rows, cols].sum(dtype=np.float64))
        regions.append(Region(px, bbox, score))
    regions.sort(
        key=lambda r: (r.bbox, int(r.pixels[0, 0]), int(r.pixels[0, 1]))
    )
    return regions


def select_regions(regions, saliency, k: int) -> CarveMask:
    """Union of the k highest-scoring regions (ties keep earlier regions)."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    values = _saliency_values(saliency)
    ranked = sorted(
        enumerate(regions), key=lambda pair: (-pair[1].cumulative_score, pair[0])
    )
    kept = [r for _, r in ranked[: min(k, len(ranked))]]
    bits = np.zeros(values.shape, np.uint8)
    for r in kept:
        bits[r.pixels[:, 0], r.pixels[:, 1]] = 1
    return CarveMask(bits, tuple(kept))


@dataclass(frozen=True)
class ExtractResult:
    image: ImageRGB
    used_fallback: bool
    crop_bbox: tuple | None = None


def _resize_nearest(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    src_h, src_w = pixels.shape[:2]
    rows = (np.arange(out_h, dtype=np.int64) * src_h) // out_h
    cols = (np.arange(out_w, dtype=np.int64) * src_w) // out_w
    return pixels[np.ix_(rows, cols)]


def extract(image: ImageRGB, mask: CarveMask, config: CarveConfig | None = None) -> ExtractResult:
    """Refine an image with a carve mask: fill, crop, resize.

    Pixels outside the mask take the fill color; the result is cropped
    to the mask's tight bounding box and resized back to the original
    frame, either stretched or aspect-preserving with centered padding
    ("fit_pad"). An empty mask returns the original image unchanged
    with the fallback flag set (and an EmptyMaskWarning).
    """
    cfg = config or CarveConfig()
    if not isinstance(image, ImageRGB):
        raise ValidationError("image must be an ImageRGB")
    if (mask.height, mask.width) != (image.height, image.width):
        raise ValidationError(
            f"mask {mask.height}x{mask.width} does not match "
            f"image {image.height}x{image.width}"
        )
    if mask.is_empty():
        warnings.warn(
            "carve mask is empty; passing the original image through",
            EmptyMaskWarning,
            stacklevel=2,
        )
        return ExtractResult(image, True, None)

    h, w = image.height, image.width
    fill = np.array(cfg.fill, np.uint8)
    keep = mask.bits.astype(bool)
    masked = np.where(keep[..., None], image.pixels, fill[None, None, :])

    rows = np.flatnonzero(keep.any(axis=1))
    cols = np.flatnonzero(keep.any(axis=0))
    top, bottom = int(rows[0]), int(rows[-1])
    left, right = int(cols[0]), int(cols[-1])
    crop = masked[top:bottom + 1, left:right + 1]
    ch, cw = crop.shape[:2]

    if cfg.resize_policy == "stretch":
        out = _resize_nearest(crop, h, w)
    else:
        scale = min(h / ch, w / cw)
        out_h = min(max(int(round(ch * scale)), 1), h)
        out_w = min(max(int(round(cw * scale)), 1), w)
        scaled = _resize_nearest(crop, out_h, out_w)
        canvas = np.empty((h, w, 3), np.uint8)
        canvas[:, :] = fill
        oy = (h - out_h) // 2
        ox = (w - out_w) // 2
        canvas[oy:oy + out_h, ox:ox + out_w] = scaled
        out = canvas
    return ExtractResult(
        ImageRGB(np.ascontiguousarray(out, dtype=np.uint8)),
        False,
        (top, left, bottom, right),
    )


def progressive_mask(image: ImageRGB, saliency, ratio: float, fill=(0, 0, 0)) -> ImageRGB:
    """Fill the floor(ratio * H * W) least-salient pixels with a color.

    The automated analogue of occluding background detail first: ties
    and ordering are stable (flat row-major argsort), so a given
    saliency map and ratio always hide the same pixels.
    """
    if not isinstance(image, ImageRGB):
        raise ValidationError("image must be an ImageRGB")
    if not (0.0 <= ratio <= 1.0):
        raise ValidationError("ratio must be in [0, 1]")
    values = _saliency_values(saliency)
    if values.shape != (image.height, image.width):
        raise ValidationError(
            f"saliency {values.shape} does not match image "
            f"{(image.height, image.width)}"
        )
    fill = tuple(int(c) for c in fill)
    if len(fill) != 3 or any(not 0 <= c <= 255 for c in fill):
        raise ValidationError("fill must be three channel values in [0, 255]")
    n_fill = int(np.floor(ratio * values.size))
    out = image.pixels.copy()
    if n_fill > 0:
        order = np.argsort(values, axis=None, kind="stable")
        idx = order[:n_fill]
        flat = out.reshape(-1, 3)
        flat[idx] = np.array(fill, np.uint8)
        out = flat.reshape(out.shape)
    return ImageRGB(out)


@dataclass(frozen=True)
class PipelineResult:
    """Everything the end-to-end carve produces, for output and diagnostics."""

    image: ImageRGB
    saliency: FusedSaliency
    mask: CarveMask
    tau: float
    regions_considered: int
    steps_used: tuple
    per_layer_entropy: dict
    overall_entropy: float
    used_fallback: bool
    crop_bbox: tuple | None
    config: CarveConfig = field(repr=False, default=None)


def compute_saliency(
    image: ImageRGB,
    question: AttentionStack,
    general: AttentionStack,
    config: CarveConfig | None = None,
) -> tuple:
    """Contrast and fuse two stacks into pixel saliency for an image.

    Returns (saliency, steps_used). The two stacks must share a token
    grid and prompt kinds must match their roles (question vs general).
    """
    cfg = config or CarveConfig()
    if not isinstance(image, ImageRGB):
        raise ValidationError("image must be an ImageRGB")
    if question.prompt_kind != "question":
        raise ValidationError("first stack must have prompt_kind 'question'")
    if general.prompt_kind != "general":
        raise ValidationError("second stack must have prompt_kind 'general'")
    if (question.grid_h, question.grid_w) != (general.grid_h, general.grid_w):
        raise ValidationError(
            f"token grids differ: {(question.grid_h, question.grid_w)} "
            f"vs {(general.grid_h, general.grid_w)}"
        )

    layers = [
        l for l in question.layers
        if cfg.layer_start <= l <= cfg.layer_end and l in general.layers
    ]
    if not layers:
        raise ValidationError(
            f"no shared layers in range {cfg.layer_range}; "
            f"question has {question.layers}, general has {general.layers}"
        )
    steps = resolve_steps(question, general, cfg.step_select)

    ccfg = ContrastConfig(lam=cfg.lam)
    refined = {}
    for t in steps:
        for l in layers:
            flat = contrast_refine(question.map(l, t), general.map(l, t), ccfg)
            refined[(l, t)] = flat.reshape(question.grid_h, question.grid_w)

    saliency = fuse(
        refined, layers, steps, image.height, image.width, cfg.reshape_mode
    )
    return saliency, steps


def carve_pipeline(
    image: ImageRGB,
    question: AttentionStack,
    general: AttentionStack,
    config: CarveConfig | None = None,
) -> PipelineResult:
    """Full refinement: contrast, fuse, threshold, select, extract.

    Entropy diagnostics are computed on the question stack at its final
    step over the configured layer range.
    """
    cfg = config or CarveConfig()
    saliency, steps = compute_saliency(image, question, general, cfg)
    tau = percentile_threshold(saliency, cfg.p)
    above = saliency.values >= tau
    regions = connected_components(above, cfg.connectivity, saliency)
    mask = select_regions(regions, saliency, cfg.k)
    result = extract(image, mask, cfg)

    per_layer = layer_entropies(question, cfg.layer_range, question.t_end)
    overall = float(np.mean([per_layer[l] for l in sorted(per_layer)]))
    return PipelineResult(
        image=result.image,
        saliency=saliency,
        mask=mask,
        tau=tau,
        regions_considered=len(regions),
        steps_used=steps,
        per_layer_entropy=per_layer,
        overall_entropy=overall,
        used_fallback=result.used_fallback,
        crop_bbox=result.crop_bbox,
        config=cfg,
    )
