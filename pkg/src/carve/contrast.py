"""Contrastive refinement and fusion of attention maps.

Question-conditioned attention mixes semantic focus with a visual bias
shared by any prompt on the same image. Dividing out the attention of a
neutral general instruction cancels that shared factor:

    refined = question_weights / (general_weights + lam)

which is the unique minimizer of the regularized objective
J(x) = sum((general + lam) * x^2 - 2 * question * x); see the oracle
module for the numeric cross-check. The regularizer lam keeps the
division stable where general attention is near zero; 0.05 is a good
default for softmax-scale weights.

Refined grids from several layers and steps are fused into one
pixel-level saliency map: each grid is resampled to the image size and
accumulated with linearly growing step weights w_t = t - t_start + 1
(later steps are more focused, so they count more). Maps are NOT
renormalized before fusion and the step weights are NOT normalized;
both choices keep the fused scale interpretable and the top-p
percentile threshold downstream is scale-free anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attention import AttentionMap, AttentionStack
from .errors import ValidationError

DEFAULT_LAMBDA = 0.05
RESHAPE_MODES = ("nearest", "bilinear")
STEP_SELECTORS = ("start", "end", "full")


@dataclass(frozen=True)
class ContrastConfig:
    """Settings for contrastive refinement."""

    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValidationError("lam must be finite and >= 0")


@dataclass(frozen=True)
class FusedSaliency:
    """Pixel-level saliency accumulated from refined attention grids."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.size == 0:
            raise ValidationError("saliency must be a non-empty 2-d array")
        if not np.isfinite(v).all():
            raise ValidationError("saliency must be finite")
        if (v < 0).any():
            raise ValidationError("saliency must be non-negative")
        if not v.any():
            raise ValidationError("saliency must not be all zero")
        v = np.ascontiguousarray(v).copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])


def _as_weights(x, name: str) -> np.ndarray:
    if isinstance(x, AttentionMap):
        return x.weights.astype(np.float64)
    arr = np.asarray(x, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} must be finite")
    return arr


def contrast_refine(question, general, config: ContrastConfig | None = None) -> np.ndarray:
    """Element-wise question / (general + lam), as float64.

    Accepts AttentionMap pairs (same grid required; the result has the
    map's 1-d weight shape) or plain arrays of matching shape. General
    weights must be non-negative; lam = 0 additionally requires them to
    be strictly positive.
    """
    cfg = config or ContrastConfig()
    if isinstance(question, AttentionMap) != isinstance(general, AttentionMap):
        raise ValidationError("mixed AttentionMap and array inputs")
    if isinstance(question, AttentionMap):
        if (question.grid_h, question.grid_w) != (general.grid_h, general.grid_w):
            raise ValidationError(
                f"grid mismatch: question {(question.grid_h, question.grid_w)} "
                f"vs general {(general.grid_h, general.grid_w)}"
            )
    a_q = _as_weights(question, "question weights")
    a_g = _as_weights(general, "general weights")
    if a_q.shape != a_g.shape:
        raise ValidationError(f"shape mismatch: {a_q.shape} vs {a_g.shape}")
    if (a_g < 0).any():
        raise ValidationError("general weights must be non-negative")
    if (a_q < 0).any():
        raise ValidationError("question weights must be non-negative")
    if cfg.lam == 0.0 and (a_g == 0.0).any():
        raise ValidationError("lam = 0 requires strictly positive general weights")
    return a_q / (a_g + cfg.lam)


def spatial_reshape(grid, target_h: int, target_w: int, mode: str = "nearest") -> np.ndarray:
    """Resample a token grid to pixel resolution (upscaling only).

    nearest: pixel (i, j) takes the value of token
    (i * grid_h // target_h, j * grid_w // target_w), giving exact
    token-aligned blocks when the target is an integer multiple.
    bilinear: centers-aligned linear interpolation, clamped at borders.
    """
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 2 or g.size == 0:
        raise ValidationError("grid must be a non-empty 2-d array")
    if mode not in RESHAPE_MODES:
        raise ValidationError(f"mode must be one of {RESHAPE_MODES}")
    gh, gw = g.shape
    if target_h < gh or target_w < gw:
        raise ValidationError(
            f"target {target_h}x{target_w} is smaller than the grid {gh}x{gw}"
        )
    if mode == "nearest":
        rows = (np.arange(target_h, dtype=np.int64) * gh) // target_h
        cols = (np.arange(target_w, dtype=np.int64) * gw) // target_w
        return g[np.ix_(rows, cols)]
    # bilinear with pixel-center alignment
    src_r = (np.arange(target_h, dtype=np.float64) + 0.5) * gh / target_h - 0.5
    src_c = (np.arange(target_w, dtype=np.float64) + 0.5) * gw / target_w - 0.5
    src_r = np.clip(src_r, 0.0, gh - 1.0)
    src_c = np.clip(src_c, 0.0, gw - 1.0)
    r0 = np.floor(src_r).astype(np.int64)
    c0 = np.floor(src_c).astype(np.int64)
    r1 = np.minimum(r0 + 1, gh - 1)
    c1 = np.minimum(c0 + 1, gw - 1)
    fr = (src_r - r0)[:, None]
    fc = (src_c - c0)[None, :]
    top = g[np.ix_(r0, c0)] * (1 - fc) + g[np.ix_(r0, c1)] * fc
    bot = g[np.ix_(r1, c0)] * (1 - fc) + g[np.ix_(r1, c1)] * fc
    return top * (1 - fr) + bot * fr


def resolve_steps(
    question: AttentionStack, general: AttentionStack, selector: str = "end"
) -> tuple:
    """Steps the pipeline fuses over: selector applied to the shared range.

    "start" keeps the earliest shared step, "end" the latest, "full"
    all of them. The shared range is the intersection of both stacks'
    step sets (each contiguous, so the intersection is too).
    """
    if selector not in STEP_SELECTORS:
        raise ValidationError(f"step selector must be one of {STEP_SELECTORS}")
    common = sorted(set(question.steps) & set(general.steps))
    if not common:
        raise ValidationError(
            f"stacks share no steps: {question.steps} vs {general.steps}"
        )
    if selector == "start":
        return (common[0],)
    if selector == "end":
        return (common[-1],)
    return tuple(common)


def fuse(
    refined_grids: dict,
    layers,
    steps,
    target_h: int,
    target_w: int,
    mode: str = "nearest",
) -> FusedSaliency:
    """Accumulate refined grids into pixel saliency.

    S = sum over steps t of (t - t_start + 1) * sum over layers of the
    resampled grid at (layer, t). Iteration order is fixed (sorted
    steps outer, sorted layers inner) so accumulation is deterministic.
    """
    layers = sorted(int(l) for l in layers)
    steps = sorted(int(t) for t in steps)
    if not layers or not steps:
        raise ValidationError("fuse needs at least one layer and one step")
    t_start = steps[0]
    out = np.zeros((target_h, target_w), np.float64)
    for t in steps:
        weight = float(t - t_start + 1)
        for l in layers:
            if (l, t) not in refined_grids:
                raise ValidationError(f"missing refined grid for layer {l}, step {t}")
            out += weight * spatial_reshape(refined_grids[(l, t)], target_h, target_w, mode)
    return FusedSaliency(out)
