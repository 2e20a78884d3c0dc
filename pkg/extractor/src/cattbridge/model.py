"""Model references and the deterministic stub bridge.

A bridge exposes four things: a ModelRef describing geometry, image
preparation, greedy generation with per-layer/per-step visual-token
attention, and next-token candidate probabilities. The stub implements
the contract in pure numpy so every downstream path can be exercised
without weights or accelerators: attention is exactly uniform over the
visual grid, decoding is a fixed token sequence, and candidate
probabilities are a deterministic softmax over image statistics, so the
same pixels always produce the same bits.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    BridgeValidationError,
    CandidateTokenError,
    ImageMismatchError,
    ModelUnavailableError,
)

STUB_MODEL_ID = "stub-uniform-448"

# fixed greedy continuation the stub "decodes" regardless of prompt
_STUB_TOKENS = (
    "a", "quiet", "scene", "with", "mixed",
    "detail", "and", "balanced", "tones", "overall",
)


@dataclass(frozen=True)
class ModelRef:
    """Geometry of one vision-language model.

    grid_h * grid_w must equal the visual token count the processor
    reports; resolution must tile exactly into patches.
    """

    model_id: str
    resolution: int
    patch_size: int
    grid_h: int
    grid_w: int
    n_layers: int

    def __post_init__(self):
        if self.resolution < 1 or self.patch_size < 1:
            raise BridgeValidationError("resolution and patch size must be positive")
        if self.grid_h < 1 or self.grid_w < 1 or self.n_layers < 1:
            raise BridgeValidationError("grid and layer count must be positive")
        if self.resolution % self.patch_size != 0:
            raise BridgeValidationError(
                f"resolution {self.resolution} is not a multiple of patch {self.patch_size}"
            )
        side = self.resolution // self.patch_size
        if self.grid_h * self.grid_w != side * side:
            raise BridgeValidationError(
                f"grid {self.grid_h}x{self.grid_w} does not cover the "
                f"{side * side} visual tokens the processor reports"
            )

    @property
    def n_visual(self) -> int:
        return self.grid_h * self.grid_w


def load_image_rgb(path) -> np.ndarray:
    """Decode a PNG or JPEG to uint8 (H, W, 3). Alpha composites over black."""
    try:
        with Image.open(path) as img:
            if img.mode == "RGB":
                rgb = img.copy()
            else:
                rgba = img.convert("RGBA")
                black = Image.new("RGBA", rgba.size, (0, 0, 0, 255))
                rgb = Image.alpha_composite(black, rgba).convert("RGB")
    except UnidentifiedImageError as exc:
        raise ImageMismatchError(f"cannot decode image {path}: {exc}") from exc
    return np.asarray(rgb, dtype=np.uint8)


def _token_direction(token: str, dims: int) -> np.ndarray:
    # stable per-token unit vector; sha256 so results never depend on
    # the process hash seed
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    raw = np.frombuffer(digest, dtype=np.uint8)[:dims].astype(np.float64)
    vec = (raw - 127.5) / 127.5
    return vec / np.linalg.norm(vec)


class StubVlm:
    """Pure-numpy bridge with uniform attention and greedy fixed decoding."""

    def __init__(self):
        self.ref = ModelRef(
            model_id=STUB_MODEL_ID,
            resolution=448,
            patch_size=32,
            grid_h=14,
            grid_w=14,
            n_layers=28,
        )

    def prepare_image(self, image) -> np.ndarray:
        """Accept a path or an (H, W, 3) uint8 array at the stub resolution."""
        pixels = image if isinstance(image, np.ndarray) else load_image_rgb(image)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
            raise ImageMismatchError("image must decode to uint8 (H, W, 3)")
        want = (self.ref.resolution, self.ref.resolution)
        if pixels.shape[:2] != want:
            raise ImageMismatchError(
                f"stub processor expects {want[0]}x{want[1]} images, "
                f"got {pixels.shape[0]}x{pixels.shape[1]}"
            )
        return pixels

    def tokenize_single(self, candidate: str) -> str:
        """The stub tokenizer: one token per whitespace-free word."""
        if not isinstance(candidate, str) or not candidate:
            raise CandidateTokenError("candidate must be a non-empty string")
        if len(candidate.split()) != 1 or candidate != candidate.strip():
            raise CandidateTokenError(
                f"candidate {candidate!r} does not map to a single token"
            )
        return candidate

    def generate_with_attention(self, pixels, prompt, layers, max_steps):
        """Greedy decode with uniform visual attention at every layer.

        Returns (tokens, maps) where maps[(layer, step)] is the
        head-averaged attention grid over visual tokens.
        """
        self.prepare_image(pixels)
        if not isinstance(prompt, str) or not prompt:
            raise BridgeValidationError("prompt must be a non-empty string")
        if max_steps < 1:
            raise BridgeValidationError("max_steps must be >= 1")
        for l in layers:
            if not 0 <= l < self.ref.n_layers:
                raise BridgeValidationError(
                    f"layer {l} out of range for {self.ref.n_layers}-layer model"
                )
        n = min(int(max_steps), len(_STUB_TOKENS))
        tokens = list(_STUB_TOKENS[:n])
        uniform = np.full((self.ref.grid_h, self.ref.grid_w), 1.0 / self.ref.n_visual)
        maps = {(l, t): uniform for l in layers for t in range(n)}
        return tokens, maps

    def candidate_log10_probs(self, pixels, question, candidates) -> dict:
        """log10 next-token probability per candidate, deterministically.

        Logits are dot products between image statistics and per-token
        hash directions, softmaxed over the candidates plus a catch-all
        rest-of-vocabulary bucket, so linear probabilities always sum
        below 1.
        """
        pixels = self.prepare_image(pixels)
        if not isinstance(question, str) or not question:
            raise BridgeValidationError("question must be a non-empty string")
        if not candidates:
            raise BridgeValidationError("at least one candidate is required")
        names = [self.tokenize_single(c) for c in candidates]
        if len(set(names)) != len(names):
            raise BridgeValidationError("candidates must be distinct")

        px = pixels.astype(np.float64) / 255.0
        gray = px.mean(axis=2)
        feats = np.array(
            [
                px[..., 0].mean(),
                px[..., 1].mean(),
                px[..., 2].mean(),
                gray.std(),
                float(np.abs(np.diff(gray, axis=1)).mean()),
            ]
        )
        qvec = _token_direction("?" + question, feats.size)
        logits = np.array(
            [4.0 * float(feats @ _token_direction(c, feats.size)) for c in names]
        )
        logits = logits + float(feats @ qvec)
        rest = 1.0  # catch-all bucket keeps candidate mass strictly below 1
        z = np.logaddexp.reduce(np.append(logits, rest))
        return {c: float((logits[i] - z) / np.log(10.0)) for i, c in enumerate(names)}


def load_model(model_id: str = STUB_MODEL_ID):
    """Bridge factory: the stub by name, anything else via transformers."""
    if model_id in (STUB_MODEL_ID, "stub"):
        return StubVlm()
    from . import hf

    return hf.HfVlm(model_id)


__all__ = [
    "ModelRef",
    "StubVlm",
    "STUB_MODEL_ID",
    "load_image_rgb",
    "load_model",
    "ModelUnavailableError",
]
