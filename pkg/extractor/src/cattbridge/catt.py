"""Encoder for the .catt attention dump container.

Byte layout: 4-byte magic ``CATT``, little-endian uint32 version (1),
little-endian uint64 header length, UTF-8 JSON header (sorted keys,
compact separators), then float32 little-endian weights in C order
indexed (layer, step, row, col). This mirrors the downstream consumer's
format byte for byte; the one extension is an extra header key
``head_aggregation`` recording how attention heads were combined, which
readers that do not know it simply ignore.

Every (layer, step) map is renormalized in float64 before the float32
cast so the stored sums sit within float32 rounding of 1.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import BridgeValidationError

MAGIC = b"CATT"
VERSION = 1
PAYLOAD_DTYPE = "float32_le"
PROMPT_KINDS = ("question", "general")

_PREAMBLE = struct.Struct("<4sIQ")


def encode_dump(
    model_id: str,
    prompt_kind: str,
    prompt_text: str,
    grid_h: int,
    grid_w: int,
    layers,
    steps,
    generated_tokens,
    maps: dict,
    head_aggregation: str = "mean",
) -> bytes:
    """Serialize per-(layer, step) grids of attention weights.

    `maps` holds a (grid_h, grid_w) non-negative array under each
    (layer, step) key. Layers must be strictly increasing, steps
    contiguous, and generated_tokens must name one string per step.
    """
    layers = [int(l) for l in layers]
    steps = [int(t) for t in steps]
    tokens = list(generated_tokens)
    if not layers or any(b <= a for a, b in zip(layers, layers[1:])):
        raise BridgeValidationError("layers must be non-empty and strictly increasing")
    if not steps or any(b != a + 1 for a, b in zip(steps, steps[1:])):
        raise BridgeValidationError(f"steps must be non-empty and contiguous, got {steps}")
    if len(tokens) != len(steps) or not all(isinstance(t, str) for t in tokens):
        raise BridgeValidationError("generated_tokens must hold one string per step")
    if prompt_kind not in PROMPT_KINDS:
        raise BridgeValidationError(f"prompt_kind must be one of {PROMPT_KINDS}")
    if grid_h < 1 or grid_w < 1:
        raise BridgeValidationError("grid dimensions must be positive")

    header = {
        "magic": MAGIC.decode("ascii"),
        "version": VERSION,
        "model_id": str(model_id),
        "prompt_kind": prompt_kind,
        "prompt_text": str(prompt_text),
        "grid_h": int(grid_h),
        "grid_w": int(grid_w),
        "layers": layers,
        "steps": steps,
        "generated_tokens": tokens,
        "payload_dtype": PAYLOAD_DTYPE,
        "head_aggregation": str(head_aggregation),
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [_PREAMBLE.pack(MAGIC, VERSION, len(head)), head]
    for l in layers:
        for t in steps:
            if (l, t) not in maps:
                raise BridgeValidationError(f"missing attention map for layer {l}, step {t}")
            grid = np.asarray(maps[(l, t)], dtype=np.float64)
            if grid.shape != (grid_h, grid_w):
                raise BridgeValidationError(
                    f"map (layer {l}, step {t}) has shape {grid.shape}, "
                    f"expected ({grid_h}, {grid_w})"
                )
            if not np.isfinite(grid).all():
                raise BridgeValidationError(f"map (layer {l}, step {t}) has non-finite weights")
            if (grid < 0).any():
                raise BridgeValidationError(f"map (layer {l}, step {t}) has negative weights")
            total = float(grid.sum())
            if total <= 0.0:
                raise BridgeValidationError(f"map (layer {l}, step {t}) is all zero")
            chunks.append(np.ascontiguousarray(grid / total, dtype="<f4").tobytes())
    return b"".join(chunks)


def write_dump_file(path, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)
