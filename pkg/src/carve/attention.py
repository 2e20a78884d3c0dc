"""Attention maps, entropy diagnostics, and the CATT dump format.

An attention map is the distribution of one generated token's attention
over the N_v visual tokens at one decoder layer: non-negative weights
that sum to 1 and reshape to the (grid_h, grid_w) token grid. A stack
collects the maps of one prompt's generation over a set of layers and a
contiguous range of steps.

CATT dump layout (little-endian throughout):

    bytes 0..3    magic ``CATT``
    bytes 4..7    uint32 format version, currently 1
    bytes 8..15   uint64 byte length of the JSON header
    next N bytes  UTF-8 JSON header
    rest          float32 payload, C-order (layer, step, row, col)

Header fields: ``magic``, ``version``, ``model_id``, ``prompt_kind``
(``"question"`` or ``"general"``), ``prompt_text``, ``grid_h``,
``grid_w``, ``layers`` (strictly increasing), ``steps`` (contiguous,
ascending), ``generated_tokens`` (one string per step), and
``payload_dtype`` (always ``"float32_le"``). Layers may be sparse;
steps may not: a gap in ``steps`` is a contiguity error.

On read, a map whose weights sum to s with |s - 1| <= 1e-6 is kept
bit-for-bit; deviations up to 1e-3 are renormalized silently; larger
ones are renormalized with a `DumpWarning`.
"""

from __future__ import annotations

import json
import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DumpContiguityError,
    DumpHeaderError,
    DumpMagicError,
    DumpTruncatedError,
    DumpValueError,
    DumpVersionError,
    DumpWarning,
    ValidationError,
)

MAGIC = b"CATT"
VERSION = 1
PAYLOAD_DTYPE = "float32_le"
PROMPT_KINDS = ("question", "general")

_SUM_TOL_KEEP = 1e-6
_SUM_TOL_SILENT = 1e-3


def normalize(weights) -> np.ndarray:
    """Scale non-negative weights into a distribution (float64).

    Raises ValidationError for empty input, negatives, non-finite
    entries, or an all-zero vector.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError("weights must be a non-empty 1-d vector")
    if not np.isfinite(w).all():
        raise ValidationError("weights must be finite")
    if (w < 0).any():
        raise ValidationError("weights must be non-negative")
    total = float(w.sum())
    if total == 0.0:
        raise ValidationError("weights sum to zero; cannot normalize")
    return w / total


def shannon_entropy(dist) -> float:
    """Entropy -sum(p * ln p) in nats of a probability vector."""
    p = np.asarray(dist, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("distribution must be a non-empty 1-d vector")
    if not np.isfinite(p).all():
        raise ValidationError("distribution must be finite")
    if (p < 0).any():
        raise ValidationError("distribution must be non-negative")
    if abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValidationError("distribution must sum to 1 within 1e-6")
    nz = p[p > 0]
    return -float(np.sum(nz * np.log(nz)))


@dataclass(frozen=True)
class AttentionMap:
    """One (layer, step) attention distribution over the visual grid."""

    layer: int
    step: int
    grid_h: int
    grid_w: int
    weights: np.ndarray

    def __post_init__(self):
        if self.grid_h < 1 or self.grid_w < 1:
            raise ValidationError("grid dimensions must be >= 1")
        if self.layer < 0 or self.step < 0:
            raise ValidationError("layer and step must be non-negative")
        w = np.asarray(self.weights)
        if w.dtype not in (np.float32, np.float64):
            w = w.astype(np.float64)
        if w.ndim != 1 or w.size != self.grid_h * self.grid_w:
            raise ValidationError(
                f"weights must be 1-d with grid_h*grid_w = "
                f"{self.grid_h * self.grid_w} entries, got {w.size}"
            )
        w64 = w.astype(np.float64)
        if not np.isfinite(w64).all():
            raise ValidationError("weights must be finite")
        if (w64 < 0).any():
            raise ValidationError("weights must be non-negative")
        if abs(float(w64.sum()) - 1.0) > _SUM_TOL_KEEP:
            raise ValidationError("weights must sum to 1 within 1e-6")
        w = np.ascontiguousarray(w).copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n_v(self) -> int:
        return self.grid_h * self.grid_w

    def grid(self) -> np.ndarray:
        """Weights reshaped to (grid_h, grid_w), float64."""
        return self.weights.astype(np.float64).reshape(self.grid_h, self.grid_w)

    def entropy(self) -> float:
        return shannon_entropy(self.weights.astype(np.float64))


@dataclass(frozen=True)
class DumpHeader:
    model_id: str
    prompt_kind: str
    prompt_text: str
    grid_h: int
    grid_w: int
    layers: tuple
    steps: tuple
    generated_tokens: tuple
    payload_dtype: str = PAYLOAD_DTYPE


@dataclass(frozen=True)
class AttentionStack:
    """All maps of one prompt's generation: layers x contiguous steps."""

    model_id: str
    prompt_kind: str
    prompt_text: str
    grid_h: int
    grid_w: int
    layers: tuple
    steps: tuple
    maps: dict = field(repr=False)
    generated_tokens: tuple = ()

    def __post_init__(self):
        if self.prompt_kind not in PROMPT_KINDS:
            raise ValidationError(f"prompt_kind must be one of {PROMPT_KINDS}")
        layers = tuple(int(l) for l in self.layers)
        steps = tuple(int(t) for t in self.steps)
        if not layers or not steps:
            raise ValidationError("stack needs at least one layer and one step")
        if any(b <= a for a, b in zip(layers, layers[1:])):
            raise ValidationError("layers must be strictly increasing")
        if any(b != a + 1 for a, b in zip(steps, steps[1:])):
            raise ValidationError("steps must be contiguous and ascending")
        tokens = tuple(self.generated_tokens) or ("",) * len(steps)
        if len(tokens) != len(steps):
            raise ValidationError("generated_tokens must match steps")
        expected = {(l, t) for l in layers for t in steps}
        if set(self.maps.keys()) != expected:
            raise ValidationError("maps must cover exactly layers x steps")
        for (l, t), m in self.maps.items():
            if not isinstance(m, AttentionMap):
                raise ValidationError("maps values must be AttentionMap")
            if (m.layer, m.step) != (l, t):
                raise ValidationError(f"map at {(l, t)} labeled {(m.layer, m.step)}")
            if (m.grid_h, m.grid_w) != (self.grid_h, self.grid_w):
                raise ValidationError("all maps must share the stack's grid")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "generated_tokens", tokens)
        object.__setattr__(self, "maps", dict(self.maps))

    @property
    def n_v(self) -> int:
        return self.grid_h * self.grid_w

    @property
    def t_start(self) -> int:
        return self.steps[0]

    @property
    def t_end(self) -> int:
        """Final generation step: attention is most focused here."""
        return self.steps[-1]

    def map(self, layer: int, step: int) -> AttentionMap:
        try:
            return self.maps[(layer, step)]
        except KeyError:
            raise ValidationError(f"stack has no map for layer {layer}, step {step}")

    def header(self) -> DumpHeader:
        return DumpHeader(
            model_id=self.model_id,
            prompt_kind=self.prompt_kind,
            prompt_text=self.prompt_text,
            grid_h=self.grid_h,
            grid_w=self.grid_w,
            layers=self.layers,
            steps=self.steps,
            generated_tokens=self.generated_tokens,
        )


def stack_from_grids(
    grids,
    *,
    model_id: str = "unknown",
    prompt_kind: str = "question",
    prompt_text: str = "",
    generated_tokens=(),
) -> AttentionStack:
    """Build a stack from {(layer, step): 2-d weight grid} mappings."""
    if not grids:
        raise ValidationError("grids must be non-empty")
    first = np.asarray(next(iter(grids.values())))
    gh, gw = first.shape
    maps = {}
    for (l, t), g in grids.items():
        arr = np.asarray(g, dtype=np.float64)
        if arr.shape != (gh, gw):
            raise ValidationError("all grids must share one shape")
        maps[(l, t)] = AttentionMap(l, t, gh, gw, arr.ravel())
    layers = tuple(sorted({l for l, _ in maps}))
    steps = tuple(sorted({t for _, t in maps}))
    return AttentionStack(
        model_id=model_id,
        prompt_kind=prompt_kind,
        prompt_text=prompt_text,
        grid_h=gh,
        grid_w=gw,
        layers=layers,
        steps=steps,
        maps=maps,
        generated_tokens=generated_tokens,
    )


def layer_entropies(stack: AttentionStack, layer_range, step=None) -> dict:
    """Per-layer attention entropy at one step (default: the final step).

    The layer range is inclusive on both ends and is intersected with
    the layers present in the stack; an empty intersection is an error.
    """
    lo, hi = int(layer_range[0]), int(layer_range[1])
    if lo > hi:
        raise ValidationError(f"empty layer range ({lo}, {hi})")
    t = stack.t_end if step is None else int(step)
    if t not in stack.steps:
        raise ValidationError(f"step {t} not in stack steps {stack.steps}")
    chosen = [l for l in stack.layers if lo <= l <= hi]
    if not chosen:
        raise ValidationError(
            f"no stack layers fall in range ({lo}, {hi}); have {stack.layers}"
        )
    return {l: stack.map(l, t).entropy() for l in chosen}


def overall_entropy(stack: AttentionStack, layer_range, step=None) -> float:
    """Mean attention entropy (nats) over a layer range at one step."""
    per_layer = layer_entropies(stack, layer_range, step)
    return float(np.mean([per_layer[l] for l in sorted(per_layer)]))


# ------------------------------------------------------------------ dump io

_PREAMBLE = struct.Struct("<4sIQ")  # magic, version, header byte length


def write_dump(stack: AttentionStack) -> bytes:
    """Serialize a stack to CATT bytes. float32 weights pass unchanged."""
    header = {
        "magic": MAGIC.decode("ascii"),
        "version": VERSION,
        "model_id": stack.model_id,
        "prompt_kind": stack.prompt_kind,
        "prompt_text": stack.prompt_text,
        "grid_h": stack.grid_h,
        "grid_w": stack.grid_w,
        "layers": list(stack.layers),
        "steps": list(stack.steps),
        "generated_tokens": list(stack.generated_tokens),
        "payload_dtype": PAYLOAD_DTYPE,
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [_PREAMBLE.pack(MAGIC, VERSION, len(head)), head]
    for l in stack.layers:
        for t in stack.steps:
            chunks.append(
                np.ascontiguousarray(stack.maps[(l, t)].weights, dtype="<f4").tobytes()
            )
    return b"".join(chunks)


def write_dump_file(stack: AttentionStack, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_dump(stack))


def _header_int(obj, key, minimum=None):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise DumpHeaderError(f"header field {key!r} must be an integer")
    if minimum is not None and v < minimum:
        raise DumpHeaderError(f"header field {key!r} must be >= {minimum}")
    return v


def _header_str(obj, key):
    v = obj.get(key)
    if not isinstance(v, str):
        raise DumpHeaderError(f"header field {key!r} must be a string")
    return v


def _parse_header(head: bytes) -> DumpHeader:
    try:
        obj = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DumpHeaderError(f"header is not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise DumpHeaderError("header must be a JSON object")
    if obj.get("magic") != MAGIC.decode("ascii"):
        raise DumpHeaderError("header magic does not match preamble")
    if obj.get("version") != VERSION:
        raise DumpHeaderError("header version does not match preamble")
    if obj.get("payload_dtype") != PAYLOAD_DTYPE:
        raise DumpHeaderError(
            f"unsupported payload_dtype {obj.get('payload_dtype')!r}; "
            f"expected {PAYLOAD_DTYPE!r}"
        )
    kind = _header_str(obj, "prompt_kind")
    if kind not in PROMPT_KINDS:
        raise DumpHeaderError(f"prompt_kind must be one of {PROMPT_KINDS}")
    layers = obj.get("layers")
    steps = obj.get("steps")
    if not isinstance(layers, list) or not layers or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in layers
    ):
        raise DumpHeaderError("header field 'layers' must be a non-empty int list")
    if any(b <= a for a, b in zip(layers, layers[1:])):
        raise DumpHeaderError("layers must be strictly increasing")
    if not isinstance(steps, list) or not steps or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in steps
    ):
        raise DumpHeaderError("header field 'steps' must be a non-empty int list")
    if any(b != a + 1 for a, b in zip(steps, steps[1:])):
        raise DumpContiguityError(f"steps must be contiguous, got {steps}")
    tokens = obj.get("generated_tokens")
    if not isinstance(tokens, list) or not all(isinstance(v, str) for v in tokens):
        raise DumpHeaderError("generated_tokens must be a list of strings")
    if len(tokens) != len(steps):
        raise DumpHeaderError("generated_tokens must have one entry per step")
    return DumpHeader(
        model_id=_header_str(obj, "model_id"),
        prompt_kind=kind,
        prompt_text=_header_str(obj, "prompt_text"),
        grid_h=_header_int(obj, "grid_h", 1),
        grid_w=_header_int(obj, "grid_w", 1),
        layers=tuple(layers),
        steps=tuple(steps),
        generated_tokens=tuple(tokens),
    )


def read_dump(data: bytes) -> AttentionStack:
    """Parse CATT bytes into an AttentionStack.

    Distinct errors: DumpMagicError, DumpVersionError,
    DumpTruncatedError (header or payload cut short),
    DumpContiguityError (step gaps), DumpHeaderError (other header
    problems), DumpValueError (NaN, infinite, negative, or all-zero
    weights).
    """
    if len(data) < _PREAMBLE.size:
        raise DumpTruncatedError(
            f"dump has {len(data)} bytes, shorter than the {_PREAMBLE.size}-byte preamble"
        )
    magic, version, head_len = _PREAMBLE.unpack_from(data, 0)
    if magic != MAGIC:
        raise DumpMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise DumpVersionError(f"unsupported dump version {version}")
    head_end = _PREAMBLE.size + head_len
    if len(data) < head_end:
        raise DumpTruncatedError(
            f"header declares {head_len} bytes but only "
            f"{len(data) - _PREAMBLE.size} follow the preamble"
        )
    header = _parse_header(data[_PREAMBLE.size:head_end])

    n_v = header.grid_h * header.grid_w
    n_maps = len(header.layers) * len(header.steps)
    expected = n_maps * n_v * 4
    got = len(data) - head_end
    if got < expected:
        raise DumpTruncatedError(f"payload has {got} bytes, expected {expected}")
    if got > expected:
        raise DumpHeaderError(
            f"payload has {got - expected} trailing bytes beyond the declared shape"
        )
    payload = np.frombuffer(data, dtype="<f4", offset=head_end).reshape(
        len(header.layers), len(header.steps), n_v
    )
    if np.isnan(payload).any():
        raise DumpValueError("payload contains NaN weights")
    if np.isinf(payload).any():
        raise DumpValueError("payload contains infinite weights")
    if (payload < 0).any():
        raise DumpValueError("payload contains negative weights")

    maps = {}
    for li, layer in enumerate(header.layers):
        for ti, step in enumerate(header.steps):
            raw = payload[li, ti]
            total = float(raw.astype(np.float64).sum())
            if total == 0.0:
                raise DumpValueError(
                    f"map (layer {layer}, step {step}) is all zero"
                )
            dev = abs(total - 1.0)
            if dev <= _SUM_TOL_KEEP:
                weights = raw.copy()
            else:
                if dev > _SUM_TOL_SILENT:
                    warnings.warn(
                        f"map (layer {layer}, step {step}) sums to {total:.6g}; "
                        "renormalizing",
                        DumpWarning,
                        stacklevel=2,
                    )
                weights = raw.astype(np.float64) / total
            maps[(layer, step)] = AttentionMap(
                layer, step, header.grid_h, header.grid_w, weights
            )
    return AttentionStack(
        model_id=header.model_id,
        prompt_kind=header.prompt_kind,
        prompt_text=header.prompt_text,
        grid_h=header.grid_h,
        grid_w=header.grid_w,
        layers=header.layers,
        steps=header.steps,
        maps=maps,
        generated_tokens=header.generated_tokens,
    )


def read_dump_file(path) -> AttentionStack:
    with open(path, "rb") as fh:
        return read_dump(fh.read())


def uniform_entropy(n: int) -> float:
    """Entropy of the uniform distribution over n outcomes: ln n."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return math.log(n)
