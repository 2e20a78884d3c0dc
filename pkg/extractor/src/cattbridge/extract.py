"""Run a prompt against a bridge and capture its attention as a dump."""

from __future__ import annotations

from .catt import encode_dump
from .errors import BridgeValidationError

# the fixed describe instruction contrasted against task questions
GENERAL_PROMPT = "Write a general description of the image."


def resolve_prompt(prompt_kind: str, prompt) -> str:
    if prompt_kind == "general":
        if prompt is not None:
            raise BridgeValidationError(
                "the general instruction is fixed; do not pass a prompt with "
                "prompt_kind 'general'"
            )
        return GENERAL_PROMPT
    if prompt_kind == "question":
        if not isinstance(prompt, str) or not prompt.strip():
            raise BridgeValidationError("prompt_kind 'question' requires a prompt")
        return prompt
    raise BridgeValidationError("prompt_kind must be 'question' or 'general'")


def extract_dump(
    bridge,
    image,
    prompt_kind: str,
    prompt: str | None = None,
    layer_start: int = 20,
    layer_end: int = 25,
    max_steps: int = 10,
) -> bytes:
    """Capture visual-token attention for one prompt as .catt bytes.

    Layers are an inclusive range that must sit inside the model's
    depth; each generated step contributes one head-averaged map per
    layer, renormalized and recorded with its token string.
    """
    text = resolve_prompt(prompt_kind, prompt)
    if layer_start > layer_end:
        raise BridgeValidationError("layer_start must be <= layer_end")
    ref = bridge.ref
    layers = list(range(layer_start, layer_end + 1))
    for l in layers:
        if not 0 <= l < ref.n_layers:
            raise BridgeValidationError(
                f"layer {l} out of range for {ref.n_layers}-layer model"
            )
    if max_steps < 1:
        raise BridgeValidationError("max_steps must be >= 1")

    pixels = bridge.prepare_image(image)
    tokens, maps = bridge.generate_with_attention(pixels, text, layers, max_steps)
    steps = list(range(len(tokens)))
    return encode_dump(
        model_id=ref.model_id,
        prompt_kind=prompt_kind,
        prompt_text=text,
        grid_h=ref.grid_h,
        grid_w=ref.grid_w,
        layers=layers,
        steps=steps,
        generated_tokens=tokens,
        maps=maps,
    )
