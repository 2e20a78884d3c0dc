"""Bridge to transformers-hosted vision-language models.

Everything here is import-guarded: the package installs and runs with
the stub alone, and this module raises ModelUnavailableError with an
actionable message when torch/transformers are missing or the weights
cannot be loaded.

Assumptions, recorded because checkpoints rarely document them:
- attention per step is read from the row of the token being generated,
  restricted to the visual-token columns located by the processor's
  image token id, then averaged over heads (arithmetic mean) and
  renormalized; the aggregation choice is written into the dump header.
- decoding is greedy, so repeated runs on the same device match.
- generation runs the full depth; when a runtime supports stopping at
  the last requested layer that is a drop-in optimization, and the
  fallback is logged once.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import (
    BridgeValidationError,
    CandidateTokenError,
    ImageMismatchError,
    ModelUnavailableError,
)
from .model import ModelRef, load_image_rgb

log = logging.getLogger(__name__)


def _import_runtime():
    try:
        import torch
        from transformers import AutoModelForImageTextToText, AutoProcessor
    except ImportError as exc:
        raise ModelUnavailableError(
            "loading real models needs the optional runtime: "
            "pip install 'cattbridge[hf]'"
        ) from exc
    return torch, AutoProcessor, AutoModelForImageTextToText


class HfVlm:
    """Eager-attention wrapper around one transformers checkpoint."""

    def __init__(self, model_id: str, device: str = "cpu"):
        torch, AutoProcessor, AutoModel = _import_runtime()
        self._torch = torch
        try:
            self.processor = AutoProcessor.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(
                model_id, attn_implementation="eager"
            ).to(device)
        except Exception as exc:  # HF raises a zoo of types here
            raise ModelUnavailableError(
                f"could not load model {model_id!r}: {exc}"
            ) from exc
        self.model.eval()
        self.device = device

        cfg = self.model.config
        vision = getattr(cfg, "vision_config", cfg)
        patch = int(getattr(vision, "patch_size", 14))
        resolution = int(getattr(vision, "image_size", 448))
        side = resolution // patch
        text = getattr(cfg, "text_config", cfg)
        self.ref = ModelRef(
            model_id=model_id,
            resolution=resolution,
            patch_size=patch,
            grid_h=side,
            grid_w=side,
            n_layers=int(getattr(text, "num_hidden_layers")),
        )
        self._image_token_id = getattr(cfg, "image_token_index", None)
        if self._image_token_id is None:
            raise ModelUnavailableError(
                f"model {model_id!r} does not expose image_token_index; "
                "cannot locate the visual token span"
            )
        log.info("no stop-at-layer hook in this runtime; running full depth")

    def prepare_image(self, image):
        pixels = image if isinstance(image, np.ndarray) else load_image_rgb(image)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ImageMismatchError("image must decode to (H, W, 3)")
        return pixels

    def _inputs(self, pixels, prompt):
        from PIL import Image as PILImage

        try:
            return self.processor(
                images=PILImage.fromarray(pixels),
                text=prompt,
                return_tensors="pt",
            ).to(self.device)
        except Exception as exc:
            raise ImageMismatchError(f"processor rejected the input: {exc}") from exc

    def _visual_span(self, input_ids):
        pos = (input_ids[0] == self._image_token_id).nonzero().flatten()
        if pos.numel() != self.ref.n_visual:
            raise ImageMismatchError(
                f"processor reports {pos.numel()} visual tokens, model geometry "
                f"expects {self.ref.n_visual}"
            )
        return pos

    def generate_with_attention(self, pixels, prompt, layers, max_steps):
        torch = self._torch
        for l in layers:
            if not 0 <= l < self.ref.n_layers:
                raise BridgeValidationError(
                    f"layer {l} out of range for {self.ref.n_layers}-layer model"
                )
        inputs = self._inputs(self.prepare_image(pixels), prompt)
        span = self._visual_span(inputs["input_ids"])
        with torch.no_grad():
            out = self.model.generate(
                **inputs,
                max_new_tokens=int(max_steps),
                do_sample=False,
                output_attentions=True,
                return_dict_in_generate=True,
            )
        prompt_len = inputs["input_ids"].shape[1]
        new_ids = out.sequences[0, prompt_len:]
        tokens = [self.processor.tokenizer.decode([i]) for i in new_ids.tolist()]
        maps = {}
        for t, step_attn in enumerate(out.attentions[: len(tokens)]):
            for l in layers:
                # (batch, heads, query, key): last query row attends backward
                row = step_attn[l][0, :, -1, :]
                vis = row[:, span].mean(dim=0)
                grid = vis.double().cpu().numpy().reshape(self.ref.grid_h, self.ref.grid_w)
                maps[(l, t)] = grid / grid.sum()
        return tokens, maps

    def tokenize_single(self, candidate: str) -> str:
        ids = self.processor.tokenizer(candidate, add_special_tokens=False)["input_ids"]
        if len(ids) != 1:
            raise CandidateTokenError(
                f"candidate {candidate!r} tokenizes to {len(ids)} tokens, need exactly 1"
            )
        return candidate

    def candidate_log10_probs(self, pixels, question, candidates) -> dict:
        torch = self._torch
        names = [self.tokenize_single(c) for c in candidates]
        inputs = self._inputs(self.prepare_image(pixels), question)
        with torch.no_grad():
            logits = self.model(**inputs).logits[0, -1]
            logp = torch.log_softmax(logits.double(), dim=-1)
        out = {}
        for c in names:
            tid = self.processor.tokenizer(c, add_special_tokens=False)["input_ids"][0]
            out[c] = float(logp[tid] / np.log(10.0))
        return out
