"""Candidate probability traces under progressive saliency masking.

For each masking ratio the image is filled by the downstream `carve
progressive` command (invoked as a subprocess, so the two packages only
meet at the CLI and the dump format), the bridge runs one forward pass
on the masked result, and the log10 next-token probability of every
candidate is recorded. Ratio 0 therefore reproduces the unmasked
baseline exactly: the mask tool leaves the pixels untouched and the
bridge sees identical input.
"""

from __future__ import annotations

import csv
import io
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import BridgeValidationError, MaskToolError

CSV_HEADER = ("ratio", "candidate", "log10_prob")


@dataclass(frozen=True)
class ProbTrace:
    """Per-ratio, per-candidate log10 probabilities."""

    ratios: tuple
    candidates: tuple
    log10_probs: dict  # (ratio, candidate) -> float

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.ratios, self.ratios[1:])):
            raise BridgeValidationError("ratios must be strictly increasing")
        if any(not 0.0 <= r <= 1.0 for r in self.ratios):
            raise BridgeValidationError("ratios must lie in [0, 1]")
        missing = [
            (r, c)
            for r in self.ratios
            for c in self.candidates
            if (r, c) not in self.log10_probs
        ]
        if missing:
            raise BridgeValidationError(f"missing trace entries: {missing[:3]}")

    def row_values(self, ratio: float) -> dict:
        return {c: self.log10_probs[(ratio, c)] for c in self.candidates}


def trace_to_csv(trace: ProbTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in trace.ratios:
        for c in trace.candidates:
            writer.writerow([repr(float(r)), c, repr(trace.log10_probs[(r, c)])])
    return buf.getvalue()


def _run_mask_tool(carve_command, image, question_dump, general_dump, out, ratio, fill):
    argv = [
        carve_command,
        "progressive",
        str(image),
        str(question_dump),
        str(general_dump),
        "-o",
        str(out),
        "--ratio",
        repr(float(ratio)),
        "--fill",
        str(fill[0]),
        str(fill[1]),
        str(fill[2]),
    ]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=600)
    except FileNotFoundError as exc:
        raise MaskToolError(
            f"mask command {carve_command!r} is not installed or not on PATH"
        ) from exc
    except subprocess.TimeoutExpired as exc:
        raise MaskToolError(f"mask command timed out: {argv}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else ""
        raise MaskToolError(
            f"mask command exited {proc.returncode} for ratio {ratio}: {tail}"
        )


def trace_probabilities(
    bridge,
    image,
    question: str,
    candidates,
    question_dump,
    general_dump,
    ratios,
    fill=(0, 0, 0),
    carve_command: str = "carve",
) -> ProbTrace:
    """Forward the image at each masking ratio and record candidate odds.

    Candidates must each map to a single token under the bridge's
    tokenizer; the first offender is named in the error. Ratios must be
    strictly increasing within [0, 1].
    """
    ratios = tuple(float(r) for r in ratios)
    if not ratios:
        raise BridgeValidationError("at least one ratio is required")
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        raise BridgeValidationError("ratios must be strictly increasing")
    if any(not 0.0 <= r <= 1.0 for r in ratios):
        raise BridgeValidationError("ratios must lie in [0, 1]")
    candidates = tuple(bridge.tokenize_single(c) for c in candidates)
    if not candidates:
        raise BridgeValidationError("at least one candidate is required")
    if len(set(candidates)) != len(candidates):
        raise BridgeValidationError("candidates must be distinct")
    fill = tuple(int(v) for v in fill)
    if len(fill) != 3 or any(not 0 <= v <= 255 for v in fill):
        raise BridgeValidationError("fill must be three channel values in [0, 255]")
    for p in (question_dump, general_dump):
        if not Path(p).is_file():
            raise BridgeValidationError(f"attention dump not found: {p}")

    src = Path(image)
    if not src.is_file():
        raise BridgeValidationError(f"image not found: {src}")
    probs = {}
    with tempfile.TemporaryDirectory(prefix="cattbridge-trace-") as tmp:
        work = Path(tmp)
        for i, ratio in enumerate(ratios):
            masked = work / f"masked_{i}.png"
            _run_mask_tool(
                carve_command, src, question_dump, general_dump, masked, ratio, fill
            )
            pixels = bridge.prepare_image(masked)
            row = bridge.candidate_log10_probs(pixels, question, candidates)
            for c in candidates:
                probs[(ratio, c)] = row[c]
    return ProbTrace(ratios, candidates, probs)
