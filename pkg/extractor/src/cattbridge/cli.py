"""Command line front end: extract dumps, trace masked probabilities.

Flag names mirror the downstream refinement CLI (--layer-start,
--layer-end, --fill, -o) so the two tools read as one workflow.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .catt import write_dump_file
from .errors import BridgeError, BridgeValidationError, ImageMismatchError
from .extract import extract_dump
from .model import STUB_MODEL_ID, load_model
from .trace import trace_probabilities, trace_to_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cattbridge",
        description="capture VLM attention dumps and candidate probability traces",
    )
    parser.add_argument("--version", action="version", version="cattbridge 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    ex = sub.add_parser(
        "extract",
        help="run one prompt and write the attention dump",
        formatter_class=fmt,
    )
    ex.add_argument("image", help="input PNG or JPEG")
    ex.add_argument("-o", "--output", required=True, help="dump path to write")
    ex.add_argument("--model", default=STUB_MODEL_ID, help="model identifier")
    ex.add_argument(
        "--prompt-kind",
        required=True,
        choices=("question", "general"),
        help="which pass this dump records",
    )
    ex.add_argument(
        "--prompt",
        default=None,
        help="question text (forbidden for the fixed general instruction)",
    )
    ex.add_argument("--layer-start", type=int, default=20, help="first layer captured")
    ex.add_argument("--layer-end", type=int, default=25, help="last layer captured")
    ex.add_argument("--max-steps", type=int, default=10, help="decode step budget")

    tr = sub.add_parser(
        "trace",
        help="candidate log10 probabilities under progressive masking",
        formatter_class=fmt,
    )
    tr.add_argument("image", help="input PNG or JPEG")
    tr.add_argument("question_dump", help="question-conditioned attention dump")
    tr.add_argument("general_dump", help="general-instruction attention dump")
    tr.add_argument("-o", "--output", required=True, help="CSV path to write")
    tr.add_argument("--model", default=STUB_MODEL_ID, help="model identifier")
    tr.add_argument("--question", required=True, help="question for the forward passes")
    tr.add_argument(
        "--candidates", required=True, nargs="+", help="single-token answers to follow"
    )
    tr.add_argument(
        "--ratios",
        required=True,
        nargs="+",
        type=float,
        help="mask ratios, strictly increasing in [0, 1]",
    )
    tr.add_argument(
        "--fill",
        nargs=3,
        type=int,
        default=(0, 0, 0),
        metavar=("R", "G", "B"),
        help="fill color for masked pixels",
    )
    tr.add_argument(
        "--carve-command",
        default="carve",
        help="refinement CLI used to apply progressive masks",
    )
    return parser


def _cmd_extract(args) -> dict:
    bridge = load_model(args.model)
    data = extract_dump(
        bridge,
        args.image,
        prompt_kind=args.prompt_kind,
        prompt=args.prompt,
        layer_start=args.layer_start,
        layer_end=args.layer_end,
        max_steps=args.max_steps,
    )
    write_dump_file(args.output, data)
    ref = bridge.ref
    return {
        "output": args.output,
        "model_id": ref.model_id,
        "prompt_kind": args.prompt_kind,
        "grid": [ref.grid_h, ref.grid_w],
        "layer_range": [args.layer_start, args.layer_end],
        "bytes": len(data),
    }


def _cmd_trace(args) -> dict:
    bridge = load_model(args.model)
    trace = trace_probabilities(
        bridge,
        args.image,
        question=args.question,
        candidates=args.candidates,
        question_dump=args.question_dump,
        general_dump=args.general_dump,
        ratios=args.ratios,
        fill=args.fill,
        carve_command=args.carve_command,
    )
    csv_text = trace_to_csv(trace)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    return {
        "output": args.output,
        "model_id": bridge.ref.model_id,
        "ratios": list(trace.ratios),
        "candidates": list(trace.candidates),
        "rows": len(trace.ratios) * len(trace.candidates),
    }


def main(argv=None) -> int:
    warnings.simplefilter("always")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "extract":
            payload = _cmd_extract(args)
        else:
            payload = _cmd_trace(args)
    except (BridgeValidationError, ImageMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BridgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
