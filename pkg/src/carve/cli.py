"""Command-line interface.

Contract: machine-readable results go to stdout as JSON; warnings and
logs go to stderr. Exit codes: 0 success, 2 validation problem (bad
flag values, inconsistent inputs), 3 parse or I/O problem (unreadable
image or dump, missing file). ``--help`` on each subcommand lists every
flag with its default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from . import __version__
from .attention import layer_entropies, overall_entropy, read_dump_file, write_dump_file
from .contrast import (
    DEFAULT_LAMBDA,
    RESHAPE_MODES,
    STEP_SELECTORS,
    ContrastConfig,
    contrast_refine,
    resolve_steps,
)
from .errors import ParseError, ValidationError
from .imaging import ImageRGB, color_complexity, texture_complexity
from .maskgen import (
    CONNECTIVITIES,
    RESIZE_POLICIES,
    CarveConfig,
    carve_pipeline,
    compute_saliency,
    progressive_mask,
)
from .oracle import (
    cost_model,
    cost_model_from_alpha,
    CostParams,
    run_recovery_experiment,
    synth_decomposition,
    write_recovery_csv,
)
from .study import DEFAULT_BIN_WIDTH, DEFAULT_LAYER_RANGE, run_study

SEED_ENV = "CARVE_SEED"


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _add_contrast_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
        help="contrast regularizer added to general attention",
    )
    sub.add_argument(
        "--layer-start", type=int, default=DEFAULT_LAYER_RANGE[0],
        help="first decoder layer to fuse (inclusive)",
    )
    sub.add_argument(
        "--layer-end", type=int, default=DEFAULT_LAYER_RANGE[1],
        help="last decoder layer to fuse (inclusive)",
    )
    sub.add_argument(
        "--steps", choices=STEP_SELECTORS, default="end",
        help="which shared generation steps to fuse",
    )
    sub.add_argument(
        "--reshape", choices=RESHAPE_MODES, default="nearest",
        help="token-grid to pixel resampling mode",
    )


def _carve_config(args, **overrides) -> CarveConfig:
    base = dict(
        p=getattr(args, "p", 0.4),
        k=getattr(args, "k", 2),
        lam=args.lam,
        layer_start=args.layer_start,
        layer_end=args.layer_end,
        step_select=args.steps,
        connectivity=getattr(args, "connectivity", 8),
        fill=tuple(getattr(args, "fill", (0, 0, 0))),
        resize_policy=getattr(args, "resize", "fit_pad"),
        reshape_mode=args.reshape,
    )
    base.update(overrides)
    return CarveConfig(**base)


def cmd_carve(args) -> int:
    image = ImageRGB.load(args.image)
    question = read_dump_file(args.question_dump)
    general = read_dump_file(args.general_dump)
    cfg = _carve_config(args)
    result = carve_pipeline(image, question, general, cfg)
    result.image.save_png(args.output)
    diagnostics = {
        "image_size": [image.height, image.width],
        "grid": [question.grid_h, question.grid_w],
        "p": cfg.p,
        "k": cfg.k,
        "lambda": cfg.lam,
        "layer_range": list(cfg.layer_range),
        "steps_used": list(result.steps_used),
        "connectivity": cfg.connectivity,
        "reshape_mode": cfg.reshape_mode,
        "resize_policy": cfg.resize_policy,
        "fill": list(cfg.fill),
        "tau": result.tau,
        "regions_considered": result.regions_considered,
        "regions_kept": [
            {
                "bbox": list(r.bbox),
                "pixels": r.size,
                "score": r.cumulative_score,
            }
            for r in result.mask.regions
        ],
        "crop_bbox": list(result.crop_bbox) if result.crop_bbox else None,
        "empty_mask_fallback": result.used_fallback,
        "per_layer_entropy": {str(l): h for l, h in result.per_layer_entropy.items()},
        "overall_entropy": result.overall_entropy,
    }
    sidecar = args.diagnostics or f"{args.output}.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(diagnostics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _emit(diagnostics)
    return 0


def cmd_complexity(args) -> int:
    image = ImageRGB.load(args.image)
    _emit(
        {
            "height": image.height,
            "width": image.width,
            "texture": texture_complexity(
                image, low=args.low, high=args.high, sigma=args.sigma
            ),
            "color": color_complexity(
                image, exclude_achromatic=args.exclude_achromatic
            ),
        }
    )
    return 0


def cmd_entropy(args) -> int:
    stack = read_dump_file(args.dump)
    lo = stack.layers[0] if args.layer_start is None else args.layer_start
    hi = stack.layers[-1] if args.layer_end is None else args.layer_end
    per_layer = layer_entropies(stack, (lo, hi), args.step)
    step = stack.t_end if args.step is None else args.step
    _emit(
        {
            "dump": os.path.basename(args.dump),
            "prompt_kind": stack.prompt_kind,
            "n_v": stack.n_v,
            "step": step,
            "layer_range": [lo, hi],
            "per_layer": {str(l): h for l, h in per_layer.items()},
            "overall": overall_entropy(stack, (lo, hi), args.step),
        }
    )
    return 0


def cmd_contrast(args) -> int:
    question = read_dump_file(args.question_dump)
    general = read_dump_file(args.general_dump)
    step = args.step
    if step is None:
        step = resolve_steps(question, general, "end")[0]
    refined = contrast_refine(
        question.map(args.layer, step),
        general.map(args.layer, step),
        ContrastConfig(lam=args.lam),
    )
    grid = refined.reshape(question.grid_h, question.grid_w)
    _emit(
        {
            "layer": args.layer,
            "step": step,
            "lambda": args.lam,
            "grid_h": question.grid_h,
            "grid_w": question.grid_w,
            "values": [[float(v) for v in row] for row in grid],
        }
    )
    return 0


def cmd_study(args) -> int:
    result = run_study(
        args.input_dir,
        args.out,
        layer_range=(args.layer_start, args.layer_end),
        step=args.step,
        bin_width=args.bin_width,
        level=args.level,
    )
    for err in result.errors:
        print(f"study: {err}", file=sys.stderr)
    _emit(result.stats)
    return 0


def cmd_synth(args) -> int:
    seed = args.seed
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer, got {env_seed!r}")
    if not (args.out_question or args.out_general or args.experiment_csv):
        raise ValidationError(
            "nothing to do: pass --out-question/--out-general and/or --experiment-csv"
        )
    question, general, spec = synth_decomposition(
        seed,
        n_v=args.n_v,
        vis_roughness=args.roughness,
        sem_concentration=args.concentration,
        delta=args.delta,
        layers=tuple(range(args.layer_start, args.layer_end + 1)),
        steps=tuple(range(args.n_steps)),
    )
    payload = {
        "seed": seed,
        "seed_source": "env" if env_seed is not None else "flag",
        "n_v": spec.grid_h * spec.grid_w,
        "grid": [spec.grid_h, spec.grid_w],
        "delta": spec.delta,
        "roughness": args.roughness,
        "concentration": args.concentration,
        "question": None,
        "general": None,
        "experiment_csv": None,
    }
    if args.out_question:
        write_dump_file(question, args.out_question)
        payload["question"] = args.out_question
    if args.out_general:
        write_dump_file(general, args.out_general)
        payload["general"] = args.out_general
    if args.experiment_csv:
        rows = run_recovery_experiment(
            range(seed, seed + args.experiment_seeds),
            n_v=args.n_v,
            vis_roughness=args.roughness,
            sem_concentration=args.concentration,
            delta=args.delta,
        )
        write_recovery_csv(rows, args.experiment_csv)
        payload["experiment_csv"] = args.experiment_csv
        payload["recovery_max_error"] = max(r.observed_error for r in rows)
        payload["recovery_bound"] = max(r.bound for r in rows)
        payload["recovery_all_within_bound"] = all(r.within_bound for r in rows)
    _emit(payload)
    return 0


def cmd_cost(args) -> int:
    if args.alpha is not None:
        if args.l_total is not None or args.l_end is not None:
            raise ValidationError("pass either --alpha or --l-total/--l-end, not both")
        report = cost_model_from_alpha(
            args.alpha, args.rho, args.n_layers, args.n_steps, args.n_v,
            args.bytes_per_element,
        )
    else:
        if args.l_total is None or args.l_end is None:
            raise ValidationError("pass --alpha or both --l-total and --l-end")
        report = cost_model(
            CostParams(
                l_total=args.l_total,
                l_end=args.l_end,
                rho=args.rho,
                n_layers=args.n_layers,
                n_steps=args.n_steps,
                n_v=args.n_v,
                bytes_per_element=args.bytes_per_element,
            )
        )
    _emit(
        {
            "alpha": report.alpha,
            "eta1": report.eta1,
            "s_cache": report.s_cache,
            "s_combined": report.s_combined,
            "memory_bytes": report.memory_bytes,
        }
    )
    return 0


def cmd_progressive(args) -> int:
    image = ImageRGB.load(args.image)
    question = read_dump_file(args.question_dump)
    general = read_dump_file(args.general_dump)
    cfg = _carve_config(args)
    saliency, steps = compute_saliency(image, question, general, cfg)
    out = progressive_mask(image, saliency, args.ratio, fill=tuple(args.fill))
    out.save_png(args.output)
    _emit(
        {
            "ratio": args.ratio,
            "filled_pixels": int(args.ratio * image.height * image.width),
            "steps_used": list(steps),
            "output": args.output,
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carve",
        description="Contrastive attention refinement for image questioning",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name, help_text):
        return subs.add_parser(
            name,
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

    p = sub("carve", "refine an image from question/general attention dumps")
    p.add_argument("image", help="input PNG or JPEG")
    p.add_argument("question_dump", help="question-conditioned attention dump")
    p.add_argument("general_dump", help="general-instruction attention dump")
    p.add_argument("-o", "--output", required=True, help="refined PNG path")
    p.add_argument(
        "--diagnostics", default=None,
        help="diagnostics JSON path (default: <output>.json)",
    )
    p.add_argument("--p", type=float, default=0.4, help="saliency percentile to keep")
    p.add_argument("--k", type=int, default=2, help="number of regions to keep")
    _add_contrast_flags(p)
    p.add_argument(
        "--connectivity", type=int, choices=CONNECTIVITIES, default=8,
        help="pixel adjacency for region grouping",
    )
    p.add_argument(
        "--fill", type=int, nargs=3, default=[0, 0, 0], metavar=("R", "G", "B"),
        help="fill color for masked-out pixels",
    )
    p.add_argument(
        "--resize", choices=RESIZE_POLICIES, default="fit_pad",
        help="how the crop returns to the original frame",
    )
    p.set_defaults(func=cmd_carve)

    p = sub("complexity", "texture and color complexity of an image")
    p.add_argument("image", help="input PNG or JPEG")
    p.add_argument("--low", type=float, default=50.0, help="hysteresis low threshold")
    p.add_argument("--high", type=float, default=150.0, help="hysteresis high threshold")
    p.add_argument("--sigma", type=float, default=1.4, help="gaussian blur sigma")
    p.add_argument(
        "--exclude-achromatic", action="store_true",
        help="drop gray pixels from the hue histogram",
    )
    p.set_defaults(func=cmd_complexity)

    p = sub("entropy", "attention entropy diagnostics for one dump")
    p.add_argument("dump", help="attention dump path")
    p.add_argument(
        "--layer-start", type=int, default=None,
        help="first layer (default: first layer in the dump)",
    )
    p.add_argument(
        "--layer-end", type=int, default=None,
        help="last layer (default: last layer in the dump)",
    )
    p.add_argument(
        "--step", type=int, default=None,
        help="generation step (default: final step)",
    )
    p.set_defaults(func=cmd_entropy)

    p = sub("contrast", "refined attention grid for one layer and step")
    p.add_argument("question_dump", help="question-conditioned attention dump")
    p.add_argument("general_dump", help="general-instruction attention dump")
    p.add_argument("--layer", type=int, required=True, help="decoder layer")
    p.add_argument(
        "--step", type=int, default=None,
        help="generation step (default: last step shared by both dumps)",
    )
    p.add_argument(
        "--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
        help="contrast regularizer added to general attention",
    )
    p.set_defaults(func=cmd_contrast)

    p = sub("study", "run the complexity-vs-entropy study over a corpus")
    p.add_argument("input_dir", help="corpus directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--layer-start", type=int, default=DEFAULT_LAYER_RANGE[0],
        help="first layer of the entropy range",
    )
    p.add_argument(
        "--layer-end", type=int, default=DEFAULT_LAYER_RANGE[1],
        help="last layer of the entropy range",
    )
    p.add_argument(
        "--step", type=int, default=None,
        help="generation step (default: each dump's final step)",
    )
    p.add_argument(
        "--bin-width", type=float, default=DEFAULT_BIN_WIDTH,
        help="bin width for the binned-mean curves",
    )
    p.add_argument(
        "--level", type=float, default=0.95,
        help="confidence level for interval estimates",
    )
    p.set_defaults(func=cmd_study)

    p = sub("synth", "generate synthetic dumps with known ground truth")
    p.add_argument(
        "--seed", type=int, default=0,
        help=f"rng seed (the {SEED_ENV} environment variable overrides this)",
    )
    p.add_argument("--n-v", type=int, default=196, help="visual token count")
    p.add_argument(
        "--roughness", type=float, default=0.5,
        help="visual clutter knob in [0, 1]; higher spreads general attention",
    )
    p.add_argument(
        "--concentration", type=float, default=0.5,
        help="semantic focus knob in [0, 1]; higher peaks question attention",
    )
    p.add_argument(
        "--delta", type=float, default=0.05,
        help="general-attention perturbation bound in [0, 1)",
    )
    p.add_argument("--layer-start", type=int, default=20, help="first recorded layer")
    p.add_argument("--layer-end", type=int, default=25, help="last recorded layer")
    p.add_argument("--n-steps", type=int, default=10, help="generation steps to record")
    p.add_argument("--out-question", default=None, help="question dump output path")
    p.add_argument("--out-general", default=None, help="general dump output path")
    p.add_argument(
        "--experiment-csv", default=None,
        help="also run the recovery experiment and write rows here",
    )
    p.add_argument(
        "--experiment-seeds", type=int, default=20,
        help="number of consecutive seeds for the recovery experiment",
    )
    p.set_defaults(func=cmd_synth)

    p = sub("cost", "closed-form compute and memory model")
    p.add_argument(
        "--alpha", type=float, default=None,
        help="early-exit depth fraction (alternative to --l-total/--l-end)",
    )
    p.add_argument("--l-total", type=int, default=None, help="total decoder layers")
    p.add_argument("--l-end", type=int, default=None, help="last executed layer")
    p.add_argument("--rho", type=float, default=0.0, help="shared prefill fraction")
    p.add_argument("--n-layers", type=int, default=6, help="recorded layers per dump")
    p.add_argument("--n-steps", type=int, default=10, help="recorded steps per dump")
    p.add_argument("--n-v", type=int, default=196, help="visual token count")
    p.add_argument(
        "--bytes-per-element", type=int, default=4,
        help="bytes per stored weight",
    )
    p.set_defaults(func=cmd_cost)

    p = sub("progressive", "fill the least-salient pixels of an image")
    p.add_argument("image", help="input PNG or JPEG")
    p.add_argument("question_dump", help="question-conditioned attention dump")
    p.add_argument("general_dump", help="general-instruction attention dump")
    p.add_argument("-o", "--output", required=True, help="output PNG path")
    p.add_argument(
        "--ratio", type=float, default=0.5,
        help="fraction of pixels to fill, lowest saliency first",
    )
    _add_contrast_flags(p)
    p.add_argument(
        "--fill", type=int, nargs=3, default=[0, 0, 0], metavar=("R", "G", "B"),
        help="fill color for hidden pixels",
    )
    p.set_defaults(func=cmd_progressive)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.simplefilter("always")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
