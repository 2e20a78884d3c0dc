"""Corpus-level study: visual complexity versus attention entropy.

Walks a directory of image + attention-dump pairs, measures texture
complexity, color complexity, and mean attention entropy per sample,
and summarizes how they move together: binned means over [0, 1],
Pearson correlations, and t-based confidence intervals. Optionally
joins a labels file to relate attention entropy to answer accuracy.

Corpus layout: ``<id>.png`` / ``<id>.jpg`` / ``<id>.jpeg`` next to
``<id>.q.catt`` (question-conditioned attention; a ``<id>.g.catt``
general dump may sit alongside but the study does not read it), plus
an optional ``labels.csv`` with rows ``id,correct`` where correct is 0
or 1. Orphans (image without dump, dump without image) are recorded as
errors and the run continues. An empty corpus succeeds with a warning.

Outputs written to the output directory: ``raw.csv`` (one row per
sample; parse_raw_csv restores it exactly), ``binned.csv`` (binned
means per metric pair), ``stats.json``, ``plot.svg`` (deterministic
bytes for a given corpus).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._ttable import MAX_DF, NORMAL_CRITICAL, T_CRITICAL
from .attention import overall_entropy, layer_entropies, read_dump_file
from .errors import CarveError, CsvFormatError, ValidationError
from .imaging import ImageRGB, color_complexity, texture_complexity

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
DEFAULT_LAYER_RANGE = (20, 25)
DEFAULT_BIN_WIDTH = 0.1


@dataclass(frozen=True)
class BinStat:
    """One bin of a binned-mean curve; mean is None for empty bins."""

    center: float
    mean: float | None
    count: int


def bin_mean(x, y, width: float = DEFAULT_BIN_WIDTH) -> list:
    """Mean of y over half-open bins of x covering [0, 1].

    Bins are [k*width, (k+1)*width) except the last, which closes at
    1.0 so x = 1.0 belongs to it. Every bin is reported, empty ones
    with count 0 and mean None. x values must lie in [0, 1] and width
    must divide 1 into a whole number of bins.
    """
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1 or xv.size != yv.size:
        raise ValidationError("x and y must be 1-d and the same length")
    if not (np.isfinite(xv).all() and np.isfinite(yv).all()):
        raise ValidationError("x and y must be finite")
    if xv.size and (xv.min() < 0.0 or xv.max() > 1.0):
        raise ValidationError("x values must lie in [0, 1]")
    if not (0.0 < width <= 1.0):
        raise ValidationError("width must be in (0, 1]")
    n_bins = int(round(1.0 / width))
    if abs(n_bins * width - 1.0) > 1e-9:
        raise ValidationError("width must divide [0, 1] into whole bins")
    idx = np.minimum(np.floor(xv / width).astype(np.int64), n_bins - 1)
    stats = []
    for b in range(n_bins):
        sel = idx == b
        count = int(sel.sum())
        mean = float(yv[sel].mean()) if count else None
        stats.append(BinStat(center=(b + 0.5) * width, mean=mean, count=count))
    return stats


def pearson_r(x, y) -> float:
    """Pearson correlation; needs n >= 2 and variance on both sides."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1 or xv.size != yv.size:
        raise ValidationError("x and y must be 1-d and the same length")
    if xv.size < 2:
        raise ValidationError("pearson_r needs at least two points")
    if not (np.isfinite(xv).all() and np.isfinite(yv).all()):
        raise ValidationError("x and y must be finite")
    cx = xv - xv.mean()
    cy = yv - yv.mean()
    vx = float(np.sum(cx * cx))
    vy = float(np.sum(cy * cy))
    if vx == 0.0 or vy == 0.0:
        raise ValidationError("pearson_r is undefined for zero variance")
    return float(np.sum(cx * cy) / math.sqrt(vx * vy))


def t_critical(level: float, df: int) -> float:
    """Two-sided Student-t critical value from the frozen table."""
    if level not in T_CRITICAL:
        raise ValidationError(
            f"unsupported confidence level {level}; choose from {sorted(T_CRITICAL)}"
        )
    if df < 1:
        raise ValidationError("degrees of freedom must be >= 1")
    if df <= MAX_DF:
        return T_CRITICAL[level][df - 1]
    return NORMAL_CRITICAL[level]


def confidence_interval(samples, level: float = 0.95) -> tuple:
    """(mean, half_width) of a t-based two-sided confidence interval."""
    sv = np.asarray(samples, dtype=np.float64)
    if sv.ndim != 1 or sv.size < 2:
        raise ValidationError("confidence_interval needs at least two samples")
    if not np.isfinite(sv).all():
        raise ValidationError("samples must be finite")
    n = sv.size
    mean = float(sv.mean())
    sd = float(sv.std(ddof=1))
    half = t_critical(level, n - 1) * sd / math.sqrt(n)
    return (mean, half)


# ----------------------------------------------------------------- corpus


@dataclass(frozen=True)
class StudySample:
    """Per-sample measurements joined with an optional outcome label."""

    sample_id: str
    texture: float
    color: float
    entropy: float
    entropy_norm: float
    per_layer: dict
    correct: int | None


@dataclass(frozen=True)
class StudyResult:
    samples: tuple
    errors: tuple
    stats: dict


def _discover(input_dir: Path):
    images = {}
    dumps = {}
    errors = []
    for path in sorted(input_dir.iterdir()):
        if path.is_dir():
            continue
        name = path.name
        if name == "labels.csv":
            continue
        lower = name.lower()
        if lower.endswith(".q.catt"):
            dumps[name[: -len(".q.catt")]] = path
        elif lower.endswith(".g.catt"):
            continue  # general dumps are allowed but not consumed here
        elif any(lower.endswith(s) for s in IMAGE_SUFFIXES):
            stem = name.rsplit(".", 1)[0]
            if stem in images:
                errors.append(f"duplicate image for id {stem!r}: {name}")
            else:
                images[stem] = path
    for stem in sorted(set(images) - set(dumps)):
        errors.append(f"orphan image without dump: {images[stem].name}")
    for stem in sorted(set(dumps) - set(images)):
        errors.append(f"orphan dump without image: {dumps[stem].name}")
    paired = sorted(set(images) & set(dumps))
    return [(stem, images[stem], dumps[stem]) for stem in paired], errors


def _read_labels(path: Path) -> dict:
    labels = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for i, row in enumerate(reader):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise CsvFormatError(f"labels.csv row {i + 1}: expected 'id,correct'")
            key, value = row[0].strip(), row[1].strip()
            if i == 0 and key == "id" and value == "correct":
                continue
            if value not in ("0", "1"):
                raise CsvFormatError(
                    f"labels.csv row {i + 1}: correct must be 0 or 1, got {value!r}"
                )
            labels[key] = int(value)
    return labels


def run_study(
    input_dir,
    output_dir,
    layer_range=DEFAULT_LAYER_RANGE,
    step=None,
    bin_width: float = DEFAULT_BIN_WIDTH,
    level: float = 0.95,
) -> StudyResult:
    """Measure every paired sample, join labels, write the four outputs."""
    in_dir = Path(input_dir)
    out_dir = Path(output_dir)
    if not in_dir.is_dir():
        raise ValidationError(f"input directory {in_dir} does not exist")
    out_dir.mkdir(parents=True, exist_ok=True)

    pairs, errors = _discover(in_dir)
    labels_path = in_dir / "labels.csv"
    labels = _read_labels(labels_path) if labels_path.exists() else {}

    samples = []
    for stem, image_path, dump_path in pairs:
        try:
            image = ImageRGB.load(image_path)
            stack = read_dump_file(dump_path)
            per_layer = layer_entropies(stack, layer_range, step)
            entropy = overall_entropy(stack, layer_range, step)
            samples.append(
                StudySample(
                    sample_id=stem,
                    texture=texture_complexity(image),
                    color=color_complexity(image),
                    entropy=entropy,
                    entropy_norm=entropy / math.log(stack.n_v) if stack.n_v > 1 else 0.0,
                    per_layer=per_layer,
                    correct=labels.get(stem),
                )
            )
        except (CarveError, OSError) as exc:
            errors.append(f"sample {stem!r}: {exc}")
    for stem in sorted(set(labels) - {s.sample_id for s in samples}):
        errors.append(f"label without measured sample: {stem!r}")

    if not samples:
        warnings.warn("study corpus produced no measurable samples", UserWarning, stacklevel=2)

    stats = _build_stats(samples, errors, level)
    _write_raw_csv(samples, out_dir / "raw.csv")
    binned = _binned_metrics(samples, bin_width)
    _write_binned_csv(binned, out_dir / "binned.csv")
    with open(out_dir / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_plot(samples, binned, out_dir / "plot.svg")
    return StudyResult(samples=tuple(samples), errors=tuple(errors), stats=stats)


def _try_pearson(x, y):
    try:
        return pearson_r(x, y), None
    except ValidationError as exc:
        return None, str(exc)


def _build_stats(samples, errors, level: float) -> dict:
    stats = {
        "n_samples": len(samples),
        "confidence_level": level,
        "errors": sorted(errors),
        "r_texture_entropy": None,
        "r_color_entropy": None,
        "r_entropy_accuracy": None,
        "mean_entropy": None,
        "entropy_ci_half_width": None,
        "notes": [],
    }
    if samples:
        entropies = [s.entropy for s in samples]
        stats["mean_entropy"] = float(np.mean(entropies))
        if len(entropies) >= 2:
            _, half = confidence_interval(entropies, level)
            stats["entropy_ci_half_width"] = half
        textures = [s.texture for s in samples]
        colors = [s.color for s in samples]
        r, note = _try_pearson(textures, entropies)
        stats["r_texture_entropy"] = r
        if note:
            stats["notes"].append(f"texture correlation unavailable: {note}")
        r, note = _try_pearson(colors, entropies)
        stats["r_color_entropy"] = r
        if note:
            stats["notes"].append(f"color correlation unavailable: {note}")
        labeled = [(s.entropy_norm, s.correct) for s in samples if s.correct is not None]
        if len(labeled) >= 2:
            r, note = _try_pearson([e for e, _ in labeled], [c for _, c in labeled])
            stats["r_entropy_accuracy"] = r
            if note:
                stats["notes"].append(f"accuracy correlation unavailable: {note}")
        elif labeled:
            stats["notes"].append("accuracy correlation needs at least two labeled samples")
    return stats


def _layer_columns(samples) -> list:
    layers = sorted({l for s in samples for l in s.per_layer})
    return [f"entropy_layer_{l}" for l in layers], layers


def _write_raw_csv(samples, path: Path) -> None:
    header_cols, layers = _layer_columns(samples)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["id", "texture", "color", "entropy_nats", "entropy_norm", "correct"]
            + header_cols
        )
        for s in samples:
            row = [
                s.sample_id,
                repr(s.texture),
                repr(s.color),
                repr(s.entropy),
                repr(s.entropy_norm),
                "" if s.correct is None else str(s.correct),
            ]
            row += [
                repr(s.per_layer[l]) if l in s.per_layer else "" for l in layers
            ]
            writer.writerow(row)


def parse_raw_csv(path) -> list:
    """Read raw.csv back into StudySample records (exact float round-trip)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("raw.csv is empty")
        fixed = ["id", "texture", "color", "entropy_nats", "entropy_norm", "correct"]
        if header[: len(fixed)] != fixed:
            raise CsvFormatError(f"raw.csv header mismatch: {header}")
        layers = []
        for col in header[len(fixed):]:
            if not col.startswith("entropy_layer_"):
                raise CsvFormatError(f"unexpected raw.csv column {col!r}")
            layers.append(int(col[len("entropy_layer_"):]))
        samples = []
        for row in reader:
            if len(row) != len(header):
                raise CsvFormatError(f"raw.csv row has {len(row)} fields, expected {len(header)}")
            per_layer = {
                l: float(v) for l, v in zip(layers, row[len(fixed):]) if v != ""
            }
            samples.append(
                StudySample(
                    sample_id=row[0],
                    texture=float(row[1]),
                    color=float(row[2]),
                    entropy=float(row[3]),
                    entropy_norm=float(row[4]),
                    per_layer=per_layer,
                    correct=None if row[5] == "" else int(row[5]),
                )
            )
    return samples


_METRIC_PAIRS = (
    ("texture_vs_entropy", "texture", "entropy"),
    ("color_vs_entropy", "color", "entropy"),
    ("entropy_vs_accuracy", "entropy_norm", "correct"),
)


def _binned_metrics(samples, width: float) -> dict:
    out = {}
    for metric, x_attr, y_attr in _METRIC_PAIRS:
        points = [
            (getattr(s, x_attr), getattr(s, y_attr))
            for s in samples
            if getattr(s, y_attr) is not None
        ]
        xs = [p[0] for p in points]
        ys = [float(p[1]) for p in points]
        out[metric] = bin_mean(xs, ys, width) if points else bin_mean([], [], width)
    return out


def _write_binned_csv(binned: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "bin_center", "mean", "count"])
        for metric, _, _ in _METRIC_PAIRS:
            for stat in binned[metric]:
                writer.writerow(
                    [
                        metric,
                        repr(stat.center),
                        "" if stat.mean is None else repr(stat.mean),
                        stat.count,
                    ]
                )


def _write_plot(samples, binned: dict, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "carve-study"
    fig, axes = plt.subplots(1, 3, figsize=(13.5, 4.0))
    panels = (
        ("texture_vs_entropy", "texture complexity", "attention entropy (nats)", "texture", "entropy"),
        ("color_vs_entropy", "color complexity", "attention entropy (nats)", "color", "entropy"),
        ("entropy_vs_accuracy", "normalized attention entropy", "accuracy", "entropy_norm", "correct"),
    )
    for ax, (metric, xlabel, ylabel, x_attr, y_attr) in zip(axes, panels):
        pts = [
            (getattr(s, x_attr), getattr(s, y_attr))
            for s in samples
            if getattr(s, y_attr) is not None
        ]
        if pts:
            ax.scatter([p[0] for p in pts], [float(p[1]) for p in pts], s=12, alpha=0.45)
        centers = [b.center for b in binned[metric] if b.mean is not None]
        means = [b.mean for b in binned[metric] if b.mean is not None]
        if centers:
            ax.plot(centers, means, marker="o", color="#c0392b", linewidth=1.6)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_xlim(0.0, 1.0)
        ax.set_title(metric.replace("_", " "))
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
