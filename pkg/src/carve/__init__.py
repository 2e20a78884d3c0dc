"""Contrastive attention refinement for image questioning.

Consumes an image plus two attention dumps (question-conditioned and
general-instruction) and produces noise-suppressed images, saliency
masks, and diagnostics. See the README for the CLI and format specs.
"""

__version__ = "0.1.0"

from .attention import (
    AttentionMap,
    AttentionStack,
    DumpHeader,
    layer_entropies,
    normalize,
    overall_entropy,
    read_dump,
    read_dump_file,
    shannon_entropy,
    stack_from_grids,
    write_dump,
    write_dump_file,
)
from .contrast import (
    ContrastConfig,
    FusedSaliency,
    contrast_refine,
    fuse,
    resolve_steps,
    spatial_reshape,
)
from .errors import (
    CarveError,
    CsvFormatError,
    DumpContiguityError,
    DumpHeaderError,
    DumpMagicError,
    DumpTruncatedError,
    DumpValueError,
    DumpVersionError,
    DumpWarning,
    EmptyMaskWarning,
    ImageDecodeError,
    ParseError,
    ValidationError,
)
from .imaging import (
    EdgeMap,
    HueHistogram,
    ImageRGB,
    canny_edges,
    color_complexity,
    hue_histogram,
    rgb_to_hue_bin,
    texture_complexity,
)
from .maskgen import (
    CarveConfig,
    CarveMask,
    PipelineResult,
    Region,
    carve_pipeline,
    compute_saliency,
    connected_components,
    extract,
    percentile_threshold,
    progressive_mask,
    select_regions,
)
from .oracle import (
    CostParams,
    CostReport,
    DecompositionSpec,
    cost_model,
    condition_bound,
    entropy_monotonicity_report,
    optimal_lambda,
    recovery_error_bound,
    run_recovery_experiment,
    solve_numeric,
    synth_decomposition,
)
from .study import (
    bin_mean,
    confidence_interval,
    parse_raw_csv,
    pearson_r,
    run_study,
)

__all__ = [name for name in dir() if not name.startswith("_")]
