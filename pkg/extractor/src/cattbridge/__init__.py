"""Attention extraction bridge: dumps and probability traces from VLMs."""

from .catt import encode_dump, write_dump_file
from .errors import (
    BridgeError,
    BridgeValidationError,
    CandidateTokenError,
    ImageMismatchError,
    MaskToolError,
    ModelUnavailableError,
)
from .extract import GENERAL_PROMPT, extract_dump
from .model import STUB_MODEL_ID, ModelRef, StubVlm, load_model
from .trace import ProbTrace, trace_probabilities, trace_to_csv

__all__ = [
    "BridgeError",
    "BridgeValidationError",
    "CandidateTokenError",
    "GENERAL_PROMPT",
    "ImageMismatchError",
    "MaskToolError",
    "ModelRef",
    "ModelUnavailableError",
    "ProbTrace",
    "STUB_MODEL_ID",
    "StubVlm",
    "encode_dump",
    "extract_dump",
    "load_model",
    "trace_probabilities",
    "trace_to_csv",
    "write_dump_file",
]

__version__ = "0.1.0"
