"""metaforge: expert-in-the-loop metamodel construction tooling.

The IR (Metamodel and friends) sits at the center; the PlantUML and Ecore
codecs, the scoring module, the LLM gateway and the iterative pipeline all
operate on it.
"""

from .diagnostics import Diagnostic, ParseResult
from .ecore import EcoreParseError, emit_ecore, parse_ecore
from .evaluation import ComparisonReport, compare, format_report, report_to_dict
from .gateway import (
    BackendConfig,
    LlmResponse,
    PromptPair,
    build_ecore_prompt,
    build_puml_prompt,
    complete,
    prompt_hash,
    sanitize,
)
from .model import (
    AttributeDef,
    ClassDef,
    InvalidMetamodelError,
    Metamodel,
    MergeError,
    MergeOutcome,
    ReferenceDef,
    ValueType,
    canonicalize,
    merge,
    sanitize_identifier,
    seed_metamodel,
    validate,
)
from .pipeline import IterationRecord, Pipeline, PipelineConfig, run_scenario
from .puml import PumlSyntaxError, emit_puml, parse_puml
from .requirements import RequirementChunk, chunk, filter_by_aspect

__version__ = "0.1.0"

__all__ = [
    "AttributeDef",
    "BackendConfig",
    "ClassDef",
    "ComparisonReport",
    "Diagnostic",
    "EcoreParseError",
    "InvalidMetamodelError",
    "IterationRecord",
    "LlmResponse",
    "Metamodel",
    "MergeError",
    "MergeOutcome",
    "ParseResult",
    "Pipeline",
    "PipelineConfig",
    "PromptPair",
    "PumlSyntaxError",
    "ReferenceDef",
    "RequirementChunk",
    "ValueType",
    "build_ecore_prompt",
    "build_puml_prompt",
    "canonicalize",
    "chunk",
    "compare",
    "complete",
    "emit_ecore",
    "emit_puml",
    "filter_by_aspect",
    "format_report",
    "merge",
    "parse_ecore",
    "parse_puml",
    "prompt_hash",
    "report_to_dict",
    "run_scenario",
    "sanitize",
    "sanitize_identifier",
    "seed_metamodel",
    "validate",
]
