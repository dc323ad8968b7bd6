"""The iterative construction pipeline: requirements in, merged metamodel out.

One iteration chunks the requirements, prompts the configured backend with
the current serialized metamodel, sanitizes and parses the response, and
merges the resulting partial metamodel into the current one. Two prompt
tracks exist:

- dual (default): both the Ecore and the PlantUML prompt are issued; the
  Ecore response is authoritative and a warning is recorded when the
  PlantUML-derived model diverges from it.
- puml-first: only the PlantUML prompt is issued and the Ecore form is
  derived deterministically through the codecs. This is the rescue path
  for models that cannot produce syntactically correct Ecore.

`run_scenario` replays a recorded multi-iteration scenario from disk
against the fixture backend and checks the final document byte-for-byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import gateway
from .diagnostics import SyntaxDiagnosticError
from .ecore import emit_ecore, parse_ecore
from .evaluation import compare
from .gateway import BackendConfig, PromptPair
from .model import InvalidMetamodelError, Metamodel, merge, seed_metamodel
from .puml import emit_puml, parse_puml
from .requirements import chunk

TRACK_DUAL = "dual"
TRACK_PUML_FIRST = "puml-first"

STEP_CREATION = "creation"
STEP_UPDATE = "update"
STEP_FEEDBACK = "feedback"

ENV_TRACK = "MF_LLM_TRACK"


@dataclass(frozen=True)
class PipelineConfig:
    backend: BackendConfig
    track: str = TRACK_DUAL

    def __post_init__(self):
        if self.track not in (TRACK_DUAL, TRACK_PUML_FIRST):
            raise ValueError(f"unknown prompt track '{self.track}'")

    @classmethod
    def from_env(cls, env=os.environ) -> "PipelineConfig":
        return cls(backend=BackendConfig.from_env(env), track=env.get(ENV_TRACK, TRACK_DUAL))


@dataclass(frozen=True)
class IterationRecord:
    step: str
    requirement_count: int
    prompt_tokens: int = 0
    completion_tokens: int = 0
    wall_seconds: float = 0.0
    warnings: tuple[str, ...] = ()
    snapshot: Metamodel = field(default_factory=Metamodel)

    @property
    def tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


class ModelOutputError(ValueError):
    """The (sanitized) model output could not be turned into a metamodel."""


class Pipeline:
    """Holds the current metamodel and its append-only iteration history."""

    def __init__(self, config: PipelineConfig, seed: Metamodel | None = None):
        self.config = config
        self.current = seed if seed is not None else seed_metamodel()
        self.records: list[IterationRecord] = [
            IterationRecord(STEP_CREATION, 0, snapshot=self.current)
        ]

    def _partial_from_puml(self, prompt: PromptPair, warnings: list[str]):
        response = gateway.complete(self.config.backend, prompt)
        text = gateway.sanitize(response.text, "puml")
        try:
            parsed = parse_puml(text)
        except (SyntaxDiagnosticError, InvalidMetamodelError) as exc:
            raise ModelOutputError(f"PlantUML output unusable: {exc}") from exc
        warnings.extend(parsed.warning_messages())
        return parsed.metamodel, response

    def _partial_from_ecore(self, prompt: PromptPair, warnings: list[str]):
        response = gateway.complete(self.config.backend, prompt)
        text = gateway.sanitize(response.text, "ecore")
        try:
            parsed = parse_ecore(text)
        except (SyntaxDiagnosticError, InvalidMetamodelError) as exc:
            raise ModelOutputError(f"Ecore output unusable: {exc}") from exc
        warnings.extend(parsed.warning_messages())
        return parsed.metamodel, response

    def run_iteration(self, requirements_text: str, step: str = STEP_UPDATE) -> IterationRecord:
        """Run one construction step and fold the result into the pipeline.

        On any failure (transport, unusable output, merge rejection) the
        pipeline state is left exactly as it was.
        """
        if step not in (STEP_UPDATE, STEP_FEEDBACK):
            raise ValueError(f"step must be update or feedback, got '{step}'")
        chunks = chunk(requirements_text)
        if not chunks:
            raise ValueError("requirements must be non-empty")
        joined = "\n".join(c.text for c in chunks)
        warnings: list[str] = []

        if self.config.track == TRACK_PUML_FIRST:
            prompt = gateway.build_puml_prompt(joined, emit_puml(self.current))
            partial, response = self._partial_from_puml(prompt, warnings)
            prompt_tokens = response.prompt_tokens
            completion_tokens = response.completion_tokens
            wall = response.wall_seconds
        else:
            ecore_prompt = gateway.build_ecore_prompt(joined, emit_ecore(self.current))
            partial, ecore_response = self._partial_from_ecore(ecore_prompt, warnings)
            prompt_tokens = ecore_response.prompt_tokens
            completion_tokens = ecore_response.completion_tokens
            wall = ecore_response.wall_seconds

            puml_prompt = gateway.build_puml_prompt(joined, emit_puml(self.current))
            try:
                puml_partial, puml_response = self._partial_from_puml(puml_prompt, warnings)
            except (gateway.UnusableOutputError, ModelOutputError) as exc:
                warnings.append(f"PlantUML track discarded: {exc}")
            else:
                prompt_tokens += puml_response.prompt_tokens
                completion_tokens += puml_response.completion_tokens
                wall += puml_response.wall_seconds
                divergence = compare(puml_partial, partial)
                gaps = [
                    f"{label} {score.cell()}"
                    for label, score in divergence.categories()
                    if score.matched != score.total or score.extra
                ]
                if gaps:
                    warnings.append(
                        "PlantUML track diverges from Ecore track (" + ", ".join(gaps) + "); "
                        "Ecore track kept"
                    )

        outcome = merge(self.current, partial)
        warnings.extend(outcome.warnings)
        record = IterationRecord(
            step=step,
            requirement_count=len(chunks),
            prompt_tokens=prompt_tokens,
            completion_tokens=completion_tokens,
            wall_seconds=wall,
            warnings=tuple(warnings),
            snapshot=outcome.merged,
        )
        self.current = outcome.merged
        self.records.append(record)
        return record


@dataclass(frozen=True)
class ScenarioResult:
    final_ecore: str
    records: tuple[IterationRecord, ...]
    expected_path: Path | None
    matches_expected: bool
    diff_summary: str = ""


def _first_difference(actual: str, expected: str) -> str:
    actual_lines = actual.split("\n")
    expected_lines = expected.split("\n")
    for i, (a, e) in enumerate(zip(actual_lines, expected_lines), start=1):
        if a != e:
            return f"line {i}: expected {e!r}, got {a!r}"
    if len(actual_lines) != len(expected_lines):
        return (f"line count differs: expected {len(expected_lines)} lines, "
                f"got {len(actual_lines)}")
    return ""


def run_scenario(scenario_dir: str | Path, fixture_dir: str | Path | None = None, *,
                 backend: BackendConfig | None = None,
                 out_path: str | Path | None = None) -> ScenarioResult:
    """Replay a recorded scenario directory through the in-process pipeline.

    The directory holds a `scenario.json` manifest naming the ordered
    requirement files, each iteration's step kind, the prompt track, and
    the expected final .ecore document.
    """
    scenario_dir = Path(scenario_dir)
    manifest = json.loads((scenario_dir / "scenario.json").read_text(encoding="utf-8"))
    if backend is None:
        if fixture_dir is None:
            raise ValueError("either a fixture directory or an explicit backend is required")
        backend = BackendConfig(mode=gateway.MODE_FIXTURE, fixture_dir=str(fixture_dir))
    config = PipelineConfig(backend=backend, track=manifest.get("track", TRACK_PUML_FIRST))

    pipeline = Pipeline(config)
    for iteration in manifest["iterations"]:
        requirements = (scenario_dir / iteration["requirements"]).read_text(encoding="utf-8")
        pipeline.run_iteration(requirements, iteration.get("step", STEP_UPDATE))

    final = emit_ecore(pipeline.current)
    if out_path is not None:
        Path(out_path).write_text(final, encoding="utf-8")

    expected_name = manifest.get("expected")
    expected_path = scenario_dir / expected_name if expected_name else None
    matches = True
    diff = ""
    if expected_path is not None:
        expected = expected_path.read_text(encoding="utf-8")
        matches = final == expected
        if not matches:
            diff = _first_difference(final, expected)
    return ScenarioResult(final, tuple(pipeline.records), expected_path, matches, diff)
