#!/usr/bin/env python3
"""Regenerate the shipped fixture tree under fixtures/.

- fixtures/table3/   candidate/reference .ecore pairs for the scorer
- fixtures/scenario/ the three-iteration replay scenario (requirements,
                     manifest, expected final .ecore)
- fixtures/llm/      canned chat-completion responses keyed by prompt hash
- fixtures/diagrams/ canonical PlantUML documents for transformation parity

Run from the repo root: python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from metaforge.ecore import emit_ecore  # noqa: E402
from metaforge.gateway import build_puml_prompt, prompt_hash, sanitize  # noqa: E402
from metaforge.model import (  # noqa: E402
    AttributeDef,
    ClassDef,
    Metamodel,
    ReferenceDef,
    ValueType,
    merge,
    seed_metamodel,
    validate,
)
from metaforge.puml import emit_puml, parse_puml  # noqa: E402
from metaforge.requirements import chunk  # noqa: E402

S, I, D, F, B = (ValueType.STRING, ValueType.INT, ValueType.DOUBLE,
                 ValueType.FLOAT, ValueType.BOOLEAN)


def attr(name, vt=S, default=None):
    return AttributeDef(name, vt, default)


def contain(name, target, lower=0, upper=-1):
    return ReferenceDef(name, target, containment=True, lower_bound=lower, upper_bound=upper)


# --------------------------------------------------------------------------
# Table 3 scorer fixtures
# --------------------------------------------------------------------------

SENSORS_REFERENCE = Metamodel(classes=(
    ClassDef("Vehicle", attributes=(attr("vin"), attr("manufacturer")), references=(
        contain("cameras", "Camera"),
        contain("radars", "Radar"),
        contain("lidars", "Lidar"),
        contain("ultrasonicSensors", "UltrasonicSensor"),
        contain("gpsSensors", "GpsSensor"),
    )),
    ClassDef("Sensor", is_abstract=True, attributes=(
        attr("sensorId"), attr("updateRateHz", D), attr("powerConsumptionW", D),
    )),
    ClassDef("RangeSensor", is_abstract=True, super_types=("Sensor",), attributes=(
        attr("rangeM", D, "100.0"), attr("accuracyCm", D),
    )),
    ClassDef("Camera", super_types=("Sensor",), attributes=(
        attr("resolutionWidth", I), attr("resolutionHeight", I),
        attr("frameRate", D, "30.0"), attr("colorMode"),
    )),
    ClassDef("Radar", super_types=("RangeSensor",), attributes=(
        attr("frequencyGhz", D, "77.0"), attr("beamWidthDeg", D), attr("dopplerCapable", B, "true"),
    )),
    ClassDef("Lidar", super_types=("RangeSensor",), attributes=(
        attr("channels", I, "32"), attr("pointsPerSecond", I), attr("horizontalFovDeg", D, "360.0"),
    )),
    ClassDef("UltrasonicSensor", super_types=("RangeSensor",), attributes=(
        attr("maxDistanceCm", I, "400"), attr("coneAngleDeg", D),
    )),
    ClassDef("GpsSensor", super_types=("Sensor",), attributes=(
        attr("positionAccuracyM", D), attr("supportsRtk", B),
    )),
))

SENSORS_CANDIDATE = Metamodel(classes=(
    ClassDef("Vehicle", attributes=(attr("vin"),), references=(
        contain("camera_list", "Camera"),
        contain("radar_list", "Radar"),
        contain("lidar_list", "Lidar"),
        contain("ultrasonic_list", "UltrasonicSensor"),
        contain("gps_list", "GPS_Sensor"),
    )),
    ClassDef("Sensor", is_abstract=True, attributes=(
        attr("sensor_id"), attr("update_rate_hz", D),
    )),
    ClassDef("RangeSensor", is_abstract=True, super_types=("Sensor",), attributes=(
        attr("rangeM", D, "100.0"),
    )),
    ClassDef("Camera", super_types=("Sensor",), attributes=(
        attr("resolutionWidth", I), attr("resolutionHeight", I), attr("frameRate", D),
        attr("zoomLevel", I),
    )),
    ClassDef("Radar", super_types=("RangeSensor",), attributes=(
        attr("frequencyGhz", D), attr("dopplerCapable", B),
    )),
    ClassDef("Lidar", super_types=("RangeSensor",), attributes=(
        attr("channels", D), attr("pointsPerSecond", I), attr("horizontalFovDeg", D),
    )),
    ClassDef("UltrasonicSensor", super_types=("RangeSensor",), attributes=(
        attr("maxDistanceCm", I), attr("coneAngleDeg", D),
    )),
    ClassDef("GPS_Sensor", super_types=("Sensor",), attributes=(
        attr("positionAccuracyM", D),
    )),
))

ACTUATORS_REFERENCE = Metamodel(classes=(
    ClassDef("Vehicle", is_abstract=True, references=(
        contain("throttleActuator", "ThrottleActuator", 1, 1),
        contain("brakeActuator", "BrakeActuator", 1, 1),
    )),
    ClassDef("Actuator", is_abstract=True, attributes=(
        attr("actuatorId"), attr("responseTimeMs", D), attr("maxForceN", D),
    )),
    ClassDef("ThrottleActuator", super_types=("Actuator",), attributes=(
        attr("maxOpeningPct", D, "100.0"), attr("actuationCurve"),
    )),
    ClassDef("BrakeActuator", super_types=("Actuator",), attributes=(
        attr("maxPressureBar", D, "180.0"), attr("absSupported", B, "true"), attr("padWearLevel", D),
    )),
))

ACTUATORS_CANDIDATE = Metamodel(classes=(
    ClassDef("Vehicle", references=(
        contain("throttle", "ThrottleActuator", 1, 1),
        contain("brake", "BrakeActuator", 1, 1),
    )),
    ClassDef("ThrottleActuator", attributes=(
        attr("maxOpeningPct", D), attr("currentPosition", D),
    )),
    ClassDef("BrakeActuator", attributes=(
        attr("maxPressureBar", D), attr("absSupported", B),
    )),
))

POWER_REFERENCE = Metamodel(classes=(
    ClassDef("Vehicle", is_abstract=True, references=(
        contain("powerManagement", "PowerManagement", 1, 1),
    )),
    ClassDef("EnergySystem", is_abstract=True, attributes=(
        attr("nominalVoltageV", D, "12.0"), attr("capacityKwh", D),
    )),
    ClassDef("PowerManagement", super_types=("EnergySystem",), attributes=(
        attr("batteryLevelPct", D), attr("chargingState"),
        attr("regenerativeBraking", B, "true"), attr("lowPowerThresholdPct", D, "15.0"),
    )),
))

POWER_CANDIDATE = Metamodel(classes=(
    ClassDef("Vehicle", references=(
        contain("power_management", "PowerManagement", 1, 1),
    )),
    ClassDef("PowerManagement", attributes=(
        attr("batteryLevelPct", D), attr("chargingState"), attr("regenerativeBraking", B),
    )),
))

TABLE3 = {
    "sensors": (SENSORS_CANDIDATE, SENSORS_REFERENCE),
    "actuators": (ACTUATORS_CANDIDATE, ACTUATORS_REFERENCE),
    "power": (POWER_CANDIDATE, POWER_REFERENCE),
}

# --------------------------------------------------------------------------
# Three-iteration scenario
# --------------------------------------------------------------------------

SENSOR_REQUIREMENTS = [
    "The vehicle shall be equipped with a configurable set of environment perception sensors.",
    "Each sensor shall expose a unique sensor identifier for diagnostics.",
    "Each sensor shall report its update rate in hertz.",
    "Range measuring sensors shall report their maximum range in meters.",
    "The default maximum range for range measuring sensors shall be 100.0 meters.",
    "The vehicle shall support forward facing cameras.",
    "A camera shall provide its horizontal resolution in pixels.",
    "A camera shall provide its vertical resolution in pixels.",
    "A camera shall capture frames at a configurable frame rate.",
    "The default camera frame rate shall be 30.0 frames per second.",
    "The vehicle shall support radar sensors for distance measurement.",
    "A radar sensor shall operate at a configurable carrier frequency in gigahertz.",
    "The default radar carrier frequency shall be 77.0 gigahertz.",
    "The vehicle shall support lidar sensors.",
    "A lidar sensor shall expose the number of its laser channels.",
    "The default lidar channel count shall be 32.",
    "The vehicle shall support ultrasonic sensors for near field detection.",
    "An ultrasonic sensor shall report its maximum detection distance in centimeters.",
    "The default ultrasonic detection distance shall be 400 centimeters.",
]

ACTUATOR_POWER_REQUIREMENTS = [
    "The vehicle shall be equipped with actuators for longitudinal control.",
    "Each actuator shall expose a unique actuator identifier.",
    "Each actuator shall report its response time in milliseconds.",
    "The vehicle shall provide a throttle actuator.",
    "The throttle actuator shall expose its maximum opening in percent.",
    "The default maximum throttle opening shall be 100.0 percent.",
    "The vehicle shall provide a brake actuator.",
    "The brake actuator shall expose its maximum pressure in bar.",
    "The default maximum brake pressure shall be 180.0 bar.",
    "The vehicle shall contain exactly one power management unit.",
    "The power management unit shall report the battery level in percent.",
    "The power management unit shall support regenerative braking.",
    "Regenerative braking shall be enabled by default.",
    "Actuators shall be parts of the vehicle.",
]

FEEDBACK_REQUIREMENTS = [
    "Include hardware accelerators as parts of the vehicle.",
    "A hardware accelerator shall expose its processing unit clock.",
    "A hardware accelerator shall expose its architecture type.",
]

SENSOR_CLASSES = (
    ClassDef("Vehicle", references=(contain("sensors", "Sensor"),)),
    ClassDef("Sensor", is_abstract=True, attributes=(
        attr("sensorId"), attr("updateRateHz", D),
    )),
    ClassDef("RangeSensor", is_abstract=True, super_types=("Sensor",), attributes=(
        attr("rangeM", D, "100.0"),
    )),
    ClassDef("Camera", super_types=("Sensor",), attributes=(
        attr("resolutionWidth", I), attr("resolutionHeight", I), attr("frameRate", D, "30.0"),
    )),
    ClassDef("Radar", super_types=("RangeSensor",), attributes=(
        attr("frequencyGhz", D, "77.0"),
    )),
    ClassDef("Lidar", super_types=("RangeSensor",), attributes=(
        attr("channels", I, "32"),
    )),
    ClassDef("UltrasonicSensor", super_types=("RangeSensor",), attributes=(
        attr("maxDistanceCm", I, "400"),
    )),
)

ACTUATOR_POWER_CLASSES = (
    ClassDef("Vehicle", references=(
        contain("sensors", "Sensor"),
        contain("actuators", "Actuator"),
        contain("powerManagement", "PowerManagement", 1, 1),
    )),
    ClassDef("Actuator", is_abstract=True, attributes=(
        attr("actuatorId"), attr("responseTimeMs", D),
    )),
    ClassDef("ThrottleActuator", super_types=("Actuator",), attributes=(
        attr("maxOpeningPct", D, "100.0"),
    )),
    ClassDef("BrakeActuator", super_types=("Actuator",), attributes=(
        attr("maxPressureBar", D, "180.0"),
    )),
    ClassDef("PowerManagement", attributes=(
        attr("batteryLevelPct", D), attr("regenerativeBraking", B, "true"),
    )),
)

HARDWARE_CLASSES = (
    ClassDef("Vehicle", references=(
        contain("sensors", "Sensor"),
        contain("actuators", "Actuator"),
        contain("powerManagement", "PowerManagement", 1, 1),
        contain("hardwareAccelerators", "HardwareAccelerator"),
    )),
    ClassDef("HardwareAccelerator", attributes=(
        attr("clock", D), attr("architectureType"),
    )),
)

ITERATION_PARTIALS = [
    Metamodel(classes=SENSOR_CLASSES),
    Metamodel(classes=SENSOR_CLASSES[1:] + ACTUATOR_POWER_CLASSES),
    Metamodel(classes=SENSOR_CLASSES[1:] + ACTUATOR_POWER_CLASSES[1:] + HARDWARE_CLASSES),
]

ITERATION_TOKENS = [(480, 167), (850, 252), (890, 223)]

SCENARIO_STEPS = [
    ("01_sensors.txt", SENSOR_REQUIREMENTS, "update"),
    ("02_actuators_power.txt", ACTUATOR_POWER_REQUIREMENTS, "update"),
    ("03_feedback_hardware_accelerators.txt", FEEDBACK_REQUIREMENTS, "feedback"),
]

RESPONSE_WRAPPERS = [
    "```plantuml\n{diagram}```\n",
    "Here is the updated class diagram.\n\n```plantuml\n{diagram}```\n",
    "{diagram}",
]


def build_table3(root: Path) -> None:
    out = root / "table3"
    out.mkdir(parents=True, exist_ok=True)
    for row, (candidate, reference) in TABLE3.items():
        for metamodel in (candidate, reference):
            problems = validate(metamodel)
            assert not problems, f"{row}: {problems}"
        (out / f"{row}_candidate.ecore").write_text(emit_ecore(candidate), encoding="utf-8")
        (out / f"{row}_reference.ecore").write_text(emit_ecore(reference), encoding="utf-8")


def build_scenario(root: Path) -> None:
    scenario_dir = root / "scenario"
    llm_dir = root / "llm"
    scenario_dir.mkdir(parents=True, exist_ok=True)
    llm_dir.mkdir(parents=True, exist_ok=True)

    iterations = []
    current = seed_metamodel()
    for (filename, requirements, step), partial, (p_tokens, c_tokens), wrapper in zip(
            SCENARIO_STEPS, ITERATION_PARTIALS, ITERATION_TOKENS, RESPONSE_WRAPPERS):
        text = "\n\n".join(requirements) + "\n"
        (scenario_dir / filename).write_text(text, encoding="utf-8")
        chunks = chunk(text)
        assert len(chunks) == len(requirements), (filename, len(chunks))

        joined = "\n".join(c.text for c in chunks)
        prompt = build_puml_prompt(joined, emit_puml(current))
        response_text = wrapper.format(diagram=emit_puml(partial))
        digest = prompt_hash(prompt)
        (llm_dir / f"{digest}.json").write_text(json.dumps({
            "text": response_text,
            "promptTokens": p_tokens,
            "completionTokens": c_tokens,
        }, indent=2), encoding="utf-8")

        parsed = parse_puml(sanitize(response_text, "puml"))
        current = merge(current, parsed.metamodel).merged
        iterations.append({"requirements": filename, "step": step})

    (scenario_dir / "expected.ecore").write_text(emit_ecore(current), encoding="utf-8")
    (scenario_dir / "scenario.json").write_text(json.dumps({
        "track": "puml-first",
        "iterations": iterations,
        "expected": "expected.ecore",
    }, indent=2) + "\n", encoding="utf-8")


def build_diagrams(root: Path) -> None:
    out = root / "diagrams"
    out.mkdir(parents=True, exist_ok=True)
    diagrams = {
        "vehicle_seed.puml": seed_metamodel(),
        "sensors_iteration.puml": ITERATION_PARTIALS[0],
        "actuators_power_iteration.puml": ITERATION_PARTIALS[1],
        "sensors_reference.puml": SENSORS_REFERENCE,
        "actuators_reference.puml": ACTUATORS_REFERENCE,
        "power_reference.puml": POWER_REFERENCE,
    }
    current = seed_metamodel()
    for partial in ITERATION_PARTIALS:
        current = merge(current, partial).merged
    diagrams["scenario_final.puml"] = current
    for filename, metamodel in diagrams.items():
        (out / filename).write_text(emit_puml(metamodel), encoding="utf-8")


def main() -> None:
    root = ROOT / "fixtures"
    build_table3(root)
    build_scenario(root)
    build_diagrams(root)
    print(f"fixtures written under {root}")


if __name__ == "__main__":
    main()
