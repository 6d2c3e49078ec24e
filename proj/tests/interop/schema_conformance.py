# Copyright 2026 The terasim contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Checks the published schemas against what the simulator reads and writes.

usage: schema_conformance.py <terasim binary> <repo root>
Exits 77 when jsonschema is not installed.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not available")
    sys.exit(77)

TERASIM, ROOT = sys.argv[1], Path(sys.argv[2])
SCHEMAS = ROOT / "schemas"


def load(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def registry():
    from referencing import Registry, Resource
    res = [(s["$id"], Resource.from_contents(s)) for s in
           (json.loads(p.read_text()) for p in SCHEMAS.glob("*.schema.json"))]
    return Registry().with_resources(res)


def validator(name):
    schema = load(name)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema, registry=registry())


def main():
    failures = []

    def expect_valid(v, doc, what):
        errs = list(v.iter_errors(doc))
        if errs:
            failures.append(f"{what}: {errs[0].json_path}: {errs[0].message}")

    def expect_invalid(v, doc, what):
        if v.is_valid(doc):
            failures.append(f"{what}: accepted by the schema")

    scenario, map_, record = validator("scenario"), validator("map"), validator("record")
    world, control, beat = validator("actor_state"), validator("control"), validator("heartbeat")

    scenarios = sorted((ROOT / "scenarios").glob("*.json"))
    for p in scenarios:
        expect_valid(scenario, json.loads(p.read_text()), p.name)

    with tempfile.TemporaryDirectory() as tmp:
        for t in ("grid3x3", "highway2", "ring"):
            out = Path(tmp, f"{t}.json")
            subprocess.run([TERASIM, "genmap", "--template", t, "--out", str(out)], check=True, capture_output=True)
            expect_valid(map_, json.loads(out.read_text()), f"genmap {t}")
        subprocess.run([TERASIM, "run", "--config", str(ROOT / "scenarios" / "vd_sequence.json"), "--episodes", "2",
                        "--out", tmp], check=True, capture_output=True)
        for i, line in enumerate(Path(tmp, "records.jsonl").read_text().splitlines()):
            expect_valid(record, json.loads(line), f"records line {i + 1}")

    h = {"timestamp": 1.0, "platform": "terasim", "schema_version": "1.0"}
    car = {"id": "a", "type": "CAR", "x": 0, "y": 0, "heading": 0, "speed": 1, "accel": 0, "length": 4.8, "width": 1.9}
    expect_valid(world, {"header": h, "actors": [car]}, "actor state")
    no_heading = {k: v for k, v in car.items() if k != "heading"}
    expect_invalid(world, {"header": h, "actors": [no_heading]}, "actor missing heading")
    expect_invalid(world, {"header": h, "actors": [dict(car, type="BUS")]}, "unknown actor type")
    expect_invalid(world, {"header": h, "actors": [dict(car, length=0)]}, "zero length")
    expect_invalid(world, {"header": dict(h, schema_version="2.0"), "actors": []}, "unknown schema version")
    expect_invalid(world, {"header": h, "actors": [], "extra": 1}, "unknown top-level key")
    ped = {"throttle": 0.5, "brake": 0.0, "steering": 0.0}
    expect_valid(control, {"header": h, "mode": "PEDALS", "command": ped}, "pedal control")
    expect_valid(control, {"header": h, "mode": "TARGET", "command": {"target_accel": -1.0}}, "target control")
    expect_invalid(control, {"header": h, "mode": "PEDALS", "command": dict(ped, throttle=1.5)}, "throttle above 1")
    expect_invalid(control, {"header": h, "mode": "TARGET", "command": ped}, "pedal command in target mode")
    expect_invalid(control, {"header": h, "mode": "STEER", "command": {}}, "unknown mode")
    expect_valid(beat, {"header": h, "status": "ended", "step": 3}, "heartbeat")
    expect_invalid(beat, {"header": h, "status": "paused", "step": 3}, "unknown status")

    for f in failures:
        print("FAIL", f)
    if failures:
        sys.exit(1)
    print(f"ok: {len(scenarios)} scenarios, 3 maps, records and message cases conform")


if __name__ == "__main__":
    main()
