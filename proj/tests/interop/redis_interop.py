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

"""Drives the simulator over the wire with the stock redis-py client.

One process plays the physics simulator and the AV stack. Exits 77 when redis-py
is not installed so ctest can report the test as skipped.
"""

import json
import re
import subprocess
import sys
import tempfile
import time
from pathlib import Path

try:
    import redis
except ImportError:
    print("redis-py not available")
    sys.exit(77)

try:
    import jsonschema
except ImportError:
    jsonschema = None

TERASIM, SCENARIO = sys.argv[1], sys.argv[2]
SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"
V0, A_MAX, DT = 25.0, 2.0, 0.1


def idm_free(v):
    return A_MAX * (1.0 - (v / V0) ** 4)


def header(t, platform):
    return {"timestamp": t, "platform": platform, "schema_version": "1.0"}


def checker(name):
    """Validator for one published message schema; a no-op without jsonschema."""
    if jsonschema is None:
        return lambda doc: None
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    v = jsonschema.Draft202012Validator(schema)
    return v.validate


def main():
    check_world, check_control = checker("actor_state"), checker("control")
    check_heartbeat, check_sensor = checker("heartbeat"), checker("sensor")
    out = sys.argv[3] if len(sys.argv) > 3 else tempfile.mkdtemp()
    proc = subprocess.Popen(
        [TERASIM, "run", "--config", SCENARIO, "--out", out, "--logs", "all"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    port = None
    for line in proc.stderr:
        m = re.search(r"listening on [\d.]+:(\d+)", line)
        if m:
            port = int(m.group(1))
            break
    assert port, "simulator did not report a listen port"

    # Platform identity comes from AUTH <platform> <password>.
    av = redis.Redis(port=port, username="av-stack", password="x", protocol=2, decode_responses=True)
    physics = redis.Redis(port=port, username="physics-sim", password="x", protocol=2, decode_responses=True)
    assert av.ping() and physics.ping()

    # Cross-platform writes are refused.
    try:
        av.set("terasim-actor-info", json.dumps({"header": header(0, "av-stack"), "actors": []}))
        raise AssertionError("ownership rule not enforced")
    except redis.ResponseError as e:
        assert "ownership" in str(e)

    sub = av.pubsub()
    sub.subscribe("terasim-actor-info", "terasim-heartbeat")
    worlds = 0
    ended = False
    # The t=0 world may already be published before the subscription took effect.
    pending = av.get("terasim-actor-info") is not None
    deadline = time.time() + 60
    while not ended and time.time() < deadline:
        if not pending:
            msg = sub.get_message(timeout=1.0)
            if not msg or msg["type"] != "message":
                continue
            if msg["channel"] == "terasim-heartbeat":
                beat = json.loads(msg["data"])
                check_heartbeat(beat)
                ended = beat["status"] == "ended"
                continue
        pending = False
        # Step 2: the world snapshot; GET stays authoritative over the notification.
        world = json.loads(av.get("terasim-actor-info"))
        check_world(world)
        t = world["header"]["timestamp"]
        ego = next(a for a in world["actors"] if a["type"] == "AV")
        worlds += 1
        # Steps 4-5: AV stack computes and sends control stamped with the world time.
        accel = idm_free(ego["speed"])
        control = {"header": header(t, "av-stack"), "mode": "TARGET",
                   "command": {"target_accel": accel, "target_lane_offset": 0.0}}
        # Steps 1 and 3: physics simulator integrates the AV one step and reports it with sensors.
        moved = dict(ego, speed=ego["speed"] + accel * DT, accel=accel)
        moved["x"] = ego["x"] + moved["speed"] * DT
        state = {"header": header(t + DT, "physics-sim"), "actors": [moved]}
        sensor = {"header": header(t + DT, "physics-sim"), "camera": "frame"}
        check_world(state)
        check_sensor(sensor)
        check_control(control)
        physics.set("av-state-info", json.dumps(state))
        physics.set("physics-sim-sensor-info", json.dumps(sensor))
        av.set("av-control-info", json.dumps(control))
    proc.wait(timeout=30)
    assert proc.returncode == 0, f"simulator exited with {proc.returncode}"
    assert ended, "no episode-end heartbeat"
    recs = [json.loads(l) for l in Path(out, "records.jsonl").read_text().splitlines()]
    assert len(recs) == 1 and not recs[0]["crash"], recs
    run = json.loads(Path(out, "run.json").read_text())
    fresh = run["bridge"]["fresh"]
    assert fresh >= 190, run
    log = [json.loads(l) for l in Path(out, "logs", "episode_3.jsonl").read_text().splitlines()]
    final = next(a for a in log[-1]["actors"] if a["id"] == "av")
    assert final["speed"] > 20.0, final
    print(f"schemas {'checked' if jsonschema else 'not checked (jsonschema missing)'}")
    print(f"ok: {worlds} world updates, {fresh} fresh controls, final AV speed {final['speed']:.2f} m/s")


if __name__ == "__main__":
    main()
