"""Structured run reports.

Every CLI invocation produces one self-describing report object with a
stable field set: schema version, command name, input files with content
hashes, parameters, the result payload and the wall time.  Serialisation
is canonical (sorted keys), so reports are byte-identical across runs for
fixed seeds and inputs, except for the wall-time field.
"""

from __future__ import annotations

import hashlib
import json

SCHEMA_VERSION = 1


def input_entry(path: str, data: bytes) -> dict:
    return {"path": path, "sha256": hashlib.sha256(data).hexdigest()}


def make_report(command: str, inputs: list[dict], params: dict, result: dict,
                wall_time_s: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "params": params,
        "result": result,
        "wall_time_s": wall_time_s,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
