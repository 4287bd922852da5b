"""
app/trace_utils.py

Decision trace for the covering search and entropy runs.

Every branch decision of a run (witness scans, hypothesis checks, dichotomy
outcomes, case selection, failures) is pushed as a JSON-ready entry and
mirrored to the console log. Entries carry a sequence number instead of a
timestamp so trace artifacts are reproducible byte for byte.

Classes:
- TraceLog: Ordered list of trace entries.

Dependencies:
- json, logging: Standard Python libraries.

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import json
import logging
from typing import Any, Dict, List, Optional


def to_jsonable(value: Any) -> Any:
    """Converts complex numbers, numpy values and non-finite floats for JSON output."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "tolist") and callable(value.tolist):
        return to_jsonable(value.tolist())
    if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
        return None
    return value


class TraceLog:
    def __init__(self):
        self.entries: List[Dict[str, Any]] = []

    def push(self, step: str, message: str, data: Optional[Dict[str, Any]] = None, R: Optional[float] = None):
        entry = {"seq": len(self.entries), "step": step, "message": message}
        if R is not None:
            entry["R"] = R
        if data:
            entry["data"] = to_jsonable(data)
        self.entries.append(entry)
        logging.info(f"[{step}] {message}" + (f" (R={R:g})" if R is not None else ""))

    def messages(self) -> List[str]:
        return [entry["message"] for entry in self.entries]

    def steps(self, step: str) -> List[Dict[str, Any]]:
        return [entry for entry in self.entries if entry["step"] == step]

    def to_list(self) -> List[Dict[str, Any]]:
        return list(self.entries)

    def to_json(self) -> str:
        return json.dumps(self.entries, ensure_ascii=False, indent=2)

    def __len__(self) -> int:
        return len(self.entries)
