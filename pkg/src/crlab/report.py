"""Structured run reports: per-check records, JSON and console rendering.

Reports are deterministic: keys are sorted, floats serialize via repr,
and nothing time- or path-dependent is embedded, so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__

PASS, FAIL, REPORTED = "pass", "fail", "reported"


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class Check:
    name: str
    measured: object
    tolerance: object
    status: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": _sanitize(self.measured),
            "tolerance": _sanitize(self.tolerance),
            "status": self.status,
            "details": _sanitize(self.details),
        }


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, name, measured, tolerance, ok: bool | None,
            **details) -> Check:
        """Record one check; ok=None marks a reported-only outcome."""
        status = REPORTED if ok is None else (PASS if ok else FAIL)
        c = Check(name, measured, tolerance, status, dict(details))
        self.checks.append(c)
        return c

    def add_upper(self, name, measured, tolerance, **details) -> Check:
        return self.add(name, measured, tolerance,
                        bool(measured <= tolerance), **details)

    def add_lower(self, name, measured, bound, **details) -> Check:
        return self.add(name, measured, bound,
                        bool(measured >= bound), **details)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.checks if c.status == FAIL)

    def summary(self) -> dict:
        return {
            "passed": sum(1 for c in self.checks if c.status == PASS),
            "failed": self.failed,
            "reported": sum(1 for c in self.checks if c.status == REPORTED),
        }

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "config": _sanitize(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "extras": _sanitize(self.extras),
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"report-{self.command}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
        return path

    def console(self) -> str:
        lines = [f"== {self.command} (crlab {__version__}) =="]
        for c in self.checks:
            m = c.measured
            if isinstance(m, float):
                m = f"{m:.6g}"
            t = c.tolerance
            if isinstance(t, float):
                t = f"{t:.3g}"
            lines.append(f"  [{c.status:8s}] {c.name}: measured={m} tol={t}")
        s = self.summary()
        lines.append(f"  -- {s['passed']} passed, {s['failed']} failed, "
                     f"{s['reported']} reported")
        return "\n".join(lines)


def write_csv(path: str, header: list, rows: list) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) if isinstance(x, (float, np.floating))
                              else str(x) for x in row) + "\n")
    return path
