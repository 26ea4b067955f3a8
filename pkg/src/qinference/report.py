"""Shared verification report schema."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    """Running maximum of one residual family against a fixed tolerance.

    ``passed`` is ``None`` while no instance has been executed, so a check
    that was skipped throughout never counts as a pass.
    """

    check_id: str
    anchor: str
    tolerance: float
    max_residual: float = 0.0
    instances: int = 0
    skipped: int = 0
    worst: str | None = None

    def observe(self, residual, label=None):
        r = float(residual)
        if math.isnan(r):
            r = math.inf
        self.instances += 1
        if self.instances == 1 or r > self.max_residual:
            self.max_residual = r
            self.worst = None if label is None else str(label)

    @property
    def passed(self) -> bool | None:
        if self.instances == 0:
            return None
        return self.max_residual <= self.tolerance

    def merge(self, other: "CheckRecord"):
        if other.instances and (self.instances == 0 or other.max_residual > self.max_residual):
            self.max_residual = other.max_residual
            self.worst = other.worst
        self.instances += other.instances
        self.skipped += other.skipped

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "instances": self.instances,
            "skipped": self.skipped,
            "worst": self.worst,
        }


@dataclass
class AxiomReport:
    """Per-check residual maxima for one verification suite."""

    suite: str
    seed: int | None = None
    config: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    instances: int = 0

    def check(self, check_id: str, tolerance: float, anchor: str = "") -> CheckRecord:
        rec = self.checks.get(check_id)
        if rec is None:
            rec = self.checks[check_id] = CheckRecord(check_id, anchor, float(tolerance))
        return rec

    def observe(self, check_id: str, residual, tolerance: float, anchor: str = "", label=None):
        self.check(check_id, tolerance, anchor).observe(residual, label)

    def skip(self, check_id: str, tolerance: float, anchor: str = "", count: int = 1):
        self.check(check_id, tolerance, anchor).skipped += count

    def merge(self, other: "AxiomReport"):
        for cid, rec in other.checks.items():
            if cid in self.checks:
                self.checks[cid].merge(rec)
            else:
                self.checks[cid] = CheckRecord(**{**rec.__dict__})
        self.instances += other.instances
        for w in other.warnings:
            if w not in self.warnings:
                self.warnings.append(w)
        self.notes.update(other.notes)

    @property
    def passed(self) -> bool:
        return all(rec.passed is not False for rec in self.checks.values())

    def failures(self) -> list:
        return [rec for rec in self.checks.values() if rec.passed is False]

    def __getitem__(self, check_id: str) -> CheckRecord:
        return self.checks[check_id]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "config": self.config,
            "instances": self.instances,
            "pass": self.passed,
            "checks": [rec.to_dict() for rec in self.checks.values()],
            "warnings": list(self.warnings),
            "notes": self.notes,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def summary_lines(self) -> list:
        lines = []
        for rec in self.checks.values():
            status = {True: "PASS", False: "FAIL", None: "SKIP"}[rec.passed]
            lines.append(
                f"[{status}] {self.suite}:{rec.check_id} max_residual={rec.max_residual:.3e} "
                f"tol={rec.tolerance:.1e} n={rec.instances} skipped={rec.skipped}"
            )
        return lines
