"""Persisted experiment records.

One record file per instance bundles the instance identity, the solver
configuration, every repetition's energies, traces, and timing breakdown,
and an environment fingerprint, so all metrics can be re-derived without
re-running anything.  Serialization is canonical JSON (sorted keys, fixed
indent): serialize -> parse -> serialize is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path

from .runs import SolverRun

RECORD_SCHEMA_VERSION = 1
RECORD_SUFFIX = ".record.json"


def environment_fingerprint() -> dict:
    return {
        "thread_count": os.cpu_count() or 1,
        "hardware": platform.machine(),
        "platform": platform.platform(),
        "python": platform.python_version(),
    }


def hash_bytes(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class ExperimentRecord:
    instance_id: str
    instance_hash: str
    n: int
    solver: str
    solver_config: dict
    runs: list
    reference_energy: float | None = None
    reference_kind: str = "best_found"  # or "brute_force", "provided"
    environment: dict = field(default_factory=environment_fingerprint)
    extra: dict = field(default_factory=dict)
    schema_version: int = RECORD_SCHEMA_VERSION

    def best_energy(self) -> float:
        if not self.runs:
            raise ValueError(f"record {self.instance_id} has no runs")
        return min(run.best_energy for run in self.runs)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "instance_id": self.instance_id,
            "instance_hash": self.instance_hash,
            "n": self.n,
            "solver": self.solver,
            "solver_config": self.solver_config,
            "runs": [run.to_dict() for run in self.runs],
            "reference_energy": self.reference_energy,
            "reference_kind": self.reference_kind,
            "environment": self.environment,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentRecord":
        return cls(
            instance_id=data["instance_id"],
            instance_hash=data["instance_hash"],
            n=int(data["n"]),
            solver=data["solver"],
            solver_config=data["solver_config"],
            runs=[SolverRun.from_dict(r) for r in data["runs"]],
            reference_energy=data.get("reference_energy"),
            reference_kind=data.get("reference_kind", "best_found"),
            environment=data.get("environment", {}),
            extra=data.get("extra", {}),
            schema_version=int(data.get("schema_version", RECORD_SCHEMA_VERSION)),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.instance_id}{RECORD_SUFFIX}"
        path.write_text(self.dumps())
        return path


def loads_record(text: str) -> ExperimentRecord:
    return ExperimentRecord.from_dict(json.loads(text))


def load_record(path) -> ExperimentRecord:
    return loads_record(Path(path).read_text())


def load_records(directory) -> list:
    directory = Path(directory)
    paths = sorted(directory.glob(f"*{RECORD_SUFFIX}"))
    return [load_record(p) for p in paths]
