"""Per-iteration run records and verdicts shared by every backend."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, List, Optional, Union

import numpy as np

from .graphs import VertexMapping

TRACE_COLUMNS = ["iteration", "mean_energy", "variance", "best_energy", "hit_rate", "wall_ms"]


@dataclass(frozen=True)
class Isomorphic:
    mapping: VertexMapping


@dataclass(frozen=True)
class NotFound:
    best_energy: int


@dataclass(frozen=True)
class NotIsomorphic:
    """Decided by degree-sequence pruning before any solver ran."""

    reason: str


Verdict = Union[Isomorphic, NotFound, NotIsomorphic]


@dataclass
class IterationRecord:
    iteration: int
    mean_energy: float
    variance: float
    best_energy: int
    hit_rate: float
    wall_time: float  # seconds
    min_energy: int = 0


@dataclass
class RunTrace:
    backend: str
    records: List[IterationRecord] = field(default_factory=list)
    verdict: Optional[Verdict] = None
    converged: bool = False
    final_hit_rate: float = 0.0
    best_config: Optional[np.ndarray] = None
    proposals: int = 0
    n_qubits: int = 0
    model: Any = None  # backend-specific final state

    @property
    def best_energy(self) -> Optional[int]:
        return self.records[-1].best_energy if self.records else None

    @property
    def mean_iter_seconds(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.wall_time for r in self.records]))

    @property
    def found(self) -> bool:
        return isinstance(self.verdict, Isomorphic)

    def to_csv(self, timestamp: bool = True) -> str:
        buf = io.StringIO()
        if timestamp:
            now = datetime.now(timezone.utc).isoformat(timespec="seconds")
            buf.write(f"# {self.backend} trace written {now}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in self.records:
            w.writerow(
                [
                    r.iteration,
                    f"{r.mean_energy:.6f}",
                    f"{r.variance:.6f}",
                    r.best_energy,
                    f"{r.hit_rate:.6f}",
                    f"{r.wall_time * 1e3:.3f}",
                ]
            )
        return buf.getvalue()

    def write_csv(self, path, timestamp: bool = True) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv(timestamp))


def read_trace_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
