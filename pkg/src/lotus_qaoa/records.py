"""Benchmark run records and their on-disk store.

Records are persisted as newline-delimited JSON (one record per line,
append-only, crash-safe) plus an optional derived CSV for spreadsheets.
Floats serialize through repr, so values round-trip bit-exactly.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass

from .instance import CutResult


@dataclass(frozen=True)
class RunRecord:
    """One optimization outcome with full provenance."""

    seed: int
    optimizer: str
    n_qubits: int
    depth: int
    p_graph: float
    k_modes: int  # 0 for baselines
    expectation: float
    expectation_exact: float
    iterations: int
    evaluations: int
    best_cut: CutResult
    approx_ratio: float | None
    wall_time: float

    def cell_key(self) -> tuple:
        """Identity of the (instance, seed) cell this record belongs to."""
        return (self.n_qubits, self.depth, self.p_graph, self.seed)

    def run_key(self) -> tuple:
        """Identity of the full run (cell plus optimizer configuration)."""
        return self.cell_key() + (self.optimizer, self.k_modes)

    def to_json(self) -> str:
        d = asdict(self)
        cut = d.pop("best_cut")
        d["best_bitstring"] = cut["bitstring"]
        d["best_cut_value"] = cut["cut_value"]
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        return cls(
            seed=int(d["seed"]),
            optimizer=str(d["optimizer"]),
            n_qubits=int(d["n_qubits"]),
            depth=int(d["depth"]),
            p_graph=float(d["p_graph"]),
            k_modes=int(d["k_modes"]),
            expectation=float(d["expectation"]),
            expectation_exact=float(d["expectation_exact"]),
            iterations=int(d["iterations"]),
            evaluations=int(d["evaluations"]),
            best_cut=CutResult(bitstring=str(d["best_bitstring"]),
                               cut_value=float(d["best_cut_value"])),
            approx_ratio=None if d["approx_ratio"] is None else float(d["approx_ratio"]),
            wall_time=float(d["wall_time"]),
        )


def append_record(path: str, record: RunRecord) -> None:
    """Append one record and flush, so partial sweeps survive a crash."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def load_records(path: str) -> list[RunRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_json(line))
    return records


_CSV_COLUMNS = [
    "seed", "optimizer", "n_qubits", "depth", "p_graph", "k_modes",
    "expectation", "expectation_exact", "iterations", "evaluations",
    "best_bitstring", "best_cut_value", "approx_ratio", "wall_time",
]


def write_csv(path: str, records: list[RunRecord]) -> None:
    """Derived CSV view of a record list (floats via repr, lossless)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.seed, r.optimizer, r.n_qubits, r.depth, repr(r.p_graph), r.k_modes,
                repr(r.expectation), repr(r.expectation_exact), r.iterations,
                r.evaluations, r.best_cut.bitstring, repr(r.best_cut.cut_value),
                "" if r.approx_ratio is None else repr(r.approx_ratio), repr(r.wall_time),
            ])
