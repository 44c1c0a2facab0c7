"""
Model: err(eps) = eps (a + b log(1/eps)).
Purpose: Rate reports: per-eps errors, the fitted (a, b) with residuals, per-point series and the
         manifest needed to rerun the experiment. CSV for tables, JSON for the full record; both are
         byte-identical for identical inputs.
Dependencies: csv, numpy, utils/serialization.py.
Ext Hooks: New formats register in WRITERS.
"""

import csv
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

from core.errors import IoFailure
from utils.serialization import pretty_json, to_plain

logger = logging.getLogger(__name__)

CSV_COLUMNS = ('epsilon', 'error', 'model_value', 'residual')


def _fmt(value: float) -> str:
    return '%.17g' % value


@dataclass
class RateReport:
    name: str
    epsilons: List[float]
    errors: List[float]
    a: Optional[float] = None
    b: Optional[float] = None
    residual: Optional[float] = None
    pointwise: List[dict] = field(default_factory=list)
    mode: str = 'sup'
    reference: str = 'pde'
    manifest: Dict = field(default_factory=dict)
    partial: bool = False
    failure: Optional[str] = None

    def __post_init__(self):
        if len(self.epsilons) != len(self.errors):
            raise ValueError("epsilons and errors differ in length")
        if any(e < 0 or math.isnan(e) for e in self.errors):
            raise ValueError("errors must be nonnegative")

    @property
    def fitted(self) -> bool:
        return self.a is not None and self.b is not None

    def model_values(self) -> List[float]:
        if not self.fitted:
            return [math.nan] * len(self.epsilons)
        return [eps * (self.a + self.b * math.log(1.0 / eps)) for eps in self.epsilons]

    def residuals(self) -> List[float]:
        return [e - m for e, m in zip(self.errors, self.model_values())]

    def scaled_errors(self) -> List[float]:
        """e(eps) / eps, the quantity the pointwise rate keeps bounded."""
        return [e / eps for e, eps in zip(self.errors, self.epsilons)]

    def to_dict(self) -> dict:
        return to_plain(asdict(self))

    @classmethod
    def from_dict(cls, raw: dict) -> 'RateReport':
        return cls(**raw)


def write_table(stream, columns: Sequence[str], rows) -> None:
    """CSV with a header row; numbers in round-trip precision."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def save_table(path: str, columns: Sequence[str], rows) -> str:
    try:
        with open(path, 'w', newline='') as f:
            write_table(f, columns, rows)
    except OSError as e:
        raise IoFailure(f"Cannot write table {path}: {e}") from e
    return path


def _write_csv(report: RateReport, path: str) -> None:
    with open(path, 'w', newline='') as f:
        write_table(f, CSV_COLUMNS, zip(report.epsilons, report.errors, report.model_values(), report.residuals()))


def _write_json(report: RateReport, path: str) -> None:
    with open(path, 'w') as f:
        f.write(pretty_json(report.to_dict()))


WRITERS = {'csv': _write_csv, 'json': _write_json}


def emit_report(report: RateReport, directory: str, formats: Sequence[str] = ('csv', 'json')) -> List[str]:
    """Write the report as <directory>/<name>.<format>; returns the written paths."""
    unknown = [f for f in formats if f not in WRITERS]
    if unknown:
        raise ValueError(f"Unknown report formats {unknown}; choose from {sorted(WRITERS)}")
    paths = []
    try:
        os.makedirs(directory, exist_ok=True)
        for fmt in formats:
            path = os.path.join(directory, f"{report.name}.{fmt}")
            WRITERS[fmt](report, path)
            paths.append(path)
    except OSError as e:
        raise IoFailure(f"Cannot write report '{report.name}' to {directory}: {e}") from e
    logger.info("Wrote %s report '%s' to %s", "partial" if report.partial else "complete", report.name, directory)
    return paths


def load_report(path: str) -> RateReport:
    try:
        with open(path, 'r') as f:
            raw = json.load(f)
    except OSError as e:
        raise IoFailure(f"Cannot read report {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise IoFailure(f"Report {path} is not valid JSON: {e}") from e
    return RateReport.from_dict(raw)
