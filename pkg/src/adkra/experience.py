"""Execution experience: training data from successes, records of failures.

Rows keep the raw sensed values; every membership query quantizes both sides
onto the attribute grid, so a stored 23.4 answers a query for 23.0. Nearest
neighbour works on the raw values and breaks exact ties toward the column
median (the interior of the success region).
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass

from .kb import AttributeSchema

SUCCESS = "success"
FAILURE = "failure"


class ExperienceError(Exception):
    pass


class EmptyColumnError(ExperienceError):
    pass


@dataclass(frozen=True)
class AttributeVector:
    values: tuple[float, ...]
    outcome: str
    episode: int

    def __post_init__(self) -> None:
        if self.outcome not in (SUCCESS, FAILURE):
            raise ExperienceError(f"bad outcome {self.outcome!r}")
        for v in self.values:
            if not math.isfinite(v):
                raise ExperienceError("attribute values must be finite")


@dataclass(frozen=True)
class FailureRecord:
    vector: AttributeVector
    attributed_action: str


class TrainingData:
    """Multiset of successful execution vectors, plus the failure log."""

    def __init__(self, schema: AttributeSchema):
        self.schema = schema
        self.rows: list[AttributeVector] = []
        self.failures: list[FailureRecord] = []

    def __len__(self) -> int:
        return len(self.rows)

    def add_success(self, vector: AttributeVector) -> None:
        if vector.outcome != SUCCESS:
            raise ExperienceError("training data only accepts success vectors")
        if len(vector.values) != len(self.schema):
            raise ExperienceError(
                f"vector arity {len(vector.values)} does not match schema arity {len(self.schema)}"
            )
        self.rows.append(vector)

    def add_failure(self, record: FailureRecord) -> None:
        if record.vector.outcome != FAILURE:
            raise ExperienceError("failure log only accepts failure vectors")
        if len(record.vector.values) != len(self.schema):
            raise ExperienceError("failure vector arity does not match schema")
        self.failures.append(record)

    # -- queries ------------------------------------------------------------

    def column(self, attr: int, bucket_by: int | None = None, bucket_value: float | None = None) -> list[float]:
        """Raw values of one attribute, optionally restricted to a master bucket."""
        if bucket_by is None:
            return [row.values[attr - 1] for row in self.rows]
        want = self.schema.quantize(bucket_by, bucket_value)
        return [
            row.values[attr - 1]
            for row in self.rows
            if self.schema.quantize(bucket_by, row.values[bucket_by - 1]) == want
        ]

    def contains_value(self, attr: int, value: float) -> bool:
        want = self.schema.quantize(attr, value)
        for row in self.rows:
            if self.schema.quantize(attr, row.values[attr - 1]) == want:
                return True
        return False

    def contains_joint(self, attrs: list[int], values: list[float], bucket_by: int | None = None) -> bool:
        """True iff one single row matches every queried attribute after quantization.

        bucket_by names the master attribute; matching is exact on its bucket
        and membership on the others within that bucket, which under grid
        quantization is the same row-wise test.
        """
        if len(attrs) != len(values):
            raise ExperienceError("attrs and values length mismatch")
        if bucket_by is not None and bucket_by not in attrs:
            raise ExperienceError("bucket_by must be one of the queried attributes")
        wants = [self.schema.quantize(a, v) for a, v in zip(attrs, values)]
        for row in self.rows:
            if all(self.schema.quantize(a, row.values[a - 1]) == w for a, w in zip(attrs, wants)):
                return True
        return False

    def nearest_neighbor(
        self,
        attr: int,
        value: float,
        bucket_by: int | None = None,
        bucket_value: float | None = None,
    ) -> float:
        """Stored value minimising |stored - value|; ties resolve toward the median."""
        col = self.column(attr, bucket_by, bucket_value)
        if not col:
            raise EmptyColumnError(f"no stored values for attribute {attr}")
        best = min(abs(v - value) for v in col)
        candidates = sorted({v for v in col if abs(v - value) == best})
        if len(candidates) == 1:
            return candidates[0]
        median = statistics.median(col)
        if median < value:
            return candidates[0]
        if median > value:
            return candidates[-1]
        return candidates[0]

    # -- persistence ----------------------------------------------------------

    def save(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["episode"] + [s.name for s in self.schema.attributes] + ["outcome"])
            for row in self.rows:
                w.writerow([row.episode] + [repr(v) for v in row.values] + [row.outcome])

    @classmethod
    def load(cls, path: str, schema: AttributeSchema) -> "TrainingData":
        td = cls(schema)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            want = ["episode"] + [s.name for s in schema.attributes] + ["outcome"]
            if header != want:
                raise ExperienceError(f"{path}: unexpected header {header}")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(want):
                    raise ExperienceError(f"{path}: bad row at line {lineno}")
                try:
                    episode = int(row[0])
                    values = tuple(float(v) for v in row[1:-1])
                except ValueError as exc:
                    raise ExperienceError(f"{path}: bad row at line {lineno}: {exc}") from None
                outcome = row[-1]
                if outcome != SUCCESS:
                    raise ExperienceError(f"{path}: non-success outcome at line {lineno}")
                td.add_success(AttributeVector(values, outcome, episode))
        return td
