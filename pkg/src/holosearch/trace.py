"""Convergence traces and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["TraceRecord", "ConvergenceTrace", "CSV_HEADER"]

CSV_HEADER = ("iteration", "mse", "efficiency", "ssim", "elapsed_ns", "accepted")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    mse: float
    efficiency: float
    ssim: float | None
    elapsed_ns: int | None
    accepted: int


def _fmt_float(value: float | None) -> str:
    # repr gives the shortest string that round-trips
    return "" if value is None else repr(float(value))


def _parse_float(text: str) -> float | None:
    return None if text == "" else float(text)


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError(
                f"trace iterations must increase: {record.iteration} after {self.records[-1].iteration}"
            )
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def iterations(self) -> list[int]:
        return [r.iteration for r in self.records]

    @property
    def mse(self) -> list[float]:
        return [r.mse for r in self.records]

    @property
    def last(self) -> TraceRecord:
        return self.records[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.records:
            writer.writerow(
                [
                    str(int(r.iteration)),
                    _fmt_float(r.mse),
                    _fmt_float(r.efficiency),
                    _fmt_float(r.ssim),
                    "" if r.elapsed_ns is None else str(int(r.elapsed_ns)),
                    str(int(r.accepted)),
                ]
            )
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8", newline="")

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceTrace":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        trace = cls()
        for row in reader:
            if not row:
                continue
            it, m, eff, s, el, acc = row
            trace.append(
                TraceRecord(
                    iteration=int(it),
                    mse=float(m),
                    efficiency=float(eff),
                    ssim=_parse_float(s),
                    elapsed_ns=None if el == "" else int(el),
                    accepted=int(acc),
                )
            )
        return trace

    @classmethod
    def read_csv(cls, path) -> "ConvergenceTrace":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))
