"""CSV file contracts.

Input records: UTF-8, header `time,input,output`, comma separator, `.`
decimal point, one sample per line, strictly increasing time. Trace exports
written by the simulator (`time,setpoint,control,output`) are also accepted
as input records, taking the control column as the plant input, so exported
step responses can be re-identified directly.

All output files use fixed 6-decimal formatting so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv

from .errors import CsvFormatError
from .ident import ResponseRecord
from .model import SimTrace

RECORD_HEADER = ("time", "input", "output")
TRACE_HEADER = ("time", "setpoint", "control", "output")


def read_record_csv(path) -> ResponseRecord:
    """Parse a response record, raising CsvFormatError with a line number."""
    times: list[float] = []
    inputs: list[float] = []
    outputs: list[float] = []
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError("empty file (missing header)", line=1)
        cols = tuple(c.strip().lower() for c in header)
        if cols == RECORD_HEADER:
            u_col = 1
        elif cols == TRACE_HEADER:
            u_col = 2
        else:
            raise CsvFormatError(
                f"header must be '{','.join(RECORD_HEADER)}' or "
                f"'{','.join(TRACE_HEADER)}', got '{','.join(cols)}'",
                line=1,
            )
        width = len(cols)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != width:
                raise CsvFormatError(
                    f"expected {width} fields, got {len(row)}", line=lineno
                )
            try:
                t = float(row[0])
                u = float(row[u_col])
                y = float(row[-1])
            except ValueError as exc:
                raise CsvFormatError(f"non-numeric field ({exc})", line=lineno) from None
            if times and t <= times[-1]:
                raise CsvFormatError(
                    f"time {row[0]} does not increase past {times[-1]:g}", line=lineno
                )
            times.append(t)
            inputs.append(u)
            outputs.append(y)
    if len(times) < 10:
        raise CsvFormatError(
            f"need at least 10 samples, file has {len(times)}", line=len(times) + 1
        )
    return ResponseRecord(time=times, input=inputs, output=outputs, source_label=str(path))


def write_record_csv(path, record: ResponseRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(RECORD_HEADER) + "\n")
        for t, u, y in zip(record.time, record.input, record.output):
            fh.write(f"{t:.6f},{u:.6f},{y:.6f}\n")


def write_trace_csv(path, trace: SimTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(TRACE_HEADER) + "\n")
        times = trace.times()
        for k in range(len(trace)):
            fh.write(
                f"{times[k]:.6f},{trace.setpoint[k]:.6f},"
                f"{trace.control[k]:.6f},{trace.output[k]:.6f}\n"
            )


def write_columns_csv(path, names, columns) -> None:
    """Generic column writer used for the method-comparison export."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        n = len(columns[0])
        for k in range(n):
            fh.write(",".join(f"{col[k]:.6f}" for col in columns) + "\n")
