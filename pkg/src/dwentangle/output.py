"""CSV writers. Every file starts with one ``#`` metadata line."""
from __future__ import annotations

import contextlib
import csv
import sys
from typing import Iterable, Sequence


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def metadata_line(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


@contextlib.contextmanager
def _open(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path: str, meta: dict, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write rows with 17 significant digits; return the number of data rows."""
    n = 0
    with _open(path) as fh:
        fh.write(metadata_line(meta) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
            n += 1
    return n


def read_csv(path: str) -> tuple[str, list[str], list[list[float]]]:
    """Inverse of :func:`write_csv`: (metadata line, header, numeric rows)."""
    with open(path, newline="") as fh:
        meta = fh.readline().rstrip("\n")
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in r] for r in reader]
    return meta, header, rows
