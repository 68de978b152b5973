import csv
import sys
from typing import Iterable, Optional, TextIO

from bounds import BoundsRow

FIELDNAMES = [
    "label", "topology", "n", "strategy", "variant",
    "upper", "upper_value", "lower", "lower_value",
    "tau", "success", "ticks", "monotone", "iota", "oracle", "strict_iota",
]


def write_tsv(rows: Iterable[BoundsRow], stream: Optional[TextIO] = None):
    """Write bounds rows as tab-separated values, header first.

    Args:
        rows: Bounds rows in table order
        stream: Open text stream (default: stdout)
    """
    stream = stream or sys.stdout
    writer = csv.DictWriter(stream, fieldnames=FIELDNAMES, delimiter="\t", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_dict())


def write_tsv_report(rows: Iterable[BoundsRow], filename: str = "bounds.tsv"):
    """Write bounds rows to a TSV file."""
    with open(filename, "w", newline="", encoding="utf-8") as f:
        write_tsv(rows, f)
