"""CSV/JSON/config I/O helpers.

CSV output uses RFC-4180 quoting and shortest round-trip float formatting
so files can be diffed byte-wise across runs.  Config files are plain
key=value sections (INI syntax); command-line flags override file values.
"""

import configparser
import csv
import json
import sys

import numpy as np


def format_value(v) -> str:
    """Shortest exact decimal representation for floats, plain str otherwise."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    """Write rows (iterables of values) with RFC-4180 quoting."""

    def emit(fh):
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])

    if path in (None, "-"):
        emit(sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            emit(fh)


def read_csv(path):
    """Read a CSV written by write_csv; returns (header, list of rows of
    strings)."""
    with open(path, "r", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_json(path, obj):
    """UTF-8 JSON with keys kept in insertion order."""
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def read_config(path) -> dict:
    """Parse a key=value sectioned config file into {section: {key: value}}."""
    cp = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        cp.read_file(fh)
    return {section: dict(cp.items(section)) for section in cp.sections()}
