"""Table emission (CSV/JSON), parsing and output paths. Depends on config."""

import csv
import json
import logging
import math
import os
import re
import sys
from datetime import datetime
from io import StringIO

from rician_lowsnr import config
from rician_lowsnr.errors import DomainError

log = logging.getLogger(__name__)

BASE_OUTPUT_DIR = config.BASE_OUTPUT_DIR
FILENAME_MAX_LEN = config.FILENAME_MAX_LEN
SIG_DIGITS = config.SIG_DIGITS

FLAGS_COLUMN = "flags"
_LN2 = math.log(2.0)


def clean_path(user_input):
    """Sanitise a file path (handles shell quoting / escaped spaces)."""
    path = user_input.strip()
    if len(path) > 1 and path[0] in ["'", '"'] and path[-1] == path[0]:
        path = path[1:-1]
    return path.replace("\\ ", " ")


def round_sig(value, digits=SIG_DIGITS):
    """Round to the emitted precision so tables survive a write/read cycle unchanged."""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.{digits}g}")


def format_cell(value, digits=SIG_DIGITS):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{float(value):.{digits}g}"


def normalize_rows(rows, columns=config.CSV_COLUMNS):
    """Fixed-schema copies of ``rows``: every column present, floats rounded, missing as None."""
    out = []
    for row in rows:
        clean = {}
        for name in columns:
            value = row.get(name)
            if name == FLAGS_COLUMN:
                clean[name] = value or ""
            else:
                clean[name] = round_sig(value)
        out.append(clean)
    return out


def to_bits(rows):
    """Rates in bits instead of nats; energy per bit instead of per nat."""
    converted = []
    for row in rows:
        new = dict(row)
        for name, value in row.items():
            if value is None or name == FLAGS_COLUMN:
                continue
            if name.startswith(("cap_", "rate_")):
                new[name] = round_sig(value / _LN2)
            elif name.startswith("ee_"):
                new[name] = round_sig(value * _LN2)
        converted.append(new)
    return converted


def render_csv(rows, columns=config.CSV_COLUMNS):
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(name)) for name in columns])
    return buf.getvalue()


def render_json(rows, columns=config.CSV_COLUMNS):
    payload = [{name: row.get(name) for name in columns} for row in rows]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_table(rows, fmt, columns=config.CSV_COLUMNS):
    if fmt == "csv":
        return render_csv(rows, columns)
    if fmt == "json":
        return render_json(rows, columns)
    raise DomainError(f"unknown output format {fmt!r} (expected one of {', '.join(config.OUTPUT_FORMATS)})")


def write_table(rows, path, fmt, columns=config.CSV_COLUMNS):
    """Write ``rows`` to ``path`` as UTF-8 CSV or JSON and return the path."""
    text = render_table(rows, fmt, columns)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    log.debug("wrote %d rows to %s", len(rows), path)
    return path


def _parse_cell(name, text):
    if name == FLAGS_COLUMN:
        return text
    if text == "":
        return None
    return float(text)


def read_table(path):
    """Parse a file written by write_table back into a list of row dicts."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        text = f.read()
    if path.lower().endswith(".json") or text.lstrip().startswith("["):
        data = json.loads(text)
        return [
            {name: (value if name == FLAGS_COLUMN or value is None else float(value)) for name, value in row.items()}
            for row in data
        ]
    reader = csv.reader(StringIO(text))
    header = next(reader)
    return [{name: _parse_cell(name, cell) for name, cell in zip(header, cells)} for cells in reader]


def default_output_path(label, fmt, subfolder="sweeps", base_dir=None):
    """Timestamped, unique file name under outputs/<subfolder>/."""
    save_path = os.path.join(base_dir or BASE_OUTPUT_DIR, subfolder)
    os.makedirs(save_path, exist_ok=True)

    timestamp = datetime.now().strftime("%H-%M-%S")
    snippet = (label or "").strip()
    clean_label = (
        re.sub(r"[^\w\s-]", "", snippet)[:FILENAME_MAX_LEN]
        .strip()
        .replace(" ", "_")
        or "table"
    )
    filename = f"{timestamp}_{clean_label}.{fmt}"
    final_path = os.path.join(save_path, filename)
    if os.path.exists(final_path):
        base, ext = os.path.splitext(filename)
        counter = 1
        while os.path.exists(final_path):
            final_path = os.path.join(save_path, f"{base}_{counter}{ext}")
            counter += 1
    return final_path


def resolve_output(out, label, fmt):
    """Path to write to for ``--out``: None means stdout, a directory gets a generated name."""
    if out is None:
        return None
    path = clean_path(out)
    if os.path.isdir(path) or path.endswith(os.sep):
        return default_output_path(label, fmt, subfolder="", base_dir=path)
    return path


def write_report(report, out, label):
    """Dump a scalar report as JSON to --out (file or directory) or stdout; returns the path or None."""
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    path = resolve_output(out, label, "json")
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path
