"""Stable on-disk formats for profiles, trajectories and run summaries.

All files are UTF-8 with LF line endings. Floats are written with
``repr`` (shortest round-trip form), so identical runs give identical
bytes and reading a file back recovers the exact values.

* profile CSV: ``s,a,b,theta,extended`` with ``extended`` in {0, 1}
* trajectory CSV: ``t,tau,w,beta,alpha``; ``w`` is ``inf`` at a hinged base
* profile JSON: the same columns plus ``bc``, ``lambda`` and run metadata
* summary JSON: headline numbers, the full run configuration and the names
  of the files written next to it
"""
import csv
import io
import json
from pathlib import Path

import numpy as np

from .reconstruct import ColumnProfile

__all__ = [
    "PROFILE_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "FormatError",
    "write_profile_csv",
    "read_profile_csv",
    "write_profile_json",
    "read_profile_json",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_summary",
    "read_summary",
    "load_profile",
]

PROFILE_COLUMNS = ("s", "a", "b", "theta", "extended")
TRAJECTORY_COLUMNS = ("t", "tau", "w", "beta", "alpha")
SUMMARY_NAME = "summary.json"


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def _num(x):
    return repr(float(x))


def _write_text(path, text):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _write_rows(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return _write_text(path, buf.getvalue())


def _read_rows(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if tuple(first) != tuple(header):
            raise FormatError(f"{path}: expected header {','.join(header)}, got {','.join(first)}")
        rows = [r for r in reader if r]
    if any(len(r) != len(header) for r in rows):
        raise FormatError(f"{path}: ragged rows")
    try:
        return np.array(rows, dtype=float).reshape(-1, len(header))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_profile_csv(path, prof):
    rows = (
        (_num(s), _num(a), _num(b), _num(th), str(int(e)))
        for s, a, b, th, e in zip(prof.s, prof.a, prof.b, prof.theta, prof.extended)
    )
    return _write_rows(path, PROFILE_COLUMNS, rows)


def read_profile_csv(path, bc, lam, meta=None):
    """The CSV has no header fields for ``bc`` and ``lam``; they come from the summary."""
    data = _read_rows(path, PROFILE_COLUMNS)
    s, a, b, theta, ext = data.T
    return ColumnProfile(bc, lam, s, a, b, theta, ext != 0, dict(meta or {}))


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def write_profile_json(path, prof):
    doc = {
        "bc": prof.bc.value,
        "lambda": prof.lam,
        "meta": prof.meta,
        "columns": {
            "s": prof.s.tolist(),
            "a": prof.a.tolist(),
            "b": prof.b.tolist(),
            "theta": prof.theta.tolist(),
            "extended": [int(e) for e in prof.extended],
        },
    }
    return _write_text(path, _dump_json(doc))


def read_profile_json(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        cols = doc["columns"]
        return ColumnProfile(
            doc["bc"], doc["lambda"], cols["s"], cols["a"], cols["b"], cols["theta"],
            np.asarray(cols["extended"]) != 0, doc.get("meta", {}),
        )
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from None


def write_trajectory_csv(path, solution):
    rows = ((_num(t), *(_num(x) for x in y)) for t, y in zip(solution.t, solution.states))
    return _write_rows(path, TRAJECTORY_COLUMNS, rows)


def read_trajectory_csv(path):
    """``(t, states)`` with ``states`` of shape ``(n, 4)``."""
    data = _read_rows(path, TRAJECTORY_COLUMNS)
    return data[:, 0], data[:, 1:]


def write_summary(path, summary):
    return _write_text(path, _dump_json(summary))


def read_summary(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    missing = {"bc", "lambda", "delta", "t_stop", "volume", "rel_tol", "files"} - set(doc)
    if missing:
        raise FormatError(f"{path}: missing fields {sorted(missing)}")
    return doc


def load_profile(path):
    """Load a profile from a summary, a run directory or a JSON profile.

    Returns ``(profile, summary_or_None)``. A CSV profile is only readable
    through its summary, which carries ``bc`` and ``lambda``.
    """
    path = Path(path)
    if path.is_dir():
        path = path / SUMMARY_NAME
    if path.suffix == ".csv":
        raise FormatError(f"{path}: a CSV profile needs its summary; pass the summary or the run directory")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "columns" in doc:
        return read_profile_json(path), None
    summary = read_summary(path)
    prof_file = path.parent / summary["files"]["profile"]
    meta = summary.get("meta", {})
    if prof_file.suffix == ".json":
        prof = read_profile_json(prof_file)
    else:
        prof = read_profile_csv(prof_file, summary["bc"], summary["lambda"], meta)
    return prof, summary
