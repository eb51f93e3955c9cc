"""Reading and writing rankings, fitted parameters and config files.

Supported ranking formats
-------------------------
SOC (strict orders, complete), as distributed by PrefLib.  Two layouts are
accepted:

* current layout: ``# KEY: value`` header lines, including
  ``# NUMBER ALTERNATIVES: m`` and ``# ALTERNATIVE NAME k: label``, followed by
  ``count: id, id, ...`` lines with the most preferred alternative first;
* legacy layout: a line holding ``m``, then ``m`` lines ``id,label``, then a
  ``voters,sum,unique`` line, then ``count,id,id,...`` lines.

Ids are 1-based unless the declared names use ``0..m-1``.

CSV: one ranking per line, comma-separated labels, most preferred first.
Labels get indices in first-seen order.
"""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from pathlib import Path

import numpy as np

from .core import Dataset
from .errors import EmptyInputError, ParseError, ValidationError
from .mallows import MallowsParams
from .normal_rum import NormalRUMParams
from .plackett_luce import PLParams

MAX_RANKINGS = 10_000_000

_NAME_RE = re.compile(r"ALTERNATIVE\s+NAME\s+(\d{1,9})\s*:\s*(.*)$", re.IGNORECASE)
_KEY_RE = re.compile(r"([A-Z ]+?)\s*:\s*(.*)$", re.IGNORECASE)


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        with open(source, "rb") as fh:
            raw = fh.read()
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError("file is not valid UTF-8", raw.count(b"\n", 0, exc.start) + 1) from None


def _int(token: str, lineno: int, what: str) -> int:
    token = token.strip()
    if not re.fullmatch(r"[+]?\d{1,15}", token):
        raise ParseError(f"expected an integer {what}, got {token!r}", lineno)
    return int(token)


def parse_soc(source) -> Dataset:
    """Parse a strict-order-complete file (path or bytes) into a :class:`Dataset`."""
    text = _read_text(source)
    m_declared = None
    names: dict[int, str] = {}
    entries: list[tuple[int, list[int], int]] = []
    legacy_header = None
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if (hit := _NAME_RE.match(body)):
                names[int(hit.group(1))] = hit.group(2).strip()
            elif (hit := _KEY_RE.match(body)):
                key, value = hit.group(1).strip().upper(), hit.group(2).strip()
                if key == "NUMBER ALTERNATIVES":
                    m_declared = _int(value, lineno, "alternative count")
                elif key == "DATA TYPE" and value and value.lower() != "soc":
                    raise ParseError(f"data type {value!r} is not supported; "
                                     "only complete strict orders (soc)", lineno)
            continue
        if not entries and legacy_header is None and not names and re.fullmatch(r"\d{1,9}", line):
            # legacy layout: m, m name lines, then a voter summary line
            m_declared = int(line)
            if m_declared > 100_000:
                raise ParseError("implausible number of alternatives", lineno)
            for _ in range(m_declared):
                if i >= len(lines):
                    raise ParseError("file ends inside the alternative list", i)
                lineno = i + 1
                parts = lines[i].split(",", 1)
                i += 1
                if len(parts) != 2:
                    raise ParseError("expected 'id,name'", lineno)
                names[_int(parts[0], lineno, "alternative id")] = parts[1].strip()
            if i >= len(lines):
                raise ParseError("missing voter summary line", i)
            legacy_header = lines[i].strip()
            lineno = i + 1
            i += 1
            if len(legacy_header.split(",")) != 3:
                raise ParseError("expected 'voters,sum,unique'", lineno)
            for tok in legacy_header.split(","):
                _int(tok, lineno, "voter summary field")
            continue
        if "{" in line or "}" in line:
            raise ParseError("ties are not supported (complete strict orders only)", lineno)
        if ":" in line:
            count_s, _, rest = line.partition(":")
        else:
            count_s, _, rest = line.partition(",")
        count = _int(count_s, lineno, "count")
        ids = [_int(tok, lineno, "alternative id") for tok in rest.split(",")] if rest.strip() else []
        if not ids:
            raise ParseError("order has no alternatives", lineno)
        entries.append((count, ids, lineno))
    if not entries:
        raise EmptyInputError("no orders found")

    if names:
        keys = sorted(names)
    else:
        seen = sorted({x for _, ids, _ in entries for x in ids})
        m = m_declared if m_declared is not None else len(seen)
        if m > 100_000:
            raise ParseError("implausible number of alternatives")
        base = 0 if seen and seen[0] == 0 else 1
        keys = list(range(base, base + m))
    m = len(keys)
    if m == 0:
        raise ParseError("no alternatives declared")
    if m_declared is not None and m_declared != m:
        raise ParseError(f"header declares {m_declared} alternatives but names {m}")
    if keys != list(range(keys[0], keys[0] + m)) or keys[0] not in (0, 1):
        raise ParseError("alternative ids must be 1..m (or 0..m-1)")
    base = keys[0]
    labels = tuple(names.get(k, str(k)) for k in keys)
    if len(set(labels)) != m:
        raise ValidationError("alternative names are not unique")

    total = sum(c for c, _, _ in entries)
    if total > MAX_RANKINGS:
        raise ParseError(f"{total} rankings exceeds the limit of {MAX_RANKINGS}")
    if total == 0:
        raise EmptyInputError("all order counts are zero")
    rows = []
    for count, ids, lineno in entries:
        order = [x - base for x in ids]
        if len(order) != m:
            raise ValidationError(f"line {lineno}: order lists {len(order)} of {m} alternatives")
        if sorted(order) != list(range(m)):
            dup = sorted(x + base for x, c in Counter(order).items() if c > 1)
            what = f"duplicate ids {dup}" if dup else "ids outside the alternative set"
            raise ValidationError(f"line {lineno}: {what}")
        rows.append((count, order))
    orders = np.repeat(np.array([r for _, r in rows], dtype=np.int64),
                       [c for c, _ in rows], axis=0)
    return Dataset(orders, labels)


def parse_csv(source) -> Dataset:
    """Parse one-ranking-per-line CSV (path or bytes) into a :class:`Dataset`."""
    text = _read_text(source)
    index: dict[str, int] = {}
    rows = []
    try:
        records = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise ParseError(str(exc)) from None
    for lineno, rec in enumerate(records, start=1):
        cells = [c.strip() for c in rec]
        if not any(cells):
            continue
        if not all(cells):
            raise ParseError("empty label", lineno)
        if len(set(cells)) != len(cells):
            dup = sorted({c for c in cells if cells.count(c) > 1})
            raise ParseError(f"repeated label(s) {dup}", lineno)
        if not index:
            for c in cells:
                index[c] = len(index)
        elif len(cells) != len(index):
            raise ParseError(f"expected {len(index)} labels, got {len(cells)}", lineno)
        unknown = [c for c in cells if c not in index]
        if unknown:
            raise ParseError(f"unknown label(s) {unknown}", lineno)
        rows.append([index[c] for c in cells])
    if not rows:
        raise EmptyInputError("no rankings found")
    return Dataset(np.array(rows, dtype=np.int64), tuple(index))


def load_dataset(path, format: str | None = None) -> Dataset:
    """Read ``path`` as ``"soc"`` or ``"csv"``; guessed from the suffix if omitted."""
    if format is None:
        format = "csv" if str(path).lower().endswith(".csv") else "soc"
    if format == "soc":
        return parse_soc(path)
    if format == "csv":
        return parse_csv(path)
    raise ValueError(f"unknown format {format!r}")


def write_csv(data: Dataset, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in data.orders:
            writer.writerow([data.labels[j] for j in row])
    return path


def write_soc(data: Dataset, path, title: str = "") -> Path:
    """Write ``data`` in the current PrefLib SOC layout with 1-based ids.

    Distinct orders are listed by decreasing count, ties in lexicographic
    order, so equal datasets produce identical files.
    """
    uniq, counts = np.unique(data.orders, axis=0, return_counts=True)
    order = np.lexsort((np.arange(len(counts)), -counts))
    lines = [f"# TITLE: {title}", "# DATA TYPE: soc",
             f"# NUMBER ALTERNATIVES: {data.m}", f"# NUMBER VOTERS: {data.n}",
             f"# NUMBER UNIQUE ORDERS: {len(counts)}"]
    lines += [f"# ALTERNATIVE NAME {j + 1}: {lab}" for j, lab in enumerate(data.labels)]
    lines += [f"{counts[k]}: " + ", ".join(str(x + 1) for x in uniq[k]) for k in order]
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# -- params files ----------------------------------------------------------

def params_to_dict(params, labels=None) -> dict:
    if isinstance(params, MallowsParams):
        body = {"reference": list(params.reference), "p": params.p, "phi": params.phi,
                "clamped": params.clamped}
        name = "mallows"
    elif isinstance(params, PLParams):
        body = {"strengths": params.strengths.tolist(), "means": params.means.tolist()}
        name = "pl"
    elif isinstance(params, NormalRUMParams):
        body = {"means": params.means.tolist(), "sds": params.sds.tolist(),
                "reference": params.reference, "floored": list(params.floored)}
        name = "normal"
    else:
        raise TypeError(f"unsupported params {type(params).__name__}")
    labels = list(labels) if labels is not None else [str(j) for j in range(params.m)]
    return {"model": name, "m": params.m, "labels": labels, "params": body}


def params_from_dict(doc: dict):
    try:
        name, body = doc["model"], doc["params"]
        if name == "mallows":
            return MallowsParams(tuple(body["reference"]), float(body["p"]),
                                 bool(body.get("clamped", False)))
        if name == "pl":
            return PLParams(np.array(body["strengths"], dtype=float))
        if name == "normal":
            return NormalRUMParams(np.array(body["means"], dtype=float),
                                   np.array(body["sds"], dtype=float),
                                   int(body["reference"]), tuple(body.get("floored", ())))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed params document: {exc}") from None
    raise ParseError(f"unknown model {doc.get('model')!r}")


def save_params(path, params, labels=None, seed=None, config=None) -> Path:
    doc = params_to_dict(params, labels)
    doc["seed"] = seed
    doc["config"] = config or {}
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_params(path):
    """Return ``(params, labels, document)`` from a params JSON file."""
    try:
        doc = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("params file must hold a JSON object")
    return params_from_dict(doc), doc.get("labels"), doc


def read_config(path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(_read_text(path).split("\n"), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParseError("expected 'key = value'", lineno)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
