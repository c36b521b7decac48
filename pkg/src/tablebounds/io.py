"""File formats: JSON table and family documents, CSV for 2-way tables.

Documents are versioned with ``"schema": 1``. Variable indices in files are
1-based (matching written usage); cell coordinates are 0-based or category
names. Validation failures raise SchemaError with a pointed message; family
consistency failures surface the witness from the bounds layer.

TableFile:  {"schema": 1, "kind": "integer"|"real", "cardinalities": [...],
             "labels": [[...], ...]?, "counts": [flat row-major]}
FamilyFile: {"schema": 1, "kind": ..., "cardinalities": [...], "labels": ?,
             "marginals": [{"vars": [1-based], "counts": [flat]}, ...]}
"""

from __future__ import annotations

import csv
import json
from math import prod

from .bounds import MarginalFamily
from .errors import RangeError, SchemaError
from .table import INTEGER, REAL, ContingencyTable, MarginalTable
from .varset import VarSet

SCHEMA_VERSION = 1


def _require(doc: dict, key: str, kinds, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, kinds):
        raise SchemaError(
            f"{where}: key {key!r} has type {type(value).__name__}"
        )
    return value


def _check_schema_version(doc: dict, where: str) -> None:
    version = doc.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{where}: unsupported schema version {version!r}")


def _check_counts(counts, cards, where: str) -> None:
    if len(counts) != prod(cards):
        raise SchemaError(
            f"{where}: {len(counts)} counts for shape {tuple(cards)} "
            f"(expected {prod(cards)})"
        )
    for v in counts:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SchemaError(f"{where}: non-numeric count {v!r}")


def table_from_doc(doc: dict, where: str = "table") -> ContingencyTable:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    _check_schema_version(doc, where)
    cards = _require(doc, "cardinalities", list, where)
    if not cards or not all(isinstance(c, int) and c >= 1 for c in cards):
        raise SchemaError(f"{where}: cardinalities must be positive integers")
    counts = _require(doc, "counts", list, where)
    _check_counts(counts, cards, where)
    kind = doc.get("kind", INTEGER)
    if kind not in (INTEGER, REAL):
        raise SchemaError(f"{where}: kind must be 'integer' or 'real'")
    if kind == INTEGER and not all(isinstance(v, int) for v in counts):
        raise SchemaError(f"{where}: integer table has non-integer counts")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(cards):
            raise SchemaError(f"{where}: labels must list one name set per axis")
    try:
        return ContingencyTable.from_flat(cards, counts, labels=labels, kind=kind)
    except RangeError as err:
        raise SchemaError(f"{where}: {err}") from err


def table_to_doc(table: ContingencyTable) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": table.kind,
        "cardinalities": list(table.cardinalities),
        "counts": [v.item() for v in table.flat],
    }
    if table.labels is not None:
        doc["labels"] = [list(axis) for axis in table.labels]
    return doc


def family_from_doc(doc: dict, where: str = "family") -> MarginalFamily:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    _check_schema_version(doc, where)
    cards = _require(doc, "cardinalities", list, where)
    if not cards or not all(isinstance(c, int) and c >= 1 for c in cards):
        raise SchemaError(f"{where}: cardinalities must be positive integers")
    num_vars = len(cards)
    entries = _require(doc, "marginals", list, where)
    if not entries:
        raise SchemaError(f"{where}: at least one marginal is required")
    kind = doc.get("kind", INTEGER)
    if kind not in (INTEGER, REAL):
        raise SchemaError(f"{where}: kind must be 'integer' or 'real'")
    labels = doc.get("labels")
    marginals = []
    for idx, entry in enumerate(entries):
        where_m = f"{where}.marginals[{idx}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where_m}: expected a JSON object")
        vars_ = _require(entry, "vars", list, where_m)
        if not all(isinstance(v, int) for v in vars_):
            raise SchemaError(f"{where_m}: vars must be 1-based integers")
        if len(set(vars_)) != len(vars_):
            raise SchemaError(f"{where_m}: repeated variable in {vars_}")
        try:
            subset = VarSet.from_vars(vars_, num_vars)
        except RangeError as err:
            raise SchemaError(f"{where_m}: {err}") from err
        sub_cards = tuple(cards[j] for j in subset.axes)
        counts = _require(entry, "counts", list, where_m)
        _check_counts(counts, sub_cards, where_m)
        if kind == INTEGER and not all(isinstance(v, int) for v in counts):
            raise SchemaError(f"{where_m}: integer family has non-integer counts")
        sub_labels = (
            [labels[j] for j in subset.axes] if labels is not None else None
        )
        try:
            marginals.append(
                MarginalTable(
                    subset,
                    ContingencyTable.from_flat(
                        sub_cards, counts, labels=sub_labels, kind=kind
                    ),
                )
            )
        except RangeError as err:
            raise SchemaError(f"{where_m}: {err}") from err
    try:
        return MarginalFamily(cards, marginals, labels=labels)
    except RangeError as err:
        raise SchemaError(f"{where}: {err}") from err


def family_to_doc(fam: MarginalFamily) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": fam.kind,
        "cardinalities": list(fam.cardinalities),
        "marginals": [
            {
                "vars": list(a.vars),
                "counts": [v.item() for v in fam.released[a.mask].table.flat],
            }
            for a in fam.subsets()
        ],
    }
    if fam.labels is not None:
        doc["labels"] = [list(axis) for axis in fam.labels]
    return doc


def _table_from_csv(text: str, where: str) -> ContingencyTable:
    """2-way CSV: header row holds column labels, first field of each data
    row holds the row label; the corner cell is ignored."""
    rows = [r for r in csv.reader(text.splitlines()) if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise SchemaError(f"{where}: CSV needs a header row and one data row")
    col_labels = [c.strip() for c in rows[0][1:]]
    row_labels = []
    data = []
    for r in rows[1:]:
        if len(r) != len(col_labels) + 1:
            raise SchemaError(
                f"{where}: row {r[0]!r} has {len(r) - 1} values, "
                f"expected {len(col_labels)}"
            )
        row_labels.append(r[0].strip())
        data.append([field.strip() for field in r[1:]])
    try:
        integral = all(float(v) == int(float(v)) for row in data for v in row)
    except ValueError as err:
        raise SchemaError(f"{where}: non-numeric count: {err}") from err
    kind = INTEGER if integral else REAL
    counts = [
        int(float(v)) if integral else float(v) for row in data for v in row
    ]
    return ContingencyTable.from_flat(
        (len(row_labels), len(col_labels)),
        counts,
        labels=[row_labels, col_labels],
        kind=kind,
    )


def load_table(path: str) -> ContingencyTable:
    if path.lower().endswith(".csv"):
        with open(path, newline="") as fh:
            return _table_from_csv(fh.read(), path)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}: invalid JSON: {err}") from err
    return table_from_doc(doc, path)


def load_family(path: str) -> MarginalFamily:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}: invalid JSON: {err}") from err
    return family_from_doc(doc, path)


def marginal_to_doc(marg: MarginalTable) -> dict:
    """The output document of the marginalize command."""
    if len(marg.vars) == 0:
        return {"schema": SCHEMA_VERSION, "vars": [], "total": marg.table.total}
    doc = {
        "schema": SCHEMA_VERSION,
        "vars": list(marg.vars),
        "cardinalities": list(marg.table.cardinalities),
        "counts": [v.item() for v in marg.table.flat],
    }
    if marg.table.labels is not None:
        doc["labels"] = [list(axis) for axis in marg.table.labels]
    return doc
