"""On-disk formats: ARFF subset, sequence CSV, block-dataset CSV,
prediction CSV, and the versioned JSON model container.

CSV files carry their metadata (feature kinds, cardinalities, names) in
``#``-prefixed header lines so every load/save pair round-trips exactly.
Floats are written with ``repr``, which Python parses back bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .core import DataFormatError, Dataset, Feature, LabelSchema
from .methods import model_from_dict
from .transform import Sequence

FORMAT_DATASET = "seqlabel-dataset"
FORMAT_SEQUENCES = "seqlabel-sequences"
FORMAT_MODEL = "seqlabel-model"
FORMAT_VERSION = 1


def _fmt_value(v, feature: Feature | None) -> str:
    if feature is not None and feature.kind == "categorical":
        return str(int(v))
    return repr(float(v))


def _parse_value(s: str, feature: Feature | None):
    try:
        if feature is not None and feature.kind == "categorical":
            return int(s)
        v = float(s)
    except ValueError as e:
        raise DataFormatError(f"bad cell {s!r}") from e
    if not math.isfinite(v):
        raise DataFormatError(f"non-finite cell {s!r} (missing values are not supported)")
    return v


def _read_meta_lines(lines: list[str], expected_format: str) -> tuple[dict, int]:
    """Parse leading '# ...' lines; returns (meta dict, index of header row)."""
    meta: dict = {}
    i = 0
    saw_format = False
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if body.startswith(expected_format):
            saw_format = True
        elif body.startswith("meta:"):
            try:
                meta = json.loads(body[len("meta:"):])
            except json.JSONDecodeError as e:
                raise DataFormatError(f"line {i + 1}: bad meta JSON: {e}") from e
        i += 1
    if i == len(lines):
        raise DataFormatError("file has no data header")
    if meta and not saw_format:
        raise DataFormatError(f"missing '# {expected_format}' format line")
    return meta, i


# ---------------------------------------------------------------------------
# block datasets


def dataset_to_csv(d: Dataset) -> str:
    meta = {
        "name": d.name,
        "cardinalities": list(d.schema.cardinalities),
        "features": [f.to_dict() for f in d.features],
    }
    out = io.StringIO()
    out.write(f"# {FORMAT_DATASET} v{FORMAT_VERSION}\n")
    out.write("# meta: " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f.name or f"f{j}" for j, f in enumerate(d.features)]
               + [f"y{t}" for t in range(d.schema.T)])
    D, T = d.D, d.schema.T
    for x, y in d.instances:
        if len(x) != D or len(y) != T:
            raise DataFormatError("cannot serialize a malformed instance; "
                                  "run validate_dataset first")
        w.writerow([_fmt_value(v, f) for v, f in zip(x, d.features)]
                   + [str(int(v)) for v in y])
    return out.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    lines = text.splitlines()
    meta, start = _read_meta_lines(lines, FORMAT_DATASET)
    if not meta:
        raise DataFormatError("dataset CSV is missing its '# meta:' line")
    features = tuple(Feature.from_dict(f) for f in meta["features"])
    schema = LabelSchema(tuple(meta["cardinalities"]))
    reader = csv.reader(lines[start:])
    header = next(reader)
    if len(header) != len(features) + schema.T:
        raise DataFormatError(
            f"line {start + 1}: header has {len(header)} columns, "
            f"expected {len(features) + schema.T}")
    instances = []
    for ln, row in enumerate(reader, start=start + 2):
        if len(row) != len(header):
            raise DataFormatError(f"line {ln}: {len(row)} cells, expected {len(header)}")
        try:
            x = tuple(_parse_value(s, f) for s, f in zip(row, features))
            y = tuple(int(s) for s in row[len(features):])
        except (DataFormatError, ValueError) as e:
            raise DataFormatError(f"line {ln}: {e}") from e
        instances.append((x, y))
    return Dataset(schema, features, instances, name=meta.get("name", ""))


def save_dataset(d: Dataset, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(dataset_to_csv(d))


def load_dataset(path: str) -> Dataset:
    with open(path) as fh:
        return dataset_from_csv(fh.read())


# ---------------------------------------------------------------------------
# sequence streams


def sequences_to_csv(seqs: list[Sequence], features: tuple[Feature, ...],
                     n_states: int) -> str:
    meta = {"n_states": n_states, "features": [f.to_dict() for f in features]}
    out = io.StringIO()
    out.write(f"# {FORMAT_SEQUENCES} v{FORMAT_VERSION}\n")
    out.write("# meta: " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["seq_id"] + [f.name or f"f{j}" for j, f in enumerate(features)] + ["state"])
    for s in seqs:
        for e, st in zip(s.emissions, s.states):
            w.writerow([s.id] + [_fmt_value(v, f) for v, f in zip(e, features)] + [str(st)])
    return out.getvalue()


def sequences_from_csv(text: str) -> tuple[list[Sequence], tuple[Feature, ...], int]:
    """Parse a sequence CSV; rows are grouped by contiguous seq_id runs.

    Files without a meta line default to numeric features and an inferred
    state count.
    """
    lines = text.splitlines()
    meta, start = _read_meta_lines(lines, FORMAT_SEQUENCES)
    reader = csv.reader(lines[start:])
    header = next(reader)
    if len(header) < 3 or header[0] != "seq_id" or header[-1] != "state":
        raise DataFormatError(
            f"line {start + 1}: expected header 'seq_id,<features...>,state'")
    D = len(header) - 2
    if meta:
        features = tuple(Feature.from_dict(f) for f in meta["features"])
        if len(features) != D:
            raise DataFormatError("meta feature count does not match header")
        n_states: int | None = int(meta["n_states"])
    else:
        features = tuple(Feature.numeric(name) for name in header[1:-1])
        n_states = None

    seqs: list[Sequence] = []
    seen: set[str] = set()
    cur_id: str | None = None
    emissions: list[tuple] = []
    states: list[int] = []

    def flush():
        if cur_id is not None:
            seqs.append(Sequence(tuple(emissions), tuple(states), id=cur_id))

    for ln, row in enumerate(reader, start=start + 2):
        if len(row) != len(header):
            raise DataFormatError(f"line {ln}: {len(row)} cells, expected {len(header)}")
        sid = row[0]
        if sid != cur_id:
            if sid in seen:
                raise DataFormatError(f"line {ln}: rows of sequence {sid!r} are not contiguous")
            flush()
            cur_id = sid
            seen.add(sid)
            emissions, states = [], []
        try:
            emissions.append(tuple(_parse_value(s, f) for s, f in zip(row[1:-1], features)))
            states.append(int(row[-1]))
        except (DataFormatError, ValueError) as e:
            raise DataFormatError(f"line {ln}: {e}") from e
    flush()
    if not seqs:
        raise DataFormatError("no sequence rows")
    if n_states is None:
        n_states = max(max(s.states) for s in seqs) + 1
    return seqs, features, n_states


def save_sequences(seqs, features, n_states, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(sequences_to_csv(seqs, features, n_states))


def load_sequences(path: str) -> tuple[list[Sequence], tuple[Feature, ...], int]:
    with open(path) as fh:
        return sequences_from_csv(fh.read())


# ---------------------------------------------------------------------------
# predictions


def predictions_to_csv(preds: list[tuple[int, ...]]) -> str:
    if not preds:
        raise DataFormatError("no predictions to write")
    T = len(preds[0])
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"y{t}" for t in range(T)])
    for p in preds:
        w.writerow([str(int(v)) for v in p])
    return out.getvalue()


def predictions_from_csv(text: str) -> list[tuple[int, ...]]:
    lines = text.splitlines()
    if not lines:
        raise DataFormatError("empty predictions file")
    reader = csv.reader(lines)
    header = next(reader)
    preds = []
    for ln, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise DataFormatError(f"line {ln}: {len(row)} cells, expected {len(header)}")
        try:
            preds.append(tuple(int(s) for s in row))
        except ValueError as e:
            raise DataFormatError(f"line {ln}: {e}") from e
    return preds


# ---------------------------------------------------------------------------
# ARFF subset (numeric + nominal attributes)


@dataclass(frozen=True)
class ArffAttribute:
    name: str
    kind: str  # "numeric" | "nominal"
    values: tuple[str, ...] = ()


@dataclass
class ArffTable:
    relation: str
    attributes: tuple[ArffAttribute, ...]
    rows: list[tuple]  # numeric -> float, nominal -> int code (declaration order)


def load_arff(path: str) -> ArffTable:
    """Parse an ARFF file restricted to numeric and nominal attributes."""
    with open(path) as fh:
        return parse_arff(fh.read())


def parse_arff(text: str) -> ArffTable:
    relation = ""
    attributes: list[ArffAttribute] = []
    rows: list[tuple] = []
    in_data = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if not in_data:
            if low.startswith("@relation"):
                relation = line[len("@relation"):].strip().strip("'\"")
            elif low.startswith("@attribute"):
                body = line[len("@attribute"):].strip()
                if body.startswith("'"):
                    end = body.index("'", 1)
                    name = body[1:end]
                    rest = body[end + 1:].strip()
                elif body.startswith('"'):
                    end = body.index('"', 1)
                    name = body[1:end]
                    rest = body[end + 1:].strip()
                else:
                    parts = body.split(None, 1)
                    if len(parts) != 2:
                        raise DataFormatError(f"line {ln}: malformed @attribute")
                    name, rest = parts
                if rest.startswith("{"):
                    if not rest.endswith("}"):
                        raise DataFormatError(f"line {ln}: unterminated nominal list")
                    values = tuple(v.strip().strip("'\"") for v in rest[1:-1].split(","))
                    attributes.append(ArffAttribute(name, "nominal", values))
                elif rest.lower() in ("numeric", "real", "integer"):
                    attributes.append(ArffAttribute(name, "numeric"))
                else:
                    raise DataFormatError(f"line {ln}: unsupported attribute type {rest!r}")
            elif low.startswith("@data"):
                if not attributes:
                    raise DataFormatError(f"line {ln}: @data before any @attribute")
                in_data = True
            else:
                raise DataFormatError(f"line {ln}: unexpected declaration {line.split()[0]!r}")
            continue
        cells = next(csv.reader([line]))
        if len(cells) != len(attributes):
            raise DataFormatError(
                f"line {ln}: {len(cells)} values for {len(attributes)} attributes")
        row = []
        for attr, cell in zip(attributes, cells):
            cell = cell.strip().strip("'\"")
            if attr.kind == "numeric":
                try:
                    row.append(float(cell))
                except ValueError as e:
                    raise DataFormatError(f"line {ln}: bad numeric value {cell!r}") from e
            else:
                try:
                    row.append(attr.values.index(cell))
                except ValueError:
                    raise DataFormatError(
                        f"line {ln}: value {cell!r} not declared for attribute "
                        f"{attr.name!r}") from None
        rows.append(tuple(row))
    if not in_data:
        raise DataFormatError("no @data section")
    return ArffTable(relation, tuple(attributes), rows)


def arff_to_sequence(table: ArffTable, class_attr: str | int = -1,
                     id: str = "") -> tuple[Sequence, tuple[Feature, ...], int]:
    """Read an ARFF table as one (emission, state) stream: the class attribute
    becomes the state, every other attribute an emission feature."""
    attrs = table.attributes
    if isinstance(class_attr, str):
        names = [a.name for a in attrs]
        if class_attr not in names:
            raise DataFormatError(f"no attribute named {class_attr!r}")
        ci = names.index(class_attr)
    else:
        ci = class_attr % len(attrs)
    cattr = attrs[ci]
    if cattr.kind != "nominal":
        raise DataFormatError("class attribute must be nominal to define states")
    keep = [j for j in range(len(attrs)) if j != ci]
    features = tuple(
        Feature.categorical(len(attrs[j].values), attrs[j].name)
        if attrs[j].kind == "nominal" else Feature.numeric(attrs[j].name)
        for j in keep)
    emissions = tuple(tuple(row[j] for j in keep) for row in table.rows)
    states = tuple(int(row[ci]) for row in table.rows)
    return Sequence(emissions, states, id=id or table.relation), features, len(cattr.values)


# ---------------------------------------------------------------------------
# model container


def model_to_json(model, method: str, params: dict | None = None,
                  seed: int = 0) -> str:
    envelope = {
        "format": FORMAT_MODEL,
        "version": FORMAT_VERSION,
        "method": method,
        "params": params or {},
        "seed": seed,
        "model": model.to_dict(),
    }
    return json.dumps(envelope, sort_keys=True, separators=(",", ":"))


def save_model(model, path: str, method: str, params: dict | None = None,
               seed: int = 0) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_json(model, method, params, seed))


def load_model(path: str) -> tuple[object, str, dict, int]:
    """Load a model container; returns (model, method, params, seed)."""
    with open(path) as fh:
        try:
            envelope = json.load(fh)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"{path}: not a model file: {e}") from e
    if envelope.get("format") != FORMAT_MODEL:
        raise DataFormatError(f"{path}: not a {FORMAT_MODEL} file")
    if envelope.get("version") != FORMAT_VERSION:
        raise DataFormatError(f"{path}: unsupported version {envelope.get('version')!r}")
    model = model_from_dict(envelope["model"])
    return model, envelope["method"], envelope.get("params", {}), envelope.get("seed", 0)
