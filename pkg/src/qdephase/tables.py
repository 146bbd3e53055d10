"""Result tables and their CSV / JSON serialisation.

CSV files start with ``# key = <json value>`` metadata lines, followed by a
header row and numeric rows written with 17 significant digits.  The JSON
mirror carries the same metadata, columns and values.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ResultTable:
    name: str
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [str(c) for c in self.columns]
        self.rows = [[float(v) for v in row] for row in self.rows]
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} of table '{self.name}' has {len(row)} values, "
                                 f"expected {width}")

    @classmethod
    def from_columns(cls, name, data, metadata=None):
        """Build from an ordered mapping ``column -> sequence``."""
        columns = list(data)
        rows = [list(r) for r in zip(*(data[c] for c in columns))]
        return cls(name, columns, rows, dict(metadata or {}))

    def column(self, name):
        k = self.columns.index(name)
        return [row[k] for row in self.rows]


def _fmt(x):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_csv(table):
    lines = [f"# {k} = {json.dumps(v, sort_keys=True)}" for k, v in table.metadata.items()]
    lines.append(",".join(table.columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def from_csv(text, name=""):
    metadata = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = json.loads(value)
        elif line:
            body.append(line)
    columns = body[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in body[1:]]
    return ResultTable(name, columns, rows, metadata)


def _json_value(x):
    return x if math.isfinite(x) else None


def to_json(table):
    payload = {
        "name": table.name,
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def from_json(text):
    payload = json.loads(text)
    rows = [[math.nan if v is None else v for v in row] for row in payload["rows"]]
    return ResultTable(payload["name"], payload["columns"], rows, payload["metadata"])


def write_table(table, directory, fmt="csv", prefix=""):
    """Write ``table`` under ``directory``; returns the list of paths written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"{prefix}{table.name}"
    paths = []
    if fmt in ("csv", "both"):
        path = directory / f"{stem}.csv"
        path.write_bytes(to_csv(table).encode("utf-8"))
        paths.append(path)
    if fmt in ("json", "both"):
        path = directory / f"{stem}.json"
        path.write_bytes(to_json(table).encode("utf-8"))
        paths.append(path)
    return paths


def read_table(path):
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return from_json(text)
    return from_csv(text, name=path.stem)
