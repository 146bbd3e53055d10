"""Experiment configuration files.

A configuration is INI text: every section except ``[output]`` describes one
experiment and must set ``kind``.  Values are scalars or comma-separated lists;
there is no nesting.  Example::

    [output]
    dir = results
    format = csv

    [z_revival]
    kind = coherence
    basis = Z
    alpha = 0.5
    omega0 = 0.2514
    omega_k = 1
    t_max = 100
    ensemble = 500
    seed = 7

Unknown keys, missing required keys, malformed numbers and out-of-range values
are reported as :class:`ConfigError` with the line and field concerned.
"""

import configparser
import math
import re
from dataclasses import dataclass, field

from qdephase.errors import ConfigError

FORMATS = ("csv", "json", "both")
BASES = ("Z", "X", "Y")


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _float_list(text):
    items = [s.strip() for s in text.split(",")]
    if not all(items):
        raise ValueError("empty list entry")
    return [_float(s) for s in items]


def _basis(text):
    value = text.strip().upper()
    if value not in BASES:
        raise ValueError(f"basis must be one of {', '.join(BASES)}")
    return value


def _str(text):
    return text.strip()


@dataclass(frozen=True)
class Field:
    parse: object
    default: object = None
    required: bool = False
    check: object = None
    hint: str = ""


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _all_positive(xs):
    return all(x > 0 for x in xs)


def _all_nonneg(xs):
    return all(x >= 0 for x in xs)


def _points(n):
    return n >= 2


_NOISE = {
    "alpha": Field(_float, 0.5, check=_nonneg, hint=">= 0"),
    "omegaJ": Field(_float, 50.0, check=_positive, hint="> 0"),
    "p": Field(_float, 0.0),
}

SCHEMAS = {
    "gamma": {
        **_NOISE,
        "omega0": Field(_float_list, required=True, check=_all_positive, hint="> 0"),
        "t_max": Field(_float, required=True, check=_positive, hint="> 0"),
        "points": Field(_int, 2001, check=_points, hint=">= 2"),
        "fitted": Field(_bool, False),
    },
    "nonmarkov-scan": {
        **_NOISE,
        "t_max": Field(_float, required=True, check=_positive, hint="> 0"),
        "omega0_min": Field(_float, required=True, check=_positive, hint="> 0"),
        "omega0_max": Field(_float, required=True, check=_positive, hint="> 0"),
        "omega0_points": Field(_int, 101, check=_points, hint=">= 2"),
        "points": Field(_int, 2001, check=_points, hint=">= 2"),
        "critical": Field(_bool, True),
    },
    "coherence": {
        **_NOISE,
        "omega0": Field(_float, required=True, check=_positive, hint="> 0"),
        "omega_k": Field(_float, 1.0, check=_nonneg, hint=">= 0"),
        "t_max": Field(_float, required=True, check=_positive, hint="> 0"),
        "points": Field(_int, 2001, check=_points, hint=">= 2"),
        "basis": Field(_basis, "Z"),
        "ensemble": Field(_int, 0, check=_nonneg, hint=">= 0"),
        "seed": Field(_int, None, check=_nonneg, hint=">= 0"),
    },
    "revival-verify": {
        **_NOISE,
        "omega0": Field(_float, required=True, check=_positive, hint="> 0"),
        "omega_k": Field(_float, 1.0, check=_nonneg, hint=">= 0"),
        "t_max": Field(_float, required=True, check=_positive, hint="> 0"),
        "points": Field(_int, 2001, check=_points, hint=">= 2"),
        "basis": Field(_basis, "Z"),
        "time_tol": Field(_float, 0.5, check=_positive, hint="> 0"),
    },
    "longterm": {
        "omegaJ": Field(_float, 50.0, check=_positive, hint="> 0"),
        "p": Field(_float, 0.0),
        "omega0": Field(_float_list, required=True, check=_all_positive, hint="> 0"),
        "omega_k": Field(_float_list, required=True, check=_all_nonneg, hint=">= 0"),
        "alpha_min": Field(_float, 0.0, check=_nonneg, hint=">= 0"),
        "alpha_max": Field(_float, 4.0, check=_positive, hint="> 0"),
        "alpha_step": Field(_float, 0.1, check=_positive, hint="> 0"),
        "threshold": Field(_float, 0.01, check=_positive, hint="> 0"),
        "T": Field(_float, None, check=_positive, hint="> 0"),
        "tol": Field(_float, 1e-3, check=_positive, hint="> 0"),
        "resolution": Field(_float, 1e-3, check=_positive, hint="> 0"),
    },
    "grape": {
        "target": Field(_str, required=True),
        "qubits": Field(_int, 1, check=lambda n: n in (1, 2), hint="1 or 2"),
        "drift": Field(_float_list, [0.0]),
        "coupling": Field(_float, 0.0),
        "segments": Field(_int, 50, check=_positive, hint="> 0"),
        "dt": Field(_float, 0.1, check=_positive, hint="> 0"),
        "eps": Field(_float, 20.0, check=_positive, hint="> 0"),
        "max_iter": Field(_int, 1000, check=_positive, hint="> 0"),
        "amp_bound": Field(_float, None, check=_positive, hint="> 0"),
        "init": Field(lambda s: s.strip().lower(), "random", check=lambda v: v in ("random", "zero"),
                      hint="random | zero"),
        "seed": Field(_int, required=True, check=_nonneg, hint=">= 0"),
    },
}

OUTPUT_SCHEMA = {
    "dir": Field(_str, "results"),
    "format": Field(lambda s: s.strip().lower(), "csv", check=lambda f: f in FORMATS,
                    hint=" | ".join(FORMATS)),
}


@dataclass
class Experiment:
    name: str
    kind: str
    params: dict
    lines: dict = field(default_factory=dict)

    def echo(self):
        """Parameters as plain JSON-friendly values, for metadata headers."""
        return {"kind": self.kind, **{k: v for k, v in self.params.items() if v is not None}}


@dataclass
class Config:
    experiments: list
    output_dir: str = "results"
    output_format: str = "csv"


def _line_map(text):
    """``(section, key) -> line number`` and ``section -> line number``."""
    keys = {}
    sections = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            sections.setdefault(current, n)
        elif current and line and line[0] not in "#;":
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            keys.setdefault((current, key), n)
    return keys, sections


def _parse_fields(schema, section, name, keys, sections, skip=("kind",)):
    params = {}
    lines = {}
    for key, raw in section.items():
        if key in skip:
            continue
        line = keys.get((name, key))
        if key not in schema:
            raise ConfigError(f"unknown key in [{name}]; allowed: {', '.join(sorted(schema))}",
                              line, key)
        spec = schema[key]
        try:
            value = spec.parse(raw)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {raw!r}: {exc}", line, key) from None
        if spec.check is not None and not spec.check(value):
            raise ConfigError(f"value {raw!r} out of range (expected {spec.hint})", line, key)
        params[key] = value
        lines[key] = line
    for key, spec in schema.items():
        if key not in params:
            if spec.required:
                raise ConfigError(f"missing required key in [{name}]", sections.get(name), key)
            params[key] = spec.default
    return params, lines


def _cross_checks(exp):
    p = exp.params
    if exp.kind == "coherence" and p["ensemble"] > 0 and p["seed"] is None:
        raise ConfigError("seed is mandatory when ensemble > 0", exp.lines.get("ensemble"), "seed")
    if exp.kind == "nonmarkov-scan" and not p["omega0_max"] > p["omega0_min"]:
        raise ConfigError("omega0_max must exceed omega0_min", exp.lines.get("omega0_max"),
                          "omega0_max")
    if exp.kind == "longterm" and not p["alpha_max"] > p["alpha_min"]:
        raise ConfigError("alpha_max must exceed alpha_min", exp.lines.get("alpha_max"), "alpha_max")
    if exp.kind == "grape" and len(p["drift"]) not in (1, p["qubits"]):
        raise ConfigError("drift needs one value or one per qubit", exp.lines.get("drift"), "drift")


def parse_config(text):
    """Parse configuration text into a :class:`Config`."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key in [{exc.section}]", exc.lineno, exc.option) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line (expected key = value)", lineno) from None

    keys, sections = _line_map(text)
    out_dir, out_fmt = OUTPUT_SCHEMA["dir"].default, OUTPUT_SCHEMA["format"].default
    experiments = []
    for name in parser.sections():
        section = parser[name]
        if name == "output":
            params, _ = _parse_fields(OUTPUT_SCHEMA, section, name, keys, sections, skip=())
            out_dir, out_fmt = params["dir"], params["format"]
            continue
        if "kind" not in section:
            raise ConfigError(f"section [{name}] has no kind", sections.get(name), "kind")
        kind = section["kind"].strip()
        if kind not in SCHEMAS:
            raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(SCHEMAS)}",
                              keys.get((name, "kind")), "kind")
        params, lines = _parse_fields(SCHEMAS[kind], section, name, keys, sections)
        exp = Experiment(name, kind, params, lines)
        _cross_checks(exp)
        experiments.append(exp)
    if not experiments:
        raise ConfigError("no experiment sections found")
    return Config(experiments, out_dir, out_fmt)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config):
    """Serialise a :class:`Config` back to INI text (parseable by :func:`parse_config`)."""
    lines = ["[output]", f"dir = {config.output_dir}", f"format = {config.output_format}"]
    for exp in config.experiments:
        lines += ["", f"[{exp.name}]", f"kind = {exp.kind}"]
        for key, value in exp.params.items():
            if value is not None:
                lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
