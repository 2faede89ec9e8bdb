"""Config parsing, CSV emission and run manifests.

Config files are flat ``key = value`` pairs, optionally organized under
``[section]`` headers (sections are cosmetic; keys are globally unique).
CSV values are printed with 12 significant digits and written
atomically. A run manifest records the resolved configuration, the base
seed and a SHA-256 checksum per output file.
"""

import csv
import dataclasses
import datetime
import hashlib
import io
import json
import os

from . import __version__
from .errors import ValidationError
from .experiments import (
    DistanceRecord,
    Grid2dRecord,
    NoiseRecord,
    ScanConfig,
    SizeRecord,
)

FLOAT_FORMAT = "%.12g"

# config key -> (ScanConfig field, parser)
_CONFIG_KEYS = {
    "family": ("family", str),
    "n": ("n", int),
    "n_min": ("n_min", int),
    "n_max": ("n_max", int),
    "d0": ("d0", float),
    "kappa": ("kappa", float),
    "spacing": ("spacing", float),
    "r_min": ("r_min", float),
    "r_max": ("r_max", float),
    "r_step": ("r_step", float),
    "plane": ("plane", str),
    "grid_n_min": ("grid_n_min", int),
    "grid_n_max": ("grid_n_max", int),
    "sigma_d_max": ("sigma_d_max", float),
    "sigma_r_max": ("sigma_r_max", float),
    "sigma_d_steps": ("sigma_d_steps", int),
    "sigma_r_steps": ("sigma_r_steps", int),
    "reps": ("repetitions", int),
    "seed": ("base_seed", int),
    "ground_reference": ("ground_reference", str),
    "lowest_k": ("lowest_k", int),
    "threads": ("threads", int),
}

_SCHEMAS = {
    DistanceRecord: (
        "distance",
        ["r_angstrom", "amplitude", "lambda", "excited_energy_ghz", "status"],
        lambda r: [r.r_angstrom, r.amplitude, r.lam, r.excited_energy, r.status],
    ),
    SizeRecord: (
        "size",
        ["n", "interacting", "amplitude", "lambda", "status"],
        lambda r: [r.n, int(r.interacting), r.amplitude, r.lam, r.status],
    ),
    Grid2dRecord: (
        "grid2d",
        ["n", "plane", "amplitude", "lambda", "status"],
        lambda r: [r.n, r.plane, r.amplitude, r.lam, r.status],
    ),
    NoiseRecord: (
        "noise",
        [
            "sigma_d_ghz",
            "sigma_r_angstrom",
            "mean_amplitude",
            "std_amplitude",
            "mean_lambda",
            "std_lambda",
            "reps",
            "resamples",
            "status",
        ],
        lambda r: [
            r.sigma_d,
            r.sigma_r,
            r.mean_amplitude,
            r.std_amplitude,
            r.mean_lam,
            r.std_lam,
            r.reps,
            r.resamples,
            r.status,
        ],
    ),
}


def parse_config(path, base=None):
    """Read a flat key/value config file into a ScanConfig.

    Unknown keys and unparseable values raise ValidationError naming the
    key and line number. An empty file yields all defaults.
    """
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            if "=" not in line:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'key = value', got {line!r}"
                )
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
            field_name, cast = _CONFIG_KEYS[key]
            try:
                overrides[field_name] = cast(value)
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: cannot parse {value!r} as "
                    f"{cast.__name__} for key {key!r}"
                ) from None
    base = base or ScanConfig()
    return dataclasses.replace(base, **overrides)


def dump_config(cfg, path):
    """Write a ScanConfig in the same key/value format parse_config reads."""
    reverse = {field: key for key, (field, _) in _CONFIG_KEYS.items()}
    lines = ["[scan]"]
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, float):
            value = FLOAT_FORMAT % value
        lines.append(f"{reverse[f.name]} = {value}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _format_cell(value):
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def _atomic_write(path, data):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_csv(records, path):
    """Write a homogeneous record list as CSV; returns a manifest entry.

    The family schema is chosen from the record type; an empty list is
    not allowed since the family would be ambiguous.
    """
    if not records:
        raise ValidationError("cannot infer CSV schema from an empty record list")
    kind = type(records[0])
    if kind not in _SCHEMAS:
        raise ValidationError(f"unsupported record type {kind.__name__}")
    if any(type(r) is not kind for r in records):
        raise ValidationError("record list mixes experiment families")
    family, header, extract = _SCHEMAS[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_format_cell(v) for v in extract(rec)])
    data = buf.getvalue().encode("utf-8")
    _atomic_write(path, data)
    return {
        "path": os.path.basename(path),
        "family": family,
        "rows": len(records),
        "sha256": hashlib.sha256(data).hexdigest(),
    }


def write_header_only(family_record_type, path):
    """Header-only CSV for a scan that produced no records."""
    _, header, _ = _SCHEMAS[family_record_type]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(header)
    data = buf.getvalue().encode("utf-8")
    _atomic_write(path, data)
    return {
        "path": os.path.basename(path),
        "family": _SCHEMAS[family_record_type][0],
        "rows": 0,
        "sha256": hashlib.sha256(data).hexdigest(),
    }


_PARSERS = {
    "distance": lambda row: DistanceRecord(
        float(row["r_angstrom"]),
        float(row["amplitude"]),
        float(row["lambda"]),
        float(row["excited_energy_ghz"]),
        row["status"],
    ),
    "size": lambda row: SizeRecord(
        int(row["n"]),
        bool(int(row["interacting"])),
        float(row["amplitude"]),
        float(row["lambda"]),
        row["status"],
    ),
    "grid2d": lambda row: Grid2dRecord(
        int(row["n"]),
        row["plane"],
        float(row["amplitude"]),
        float(row["lambda"]),
        row["status"],
    ),
    "noise": lambda row: NoiseRecord(
        float(row["sigma_d_ghz"]),
        float(row["sigma_r_angstrom"]),
        float(row["mean_amplitude"]),
        float(row["std_amplitude"]),
        float(row["mean_lambda"]),
        float(row["std_lambda"]),
        int(row["reps"]),
        int(row["resamples"]),
        row["status"],
    ),
}

_HEADERS = {header[0]: family for family, header, _ in _SCHEMAS.values()}


def read_csv(path):
    """Read a result CSV back into records, detecting the family from
    the header row."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: empty CSV")
        family = _HEADERS.get(reader.fieldnames[0])
        if family is None:
            raise ValidationError(
                f"{path}: unrecognized CSV header {reader.fieldnames}"
            )
        try:
            return [_PARSERS[family](row) for row in reader]
        except (TypeError, ValueError, KeyError) as exc:
            raise ValidationError(f"{path}: malformed row ({exc})") from None


def write_manifest(cfg, entries, path, flag_overrides=()):
    """JSON run manifest: tool version, resolved config, seed, checksums."""
    doc = {
        "tool": "spinwitness",
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "base_seed": cfg.base_seed,
        "config": dataclasses.asdict(cfg),
        "flag_overrides": list(flag_overrides),
        "outputs": list(entries),
    }
    _atomic_write(path, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    return doc
