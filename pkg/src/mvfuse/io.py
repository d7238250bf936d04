"""CSV ingestion, run configuration and result serialization."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np
import yaml

from .data import MERGE_MODES, PENALTY_FAMILIES, HyperParams, View, assemble_dataset
from .errors import ConfigError, EmptyFile, IoError, ParseError, RaggedRow, ValidationError
from .losses import LOSS_KINDS
from .path import PathSpec

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def load_view_csv(path) -> np.ndarray:
    """Read a numeric CSV matrix (rows are samples).

    A single header row is skipped when any of its fields is non-numeric.
    Only plain decimal numbers are accepted.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [(k, row) for k, row in enumerate(csv.reader(fh), start=1)
                if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyFile(f"{path}: file is empty")
    first = rows[0][1]
    if not all(_NUMBER.match(cell.strip()) for cell in first):
        rows = rows[1:]
        if not rows:
            raise EmptyFile(f"{path}: header row but no data")
    width = len(rows[0][1])
    out = np.empty((len(rows), width))
    for r, (line, row) in enumerate(rows):
        if len(row) != width:
            raise RaggedRow(path, line, width, len(row))
        for c, cell in enumerate(row):
            cell = cell.strip()
            if not _NUMBER.match(cell):
                raise ParseError(path, line, c + 1, f"not a decimal number: {cell!r}")
            out[r, c] = float(cell)
    return out


def load_labels(path) -> list:
    """One label per line; blank lines are ignored. Integer labels become ints."""
    path = Path(path)
    with open(path) as fh:
        labels = [line.strip() for line in fh if line.strip()]
    if not labels:
        raise EmptyFile(f"{path}: no labels")
    try:
        return [int(x) for x in labels]
    except ValueError:
        return labels


def write_labels(labels, path):
    Path(path).write_text("".join(f"{x}\n" for x in labels))


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=2, _level=0) -> str:
    """JSON text with every float written to 17 significant digits.

    Lists holding only scalars stay on one line.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def result_document(result) -> dict:
    """Plain-data view of a :class:`ClusteringResult`, 1-based indices."""
    doc = {
        "labels": [int(x) for x in result.labels],
        "n_clusters": int(result.n_clusters),
        "selected_features": [[int(j) + 1 for j in s] for s in result.selected_features],
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "residuals": {"primal": float(result.primal_residual), "dual": float(result.dual_residual)},
        "objective_trace": [float(x) for x in result.objective_trace],
    }
    if result.hyperparams is not None:
        doc["hyperparameters"] = asdict(result.hyperparams)
    return doc


def write_text(text, path):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_result(result, path=None) -> str:
    """Serialize ``result`` as JSON; also write it to ``path`` when given."""
    text = dumps(result_document(result)) + "\n"
    if path is not None:
        write_text(text, path)
    return text


def path_document(path_result) -> dict:
    def rec(r):
        return {
            "eta": r.eta, "beta": r.beta, "theta": r.theta, "sigma": r.sigma,
            "n_clusters": r.n_clusters, "n_selected": r.n_selected,
            "selected_features": None if r.selected_features is None
            else [[j + 1 for j in s] for s in r.selected_features],
            "labels": None if r.labels is None else [int(x) for x in r.labels],
            "metrics": r.metrics, "iterations": r.iterations, "converged": r.converged,
            "error": r.error,
        }
    records = [rec(r) for r in path_result.records]
    return {
        "records": records,
        "best": None if path_result.best is None else records[path_result.best],
        "total_iterations": path_result.total_iterations,
    }


def read_document(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------- config

_HP_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "eta": {"type": "number", "minimum": 0},
        "beta": {"type": "number", "minimum": 0},
        "theta": {"type": "number", "minimum": 0, "maximum": 1},
        "phi": {"type": "number", "exclusiveMinimum": 0},
        "k_neighbors": {"type": "integer", "minimum": 1},
        "sigma": {"type": "number", "exclusiveMinimum": 0},
        "penalty_family": {"enum": list(PENALTY_FAMILIES)},
        "eps_abs": {"type": "number", "exclusiveMinimum": 0},
        "eps_rel": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "merge_mode": {"enum": list(MERGE_MODES)},
        "merge_tol": {"type": "number", "minimum": 0},
        "support_tol": {"type": "number", "minimum": 0},
    },
}

_GRID = {"type": "array", "items": {"type": "number"}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["views"],
    "properties": {
        "views": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["path", "loss"],
                "properties": {
                    "path": {"type": "string"},
                    "loss": {"enum": list(LOSS_KINDS)},
                    "weight": {"type": "number", "exclusiveMinimum": 0},
                    "feature_weights": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
                },
            },
        },
        "hyperparameters": _HP_SCHEMA,
        "path_spec": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eta_grid": _GRID,
                "beta_grid": _GRID,
                "theta_grid": _GRID,
                "sigma_grid": _GRID,
                "target_clusters": {"type": "integer", "minimum": 1},
            },
        },
        "truth_labels_path": {"type": "string"},
        "output_path": {"type": "string"},
    },
}


@dataclass
class RunConfig:
    dataset: object
    params: HyperParams
    path_spec: PathSpec
    truth: Optional[list]
    output_path: Optional[Path]
    source: Path


def _parse_config_text(path: Path):
    text = path.read_text()
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: cannot parse config: {exc}") from exc


def load_config(path) -> RunConfig:
    """Read, schema-check and fully materialize a run configuration.

    Every check that can fail on user input happens here, before any solver
    work: schema, CSV parsing, dataset assembly, hyperparameter ranges, grid
    ordering and ground-truth length.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = _parse_config_text(path)
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: invalid config at {where}: {exc.message}") from None

    base = path.parent

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    views = []
    for k, spec in enumerate(raw["views"]):
        vpath = resolve(spec["path"])
        if not vpath.is_file():
            raise ConfigError(f"view {k}: data file not found: {vpath}")
        X = load_view_csv(vpath)
        views.append(View(X, spec["loss"], spec.get("weight"), spec.get("feature_weights"),
                          name=vpath.stem))
    dataset = assemble_dataset(views)

    try:
        params = HyperParams(**raw.get("hyperparameters", {}))
        params.check_against(dataset)
        pspec = PathSpec(**raw.get("path_spec", {}))
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    truth = None
    if "truth_labels_path" in raw:
        tpath = resolve(raw["truth_labels_path"])
        if not tpath.is_file():
            raise ConfigError(f"truth labels file not found: {tpath}")
        truth = load_labels(tpath)
        if len(truth) != dataset.n:
            raise ValidationError(f"{tpath}: {len(truth)} labels for {dataset.n} samples")

    out = resolve(raw["output_path"]) if "output_path" in raw else None
    return RunConfig(dataset=dataset, params=params, path_spec=pspec, truth=truth,
                     output_path=out, source=path)


def hyperparams_from_document(doc) -> HyperParams:
    names = {f.name for f in fields(HyperParams)}
    return HyperParams(**{k: v for k, v in doc.items() if k in names})
