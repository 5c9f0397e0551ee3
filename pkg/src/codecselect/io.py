"""Reading and writing matrices, configuration, reports and traces.

Matrices travel as long-form CSV with header
``sample_id,codec_id,criterion_id,value``.  The order in which sample ids
first appear defines the sample axis, and with it the signs of the
alternating sums behind the EMD bounds, so row order is part of the
format.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bounds import BoundMethod
from .core import ConstraintSpace, CriterionMatrix, HalfSpace, Objective, SelectionReport
from .errors import ConfigurationError, IngestionError, InputError, ParseError
from .synth import DISTRIBUTIONS, SyntheticWorld, dist_name

MATRIX_HEADER = ["sample_id", "codec_id", "criterion_id", "value"]
TRACE_HEADER = ["iteration", "codec_id", "criterion_id", "lo", "hi", "active", "in_liberal", "in_conservative"]


def load_matrix(path, shuffle_seed: Optional[int] = None) -> CriterionMatrix:
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    samples, codecs, criteria = {}, {}, {}
    cells = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != MATRIX_HEADER:
            raise ParseError(f"expected header {','.join(MATRIX_HEADER)}, got {header!r}", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line=line)
            s, h, c, raw = (f.strip() for f in row)
            try:
                v = float(raw)
            except ValueError:
                raise ParseError(f"non-numeric value {raw!r}", line=line) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {raw!r}", line=line)
            key = (samples.setdefault(s, len(samples)), codecs.setdefault(h, len(codecs)),
                   criteria.setdefault(c, len(criteria)))
            if key in cells:
                raise IngestionError(f"line {line}: duplicate entry for sample={s!r}, codec={h!r}, criterion={c!r}")
            cells[key] = v
    if not cells:
        raise IngestionError(f"{path} contains no data rows")
    values = np.full((len(codecs), len(criteria), len(samples)), np.nan)
    for (i, a, b), v in cells.items():
        values[a, b, i] = v
    missing = np.argwhere(np.isnan(values))
    if len(missing):
        codec_list, crit_list, sample_list = list(codecs), list(criteria), list(samples)
        shown = [
            f"(sample={sample_list[i]}, codec={codec_list[a]}, criterion={crit_list[b]})"
            for a, b, i in missing[:10]
        ]
        raise IngestionError(f"{len(missing)} missing cells, e.g. " + "; ".join(shown))
    matrix = CriterionMatrix(list(codecs), list(criteria), list(samples), values)
    if shuffle_seed is not None:
        matrix = matrix.shuffled(shuffle_seed)
    return matrix


def save_matrix(matrix: CriterionMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MATRIX_HEADER)
        for i, s in enumerate(matrix.sample_ids):
            for a, h in enumerate(matrix.codec_ids):
                for b, c in enumerate(matrix.criterion_ids):
                    writer.writerow([s, h, c, repr(float(matrix.values[a, b, i]))])


# -- small parsers ------------------------------------------------------------

_TERM = re.compile(r"^\s*(?:([+-]?\s*(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*\*)?\s*([A-Za-z_][\w.^-]*)\s*$")


def parse_objective(text: str) -> Objective:
    """``"c1:0.3,c2:0.7"``."""
    weights = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, w = part.rpartition(":")
        if not sep or not name.strip():
            raise ConfigurationError(f"objective term {part!r} is not of the form criterion:weight")
        try:
            weights[name.strip()] = float(w)
        except ValueError:
            raise ConfigurationError(f"objective weight {w!r} is not a number") from None
    return Objective(weights)


def parse_halfspace(text: str) -> HalfSpace:
    """``"a1*c1+a2*c2<=b"``; a bare criterion name has coefficient 1."""
    if "<=" not in text:
        raise ConfigurationError(f"constraint {text!r} must contain '<='")
    lhs, rhs = text.split("<=", 1)
    try:
        bound = float(rhs)
    except ValueError:
        raise ConfigurationError(f"constraint bound {rhs!r} is not a number") from None
    coeffs = {}
    # split on + and - that start a new term (not inside exponents)
    terms = re.split(r"(?<![eE*])(?=[+-])", lhs.replace(" ", ""))
    for term in terms:
        if not term:
            continue
        sign = 1.0
        if term[0] in "+-" and "*" not in term:
            sign = -1.0 if term[0] == "-" else 1.0
            term = term[1:]
        match = _TERM.match(term)
        if not match:
            raise ConfigurationError(f"cannot parse constraint term {term!r} in {text!r}")
        coef, name = match.groups()
        a = sign * (float(coef.replace(" ", "")) if coef else 1.0)
        coeffs[name] = coeffs.get(name, 0.0) + a
    if not coeffs:
        raise ConfigurationError(f"constraint {text!r} has no terms")
    return HalfSpace(coeffs, bound)


def parse_constraints(items) -> ConstraintSpace:
    return ConstraintSpace(tuple(parse_halfspace(t) for t in items if t.strip()))


def parse_distribution(text: str):
    """``"beta(2,5)"``, ``"point(0.3)"``, ``"uniform(0,1)"`` and so on."""
    match = re.fullmatch(r"\s*(\w+)\s*\(([^)]*)\)\s*", text)
    if not match or match.group(1) not in DISTRIBUTIONS:
        raise ConfigurationError(
            f"cannot parse distribution {text!r}; expected one of {sorted(DISTRIBUTIONS)} as name(args)"
        )
    try:
        args = [float(a) for a in match.group(2).split(",") if a.strip()]
        return DISTRIBUTIONS[match.group(1)](*args)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad arguments in distribution {text!r}: {exc}") from None


def format_distribution(dist) -> str:
    args = ",".join(repr(float(getattr(dist, f))) for f in dist.__dataclass_fields__)
    return f"{dist_name(dist)}({args})"


# -- configuration -----------------------------------------------------------


def read_config(path) -> dict:
    """Flat ``dotted.key = value`` file; ``#`` starts a comment.

    Repeated keys accumulate into a list (used for ``constraint``).
    """
    out: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line or line.startswith("="):
            raise ParseError(f"expected key = value, got {raw!r}", line=n)
        # '<=' belongs to constraint values, so split on the first bare '='
        match = re.match(r"^([^=<>\s]+)\s*=\s*(.*)$", line)
        if not match:
            raise ParseError(f"expected key = value, got {raw!r}", line=n)
        key, value = match.group(1), match.group(2).strip()
        if key in out:
            prev = out[key]
            out[key] = (prev if isinstance(prev, list) else [prev]) + [value]
        else:
            out[key] = value
    return out


def world_to_config(world: SyntheticWorld) -> dict:
    cfg = {
        "world.codecs": ",".join(map(str, world.codec_ids)),
        "world.criteria": ",".join(map(str, world.criterion_ids)),
        "world.seed": str(world.seed),
    }
    for h in world.codec_ids:
        for c in world.criterion_ids:
            cfg[f"world.{h}.{c}"] = format_distribution(world.specs[h, c])
    return cfg


def world_from_config(cfg: dict) -> SyntheticWorld:
    try:
        codecs = [s.strip() for s in cfg["world.codecs"].split(",") if s.strip()]
        criteria = [s.strip() for s in cfg["world.criteria"].split(",") if s.strip()]
    except KeyError as exc:
        raise ConfigurationError(f"world spec is missing key {exc.args[0]}") from None
    specs = {}
    for h in codecs:
        for c in criteria:
            key = f"world.{h}.{c}"
            if key not in cfg:
                raise ConfigurationError(f"world spec is missing key {key}")
            specs[h, c] = parse_distribution(cfg[key])
    return SyntheticWorld(codecs, criteria, specs, int(cfg.get("world.seed", 0)))


def write_config(cfg: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for k, v in cfg.items():
            for item in v if isinstance(v, list) else [v]:
                fh.write(f"{k} = {item}\n")


def has_world(cfg: dict) -> bool:
    return any(k.startswith("world.") for k in cfg)


# -- reports -----------------------------------------------------------------


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return None
    return x


def report_to_dict(report: SelectionReport) -> dict:
    rect = report.rectangle
    cells = []
    for a, h in enumerate(rect.codec_ids):
        for b, c in enumerate(rect.criterion_ids):
            cells.append(
                {
                    "codec_id": h,
                    "criterion_id": c,
                    "estimate": _num(report.estimates.get((h, c))),
                    "lo": _num(rect.lo[a, b]),
                    "hi": _num(rect.hi[a, b]),
                }
            )
    eps = rect.epsilon
    return {
        "parameters": {k: v for k, v in report.params.items()},
        "liberal_set": list(report.liberal_set),
        "conservative_set": list(report.conservative_set),
        "no_feasible_codec": report.no_feasible_codec,
        "terminated_reason": report.terminated_reason,
        "certified": report.certified,
        "sandwich": {"lower": _num(report.sandwich[0]), "upper": _num(report.sandwich[1])},
        "epsilon": (
            {c: _num(e) for c, e in zip(rect.criterion_ids, eps)} if eps is not None else None
        ),
        "objective_interval": {h: [_num(lo), _num(hi)] for h, (lo, hi) in report.objective_interval.items()},
        "cells": cells,
        "violations": report.violations,
        "iterations": [
            {
                "iteration": e.iteration,
                "batch_size": e.batch_size,
                "active": list(e.active_codecs),
                "liberal_set": list(e.liberal_set),
                "conservative_set": list(e.conservative_set),
                "pruned": list(e.pruned),
                "flags": e.flags,
            }
            for e in report.trace
        ],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=str) + "\n"


def write_report(report: SelectionReport, path) -> None:
    Path(path).write_text(dumps(report_to_dict(report)), encoding="utf-8")


def trace_rows(report: SelectionReport):
    codecs = report.rectangle.codec_ids
    criteria = report.rectangle.criterion_ids
    for e in report.trace:
        active = set(e.active_codecs)
        lib, cons = set(e.liberal_set), set(e.conservative_set)
        for a, h in enumerate(codecs):
            for b, c in enumerate(criteria):
                yield [
                    e.iteration, h, c, repr(float(e.lo[a, b])), repr(float(e.hi[a, b])),
                    int(h in active), int(h in lib), int(h in cons),
                ]


def write_trace(report: SelectionReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        writer.writerows(trace_rows(report))


# -- run configuration ---------------------------------------------------------


@dataclass
class RunConfig:
    input: Optional[str] = None
    world: Optional[SyntheticWorld] = None
    method: BoundMethod = BoundMethod.ASYMPTOTIC_EMD
    delta: float = 0.01
    epsilon: float = 0.05
    s0: int = 25
    m: Optional[int] = None
    objective: Optional[Objective] = None
    constraints: ConstraintSpace = field(default_factory=ConstraintSpace)
    out: Optional[str] = None
    trace: Optional[str] = None
    seed: int = 0
    shuffle_seed: Optional[int] = None
    trials: int = 1000
    algorithm: str = "gs"

    def validate(self):
        if (self.input is None) == (self.world is None):
            raise ConfigurationError("exactly one of a matrix input or a world spec is required")
