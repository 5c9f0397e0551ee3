"""Command line interface.

Exit statuses::

    0  success, result carries its certificate
    1  success without certificate (PSP hit a bound violation or ran out of samples)
    2  configuration error
    3  input error
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .bounds import BoundMethod, check_delta, compare_bounds
from .errors import ConfigurationError, DomainError, InputError
from .gs import GsConfig, global_sampling
from .psp import PspConfig, psp
from .synth import coverage_trial, sample_matrix

EXIT_CERTIFIED = 0
EXIT_UNCERTIFIED = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _common(p, selection=True):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--input", help="long-form matrix CSV")
    p.add_argument("--m", type=int, help="number of samples to draw from a world spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (report, matrix or statistics)")
    if selection:
        p.add_argument("--method", help="finite-emd, asymptotic-emd, hoeffding or gaussian-chernoff")
        p.add_argument("--delta", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--s0", type=int)
        p.add_argument("--objective", help="c:weight[,c:weight...]")
        p.add_argument("--constraint", action="append", help='"a1*c1+a2*c2<=b", repeatable')
        p.add_argument("--shuffle-seed", type=int, help="permute samples before assigning EMD signs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="codecselect", description="Certified codec selection from criterion matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("select-gs", help="global sampling over the full matrix")
    _common(p)
    p = sub.add_parser("select-psp", help="progressive sampling with pruning")
    _common(p)
    p.add_argument("--trace", help="long-form CSV trace output")
    p = sub.add_parser("synth-gen", help="sample a matrix from a world spec")
    _common(p, selection=False)
    p = sub.add_parser("coverage", help="Monte-Carlo check of the guarantees on a world spec")
    _common(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--algorithm", choices=["gs", "psp"])
    p = sub.add_parser("compare-bounds", help="widths of all four bounds and dominance predicates")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--codecs", type=int, required=True)
    p.add_argument("--criteria", type=int, default=1)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.0, help="largest per-codec standard deviation")
    p.add_argument("--emd", type=float, default=0.0)
    p.add_argument("--slots", type=int, default=1, help="union-bound slots (PSP iterations)")
    p.add_argument("--out")
    return parser


def _float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from None


def _int(value, name):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}") from None


def resolve(args) -> io.RunConfig:
    """Merge the config file with command line flags (flags win)."""
    file_cfg = io.read_config(args.config) if getattr(args, "config", None) else {}

    def pick(name, key=None):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_cfg.get(key or name)

    rc = io.RunConfig()
    rc.input = pick("input")
    if io.has_world(file_cfg):
        rc.world = io.world_from_config(file_cfg)
    if rc.input is not None and rc.world is not None and getattr(args, "input", None):
        rc.world = None  # explicit --input overrides a world in the file
    if (v := pick("method")) is not None:
        rc.method = BoundMethod.parse(v)
    for name, conv in (("delta", _float), ("epsilon", _float), ("s0", _int), ("m", _int),
                       ("seed", _int), ("trials", _int)):
        if (v := pick(name)) is not None:
            setattr(rc, name, conv(v, name))
    if (v := pick("shuffle_seed", "shuffle_seed")) is not None:
        rc.shuffle_seed = _int(v, "shuffle_seed")
    if (v := pick("algorithm")) is not None:
        rc.algorithm = v
    if (v := pick("objective")) is not None:
        rc.objective = io.parse_objective(v)
    constraints = getattr(args, "constraint", None)
    if constraints is None:
        constraints = file_cfg.get("constraint", [])
        constraints = constraints if isinstance(constraints, list) else [constraints]
    rc.constraints = io.parse_constraints(constraints)
    rc.out = pick("out")
    rc.trace = pick("trace")
    check_delta(rc.delta)
    return rc


def _matrix(rc: io.RunConfig):
    rc.validate()
    if rc.input is not None:
        return io.load_matrix(rc.input, shuffle_seed=rc.shuffle_seed)
    if rc.m is None:
        raise ConfigurationError("m is required when sampling from a world spec")
    matrix = sample_matrix(rc.world, rc.m, rc.seed)
    return matrix.shuffled(rc.shuffle_seed) if rc.shuffle_seed is not None else matrix


def _objective(rc, criterion_ids):
    from .core import Objective

    return rc.objective if rc.objective is not None else Objective.uniform(criterion_ids)


def _emit(text: str, path):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_select(args, algorithm):
    rc = resolve(args)
    matrix = _matrix(rc)
    objective = _objective(rc, matrix.criterion_ids)
    if algorithm == "gs":
        report = global_sampling(matrix, GsConfig(rc.delta, rc.method, objective, rc.constraints))
    else:
        cfg = PspConfig(rc.s0, rc.epsilon, rc.delta, rc.method, objective, rc.constraints)
        report = psp(matrix, cfg)
    _emit(io.dumps(io.report_to_dict(report)), rc.out)
    if algorithm == "psp" and rc.trace:
        io.write_trace(report, rc.trace)
    print(
        f"{report.params['algorithm']}: liberal={list(report.liberal_set)} "
        f"conservative={list(report.conservative_set)} reason={report.terminated_reason} "
        f"certified={report.certified}",
        file=sys.stderr,
    )
    return EXIT_CERTIFIED if report.certified else EXIT_UNCERTIFIED


def cmd_synth_gen(args):
    rc = resolve(args)
    if rc.world is None:
        raise ConfigurationError("synth-gen needs a world spec in --config")
    if rc.m is None:
        raise ConfigurationError("synth-gen needs --m")
    matrix = sample_matrix(rc.world, rc.m, rc.seed)
    if rc.out:
        io.save_matrix(matrix, rc.out)
    else:
        raise ConfigurationError("synth-gen needs --out")
    return EXIT_CERTIFIED


def cmd_coverage(args):
    rc = resolve(args)
    if rc.world is None:
        raise ConfigurationError("coverage needs a world spec in --config")
    if rc.m is None:
        raise ConfigurationError("coverage needs --m")
    objective = _objective(rc, rc.world.criterion_ids)
    if rc.algorithm == "psp":
        cfg = PspConfig(rc.s0, rc.epsilon, rc.delta, rc.method, objective, rc.constraints)
    elif rc.algorithm == "gs":
        cfg = GsConfig(rc.delta, rc.method, objective, rc.constraints)
    else:
        raise ConfigurationError(f"algorithm must be gs or psp, got {rc.algorithm!r}")
    result = coverage_trial(rc.world, rc.m, cfg, rc.trials, rc.seed)
    out = {
        "parameters": {
            "algorithm": rc.algorithm, "method": rc.method.value, "delta": rc.delta,
            "m": rc.m, "trials": rc.trials, "seed": rc.seed,
        },
        **result.as_dict(),
    }
    _emit(io.dumps(out), rc.out)
    return EXIT_CERTIFIED


def cmd_compare_bounds(args):
    check_delta(args.delta)
    res = compare_bounds(args.m, args.codecs, args.criteria, args.delta, args.sigma, args.emd, args.slots)
    lines = [
        f"m={args.m} |H|={args.codecs} |C|={args.criteria} delta={args.delta} "
        f"sigma_hat={args.sigma} emd={args.emd} slots={args.slots}",
        f"{'method':<26}{'width':>12}",
    ]
    for method, width in res["widths"].items():
        lines.append(f"{method.value:<26}{width:>12.6f}")
    lines.append(f"hoeffding dominates finite-sample EMD:  {res['hoeffding_dominates_finite_emd']}")
    lines.append(f"hoeffding dominates asymptotic EMD:     {res['hoeffding_dominates_asymptotic_emd']}")
    lines.append(f"  (exact re-derivation):                {res['hoeffding_dominates_asymptotic_emd_exact']}")
    print("\n".join(lines))
    if args.out:
        data = {k: v for k, v in res.items() if k != "widths"}
        data["widths"] = {m.value: w for m, w in res["widths"].items()}
        Path(args.out).write_text(io.dumps(data), encoding="utf-8")
    return EXIT_CERTIFIED


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "select-gs":
            return cmd_select(args, "gs")
        if args.command == "select-psp":
            return cmd_select(args, "psp")
        if args.command == "synth-gen":
            return cmd_synth_gen(args)
        if args.command == "coverage":
            return cmd_coverage(args)
        return cmd_compare_bounds(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run_cli())
