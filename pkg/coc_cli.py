#!/usr/bin/env python3
"""
COC - Coadjoint Orbit Classifier
================================

Command-line front end: validate algebras, print structure reports, classify
coadjoint orbits, verify unboundedness witnesses and run the sampling oracle.

Usage:
    python coc_cli.py validate su2.json
    python coc_cli.py structure se3                     # catalog name works too
    python coc_cli.py classify su2 --covector 0,0,1 --json
    python coc_cli.py classify sl2R --covector=-1,0,0   # '=' for leading minus
    python coc_cli.py witness heisenberg3 --covector 0,0,1
    python coc_cli.py sample heisenberg3 --covector 0,0,1 --seed 7 --steps 10000 --eps 5
    python coc_cli.py sample su2 --covector 0,0,1 --seeds 1,2,3
    python coc_cli.py catalog list
    python coc_cli.py catalog show osc4

Common flags (any subcommand):
    --json              machine-readable report on stdout
    --tol-rank X        relative SVD rank threshold coefficient
    --tol-num X         absolute numerical tolerance
    --seed S            seed for internal randomness and the walk
    --config FILE       JSON settings layer (tolerances / walk)
    --timing            include wall time in the JSON report
    --verbose, -v       progress on stderr

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 internal error.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from coc_algebra import LieAlgebra, parse_number, to_raw, validate_algebra
from coc_catalog import catalog_algebra, catalog_get, catalog_names
from coc_classifier import REPLAY_TIMES, OrbitClassifier, Verdict, replay_witness
from coc_config import Settings, load_settings
from coc_errors import AlgebraFormatError, COCError, InputError, UnknownAlgebra, UsageError
from coc_sampler import WalkConfig, estimate_bounded, sample_many, sample_orbit, summary
from coc_structure import structure_report


class Colors:
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'


VERDICT_STYLE = {
    Verdict.FIXED_POINT: (Colors.OKCYAN, "📍"),
    Verdict.COMPACT: (Colors.OKGREEN, "✅"),
    Verdict.UNBOUNDED: (Colors.WARNING, "🚀"),
}

STATUS_STYLE = {
    "bounded": (Colors.OKGREEN, "✅"),
    "unbounded": (Colors.WARNING, "🚀"),
    "inconclusive": (Colors.OKBLUE, "❔"),
}


# ============================================================================
# JSON OUTPUT
# ============================================================================

def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps(x)
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def to_json(value: Any, level: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits"""
    value = _plain(value)
    pad, end = "  " * (level + 1), "  " * level
    if isinstance(value, float):
        return _format_float(value)
    if _is_scalar(value):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        items = [_plain(v) for v in value]
        if not items:
            return "[]"
        if all(_is_scalar(v) for v in items):
            return "[" + ", ".join(to_json(v) for v in items) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, level + 1) for v in items) + "\n" + end + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        lines = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, level + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(lines) + "\n" + end + "}"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


@dataclass
class RunReport:
    command: List[str]
    settings: Settings
    inputs: Dict[str, Any] = field(default_factory=dict)
    result: Any = None
    wall_time: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "inputs": self.inputs,
            "tolerances": self.settings.tolerances.to_dict(),
            "result": self.result,
        }
        if self.wall_time is not None:
            data["wall_time"] = self.wall_time
        return data


# ============================================================================
# INPUTS
# ============================================================================

def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_algebra(source: str, settings: Settings) -> Tuple[LieAlgebra, Dict[str, Any]]:
    """An algebra JSON file, or a catalog name when no such file exists"""
    path = Path(source)
    if path.is_file():
        data = path.read_bytes()
        try:
            raw = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise AlgebraFormatError(f"{source} is not valid JSON: {e}")
        algebra = validate_algebra(raw, settings.tolerances)
        return algebra, {"source": source, "sha256": _digest(data)}
    if source in catalog_names():
        algebra = catalog_algebra(source, settings.tolerances)
        canonical = json.dumps(to_raw(algebra), sort_keys=True).encode("utf-8")
        return algebra, {"source": f"catalog:{source}", "sha256": _digest(canonical)}
    raise UnknownAlgebra(f"{source} is neither a file nor a catalog algebra "
                         f"(catalog: {', '.join(catalog_names())})")


def parse_covector(inline: Optional[str], path: Optional[str],
                   dim: int) -> Tuple[np.ndarray, Dict[str, Any]]:
    if inline is not None and path is not None:
        raise UsageError("Give the covector inline (--covector) or as a file (--covector-file), not both")
    if inline is None and path is None:
        raise UsageError("A covector is required (--covector v1,v2,... or --covector-file f.json)")
    if inline is not None:
        values = [parse_number(v, "covector entry") for v in inline.split(",") if v.strip()]
        source = {"inline": inline}
    else:
        try:
            data = Path(path).read_bytes()
            raw = json.loads(data.decode("utf-8"))
        except FileNotFoundError:
            raise InputError(f"Covector file not found: {path}")
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise InputError(f"Covector file is not valid JSON: {path}: {e}")
        if not isinstance(raw, dict) or not isinstance(raw.get("f"), list):
            raise InputError(f"Covector file must hold {{\"f\": [number, ...]}}: {path}")
        values = [parse_number(v, "covector entry") for v in raw["f"]]
        source = {"source": path, "sha256": _digest(data)}
    if len(values) != dim:
        raise InputError(f"Covector has {len(values)} entries, algebra has dim {dim}")
    return np.array(values, dtype=float), source


def _parse_seeds(text: str) -> List[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--seeds must be comma-separated integers, got {text!r}")
    if not seeds or any(s < 0 for s in seeds):
        raise UsageError("--seeds needs at least one non-negative integer")
    return seeds


# ============================================================================
# HUMAN OUTPUT
# ============================================================================

def _vector(v) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in np.asarray(v, dtype=float)) + ")"


def _progress(args, message: str):
    if args.verbose:
        print(f"🔍 {message}", file=sys.stderr)


def _print_structure(result: Dict[str, Any]):
    print(f"\n{Colors.HEADER}{Colors.BOLD}Structure of {result['algebra']}{Colors.ENDC} (dim {result['dim']})")
    print(f"   Radical:          dim {result['radical_dim']}")
    print(f"   Semisimple part:  dim {result['semisimple_dim']}")
    if result["simple_ideals"]:
        for k, ideal in enumerate(result["simple_ideals"], 1):
            tag = f"{Colors.OKGREEN}compact{Colors.ENDC}" if ideal["compact"] else f"{Colors.WARNING}non-compact{Colors.ENDC}"
            print(f"     ideal {k}: dim {ideal['dim']}, {tag}")
    print(f"   g_n:              dim {result['gn_dim']}")
    print(f"   Solvable: {result['solvable']}   Nilpotent: {result['nilpotent']}")
    print(f"   Property B⇒F:     {result['has_property_bf']}")
    print(f"   Fixed-point dim:  {result['fixed_point_dim']}")
    if result["levi"] is None:
        print(f"   {Colors.WARNING}⚠️  No Levi complement: {result['residuals'].get('levi_error', 'not found')}{Colors.ENDC}")
    else:
        print(f"   Levi complement:  dim {len(result['levi'])}")
    for key, value in result["residuals"].items():
        if isinstance(value, float):
            print(f"     {key}: {value:.3e}")


def _print_classification(name: str, result: Dict[str, Any]):
    verdict = Verdict(result["verdict"])
    color, icon = VERDICT_STYLE[verdict]
    print(f"\n{icon} {Colors.BOLD}{name}{Colors.ENDC}: {color}{verdict.value}{Colors.ENDC}")
    print(f"   Orbit dimension:    {result['orbit_dim']}")
    print(f"   Criterion residual: {result['criterion_residual']:.3e}")
    if result["f1"] is not None:
        print(f"   Fixed part f1:      {_vector(result['f1'])}")
    part = result["compact_part"]
    if part is not None:
        print(f"   Compact part:       {_vector(part['covector'])} on {part['algebra']} (dim {part['dim']})")
        if part["embedding"] is None:
            print(f"   {Colors.WARNING}⚠️  No Levi complement; quotient-level data only{Colors.ENDC}")
    _print_witness(result.get("witness"), verdict)


def _print_witness(witness: Optional[Dict[str, Any]], verdict: Verdict):
    if witness is not None:
        growth = (f"rate {witness['rate']:.6g}" if witness["kind"] == "exponential"
                  else f"degree {witness['degree']}")
        print(f"   Witness:            {witness['kind']} along {_vector(witness['generator'])}, {growth}")
        print(f"   Verified growth:    x{witness['verified_growth']:.6g} at t = {REPLAY_TIMES[-1]:g}")
    elif verdict is Verdict.UNBOUNDED:
        print(f"   {Colors.OKBLUE}No single-generator witness found{Colors.ENDC}")


def _print_sample(samples: List[Dict[str, Any]]):
    for item in samples:
        color, icon = STATUS_STYLE[item["status"]]
        print(f"{icon} seed {item['seed']}: {color}{item['status']}{Colors.ENDC} "
              f"(max norm {item['max_norm']:.6g}, growth x{item['growth_ratio']:.6g}, {item['steps']} steps)")
        for note in item["notes"]:
            print(f"     {note}")


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_validate(args, settings: Settings, report: RunReport):
    g, source = load_algebra(args.algebra, settings)
    report.inputs["algebra"] = source
    report.result = {"name": g.name, "dim": g.dim, "basis": list(g.basis),
                     "jacobi_residual": g.jacobi_residual, "valid": True}
    if not args.json:
        print(f"{Colors.OKGREEN}✅ {g.name}{Colors.ENDC}: valid Lie algebra of dim {g.dim} "
              f"(Jacobi residual {g.jacobi_residual:.3e})")


def cmd_structure(args, settings: Settings, report: RunReport):
    g, source = load_algebra(args.algebra, settings)
    report.inputs["algebra"] = source
    _progress(args, f"Analysing {g.name} (dim {g.dim})")
    report.result = structure_report(g).to_dict()
    if not args.json:
        _print_structure(report.result)


def cmd_classify(args, settings: Settings, report: RunReport):
    g, source = load_algebra(args.algebra, settings)
    f, covector = parse_covector(args.covector, args.covector_file, g.dim)
    report.inputs.update(algebra=source, covector=covector)
    _progress(args, f"Classifying the orbit of {_vector(f)} in {g.name}")
    result = OrbitClassifier(g).classify(f).to_dict()
    report.result = {"algebra": g.name, **result}
    if not args.json:
        _print_classification(g.name, result)


def cmd_witness(args, settings: Settings, report: RunReport):
    g, source = load_algebra(args.algebra, settings)
    f, covector = parse_covector(args.covector, args.covector_file, g.dim)
    report.inputs.update(algebra=source, covector=covector)
    classifier = OrbitClassifier(g)
    verdict = Verdict.UNBOUNDED if not classifier.is_bounded(f) else Verdict.COMPACT
    _progress(args, f"Searching escape generators for {_vector(f)} in {g.name}")
    witness = classifier.unboundedness_witness(f)
    replay = []
    if witness is not None:
        ratios = replay_witness(g, f, witness)
        replay = [{"t": t, "model": witness.model(t), "observed": r} for t, r in zip(REPLAY_TIMES, ratios)]
    report.result = {
        "algebra": g.name,
        "bounded": verdict.bounded,
        "witness": witness.to_dict() if witness else None,
        "replay": replay,
    }
    if args.json:
        return
    if verdict.bounded:
        print(f"{Colors.OKGREEN}✅ Orbit is bounded{Colors.ENDC}: no escape witness exists")
        return
    _print_witness(report.result["witness"], verdict)
    for row in replay:
        print(f"     t = {row['t']:g}: model x{row['model']:.6g}, observed x{row['observed']:.6g}")


def cmd_sample(args, settings: Settings, report: RunReport):
    g, source = load_algebra(args.algebra, settings)
    f, covector = parse_covector(args.covector, args.covector_file, g.dim)
    report.inputs.update(algebra=source, covector=covector)
    seed = args.seed if args.seed is not None else settings.tolerances.seed
    config = WalkConfig.from_defaults(settings.walk, eps=args.eps, steps=args.steps,
                                      escape=args.escape, seed=seed)
    if config.steps < 1 or config.eps <= 0 or config.escape <= 0:
        raise UsageError("--steps, --eps and --escape must be positive")
    report.inputs["walk"] = {k: v for k, v in asdict(config).items() if k != "seed"}

    if args.seeds:
        seeds = _parse_seeds(args.seeds)
        _progress(args, f"Running {len(seeds)} walks of {config.steps} steps")
        samples = sample_many(g, f, seeds, config)
    else:
        _progress(args, f"Running a walk of {config.steps} steps")
        samples = [sample_orbit(g, f, config)]
    summaries = [summary(s, estimate_bounded(s)) for s in samples]

    if args.seeds:
        statuses = {s["status"] for s in summaries}
        combined = ("unbounded" if "unbounded" in statuses
                    else "bounded" if statuses == {"bounded"} else "inconclusive")
        report.result = {"status": combined, "samples": summaries}
    else:
        report.result = summaries[0]
    if not args.json:
        _print_sample(summaries)


def cmd_catalog(args, settings: Settings, report: RunReport):
    if args.action == "list":
        report.result = [{"name": name, "dim": catalog_get(name).algebra.dim,
                          "description": catalog_get(name).description} for name in catalog_names()]
        if not args.json:
            print(f"\n{Colors.HEADER}{Colors.BOLD}Catalog{Colors.ENDC}")
            for item in report.result:
                print(f"   {item['name']:<16} dim {item['dim']:<3} {item['description']}")
        return
    if not args.name:
        raise UsageError("catalog show needs an algebra name")
    entry = catalog_get(args.name)
    report.result = entry.to_dict()
    if not args.json:
        print(to_json(report.result))


COMMANDS = {
    "validate": cmd_validate,
    "structure": cmd_structure,
    "classify": cmd_classify,
    "witness": cmd_witness,
    "sample": cmd_sample,
    "catalog": cmd_catalog,
}


# ============================================================================
# ARGUMENTS
# ============================================================================

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--json', action='store_true', help='Machine-readable output')
    common.add_argument('--tol-rank', type=float, help='Relative rank threshold coefficient')
    common.add_argument('--tol-num', type=float, help='Absolute numerical tolerance')
    common.add_argument('--seed', type=int, help='Seed for internal randomness and walks')
    common.add_argument('--config', type=Path, help='JSON settings file')
    common.add_argument('--timing', action='store_true', help='Include wall time in JSON')
    common.add_argument('--verbose', '-v', action='store_true', help='Progress on stderr')

    parser = _Parser(
        prog='coc',
        description='Coadjoint orbit classifier for Lie algebras given by structure constants',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    def algebra_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument('algebra', help='Algebra JSON file or catalog name')
        return sub

    algebra_command('validate', 'Check a structure-constant table')
    algebra_command('structure', 'Radical, simple ideals, g_n and Levi data')
    for name, help_text in (('classify', 'Classify the orbit of a covector'),
                            ('witness', 'Find and replay an unboundedness witness'),
                            ('sample', 'Random-walk oracle over the orbit')):
        sub = algebra_command(name, help_text)
        sub.add_argument('--covector', help='Comma-separated coordinates v1,v2,...')
        sub.add_argument('--covector-file', help='JSON file {"f": [...]}')
        if name == 'sample':
            sub.add_argument('--steps', type=int, help='Walk length')
            sub.add_argument('--eps', type=float, help='Step size')
            sub.add_argument('--escape', type=float, help='Escape threshold on the growth ratio')
            sub.add_argument('--seeds', help='Several seeds a,b,c run in parallel')

    catalog_parser = subparsers.add_parser('catalog', parents=[common], help='Built-in algebras')
    catalog_parser.add_argument('action', choices=['list', 'show'])
    catalog_parser.add_argument('name', nargs='?', help='Algebra name for show')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = None
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            build_parser().print_help()
            return 1
        overrides = {"tolerances": {"rank": args.tol_rank, "num": args.tol_num, "seed": args.seed}}
        settings = load_settings(args.config, overrides)
        report = RunReport(command=argv, settings=settings)

        started = time.perf_counter()
        COMMANDS[args.command](args, settings, report)
        if args.timing:
            report.wall_time = time.perf_counter() - started
        if args.json:
            print(to_json(report.to_dict()))
        return 0

    except COCError as e:
        if args is not None and getattr(args, "json", False):
            print(to_json({"command": argv, **e.to_dict(), "exit_code": e.exit_code}))
        print(f"{Colors.FAIL}❌ {type(e).__name__}:{Colors.ENDC} {e.message}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        print(f"{Colors.FAIL}❌ Internal error:{Colors.ENDC} {type(e).__name__}: {e}", file=sys.stderr)
        return 3


run_cli = main


if __name__ == '__main__':
    sys.exit(main())
