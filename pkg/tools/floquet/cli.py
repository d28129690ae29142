#!/usr/bin/env python3
"""
Floquet CLI Tool

Command-line front end for the conjugate-pair and Floquet verification tools.
Inputs are JSON files (or catalog entries); every command prints one JSON
report on stdout. Logs go to stderr.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
parse errors.
"""

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

# Handle imports for both script execution and package import
try:
    from tools.config import ProfileManager, RunConfig
except ImportError:
    script_dir = os.path.dirname(os.path.abspath(__file__))
    project_root = os.path.dirname(os.path.dirname(script_dir))
    sys.path.insert(0, project_root)
    from tools.config import ProfileManager, RunConfig

from tools.stabiliser.conjugacy import check_reversible
from tools.stabiliser.errors import (
    IrreversibleTransition,
    PauliParseError,
    ReconstructionFailure,
    StabiliserError,
)
from tools.stabiliser.group import StabiliserGroup, normaliser_logicals
from tools.stabiliser.locality import Lattice, check_local_reversibility
from tools.stabiliser.outcomes import (
    ForcedOutcomes,
    OutcomeSource,
    SeededOutcomes,
    exhaustive_streams,
    parse_outcome_stream,
)
from tools.floquet import catalog
from tools.floquet.dense import (
    MAX_DENSE_QUBITS,
    DenseOperator,
    logical_expectation_check,
    random_codespace_state,
    uniform_probability_check,
    verify_pair_identities,
    verify_period_action,
    verify_transition_operators,
)
from tools.floquet.genu import (
    GeneralisedUnitarySpec,
    angles_equivalent,
    build_exponential,
    check_conditions,
    decompose_canonical,
)
from tools.floquet.sequence import FloquetSequence, run_sequence, sweep_period_actions, validate

logger = logging.getLogger(__name__)

MAX_SWEEP_OUTCOMES = 16
EXIT_CODES = {"success": 0, "failed": 1, "error": 2}


def _canonical(value: Any) -> Any:
    """Plain JSON types with floats rounded to 13 significant digits."""
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, np.ndarray):
        return _canonical(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_canonical(float(value.real)), _canonical(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float("%.12e" % value)
    return value


def canonical_json(result: Dict[str, Any]) -> str:
    return json.dumps(_canonical(result), sort_keys=True, indent=2)


def write_report(path: str, result: Dict[str, Any]) -> None:
    """Write the canonical report, creating the parent directory if needed."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        f.write(canonical_json(result) + "\n")


def _load_json(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        raise PauliParseError("an --input file is required")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise PauliParseError(f"{path} is not valid JSON: {e}") from e
    except OSError as e:
        raise PauliParseError(f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise PauliParseError(f"{path} must contain a JSON object")
    return data


def _catalog_params(args: Dict[str, Any]) -> Dict[str, Any]:
    raw = args.get("params")
    if not raw:
        return {}
    try:
        params = json.loads(raw)
    except json.JSONDecodeError as e:
        raise PauliParseError(f"Invalid JSON params: {e}") from e
    if not isinstance(params, dict):
        raise PauliParseError("--params must be a JSON object")
    return params


def _pair_from_ref(ref: Dict[str, Any]) -> Tuple[StabiliserGroup, StabiliserGroup, Optional[Lattice], Optional[float]]:
    seq = catalog.build(ref["catalog"], **ref.get("params", {}))
    step = int(ref.get("step", 0))
    if not 0 <= step < seq.tau - 1:
        raise PauliParseError(f"{seq.name} has no transition {step}")
    return seq.isgs[step], seq.isgs[step + 1], seq.lattice, seq.l


def _pair_source(args: Dict[str, Any]) -> Tuple[StabiliserGroup, StabiliserGroup, Optional[Lattice], Optional[float], Dict[str, Any]]:
    """Two groups plus optional lattice and l, from a catalog entry or an input file."""
    if args.get("catalog"):
        ref = {"catalog": args["catalog"], "step": args.get("step") or 0, "params": _catalog_params(args)}
        return _pair_from_ref(ref) + ({},)
    data = _load_json(args.get("input"))
    try:
        if "pair_ref" in data:
            return _pair_from_ref(data["pair_ref"]) + (data,)
        source = data.get("pair", data)
        a = StabiliserGroup.from_dict(source["group_a"])
        b = StabiliserGroup.from_dict(source["group_b"])
    except KeyError as e:
        raise PauliParseError(f"missing field {e} in pair input") from e
    lattice = Lattice.from_dict(source["lattice"]) if source.get("lattice") else None
    l = source.get("l")
    return a, b, lattice, float(l) if l is not None else None, data


def _sequence_source(args: Dict[str, Any]) -> FloquetSequence:
    if args.get("catalog"):
        return catalog.build(args["catalog"], **_catalog_params(args))
    return FloquetSequence.from_dict(_load_json(args.get("input")))


def _outcome_source(config: RunConfig) -> OutcomeSource:
    if config.forced_outcomes is not None:
        return ForcedOutcomes(config.forced_outcomes)
    return SeededOutcomes(config.seed)


def verify_pair(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """Reversibility, locality (when a lattice is given) and the dense projector identities."""
    a, b, lattice, l, _ = _pair_source(args)
    verdict = check_reversible(a, b)
    result: Dict[str, Any] = {"pair": verdict.to_dict()}
    passed = verdict.reversible
    if verdict.reversible and lattice is not None and l is not None:
        locality = check_local_reversibility(verdict, lattice, l)
        result["locality"] = locality.to_dict()
        passed = passed and locality.passed
    if a.n <= MAX_DENSE_QUBITS:
        identities = verify_pair_identities(verdict, config.tolerance, config.threads)
        result["identities"] = identities.to_dict()
        passed = passed and identities.passed
    else:
        result["identities"] = {"skipped": True, "reason": f"n={a.n} exceeds {MAX_DENSE_QUBITS}"}
    return {"status": "success" if passed else "failed", "result": result}


def run(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """Execute a sequence once, or sweep every forced outcome stream with --sweep."""
    seq = _sequence_source(args)
    report = validate(seq)
    if not report.valid:
        return {"status": "failed", "result": {"validation": report.to_dict()}}
    if args.get("sweep"):
        total = seq.outcomes_per_period
        if total > MAX_SWEEP_OUTCOMES:
            raise PauliParseError(f"sweep over {total} outcomes exceeds the limit of {MAX_SWEEP_OUTCOMES}")
        sweep = sweep_period_actions(seq, exhaustive_streams(total), config.threads)
        return {"status": "success" if sweep.consistent else "failed",
                "result": {"sequence": seq.name, "sweep": sweep.to_dict()}}
    record = run_sequence(seq, _outcome_source(config))
    result = record.to_dict()
    if args.get("dense"):
        check = verify_period_action(seq, config.tolerance)
        result["dense_period"] = check.to_dict()
        return {"status": "success" if check.passed else "failed", "result": result}
    return {"status": "success", "result": result}


def check_locality(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    if args.get("catalog") or "isgs" in _load_json(args.get("input")):
        seq = _sequence_source(args)
        if seq.lattice is None or seq.l is None:
            raise PauliParseError("the sequence declares no lattice and l")
        reports = [check_local_reversibility(p, seq.lattice, seq.l) for p in seq.pairs]
    else:
        a, b, lattice, l, _ = _pair_source(args)
        if lattice is None or l is None:
            raise PauliParseError("the pair input declares no lattice and l")
        verdict = check_reversible(a, b)
        if not verdict.reversible:
            return {"status": "failed", "result": {"pair": verdict.to_dict()}}
        reports = [check_local_reversibility(verdict, lattice, l)]
    passed = all(r.passed for r in reports)
    return {"status": "success" if passed else "failed",
            "result": {"transitions": [r.to_dict() for r in reports]}}


def _genu_source(args: Dict[str, Any]):
    a, b, _, _, data = _pair_source(args)
    pair = check_reversible(a, b)
    if not pair.reversible:
        raise IrreversibleTransition(f"pair is not reversible (witness {pair.witness})", witness=pair.witness)
    if "matrix" in data:
        return pair, None, DenseOperator.from_dict(data["matrix"])
    spec = GeneralisedUnitarySpec.from_dict(data, pair)
    return pair, spec, build_exponential(spec)


def genu(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """genu check evaluates the conditions; genu decompose also recovers the canonical form."""
    pair, spec, unitary = _genu_source(args)
    report = check_conditions(pair, unitary, config.tolerance)
    result: Dict[str, Any] = {"conditions": report.to_dict()}
    if not report.passed:
        return {"status": "failed", "result": result}
    if args.get("genu_command") == "decompose":
        try:
            decomposed = decompose_canonical(pair, unitary, max(config.tolerance, 1e-8), report)
        except ReconstructionFailure as e:
            result["decomposition"] = {"error": str(e), "phase_table": e.phase_table, "residual": e.residual}
            return {"status": "failed", "result": result}
        summary = decomposed.to_dict()
        summary.pop("logical", None)
        result["decomposition"] = summary
        if spec is not None:
            result["angles_match"] = angles_equivalent(spec.terms, decomposed.terms, pair.n_m)
    return {"status": "success", "result": result}


def oracle_verify(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """Every dense identity for one pair, on a random code state for the state-level checks."""
    a, b, _, _, _ = _pair_source(args)
    pair = check_reversible(a, b)
    if not pair.reversible:
        return {"status": "failed", "result": {"pair": pair.to_dict()}}
    rng = np.random.default_rng(config.seed if config.seed is not None else 0)
    state = random_codespace_state(pair.group_a, rng)
    reports = [
        verify_pair_identities(pair, config.tolerance, config.threads),
        verify_transition_operators(pair, config.tolerance, config.threads),
        uniform_probability_check(pair, state, config.tolerance),
    ]
    for q in normaliser_logicals(pair.group_a).operators():
        reports.append(logical_expectation_check(pair, state, q, config.tolerance))
    passed = all(r.passed for r in reports)
    return {"status": "success" if passed else "failed",
            "result": {"checks": [r.to_dict() for r in reports]}}


def catalog_command(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    if args.get("catalog_command") == "export":
        name = args.get("name")
        seq = catalog.build(name, **_catalog_params(args))
        return {"status": "success", "result": {"sequence": seq.to_dict(),
                                                "validation": validate(seq).to_dict()}}
    return {"status": "success",
            "result": {"entries": [e.to_dict() for e in catalog.CATALOG.values()]}}


COMMANDS = {
    "verify-pair": verify_pair,
    "run": run,
    "check-locality": check_locality,
    "genu": genu,
    "oracle": oracle_verify,
    "catalog": catalog_command,
}


def execute(args: Dict[str, Any]) -> Dict[str, Any]:
    """Build the run configuration and dispatch; never raises."""
    try:
        if args.get("forced_outcomes") is not None and isinstance(args["forced_outcomes"], str):
            args = {**args, "forced_outcomes": parse_outcome_stream(args["forced_outcomes"])}
        config = RunConfig.from_args(args, ProfileManager())
        result = COMMANDS[args["command"]](args, config)
        if config.output:
            write_report(config.output, result)
        return result
    except IrreversibleTransition as e:
        return {"status": "failed", "error": str(e),
                "result": {"witness": str(e.witness) if e.witness is not None else None}}
    except (StabiliserError, ValueError, KeyError, OSError) as e:
        logger.error(f"{args.get('command')} failed: {e}")
        return {"status": "error", "error": str(e)}


def get_plugin_description() -> Dict[str, Any]:
    """Return structured command description for --describe."""
    source = [
        {"name": "input", "type": "string", "description": "JSON input file", "required": False, "default": None},
        {"name": "catalog", "type": "string", "description": "Catalog entry instead of an input file", "required": False, "default": None},
        {"name": "params", "type": "string", "description": "JSON object of catalog parameters", "required": False, "default": None},
    ]
    common = [
        {"name": "tol", "type": "number", "description": "Numerical tolerance", "required": False, "default": None},
        {"name": "threads", "type": "integer", "description": "Worker threads", "required": False, "default": None},
        {"name": "output", "type": "string", "description": "Write the report to this file", "required": False, "default": None},
        {"name": "profile", "type": "string", "description": "Run profile name", "required": False, "default": None},
    ]
    outcomes = [
        {"name": "seed", "type": "integer", "description": "Outcome seed (0 when no forced stream is given)", "required": False, "default": 0},
        {"name": "forced_outcomes", "type": "string", "description": "Forced outcome stream, e.g. '+-+' or '+1,-1'", "required": False, "default": None},
    ]
    return {
        "plugin": {
            "name": "floquet",
            "version": "0.1.0",
            "description": "Conjugate stabiliser group and Floquet code verification"
        },
        "commands": [
            {"name": "verify-pair", "description": "Check reversibility, locality and projector identities of a pair",
             "parameters": source + [{"name": "step", "type": "integer", "description": "Transition index for catalog entries", "required": False, "default": 0}] + common},
            {"name": "run", "description": "Execute a Floquet sequence and report the logical action",
             "parameters": source + outcomes + common + [{"name": "sweep", "type": "boolean", "description": "Sweep every forced outcome stream", "required": False, "default": False},
                                                                          {"name": "dense", "type": "boolean", "description": "Check the composed transition unitaries against the logical action", "required": False, "default": False}]},
            {"name": "check-locality", "description": "Check l-local reversibility of a pair or every transition of a sequence",
             "parameters": source + common},
            {"name": "genu check", "description": "Evaluate the generalised-unitary conditions",
             "parameters": source + common},
            {"name": "genu decompose", "description": "Check conditions and recover the canonical form",
             "parameters": source + common},
            {"name": "oracle verify", "description": "Run every dense identity check on a pair",
             "parameters": source + outcomes + common},
            {"name": "catalog list", "description": "List catalog entries", "parameters": []},
            {"name": "catalog export", "description": "Export a catalog entry as sequence JSON",
             "parameters": [{"name": "name", "type": "string", "description": "Catalog entry", "required": True, "default": None},
                            {"name": "params", "type": "string", "description": "JSON object of parameters; honeycomb takes lx (a positive multiple of 3) and ly (even, at least 2)", "required": False, "default": None}]},
        ]
    }


def main():
    parser = argparse.ArgumentParser(
        description="Conjugate stabiliser group and Floquet code verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Available commands:
  verify-pair      Reversibility, locality and dense projector identities
  run              Execute a sequence (--sweep for every outcome stream, --dense for the period unitary)
  check-locality   l-local reversibility of a pair or sequence
  genu check       Generalised-unitary conditions
  genu decompose   Conditions plus canonical-form decomposition
  oracle verify    Every dense identity on one pair
  catalog list     Built-in sequences
  catalog export   Sequence JSON for a catalog entry

Examples:
  python cli.py verify-pair --catalog single_qubit_zx
  python cli.py run --catalog two_qubit_logical --seed 0
  python cli.py run --catalog honeycomb --params '{"lx": 3, "ly": 2}' --sweep --threads 4
  python cli.py genu decompose --input spec.json --tol 1e-8
        """
    )

    parser.add_argument("--describe", action="store_true",
                        help="Output command description in JSON format")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    def add_source_args(parser, outcomes=False):
        """Input selection plus the flags shared by every check."""
        parser.add_argument("--input", help="JSON input file")
        parser.add_argument("--catalog", help="Catalog entry to use instead of --input")
        parser.add_argument("--params", help="JSON object of catalog parameters")
        parser.add_argument("--step", type=int, default=0, help="Transition index within a catalog sequence")
        parser.add_argument("--tol", type=float, help="Numerical tolerance (default from profile or 1e-10)")
        parser.add_argument("--threads", type=int, help="Worker threads (default from profile or 1)")
        parser.add_argument("--output", help="Also write the report to this file")
        parser.add_argument("--profile", help="Run profile name (from ~/.floquet-conjugacy/profiles.json)")
        if outcomes:
            group = parser.add_mutually_exclusive_group()
            group.add_argument("--seed", type=int, help="Seed for random outcomes")
            group.add_argument("--forced-outcomes", dest="forced_outcomes",
                               help="Forced outcome stream, e.g. '+-+' or '+1,-1'")

    add_source_args(subparsers.add_parser("verify-pair", help="Verify a conjugate pair"))

    run_parser = subparsers.add_parser("run", help="Execute a Floquet sequence")
    add_source_args(run_parser, outcomes=True)
    run_parser.add_argument("--sweep", action="store_true", help="Sweep every forced outcome stream")
    run_parser.add_argument("--dense", action="store_true",
                            help="Compare the composed transition unitaries with the logical action")

    add_source_args(subparsers.add_parser("check-locality", help="Check l-local reversibility"))

    genu_parser = subparsers.add_parser("genu", help="Generalised logical unitaries")
    genu_sub = genu_parser.add_subparsers(dest="genu_command", help="genu commands")
    add_source_args(genu_sub.add_parser("check", help="Evaluate the conditions"))
    add_source_args(genu_sub.add_parser("decompose", help="Recover the canonical form"))

    oracle_parser = subparsers.add_parser("oracle", help="Dense oracle checks")
    oracle_sub = oracle_parser.add_subparsers(dest="oracle_command", help="oracle commands")
    add_source_args(oracle_sub.add_parser("verify", help="Every dense identity on one pair"), outcomes=True)

    catalog_parser = subparsers.add_parser("catalog", help="Built-in sequences")
    catalog_sub = catalog_parser.add_subparsers(dest="catalog_command", help="catalog commands")
    catalog_sub.add_parser("list", help="List entries")
    export_parser = catalog_sub.add_parser("export", help="Export an entry as sequence JSON")
    export_parser.add_argument("--name", required=True, help="Catalog entry name")
    export_parser.add_argument("--params", help="JSON object of parameters")
    export_parser.add_argument("--output", help="Also write the report to this file")

    args = parser.parse_args()

    logging.basicConfig(
        level=os.environ.get("FLOQUET_LOG_LEVEL", "WARNING").upper(),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )

    if args.describe:
        print(json.dumps(get_plugin_description(), indent=2))
        sys.exit(0)

    if not args.command:
        parser.print_help()
        sys.exit(2)

    args_dict = vars(args)
    nested = {"genu": "genu_command", "oracle": "oracle_command", "catalog": "catalog_command"}
    if args.command in nested and not args_dict.get(nested[args.command]):
        parser.print_help()
        sys.exit(2)

    result = execute(args_dict)
    print(canonical_json(result))
    sys.exit(EXIT_CODES.get(result.get("status"), 2))


if __name__ == "__main__":
    main()
