"""Command-line front end.

Subcommands: ``construct`` (build and certify a state), ``verify`` (replay
every stored invariant plus randomized ladder attacks), ``eval`` (one-off
functional and norm evaluations), ``oracle`` (run a single adversary).

Exit codes are a stable contract: 0 success, 2 construction failure,
3 verification violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .construction import (
    ConstructionError,
    fn_family,
    functional_of_state,
    levels_csv_rows,
    make_case_a_inputs,
    make_case_c_inputs,
    run_construction,
    state_from_json,
    state_to_json,
    static_state_checks,
    verify_chain,
)
from .oracles import (
    chain_fuzzer,
    lemma5_adversary,
    min_crosspolytope_norm,
    quasi_constant_adversary,
)
from .quasilinear import (
    Ribe,
    SplitMap,
    WeightedRibe,
    functional_from_json,
    normalize_constant,
    nonsplit_witness,
    ribe_eval,
    weighted_ribe_eval,
)
from .seqspace import FinSeq, james_norm, vector_from_json
from .sumsets import base_axioms_check
from .twisted import TwistedVec, ball_radius, quasi_norm

EXIT_OK = 0
EXIT_CONSTRUCTION = 2
EXIT_VIOLATION = 3
EXIT_USAGE = 64


@dataclass
class RunConfig:
    """The knobs a construction run is keyed on; embedded in state.json so a
    fixed seed reproduces byte-identical artifacts."""

    case: str
    depth: int
    generators: int
    seed: int
    tolerance: float = 1e-9
    out: str = "out"

    def meta(self) -> dict:
        return {"case": self.case, "depth": self.depth, "generators": self.generators, "seed": self.seed}


class Parser(argparse.ArgumentParser):
    """argparse flavoured to exit with the usage code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        sys.exit(EXIT_USAGE)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TWISTLAB_THREADS", "1")))
    except ValueError:
        return 1


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_json_arg(value: str):
    """Accept inline JSON or a path to a JSON file."""
    p = Path(value)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(value)


def _usage_fail(message: str) -> int:
    sys.stderr.write("error: %s\n" % message)
    return EXIT_USAGE


# --- construct -----------------------------------------------------------------


def cmd_construct(args) -> int:
    if args.depth < 1:
        return _usage_fail("--depth must be at least 1")
    if args.generators < 1:
        return _usage_fail("--generators must be at least 1")
    config = RunConfig(args.case, args.depth, args.generators, args.seed, out=args.out)
    out = Path(config.out)
    meta = config.meta()
    split_map = None
    if args.case == "a":
        F = normalize_constant(Ribe())
        xs, ds = make_case_a_inputs(args.depth, args.generators)
    elif args.case == "c":
        xs, ds, weights = make_case_c_inputs(args.depth, args.generators)
        F = normalize_constant(WeightedRibe(weights, Fraction(2)))
    elif args.case == "b":
        return _usage_fail(
            "the split basis for this space is known to exist but no finite recipe is available; "
            "supply one explicitly via --case custom with --functional/--xs/--ds/--split-map"
        )
    else:
        if not (args.functional and args.xs and args.ds):
            return _usage_fail("--case custom needs --functional, --xs and --ds")
        try:
            F = normalize_constant(functional_from_json(_load_json_arg(args.functional)))
            xs = [vector_from_json(v) for v in _load_json_arg(args.xs)]
            ds = [vector_from_json(v) for v in _load_json_arg(args.ds)]
            if args.split_map:
                sm = _load_json_arg(args.split_map)
                split_map = SplitMap(
                    [vector_from_json(v) for v in sm["basis"]],
                    [Fraction(v) for v in sm["values"]],
                    sm.get("defect_bound", 0.0),
                )
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            return _usage_fail("cannot parse custom inputs: %s" % exc)
    try:
        state = run_construction(F, xs, ds, args.depth, split_map=split_map, meta=meta)
    except (ConstructionError, ValueError) as exc:
        sys.stderr.write("construction failed: %s\n" % exc)
        return EXIT_CONSTRUCTION
    _write_atomic(out / "state.json", _dump_json(state_to_json(state)))
    buf = io.StringIO()
    writer = csv.writer(buf)
    for row in levels_csv_rows(state):
        writer.writerow(row)
    _write_atomic(out / "levels.csv", buf.getvalue())
    for row in levels_csv_rows(state):
        print("  ".join(str(v) for v in row))
    print("state written to %s" % (out / "state.json"))
    return EXIT_OK


# --- verify --------------------------------------------------------------------


def _load_state(path):
    try:
        return state_from_json(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise SystemExit(_usage_fail("cannot load state %s: %s" % (path, exc)))


def cmd_verify(args) -> int:
    state = _load_state(args.state)
    F = functional_of_state(state)
    out = Path(args.out) if args.out else Path(args.state).parent
    entries = []
    violations = []

    for step in static_state_checks(state, F):
        entries.append({"source": "static", **step.to_json()})
        if not step.passed:
            violations.append("static:%s level %s" % (step.name, step.level))

    radii = [ball_radius(n) for n in range(1, state.depth + 2)]
    axioms = base_axioms_check(radii, fn_family(state), state.depth + 1)
    for chk in axioms.checks:
        entries.append({"source": "base_axioms", "name": chk.name, "level": chk.level, "passed": chk.passed, "detail": chk.detail})
        if not chk.passed:
            violations.append("base_axioms:%s level %s" % (chk.name, chk.level))

    for n in range(1, state.depth + 1):
        rep = lemma5_adversary(state.level_z(n), 2 ** n, state.c[n], space=state.space, seed=args.seed)
        entries.append({"source": "level_mass", "level": n, **rep.to_json()})
        if rep.best_violation is None or rep.best_violation >= 0:
            violations.append("level_mass: level %d mass %s vs budget %s" % (n, rep.best_value, rep.bound))

    min_margin = None
    if args.trials > 0:
        fuzz = chain_fuzzer(state, F, trials=args.trials, seed=args.seed)
        entries.append({"source": "chain_fuzzer", **fuzz.to_json()})
        if fuzz.best_violation is not None and fuzz.best_violation >= 0:
            violations.append("chain: %s" % fuzz.notes)
        min_margin = -fuzz.best_violation if fuzz.best_violation is not None else None
        if min_margin is not None and min_margin < args.tolerance:
            violations.append("chain: min margin %g below tolerance %g" % (min_margin, args.tolerance))
        witness = fuzz.witness or {}
        if witness.get("kind", "").startswith("chain"):
            # full transcript of the thinnest-margin replay, for inspection
            from .sumsets import SumCertificate

            transcript = verify_chain(state, F, SumCertificate.from_json(witness["certificate"]))
            _write_atomic(out / "transcript.json", _dump_json(transcript.to_json()))

    report = {
        "state": str(args.state),
        "trials": args.trials,
        "seed": args.seed,
        "threads": _threads(),
        "tolerance": args.tolerance,
        "violations": violations,
        "min_chain_margin": min_margin,
        "entries": entries,
    }
    _write_atomic(out / "verify-report.json", _dump_json(report))
    if min_margin is not None:
        print("min ladder margin over %d trials: %g" % (args.trials, min_margin))
    if violations:
        for v in violations:
            print("VIOLATION %s" % v)
        print("report: %s" % (out / "verify-report.json"))
        return EXIT_VIOLATION
    print("all checks passed; report: %s" % (out / "verify-report.json"))
    return EXIT_OK


# --- eval ----------------------------------------------------------------------


def cmd_eval(args) -> int:
    try:
        if args.what == "ribe":
            value = ribe_eval(FinSeq.from_json(_load_json_arg(args.x)))
        elif args.what == "james-norm":
            value = james_norm(FinSeq.from_json(_load_json_arg(args.x)))
        elif args.what == "quasi-norm":
            F = functional_from_json(_load_json_arg(args.functional)) if args.functional else Ribe()
            value = quasi_norm(F, TwistedVec(float(args.r), vector_from_json(_load_json_arg(args.x))))
        elif args.what == "weighted-ribe":
            weights = {int(n): Fraction(c) for n, c in _load_json_arg(args.weights).items()}
            value = weighted_ribe_eval(vector_from_json(_load_json_arg(args.x)), weights, Fraction(args.p))
        else:  # nonsplit
            vec, value = nonsplit_witness(args.n, Fraction(args.cn))
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        return _usage_fail("cannot evaluate: %s" % exc)
    print("%.15g" % value)
    return EXIT_OK


# --- oracle --------------------------------------------------------------------


def cmd_oracle(args) -> int:
    out = Path(args.out) if args.out else Path(".")
    if args.target == "quasi-constant":
        try:
            F = functional_from_json(_load_json_arg(args.functional)) if args.functional else Ribe()
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            return _usage_fail("cannot parse functional: %s" % exc)
        rep = quasi_constant_adversary(F, trials=int(args.trials), seed=args.seed)
    elif args.target == "lemma5":
        if not args.state:
            return _usage_fail("oracle lemma5 needs --state")
        state = _load_state(args.state)
        n = args.level
        if not 1 <= n <= state.depth:
            return _usage_fail("--level out of range")
        rep = lemma5_adversary(state.level_z(n), 2 ** n, state.c[n], space=state.space, seed=args.seed)
    elif args.target == "chain":
        if not args.state:
            return _usage_fail("oracle chain needs --state")
        state = _load_state(args.state)
        rep = chain_fuzzer(state, functional_of_state(state), trials=int(args.budget), seed=args.seed)
    else:  # crosspolytope
        if not args.ys:
            return _usage_fail("oracle crosspolytope needs --ys")
        try:
            ys = [vector_from_json(v) for v in _load_json_arg(args.ys)]
        except (ValueError, json.JSONDecodeError) as exc:
            return _usage_fail("cannot parse --ys: %s" % exc)
        res = min_crosspolytope_norm(ys, seed=args.seed)
        rep_obj = {
            "target": "crosspolytope",
            "best_violation": None,
            "best_value": float(res.value),
            "bound": None,
            "witness": {"minimizer": [str(a) for a in res.minimizer]},
            "trials": 1,
            "seed": args.seed,
            "method": res.method,
            "notes": "minimum of the combined norm over unit coefficient mass",
        }
        _write_atomic(out / "oracle-report.json", _dump_json(rep_obj))
        print("min %.15g (%s)" % (float(res.value), res.method))
        return EXIT_OK
    _write_atomic(out / "oracle-report.json", _dump_json(rep.to_json()))
    print(
        "%s: best value %s against bound %s (violation %s, %s)"
        % (rep.target, rep.best_value, rep.bound, rep.best_violation, rep.method)
    )
    return EXIT_OK if (rep.best_violation is None or rep.best_violation < 0) else EXIT_VIOLATION


# --- wiring ----------------------------------------------------------------------


def build_parser() -> Parser:
    parser = Parser(prog="twistlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    c = sub.add_parser("construct", help="build and certify a construction state")
    c.add_argument("--case", choices=["a", "b", "c", "custom"], default="a")
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--generators", type=int, default=3)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="out")
    c.add_argument("--functional", help="functional descriptor (JSON or path), custom case")
    c.add_argument("--xs", help="kernel sequence (JSON list or path), custom case")
    c.add_argument("--ds", help="generating family (JSON list or path), custom case")
    c.add_argument("--split-map", dest="split_map", help="splitting map (JSON or path), custom case")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="replay all invariants of a stored state")
    v.add_argument("--state", required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.add_argument("--tolerance", type=float, default=1e-9, help="interior margin for strict inequalities (reporting only)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a formula once and print 15 significant digits")
    e.add_argument("what", choices=["ribe", "quasi-norm", "james-norm", "weighted-ribe", "nonsplit"])
    e.add_argument("--x", help="vector JSON or path")
    e.add_argument("--r", type=float, default=0.0)
    e.add_argument("--functional")
    e.add_argument("--weights")
    e.add_argument("--p", default="2")
    e.add_argument("--n", type=int, default=1)
    e.add_argument("--cn", default="1")
    e.set_defaults(func=cmd_eval)

    o = sub.add_parser("oracle", help="run one adversary and write oracle-report.json")
    o.add_argument("target", choices=["quasi-constant", "lemma5", "chain", "crosspolytope"])
    o.add_argument("--state")
    o.add_argument("--level", type=int, default=1)
    o.add_argument("--trials", type=float, default=1000)
    o.add_argument("--budget", type=float, default=100)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--functional")
    o.add_argument("--ys")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
