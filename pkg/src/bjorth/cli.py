"""Command-line interface.

Exit codes:
    0  HOLDS (or success)
    1  FAILS
    2  BORDERLINE
    3  parse or configuration error
    4  dimension mismatch
    5  tolerance error or a verdict whose certificate does not replay
    6  generator precondition violated
    7  property violation in survey / verify-paper, or interrupted run
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__
from .constructions import PROFILES, make_prime_pair, make_sqc_pair
from .errors import (
    AlgebraMismatch,
    CommutativeAlgebra,
    ConfigError,
    NotEnoughBlocks,
    ParseError,
    ShapeError,
    SpaceMismatch,
    ToleranceError,
)
from .interchange import ProblemFile, parse_algebra_spec
from .module import ModuleSpace
from .numrange import Answer
from .orthogonality import Relation, check, replay_certificate, replay_witness
from .survey import EnsembleConfig, default_family, run_equivalence_survey, run_implication_survey
from .tolerances import DEFAULT

EXIT_HOLDS, EXIT_FAILS, EXIT_BORDERLINE = 0, 1, 2
EXIT_PARSE, EXIT_DIMENSION, EXIT_TOLERANCE, EXIT_PRECONDITION, EXIT_VIOLATION = 3, 4, 5, 6, 7
ANSWER_EXIT = {Answer.HOLDS: EXIT_HOLDS, Answer.FAILS: EXIT_FAILS, Answer.BORDERLINE: EXIT_BORDERLINE}


def default_seed() -> int:
    raw = os.environ.get("BJO_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"BJO_SEED must be an integer, got {raw!r}") from None


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _tolerances(tol):
    return DEFAULT if tol is None else DEFAULT.with_tol(tol)


def _replay_ok(verdict, x, y) -> tuple[bool, dict]:
    t = verdict.tolerances
    if verdict.holds and verdict.witness is not None:
        r = replay_witness(verdict, x, y)
        bound = 10 * max(t.eps_zero, t.eps_eig)
        return r["attain"] <= bound and r["zero"] <= bound, r
    if verdict.fails and verdict.relation is not Relation.QUASI:
        gain = replay_certificate(verdict.failure_certificate, x, y)
        return gain > 0, {"norm_decrease": gain}
    return True, {}


def _print_verdict(verdict, replay, as_json, out=None):
    out = out or sys.stdout
    if as_json:
        d = verdict.to_dict()
        d["replay"] = replay
        out.write(json.dumps(d, indent=2, sort_keys=True) + "\n")
        return
    lines = [f"relation: {verdict.relation.value}", f"answer: {verdict.answer.value}",
             f"method: {verdict.method}", f"margin: {verdict.margin:.3e}"]
    if verdict.witness is not None:
        lines.append("witness: " + json.dumps(verdict.witness.to_dict()))
    if verdict.failure_certificate is not None:
        lines.append("certificate: " + json.dumps(verdict.failure_certificate.to_dict()))
    if replay:
        lines.append("replay: " + json.dumps(replay, sort_keys=True))
    lines.append("tolerances: " + json.dumps(verdict.tolerances.as_dict(), sort_keys=True))
    out.write("\n".join(lines) + "\n")


def cmd_check(args, force_witness=False) -> int:
    problem = ProblemFile.read(args.file)
    tol = _tolerances(args.tol)
    verdict = check(args.relation, problem.x, problem.y, tol)
    ok, replay = _replay_ok(verdict, problem.x, problem.y)
    if force_witness and verdict.holds and verdict.witness is None:
        ok = False
    _print_verdict(verdict, replay, args.json)
    if not ok:
        _err("certificate did not replay within tolerance")
        return EXIT_TOLERANCE
    return ANSWER_EXIT[verdict.answer]


def cmd_witness(args) -> int:
    return cmd_check(args, force_witness=True)


def _space_from_args(algebra, rows):
    blocks = parse_algebra_spec(algebra)
    r = None if rows is None else parse_algebra_spec(rows)
    if r is not None and len(r) != len(blocks):
        raise ShapeError(f"--rows has {len(r)} entries for {len(blocks)} blocks")
    return ModuleSpace.of(blocks, r)


def cmd_counterexample(args) -> int:
    space = _space_from_args(args.algebra, args.rows)
    seed = default_seed() if args.seed is None else args.seed
    try:
        if args.kind == "sqc":
            ce = make_sqc_pair(space, block=args.block, profile=args.profile, rng=seed, case=args.case)
            x, y = ce.x_prime, ce.y_prime
        else:
            blocks = None if args.blocks is None else tuple(parse_algebra_spec_zero(args.blocks))
            ce = make_prime_pair(space, blocks, rng=seed if args.random else None)
            x, y = ce.u_plus, ce.u_minus
    except CommutativeAlgebra as exc:
        _err(f"no quasi-strong/strong separating pair: {exc}")
        return EXIT_PRECONDITION
    except NotEnoughBlocks as exc:
        _err(f"no BJ/quasi-strong separating pair: {exc}")
        return EXIT_PRECONDITION
    problem = ProblemFile(space, x, y, {"certificates": ce.certificates(), "seed": seed})
    text = problem.dumps() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def parse_algebra_spec_zero(text):
    try:
        out = [int(t) for t in text.split(",")]
    except ValueError:
        raise ParseError(f"bad block pair {text!r}; expected e.g. \"0,1\"") from None
    if len(out) != 2:
        raise ParseError("--blocks needs two indices")
    return out


def _parse_spaces(text):
    spaces = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        blocks, _, rows = item.partition("/")
        spaces.append(_space_from_args(blocks, rows or None))
    if not spaces:
        raise ConfigError("--spaces is empty")
    return spaces


def _survey_config(args) -> EnsembleConfig:
    d = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
        cfg = EnsembleConfig.from_dict(d)
    else:
        cfg = EnsembleConfig(default_family(), 200, default_seed())
    over = {}
    if args.spaces:
        over["spaces"] = _parse_spaces(args.spaces)
    if args.samples is not None:
        over["samples_per_space"] = args.samples
    if args.enriched is not None:
        over["enriched_per_space"] = args.enriched
    if args.seed is not None:
        over["seed"] = args.seed
    if args.kinds:
        over["element_kinds"] = tuple(k.strip() for k in args.kinds.split(","))
    if args.tol is not None:
        over["tolerances"] = cfg.tolerances.with_tol(args.tol)
    if over:
        fields = {"spaces": cfg.spaces, "samples_per_space": cfg.samples_per_space, "seed": cfg.seed,
                  "element_kinds": cfg.element_kinds, "tolerances": cfg.tolerances,
                  "enriched_per_space": cfg.enriched_per_space}
        fields.update(over)
        cfg = EnsembleConfig(**fields)
    return cfg


def cmd_survey(args) -> int:
    cfg = _survey_config(args)
    imp = run_implication_survey(cfg)
    eq = run_equivalence_survey(cfg)
    doc = {"implication": imp.to_dict(), "equivalence": eq.to_dict()}
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.csv:
        # one table: implication rows leave the equivalence-only columns empty
        eq_rows, imp_rows = eq.csv_rows(), imp.csv_rows()
        width = len(eq_rows[0])
        rows = [eq_rows[0]] + [r + [""] * (width - len(r)) for r in imp_rows[1:]] + eq_rows[1:]
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh).writerows(rows)
    for rep in (imp, eq):
        for s in rep.spaces:
            line = (f"{rep.survey:<11} {s['space']['name']:<22} certified={s['certified']:<6} "
                    f"borderline={s['borderline']:<4} chain_violations={s['chain_violations']}")
            if "flags" in s:
                flags = " ".join(f"{k}={'Y' if v else 'N'}" for k, v in s["flags"].items())
                line += f" {flags} match={'Y' if s['pattern_match'] else 'N'}"
            print(line)
    violations = imp.violations + eq.violations
    if violations:
        for v in violations:
            _err("property violation: " + json.dumps(v, sort_keys=True)[:2000])
        _err(f"reproduce with --seed {cfg.seed}")
        return EXIT_VIOLATION
    return 0


def cmd_verify_paper(args) -> int:
    from . import verify

    seed = default_seed() if args.seed is None else args.seed
    started = time.monotonic()

    def progress(n, res):
        mark = "PASS" if res["passed"] else "FAIL"
        print(f"  criterion {n:>2} {mark}  ({time.monotonic() - started:.0f}s)", file=sys.stderr, flush=True)

    try:
        report = verify.run_suite(seed, args.scale, progress=progress)
    except KeyboardInterrupt as exc:
        partial = getattr(exc, "partial_report", None)
        if partial is not None:
            print(verify.table(partial))
        _err(f"interrupted; reproduce with --seed {seed}")
        return EXIT_VIOLATION
    if args.determinism:
        second = verify.run_suite(seed, args.scale)
        entry = verify.determinism_entry(verify.dumps(report), verify.dumps(second))
        report["criteria"].append(entry)
        report["passed"] = report["passed"] and entry["passed"]
    text = verify.dumps(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(verify.table(report))
    if not args.determinism:
        print("10  determinism              SKIP    rerun with --determinism to compare two full runs")
    if not report["passed"]:
        _err(f"acceptance failures; reproduce with --seed {seed}")
        return EXIT_VIOLATION
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bjorth", description="Certified Birkhoff-James orthogonality checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn in (("check", cmd_check), ("witness", cmd_witness)):
        c = sub.add_parser(name, help="decide a relation for the pair in a problem file")
        c.add_argument("relation", choices=[r.value for r in Relation])
        c.add_argument("file")
        c.add_argument("--tol", type=float, default=None, help="absolute zero tolerance on unit-scale values")
        c.add_argument("--json", action="store_true")
        c.set_defaults(func=fn)

    c = sub.add_parser("counterexample", help="write a separating pair with its certificates")
    c.add_argument("kind", choices=["sqc", "prime"])
    c.add_argument("--algebra", required=True, help='block sizes, e.g. "1,2"')
    c.add_argument("--rows", default=None, help="module row sizes (default: the algebra itself)")
    c.add_argument("--profile", choices=PROFILES, default="projection")
    c.add_argument("--case", choices=["I", "II", "III"], default=None)
    c.add_argument("--block", type=int, default=None)
    c.add_argument("--blocks", default=None, help='two block indices for prime, e.g. "0,1"')
    c.add_argument("--random", action="store_true", help="random (seeded) elements for prime")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_counterexample)

    c = sub.add_parser("survey", help="implication and equivalence surveys")
    c.add_argument("--config", default=None)
    c.add_argument("--spaces", default=None, help='e.g. "1,1;2;2/3" (blocks[/rows], ";"-separated)')
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--enriched", type=int, default=None)
    c.add_argument("--kinds", default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--tol", type=float, default=None)
    c.add_argument("--out", default=None)
    c.add_argument("--csv", default=None)
    c.set_defaults(func=cmd_survey)

    c = sub.add_parser("verify-paper", help="run the acceptance suite")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--scale", type=float, default=1.0, help="sample-count multiplier (1.0 = full)")
    c.add_argument("--determinism", action="store_true", help="run twice and compare report bytes")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_verify_paper)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ToleranceError as exc:
        _err(str(exc))
        return EXIT_TOLERANCE
    except (ShapeError, SpaceMismatch, AlgebraMismatch) as exc:
        _err(f"dimension mismatch: {exc}")
        return EXIT_DIMENSION
    except (ParseError, ConfigError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    except OSError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except KeyboardInterrupt:
        _err("interrupted")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
