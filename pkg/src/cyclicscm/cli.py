"""Command-line interface.

Subcommands: check, solve, dsep, ci, prob, audit, dynamics, mine, fixture.
Models are named either by built-in fixture name or by file path.  Exit
codes: 0 success, 1 negative finding where a flag requests it
(``audit --fail-on-violation``), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .audit import MinerConfig, audit_soundness, mine, violations
from .dist import UndefinedConditionalError, ci_holds, prob
from .dynamics import Schedule, find_valid_schedule, schedule_converges
from .fixtures import fixture, fixture_names
from .graphs import SepQuery, d_separated
from .modelfile import ModelValidationError, ParseError, parse_model, serialize_model
from .scm import (
    ModelTooLargeError,
    NonUniqueModelError,
    Scm,
    check_uniqueness,
    consistent_solutions,
    induced_joint,
)


def load_model(spec: str) -> Scm:
    if spec in fixture_names():
        return fixture(spec)
    path = Path(spec)
    if path.exists():
        return parse_model(path.read_text())
    raise ValueError(
        f"no fixture or model file named {spec!r}; fixtures: {', '.join(fixture_names())}"
    )


def _ids(scm: Scm, text: str | None) -> frozenset[int]:
    if not text:
        return frozenset()
    return frozenset(scm.index(name.strip()) for name in text.split(",") if name.strip())


def _names(scm: Scm, ids) -> list[str]:
    return [scm.names[i] for i in sorted(ids)]


def _parse_bindings(text: str | None) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, eq, val = part.partition("=")
        if not eq or not val.strip().isdigit():
            raise ValueError(f"expected NAME=VALUE, got {part!r}")
        out[name.strip()] = int(val.strip())
    return out


def _state_str(scm: Scm, x) -> str:
    return " ".join(f"{scm.names[i]}={x[i]}" for i in range(scm.n))


def _noise_str(scm: Scm, u) -> str:
    return " ".join(f"{scm.variables[i].noise.name}={u[i]}" for i in range(scm.n))


def _query_facts(scm: Scm, q: SepQuery) -> dict:
    return {"a": _names(scm, q.a), "b": _names(scm, q.b), "c": _names(scm, q.c)}


def _emit(args, facts: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(facts, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- subcommand handlers ---------------------------------------------------


def _cmd_check(args) -> int:
    scm = load_model(args.model)
    report = check_uniqueness(scm)
    facts = {"command": "check", "model": scm.name, "unique": report.unique}
    lines = [f"unique: {str(report.unique).lower()}"]
    if not report.unique:
        facts["witness_noise"] = _noise_str(scm, report.witness_u)
        facts["solution_count"] = report.solution_count
        facts["solutions"] = [_state_str(scm, x) for x in report.solutions]
        lines.append(f"witness noise: {facts['witness_noise']}")
        lines.append(f"solution count: {report.solution_count}")
        lines.extend(f"solution: {s}" for s in facts["solutions"])
    _emit(args, facts, lines)
    return 0


def _cmd_solve(args) -> int:
    scm = load_model(args.model)
    bindings = _parse_bindings(args.u)
    noise_names = {scm.variables[i].noise.name: i for i in range(scm.n)}
    u = [0] * scm.n
    for name, val in bindings.items():
        if name not in noise_names:
            raise ValueError(f"unknown disturbance {name!r}")
        u[noise_names[name]] = val
    defaulted = [
        scm.variables[i].noise.name
        for i in range(scm.n)
        if scm.variables[i].noise.name not in bindings
    ]
    sols = consistent_solutions(scm, tuple(u))
    facts = {
        "command": "solve",
        "model": scm.name,
        "noise": _noise_str(scm, u),
        "defaulted": defaulted,
        "solution_count": len(sols),
        "solutions": [_state_str(scm, x) for x in sols],
    }
    lines = [f"note: {n} unspecified, defaulting to 0" for n in defaulted]
    lines.append(f"noise: {facts['noise']}")
    lines.append(f"solution count: {len(sols)}")
    lines.extend(f"solution: {s}" for s in facts["solutions"])
    _emit(args, facts, lines)
    return 0


def _cmd_dsep(args) -> int:
    scm = load_model(args.model)
    q = SepQuery(_ids(scm, args.a), _ids(scm, args.b), _ids(scm, args.c))
    result = d_separated(scm.graph, q)
    facts = {"command": "dsep", "model": scm.name, **_query_facts(scm, q), "d_separated": result}
    _emit(args, facts, [f"d-separated: {str(result).lower()}"])
    return 0


def _cmd_ci(args) -> int:
    scm = load_model(args.model)
    q = SepQuery(_ids(scm, args.a), _ids(scm, args.b), _ids(scm, args.c))
    result = ci_holds(induced_joint(scm), q)
    facts = {"command": "ci", "model": scm.name, **_query_facts(scm, q), "independent": result}
    _emit(args, facts, [f"independent: {str(result).lower()}"])
    return 0


def _cmd_prob(args) -> int:
    scm = load_model(args.model)
    jd = induced_joint(scm)
    event = {scm.index(n): v for n, v in _parse_bindings(args.event).items()}
    given = {scm.index(n): v for n, v in _parse_bindings(args.given).items()}
    value = prob(jd, event, given)
    facts = {
        "command": "prob",
        "model": scm.name,
        "event": {scm.names[i]: v for i, v in sorted(event.items())},
        "given": {scm.names[i]: v for i, v in sorted(given.items())},
        "probability": str(value),
    }
    _emit(args, facts, [f"probability: {value}"])
    return 0


def _cmd_audit(args) -> int:
    scm = load_model(args.model)
    records = audit_soundness(scm, args.max_cond, args.max_set)
    bad = violations(records)
    facts = {
        "command": "audit",
        "model": scm.name,
        "max_cond": args.max_cond,
        "queries": len(records),
        "violations": [_query_facts(scm, r.query) for r in bad],
    }
    lines = []
    for r in bad:
        f = _query_facts(scm, r.query)
        lines.append(
            f"violation: a={','.join(f['a'])} b={','.join(f['b'])} c={','.join(f['c']) or '-'}"
        )
    lines.append(f"queries: {len(records)}")
    lines.append(f"violations: {len(bad)}")
    _emit(args, facts, lines)
    if args.fail_on_violation and bad:
        return 1
    return 0


def _parse_schedule(scm: Scm, text: str) -> Schedule:
    if text.strip().lower() == "simultaneous":
        return Schedule.simultaneous()
    order = [scm.index(name.strip()) for name in text.split(",") if name.strip()]
    return Schedule.sequential(order)


def _cmd_dynamics(args) -> int:
    scm = load_model(args.model)
    if args.search == (args.schedule is not None):
        raise ValueError("pass exactly one of --schedule or --search")
    if args.schedule is not None:
        sched = _parse_schedule(scm, args.schedule)
        report = schedule_converges(scm, sched)
        facts = {
            "command": "dynamics",
            "model": scm.name,
            "schedule": sched.describe(scm.names),
            "converges": report.converges,
        }
        lines = [
            f"schedule: {facts['schedule']}",
            f"converges: {str(report.converges).lower()}",
        ]
        if not report.converges:
            facts["witness_noise"] = _noise_str(scm, report.witness_u)
            facts["witness_start"] = _state_str(scm, report.witness_x0)
            facts["cycle"] = [_state_str(scm, s) for s in report.cycle]
            lines.append(f"witness noise: {facts['witness_noise']}")
            lines.append(f"witness start: {facts['witness_start']}")
            lines.extend(f"cycle state: {s}" for s in facts["cycle"])
        _emit(args, facts, lines)
        return 0
    found = find_valid_schedule(scm, sample_count=args.sample, seed=args.seed)
    exhaustive = args.sample is None
    facts = {
        "command": "dynamics",
        "model": scm.name,
        "search": True,
        "exhaustive": exhaustive,
        "found": found is not None,
        "schedule": found.describe(scm.names) if found else None,
    }
    if found is not None:
        lines = [f"valid schedule: {facts['schedule']}"]
    elif exhaustive:
        lines = ["no valid schedule found"]
    else:
        lines = ["no valid schedule found (sampled search; inconclusive)"]
    _emit(args, facts, lines)
    return 0


def _cmd_mine(args) -> int:
    cfg = MinerConfig(
        var_count=args.vars,
        modulus=args.mod,
        density=args.density,
        count=args.count,
        seed=args.seed,
        max_cond=args.max_cond,
    )
    findings = mine(cfg)
    facts = {
        "command": "mine",
        "config": {
            "vars": cfg.var_count,
            "mod": cfg.modulus,
            "density": cfg.density,
            "count": cfg.count,
            "seed": cfg.seed,
            "max_cond": cfg.max_cond,
        },
        "findings": [
            {
                "model": f.model.name,
                "violations": [_query_facts(f.model, r.query) for r in f.violations],
            }
            for f in findings
        ],
    }
    lines = [f"models with violations: {len(findings)} of {cfg.count}"]
    for f in findings:
        lines.append(f"model {f.model.name}: {len(f.violations)} violation(s)")
        for r in f.violations:
            q = _query_facts(f.model, r.query)
            lines.append(
                f"  violation: a={','.join(q['a'])} b={','.join(q['b'])} c={','.join(q['c']) or '-'}"
            )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for f in findings:
            (out / f"{f.model.name}.model").write_text(serialize_model(f.model))
        (out / "report.txt").write_text("\n".join(lines) + "\n")
        lines.append(f"wrote {len(findings)} model file(s) to {out}")
    _emit(args, facts, lines)
    return 0


def _cmd_fixture(args) -> int:
    text = serialize_model(fixture(args.name))
    if args.format == "json":
        print(json.dumps({"command": "fixture", "name": args.name, "text": text}, sort_keys=True))
    else:
        print(text, end="")
    return 0


# --- parser wiring ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cyclicscm",
        description="Discrete structural models with feedback: exact queries and audits.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=handler)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    sp = add("check", _cmd_check, "verify that every noise draw has exactly one solution")
    sp.add_argument("model")

    sp = add("solve", _cmd_solve, "solve the equations for one noise draw")
    sp.add_argument("model")
    sp.add_argument("--u", default="", help="comma-separated NAME=VALUE noise bindings")

    sp = add("dsep", _cmd_dsep, "graphical separation query")
    sp.add_argument("model")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--c", default="")

    sp = add("ci", _cmd_ci, "exact conditional-independence query")
    sp.add_argument("model")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--c", default="")

    sp = add("prob", _cmd_prob, "exact conditional probability")
    sp.add_argument("model")
    sp.add_argument("--event", required=True)
    sp.add_argument("--given", default="")

    sp = add("audit", _cmd_audit, "flag separation claims the distribution refutes")
    sp.add_argument("model")
    sp.add_argument("--max-cond", type=int, default=2)
    sp.add_argument("--max-set", type=int, default=1)
    sp.add_argument("--fail-on-violation", action="store_true")

    sp = add("dynamics", _cmd_dynamics, "convergence of update schedules")
    sp.add_argument("model")
    sp.add_argument("--schedule", help="'simultaneous' or comma-separated variable names")
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--sample", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("mine", _cmd_mine, "search random models for separation/independence violations")
    sp.add_argument("--vars", type=int, required=True)
    sp.add_argument("--mod", type=int, required=True)
    sp.add_argument("--density", type=float, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--max-cond", type=int, default=2)
    sp.add_argument("--out")

    sp = add("fixture", _cmd_fixture, "print a built-in model file")
    sp.add_argument("name")

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ParseError, ModelValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ModelTooLargeError, NonUniqueModelError, UndefinedConditionalError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
