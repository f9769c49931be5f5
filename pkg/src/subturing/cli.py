"""Command-line front end.

Subcommands: run, reduce, lattice-check, construct, replay, jump.
Exit codes: 0 witnessed/pass, 1 refuted/violation, 2 usage or parse
error, 3 inconclusive, 4 contract abort.  Budget precedence: flags over
the SUBT_BUDGET_STEPS / SUBT_JOBS environment variables over defaults.
Outputs are canonical JSON (sorted keys, compact separators, trailing
newline) and embed their configuration, so identical configurations
produce identical bytes at any --jobs setting.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, codegen
from .machine import Budget, parse_program, run_dialogue
from .numbering import decode, encode
from .partialfn import (
    EMPTY,
    FiniteTable,
    Join,
    Meet,
    canonical_witnesses,
    from_json as oracle_from_json,
    k0,
    k_jump,
    meet_point,
    meet_universality,
)
from .search import (
    NonReductionCertificate,
    ReductionWitness,
    search_reduction,
    verify_reduction,
)
from .constructions import (
    CONSTRUCTIONS,
    ConstructionRefused,
    dumps_transcript,
    replay_transcript,
    run_construction,
)

DEFAULT_STEPS = 200_000
DEFAULT_ROUNDS = 64
DEFAULT_ORACLE_FUEL = 50_000


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return None


def resolve_budget(args) -> Budget:
    steps = args.steps if args.steps is not None else _env_int("SUBT_BUDGET_STEPS")
    return Budget(
        steps if steps is not None else DEFAULT_STEPS,
        args.rounds if args.rounds is not None else DEFAULT_ROUNDS,
        args.oracle_fuel if args.oracle_fuel is not None else DEFAULT_ORACLE_FUEL,
    )


def resolve_jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else _env_int("SUBT_JOBS")
    return max(1, jobs or 1)


def add_budget_flags(p: argparse.ArgumentParser):
    p.add_argument("--steps", type=int, default=None, help="step fuel shared across rounds")
    p.add_argument("--rounds", type=int, default=None, help="maximum oracle queries")
    p.add_argument("--oracle-fuel", type=int, default=None, help="per-query oracle budget")
    p.add_argument("--jobs", type=int, default=None, help="parallel verification tasks")


def load_program(spec: str):
    if spec.isdigit():
        return decode(int(spec))
    return parse_program(Path(spec).read_text())


def load_oracle(spec: str):
    return oracle_from_json(json.loads(Path(spec).read_text()))


def emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def budget_json(b: Budget) -> dict:
    return {"stepFuel": b.step_fuel, "roundCap": b.round_cap, "oracleFuel": b.oracle_fuel}


# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    budget = resolve_budget(args)
    program = load_program(args.program)
    oracle = load_oracle(args.oracle) if args.oracle else EMPTY
    out = run_dialogue(program, oracle, args.input, budget)
    emit(
        {
            "schema": "run/1",
            "config": {
                "program": args.program,
                "input": args.input,
                "budget": budget_json(budget),
            },
            **out.to_json(),
        },
        args.out,
    )
    return 0


def cmd_reduce(args) -> int:
    budget = resolve_budget(args)
    jobs = resolve_jobs(args)
    f = load_oracle(args.f)
    g = load_oracle(args.g)
    domain = parse_domain(args.domain)
    try:
        res = search_reduction(f, g, args.index_bound, domain, budget, jobs=jobs)
    except ValueError as exc:
        emit({"schema": "reduce/1", "inconclusive": str(exc)}, args.out)
        return 3
    payload = {
        "schema": "reduce/1",
        "config": {
            "indexBound": args.index_bound,
            "domain": domain,
            "budget": budget_json(budget),
            "jobs": jobs,
        },
        "report": res.to_json(),
    }
    emit(payload, args.out)
    if isinstance(res, ReductionWitness):
        return 0
    if res.per_index and all(fl.kind == "inconclusive" for _, fl in res.per_index):
        return 3
    return 1


def parse_domain(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return sorted(set(out))


def random_table(rng: random.Random, max_dom: int = 16, point_bound: int = 63,
                 value_bound: int = 7, ensure_zero: bool = True) -> FiniteTable:
    size = rng.randrange(1, max_dom + 1)
    points = rng.sample(range(point_bound + 1), min(size, point_bound + 1))
    table = {n: rng.randrange(value_bound + 1) for n in points}
    if ensure_zero:
        table[0] = rng.randrange(value_bound + 1)
    return FiniteTable(table)


def lattice_instance(rng: random.Random, budget: Budget, counters: dict) -> None:
    """One randomized check of every lattice-law property.

    Divergence certification plays no role in these verifications, so
    they run with a small configuration memo.
    """
    memo = 48
    w = canonical_witnesses()
    f = random_table(rng)
    g = random_table(rng)
    j = Join(f, g)

    def mark(prop: str, ok: bool):
        counters.setdefault(prop, {"pass": 0, "fail": 0})
        counters[prop]["pass" if ok else "fail"] += 1

    wl = verify_reduction(w["join_left"], f, j, f.domain(), budget, memo)
    mark("join_left", isinstance(wl, ReductionWitness))
    wr = verify_reduction(w["join_right"], g, j, g.domain(), budget, memo)
    mark("join_right", isinstance(wr, ReductionWitness))

    echo = 36
    m = Meet(f, g, budget)
    pts = [meet_point(echo, echo, n) for n in sorted(f.domain())[:2]]
    ml = verify_reduction(w["meet_left"], m, f, pts, budget, memo)
    mark("meet_lower_left", isinstance(ml, ReductionWitness))
    mr = verify_reduction(w["meet_right"], m, g, pts, budget, memo)
    mark("meet_lower_right", isinstance(mr, ReductionWitness))

    # universality: h = constant 0 reduced to both sides by index 12
    const0 = 12
    f0 = FiniteTable({**f.table, 0: 0})
    g0 = FiniteTable({**g.table, 0: 0})
    n0 = rng.randrange(3)
    h = FiniteTable({n0: 0})
    mu = Meet(f0, g0, budget)
    uni_budget = Budget(max(budget.step_fuel, 2_000_000), budget.round_cap, budget.oracle_fuel)
    wu = verify_reduction(meet_universality(const0, const0), h, mu, {n0}, uni_budget, memo)
    mark("meet_universality", isinstance(wu, ReductionWitness))

    from .partialfn import GraphOf
    from .coding import pair as _pair

    gf = GraphOf(f)
    bwd = verify_reduction(w["graph_bwd"], f, gf, sorted(f.domain())[:3], budget, memo)
    mark("graph_backward", isinstance(bwd, ReductionWitness))
    pts = [_pair(n, m) for n in sorted(f.domain())[:3] for m in range(3)]
    fwd = verify_reduction(w["graph_fwd"], gf, f, pts, budget, memo)
    mark("graph_forward", isinstance(fwd, ReductionWitness))


def cmd_lattice_check(args) -> int:
    budget = resolve_budget(args)
    jobs = resolve_jobs(args)
    counters: dict = {}
    if args.grid == 0:
        emit(
            {
                "schema": "lattice_check/1",
                "config": {"seed": args.seed, "grid": 0, "budget": budget_json(budget)},
                "warning": "vacuous: zero instances requested",
                "properties": {},
            },
            args.out,
        )
        return 0
    seeds = [random.Random(args.seed * 1_000_003 + i) for i in range(args.grid)]
    if jobs > 1:
        local: list[dict] = [dict() for _ in seeds]

        def work(i):
            lattice_instance(seeds[i], budget, local[i])

        with ThreadPoolExecutor(max_workers=jobs) as ex:
            list(ex.map(work, range(len(seeds))))
        for d in local:
            for prop, c in d.items():
                counters.setdefault(prop, {"pass": 0, "fail": 0})
                counters[prop]["pass"] += c["pass"]
                counters[prop]["fail"] += c["fail"]
    else:
        for rng in seeds:
            lattice_instance(rng, budget, counters)
    failures = sum(c["fail"] for c in counters.values())
    emit(
        {
            "schema": "lattice_check/1",
            "config": {
                "seed": args.seed,
                "grid": args.grid,
                "budget": budget_json(budget),
            },
            "properties": {k: counters[k] for k in sorted(counters)},
            "failures": failures,
        },
        args.out,
    )
    return 1 if failures else 0


def cmd_construct(args) -> int:
    overrides = {}
    if args.stages is not None:
        overrides["stages"] = args.stages
    if args.indices is not None:
        overrides["indices"] = args.indices
    if args.width is not None:
        overrides["width"] = args.width
    if args.input_bound is not None:
        overrides["inputBound"] = args.input_bound
    if args.steps is not None or _env_int("SUBT_BUDGET_STEPS") is not None:
        b = resolve_budget(args)
        overrides["budget"] = budget_json(b)
    try:
        transcript = run_construction(args.name, overrides)
    except ConstructionRefused as exc:
        sys.stderr.write(f"contract abort: {exc}\n")
        return 4
    text = dumps_transcript(transcript)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_replay(args) -> int:
    obj = json.loads(Path(args.transcript).read_text())
    ok, messages = replay_transcript(obj)
    for m in messages:
        sys.stderr.write(m + "\n")
    return 0 if ok else 1


def cmd_jump(args) -> int:
    budget = resolve_budget(args)
    f = load_oracle(args.f)
    lo, hi = (args.index_range.split("-", 1) + ["0"])[:2]
    rows = []
    counts: dict[str, int] = {}
    for e in range(int(lo), int(hi) + 1):
        a = k_jump(f, e, budget, memo_cap=2048)
        b = k0(f, e, budget, memo_cap=2048)
        rows.append(
            {
                "index": e,
                "k": a.kind,
                "k0": b.kind,
                "kValue": a.value(),
                "k0Value": b.value(),
                "query": a.query,
            }
        )
        counts[a.kind] = counts.get(a.kind, 0) + 1
    emit(
        {
            "schema": "jump/1",
            "config": {"indexRange": args.index_range, "budget": budget_json(budget)},
            "rows": rows,
            "counts": {k: counts[k] for k in sorted(counts)},
        },
        args.out,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subt",
        description="Workbench for reducibility between partial functions "
        "under the sequential oracle dialogue model.",
    )
    p.add_argument("--version", action="version", version=f"subt {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one dialogue")
    r.add_argument("program", help="program text file, or a program index")
    r.add_argument("input", type=int)
    r.add_argument("--oracle", help="oracle JSON file (default: empty)")
    r.add_argument("--out")
    add_budget_flags(r)
    r.set_defaults(fn=cmd_run)

    rd = sub.add_parser("reduce", help="search for a reduction witness")
    rd.add_argument("f", help="target oracle JSON file")
    rd.add_argument("g", help="source oracle JSON file")
    rd.add_argument("--index-bound", type=int, default=200)
    rd.add_argument("--domain", default="0-15", help="e.g. 0-15 or 1,4,9")
    rd.add_argument("--out")
    add_budget_flags(rd)
    rd.set_defaults(fn=cmd_reduce)

    lc = sub.add_parser("lattice-check", help="randomized lattice-law suite")
    lc.add_argument("--seed", type=int, default=0)
    lc.add_argument("--grid", type=int, default=1000, help="instance count")
    lc.add_argument("--out")
    add_budget_flags(lc)
    lc.set_defaults(fn=cmd_lattice_check)

    c = sub.add_parser("construct", help="run a bundled construction scenario")
    c.add_argument("name", choices=sorted(CONSTRUCTIONS))
    c.add_argument("--stages", type=int, default=None)
    c.add_argument("--indices", type=int, default=None)
    c.add_argument("--width", type=int, default=None)
    c.add_argument("--input-bound", type=int, default=None)
    c.add_argument("--out")
    add_budget_flags(c)
    c.set_defaults(fn=cmd_construct)

    rp = sub.add_parser("replay", help="re-verify a construction transcript")
    rp.add_argument("transcript")
    rp.set_defaults(fn=cmd_replay)

    j = sub.add_parser("jump", help="classify the jump over an oracle")
    j.add_argument("f", help="oracle JSON file")
    j.add_argument("--index-range", default="0-40")
    j.add_argument("--out")
    add_budget_flags(j)
    j.set_defaults(fn=cmd_jump)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
