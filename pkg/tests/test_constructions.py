import json

import pytest

from subturing import codegen as C
from subturing import numbering as N
from subturing.coding import pair, triple, unpair
from subturing.machine import Budget, run_dialogue
from subturing.partialfn import EMPTY, FiniteTable, Join, Meet, Restriction
from subturing.search import ReductionWitness, ce_enumerate, verify_reduction
from subturing.constructions import (
    CONSTRUCTIONS,
    ConstructionRefused,
    BoundedHaltingOracle,
    StageCertificate,
    build_density,
    build_quasiminimal,
    cite,
    coding_location_witness,
    dumps_transcript,
    fold_meet,
    jump_decision,
    nondistributive_suite,
    replay_citation,
    replay_transcript,
    run_construction,
    spoil_supremum,
)

B = Budget(200_000, 16, 50_000)


def test_citation_replay_roundtrip():
    f = FiniteTable({3: 5})
    item = cite(N.encode(C.echo_program()), f, 3, B)
    assert replay_citation(item)
    item["outcome"]["value"] = 6
    assert not replay_citation(item)


def test_bounded_halting_oracle_logs():
    o = BoundedHaltingOracle(B)
    ans, _ = o.classify(N.encode(C.self_loop_program()), EMPTY, 0)
    assert ans == "certified-divergent"
    big, unknown, _ = o.first_big_query(
        N.encode(C.query_const_program(9)), FiniteTable({1: 1}), 0, threshold=4
    )
    assert big == 9 and not unknown
    assert len(o.log) == 2
    assert all(replay_citation(entry["citation"]) for entry in o.log)


def test_quasiminimal_refuses_computable():
    # the identity is computed over any oracle by the one-instruction
    # program halting with the encoded input, which sits below this bound
    f = FiniteTable({n: n for n in range(8)})
    with pytest.raises(ConstructionRefused):
        build_quasiminimal(f, 2, B, precondition_bound=200, input_bound=7)


def test_quasiminimal_stage_contract():
    t = run_construction("quasiminimal")
    res = t["result"]
    assert res["A"], "diagonalization points were found"
    # action-2 re-check: each excluded point really is enumerated
    f = FiniteTable(
        {n: (3 * n + 5) % 17 for n in range(t["parameters"]["inputBound"] + 1)}
    )
    budget = Budget(**{
        "step_fuel": t["parameters"]["budget"]["stepFuel"],
        "round_cap": t["parameters"]["budget"]["roundCap"],
        "oracle_fuel": t["parameters"]["budget"]["oracleFuel"],
    })
    for cert in t["certificates"]:
        act = cert["action"]
        if act.get("kind") == "stage" and "excludedPoint" in act:
            e = cert["stage"]
            enumerated = ce_enumerate(e, f, t["parameters"]["inputBound"], budget)
            assert act["excludedPoint"] in enumerated
    # restraint discipline: acted points strictly increase
    acted = [c["action"].get("diagonalPoint") for c in t["certificates"]
             if c["action"].get("kind") == "stage"]
    assert acted == sorted(acted)


def test_density_refuses_wrong_order():
    f = FiniteTable({n: n % 5 for n in range(16)})
    with pytest.raises(ConstructionRefused):
        # g = f: the forward refutation precondition fails
        build_density(f, f, 2, B, precondition_bound=60, input_bound=15)


def test_density_h_sits_between():
    t = run_construction("density")
    bound = t["parameters"]["inputBound"]
    f = FiniteTable({n: (3 * n + 5) % 17 for n in range(bound + 1)})
    g = Restriction(f, set(range(0, bound + 1, 2)))
    A = t["result"]["A"]
    h = Join(Restriction(f, set(A)), g)
    # g <= h via the right projection; f|A <= h via the left projection
    w = verify_reduction(C.join_right_witness(), g, h, range(bound + 1), B)
    assert isinstance(w, ReductionWitness)
    fa = Restriction(f, set(A))
    w2 = verify_reduction(C.join_left_witness(), fa, h, range(bound + 1), B)
    assert isinstance(w2, ReductionWitness)
    # each diagonal point defeats its program over g
    for cert in t["certificates"]:
        act = cert["action"]
        if act.get("kind") == "stage":
            assert act["diagonalReason"] in ("wrong-value", "undefined")


def test_antichain_family_distinct_with_exclusions():
    t = run_construction("antichain")
    fam = t["result"]["family"]
    assert len(fam) == 4
    sets = [tuple(v) for v in fam.values()]
    assert len(set(sets)) == 4, "members are pairwise distinct"
    subs = [
        s
        for c in t["certificates"]
        if c["action"].get("kind") == "stage"
        for s in c["action"]["substages"]
        if "excludedPoint" in s
    ]
    assert subs, "at least one exclusion fired"
    # excluded points are out of every other member
    for c in t["certificates"]:
        if c["action"].get("kind") != "stage":
            continue
        for s in c["action"]["substages"]:
            if "excludedPoint" in s:
                hit = s["excludedPoint"]
                for name, members in fam.items():
                    if name != s["sigma"]:
                        assert hit not in members


def test_antichain_pad_alignment():
    # padding an enumerator index does not change what it enumerates
    f = FiniteTable({n: n % 7 for n in range(12)})
    e = N.encode(C.echo_program())
    d = N.pad(e, e + 1)
    assert ce_enumerate(e, f, 12, B) == ce_enumerate(d, f, 12, B)


def test_jump_inversion_codes_h():
    t = run_construction("jump-inversion")
    locs = t["result"]["codingLocations"]
    assert locs == sorted(set(locs)), "strictly increasing"
    h = {int(k): v for k, v in t["parameters"]["h"].items()}
    coded = dict(t["result"]["f"])
    for k, loc in enumerate(locs):
        if k in h:
            assert coded[loc] == h[k]
    for d in t["result"]["decisions"]:
        assert d["truncationAgrees"], d


def test_jump_decision_cases_directly():
    # case 2: halts; case 3: certified divergence; case 1: frozen beyond cut
    f_table = {4: 9}
    import subturing.machine as M

    halt_idx = N.encode(M.Program([M.Instr(M.HALT, 4)]))
    dec, _ = jump_decision(halt_idx, f_table, 5, B)
    assert dec["case"] == 2 and dec["truncationAgrees"]
    loop_idx = N.encode(C.self_loop_program())
    dec, _ = jump_decision(loop_idx, f_table, 5, B)
    assert dec["case"] == 3 and dec["truncationAgrees"]
    probe_above = N.encode(C.query_const_program(5))  # 5 > cut-1, outside dom
    dec, items = jump_decision(probe_above, f_table, 5, B)
    assert dec["case"] == 1 and dec["truncationAgrees"]
    out = json.loads(json.dumps(items[1]["outcome"]))
    assert out["outcome"] == "frozen" and out["query"] == 5


def test_sup_spoiler_witnesses_and_restraints():
    t = run_construction("sup-spoiler")
    locs = t["result"]["locations"]
    bound = t["parameters"]["inputBound"]
    f0 = FiniteTable({n: (3 * n + 5) % 17 for n in range(bound + 1)})
    gs = []
    for i in range(t["parameters"]["stages"] + 1):
        dom = set(range(0, bound + 1, 2 ** i))
        gs.append(FiniteTable({n: f0.table[n] for n in sorted(dom)}))
    f = FiniteTable(dict(map(tuple, t["result"]["f"])))
    for i, g in enumerate(gs):
        w = verify_reduction(
            coding_location_witness(locs[i]), g, f, range(bound + 1), B
        )
        assert isinstance(w, ReductionWitness)
    # banned points never collide with coded ones
    assert not (set(t["result"]["banned"]) & set(f.table))


def test_sup_spoiler_big_query_case():
    # an adversary that asks for its own input freezes above the restraint:
    # run enough stages to reach one that queries
    f0 = FiniteTable({n: n % 4 for n in range(10)})
    gs = [
        FiniteTable({n: f0.table[n] for n in range(0, 10, step)})
        for step in (1, 2, 5)
    ]
    h = FiniteTable({n: 1 for n in range(2, 10)})
    result, certs = spoil_supremum(gs, h, 2, B, input_bound=9)
    kinds = {c.action["kind"] for c in certs}
    assert kinds <= {"big-query", "locality"}


def test_inf_spoiler_fold_agrees_with_meet():
    t = run_construction("inf-spoiler")
    bound = t["parameters"]["inputBound"]
    f0 = FiniteTable({n: (3 * n + 5) % 17 for n in range(bound + 1)})
    gs = [
        FiniteTable({n: f0.table[n] for n in range(0, bound + 1, 2 ** i)})
        for i in range(3)
    ]
    levels, point, idxs = fold_meet(list(gs), B)
    # the canonical points deliver the common value at every level
    for n in (0, 4, 8):
        for l in range(3):
            ans = levels[l].eval(point(l, n), B.oracle_fuel)
            assert ans.kind == "defined" and ans.value == f0.table[n]
    # and they agree with a fresh meet built directly
    direct = Meet(levels[0], gs[1], B)
    assert direct.eval(point(1, 4), 10).value == f0.table[4]
    assert dict(t["result"]["points"]), "diagonal points chosen"


def test_nondistributive_suite_satisfied():
    result, certs = nondistributive_suite(4, B)
    assert result["failed"] == 0
    assert result["satisfied"] >= 4
    levels = [c.action["level"] for c in certs]
    assert levels == sorted(levels)
    # the written level values let both functionals halt with one value
    for chk in result["checks"]:
        assert chk["status"].startswith("satisfied") or chk["status"] == "inconclusive"


def test_nondistributive_restraint_discipline():
    result, certs = nondistributive_suite(6, B)
    floor = -1
    for c in certs:
        writes = c.action["writes"]
        positions = [p for p, _ in writes["g"]] + [p for p, _ in writes["h"]]
        assert min(positions) > floor
        floor = max(floor, c.action["nextLevel"] - 1)


def test_transcripts_deterministic_and_replayable():
    for name in ("quasiminimal", "sup-spoiler", "nondistributive"):
        t1 = run_construction(name)
        t2 = run_construction(name)
        assert dumps_transcript(t1) == dumps_transcript(t2)
        ok, msgs = replay_transcript(t1)
        assert ok, (name, msgs)


def test_transcript_corruption_detected():
    t = run_construction("quasiminimal")
    blob = dumps_transcript(t)
    # flip one digit inside some recorded evidence value
    idx = blob.find('"steps":')
    assert idx != -1
    pos = idx + len('"steps":')
    ch = blob[pos]
    repl = "7" if ch != "7" else "8"
    corrupted = blob[:pos] + repl + blob[pos + 1:]
    obj = json.loads(corrupted)
    ok, msgs = replay_transcript(obj)
    assert not ok and msgs
