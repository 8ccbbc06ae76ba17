"""The four-step pipeline turning any diagram into a nice one.

1. remove bigons that avoid both basepoints,
2. cut every non-disk region with a finger move,
3. attach handles until every bad region is at distance at most one,
4. run the Sarkar-Wang procedure until no bad region is left.

Every step records snapshots and the inequalities it is expected to obey;
the report keeps the concrete numbers so a failed bound can be inspected.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from . import moves
from .diagram import BETA, MetricsSnapshot, complexity


class StuckStep(RuntimeError):
    pass


class IterationCap(RuntimeError):
    pass


MODES = ("modified", "original")


@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool
    gating: bool = True
    note: str = ""

    def to_json(self):
        out = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}
        if not self.gating:
            out["gating"] = False
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class StepRecord:
    step: int
    genus: int
    badness: int
    distance: int
    vertices: int
    new_vertices: int = 0
    moves: int = 0


@dataclass
class NicefyReport:
    mode: str = "modified"
    steps: list = field(default_factory=list)
    sw_log: list = field(default_factory=list)
    bound_checks: list = field(default_factory=list)

    def check(self, name, lhs, rhs, ok=None, gating=True, note=""):
        if ok is None:
            ok = lhs <= rhs
        self.bound_checks.append(BoundCheck(name, lhs, rhs, bool(ok), gating, note))
        return ok

    @property
    def passed(self):
        return all(c.passed for c in self.bound_checks if c.gating)

    @property
    def failed_checks(self):
        return [c for c in self.bound_checks if c.gating and not c.passed]

    @property
    def total_new_vertices(self):
        return sum(s.new_vertices for s in self.steps)

    def to_json(self):
        return {
            "mode": self.mode,
            "steps": [asdict(s) for s in self.steps],
            "sw_log": self.sw_log,
            "bound_checks": [c.to_json() for c in self.bound_checks],
            "passed": self.passed,
        }


def _record(report, step, diagram, new_vertices=0, count=0):
    m = diagram.metrics
    rec = StepRecord(step, m.genus, m.badness, m.distance, m.vertices, new_vertices, count)
    report.steps.append(rec)
    return rec


class _Trace:
    """Collects intermediate diagrams for ``--trace-dir``."""

    def __init__(self, sink=None):
        self.sink = sink

    def __call__(self, label, diagram):
        if self.sink is not None:
            self.sink(label, diagram)


# ----------------------------------------------------------------------
# step 1

def step1_kill_bigons(diagram, report=None, trace=None):
    trace = trace or _Trace()
    v0 = diagram.num_vertices
    count = 0
    while True:
        target = next((r.id for r in diagram.regions
                       if r.is_bigon and moves.eliminable(diagram, r.id)), None)
        if target is None:
            break
        before = diagram.num_vertices
        diagram = moves.eliminate_bigon(diagram, target).new_diagram
        count += 1
        if report is not None:
            report.check("step1: v drops by 2 per bigon", diagram.num_vertices, before - 2,
                         diagram.num_vertices == before - 2)
        trace(f"step1-{count}", diagram)
    if report is not None:
        report.check("step1: v1 <= v0", diagram.num_vertices, v0)
    return diagram, {"eliminated": count, "new_vertices": diagram.num_vertices - v0}


# ----------------------------------------------------------------------
# step 2

def step2_kill_nondisks(diagram, report=None, trace=None):
    trace = trace or _Trace()
    g = diagram.genus
    ugly = diagram.metrics.ugliness
    if report is not None:
        report.check("step2: ugliness(H1) <= 2g1-1", ugly, 2 * g - 1)
    added = 0
    cuts = 0
    v1 = diagram.num_vertices
    bigons = {r.id for r in diagram.regions if r.is_bigon}
    while True:
        target = next((r.id for r in diagram.regions if not r.is_disk), None)
        if target is None:
            break
        before = diagram.metrics.ugliness
        out = moves.cut_nondisk(diagram, target, bigons)
        diagram = out.new_diagram
        added += out.new_vertices
        cuts += 1
        if report is not None:
            report.check("step2: each cut lowers ugliness by 1", diagram.metrics.ugliness,
                         before - 1, diagram.metrics.ugliness == before - 1)
        # bigons inherited from the previous diagram keep counting as "previous"
        bigons = {r.id for r in diagram.regions if r.is_bigon}
        trace(f"step2-{cuts}", diagram)
    if report is not None:
        m = diagram.metrics
        report.check("step2: cuts == ugliness removed", cuts, ugly, cuts == ugly)
        report.check("step2: b2 <= 4g1-2", m.badness, 4 * g - 2)
        lhs, rhs = m.euler_identity()
        report.check("step2: b+b_z = 4(g-1)+B", lhs, rhs, lhs == rhs)
        report.check("step2: v2 <= 4 v1 g1", diagram.num_vertices, 4 * v1 * g)
    return diagram, {"cuts": cuts, "new_vertices": added}


# ----------------------------------------------------------------------
# step 3

def _far_bad_region(diagram):
    dist = diagram.distances
    z = diagram.z_region
    cands = [r for r in diagram.regions if r.id != z and r.is_bad and dist[r.id] > 1]
    if not cands:
        return None
    return min(cands, key=lambda r: (-dist[r.id], r.id)).id


def step3_distance_one(diagram, report=None, trace=None):
    trace = trace or _Trace()
    m2 = diagram.metrics
    handles = 0
    added = 0
    while True:
        target = _far_bad_region(diagram)
        if target is None:
            break
        b_before = diagram.metrics.badness
        out = moves.attach_handle(diagram, target)
        ck = out.checks
        diagram = out.new_diagram
        handles += 1
        added += out.new_vertices
        if report is not None:
            n = f"handle {handles}"
            report.check(f"{n}: target now at distance 1", int(ck.target_distance_one), 1, ck.target_distance_one)
            report.check(f"{n}: no distance grows", int(ck.distances_monotone), 1,
                         ck.distances_monotone)
            report.check(f"{n}: badness preserved away from target and Z", int(ck.badness_fiberwise), 1,
                         ck.badness_fiberwise)
            report.check(f"{n}: b'=b+2", diagram.metrics.badness, b_before + 2,
                         ck.badness_delta == 2)
            report.check(f"{n}: badness beyond distance 1 decreases", ck.far_badness_after,
                         ck.far_badness_before - 1)
            report.check(f"{n}: new vertices = d+1", ck.new_vertices, ck.distance + 1,
                         ck.new_vertices == ck.distance + 1)
        trace(f"step3-{handles}", diagram)
    if report is not None:
        m3 = diagram.metrics
        report.check("step3: distance <= 1", m3.distance, 1)
        report.check("step3: g3 <= g2+b2", m3.genus, m2.genus + m2.badness)
        report.check("step3: b3 <= 3 b2", m3.badness, 3 * m2.badness)
        report.check("step3: new vertices <= b2 (d2+1)", added, m2.badness * (m2.distance + 1))
        report.check("step3: v3 <= v2 b2", m3.vertices, m2.vertices * m2.badness,
                     gating=False, note="fails whenever b2 = 1 and a handle is attached; "
                     "see 'new vertices <= b2 (d2+1)'")
    return diagram, {"handles": handles, "new_vertices": added}


# ----------------------------------------------------------------------
# step 4: the Sarkar-Wang procedure

def _select(diagram):
    """Return (D, phi, d) for the next Sarkar-Wang step, or None if nice."""
    dist = diagram.distances
    z = diagram.z_region
    bad = [r for r in diagram.regions if r.id != z and r.is_bad]
    if not bad:
        return None
    d = max(dist[r.id] for r in bad)
    D = min((r for r in bad if dist[r.id] == d), key=lambda r: (r.badness, r.id))
    if not D.is_disk:
        raise StuckStep(f"region {D.id} is not a disk")
    edges = diagram.edges
    options = []
    for es in D.boundary[0]:
        if edges[es[0]].kind != BETA:
            continue
        nb = diagram.across(es)
        if dist[nb] == d - 1:
            options.append((nb, es))
    if not options:
        raise StuckStep(f"region {D.id} has no neighbour at distance {d - 1}")
    _, phi = min(options)
    return D, phi, d


def _chain_crossings(diagram, entry, floor):
    """Alpha edge-sides crossed by a finger entering at ``entry``."""
    chain, terminal, into = diagram.walk_rectangle_chain(entry, floor)
    crossings = [entry]
    for r in chain:
        cyc = diagram.regions[r].boundary[0]
        # the rectangle was entered through the side opposite to the crossing
        prev = crossings[-1]
        i = cyc.index((prev[0], 1 - prev[1]))
        crossings.append(cyc[(i + 2) % 4])
    return crossings, chain, terminal, into


def _classify(diagram, D, cyc, i, k, floor):
    """Try the finger through a_k; returns a plan dict."""
    n = len(cyc)

    def a(j):
        return cyc[(i + 2 * j - 1) % n]

    def b_between(j):
        # beta edge-side between a_j and a_{j+1}
        return cyc[(i + 2 * j) % n]

    crossings, chain, terminal, into = _chain_crossings(diagram, a(k), floor)
    plan = {"k": k, "crossings": crossings, "chain": chain, "terminal": terminal}
    if terminal != D.id:
        plan["case"] = "terminal"
        return plan
    if into == a(k - 1) and k > 1:
        plan["case"] = "handleslide"
        plan["over_side"] = b_between(k - 1)
        plan["over_index"] = (i + 2 * (k - 1)) % n
    elif into == a(k + 1):
        plan["case"] = "handleslide"
        plan["over_side"] = b_between(k)
        plan["over_index"] = (i + 2 * k) % n
    else:
        plan["case"] = "hard"
        return plan
    edges = diagram.edges
    slide = edges[cyc[i][0]].curve
    over = edges[plan["over_side"][0]].curve
    if slide == over:
        # a curve cannot slide over itself; fall back to keeping the finger
        plan["case"] = "hard"
        plan["self_slide"] = True
    else:
        plan["slide"], plan["over"] = slide, over
    return plan


def sw_step(diagram, mode="modified"):
    """One application of the Sarkar-Wang procedure.

    Returns ``(MoveOutcome, log)`` where the outcome's ``new_vertices`` also
    counts vertices of fingers that were pushed and withdrawn.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    sel = _select(diagram)
    if sel is None:
        raise StuckStep("diagram is already nice")
    D, phi, d = sel
    cyc = list(D.boundary[0])
    corners = [c for c, _ in diagram.faces[0][D.faces[0]]]
    i = cyc.index(phi)
    n_alpha = len(cyc) // 2
    withdrawn = 0
    attempts = 0
    k = 2
    while True:
        plan = _classify(diagram, D, cyc, i, k, d)
        attempts += 1
        if plan["case"] != "hard" or mode == "modified":
            break
        withdrawn += 2 * len(plan["crossings"])
        k += 1
        if k > n_alpha:
            raise StuckStep(f"no easy finger from region {D.id}")
    if plan["case"] == "handleslide":
        band = (corners[i], corners[plan["over_index"]])
        out = moves.handleslide(diagram, plan["slide"], plan["over"], band)
    else:
        out = moves.push_finger(diagram, phi, plan["crossings"])
    log = {
        "D": D.id,
        "D_star": diagram.across(phi),
        "phi": list(phi),
        "distance": d,
        "case": "hard-keep" if plan["case"] == "hard" else plan["case"],
        "finger_through": plan["k"],
        "chain_length": len(plan["chain"]),
        "attempts": attempts,
        "withdrawn_vertices": withdrawn,
        "new_vertices": out.new_vertices,
    }
    if plan.get("self_slide"):
        log["note"] = "finger returned beside a beta edge of the same curve"
    out.new_vertices += withdrawn
    return out, log


def _distance_one_bounds(b):
    steps = (b + 1) ** 2 / 2
    factor = 3 ** (b * (math.log(b) + 1)) if b > 0 else 1
    return steps, factor


def step4_sw_loop(diagram, mode="modified", report=None, trace=None, cap=None):
    trace = trace or _Trace()
    start = diagram.metrics
    d0 = start.distance
    if d0 <= 1:
        step_bound, factor_bound = _distance_one_bounds(start.badness)
    else:
        b = start.badness
        step_bound = b ** (2 ** d0) if b > 1 else d0 * (b + 1) ** 2
        factor_bound = 3 ** step_bound
    limit = cap if cap is not None else max(10 * step_bound, 10)
    steps = 0
    added = 0
    # c_d must drop over every run of kept hard-case fingers plus the next step
    group_start = None
    while True:
        m = diagram.metrics
        if m.nice:
            break
        if steps >= limit:
            raise IterationCap(f"{steps} Sarkar-Wang steps exceed cap {limit}")
        d = m.distance
        cd_before = complexity(diagram, d)
        out, log = sw_step(diagram, mode)
        new = out.new_diagram
        steps += 1
        added += out.new_vertices
        nm = new.metrics
        cd_after = complexity(new, d)
        log["c_d_before"] = list(cd_before)
        log["c_d_after"] = list(cd_after)
        log["step"] = steps
        if group_start is None:
            group_start = cd_before
        if report is not None:
            report.check(f"sw {steps}: d(H') <= d(H)", nm.distance, d)
            report.check(f"sw {steps}: b(H') <= b(H)+1", nm.badness, m.badness + 1)
            if log["case"] != "hard-keep":
                ok = cd_after < group_start
                report.check(f"sw {steps}: c_d(H') < c_d(H)", cd_after[0], group_start[0], ok,
                             note="" if group_start == cd_before else
                             "measured from the start of the preceding hard-case run")
        if log["case"] != "hard-keep":
            if not cd_after < group_start:
                raise StuckStep(f"c_d did not decrease: {group_start} -> {cd_after}")
            group_start = None
        if report is not None:
            report.sw_log.append(log)
        diagram = new
        trace(f"step4-{steps}", diagram)
    if report is not None:
        if group_start is not None:
            report.check("sw: final hard-case run resolved", 0, 0, diagram.metrics.nice)
        v3 = start.vertices
        v4 = diagram.num_vertices
        label = "distance-one loop" if d0 <= 1 else "general loop"
        report.check(f"{label}: steps <= bound", steps, step_bound)
        report.check(f"{label}: vertex factor <= bound", v4 / v3 if v3 else 1.0, factor_bound)
        report.check("step4: b4 = 0", diagram.metrics.badness, 0)
        report.check("step4: g4 <= g3", diagram.genus, start.genus)
    return diagram, {"sw_steps": steps, "new_vertices": added}


# ----------------------------------------------------------------------
# the pipeline

def nicefy(diagram, mode="modified", skip_distance_one=False, trace=None):
    """Run all four steps; returns ``(nice diagram, NicefyReport)``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    trace = _Trace(trace) if not isinstance(trace, _Trace) else trace
    report = NicefyReport(mode=mode)
    m0 = diagram.metrics
    _record(report, 0, diagram)
    diagram, s1 = step1_kill_bigons(diagram, report, trace)
    _record(report, 1, diagram, max(s1["new_vertices"], 0), s1["eliminated"])
    diagram, s2 = step2_kill_nondisks(diagram, report, trace)
    _record(report, 2, diagram, s2["new_vertices"], s2["cuts"])
    if skip_distance_one:
        s3 = {"handles": 0, "new_vertices": 0}
    else:
        diagram, s3 = step3_distance_one(diagram, report, trace)
    _record(report, 3, diagram, s3["new_vertices"], s3["handles"])
    diagram, s4 = step4_sw_loop(diagram, mode, report, trace)
    _record(report, 4, diagram, s4["new_vertices"], s4["sw_steps"])

    g0, v0 = m0.genus, m0.vertices
    m4 = diagram.metrics
    report.check("g4 <= 5g0-2", m4.genus, 5 * g0 - 2)
    rhs = 16 * v0 * g0 ** 2 * 2 ** (12 * g0 * (math.log(12 * g0) + 1))
    report.check("v4 <= 16 v0 g0^2 2^(12 g0 (log(12 g0)+1))", m4.vertices, rhs)
    lhs, rhs_e = m4.euler_identity()
    report.check("final: b+b_z = 4(g-1)+B", lhs, rhs_e, lhs == rhs_e)
    return diagram, report


def snapshot(diagram):
    return MetricsSnapshot.of(diagram)


__all__ = [
    "BoundCheck", "IterationCap", "MODES", "NicefyReport", "StuckStep", "nicefy",
    "snapshot", "step1_kill_bigons", "step2_kill_nondisks", "step3_distance_one",
    "step4_sw_loop", "sw_step",
]
