"""Elementary rewrites of Heegaard diagrams.

Every move builds new curve sequences and signs, re-derives all faces and
validates the result.  The 0-simplex counter ``new_vertices`` is the exact
change in the number of intersection points.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .diagram import ALPHA, BETA, LEFT, Diagram, MalformedDiagram, canonical


class MoveError(ValueError):
    pass


class IllegalFinger(MoveError):
    pass


class NotABigon(MoveError):
    pass


class ContainsBasepoint(MoveError):
    pass


class WouldStrandCurve(MoveError):
    pass


class IllegalBand(MoveError):
    pass


class NotNonDisk(MoveError):
    pass


class AlreadyClose(MoveError):
    pass


@dataclass
class MoveOutcome:
    new_diagram: Diagram
    new_vertices: int
    # new region id -> old region id; None for regions made only of new vertices
    iota: dict = field(default_factory=dict)


def _insert_around(curves, before, after):
    out = []
    for cyc in curves:
        seq = []
        for v in cyc:
            seq.extend(before.get(v, ()))
            seq.append(v)
            seq.extend(after.get(v, ()))
        out.append(tuple(seq))
    return tuple(out)


def _finish(old, new, vmap):
    """Validate ``new``, renumber it and compute iota via surviving corners."""
    probs = new.problems()
    if probs:
        raise MalformedDiagram(["move produced an invalid diagram"] + probs)
    order = {}
    for cyc in new.alpha + new.beta:
        for v in cyc:
            order.setdefault(v, len(order))
    result = canonical(new)
    back = {order[nv]: ov for ov, nv in vmap.items()}
    iota = {}
    for reg in result.regions:
        olds = sorted((back[v], q) for v, q in reg.corners if v in back)
        iota[reg.id] = old.region_of_corner(olds[0]) if olds else None
    return result, iota


def _outcome(old, new, vmap, added):
    diagram, iota = _finish(old, new, vmap)
    return MoveOutcome(diagram, added, iota)


# ----------------------------------------------------------------------
# finger moves

def _interleaved(cycle_pos, chord, other):
    a, b = cycle_pos[chord[0]], cycle_pos[chord[1]]
    lo, hi = min(a, b), max(a, b)
    inside = [lo < cycle_pos[x] < hi for x in other]
    return inside[0] != inside[1]


def check_finger(diagram, start, crossings):
    """Return the regions visited by a beta finger, raising IllegalFinger.

    Each pass of the finger through a region is a chord between two
    edge-sides of that region; passes through the same disk region must not
    cross, and a non-disk region may be passed through only once.
    """
    edges = diagram.edges
    _, _, side_face = diagram.faces
    e0, s = start
    if edges[e0].kind != BETA:
        raise IllegalFinger("finger must start on a beta edge-side")
    if not crossings:
        raise IllegalFinger("finger must cross at least one alpha edge")
    cur = diagram.region_of_side(start)
    visited = [cur]
    entry = start
    used = set()
    chords = {}
    for e, sig in crossings:
        if edges[e].kind != ALPHA:
            raise IllegalFinger(f"edge {e} is not an alpha edge")
        if e in used:
            raise IllegalFinger(f"alpha edge {e} crossed twice")
        used.add(e)
        if diagram.region_of_side((e, sig)) != cur:
            raise IllegalFinger(f"edge-side {(e, sig)} is not on region {cur}")
        reg = diagram.regions[cur]
        chord = (entry, (e, sig))
        if not reg.is_disk:
            if side_face[entry] == side_face[(e, sig)]:
                raise IllegalFinger(f"finger would split non-disk region {cur}")
            if cur in chords:
                raise IllegalFinger(f"finger passes twice through non-disk region {cur}")
        elif cur in chords:
            pos = {es: k for k, es in enumerate(reg.boundary[0])}
            if any(_interleaved(pos, chord, other) for other in chords[cur]):
                raise IllegalFinger(f"finger would cross itself in region {cur}")
        chords.setdefault(cur, []).append(chord)
        entry = (e, 1 - sig)
        cur = diagram.region_of_side(entry)
        visited.append(cur)
    return visited


def push_finger(diagram, start, crossings):
    """Push the beta curve through ``start`` across the listed alpha
    edge-sides (each one facing the region the finger is currently in)."""
    crossings = [tuple(c) for c in crossings]
    check_finger(diagram, tuple(start), crossings)
    edges = diagram.edges
    e0, s = start
    base = diagram.num_vertices
    sign = list(diagram.sign)
    after = {}
    outs, backs = [], []
    for i, (e, sig) in enumerate(crossings):
        p, q = base + 2 * i, base + 2 * i + 1
        outs.append(p)
        backs.append(q)
        sign += [-1, 1] if sig == LEFT else [1, -1]
        edge = edges[e]
        pair = (p, q) if sig != s else (q, p)
        after.setdefault(edge.tail, []).extend(pair)
    alpha = _insert_around(diagram.alpha, {}, after)
    bedge = edges[e0]
    beta = _insert_around(diagram.beta, {}, {bedge.tail: outs + backs[::-1]})
    new = diagram.with_changes(alpha=alpha, beta=beta, sign=tuple(sign))
    vmap = {v: v for v in range(base)}
    return _outcome(diagram, new, vmap, 2 * len(crossings))


# ----------------------------------------------------------------------
# bigons

def eliminable(diagram, region):
    try:
        _check_bigon(diagram, region)
    except MoveError:
        return False
    return True


def _check_bigon(diagram, region):
    reg = diagram.regions[region]
    if not reg.is_bigon:
        raise NotABigon(f"region {region} is not a bigon")
    if region in (diagram.z_region, diagram.w_region):
        raise ContainsBasepoint(f"region {region} contains a basepoint")
    edges = diagram.edges
    for e, _ in reg.boundary[0]:
        edge = edges[e]
        if len(diagram.curve_vertices(edge.kind, edge.curve)) <= 2:
            raise WouldStrandCurve(f"removing region {region} would strand a curve")
    (p, _), (q, _) = reg.corners
    if p == q:
        raise WouldStrandCurve(f"region {region} has a repeated corner")
    return reg


def _repoint(diagram, token, dead):
    cycles, corner_face, _ = diagram.faces
    token = tuple(token)
    if token[0] not in dead:
        return token
    cands = [c for c, _ in cycles[corner_face[token]] if c[0] not in dead]
    if not cands:
        raise WouldStrandCurve(f"no surviving corner near {token}")
    return min(cands)


def eliminate_bigon(diagram, region):
    """Pull the beta arc of an empty bigon back across its alpha arc."""
    reg = _check_bigon(diagram, region)
    (p, qp), (q, qq) = reg.corners
    dead = {p, q}
    cycles, corner_face, _ = diagram.faces
    op, oq = (p, (qp + 2) % 4), (q, (qq + 2) % 4)
    rp, rq = diagram.region_of_corner(op), diagram.region_of_corner(oq)
    fp, fq = corner_face[op], corner_face[oq]

    def tokens_for(r):
        reg_r = diagram.regions[r]
        for gi, (toks, _) in enumerate(diagram.joins):
            if corner_face[tuple(toks[0])] in reg_r.faces:
                return gi, [_repoint(diagram, t, dead) for t in toks], reg_r.genus
        return None, [_repoint(diagram, op if r == rp else oq, dead)], 0

    gp, tp, hp = tokens_for(rp)
    gq, tq, hq = tokens_for(rq)
    if rp != rq:
        merged = (tp + tq, hp + hq)
    else:
        extra = [c for c, _ in cycles[fp] if c[0] not in dead]
        merged = (tp + extra, hp if fp == fq else hp + 1)
    joins = []
    for gi, (toks, genus) in enumerate(diagram.joins):
        if gi in (gp, gq):
            continue
        joins.append(([_repoint(diagram, t, dead) for t in toks], genus))
    joins.append(merged)

    vmap = {}
    for v in range(diagram.num_vertices):
        if v not in dead:
            vmap[v] = len(vmap)
    z = _repoint(diagram, diagram.z, dead)
    w = _repoint(diagram, diagram.w, dead)
    new = Diagram(
        alpha=tuple(tuple(vmap[v] for v in c if v not in dead) for c in diagram.alpha),
        beta=tuple(tuple(vmap[v] for v in c if v not in dead) for c in diagram.beta),
        sign=tuple(diagram.sign[v] for v in sorted(vmap)),
        z=(vmap[z[0]], z[1]),
        w=(vmap[w[0]], w[1]),
        joins=tuple((tuple((vmap[v], k) for v, k in toks), g) for toks, g in joins),
    )
    return _outcome(diagram, _drop_trivial(new), vmap, -2)


def _drop_trivial(diagram):
    try:
        cycles, corner_face, _ = diagram.faces
    except MalformedDiagram:
        return diagram
    keep = []
    for toks, g in diagram.joins:
        fids = {corner_face.get(tuple(t)) for t in toks}
        if len(fids) > 1 or g:
            keep.append((toks, g))
    return diagram.with_changes(joins=tuple(keep))


# ----------------------------------------------------------------------
# handleslides

def _beta_side_of_corner(diagram, corner):
    edges = diagram.edges
    for es in diagram.corner_edge_sides(corner):
        if edges[es[0]].kind == BETA:
            return es
    raise IllegalBand(f"corner {corner} touches no beta edge")


def handleslide(diagram, slide, over, band):
    """Band-sum beta curve ``slide`` with a push-off of beta curve ``over``.

    ``band`` is a pair of corners in one disk region: the first touches
    ``slide``, the second touches ``over``; the push-off lies on the side of
    ``over`` facing that region.
    """
    if slide == over:
        raise IllegalBand("a curve cannot slide over itself")
    ci, cj = (tuple(c) for c in band)
    edges = diagram.edges
    try:
        ri, rj = diagram.region_of_corner(ci), diagram.region_of_corner(cj)
    except KeyError:
        raise IllegalBand("band corners are not corners of the diagram") from None
    if ri != rj:
        raise IllegalBand(f"band corners lie in regions {ri} and {rj}")
    if not diagram.regions[ri].is_disk:
        raise IllegalBand("band region must be a disk")
    ei, side_i = _beta_side_of_corner(diagram, ci)
    ej, side_j = _beta_side_of_corner(diagram, cj)
    if edges[ei].curve != slide or edges[ej].curve != over:
        raise IllegalBand("band corners do not touch the named curves")

    over_cyc = diagram.beta[over]
    m = len(over_cyc)
    base = diagram.num_vertices
    twin = {y: base + k for k, y in enumerate(over_cyc)}
    forward = side_i == side_j
    before, after = {}, {}
    for y in over_cyc:
        toward_in = (diagram.sign[y] > 0) == (side_j == LEFT)
        (before if toward_in else after)[y] = [twin[y]]
    alpha = _insert_around(diagram.alpha, before, after)
    kj = edges[ej].index
    if forward:
        seq = [twin[over_cyc[(kj + 1 + r) % m]] for r in range(m)]
    else:
        seq = [twin[over_cyc[(kj - r) % m]] for r in range(m)]
    beta = list(diagram.beta)
    cyc = list(beta[slide])
    ki = edges[ei].index
    beta[slide] = tuple(cyc[:ki + 1] + seq + cyc[ki + 1:])
    sign = list(diagram.sign) + [s if forward else -s for s in (diagram.sign[y] for y in over_cyc)]
    draft = Diagram(tuple(alpha), tuple(beta), tuple(sign), diagram.z, diagram.w, diagram.joins)

    strip = set()
    for y in over_cyc:
        for q in range(4):
            es = _beta_side_of_corner(diagram, (y, q))
            if edges[es[0]].curve == over and es[1] == side_j:
                strip.add((y, q))

    def move_token(t):
        t = tuple(t)
        if t not in strip:
            return t
        y, q = t
        a_slot = q if q % 2 == 0 else (q + 1) % 4
        b_slot = (q + 1) % 4 if q % 2 == 0 else q
        _, a_out = diagram.slot(y, a_slot)
        _, b_out = diagram.slot(y, b_slot)
        return draft.corner_from_halves(twin[y], a_out, b_out if forward else not b_out)

    new = draft.with_changes(
        z=move_token(diagram.z), w=move_token(diagram.w),
        joins=tuple((tuple(move_token(t) for t in toks), g) for toks, g in diagram.joins))
    vmap = {v: v for v in range(base)}
    return _outcome(diagram, new, vmap, m)


# ----------------------------------------------------------------------
# non-disk regions

def _extension_paths(diagram, start_region, avoid, targets):
    """BFS over alpha crossings from ``start_region`` to any target region.

    Returns the list of alpha edge-sides to cross (each facing the region it
    leaves), or None.  Intermediate regions must be disks outside ``avoid``.
    """
    if start_region in targets:
        return []
    regions = diagram.regions
    edges = diagram.edges
    prev = {start_region: None}
    queue = deque([start_region])
    while queue:
        r = queue.popleft()
        if r != start_region and not regions[r].is_disk:
            continue
        sides = sorted(es for es in regions[r].edge_sides if edges[es[0]].kind == ALPHA)
        for es in sides:
            nb = diagram.across(es)
            if nb in prev or nb in avoid:
                continue
            prev[nb] = (r, es)
            if nb in targets:
                path = []
                cur = nb
                while prev[cur] is not None:
                    cur, step = prev[cur]
                    path.append(step)
                return path[::-1]
            queue.append(nb)
    return None


def shortest_cut(diagram, region, bigons=None):
    """Choose the finger used to cut a non-disk region.

    Returns ``(start, crossings)``.  The finger leaves a beta edge-side on
    one boundary component, crosses an alpha edge-side on another, and is
    extended through further alpha edges until it ends inside one of
    ``bigons`` when such an extension exists.
    """
    reg = diagram.regions[region]
    if reg.is_disk or len(reg.boundary) < 2:
        raise NotNonDisk(f"region {region} has one boundary component")
    edges = diagram.edges
    if bigons is None:
        bigons = {r.id for r in diagram.regions if r.is_bigon}
    bigons = set(bigons) - {diagram.z_region, diagram.w_region, region}
    best_ext = None
    best_short = None
    for ci, comp in enumerate(reg.boundary):
        for b in sorted(es for es in comp if edges[es[0]].kind == BETA):
            for cj, other in enumerate(reg.boundary):
                if cj == ci:
                    continue
                for a in sorted(es for es in other if edges[es[0]].kind == ALPHA):
                    if best_short is None:
                        best_short = (b, [a])
                    nxt = diagram.across(a)
                    ext = _extension_paths(diagram, nxt, {region}, bigons) if bigons else None
                    if ext is None:
                        continue
                    cand = (len(ext) + 1, b, a, ext)
                    if best_ext is None or cand[:3] < best_ext[:3]:
                        best_ext = cand
    if best_ext is not None:
        _, b, a, ext = best_ext
        return b, [a] + ext
    return best_short


def cut_nondisk(diagram, region, bigons=None):
    start, crossings = shortest_cut(diagram, region, bigons)
    before = diagram.metrics.ugliness
    out = push_finger(diagram, start, crossings)
    after = out.new_diagram.metrics.ugliness
    if after != before - 1:
        raise MalformedDiagram(f"cut changed ugliness from {before} to {after}")
    return out


# ----------------------------------------------------------------------
# handle attachment

@dataclass
class HandleChecks:
    distance: int
    new_vertices: int
    target_distance_one: bool
    distances_monotone: bool
    badness_fiberwise: bool
    badness_delta: int
    far_badness_before: int
    far_badness_after: int

    @property
    def passed(self):
        return (self.target_distance_one and self.distances_monotone
                and self.badness_fiberwise and self.badness_delta == 2
                and self.far_badness_after < self.far_badness_before
                and self.new_vertices == self.distance + 1)


def attach_handle(diagram, region):
    """Attach a handle joining Z to ``region`` (distance d > 1).

    The new alpha curve runs over the handle and back along the Heegaard
    path of the region; the new beta curve is the meridian of the handle.
    """
    dist = diagram.distances
    d = dist[region]
    if d <= 1:
        raise AlreadyClose(f"region {region} has distance {d}")
    path = diagram.heegaard_path(region)
    edges = diagram.edges
    cur = region
    for es in path[:-1]:
        cur = diagram.across(es)
        if not diagram.regions[cur].is_disk:
            raise MoveError(f"Heegaard path crosses non-disk region {cur}")
    base = diagram.num_vertices
    meridian_point = base
    crossings = [base + 1 + k for k in range(d)]
    sign = list(diagram.sign) + [1] + [1 if s == LEFT else -1 for _, s in path]
    after = {}
    for (e, _), c in zip(path, crossings):
        after.setdefault(edges[e].tail, []).append(c)
    beta = _insert_around(diagram.beta, {}, after) + ((meridian_point,),)
    alpha = diagram.alpha + ((meridian_point, *crossings),)
    new = diagram.with_changes(alpha=alpha, beta=beta, sign=tuple(sign))
    vmap = {v: v for v in range(base)}
    out = _outcome(diagram, new, vmap, d + 1)
    out.checks = handle_checks(diagram, region, out)
    return out


def handle_checks(old, target, out):
    new = out.new_diagram
    iota = out.iota
    nd = new.distances
    od = old.distances
    z_old, z_new = old.z_region, new.z_region
    pre = [r for r, o in iota.items() if o == target]
    fibers = {}
    for r, o in iota.items():
        fibers.setdefault(o, []).append(r)
    fiberwise = all(
        sum(new.regions[r].badness for r in fibers.get(o.id, [])) == o.badness
        for o in old.regions if o.id not in (target, z_old))

    def far(diag):
        dist = diag.distances
        z = diag.z_region
        return sum(r.badness for r in diag.regions if r.id != z and dist[r.id] > 1)

    return HandleChecks(
        distance=od[target],
        new_vertices=out.new_vertices,
        target_distance_one=len(pre) == 1 and nd[pre[0]] == 1,
        distances_monotone=all(o is None or nd[r] <= od[o] for r, o in iota.items()),
        badness_fiberwise=fiberwise,
        badness_delta=new.metrics.badness - old.metrics.badness,
        far_badness_before=far(old),
        far_badness_after=far(new),
    ) if z_new is not None else None


# ----------------------------------------------------------------------
# random legal moves (property tests, benchmarks)

def random_move(diagram, rng, kinds=("finger", "slide")):
    """Apply one random legal finger move or handleslide.

    Returns ``(kind, MoveOutcome)`` or None when no attempt succeeded.
    """
    edges = diagram.edges
    regions = [r for r in diagram.regions if r.is_disk]
    for _ in range(20):
        kind = rng.choice(kinds)
        if kind == "slide" and len(diagram.beta) < 2:
            kind = "finger"
        r = rng.choice(regions)
        if kind == "finger":
            betas = [es for es in r.edge_sides if edges[es[0]].kind == BETA]
            start = rng.choice(betas)
            crossings = []
            cur = r.id
            for _ in range(rng.randint(1, 2)):
                alphas = [es for es in diagram.regions[cur].edge_sides
                          if edges[es[0]].kind == ALPHA and es[0] not in {c[0] for c in crossings}]
                if not alphas or not diagram.regions[cur].is_disk:
                    break
                a = rng.choice(alphas)
                crossings.append(a)
                cur = diagram.across(a)
            try:
                return kind, push_finger(diagram, start, crossings)
            except MoveError:
                continue
        else:
            corners = list(r.corners)
            ci, cj = rng.choice(corners), rng.choice(corners)
            try:
                ei = _beta_side_of_corner(diagram, ci)[0]
                ej = _beta_side_of_corner(diagram, cj)[0]
                return kind, handleslide(diagram, edges[ei].curve, edges[ej].curve, (ci, cj))
            except MoveError:
                continue
    return None


def scramble(diagram, rng, count, kinds=("finger", "slide")):
    """Apply ``count`` random legal moves; returns the final diagram."""
    for _ in range(count):
        step = random_move(diagram, rng, kinds)
        if step is not None:
            diagram = step[1].new_diagram
    return diagram
