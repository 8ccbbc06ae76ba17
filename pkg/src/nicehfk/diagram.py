"""Combinatorial doubly pointed Heegaard diagrams.

A diagram is stored as its rotation system: every intersection point of an
alpha and a beta curve is a vertex carrying a sign, and each curve is the
cyclic list of vertices it meets.  The sign fixes the counterclockwise order
of the four half-edge ends at a vertex::

    sign +1:  (alpha-out, beta-out, alpha-in, beta-in)
    sign -1:  (alpha-out, beta-in,  alpha-in, beta-out)

Quadrant ``q`` at a vertex is the sector counterclockwise between slot ``q``
and slot ``q + 1``.  A pair ``(vertex, quadrant)`` is a *corner*; corners are
the stable tokens used for the basepoints and for region bookkeeping.

Faces are traced with the face on the left, so every boundary cycle runs
counterclockwise around its face.  A region normally is a single face; a
non-disk region is declared by a *join*: a group of corners (one per boundary
cycle) plus the genus of the region.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

ALPHA, BETA = 0, 1
LEFT, RIGHT = 0, 1


class MalformedDiagram(ValueError):
    """Raised when a diagram violates one of the structural invariants."""

    def __init__(self, problems, line=None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        self.line = line
        msg = "; ".join(self.problems)
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)


@dataclass(frozen=True)
class Edge:
    id: int
    kind: int  # ALPHA or BETA
    curve: int
    index: int  # position of the tail on its curve
    tail: int
    head: int


@dataclass(frozen=True)
class Region:
    id: int
    faces: tuple  # face ids
    boundary: tuple  # tuple of boundary cycles, each a tuple of (edge, side)
    corners: tuple
    genus: int = 0

    @property
    def boundary_component_count(self):
        return len(self.boundary)

    @property
    def edge_sides(self):
        return [es for cyc in self.boundary for es in cyc]

    @property
    def edge_count(self):
        return sum(len(c) for c in self.boundary)

    @property
    def is_disk(self):
        return len(self.boundary) == 1 and self.genus == 0

    @property
    def is_bigon(self):
        return self.is_disk and self.edge_count == 2

    @property
    def is_rectangle(self):
        return self.is_disk and self.edge_count == 4

    @property
    def is_bad(self):
        return not (self.is_bigon or self.is_rectangle)

    @property
    def badness(self):
        return max(self.edge_count // 2 - 2, 0)

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.genus - len(self.boundary)

    @property
    def euler_measure(self):
        return Fraction(self.euler_characteristic) - Fraction(len(self.corners), 4)

    @property
    def ugliness(self):
        return len(self.boundary) - 1


@dataclass(frozen=True)
class Diagram:
    """Immutable doubly pointed Heegaard diagram.

    ``alpha`` and ``beta`` are tuples of cyclic vertex tuples, ``sign`` is
    indexed by vertex id, ``z`` and ``w`` are corners, and ``joins`` is a
    tuple of ``(corners, genus)`` pairs describing non-disk regions.
    """

    alpha: tuple
    beta: tuple
    sign: tuple
    z: tuple
    w: tuple
    joins: tuple = field(default=())

    # ------------------------------------------------------------------
    # rotation system

    @property
    def num_vertices(self):
        return len(self.sign)

    @cached_property
    def _positions(self):
        apos, bpos = {}, {}
        problems = []
        for kind, curves, pos in ((ALPHA, self.alpha, apos), (BETA, self.beta, bpos)):
            name = "alpha" if kind == ALPHA else "beta"
            for c, cyc in enumerate(curves):
                if not cyc:
                    problems.append(f"{name} curve {c} has no intersections")
                for k, v in enumerate(cyc):
                    if not 0 <= v < len(self.sign):
                        problems.append(f"{name} curve {c} uses unknown vertex {v}")
                    elif v in pos:
                        problems.append(f"vertex {v} appears twice on {name} curves")
                    else:
                        pos[v] = (c, k)
        for v in range(len(self.sign)):
            if v not in apos:
                problems.append(f"vertex {v} is on no alpha curve")
            if v not in bpos:
                problems.append(f"vertex {v} is on no beta curve")
            if self.sign[v] not in (1, -1):
                problems.append(f"vertex {v} has sign {self.sign[v]!r}")
        if problems:
            raise MalformedDiagram(problems)
        return apos, bpos

    @cached_property
    def edges(self):
        """All edges, alpha edges first; edge ``(curve, k)`` runs from
        ``curve[k]`` to ``curve[k + 1]``."""
        out = []
        for kind, curves in ((ALPHA, self.alpha), (BETA, self.beta)):
            for c, cyc in enumerate(curves):
                for k, v in enumerate(cyc):
                    out.append(Edge(len(out), kind, c, k, v, cyc[(k + 1) % len(cyc)]))
        return tuple(out)

    @cached_property
    def _edge_lookup(self):
        return {(e.kind, e.curve, e.index): e.id for e in self.edges}

    def edge_at(self, kind, curve, index):
        return self._edge_lookup[(kind, curve, index)]

    def slot(self, v, s):
        """Return ``(edge id, outgoing)`` for half-edge slot ``s`` at ``v``."""
        apos, bpos = self._positions
        s %= 4
        if s in (0, 2):
            c, k = apos[v]
            n = len(self.alpha[c])
            if s == 0:
                return self.edge_at(ALPHA, c, k), True
            return self.edge_at(ALPHA, c, (k - 1) % n), False
        c, k = bpos[v]
        n = len(self.beta[c])
        out = (s == 1) == (self.sign[v] > 0)
        if out:
            return self.edge_at(BETA, c, k), True
        return self.edge_at(BETA, c, (k - 1) % n), False

    def slot_of(self, v, kind, outgoing):
        if kind == ALPHA:
            return 0 if outgoing else 2
        return 1 if outgoing == (self.sign[v] > 0) else 3

    def corner_edge_sides(self, corner):
        """Edge-sides touching a corner: ``(arriving, leaving)`` in the
        counterclockwise boundary walk of the face containing it."""
        v, q = corner
        e_out, out = self.slot(v, q)
        leaving = (e_out, LEFT if out else RIGHT)
        e_in, out_in = self.slot(v, q + 1)
        arriving = (e_in, RIGHT if out_in else LEFT)
        return arriving, leaving

    def corner_from_halves(self, v, alpha_out, beta_out):
        """Corner bounded by the given alpha and beta half-edges at ``v``."""
        sa = self.slot_of(v, ALPHA, alpha_out)
        sb = self.slot_of(v, BETA, beta_out)
        if (sa + 1) % 4 == sb:
            return (v, sa)
        return (v, sb)

    # ------------------------------------------------------------------
    # faces and regions

    @cached_property
    def faces(self):
        """Boundary cycles traced from the rotation system.

        Returns ``(cycles, corner_face, side_face)`` where each cycle is a
        list of ``(corner, leaving edge-side)`` pairs.
        """
        self._positions
        edges = self.edges
        seen = {}
        cycles = []
        for v in range(self.num_vertices):
            for q in range(4):
                if (v, q) in seen:
                    continue
                fid = len(cycles)
                cyc = []
                cv, cq = v, q
                while (cv, cq) not in seen:
                    seen[(cv, cq)] = fid
                    e, out = self.slot(cv, cq)
                    cyc.append(((cv, cq), (e, LEFT if out else RIGHT)))
                    edge = edges[e]
                    nv = edge.head if out else edge.tail
                    ns = self.slot_of(nv, edge.kind, not out)
                    cv, cq = nv, (ns - 1) % 4
                if (cv, cq) != (v, q):
                    raise MalformedDiagram("face tracing did not close up")
                cycles.append(cyc)
        side_face = {}
        for fid, cyc in enumerate(cycles):
            for _, es in cyc:
                side_face[es] = fid
        return cycles, seen, side_face

    @cached_property
    def _region_data(self):
        cycles, corner_face, _ = self.faces
        group_of = {}
        genus_of = {}
        problems = []
        for gi, (tokens, genus) in enumerate(self.joins):
            for t in tokens:
                t = tuple(t)
                if t not in corner_face:
                    problems.append(f"region token {t} is not a corner")
                    continue
                f = corner_face[t]
                if f in group_of and group_of[f] != gi:
                    problems.append(f"face of corner {t} belongs to two regions")
                group_of[f] = gi
            if genus < 0:
                problems.append(f"region genus {genus} is negative")
            genus_of[gi] = genus
        if problems:
            raise MalformedDiagram(problems)
        members = {}
        for fid in range(len(cycles)):
            key = ("g", group_of[fid]) if fid in group_of else ("f", fid)
            members.setdefault(key, []).append(fid)
        ordered = sorted(members.items(), key=lambda kv: min(kv[1]))
        regions = []
        face_region = {}
        for rid, (key, fids) in enumerate(ordered):
            genus = genus_of[key[1]] if key[0] == "g" else 0
            boundary = tuple(tuple(es for _, es in cycles[f]) for f in fids)
            corners = tuple(c for f in fids for c, _ in cycles[f])
            regions.append(Region(rid, tuple(fids), boundary, corners, genus))
            for f in fids:
                face_region[f] = rid
        return tuple(regions), face_region

    @property
    def regions(self):
        return self._region_data[0]

    def region_of_corner(self, corner):
        _, corner_face, _ = self.faces
        return self._region_data[1][corner_face[tuple(corner)]]

    def region_of_side(self, edge_side):
        _, _, side_face = self.faces
        return self._region_data[1][side_face[tuple(edge_side)]]

    def across(self, edge_side):
        """Region on the other side of an edge-side."""
        e, s = edge_side
        return self.region_of_side((e, 1 - s))

    @property
    def z_region(self):
        return self.region_of_corner(self.z)

    @property
    def w_region(self):
        return self.region_of_corner(self.w)

    @cached_property
    def genus(self):
        chi = self.num_vertices - len(self.edges) + sum(
            r.euler_characteristic for r in self.regions)
        return (2 - chi) // 2 if chi % 2 == 0 else None

    # ------------------------------------------------------------------
    # validation

    def problems(self):
        """Return a list of violated invariants (empty when valid)."""
        try:
            self._positions
            regions = self.regions
        except MalformedDiagram as exc:
            return exc.problems
        out = []
        V, E = self.num_vertices, len(self.edges)
        if E != 2 * V:
            out.append(f"edge count {E} != 2V = {2 * V}")
        chi = V - E + sum(r.euler_characteristic for r in regions)
        if chi % 2 or chi > 2:
            out.append(f"Euler characteristic {chi} is not even and <= 2")
        else:
            g = (2 - chi) // 2
            if g < 1:
                out.append(f"genus {g} < 1")
            if len(self.alpha) != g or len(self.beta) != g:
                out.append(f"genus {g} but {len(self.alpha)} alpha and "
                           f"{len(self.beta)} beta curves")
        _, corner_face, _ = self.faces
        for name, c in (("z", self.z), ("w", self.w)):
            if tuple(c) not in corner_face:
                out.append(f"{name} anchor {tuple(c)} is not a corner")
        if not out:
            if not self._complement_connected(BETA):
                out.append("complement of the alpha curves is disconnected")
            if not self._complement_connected(ALPHA):
                out.append("complement of the beta curves is disconnected")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise MalformedDiagram(probs)
        return self

    def _complement_connected(self, crossing_kind):
        # crossing beta edges stays inside the complement of alpha
        adj = self.adjacency(crossing_kind)
        seen = {0}
        todo = [0]
        while todo:
            r = todo.pop()
            for _, nb in adj[r]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == len(self.regions)

    def adjacency(self, kind):
        """For each region, the sorted list of ``(edge-side, neighbour)``
        pairs obtained by crossing one of its ``kind`` edge-sides."""
        edges = self.edges
        adj = []
        for r in self.regions:
            lst = [(es, self.across(es)) for es in r.edge_sides
                   if edges[es[0]].kind == kind]
            lst.sort(key=lambda t: (t[1], t[0]))
            adj.append(lst)
        return adj

    # ------------------------------------------------------------------
    # metrics

    @cached_property
    def distances(self):
        """Heegaard distance of every region (BFS from Z over beta edges)."""
        adj = self.adjacency(BETA)
        z = self.z_region
        dist = [None] * len(self.regions)
        dist[z] = 0
        queue = deque([z])
        while queue:
            r = queue.popleft()
            for _, nb in adj[r]:
                if dist[nb] is None:
                    dist[nb] = dist[r] + 1
                    queue.append(nb)
        if any(d is None for d in dist):
            raise MalformedDiagram("some region is not reachable from Z avoiding alpha")
        return tuple(dist)

    def heegaard_path(self, region):
        """One shortest sequence of beta edge-side crossings from ``region``
        to Z; each entry is the edge-side of the region being left."""
        dist = self.distances
        adj = self.adjacency(BETA)
        path = []
        r = region
        while dist[r] > 0:
            es, nb = next((es, nb) for es, nb in adj[r] if dist[nb] == dist[r] - 1)
            path.append(es)
            r = nb
        return path

    @cached_property
    def metrics(self):
        return MetricsSnapshot.of(self)

    def walk_rectangle_chain(self, entry, floor):
        """Follow the chain of rectangles behind the alpha edge-side ``entry``.

        Returns ``(rectangles, terminal region, terminal entry side)`` where
        the terminal entry side is the edge-side of the terminal region that
        was crossed last.
        """
        edges = self.edges
        if edges[entry[0]].kind != ALPHA:
            raise ValueError("chain entry must be an alpha edge-side")
        dist = self.distances
        chain = []
        side = entry
        while True:
            e, s = side
            into = (e, 1 - s)
            r = self.region_of_side(into)
            reg = self.regions[r]
            if not reg.is_rectangle or dist[r] < floor or r in chain:
                return chain, r, into
            cyc = reg.boundary[0]
            i = cyc.index(into)
            chain.append(r)
            side = cyc[(i + 2) % 4]

    # ------------------------------------------------------------------
    # convenience

    def curve_vertices(self, kind, curve):
        return (self.alpha if kind == ALPHA else self.beta)[curve]

    def with_changes(self, **kw):
        data = dict(alpha=self.alpha, beta=self.beta, sign=self.sign,
                    z=self.z, w=self.w, joins=self.joins)
        data.update(kw)
        return Diagram(**data)


@dataclass(frozen=True)
class MetricsSnapshot:
    genus: int
    vertices: int
    regions: int
    bigons: int
    badness: int
    badness_z: int
    badness_by_distance: dict
    distance: int
    ugliness: int
    all_disk: bool

    @classmethod
    def of(cls, diagram):
        regs = diagram.regions
        z = diagram.z_region
        dist = diagram.distances
        by_d = {}
        far = 0
        for r in regs:
            if r.id == z:
                continue
            if r.badness:
                by_d[dist[r.id]] = by_d.get(dist[r.id], 0) + r.badness
            if r.is_bad:
                far = max(far, dist[r.id])
        return cls(
            genus=diagram.genus,
            vertices=diagram.num_vertices,
            regions=len(regs),
            bigons=sum(1 for r in regs if r.is_bigon),
            badness=sum(r.badness for r in regs if r.id != z),
            badness_z=regs[z].badness,
            badness_by_distance=dict(sorted(by_d.items())),
            distance=far,
            ugliness=sum(r.ugliness for r in regs),
            all_disk=all(r.is_disk for r in regs),
        )

    @property
    def nice(self):
        return self.badness == 0

    def euler_identity(self):
        """``(lhs, rhs)`` of b + b_z = 4(g - 1) + B."""
        return self.badness + self.badness_z, 4 * (self.genus - 1) + self.bigons


def complexity(diagram, d):
    """Distance-``d`` complexity as a tuple ordered lexicographically."""
    z = diagram.z_region
    dist = diagram.distances
    bs = sorted((r.badness for r in diagram.regions
                 if r.id != z and dist[r.id] == d and r.badness > 0), reverse=True)
    return (sum(bs),) + tuple(-b for b in bs)


# ----------------------------------------------------------------------
# text format

_CURVE = re.compile(r"^(alpha|beta)\s+(\d+)\s*:\s*(.*)$")


def parse(text):
    """Parse the ``.hd`` text format into a validated :class:`Diagram`."""
    lines = text.splitlines()
    header_seen = False
    curves = {"alpha": {}, "beta": {}}
    signs = {}
    anchors = {}
    joins = []

    def vid(tok, lineno):
        try:
            raw = int(tok)
        except ValueError:
            raise MalformedDiagram(f"bad vertex id {tok!r}", lineno) from None
        if raw < 0:
            raise MalformedDiagram(f"bad vertex id {tok!r}", lineno)
        return raw

    def corner(vtok, qtok, lineno):
        try:
            q = int(qtok)
        except ValueError:
            raise MalformedDiagram(f"bad quadrant {qtok!r}", lineno) from None
        if not 0 <= q <= 3:
            raise MalformedDiagram(f"quadrant {q} not in 0..3", lineno)
        return (vid(vtok, lineno), q)

    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != "heegaard v1":
                raise MalformedDiagram("expected header 'heegaard v1'", lineno)
            header_seen = True
            continue
        m = _CURVE.match(line)
        if m:
            kind, k, rest = m.group(1), int(m.group(2)), m.group(3).split()
            if k in curves[kind]:
                raise MalformedDiagram(f"{kind} {k} defined twice", lineno)
            if not rest:
                raise MalformedDiagram(f"{kind} {k} has no intersections", lineno)
            curves[kind][k] = [vid(t, lineno) for t in rest]
            continue
        toks = line.split()
        if toks[0] == "sign" and len(toks) == 3 and toks[2] in "+-":
            v = vid(toks[1], lineno)
            if v in signs:
                raise MalformedDiagram(f"vertex {v} has two sign lines", lineno)
            signs[v] = 1 if toks[2] == "+" else -1
        elif toks[0] in ("z", "w") and len(toks) == 3:
            if toks[0] in anchors:
                raise MalformedDiagram(f"{toks[0]} given twice", lineno)
            anchors[toks[0]] = corner(toks[1], toks[2], lineno)
        elif toks[0] == "region" and len(toks) >= 4 and len(toks) % 2 == 0:
            try:
                genus = int(toks[1])
            except ValueError:
                raise MalformedDiagram(f"bad region genus {toks[1]!r}", lineno) from None
            tokens = [corner(toks[i], toks[i + 1], lineno) for i in range(2, len(toks), 2)]
            joins.append((tokens, genus))
        else:
            raise MalformedDiagram(f"unrecognised line {raw.strip()!r}", lineno)

    last = len(lines)
    if not header_seen:
        raise MalformedDiagram("missing header 'heegaard v1'", last)
    for kind in ("alpha", "beta"):
        ks = sorted(curves[kind])
        if ks != list(range(len(ks))):
            raise MalformedDiagram(f"{kind} curves must be numbered 0..{len(ks) - 1}", last)
    for name in ("z", "w"):
        if name not in anchors:
            raise MalformedDiagram(f"missing {name} anchor", last)
    used = sorted({v for kind in curves for c in curves[kind].values() for v in c})
    missing = [v for v in used if v not in signs]
    if missing:
        raise MalformedDiagram(f"vertices without sign line: {missing}", last)
    extra = [v for v in signs if v not in used]
    if extra:
        raise MalformedDiagram(f"sign lines for vertices on no curve: {extra}", last)

    # renumber to 0..V-1 in first-use order
    order = {}
    for kind in ("alpha", "beta"):
        for k in sorted(curves[kind]):
            for v in curves[kind][k]:
                order.setdefault(v, len(order))

    def rc(c):
        if c[0] not in order:
            raise MalformedDiagram(f"anchor vertex {c[0]} is on no curve", last)
        return (order[c[0]], c[1])

    sign = [0] * len(order)
    for v, s in signs.items():
        sign[order[v]] = s
    diagram = Diagram(
        alpha=tuple(tuple(order[v] for v in curves["alpha"][k]) for k in sorted(curves["alpha"])),
        beta=tuple(tuple(order[v] for v in curves["beta"][k]) for k in sorted(curves["beta"])),
        sign=tuple(sign),
        z=rc(anchors["z"]),
        w=rc(anchors["w"]),
        joins=tuple((tuple(rc(t) for t in toks), g) for toks, g in joins),
    )
    return diagram.validate()


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def canonical(diagram):
    """Renumber vertices 0..V-1 in first-use order and normalise joins."""
    order = {}
    for cyc in diagram.alpha + diagram.beta:
        for v in cyc:
            order.setdefault(v, len(order))
    sign = [0] * len(order)
    for v, new in order.items():
        sign[new] = diagram.sign[v]
    joins = normalize_joins(diagram)
    return Diagram(
        alpha=tuple(tuple(order[v] for v in c) for c in diagram.alpha),
        beta=tuple(tuple(order[v] for v in c) for c in diagram.beta),
        sign=tuple(sign),
        z=(order[diagram.z[0]], diagram.z[1]),
        w=(order[diagram.w[0]], diagram.w[1]),
        joins=tuple((tuple((order[v], q) for v, q in toks), g) for toks, g in joins),
    )


def normalize_joins(diagram):
    """One token (the lowest corner) per boundary cycle; drop trivial groups."""
    cycles, corner_face, _ = diagram.faces
    out = []
    for tokens, genus in diagram.joins:
        fids = sorted({corner_face[tuple(t)] for t in tokens})
        if len(fids) == 1 and genus == 0:
            continue
        out.append((tuple(min(c for c, _ in cycles[f]) for f in fids), genus))
    out.sort()
    return tuple(out)


def serialize(diagram):
    d = canonical(diagram)
    lines = ["heegaard v1"]
    for k, c in enumerate(d.alpha):
        lines.append(f"alpha {k}: " + " ".join(map(str, c)))
    for k, c in enumerate(d.beta):
        lines.append(f"beta {k}: " + " ".join(map(str, c)))
    for v, s in enumerate(d.sign):
        lines.append(f"sign {v} {'+' if s > 0 else '-'}")
    lines.append(f"z {d.z[0]} {d.z[1]}")
    lines.append(f"w {d.w[0]} {d.w[1]}")
    for toks, g in d.joins:
        lines.append(f"region {g} " + " ".join(f"{v} {q}" for v, q in toks))
    return "\n".join(lines) + "\n"
