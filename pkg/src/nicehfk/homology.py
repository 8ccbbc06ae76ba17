"""Knot Floer homology (hat version, F2 coefficients) of a nice diagram.

Domains are found by inverting the linear map

    g = f1 + f2 : span(regions other than Z) + span(alpha curves, all but
                  one beta curve)  ->  span(vertices)

where ``f1`` is the boundary of the alpha part of a region's boundary and
``f2`` sends a curve to the sum of its vertices.  With the inverse ``h`` in
hand, the domain from ``x`` to ``y`` is ``h1(y - x)`` whenever ``h2(y - x)``
vanishes and the coefficients are integral.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .diagram import ALPHA, LEFT


class SingularSystem(ValueError):
    """The region/curve system is not invertible (the diagram is not S^3)."""


class NonIntegralGrading(ValueError):
    pass


class NoDomain(Exception):
    """Marker value: no domain connects the two generators."""


@dataclass(frozen=True)
class Generator:
    points: tuple          # points[i] is the vertex on alpha curve i
    rel_maslov: int = 0
    rel_alexander: int = 0


@dataclass
class Domain:
    coefficients: dict     # region id -> int, Z always 0

    def __getitem__(self, region):
        return self.coefficients.get(region, 0)


# ----------------------------------------------------------------------
# generators

def enumerate_matchings(diagram):
    """All g-tuples with one vertex on every alpha and every beta curve."""
    g = len(diagram.alpha)
    beta_of = {}
    for b, cyc in enumerate(diagram.beta):
        for v in cyc:
            beta_of[v] = b
    options = [sorted(cyc) for cyc in diagram.alpha]
    out = []
    chosen = []
    used = set()

    def rec(i):
        if i == g:
            out.append(tuple(chosen))
            return
        for v in options[i]:
            b = beta_of[v]
            if b in used:
                continue
            used.add(b)
            chosen.append(v)
            rec(i + 1)
            chosen.pop()
            used.discard(b)

    rec(0)
    out.sort()
    return out


# ----------------------------------------------------------------------
# exact linear algebra

def _invert(columns, n):
    """Invert the n x n matrix given as sparse columns {row: value}.

    Returns the inverse as a list of n sparse rows, row k giving the
    coordinates of unknown k in terms of the right-hand side entries.
    """
    # rows of the augmented system [A | I]
    rows = [dict() for _ in range(n)]
    for c, col in enumerate(columns):
        for r, val in col.items():
            if val:
                rows[r][c] = Fraction(val)
    aug = [{r: Fraction(1)} for r in range(n)]
    pivot_row_of = {}
    free = set(range(n))
    for c in range(n):
        cands = [r for r in free if rows[r].get(c)]
        if not cands:
            raise SingularSystem("region/curve map is singular; the diagram does not present S^3")
        p = min(cands, key=lambda r: (len(rows[r]) + len(aug[r]), r))
        free.discard(p)
        pivot_row_of[c] = p
        inv = 1 / rows[p][c]
        rows[p] = {k: v * inv for k, v in rows[p].items()}
        aug[p] = {k: v * inv for k, v in aug[p].items()}
        for r in range(n):
            if r == p:
                continue
            f = rows[r].get(c)
            if not f:
                continue
            for src, dst in ((rows[p], rows[r]), (aug[p], aug[r])):
                for k, v in src.items():
                    nv = dst.get(k, 0) - f * v
                    if nv:
                        dst[k] = nv
                    else:
                        dst.pop(k, None)
    return [aug[pivot_row_of[k]] for k in range(n)]


@dataclass
class ConnectionSolver:
    diagram: object
    region_ids: list            # X1 basis: region ids other than Z
    curve_ids: list             # X2 basis: ("alpha", i) / ("beta", j)
    f1: np.ndarray              # vertices x regions (integer)
    inverse: list = field(repr=False, default=None)   # sparse rows of h

    @property
    def nu(self):
        return self.diagram.num_vertices

    @property
    def rho(self):
        return len(self.region_ids) + 1

    def solve(self, vec):
        """h applied to an integer vertex vector (dict vertex -> int)."""
        out = []
        for row in self.inverse:
            s = Fraction(0)
            for k, v in row.items():
                c = vec.get(k)
                if c:
                    s += v * c
            out.append(s)
        return out


def _f1_columns(diagram):
    edges = diagram.edges
    z = diagram.z_region
    region_ids = [r.id for r in diagram.regions if r.id != z]
    cols = []
    for rid in region_ids:
        col = {}
        for e, side in diagram.regions[rid].edge_sides:
            edge = edges[e]
            if edge.kind != ALPHA:
                continue
            sgn = 1 if side == LEFT else -1
            col[edge.head] = col.get(edge.head, 0) + sgn
            col[edge.tail] = col.get(edge.tail, 0) - sgn
        cols.append({k: v for k, v in col.items() if v})
    return region_ids, cols


def build_connection_solver(diagram):
    g = len(diagram.alpha)
    nu = diagram.num_vertices
    region_ids, cols = _f1_columns(diagram)
    curve_ids = [("alpha", i) for i in range(g)] + [("beta", j) for j in range(g - 1)]
    curve_cols = [{v: 1 for v in diagram.alpha[i]} for i in range(g)]
    curve_cols += [{v: 1 for v in diagram.beta[j]} for j in range(g - 1)]
    if len(cols) + len(curve_cols) != nu:
        raise SingularSystem(
            f"dimension mismatch: {len(cols)} + {len(curve_cols)} != {nu} vertices")
    f1 = np.zeros((nu, len(cols)), dtype=np.int64)
    for c, col in enumerate(cols):
        for v, val in col.items():
            f1[v, c] = val
    # Im(f1) is orthogonal to Im(f2) under the standard inner product
    for c, col in enumerate(cols):
        for cc in curve_cols:
            if sum(val for v, val in col.items() if v in cc):
                raise SingularSystem(f"f1(region {region_ids[c]}) is not orthogonal to f2")
    inverse = _invert(cols + curve_cols, nu)
    return ConnectionSolver(diagram, region_ids, curve_ids, f1, inverse)


def _difference(x, y):
    vec = {}
    for v in y:
        vec[v] = vec.get(v, 0) + 1
    for v in x:
        vec[v] = vec.get(v, 0) - 1
    return vec


def domain_vector(solver, x, y):
    """Integer coefficient vector over ``solver.region_ids``, or None."""
    coords = solver.solve(_difference(x, y))
    k = len(solver.region_ids)
    if any(coords[k:]):
        return None
    if any(c.denominator != 1 for c in coords[:k]):
        return None
    vec = np.array([int(c) for c in coords[:k]], dtype=np.int64)
    _check_boundary(solver, vec, x, y)
    return vec


def _check_boundary(solver, vec, x, y):
    got = solver.f1 @ vec
    want = np.zeros(solver.nu, dtype=np.int64)
    for v in y:
        want[v] += 1
    for v in x:
        want[v] -= 1
    if not np.array_equal(got, want):
        raise AssertionError("domain boundary does not match y - x")


def domain_between(solver, x, y):
    """The domain from ``x`` to ``y``; returns :class:`NoDomain` if none."""
    vec = domain_vector(solver, tuple(x), tuple(y))
    if vec is None:
        return NoDomain
    return Domain({r: int(a) for r, a in zip(solver.region_ids, vec) if a})


# ----------------------------------------------------------------------
# gradings

class _GradingData:
    """Per-diagram lookups for Euler measures and corner coefficients."""

    def __init__(self, solver):
        d = solver.diagram
        index = {r: k for k, r in enumerate(solver.region_ids)}
        self.size = len(solver.region_ids)
        # 4 * e(R) as integers
        self.e4 = np.array([int(d.regions[r].euler_measure * 4) for r in solver.region_ids],
                           dtype=np.int64)
        # corner_idx[v] lists the X1 indices of the four corners at v (-1 for Z)
        self.corner_idx = np.full((d.num_vertices, 4), -1, dtype=np.int64)
        for v in range(d.num_vertices):
            for q in range(4):
                self.corner_idx[v, q] = index.get(d.region_of_corner((v, q)), -1)
        w = d.w_region
        self.w_index = index.get(w, -1)

    def point_sum4(self, vec, points):
        """4 * n_x(D): sum over points of the four corner coefficients."""
        padded = np.append(vec, 0)
        return int(padded[self.corner_idx[list(points)]].sum())


def relative_gradings(solver, generators, base=None):
    """Grade every generator relative to ``base`` (default: the smallest)."""
    gens = [tuple(g.points if isinstance(g, Generator) else g) for g in generators]
    if not gens:
        return [], {}
    base = tuple(base) if base is not None else min(gens)
    data = _GradingData(solver)
    out = []
    vectors = {}
    for x in gens:
        vec = domain_vector(solver, x, base)
        if vec is None:
            raise NonIntegralGrading(f"no domain connects {x} to the base generator")
        m4 = int(data.e4 @ vec) + data.point_sum4(vec, x) + data.point_sum4(vec, base)
        if m4 % 4:
            raise NonIntegralGrading(f"Maslov index of {x} is {Fraction(m4, 4)}")
        nw = int(vec[data.w_index]) if data.w_index >= 0 else 0
        # M(x) - M(base) = mu(D) and A(x) - A(base) = n_w(D), D from x to base
        out.append(Generator(x, m4 // 4, nw))
        vectors[x] = vec
    return out, vectors


# ----------------------------------------------------------------------
# differential and homology

@dataclass
class ChainComplex:
    generators: list
    boundary: list      # boundary[i] is a bitmask over generator indices

    def classes(self):
        out = {}
        for i, g in enumerate(self.generators):
            out.setdefault((g.rel_alexander, g.rel_maslov), []).append(i)
        return out


def differential(solver, graded, vectors):
    """F2 boundary: x -> y for each positive Maslov-index-1 domain avoiding
    z and w between generators differing in at most two coordinates."""
    gens = list(graded)
    data = _GradingData(solver)
    w = data.w_index
    g = len(solver.diagram.alpha)
    buckets = {}
    for i, x in enumerate(gens):
        pts = x.points
        if g == 1:
            buckets.setdefault((), []).append(i)
            continue
        for a in range(g):
            for b in range(a + 1, g):
                key = (a, b, pts[:a] + pts[a + 1:b] + pts[b + 1:])
                buckets.setdefault(key, []).append(i)
    pairs = set()
    for members in buckets.values():
        for i in members:
            for j in members:
                if i == j:
                    continue
                x, y = gens[i], gens[j]
                if x.rel_maslov - y.rel_maslov != 1 or x.rel_alexander != y.rel_alexander:
                    continue
                pairs.add((i, j))
    boundary = [0] * len(gens)
    for i, j in sorted(pairs):
        x, y = gens[i], gens[j]
        dom = vectors[x.points] - vectors[y.points]
        if (dom < 0).any() or (w >= 0 and dom[w] != 0):
            continue
        boundary[i] |= 1 << j
    # d o d = 0
    for i in range(len(gens)):
        acc = 0
        mask = boundary[i]
        while mask:
            low = mask & -mask
            acc ^= boundary[low.bit_length() - 1]
            mask ^= low
        if acc:
            raise AssertionError(f"d^2 != 0 at generator {gens[i].points}")
    return ChainComplex(gens, boundary)


def _rank_f2(rows):
    rank = 0
    pivots = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


@dataclass
class HFKResult:
    ranks: dict           # (alexander, maslov) -> rank
    generators: int
    normalization: str = "relative"

    @property
    def total_rank(self):
        return sum(self.ranks.values())

    @property
    def euler(self):
        """Graded Euler characteristic as {alexander power: coefficient}."""
        out = {}
        for (a, m), r in self.ranks.items():
            out[a] = out.get(a, 0) + (-1) ** (m % 2) * r
        return {a: c for a, c in sorted(out.items()) if c}

    def to_json(self):
        return {
            "generators": self.generators,
            "ranks": [{"a": a, "m": m, "rank": r} for (a, m), r in sorted(self.ranks.items())],
            "euler": [[c, a] for a, c in self.euler.items()],
            "normalization": self.normalization,
        }


def hfk_ranks(complex_, normalize="relative"):
    classes = complex_.classes()
    out_rank = {}
    for key, members in classes.items():
        out_rank[key] = _rank_f2([complex_.boundary[i] for i in members])
    ranks = {}
    for (a, m), members in classes.items():
        r = len(members) - out_rank[(a, m)] - out_rank.get((a, m + 1), 0)
        if r:
            ranks[(a, m)] = r
    if ranks:
        a0 = min(a for a, _ in ranks)
        m0 = min(m for _, m in ranks)
        if normalize == "symmetric":
            total = sum(ranks.values())
            weighted = sum(a * r for (a, _), r in ranks.items())
            if weighted % total == 0:
                a0 = weighted // total
            else:
                a0 = min(a for a, _ in ranks)
                normalize = "relative"
        ranks = {(a - a0, m - m0): r for (a, m), r in ranks.items()}
    return HFKResult(dict(sorted(ranks.items())), len(complex_.generators), normalize)


def compute_hfk(diagram, normalize="relative"):
    """Full pipeline on a nice diagram: generators, gradings, d, homology."""
    solver = build_connection_solver(diagram)
    gens = enumerate_matchings(diagram)
    graded, vectors = relative_gradings(solver, gens)
    cx = differential(solver, graded, vectors)
    return hfk_ranks(cx, normalize)
