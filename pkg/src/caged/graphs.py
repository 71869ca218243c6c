"""Construction of glued trees, chains, lotus patches, and related graphs.

A glued tree is grown from a sequence of positive integers X = (x_1, ..., x_d)
with x_d > 1: level 1 is the x_1-shrub (the complete bipartite graph K_{2,x_1}
with its two degree-x_1 vertices marked as roots), and level i joins x_i copies
of the level i-1 tree between a fresh pair of roots.  Growing records, for every
bounded face of the standard planar drawing, the cycle of vertices around it
("plaquettes"); downstream code threads a uniform flux through those faces.

All builders are pure functions returning frozen values.  Vertex ids are
assigned in breadth-first order from the first root, with neighbors visited in
construction order, so identical inputs always produce identical graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import InvalidParameterError

Edge = tuple[int, int]


def check_growth_sequence(x: Sequence[int], *, allow_trailing_one: bool = False) -> tuple[int, ...]:
    """Validate and normalize a growth sequence.

    Entries must be integers >= 1 and, unless ``allow_trailing_one`` (used for
    internal sub-builds), the last entry must be >= 2.
    """
    xs = tuple(int(v) for v in x)
    if len(xs) == 0:
        raise InvalidParameterError("growth sequence must be nonempty")
    if any(v < 1 for v in xs):
        raise InvalidParameterError(f"growth sequence entries must be >= 1, got {xs}")
    if not allow_trailing_one and xs[-1] < 2:
        raise InvalidParameterError(f"last growth entry must be > 1, got {xs}")
    return xs


@dataclass(frozen=True)
class Graph:
    """An undirected graph with optional face and root annotations.

    ``edges`` are (u, v) pairs with u < v.  ``plaquettes`` are closed vertex
    cycles bounding internal faces; consecutive vertices (cyclically) must be
    edges.  ``roles`` optionally classifies vertices (lotus patches), and
    ``cell_bounds`` marks the shared roots of a chain.  ``plaquette_signs``
    records, for lotus patches, the orientation sign each face's flux should
    carry relative to the common flux angle.
    """

    num_vertices: int
    edges: tuple[Edge, ...]
    plaquettes: tuple[tuple[int, ...], ...] = ()
    first_vertex: int | None = None
    last_vertex: int | None = None
    roles: tuple[str, ...] | None = None
    cell_bounds: tuple[int, ...] | None = None
    plaquette_signs: tuple[int, ...] | None = None

    def __post_init__(self):
        seen = set()
        for (u, v) in self.edges:
            if not (0 <= u < v < self.num_vertices):
                raise InvalidParameterError(f"bad edge ({u}, {v}) for {self.num_vertices} vertices")
            if (u, v) in seen:
                raise InvalidParameterError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbor lists, recomputed on demand (graphs here are small)."""
        nbrs: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for (u, v) in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(n)) for n in nbrs)

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.num_vertices
        for (u, v) in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def has_edge(self, u: int, v: int) -> bool:
        a, b = (u, v) if u < v else (v, u)
        return (a, b) in set(self.edges)

    def distances_from(self, source: int) -> list[int]:
        """BFS distances; -1 for unreachable vertices."""
        dist = [-1] * self.num_vertices
        dist[source] = 0
        adj = self.adjacency()
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist


# ---------------------------------------------------------------------------
# Growth layout: the recursive construction, before breadth-first relabeling.
# ---------------------------------------------------------------------------

# Tagged edge: (u, v, level, branch, side) where side is "f" for a coupling of
# a fresh first root into a copy and "l" for a coupling of a copy into a fresh
# last root.  Branches are 1-based.  u < v is NOT guaranteed here; u is the
# vertex on the root side of the coupling.
TaggedEdge = tuple[int, int, int, int, str]


@dataclass(frozen=True)
class GrowthLayout:
    x: tuple[int, ...]
    num_vertices: int
    tagged_edges: tuple[TaggedEdge, ...]
    first: int
    last: int
    plaquettes: tuple[tuple[int, ...], ...]
    left_path: tuple[int, ...]
    right_path: tuple[int, ...]


def _shrub_layout(p: int) -> GrowthLayout:
    edges = []
    for j in range(1, p + 1):
        edges.append((0, j, 1, j, "f"))
        edges.append((j, p + 1, 1, j, "l"))
    plaq = tuple((0, j, p + 1, j + 1) for j in range(1, p))
    return GrowthLayout(
        x=(p,),
        num_vertices=p + 2,
        tagged_edges=tuple(edges),
        first=0,
        last=p + 1,
        plaquettes=plaq,
        left_path=(0, 1, p + 1) if p >= 1 else (0, p + 1),
        right_path=(0, p, p + 1) if p >= 1 else (0, p + 1),
    )


@lru_cache(maxsize=None)
def grow_layout(x: tuple[int, ...]) -> GrowthLayout:
    """Recursive layout of the tree grown by ``x``, in construction order.

    Index 0 is the outermost first root, the x_d copies of the depth d-1
    layout follow contiguously, and the outermost last root comes last.  The
    big faces between adjacent copies at each level are recorded alongside
    each copy's own faces.
    """
    xs = check_growth_sequence(x, allow_trailing_one=True)
    if len(xs) == 1:
        return _shrub_layout(xs[0])
    sub = grow_layout(xs[:-1])
    xi = xs[-1]
    level = len(xs)
    n = sub.num_vertices
    offsets = [1 + j * n for j in range(xi)]
    last = 1 + xi * n

    edges: list[TaggedEdge] = []
    for j, off in enumerate(offsets):
        edges.append((0, off + sub.first, level, j + 1, "f"))
        edges.append((off + sub.last, last, level, j + 1, "l"))
    for off in offsets:
        for (u, v, lev, br, side) in sub.tagged_edges:
            edges.append((u + off, v + off, lev, br, side))

    plaquettes: list[tuple[int, ...]] = []
    for j in range(xi - 1):
        right = tuple(v + offsets[j] for v in sub.right_path)
        left = tuple(v + offsets[j + 1] for v in reversed(sub.left_path))
        plaquettes.append((0,) + right + (last,) + left)
    for off in offsets:
        for cyc in sub.plaquettes:
            plaquettes.append(tuple(v + off for v in cyc))

    return GrowthLayout(
        x=xs,
        num_vertices=2 + xi * n,
        tagged_edges=tuple(edges),
        first=0,
        last=last,
        plaquettes=tuple(plaquettes),
        left_path=(0,) + tuple(v + offsets[0] for v in sub.left_path) + (last,),
        right_path=(0,) + tuple(v + offsets[-1] for v in sub.right_path) + (last,),
    )


@lru_cache(maxsize=None)
def bfs_permutation(x: tuple[int, ...]) -> tuple[int, ...]:
    """perm[growth_id] = breadth-first id, exploring from the first root."""
    layout = grow_layout(x)
    nbrs: list[list[int]] = [[] for _ in range(layout.num_vertices)]
    for (u, v, *_tag) in layout.tagged_edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    for lst in nbrs:
        lst.sort()
    perm = [-1] * layout.num_vertices
    perm[layout.first] = 0
    queue = deque([layout.first])
    count = 1
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if perm[w] < 0:
                perm[w] = count
                count += 1
                queue.append(w)
    if count != layout.num_vertices:
        raise AssertionError("growth layout is not connected")
    return tuple(perm)


def shrub(p: int) -> Graph:
    """The p-shrub K_{2,p}: two degree-p roots joined through p middle vertices."""
    if p < 1:
        raise InvalidParameterError(f"shrub parameter must be >= 1, got {p}")
    lay = _shrub_layout(p)
    edges = tuple(sorted((min(u, v), max(u, v)) for (u, v, *_t) in lay.tagged_edges))
    return Graph(
        num_vertices=lay.num_vertices,
        edges=edges,
        plaquettes=lay.plaquettes,
        first_vertex=lay.first,
        last_vertex=lay.last,
    )


def grow_tree(x: Sequence[int]) -> Graph:
    """The glued tree grown by ``x``, breadth-first relabeled from the first root."""
    xs = check_growth_sequence(x)
    lay = grow_layout(xs)
    perm = bfs_permutation(xs)
    edges = tuple(sorted(
        (min(perm[u], perm[v]), max(perm[u], perm[v])) for (u, v, *_t) in lay.tagged_edges
    ))
    plaq = tuple(tuple(perm[v] for v in cyc) for cyc in lay.plaquettes)
    return Graph(
        num_vertices=lay.num_vertices,
        edges=edges,
        plaquettes=plaq,
        first_vertex=perm[lay.first],
        last_vertex=perm[lay.last],
    )


def tree_vertex_count(x: Sequence[int]) -> int:
    """Vertex count N_i = x_i * N_{i-1} + 2 with N_1 = x_1 + 2."""
    xs = check_growth_sequence(x, allow_trailing_one=True)
    n = xs[0] + 2
    for v in xs[1:]:
        n = v * n + 2
    return n


def tree_edge_count(x: Sequence[int]) -> int:
    xs = check_growth_sequence(x, allow_trailing_one=True)
    e = 2 * xs[0]
    for v in xs[1:]:
        e = v * (e + 2)
    return e


def average_degree(g: Graph) -> Fraction:
    """Average vertex degree 2|E| / |V| as an exact rational."""
    if g.num_vertices == 0:
        raise InvalidParameterError("average degree of an empty graph is undefined")
    return Fraction(2 * g.num_edges, g.num_vertices)


def replace_edges(
    g: Graph,
    marked: Iterable[Edge],
    trees: Mapping[Edge, Sequence[int]],
) -> Graph:
    """Splice a glued tree across each marked edge of ``g``.

    Each marked edge (u, v) is removed; a fresh tree grown by ``trees[(u,v)]``
    is added with disjoint vertex ids, its first root joined to u and its last
    root joined to v by new edges.  Faces of ``g`` that used a removed edge are
    dropped; the spliced trees contribute their own faces.
    """
    edge_set = set(g.edges)
    norm = []
    for (u, v) in marked:
        e = (u, v) if u < v else (v, u)
        if e not in edge_set:
            raise InvalidParameterError(f"marked edge {e} is not an edge of the graph")
        norm.append(e)
    norm = sorted(set(norm))

    removed = set(norm)
    edges = [e for e in g.edges if e not in removed]
    removed_pairs = removed | {(v, u) for (u, v) in removed}
    plaquettes = [
        cyc for cyc in g.plaquettes
        if not any((cyc[i], cyc[(i + 1) % len(cyc)]) in removed_pairs for i in range(len(cyc)))
    ]

    base = g.num_vertices
    for (u, v) in norm:
        t = grow_tree(trees[(u, v)])
        edges.extend((a + base, b + base) for (a, b) in t.edges)
        plaquettes.extend(tuple(w + base for w in cyc) for cyc in t.plaquettes)
        edges.append(tuple(sorted((u, base + t.first_vertex))))
        edges.append(tuple(sorted((v, base + t.last_vertex))))
        base += t.num_vertices

    return Graph(
        num_vertices=base,
        edges=tuple(sorted(edges)),
        plaquettes=tuple(plaquettes),
        first_vertex=g.first_vertex,
        last_vertex=g.last_vertex,
    )


def chain_graph(x: Sequence[int], cells: int) -> Graph:
    """A finite open chain of ``cells`` glued trees joined root to root.

    The last root of cell c is identified with the first root of cell c+1;
    ``cell_bounds`` lists the resulting shared roots (including the two ends).
    """
    xs = check_growth_sequence(x)
    if cells < 1:
        raise InvalidParameterError(f"cells must be >= 1, got {cells}")
    t = grow_tree(xs)
    if t.last_vertex != t.num_vertices - 1:
        raise AssertionError("breadth-first relabeling must place the last root last")
    stride = t.num_vertices - 1
    edges = []
    plaquettes = []
    for c in range(cells):
        off = c * stride
        edges.extend((u + off, v + off) for (u, v) in t.edges)
        plaquettes.extend(tuple(w + off for w in cyc) for cyc in t.plaquettes)
    return Graph(
        num_vertices=cells * stride + 1,
        edges=tuple(sorted(edges)),
        plaquettes=tuple(plaquettes),
        first_vertex=0,
        last_vertex=cells * stride,
        cell_bounds=tuple(c * stride for c in range(cells + 1)),
    )


def chain_cell_of_vertex(g: Graph, v: int) -> int:
    """Cell index of a chain vertex; shared roots belong to the lower cell."""
    if g.cell_bounds is None:
        raise InvalidParameterError("graph does not carry chain cell marks")
    stride = g.cell_bounds[1] - g.cell_bounds[0]
    return min(v // stride, len(g.cell_bounds) - 2) if v > 0 else 0


# ---------------------------------------------------------------------------
# Lotus patches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LotusSpec:
    """Parameters of a lotus patch.

    ``kind``: "first" tiles {sides, 3} with polygons split into 2*sides
    shrub rhombi around a hub skeleton; "second" tiles {sides, tiling_q}
    (both even) with a star of shrubs from the polygon center to its corners.
    ``generations`` counts tile rings (1 = a single tile).
    """

    kind: str
    sides: int
    shrub_p: int = 2
    tiling_q: int = 3
    generations: int = 1

    def validate(self):
        if self.kind not in ("first", "second"):
            raise InvalidParameterError(f"unknown lotus kind {self.kind!r}")
        if self.shrub_p < 2:
            raise InvalidParameterError("lotus shrubs need p >= 2")
        if self.generations < 1:
            raise InvalidParameterError("generations must be >= 1")
        if self.kind == "first":
            if self.sides < 6 or self.tiling_q != 3:
                raise InvalidParameterError(
                    "first-kind lotus requires sides >= 6 and tiling_q == 3")
        else:
            if self.sides < 4 or self.sides % 2 != 0 or self.tiling_q < 4 or self.tiling_q % 2 != 0:
                raise InvalidParameterError(
                    "second-kind lotus requires even sides >= 4 and even tiling_q >= 4")


@dataclass
class _Side:
    corners: tuple[int, int]
    midpoint: int | None
    tiles: list[int] = field(default_factory=list)
    flank: list[int] = field(default_factory=list)  # second kind: adjacent shrub interior per tile


class _LotusBuilder:
    """Incremental patch assembly with corner-fan bookkeeping.

    Around every corner the incident sides form a rotational arc; each placed
    tile fills the wedge between two consecutive sides.  A new tile walks the
    boundary of its polygon, reusing an existing side whenever the corner fan
    is already full (tiling_q sides), which closes rings deterministically.
    """

    def __init__(self, spec: LotusSpec):
        spec.validate()
        self.spec = spec
        self.roles: list[str] = []
        self.edges: set[Edge] = set()
        self.plaquettes: list[tuple[int, ...]] = []
        self.signs: list[int] = []
        self.sides: list[_Side] = []
        self.arcs: dict[int, list[int]] = {}  # corner vertex -> side ids in fan order
        self.tile_count = 0

    def vertex(self, role: str) -> int:
        self.roles.append(role)
        return len(self.roles) - 1

    def edge(self, u: int, v: int):
        self.edges.add((u, v) if u < v else (v, u))

    def face(self, cycle: tuple[int, ...], sign: int):
        self.plaquettes.append(cycle)
        self.signs.append(sign)

    def _extend_arc(
        self,
        corner: int,
        prev_sid: int,
        *,
        allow_reuse: bool,
        anchored: int | None = None,
        anchor_prev: int | None = None,
    ) -> int:
        """Advance the fan at ``corner`` past ``prev_sid`` for the tile being placed.

        The tile occupies the wedge at the arc end where ``prev_sid`` sits.
        When the fan already holds tiling_q sides the opposite end side is
        reused (ring closure); otherwise a fresh side is created there, ending
        at a fresh corner or at ``anchored``.
        """
        arc = self.arcs[corner]
        if not arc or prev_sid not in (arc[0], arc[-1]):
            raise AssertionError("tile attached at an interior fan side")
        at_tail = prev_sid == arc[-1]
        if allow_reuse and len(arc) == self.spec.tiling_q:
            return arc[0] if at_tail else arc[-1]
        far = self.vertex("corner") if anchored is None else anchored
        mid = self.vertex("midpoint") if self.spec.kind == "first" else None
        sid = len(self.sides)
        self.sides.append(_Side(corners=(corner, far), midpoint=mid))
        if at_tail:
            arc.append(sid)
        else:
            arc.insert(0, sid)
        if anchored is None:
            self.arcs[far] = [sid]
        else:
            arc2 = self.arcs[anchored]
            if anchor_prev == arc2[-1]:
                arc2.append(sid)
            elif anchor_prev == arc2[0]:
                arc2.insert(0, sid)
            else:
                raise AssertionError("anchor side is not at a fan end")
        return sid

    def seed_tile(self):
        n = self.spec.sides
        corners = [self.vertex("corner") for _ in range(n)]
        sids = []
        for i in range(n):
            a, b = corners[i], corners[(i + 1) % n]
            m = self.vertex("midpoint") if self.spec.kind == "first" else None
            sid = len(self.sides)
            self.sides.append(_Side(corners=(a, b), midpoint=m))
            sids.append(sid)
        for i, c in enumerate(corners):
            self.arcs[c] = [sids[(i - 1) % n], sids[i]]
        self._fill_tile(sids, [self.sides[s].corners for s in sids])

    def attach_tile(self, sid0: int):
        """Place a tile across frontier side ``sid0``.

        The tile boundary is walked in both directions from the shared side,
        reusing existing sides while corner fans are full, then creating fresh
        sides through new territory.
        """
        n = self.spec.sides
        side0 = self.sides[sid0]
        if len(side0.tiles) != 1:
            return
        a, b = side0.corners
        sids: list[int] = [-1] * n
        orient: list[tuple[int, int]] = [(-1, -1)] * n
        sids[0] = sid0
        orient[0] = (b, a)  # traversed opposite to the tile that created it

        fwd_corner, fwd_prev = a, sid0
        j = 1
        while j < n - 1 and len(self.arcs[fwd_corner]) == self.spec.tiling_q:
            sid = self._extend_arc(fwd_corner, fwd_prev, allow_reuse=True)
            far = [c for c in self.sides[sid].corners if c != fwd_corner][0]
            sids[j] = sid
            orient[j] = (fwd_corner, far)
            fwd_corner, fwd_prev = far, sid
            j += 1
        bwd_corner, bwd_prev = b, sid0
        k = n - 1
        while k > j and len(self.arcs[bwd_corner]) == self.spec.tiling_q:
            sid = self._extend_arc(bwd_corner, bwd_prev, allow_reuse=True)
            far = [c for c in self.sides[sid].corners if c != bwd_corner][0]
            sids[k] = sid
            orient[k] = (far, bwd_corner)
            bwd_corner, bwd_prev = far, sid
            k -= 1

        if j <= k:
            cur, prev = fwd_corner, fwd_prev
            for t in range(j, k + 1):
                last = t == k
                sid = self._extend_arc(
                    cur, prev, allow_reuse=False,
                    anchored=bwd_corner if last else None,
                    anchor_prev=bwd_prev if last else None)
                far = [c for c in self.sides[sid].corners if c != cur][0]
                sids[t] = sid
                orient[t] = (cur, far)
                cur, prev = far, sid
            if cur != bwd_corner:
                raise AssertionError("tile boundary walk failed to close")
        if any(s < 0 for s in sids):
            raise AssertionError("tile boundary walk left unresolved sides")
        self._fill_tile(sids, orient)

    def _fill_tile(self, sids: list[int], orient: list[tuple[int, int]]):
        tile = self.tile_count
        self.tile_count += 1
        if self.spec.kind == "first":
            self._fill_first_kind(sids, orient, tile)
        else:
            self._fill_second_kind(sids, orient, tile)
        for sid in sids:
            self.sides[sid].tiles.append(tile)

    def _fill_first_kind(self, sids, orient, tile):
        n, p = self.spec.sides, self.spec.shrub_p
        corners = [orient[i][0] for i in range(n)]
        mids = [self.sides[sids[i]].midpoint for i in range(n)]
        c = self.vertex("center")
        ring = [self.vertex("interior") for _ in range(n)]  # shared between adjacent hub shrubs
        # hub shrubs: center <-> side midpoint, interiors [ring[i-1], fresh.., ring[i]]
        for i in range(n):
            inner = [ring[i - 1]] + [self.vertex("interior") for _ in range(p - 2)] + [ring[i]]
            for t in inner:
                self.edge(c, t)
                self.edge(mids[i], t)
            for t0, t1 in zip(inner, inner[1:]):
                self.face((c, t0, mids[i], t1), +1)
        # rim shrubs: midpoint <-> next midpoint around the shared corner
        for i in range(n):
            m0, m1 = mids[i], mids[(i + 1) % n]
            v = corners[(i + 1) % n]
            outer = [ring[i]] + [self.vertex("interior") for _ in range(p - 2)] + [v]
            for t in outer:
                self.edge(m0, t)
                self.edge(m1, t)
            for t0, t1 in zip(outer, outer[1:]):
                self.face((m0, t0, m1, t1), -1)

    def _fill_second_kind(self, sids, orient, tile):
        n, p = self.spec.sides, self.spec.shrub_p
        corners = [orient[i][0] for i in range(n)]
        c = self.vertex("center")
        ring = [self.vertex("interior") for _ in range(n)]  # ring[i] between corner i and i+1
        interiors = []
        for i in range(n):
            inner = [ring[i - 1]] + [self.vertex("interior") for _ in range(p - 2)] + [ring[i]]
            interiors.append(inner)
            for t in inner:
                self.edge(c, t)
                self.edge(corners[i], t)
            for t0, t1 in zip(inner, inner[1:]):
                self.face((c, t0, corners[i], t1), +1 if i % 2 == 0 else -1)
        # faces shared with an already-placed neighbor across each side
        for i in range(n):
            sid = sids[i]
            a, b = orient[i]  # ring[i] is adjacent to corners i and i+1 = (a_next)
            z = ring[i]
            side = self.sides[sid]
            if side.flank:
                z_other = side.flank[0]
                self.face((a, z, b, z_other), +1)
            side.flank.append(z)

    def build(self) -> Graph:
        spec = self.spec
        self.seed_tile()
        for _gen in range(1, spec.generations):
            frontier = [i for i, s in enumerate(self.sides) if len(s.tiles) == 1]
            for sid in frontier:
                if len(self.sides[sid].tiles) == 1:
                    self.attach_tile(sid)
        return Graph(
            num_vertices=len(self.roles),
            edges=tuple(sorted(self.edges)),
            plaquettes=tuple(self.plaquettes),
            roles=tuple(self.roles),
            plaquette_signs=tuple(self.signs),
        )


def lotus_patch(spec: LotusSpec) -> Graph:
    """A finite lotus patch grown ring by ring from a seed tile."""
    return _LotusBuilder(spec).build()


def lotus_hubs(g: Graph) -> tuple[int, ...]:
    """Vertices that carry shrub roots in a lotus patch (centers and, for the
    first kind, side midpoints; for the second kind, centers and corners)."""
    if g.roles is None:
        raise InvalidParameterError("graph does not carry lotus roles")
    want = {"center", "midpoint"} if "midpoint" in g.roles else {"center", "corner"}
    return tuple(i for i, r in enumerate(g.roles) if r in want)


# ---------------------------------------------------------------------------
# Ordered factorizations
# ---------------------------------------------------------------------------


def _divisors(m: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d != m // d:
                large.append(m // d)
        d += 1
    return small + large[::-1]


def ordered_factorizations(m: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """All ordered factorizations of ``m`` into factors > 1, with their count.

    The empty product is the unique factorization of 1.  Equivalently the
    count is the number of growth sequences (entries >= 2) whose product is
    ``m``, which also satisfies N(1) = 1, N(m) = sum over proper divisors d
    of N(d).
    """
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    out: list[tuple[int, ...]] = []

    def rec(value: int, prefix: tuple[int, ...]):
        if value == 1:
            out.append(prefix)
            return
        for d in _divisors(value):
            if d > 1:
                rec(value // d, prefix + (d,))

    rec(m, ())
    return len(out), tuple(out)


def ordered_factorization_counts(limit: int) -> list[int]:
    """Count table n -> N(n) for 1 <= n <= limit via the divisor recurrence."""
    if limit < 1:
        raise InvalidParameterError("limit must be >= 1")
    counts = [0] * (limit + 1)
    counts[1] = 1
    for n in range(2, limit + 1):
        total = 0
        for d in _divisors(n):
            if d < n:
                total += counts[d]
        counts[n] = total
    return counts


# ---------------------------------------------------------------------------
# Text format: `graph <num_vertices>` then `e <u> <v>`, `face <v1> ...`,
# `root first <v>` / `root last <v>`; ids are 0-based decimal.
# ---------------------------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"graph {g.num_vertices}"]
    lines += [f"e {u} {v}" for (u, v) in g.edges]
    lines += ["face " + " ".join(str(v) for v in cyc) for cyc in g.plaquettes]
    if g.first_vertex is not None:
        lines.append(f"root first {g.first_vertex}")
    if g.last_vertex is not None:
        lines.append(f"root last {g.last_vertex}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    num = None
    edges: list[Edge] = []
    faces: list[tuple[int, ...]] = []
    first = last = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "graph":
            num = int(parts[1])
        elif parts[0] == "e":
            u, v = int(parts[1]), int(parts[2])
            edges.append((min(u, v), max(u, v)))
        elif parts[0] == "face":
            faces.append(tuple(int(s) for s in parts[1:]))
        elif parts[0] == "root":
            if parts[1] == "first":
                first = int(parts[2])
            elif parts[1] == "last":
                last = int(parts[2])
            else:
                raise InvalidParameterError(f"unknown root kind {parts[1]!r}")
        else:
            raise InvalidParameterError(f"unrecognized line {line!r}")
    if num is None:
        raise InvalidParameterError("missing 'graph <n>' header")
    return Graph(
        num_vertices=num,
        edges=tuple(sorted(set(edges))),
        plaquettes=tuple(faces),
        first_vertex=first,
        last_vertex=last,
    )
