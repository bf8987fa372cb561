"""Two-coloured spider diagrams with rotation systems.

A diagram is a map from ``n_lower`` bottom legs to ``n_upper`` top legs.
Each vertex has ``degree`` slots numbered clockwise; boundary legs attach to
slots directly, so they count towards the degree.  Endpoints are tuples:

* ``("L", i)`` / ``("U", i)`` for the i-th lower / upper leg (0-based),
* ``("V", v, s)`` for slot ``s`` of vertex ``v``.

A spider drawn with its upper legs on top has slot order
``U0, U1, ..., L(k-1), ..., L0``: clockwise starting from the top left.
"""

from __future__ import annotations

import json
import random
import re
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

from .partitions import SetPartition
from .scalar import ExactScalar

BLACK = "black"
WHITE = "white"
COLORS = (BLACK, WHITE)


class DiagramFormatError(ValueError):
    """Malformed diagram text."""


@dataclass(frozen=True)
class Prefactor:
    """``coeff * sqrt(N)**n_half_exp`` with ``N`` left symbolic."""

    coeff: Fraction = Fraction(1)
    n_half_exp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0:
            object.__setattr__(self, "n_half_exp", 0)

    def at(self, N: int) -> ExactScalar:
        return ExactScalar(self.coeff) * ExactScalar.power(N, self.n_half_exp)

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        return Prefactor(self.coeff * other.coeff, self.n_half_exp + other.n_half_exp)

    def __str__(self):
        return f"{self.coeff} * sqrtN^{self.n_half_exp}"

    _PATTERN = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*(?:\*\s*sqrtN\s*\^\s*\(?\s*(-?\d+)\s*\)?)?\s*$")

    @classmethod
    def parse(cls, text: str) -> "Prefactor":
        m = cls._PATTERN.match(str(text))
        if not m:
            raise DiagramFormatError(f"bad prefactor {text!r}")
        return cls(Fraction(m.group(1)), int(m.group(2) or 0))


@dataclass(frozen=True)
class Vertex:
    id: int
    color: str
    degree: int


@dataclass(frozen=True)
class Face:
    """A face as the cyclic sequence of darts (directed edge sides) bounding it."""

    darts: tuple


def _edge_key(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Diagram:
    n_lower: int
    n_upper: int
    vertices: tuple = ()
    edges: tuple = ()
    loops: int = 0
    prefactor: Prefactor = field(default_factory=Prefactor)
    planar: bool = True

    def __post_init__(self):
        verts = tuple(sorted(self.vertices, key=lambda v: v.id))
        edges = tuple(sorted(_edge_key(a, b) for a, b in self.edges))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        self._validate()

    # basic queries

    @cached_property
    def partner(self) -> dict:
        out = {}
        for a, b in self.edges:
            out[a] = b
            out[b] = a
        return out

    @cached_property
    def vertex_map(self) -> dict:
        return {v.id: v for v in self.vertices}

    @property
    def boundary(self) -> list:
        return [("L", i) for i in range(self.n_lower)] + [("U", i) for i in range(self.n_upper)]

    @property
    def is_closed(self) -> bool:
        return self.n_lower == 0 and self.n_upper == 0

    @property
    def num_edges(self) -> int:
        """Edges plus bare loops."""
        return len(self.edges) + self.loops

    @property
    def slot(self) -> tuple[int, int]:
        return (self.n_lower, self.n_upper)

    def _validate(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("vertex ids must be unique")
        for v in self.vertices:
            if v.color not in COLORS:
                raise ValueError(f"unknown colour {v.color!r}")
            if v.degree < 0:
                raise ValueError("negative degree")
        if self.loops < 0:
            raise ValueError("negative loop count")
        expected = set(self.boundary)
        for v in self.vertices:
            expected.update(("V", v.id, s) for s in range(v.degree))
        used = [e for pair in self.edges for e in pair]
        if len(used) != len(set(used)) or set(used) != expected:
            raise ValueError("every slot and boundary leg must be used by exactly one edge end")
        if any(a == b for a, b in self.edges):
            raise ValueError("an edge needs two distinct ends")
        if self.planar and not _euler_ok(self):
            raise ValueError("rotation system is not planar")

    def __str__(self):
        return self.to_text()


# -- generators ---------------------------------------------------------------


def _spider_slot_targets(k: int, l: int) -> list:
    return [("U", j) for j in range(l)] + [("L", i) for i in reversed(range(k))]


def spider(color: str, k: int, l: int) -> Diagram:
    """A single vertex with ``k`` lower and ``l`` upper legs."""
    targets = _spider_slot_targets(k, l)
    edges = tuple((("V", 0, s), t) for s, t in enumerate(targets))
    return Diagram(k, l, (Vertex(0, color, k + l),), edges)


def black_spider(k: int, l: int) -> Diagram:
    return spider(BLACK, k, l)


def white_spider(k: int, l: int) -> Diagram:
    return spider(WHITE, k, l)


def identity(n: int) -> Diagram:
    return Diagram(n, n, (), tuple((("L", i), ("U", i)) for i in range(n)))


def cup() -> Diagram:
    return Diagram(0, 2, (), ((("U", 0), ("U", 1)),))


def cap() -> Diagram:
    return Diagram(2, 0, (), ((("L", 0), ("L", 1)),))


def crossing() -> Diagram:
    return Diagram(2, 2, (), ((("L", 0), ("U", 1)), (("L", 1), ("U", 0))), planar=False)


def empty() -> Diagram:
    return Diagram(0, 0)


def scalar_diagram(prefactor: Prefactor) -> Diagram:
    return Diagram(0, 0, prefactor=prefactor)


def with_prefactor(d: Diagram, p: Prefactor) -> Diagram:
    return replace(d, prefactor=d.prefactor * p)


# -- categorical operations ---------------------------------------------------


def _relabel_vertices(d: Diagram, offset: int):
    order = {v.id: i + offset for i, v in enumerate(d.vertices)}
    verts = [Vertex(order[v.id], v.color, v.degree) for v in d.vertices]

    def ep(e):
        return ("V", order[e[1]], e[2]) if e[0] == "V" else e

    return verts, [(ep(a), ep(b)) for a, b in d.edges]


def compose(f: Diagram, g: Diagram) -> Diagram:
    """``f`` after ``g``: g's upper legs are glued to f's lower legs."""
    if g.n_upper != f.n_lower:
        raise ValueError(f"arity mismatch: {g.slot} then {f.slot}")
    gv, ge = _relabel_vertices(g, 0)
    fv, fe = _relabel_vertices(f, len(gv))

    def mark(e, side):
        if side == "g" and e[0] == "U":
            return ("Mg", e[1])
        if side == "f" and e[0] == "L":
            return ("Mf", e[1])
        return e

    partner = {}
    for side, edges in (("g", ge), ("f", fe)):
        for a, b in edges:
            a, b = mark(a, side), mark(b, side)
            partner[a], partner[b] = b, a
    through = {}
    for i in range(g.n_upper):
        through[("Mg", i)] = ("Mf", i)
        through[("Mf", i)] = ("Mg", i)

    seen = set()
    edges = []
    for x in partner:
        if x in through or x in seen:
            continue
        y = partner[x]
        while y in through:
            seen.add(y)
            y = through[y]
            seen.add(y)
            y = partner[y]
        seen.update((x, y))
        edges.append((x, y))
    loops = f.loops + g.loops
    for x in through:
        if x in seen:
            continue
        loops += 1
        y = x
        while y not in seen:
            seen.add(y)
            y = through[y]
            seen.add(y)
            y = partner[y]
    return Diagram(g.n_lower, f.n_upper, tuple(gv + fv), tuple(edges), loops,
                   f.prefactor * g.prefactor, f.planar and g.planar)


def tensor(f: Diagram, g: Diagram) -> Diagram:
    """``f`` on the left, ``g`` on the right."""
    fv, fe = _relabel_vertices(f, 0)
    gv, ge = _relabel_vertices(g, len(fv))

    def shift(e):
        if e[0] == "L":
            return ("L", e[1] + f.n_lower)
        if e[0] == "U":
            return ("U", e[1] + f.n_upper)
        return e

    edges = fe + [(shift(a), shift(b)) for a, b in ge]
    return Diagram(f.n_lower + g.n_lower, f.n_upper + g.n_upper, tuple(fv + gv), tuple(edges),
                   f.loops + g.loops, f.prefactor * g.prefactor, f.planar and g.planar)


def dagger(d: Diagram) -> Diagram:
    deg = {v.id: v.degree for v in d.vertices}

    def ep(e):
        if e[0] == "L":
            return ("U", e[1])
        if e[0] == "U":
            return ("L", e[1])
        return ("V", e[1], deg[e[1]] - 1 - e[2])

    return Diagram(d.n_upper, d.n_lower, d.vertices, tuple((ep(a), ep(b)) for a, b in d.edges),
                   d.loops, d.prefactor, d.planar)


def tensor_all(parts) -> Diagram:
    out = empty()
    for p in parts:
        out = tensor(out, p)
    return out


def compose_all(*parts) -> Diagram:
    """``compose_all(a, b, c) == compose(a, compose(b, c))``."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = compose(p, out)
    return out


def _rewire(d: Diagram, mapping, n_lower: int, n_upper: int) -> Diagram:
    def ep(e):
        return mapping(e) if e[0] in ("L", "U") else e

    return Diagram(n_lower, n_upper, d.vertices, tuple((ep(a), ep(b)) for a, b in d.edges),
                   d.loops, d.prefactor, d.planar)


def to_state(d: Diagram) -> Diagram:
    """Bend the lower legs up on the left: (k, l) becomes (0, k+l).

    The resulting upper order is ``L(k-1), ..., L0, U0, ..., U(l-1)``.
    """
    k = d.n_lower
    return _rewire(d, lambda e: ("U", k - 1 - e[1]) if e[0] == "L" else ("U", k + e[1]), 0, k + d.n_upper)


def from_state(s: Diagram, k: int) -> Diagram:
    """Inverse of :func:`to_state`."""
    if s.n_lower != 0 or not 0 <= k <= s.n_upper:
        raise ValueError("from_state needs a (0, n) diagram and 0 <= k <= n")
    return _rewire(s, lambda e: ("L", k - 1 - e[1]) if e[1] < k else ("U", e[1] - k), k, s.n_upper - k)


def rotate(s: Diagram) -> Diagram:
    """Move the leftmost upper leg of a (0, n) diagram to the right end."""
    n = s.n_upper
    if s.n_lower != 0:
        raise ValueError("rotate acts on (0, n) diagrams")
    return _rewire(s, lambda e: ("U", (e[1] - 1) % n), 0, n)


def reverse(s: Diagram) -> Diagram:
    """Mirror a (0, n) diagram (dagger, then bend back)."""
    return to_state(dagger(s))


def cap_legs(s: Diagram, i: int) -> Diagram:
    """Join upper legs ``i`` and ``i+1`` of a (0, n) diagram."""
    n = s.n_upper
    if s.n_lower != 0 or not 0 <= i < n - 1:
        raise ValueError("cap_legs needs a (0, n) diagram and 0 <= i < n-1")
    caps = tensor_all([identity(i), cap(), identity(n - i - 2)])
    return compose(caps, s)


# -- faces and planarity ------------------------------------------------------


def _sigma(d: Diagram):
    """Clockwise successor of each dart around its vertex; the boundary is one outer vertex."""
    cycle = [("L", i) for i in range(d.n_lower)] + [("U", j) for j in reversed(range(d.n_upper))]
    nxt = {cycle[i]: cycle[(i + 1) % len(cycle)] for i in range(len(cycle))}
    deg = {v.id: v.degree for v in d.vertices}

    def sigma(x):
        if x[0] == "V":
            return ("V", x[1], (x[2] + 1) % deg[x[1]])
        return nxt[x]

    return sigma, cycle


def _trace_faces(d: Diagram) -> list[tuple]:
    sigma, _ = _sigma(d)
    partner = d.partner
    seen = set()
    out = []
    for start in sorted(partner):
        if start in seen:
            continue
        walk = []
        x = start
        while x not in seen:
            seen.add(x)
            walk.append(x)
            x = sigma(partner[x])
        out.append(tuple(walk))
    return out


def _components(d: Diagram):
    """Union-find over vertices (boundary counted as one vertex ``B``)."""
    parent = {v.id: v.id for v in d.vertices}
    if d.n_lower + d.n_upper:
        parent["B"] = "B"

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def owner(e):
        return e[1] if e[0] == "V" else "B"

    for a, b in d.edges:
        parent[find(owner(a))] = find(owner(b))
    return find, owner, parent


def _component_stats(d: Diagram) -> dict:
    """Per component ``[V, E, F]`` with faces traced on the sphere."""
    find, owner, parent = _components(d)
    stats = {}
    for x in parent:
        stats.setdefault(find(x), [0, 0, 0])[0] += 1
    for a, _ in d.edges:
        stats[find(owner(a))][1] += 1
    for face in _trace_faces(d):
        stats[find(owner(face[0]))][2] += 1
    for st in stats.values():
        if st[1] == 0:
            st[2] = 1  # an isolated vertex bounds a single face
    return stats


def _euler_ok(d: Diagram) -> bool:
    return all(v - e + f == 2 for v, e, f in _component_stats(d).values())


def faces(d: Diagram) -> list[Face]:
    if not d.planar:
        raise ValueError("faces needs a planar diagram")
    out = [Face(w) for w in _trace_faces(d)]
    for v in d.vertices:
        if v.degree == 0:
            out.append(Face((("V", v.id, None),)))
    for j in range(d.loops):
        out.append(Face((("O", j, 0),)))
        out.append(Face((("O", j, 1),)))
    return out


def euler_counts(d: Diagram) -> dict:
    """V, E, F (traced per component) and the component count; bare loops count as V=E=1."""
    stats = _component_stats(d)
    return {
        "V": sum(s[0] for s in stats.values()) + d.loops,
        "E": sum(s[1] for s in stats.values()) + d.loops,
        "F": sum(s[2] for s in stats.values()) + 2 * d.loops,
        "components": len(stats) + d.loops,
    }


# -- region colouring ---------------------------------------------------------


def region_coloring_pair(d: Diagram) -> tuple[SetPartition, SetPartition]:
    """Pair of non-crossing partitions read off from the 2-coloured faces."""
    if not d.planar:
        raise ValueError("region colouring needs a planar diagram")
    if d.n_lower % 2 or d.n_upper % 2:
        raise ValueError("region colouring needs an even number of legs on each side")
    if any(v.degree % 2 for v in d.vertices):
        raise ValueError("region colouring needs even vertex degrees")
    sigma, cycle = _sigma(d)
    partner = d.partner
    walks = _trace_faces(d)
    face_of = {x: i for i, w in enumerate(walks) for x in w}

    colour = {}
    # the corner (cycle[-1], cycle[0]) is the left region, which stays uncoloured
    roots = ([face_of[cycle[0]]] if cycle else []) + list(range(len(walks)))
    for root in roots:
        if root in colour:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for x in walks[f]:
                g = face_of[partner[x]]
                if g not in colour:
                    colour[g] = 1 - colour[f]
                    queue.append(g)
                elif colour[g] == colour[f]:
                    raise ValueError("faces are not 2-colourable")

    k2, l2 = d.n_lower // 2, d.n_upper // 2
    point_face = [face_of[("L", 2 * i + 1)] for i in range(k2)] + [face_of[("U", 2 * j)] for j in range(l2)]
    if any(colour[f] != 1 for f in point_face):
        raise ValueError("boundary regions are not coloured consistently")

    def partition(col: str) -> SetPartition:
        parent = list(range(len(walks)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v in d.vertices:
            if v.color != col:
                continue
            yellow = [face_of[sigma(("V", v.id, s))] for s in range(v.degree)]
            yellow = [f for f in yellow if colour[f] == 1]
            for f in yellow[1:]:
                parent[find(f)] = find(yellow[0])
        blocks = {}
        for p, f in enumerate(point_face):
            blocks.setdefault(find(f), []).append(p)
        return SetPartition(k2, l2, tuple(tuple(b) for b in blocks.values()))

    return partition(BLACK), partition(WHITE)


# -- canonical code -----------------------------------------------------------


def _bfs_order(d: Diagram, seeds) -> dict:
    """Label vertices in discovery order; each label remembers its entry slot."""
    deg = {v.id: v.degree for v in d.vertices}
    label: dict = {}
    for v0, s0 in seeds:
        if v0 in label:
            continue
        label[v0] = (len(label), s0)
        queue = deque([v0])
        while queue:
            v = queue.popleft()
            off = label[v][1]
            for i in range(deg[v]):
                p = d.partner[("V", v, (off + i) % deg[v])]
                if p[0] == "V" and p[1] not in label:
                    label[p[1]] = (len(label), p[2])
                    queue.append(p[1])
    return label


def _encode(d: Diagram, label: dict) -> tuple:
    deg = {v.id: v.degree for v in d.vertices}

    def enc(e):
        if e[0] != "V":
            return e
        idx, off = label[e[1]]
        return (idx, (e[2] - off) % deg[e[1]])

    order = sorted(label, key=lambda u: label[u][0])
    return tuple(
        (d.vertex_map[u].color, deg[u],
         tuple(enc(d.partner[("V", u, (label[u][1] + i) % deg[u])]) for i in range(deg[u])))
        for u in order
    )


def canonical_code(d: Diagram) -> tuple:
    """A relabelling-invariant code: equal codes mean the same diagram up to vertex ids."""
    seeds = [(p[1], p[2]) for p in (d.partner[b] for b in d.boundary) if p[0] == "V"]
    label = _bfs_order(d, seeds)
    deg = {v.id: v.degree for v in d.vertices}

    def enc(e):
        if e[0] == "V":
            idx, off = label[e[1]]
            return (idx, (e[2] - off) % deg[e[1]])
        return e

    boundary_code = tuple(enc(d.partner[b]) for b in d.boundary)
    bound_code = _encode(d, label)
    done = set(label)
    closed = []
    for v in d.vertices:
        if v.id in done:
            continue
        comp = _bfs_order(d, [(v.id, 0)])
        best = min(_encode(d, _bfs_order(d, [(u, s)])) for u in comp for s in range(max(deg[u], 1)))
        done.update(comp)
        closed.append(best)
    return (d.n_lower, d.n_upper, boundary_code, bound_code, tuple(sorted(closed)),
            d.loops, d.prefactor.coeff, d.prefactor.n_half_exp, d.planar)


def relabelled(d: Diagram) -> Diagram:
    """Renumber vertices 0..V-1 in id order."""
    verts, edges = _relabel_vertices(d, 0)
    return Diagram(d.n_lower, d.n_upper, tuple(verts), tuple(edges), d.loops, d.prefactor, d.planar)


# -- text format --------------------------------------------------------------


def _format_endpoint(e) -> str:
    if e[0] == "L":
        return f"(lower, {e[1] + 1})"
    if e[0] == "U":
        return f"(upper, {e[1] + 1})"
    return f"({e[1]}, {e[2]})"


_ENDPOINT = re.compile(r"^\(\s*(lower|upper|\d+)\s*,\s*(\d+)\s*\)$")


def _parse_endpoint(text: str):
    m = _ENDPOINT.match(str(text).strip())
    if not m:
        raise DiagramFormatError(f"bad endpoint {text!r}")
    a, b = m.group(1), int(m.group(2))
    if a == "lower":
        return ("L", b - 1)
    if a == "upper":
        return ("U", b - 1)
    return ("V", int(a), b)


def to_record(d: Diagram) -> dict:
    return {
        "n_lower": d.n_lower,
        "n_upper": d.n_upper,
        "vertices": [{"id": v.id, "color": v.color, "degree": v.degree} for v in d.vertices],
        "edges": [[_format_endpoint(a), _format_endpoint(b)] for a, b in d.edges],
        "loops": d.loops,
        "prefactor": str(d.prefactor),
        "planar": d.planar,
    }


def to_text(d: Diagram) -> str:
    return json.dumps(to_record(d), indent=2)


Diagram.to_text = to_text


def from_record(data: dict) -> Diagram:
    try:
        verts = tuple(Vertex(int(v["id"]), str(v["color"]), int(v["degree"])) for v in data["vertices"])
        edges = tuple((_parse_endpoint(a), _parse_endpoint(b)) for a, b in data["edges"])
        return Diagram(int(data["n_lower"]), int(data["n_upper"]), verts, edges,
                       int(data.get("loops", 0)), Prefactor.parse(data.get("prefactor", "1")),
                       bool(data.get("planar", True)))
    except DiagramFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramFormatError(str(exc)) from exc


def from_text(text: str) -> Diagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(f"not valid JSON: {exc}") from exc
    return from_record(data)


# -- random generator words ---------------------------------------------------


def random_state(rng: random.Random, max_edges: int, degrees=(1, 2, 3, 4), max_legs: int = 6,
                 colors=COLORS, steps: int = 8) -> Diagram:
    """A random planar (0, n) diagram built by tensoring, rotating and capping generators."""

    def generator():
        if rng.random() < 0.2:
            return cup()
        return spider(rng.choice(colors), 0, rng.choice(degrees))

    d = generator()
    for _ in range(rng.randint(1, steps)):
        op = rng.random()
        g = generator()
        if op < 0.35 and d.n_upper + g.n_upper <= max_legs:
            nxt = tensor(d, g)
        elif op < 0.55 and d.n_upper:
            nxt = rotate(d)
            for _ in range(rng.randrange(d.n_upper)):
                nxt = rotate(nxt)
        elif op < 0.95 and d.n_upper >= 2:
            nxt = cap_legs(d, rng.randrange(d.n_upper - 1))
        else:
            nxt = reverse(d)
        if nxt.num_edges <= max_edges:
            d = nxt
    return d


def random_closed(rng: random.Random, max_edges: int, degrees=(2, 4), colors=COLORS,
                  steps: int = 8, max_legs: int = 6) -> Diagram:
    """A random closed planar diagram (all legs capped off)."""
    d = random_state(rng, max_edges, degrees=degrees, colors=colors, steps=steps, max_legs=max_legs)
    while d.n_upper >= 2:
        d = cap_legs(d, rng.randrange(d.n_upper - 1))
    if d.n_upper == 1:
        d = compose(black_spider(1, 0), d)
    return d
