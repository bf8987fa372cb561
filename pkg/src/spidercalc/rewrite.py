"""Spider reduction rules, normal forms and exact scalars of closed diagrams.

Rules (factor in brackets):

* R1 contract an edge between two vertices of the same colour [1]
* R2 delete a self-loop [1]
* R3 delete two parallel edges between a black and a white vertex [1/N]
* R4 delete an isolated vertex [N]
* R5 replace a vertex of total degree two by a plain wire [1]
* R6 delete a bare closed loop [N]

Each rule lowers ``2*edges + vertices``, so rewriting always stops.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .diagram import (
    BLACK,
    WHITE,
    Diagram,
    Prefactor,
    Vertex,
    black_spider,
    canonical_code,
    cap_legs,
    compose,
    cup,
    dagger,
    relabelled,
    reverse,
    rotate,
    tensor,
    white_spider,
)
from .scalar import ExactScalar

PRIORITY = ("R2", "R1", "R3", "R5", "R6", "R4")


class ResidualDiagram(Exception):
    """Normalisation stopped on a non-empty closed diagram."""

    def __init__(self, diagram: Diagram, scalar: ExactScalar):
        super().__init__(f"closed diagram does not reduce to a scalar ({len(diagram.vertices)} vertices left)")
        self.diagram = diagram
        self.scalar = scalar


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    vertices: tuple
    factor: ExactScalar


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def product(self) -> ExactScalar:
        out = ExactScalar(1)
        for s in self.steps:
            out = out * s.factor
        return out

    def to_records(self) -> list:
        return [{"rule": s.rule, "vertices": list(s.vertices), "factor": str(s.factor)} for s in self.steps]


class _Graph:
    """Mutable rotation-system graph used while rewriting."""

    def __init__(self, d: Diagram):
        self.n_lower, self.n_upper = d.n_lower, d.n_upper
        self.prefactor = d.prefactor
        self.loops = d.loops
        self.color = {v.id: v.color for v in d.vertices}
        # darts: ("V", v, s) keep their original names; boundary darts are ("L", i)/("U", i)
        self.rot = {v.id: [("V", v.id, s) for s in range(v.degree)] for v in d.vertices}
        self.owner = {x: v for v, xs in self.rot.items() for x in xs}
        self.partner = dict(d.partner)

    def degree(self, v) -> int:
        return len(self.rot[v])

    def link(self, a, b):
        self.partner[a], self.partner[b] = b, a

    def drop(self, *darts):
        for x in darts:
            v = self.owner.pop(x)
            self.rot[v].remove(x)
            self.partner.pop(x, None)

    def to_diagram(self) -> Diagram:
        name = {}
        verts = []
        for v in sorted(self.rot):
            verts.append(Vertex(v, self.color[v], len(self.rot[v])))
            for s, x in enumerate(self.rot[v]):
                name[x] = ("V", v, s)
        edges = set()
        for a, b in self.partner.items():
            ea, eb = name.get(a, a), name.get(b, b)
            edges.add((ea, eb) if ea <= eb else (eb, ea))
        return Diagram(self.n_lower, self.n_upper, tuple(verts), tuple(edges), self.loops, self.prefactor, True)

    # instance search

    def instances(self, rule: str):
        """All applicable instances of a rule, lowest vertex id first."""
        out = []
        if rule == "R2":
            for v in sorted(self.rot):
                for a in self.rot[v]:
                    b = self.partner[a]
                    if self.owner.get(b) == v and self.rot[v].index(a) < self.rot[v].index(b):
                        out.append((v, a, b))
        elif rule == "R1":
            for u in sorted(self.rot):
                for a in self.rot[u]:
                    b = self.partner[a]
                    w = self.owner.get(b)
                    if w is not None and w != u and self.color[w] == self.color[u] and u < w:
                        out.append((u, w, a, b))
        elif rule == "R3":
            for u in sorted(self.rot):
                if self.color[u] != BLACK:
                    continue
                groups: dict = {}
                for a in self.rot[u]:
                    w = self.owner.get(self.partner[a])
                    if w is not None and self.color[w] == WHITE:
                        groups.setdefault(w, []).append(a)
                for w in sorted(groups):
                    darts = groups[w]
                    if len(darts) < 2:
                        continue
                    pairs = [(darts[i], darts[(i + 1) % len(darts)]) for i in range(len(darts) if len(darts) > 2 else 1)]
                    # pairs bounding an empty digon first
                    pairs.sort(key=lambda p: not self._digon_face(u, w, *p))
                    out.extend((u, w, a1, a2) for a1, a2 in pairs)
        elif rule == "R5":
            # a degree-two vertex carrying a self-loop is left to R2 and R4
            out = [(v,) for v in sorted(self.rot)
                   if self.degree(v) == 2 and self.partner[self.rot[v][0]] != self.rot[v][1]]
        elif rule == "R6":
            out = [()] if self.loops else []
        elif rule == "R4":
            out = [(v,) for v in sorted(self.rot) if self.degree(v) == 0]
        return out

    def _digon_face(self, u, w, a1, a2) -> bool:
        ru, rw = self.rot[u], self.rot[w]
        b1, b2 = self.partner[a1], self.partner[a2]
        nxt_u = ru[(ru.index(a1) + 1) % len(ru)] == a2
        nxt_w = rw[(rw.index(b2) + 1) % len(rw)] == b1
        return nxt_u and nxt_w

    # application

    def apply(self, rule: str, inst, N: int) -> RuleApplication:
        one = ExactScalar(1)
        if rule == "R2":
            v, a, b = inst
            self.drop(a, b)
            return RuleApplication(rule, (v,), one)
        if rule == "R1":
            u, w, a, b = inst
            ru, rw = self.rot[u], self.rot[w]
            i, j = ru.index(a), rw.index(b)
            merged = ru[i + 1:] + ru[:i] + rw[j + 1:] + rw[:j]
            for x in (a, b):
                self.owner.pop(x)
                self.partner.pop(x)
            for x in rw:
                if x != b:
                    self.owner[x] = u
            self.rot[u] = merged
            del self.rot[w], self.color[w]
            return RuleApplication(rule, (u, w), one)
        if rule == "R3":
            u, w, a1, a2 = inst
            b1, b2 = self.partner[a1], self.partner[a2]
            self.drop(a1, a2, b1, b2)
            return RuleApplication(rule, (u, w), ExactScalar(Fraction(1, N)))
        if rule == "R5":
            (v,) = inst
            a, b = self.rot[v]
            pa, pb = self.partner[a], self.partner[b]
            self.drop(a, b)
            self.link(pa, pb)
            del self.rot[v], self.color[v]
            return RuleApplication(rule, (v,), one)
        if rule == "R6":
            self.loops -= 1
            return RuleApplication(rule, (), ExactScalar(N))
        if rule == "R4":
            (v,) = inst
            del self.rot[v], self.color[v]
            return RuleApplication(rule, (v,), ExactScalar(N))
        raise ValueError(f"unknown rule {rule}")


def _run(d: Diagram, N: int, rng: random.Random | None):
    if not d.planar:
        raise ValueError("rewriting needs a planar diagram")
    g = _Graph(d)
    trace = RewriteTrace()
    while True:
        if rng is None:
            choice = None
            for rule in PRIORITY:
                inst = g.instances(rule)
                if inst:
                    choice = (rule, inst[0])
                    break
        else:
            options = [(rule, i) for rule in PRIORITY for i in g.instances(rule)]
            choice = rng.choice(options) if options else None
        if choice is None:
            break
        trace.steps.append(g.apply(choice[0], choice[1], N))
    return g.to_diagram(), trace


def normalize(d: Diagram, N: int) -> tuple[Diagram, ExactScalar]:
    """Rewrite to the reduced form; ``value(d) == scalar * value(normal_form)``."""
    nf, trace = _run(d, N, None)
    return nf, trace.product()


def normalize_with_trace(d: Diagram, N: int, seed=None) -> tuple[Diagram, ExactScalar, RewriteTrace]:
    rng = None if seed is None else random.Random(seed)
    nf, trace = _run(d, N, rng)
    return nf, trace.product(), trace


def evaluate_closed(d: Diagram, N: int, seed=None) -> ExactScalar:
    if not d.is_closed:
        raise ValueError("evaluate_closed needs a diagram without legs")
    nf, scalar, _ = normalize_with_trace(d, N, seed)
    if nf.vertices or nf.loops:
        raise ResidualDiagram(nf, scalar)
    return scalar * nf.prefactor.at(N)


def confluence_probe(d: Diagram, N: int, seeds) -> bool:
    """Do randomised rule orders all give the deterministic scalar?"""
    try:
        ref = evaluate_closed(d, N)
        return all(evaluate_closed(d, N, seed=s) == ref for s in seeds)
    except ResidualDiagram:
        return False


def is_reduced(d: Diagram) -> bool:
    g = _Graph(d)
    return not any(g.instances(rule) for rule in PRIORITY)


# -- enumeration of reduced diagrams ---------------------------------------------


def _strip(d: Diagram) -> Diagram:
    return relabelled(Diagram(d.n_lower, d.n_upper, d.vertices, d.edges, d.loops, Prefactor(), d.planar))


def reduced_states(max_legs: int, generators=None, leg_bound: int | None = None) -> dict[int, list[Diagram]]:
    """Distinct reduced (0, n) diagrams reachable from the generators, n <= max_legs.

    The closure uses rotation, mirroring, capping adjacent legs and tensor
    products, with intermediate diagrams allowed up to ``leg_bound`` legs.
    """
    if generators is None:
        generators = [black_spider(0, 4), white_spider(0, 4), cup()]
    bound = leg_bound if leg_bound is not None else max_legs + 2
    known: dict[tuple, Diagram] = {}
    by_legs: dict[int, list[Diagram]] = {}
    queue = []

    def add(d: Diagram):
        if d.n_upper > bound:
            return
        nf, _ = normalize(d, 4)
        nf = _strip(nf)
        key = canonical_code(nf)
        if key not in known:
            known[key] = nf
            by_legs.setdefault(nf.n_upper, []).append(nf)
            queue.append(nf)

    add(Diagram(0, 0))
    for g in generators:
        add(g)
    while queue:
        d = queue.pop(0)
        n = d.n_upper
        if n:
            add(rotate(d))
            add(reverse(d))
        for i in range(n - 1):
            add(cap_legs(d, i))
        for m in sorted(by_legs):
            if n + m > bound:
                continue
            for e in list(by_legs[m]):
                add(tensor(d, e))
                add(tensor(e, d))
    return {n: by_legs.get(n, []) for n in range(0, max_legs + 1)}


def closed_family(max_edges: int, max_legs: int = 6, extra_random: int = 400, seed: int = 0) -> list[Diagram]:
    """Closed NCBipartEven diagrams: pairings of reduced states plus random closed words."""
    from .diagram import random_closed

    states = reduced_states(max_legs)
    seen = set()
    out = []

    def add(d):
        if d.num_edges > max_edges:
            return
        key = canonical_code(d)
        if key not in seen:
            seen.add(key)
            out.append(d)

    for n in sorted(states):
        for a in states[n]:
            for b in states[n]:
                add(compose(dagger(a), b))
    rng = random.Random(seed)
    for _ in range(extra_random):
        add(random_closed(rng, max_edges, degrees=(2, 4, 6), steps=16, max_legs=8))
    return out
