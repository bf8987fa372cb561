"""Exact evaluation of diagrams as tensors.

A leg of a finite quantum space with ``c`` blocks of size ``n`` is indexed by
``(block, a, b)``, i.e. by the matrix unit ``f_ab`` of that block, with
``f_ab = e_ab / sqrt(n)``.  In this basis

* the black (0, d) state is ``n**(1 - d/2) * sum f_{i1 i2} (x) f_{i2 i3} (x) ... (x) f_{id i1}``,
* the duality is ``R = sum f_ab (x) f_ba``, an index swap,
* a white spider is the black one with ``U = H / delta`` applied to every leg.

A classical space is ``n = 1``.  Diagrams are evaluated by turning every black
vertex into index identifications, every white leg into a factor ``U``, and
contracting the resulting network greedily.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diagram import (
    BLACK,
    WHITE,
    Diagram,
    Prefactor,
    black_spider,
    cap,
    compose,
    crossing,
    cup,
    identity,
    spider,
    tensor,
    tensor_all,
    white_spider,
    with_prefactor,
)
from .exact import ExactSpan, bareiss_det
from .report import Check
from .scalar import ExactScalar
from .tensor import INT_LIMIT, Tensor, content, maxabs, shrink, widen


class MissingHadamard(ValueError):
    """White spiders need a Hadamard datum in the context."""


@dataclass(frozen=True)
class FiniteQuantumSpace:
    """Direct sum of matrix blocks ``M_{n_i}`` with state weights ``Q_i`` (diagonal)."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((int(n), tuple(Fraction(q) for q in qs)) for n, qs in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("a quantum space needs at least one block")
        for n, qs in blocks:
            if n < 1 or len(qs) != n or any(q <= 0 for q in qs):
                raise ValueError("each block needs n positive weights")
        if sum(sum(qs) for _, qs in blocks) != 1:
            raise ValueError("the weights must define a state (total trace 1)")
        inv = {sum(1 / q for q in qs) for _, qs in blocks}
        if len(inv) != 1:
            raise ValueError("not a delta-form: Tr(Q_i^-1) differs between blocks")

    @classmethod
    def tracial(cls, sizes) -> "FiniteQuantumSpace":
        d2 = sum(n * n for n in sizes)
        return cls(tuple((n, (Fraction(n, d2),) * n) for n in sizes))

    @classmethod
    def classical(cls, N: int) -> "FiniteQuantumSpace":
        return cls.tracial([1] * N)

    @classmethod
    def matrix_algebra(cls, n: int) -> "FiniteQuantumSpace":
        return cls.tracial([n])

    @property
    def dim(self) -> int:
        return sum(n * n for n, _ in self.blocks)

    @property
    def delta2(self) -> Fraction:
        _, qs = self.blocks[0]
        return sum(1 / q for q in qs)

    @property
    def is_tracial(self) -> bool:
        d2 = self.delta2
        return all(all(q == Fraction(n) / d2 for q in qs) for n, qs in self.blocks)

    def shape(self) -> tuple[int, int]:
        """``(blocks, block size)`` for the equal-size tracial spaces the evaluator supports."""
        sizes = {n for n, _ in self.blocks}
        if len(sizes) != 1 or not self.is_tracial:
            raise NotImplementedError("tensor evaluation supports tracial spaces with equal block sizes")
        return len(self.blocks), sizes.pop()

    def swap_permutation(self) -> np.ndarray:
        """Leg index permutation ``(block, a, b) -> (block, b, a)`` realising the duality."""
        c, n = self.shape()
        idx = np.arange(c * n * n).reshape(c, n, n)
        return np.transpose(idx, (0, 2, 1)).ravel()


@dataclass(frozen=True, eq=False)
class FibreContext:
    kind: str
    space: FiniteQuantumSpace
    hadamard: Tensor | None = None

    @classmethod
    def standard(cls, N: int) -> "FibreContext":
        return cls("standard", FiniteQuantumSpace.classical(N))

    @classmethod
    def classical_hadamard(cls, H) -> "FibreContext":
        H = np.asarray(H, dtype=np.int64)
        N = H.shape[0]
        return cls("hadamard", FiniteQuantumSpace.classical(N), Tensor.from_matrix(H, 1, 1, N))

    @classmethod
    def quantum(cls, space: FiniteQuantumSpace, hadamard: Tensor | None = None) -> "FibreContext":
        return cls("quantum", space, hadamard)

    @property
    def delta2(self) -> int:
        d2 = self.space.delta2
        if d2.denominator != 1:
            raise NotImplementedError("only integer delta^2 is supported")
        return int(d2)

    @property
    def N(self) -> int:
        return self.delta2

    @property
    def dim(self) -> int:
        return self.space.dim

    def unitary(self) -> Tensor:
        """``U = H / delta``."""
        if self.hadamard is None:
            raise MissingHadamard("this context has no Hadamard datum for white spiders")
        return self.hadamard.scaled(ExactScalar.power(self.delta2, -1))

    def __repr__(self):
        return f"FibreContext({self.kind}, dim={self.dim}, delta2={self.delta2})"


# -- contraction engine -----------------------------------------------------------


class _Network:
    def __init__(self):
        self.dims: list[int] = []
        self.parent: list[int] = []
        self.factors: list[tuple[list[int], np.ndarray]] = []

    def var(self, dim: int) -> int:
        self.dims.append(dim)
        self.parent.append(len(self.parent))
        return len(self.dims) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def unify(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if self.dims[ra] != self.dims[rb]:
                raise ValueError("dimension mismatch in contraction")
            self.parent[ra] = rb

    def contract(self, out_vars: list[int]) -> np.ndarray:
        dims = self.dims
        out = [self.find(v) for v in out_vars]
        out_set = set(out)
        factors = []
        for vs, arr in self.factors:
            cls = [self.find(v) for v in vs]
            keep = [i for i, c in enumerate(cls) if dims[c] > 1]
            arr = arr.reshape([dims[cls[i]] for i in keep])
            factors.append(([cls[i] for i in keep], arr))
        used = {c for cs, _ in factors for c in cs}
        roots = {self.find(v) for v in range(len(dims))}
        mult = 1
        for c in roots - used - out_set:
            mult *= dims[c]

        def needed(cs, others):
            return [c for c in dict.fromkeys(cs) if c in out_set or others[c] > 0]

        def remaining(skip):
            cnt = Counter()
            for i, (cs, _) in enumerate(factors):
                if i not in skip:
                    cnt.update(set(cs))
            return cnt

        # reduce single factors first
        cnt = remaining(())
        for i, (cs, arr) in enumerate(factors):
            others = cnt.copy()
            others.subtract(set(cs))
            keep = needed(cs, others)
            if len(keep) < len(set(cs)) or len(set(cs)) < len(cs):
                factors[i] = (keep, _einsum([(cs, arr)], keep, dims))
        while len(factors) > 1:
            best = None
            sets = [set(cs) for cs, _ in factors]
            cnt = remaining(())
            for i, j in itertools.combinations(range(len(factors)), 2):
                shared = sets[i] & sets[j]
                others = cnt.copy()
                others.subtract(sets[i])
                others.subtract(sets[j])
                keep = [c for c in sets[i] | sets[j] if c in out_set or others[c] > 0]
                size = math.prod(dims[c] for c in keep)
                key = (not shared, size)
                if best is None or key < best[0]:
                    best = (key, i, j, keep)
            _, i, j, keep = best
            keep = sorted(keep)
            merged = _einsum([factors[i], factors[j]], keep, dims)
            factors = [f for t, f in enumerate(factors) if t not in (i, j)] + [(keep, merged)]
        if factors:
            cs, arr = factors[0]
            keep = [c for c in dict.fromkeys(cs) if c in out_set]
            arr = _einsum([(cs, arr)], keep, dims)
        else:
            keep, arr = [], np.array(1, dtype=np.int64)
        if mult != 1:
            arr = _scale_int(arr, mult)
        return _gather(keep, arr, out, dims)


def _scale_int(arr: np.ndarray, k: int) -> np.ndarray:
    if maxabs(arr) * k >= INT_LIMIT:
        return shrink(widen(arr) * k)
    return arr * k


def _einsum(operands, out_classes, dims) -> np.ndarray:
    local = {}
    args = []
    bound = 1
    summed = 1
    for cs, arr in operands:
        bound *= max(maxabs(arr), 1)
    for cs, _ in operands:
        for c in cs:
            local.setdefault(c, len(local))
    for c in local:
        if c not in out_classes:
            summed *= dims[c]
    big = bound * summed >= INT_LIMIT
    for cs, arr in operands:
        args.extend([widen(arr) if big else arr, [local[c] for c in cs]])
    args.append([local[c] for c in out_classes])
    res = np.asarray(np.einsum(*args))
    return shrink(res) if big else res


def _gather(keep, arr, out, dims) -> np.ndarray:
    """Spread a factor over classes ``keep`` onto output positions (repeated classes = diagonals)."""
    shape = [dims[c] for c in out]
    if not out:
        return arr.reshape(())
    grids = np.indices(shape, sparse=True)
    first = {}
    for p, c in enumerate(out):
        first.setdefault(c, p)
    if keep:
        val = arr[tuple(grids[first[c]] for c in keep)]
    else:
        val = arr
    mask = np.ones(shape, dtype=bool)
    for p, c in enumerate(out):
        if first[c] != p:
            mask &= grids[p] == grids[first[c]]
    full = np.broadcast_to(val, shape)
    return np.where(mask, full, 0).astype(full.dtype)


# -- diagram evaluation ---------------------------------------------------------


def evaluate(d: Diagram, ctx: FibreContext) -> Tensor:
    """Exact tensor of a diagram; boundary order is upper legs, then lower legs."""
    c, n = ctx.space.shape()
    d2 = ctx.delta2
    net = _Network()
    scale = d.prefactor.at(d2) * ExactScalar(d2) ** d.loops
    unitary = None

    def leg():
        return (net.var(c), net.var(n), net.var(n))

    slot_leg = {}
    for v in d.vertices:
        if v.degree == 0:
            scale = scale * ExactScalar(d2)
            continue
        block = net.var(c)
        chain = [net.var(n) for _ in range(v.degree)]
        scale = scale * ExactScalar.power(n, 2 - v.degree)
        inner = [(block, chain[p], chain[(p + 1) % v.degree]) for p in range(v.degree)]
        if v.color == BLACK:
            for p in range(v.degree):
                slot_leg[("V", v.id, p)] = inner[p]
        else:
            if unitary is None:
                unitary = ctx.unitary()
                u_arr = unitary.entries.reshape(c, n, n, c, n, n)
            for p in range(v.degree):
                outer = leg()
                net.factors.append((list(outer) + list(inner[p]), u_arr))
                slot_leg[("V", v.id, p)] = outer
                scale = scale * unitary.scale
    boundary = {e: leg() for e in d.boundary}

    def plain(x, y):
        for a, b in zip(x, y):
            net.unify(a, b)

    def swap(x, y):
        net.unify(x[0], y[0])
        net.unify(x[1], y[2])
        net.unify(x[2], y[1])

    for a, b in d.edges:
        kinds = "".join(sorted((a[0], b[0])))
        la = slot_leg.get(a) or boundary[a]
        lb = slot_leg.get(b) or boundary[b]
        if kinds in ("VV", "LV", "LL", "UU"):
            swap(la, lb)
        else:  # "UV", "LU"
            plain(la, lb)
    out_vars = [v for j in range(d.n_upper) for v in boundary[("U", j)]]
    out_vars += [v for i in range(d.n_lower) for v in boundary[("L", i)]]
    arr = net.contract(out_vars)
    dim = c * n * n
    arr = arr.reshape((dim,) * (d.n_upper + d.n_lower))
    return Tensor(d.n_lower, d.n_upper, dim, arr, scale).normalized()


def spider_tensor(ctx: FibreContext, color: str, k: int, l: int) -> Tensor:
    return evaluate(spider(color, k, l), ctx)


def evaluate_scalar(d: Diagram, ctx: FibreContext) -> ExactScalar:
    t = evaluate(d, ctx)
    if t.slot != (0, 0):
        raise ValueError("diagram is not closed")
    return t.scale * int(t.entries)


# -- bending, transposition and trace ---------------------------------------------


def _perm_axes(arr: np.ndarray, axes, perm: np.ndarray) -> np.ndarray:
    for ax in axes:
        arr = np.take(arr, perm, axis=ax)
    return arr


def map_to_state(t: Tensor, ctx: FibreContext) -> Tensor:
    """Bend lower legs up on the left; leg order ``L(k-1)..L0, U0..U(l-1)``."""
    k, l = t.n_lower, t.n_upper
    arr = np.moveaxis(t.entries, list(range(l, l + k)), list(range(k - 1, -1, -1))) if k else t.entries
    arr = _perm_axes(arr, range(k), ctx.space.swap_permutation())
    return Tensor(0, k + l, t.dim, arr, t.scale)


def state_to_map(s: Tensor, k: int, ctx: FibreContext) -> Tensor:
    """Inverse of :func:`map_to_state`."""
    n = s.n_upper
    l = n - k
    arr = _perm_axes(s.entries, range(k), ctx.space.swap_permutation())
    if k:
        arr = np.moveaxis(arr, list(range(k - 1, -1, -1)), list(range(l, l + k)))
    return Tensor(k, l, s.dim, arr, s.scale)


def state_cap(arr: np.ndarray, i: int, perm: np.ndarray) -> np.ndarray:
    """Contract legs ``i`` and ``i+1`` of a state with the duality."""
    arr = np.take(arr, perm, axis=i + 1)
    return np.trace(arr, axis1=i, axis2=i + 1)


def transpose(t: Tensor, ctx: FibreContext) -> Tensor:
    """Transposition through the duality (rotate the picture by half a turn)."""
    s = map_to_state(t, ctx)
    arr = s.entries
    for _ in range(t.n_lower):
        arr = np.moveaxis(arr, 0, -1)
    return state_to_map(Tensor(0, s.n_upper, s.dim, arr, s.scale), t.n_upper, ctx)


def trace(t: Tensor, ctx: FibreContext) -> ExactScalar:
    """Close every lower leg onto the matching upper leg with caps."""
    if t.n_lower != t.n_upper:
        raise ValueError("trace needs a square slot")
    k = t.n_lower
    arr = map_to_state(t, ctx).entries
    perm = ctx.space.swap_permutation()
    for j in range(k):
        arr = state_cap(arr, k - 1 - j, perm)
    return t.scale * int(arr)


# -- Gram matrices ----------------------------------------------------------------


def inner_product(f: Tensor, g: Tensor) -> ExactScalar:
    if f.slot != g.slot or f.dim != g.dim:
        raise ValueError("inner product needs tensors of the same slot")
    a, b = f.entries, g.entries
    if maxabs(a) * maxabs(b) * a.size >= INT_LIMIT:
        total = int(np.sum(widen(a) * widen(b)))
    else:
        total = int(np.sum(a.astype(np.int64) * b.astype(np.int64)))
    return f.scale.conjugate() * g.scale * total


def gram_matrix(ts) -> list[list[ExactScalar]]:
    return [[inner_product(f, g) for g in ts] for f in ts]


def gram_det(ts) -> Fraction:
    """det of the Gram matrix: det(S G S) = prod(s_i^2) * det(G) for integer G."""
    ints = []
    for f in ts:
        row = []
        for g in ts:
            a, b = widen(f.entries), widen(g.entries)
            row.append(int(np.sum(a * b)))
        ints.append(row)
    factor = Fraction(1)
    for f in ts:
        factor *= f.scale.square()
    return factor * bareiss_det(ints)


def gram_elements() -> dict[str, Diagram]:
    """The five (2,2) diagrams spanning the Gram computation."""
    return {
        "Paabb": compose(cup(), cap()),
        "Pabba": identity(2),
        "black": black_spider(2, 2),
        "white": white_spider(2, 2),
        "crossing": crossing(),
    }


# -- span saturation --------------------------------------------------------------


def default_leg_bound(target: int) -> int:
    """Intermediate states may be two legs longer than the target, capped at 8."""
    return max(target, min(target + 2, 8))


def _saturate(ctx: FibreContext, generators, bound: int) -> dict[int, ExactSpan]:
    dim = ctx.dim
    perm = ctx.space.swap_permutation()
    spans: dict[int, ExactSpan] = {}
    members: dict[int, list[np.ndarray]] = {}
    queue = deque()

    def offer(n: int, arrays):
        if n > bound or not arrays:
            return
        span = spans.setdefault(n, ExactSpan(dim ** n))
        flat = np.array([a.ravel() for a in arrays], dtype=object if any(a.dtype == object for a in arrays) else np.int64)
        for idx in span.add_indices(flat):
            a = arrays[idx]
            g = content(a)
            a = shrink(a // g) if g > 1 else a
            members.setdefault(n, []).append(a)
            queue.append((n, a))

    for gen in generators:
        s = map_to_state(evaluate(gen, ctx), ctx)
        offer(s.n_upper, [s.entries])
    while queue:
        n, a = queue.popleft()
        new: dict[int, list] = {}
        if n:
            new.setdefault(n, []).append(np.moveaxis(a, 0, -1))
            rev = _perm_axes(np.transpose(a, list(range(n - 1, -1, -1))), range(n), perm)
            new[n].append(rev)
        for i in range(n - 1):
            new.setdefault(n - 2, []).append(state_cap(a, i, perm))
        for m in sorted(members):
            if n + m > bound:
                continue
            for b in list(members[m]):
                new.setdefault(n + m, []).append(_outer(a, b))
                new[n + m].append(_outer(b, a))
        for m in sorted(new):
            offer(m, [x for x in new[m] if np.any(x)])
    return spans


def _basis_at(span: ExactSpan | None, slot, ctx: FibreContext) -> list[Tensor]:
    if span is None:
        return []
    k, l = slot
    out = []
    for row in span.basis():
        arr = row.reshape((ctx.dim,) * (k + l))
        out.append(state_to_map(Tensor(0, k + l, ctx.dim, arr), k, ctx))
    return out


def span_saturate(ctx: FibreContext, generators, slot, leg_bound: int | None = None):
    """Rank of the span generated at ``slot`` by the generators under the planar operations.

    The images are turned into (0, n) states and closed under rotation, mirror
    images, capping adjacent legs and tensor products, keeping states with at
    most ``leg_bound`` legs.  Returns ``(rank, basis tensors at slot)``.
    """
    target = slot[0] + slot[1]
    bound = default_leg_bound(target) if leg_bound is None else leg_bound
    if target > bound:
        raise ValueError("slot exceeds the leg bound")
    span = _saturate(ctx, generators, bound).get(target)
    return (span.rank if span else 0), _basis_at(span, slot, ctx)


def span_ranks(ctx: FibreContext, generators, slots, leg_bound: int | None = None) -> dict[tuple, int]:
    """Ranks at several slots from a single saturation run."""
    top = max(k + l for k, l in slots)
    bound = default_leg_bound(top) if leg_bound is None else leg_bound
    if top > bound:
        raise ValueError("slot exceeds the leg bound")
    spans = _saturate(ctx, generators, bound)
    return {tuple(s): (spans[s[0] + s[1]].rank if s[0] + s[1] in spans else 0) for s in slots}


# -- identity suites ---------------------------------------------------------------


def _fusion(color: str, k1: int, l1: int, k2: int, l2: int, m: int) -> Diagram:
    """Left spider ``(k1, l1)`` joined by ``m`` strands to a right spider ``(k2, l2)``."""
    upper = tensor(spider(color, k1 + m, l1), identity(l2))
    lower = tensor(identity(k1), spider(color, k2, m + l2))
    return compose(upper, lower)


def spider_identity_checks(ctx: FibreContext, colors=(BLACK,), max_legs: int = 4) -> list[Check]:
    """Fusion and dagger rules, flip symmetry, snakes and the Frobenius law."""
    out = []
    ev = lambda d: evaluate(d, ctx)  # noqa: E731
    N = ctx.delta2
    commutative = ctx.space.shape()[1] == 1
    for color in colors:
        out.append(Check.holds(f"{color} (0,0) = {N}", ev(spider(color, 0, 0)) == Tensor(0, 0, ctx.dim, np.array(N))))
        for k in range(max_legs + 1):
            for l in range(max_legs + 1 - k):
                out.append(Check.holds(f"{color} ({k},{l})^dag = ({l},{k})",
                                       ev(spider(color, k, l)).dagger() == ev(spider(color, l, k))))
        for k1, l1, k2, l2 in itertools.product(range(2), repeat=4):
            for m in (1, 2):
                if k1 + l1 + k2 + l2 + m > max_legs + 1:
                    continue
                name = f"{color} fusion ({k1},{l1})+({k2},{l2}) over {m}"
                out.append(Check.holds(name, ev(_fusion(color, k1, l1, k2, l2, m)) == ev(spider(color, k1 + k2, l1 + l2))))
        if commutative:
            for k, l in ((2, 0), (2, 1), (2, 2), (3, 1)):
                for i in range(k - 1):
                    flip = tensor_all([identity(i), crossing(), identity(k - 2 - i)])
                    out.append(Check.holds(f"{color} ({k},{l}) flip at {i}",
                                           ev(compose(spider(color, k, l), flip)) == ev(spider(color, k, l))))
        else:
            # a noncommutative algebra only keeps the flip symmetry of its trace
            out.append(Check.holds(f"{color} (2,0) flip", ev(compose(spider(color, 2, 0), crossing())) == ev(spider(color, 2, 0))))
        m, md = spider(color, 2, 1), spider(color, 1, 2)
        frob = [compose(tensor(m, identity(1)), tensor(identity(1), md)), compose(md, m),
                compose(tensor(identity(1), m), tensor(md, identity(1)))]
        vals = [ev(f) for f in frob]
        out.append(Check.holds(f"{color} Frobenius law", vals[0] == vals[1] == vals[2]))
    one = Tensor.identity(1, ctx.dim)
    out.append(Check.holds("snake (cup left)", ev(compose(tensor(identity(1), cap()), tensor(cup(), identity(1)))) == one))
    out.append(Check.holds("snake (cup right)", ev(compose(tensor(cap(), identity(1)), tensor(identity(1), cup()))) == one))
    return out


def bipart_checks(ctx: FibreContext) -> list[Check]:
    """White and black cups agree; a black-white double edge costs ``1/N``."""
    ev = lambda d: evaluate(d, ctx)  # noqa: E731
    out = [Check.holds("white cup = black cup", ev(white_spider(0, 2)) == ev(black_spider(0, 2)))]
    for top, bottom in ((BLACK, WHITE), (WHITE, BLACK)):
        lhs = compose(spider(top, 2, 1), spider(bottom, 1, 2))
        rhs = with_prefactor(compose(spider(top, 0, 1), spider(bottom, 1, 0)), Prefactor(1, -2))
        out.append(Check.holds(f"{top} over {bottom} double edge = 1/N", ev(lhs) == ev(rhs)))
    return out


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if maxabs(a) * maxabs(b) >= INT_LIMIT:
        return np.multiply.outer(widen(a), widen(b))
    return np.multiply.outer(a, b)
