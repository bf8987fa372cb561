"""Hadamard matrices, their signed-permutation symmetries and Hadamard graphs.

Classical matrices are plain ``N x N`` integer arrays over {+1, -1} wrapped in
:class:`HadamardMatrix`.  The same three defining identities (self-conjugacy,
Schur square equal to the all-ones map, unitarity up to ``N``) are checked as
tensor identities, so the quantum version over ``M_n`` shares the code.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .diagram import BLACK, black_spider, cap, compose, cup, identity, white_spider
from .fibre import FibreContext, FiniteQuantumSpace, evaluate, spider_tensor, transpose
from .report import Check
from .tensor import Tensor, safe_tensordot

SEARCH_BOUND = 8


class MatrixFormatError(ValueError):
    pass


# -- classical Hadamard matrices --------------------------------------------------


def is_hadamard(M) -> bool:
    a = np.asarray(M)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        return False
    if not np.all(np.abs(a) == 1):
        return False
    a = a.astype(np.int64)
    return bool(np.array_equal(a @ a.T, a.shape[0] * np.eye(a.shape[0], dtype=np.int64)))


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        if not is_hadamard(arr):
            raise ValueError("not a Hadamard matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, HadamardMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())

    def inverse_times_N(self) -> np.ndarray:
        return self.entries.T.copy()

    def tensor(self) -> Tensor:
        return Tensor.from_matrix(self.entries, 1, 1, self.N)

    def context(self) -> FibreContext:
        return FibreContext.classical_hadamard(self.entries)

    def morphism_checks(self) -> list[Check]:
        return hadamard_morphism_checks(self.tensor(), FibreContext.standard(self.N))

    def to_text(self) -> str:
        rows = [" ".join("+" if x > 0 else "-" for x in row) for row in self.entries]
        return f"{self.N}\n" + "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "HadamardMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise MatrixFormatError("empty matrix file")
        try:
            N = int(lines[0])
        except ValueError:
            raise MatrixFormatError(f"first line must be the size, got {lines[0]!r}") from None
        rows = ["".join(ln.split()) for ln in lines[1:]]
        if len(rows) != N or any(len(r) != N or set(r) - {"+", "-"} for r in rows):
            raise MatrixFormatError(f"expected {N} rows of {N} '+'/'-' signs")
        arr = np.array([[1 if c == "+" else -1 for c in r] for r in rows], dtype=np.int64)
        if not is_hadamard(arr):
            raise MatrixFormatError("rows are not mutually orthogonal")
        return cls(arr)

    def __repr__(self):
        return f"HadamardMatrix(N={self.N})"


W1 = np.array([[1, 1], [1, -1]], dtype=np.int64)


def tensor_product(A: HadamardMatrix, B: HadamardMatrix) -> HadamardMatrix:
    return HadamardMatrix(np.kron(A.entries, B.entries))


def walsh(n: int) -> HadamardMatrix:
    if n < 1:
        raise ValueError("walsh needs n >= 1")
    return HadamardMatrix(reduce(np.kron, [W1] * n))


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, math.isqrt(q) + 1))


def paley_type1(q: int) -> HadamardMatrix:
    """``I + S`` with ``S = [[0, 1^T], [-1, Q]]`` and ``Q`` the Jacobsthal matrix mod ``q``."""
    if not _is_prime(q) or q % 4 != 3:
        raise ValueError("paley_type1 needs a prime q = 3 mod 4")
    squares = {(x * x) % q for x in range(1, q)}
    chi = [0] + [1 if x in squares else -1 for x in range(1, q)]
    S = np.zeros((q + 1, q + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    for i in range(q):
        for j in range(q):
            S[i + 1, j + 1] = chi[(j - i) % q]
    return HadamardMatrix(np.eye(q + 1, dtype=np.int64) + S)


def two_i_minus_j() -> HadamardMatrix:
    return HadamardMatrix(2 * np.eye(4, dtype=np.int64) - np.ones((4, 4), dtype=np.int64))


def shipped_matrices(N: int) -> dict[str, HadamardMatrix]:
    """The built-in matrices of size ``N``, by name."""
    out = {}
    if N >= 2 and N & (N - 1) == 0:
        out[f"walsh{N.bit_length() - 1}"] = walsh(N.bit_length() - 1)
    if _is_prime(N - 1) and (N - 1) % 4 == 3:
        out[f"paley{N - 1}"] = paley_type1(N - 1)
    if N == 4:
        out["2I-J"] = two_i_minus_j()
    if N == 8:
        out["walsh1xpaley3"] = tensor_product(walsh(1), paley_type1(3))
    return out


# -- signed permutations and equivalence ------------------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """The matrix with ``signs[i]`` at ``(i, perm[i])`` and zeros elsewhere."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        perm, signs = tuple(int(p) for p in self.perm), tuple(int(s) for s in self.signs)
        if sorted(perm) != list(range(len(perm))) or len(signs) != len(perm) or set(signs) - {1, -1}:
            raise ValueError("not a signed permutation")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @property
    def N(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, N: int) -> "SignedPermutation":
        return cls(tuple(range(N)), (1,) * N)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.N, self.N), dtype=np.int64)
        m[np.arange(self.N), self.perm] = self.signs
        return m

    @classmethod
    def from_matrix(cls, M) -> "SignedPermutation | None":
        a = np.asarray(M)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            return None
        nz = a != 0
        if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
            return None
        cols = nz.argmax(axis=1)
        vals = a[np.arange(a.shape[0]), cols]
        if not np.all((vals == 1) | (vals == -1)):
            return None
        return cls(tuple(int(c) for c in cols), tuple(int(v) for v in vals))

    def __matmul__(self, other: "SignedPermutation") -> "SignedPermutation":
        perm = tuple(other.perm[p] for p in self.perm)
        signs = tuple(s * other.signs[p] for p, s in zip(self.perm, self.signs))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        perm, signs = [0] * self.N, [1] * self.N
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p], signs[p] = i, s
        return SignedPermutation(tuple(perm), tuple(signs))


def all_signed_permutations(N: int):
    for perm in itertools.permutations(range(N)):
        for signs in itertools.product((1, -1), repeat=N):
            yield SignedPermutation(perm, signs)


def equivalent_transform(H: HadamardMatrix, P: SignedPermutation, Q: SignedPermutation) -> HadamardMatrix:
    """``P H Q^-1``."""
    if P.N != H.N or Q.N != H.N:
        raise ValueError("signed permutations must match the matrix size")
    return HadamardMatrix(P.matrix() @ H.entries @ Q.inverse().matrix())


def _companion(H1: np.ndarray, H2: np.ndarray, Q: SignedPermutation) -> SignedPermutation | None:
    """The ``P`` with ``H2 Q = P H1``, if it is a signed permutation."""
    N = H1.shape[0]
    num = H2 @ Q.matrix() @ H1.T
    if np.any(num % N):
        return None
    return SignedPermutation.from_matrix(num // N)


def _equivalences(H1: np.ndarray, H2: np.ndarray):
    """Every ``(P, Q)`` with ``H2 = P H1 Q^-1``.

    Column ``j`` of ``H2 Q`` is a signed column of ``H2``; it is picked one
    column at a time.  ``cand[i, r, t]`` records whether row ``i`` of ``H2 Q``
    can still equal sign ``t`` times row ``r`` of ``H1``.
    """
    N = H1.shape[0]
    if N > SEARCH_BOUND:
        raise ValueError(f"search is limited to N <= {SEARCH_BOUND}")
    q_perm = [0] * N
    q_sign = [1] * N
    used = [False] * N

    def step(j, cand):
        if j == N:
            Q = SignedPermutation(tuple(q_perm), tuple(q_sign))
            P = _companion(H1, H2, Q)
            if P is not None:
                yield P, Q
            return
        for b in range(N):
            if used[b]:
                continue
            for s in (1, -1):
                v = s * H2[:, b]
                plus = np.equal.outer(v, H1[:, j])  # t = +1 works
                new = cand & np.stack([plus, ~plus], axis=2)
                alive = new.any(axis=(1, 2))
                if not alive.all():
                    continue
                fixed = new.any(axis=2).sum(axis=1) == 1
                rows = new[fixed].any(axis=2).argmax(axis=1)
                if len(set(rows.tolist())) < len(rows):
                    continue
                used[b] = True
                q_perm[b], q_sign[b] = j, s
                yield from step(j + 1, new)
                used[b] = False

    yield from step(0, np.ones((N, N, 2), dtype=bool))


@dataclass(frozen=True)
class Automorphism:
    q: SignedPermutation
    p: SignedPermutation


def automorphism_group(H: HadamardMatrix) -> list[Automorphism]:
    """``{Q : H Q H^-1 is a signed permutation}`` with the companion ``P = H Q H^-1``."""
    out = [Automorphism(Q, P) for P, Q in _equivalences(H.entries, H.entries)]
    return sorted(out, key=lambda a: (a.q.perm, a.q.signs))


def automorphism_group_bruteforce(H: HadamardMatrix) -> list[Automorphism]:
    out = []
    for Q in all_signed_permutations(H.N):
        P = _companion(H.entries, H.entries, Q)
        if P is not None:
            out.append(Automorphism(Q, P))
    return sorted(out, key=lambda a: (a.q.perm, a.q.signs))


def is_group(elements) -> bool:
    elems = set(elements)
    if not elems:
        return False
    N = next(iter(elems)).N
    if SignedPermutation.identity(N) not in elems:
        return False
    return all(a.inverse() in elems for a in elems) and all(a @ b in elems for a in elems for b in elems)


def find_equivalence(H1: HadamardMatrix, H2: HadamardMatrix):
    """A pair ``(P, Q)`` with ``H2 = P H1 Q^-1``, or ``None``."""
    if H1.N != H2.N:
        return None
    return next(_equivalences(H1.entries, H2.entries), None)


def quadruple_profile(H: HadamardMatrix) -> tuple:
    """Multiset of ``|sum_c H_ic H_jc H_kc H_lc|`` over row quadruples ``i < j < k < l``.

    Permuting or negating rows and columns leaves it unchanged, so differing
    profiles prove inequivalence.
    """
    a = H.entries
    counts = Counter(abs(int(np.sum(a[i] * a[j] * a[k] * a[l])))
                     for i, j, k, l in itertools.combinations(range(H.N), 4))
    return tuple(sorted(counts.items()))


# -- the three defining identities as tensor equations -----------------------------


def conjugate(A: Tensor, ctx: FibreContext) -> Tensor:
    """``A* = (id x R^dag)(id x A^dag x id)(R x id)``, the transpose of the adjoint."""
    return transpose(A.dagger(), ctx)


def schur_product(A: Tensor, B: Tensor, ctx: FibreContext) -> Tensor:
    """``m (A x B) m^dag`` without forming ``A x B``."""
    m = spider_tensor(ctx, BLACK, 2, 1)
    md = spider_tensor(ctx, BLACK, 1, 2)
    d = ctx.dim
    x = safe_tensordot(B.entries, md.entries, ([1], [1]), d)  # (b, j, x)
    t = safe_tensordot(A.entries, x, ([1], [1]), d)  # (a, b, x)
    out = safe_tensordot(m.entries, t, ([1, 2], [0, 1]), d * d)
    return Tensor(1, 1, d, out, A.scale * B.scale * m.scale * md.scale).normalized()


def all_ones(ctx: FibreContext) -> Tensor:
    """``eta eta^dag``."""
    return evaluate(compose(black_spider(0, 1), black_spider(1, 0)), ctx)


def hadamard_morphism_checks(H: Tensor, ctx: FibreContext, prefix: str = "") -> list[Check]:
    d2 = ctx.delta2
    ident = Tensor.identity(1, ctx.dim).scaled(d2)
    return [
        Check.holds(prefix + "H = H*", H == conjugate(H, ctx)),
        Check.holds(prefix + "H.H = eta eta^dag", schur_product(H, H, ctx) == all_ones(ctx)),
        Check.holds(prefix + f"H H^dag = {d2} id", H.compose(H.dagger()) == ident),
        Check.holds(prefix + f"H^dag H = {d2} id", H.dagger().compose(H) == ident),
    ]


# -- Hadamard graphs ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HadamardGraphData:
    """Blocks ``r+, r-, c+, c-`` of ``N`` vertices each."""

    N: int
    A: np.ndarray
    A0: np.ndarray
    labels: tuple[str, ...]
    looped: bool = False

    @property
    def adjacency(self) -> np.ndarray:
        return self.A0 if self.looped else self.A

    def adjacency_lists(self) -> dict[str, list[str]]:
        adj = self.adjacency
        return {self.labels[i]: [self.labels[j] for j in np.flatnonzero(adj[i])] for i in range(len(self.labels))}

    def to_dot(self) -> str:
        adj = self.adjacency
        lines = ["graph hadamard {"]
        for label in self.labels:
            lines.append(f'  "{label}";')
        n = len(self.labels)
        for i in range(n):
            for j in range(i, n):
                if adj[i, j]:
                    lines.append(f'  "{self.labels[i]}" -- "{self.labels[j]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def sign_split(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``((M.M + M) / 2, (M.M - M) / 2)`` entrywise."""
    sq = M * M
    return (sq + M) // 2, (sq - M) // 2


def _block_graph(H: np.ndarray, looped: bool) -> np.ndarray:
    N = H.shape[0]
    J = np.ones((N, N), dtype=np.int64)
    hp, hm = (J + H) // 2, (J - H) // 2
    Z = np.zeros((N, N), dtype=np.int64)
    I = np.eye(N, dtype=np.int64) if looped else Z
    return np.block([[I, Z, hp, hm], [Z, I, hm, hp], [hp.T, hm.T, Z, Z], [hm.T, hp.T, Z, Z]])


def hadamard_graph(H: HadamardMatrix, looped: bool = False) -> HadamardGraphData:
    N = H.N
    labels = tuple(f"{side}{i + 1}{sgn}" for side, sgn in (("r", "+"), ("r", "-"), ("c", "+"), ("c", "-"))
                   for i in range(N))
    return HadamardGraphData(N, _block_graph(H.entries, False), _block_graph(H.entries, True), labels, looped)


def _block_action(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    pp, pm = sign_split(p)
    qp, qm = sign_split(q)
    Z = np.zeros_like(pp)
    return np.block([[pp, pm, Z, Z], [pm, pp, Z, Z], [Z, Z, qp, qm], [Z, Z, qm, qp]])


def magic_from_automorphism(H: HadamardMatrix, Q: SignedPermutation) -> np.ndarray:
    P = _companion(H.entries, H.entries, Q)
    if P is None:
        raise ValueError("Q is not an automorphism of H")
    return _block_action(P.matrix(), Q.matrix())


def vertex_relabelling(P: SignedPermutation, Q: SignedPermutation) -> np.ndarray:
    """Permutation matrix ``S`` with ``A(P H Q^-1) = S A(H) S^T``."""
    return _block_action(P.matrix(), Q.matrix())


def is_magic_permutation(u: np.ndarray) -> bool:
    return bool(np.all((u == 0) | (u == 1)) and np.all(u.sum(axis=0) == 1) and np.all(u.sum(axis=1) == 1))


# -- quantum Hadamard matrices ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumHadamard:
    space: FiniteQuantumSpace
    map: Tensor

    @property
    def context(self) -> FibreContext:
        return FibreContext.quantum(self.space, self.map)

    def checks(self) -> list[Check]:
        return hadamard_morphism_checks(self.map, FibreContext.quantum(self.space))


def quantum_hadamard_transpose(n: int) -> QuantumHadamard:
    """``a -> n a^T`` on ``M_n``; in the matrix-unit basis ``n`` times the index swap."""
    if n < 1:
        raise ValueError("n must be positive")
    space = FiniteQuantumSpace.matrix_algebra(n)
    swap = np.eye(n * n, dtype=np.int64)[space.swap_permutation()]
    return QuantumHadamard(space, Tensor.from_matrix(swap, 1, 1, n * n, n))


def _rational(t: Tensor) -> np.ndarray:
    s = t.scale.to_fraction()
    return np.array([[Fraction(int(v)) * s for v in row] for row in t.matrix()], dtype=object)


def _from_rational(m: np.ndarray, dim: int) -> Tensor:
    den = math.lcm(*(Fraction(x).denominator for x in m.ravel()))
    ints = np.array([[int(x * den) for x in row] for row in m], dtype=np.int64)
    return Tensor.from_matrix(ints, 1, 1, dim, Fraction(1, den)).normalized()


def quantum_graph_space(qh: QuantumHadamard) -> FibreContext:
    """Context for ``Y = X + X + X + X``; leg index ``(copy, x)`` as ``C^4 x l2(X)``."""
    c, n = qh.space.shape()
    return FibreContext.quantum(FiniteQuantumSpace.tracial([n] * (4 * c)))


def quantum_hadamard_graph(qh: QuantumHadamard, looped: bool = False) -> Tensor:
    ctx = FibreContext.quantum(qh.space)
    J, H = _rational(all_ones(ctx)), _rational(qh.map)
    hp, hm = (J + H) / 2, (J - H) / 2
    d = ctx.dim
    Z = np.full((d, d), Fraction(0), dtype=object)
    I = np.array([[Fraction(int(i == j)) for j in range(d)] for i in range(d)], dtype=object) if looped else Z
    blocks = [[I, Z, hp, hm], [Z, I, hm, hp], [hp.T, hm.T, Z, Z], [hm.T, hp.T, Z, Z]]
    # the lower blocks are adjoints; entries are rational so the adjoint is the transpose
    return _from_rational(np.block(blocks), 4 * d)


def quantum_graph_checks(qh: QuantumHadamard, looped: bool = False) -> list[Check]:
    A = quantum_hadamard_graph(qh, looped)
    ctx = quantum_graph_space(qh)
    tag = "A0" if looped else "A"
    out = [
        Check.holds(f"{tag}.{tag} = {tag}", schur_product(A, A, ctx) == A),
        Check.holds(f"{tag} = {tag}*", conjugate(A, ctx) == A),
        Check.holds(f"{tag} = {tag}^dag", A.dagger() == A),
    ]
    loops = schur_product(A, Tensor.identity(1, ctx.dim), ctx)
    if looped:
        out.append(Check.holds(f"{tag}.I != 0", not loops.is_zero))
    else:
        out.append(Check.holds(f"{tag}.I = 0", loops.is_zero))
    return out


# -- the size-four data ------------------------------------------------------------


def _kron_power(M: np.ndarray, k: int) -> np.ndarray:
    return reduce(np.kron, [M] * k, np.ones((1, 1), dtype=np.int64))


def _xor_delta(k: int, l: int) -> np.ndarray:
    out = np.zeros((4 ** l, 4 ** k), dtype=np.int64)
    for j, js in enumerate(itertools.product(range(4), repeat=l)):
        for i, is_ in enumerate(itertools.product(range(4), repeat=k)):
            out[j, i] = reduce(lambda a, b: a ^ b, js, 0) == reduce(lambda a, b: a ^ b, is_, 0)
    return out


def so4_tensors() -> dict[str, Tensor]:
    """``t~`` (deformed crossing), ``P^`` (all indices distinct), ``Paabb`` and ``Pabba`` at N = 4."""
    std = FibreContext.standard(4)
    tilde = np.zeros((4,) * 4, dtype=np.int64)
    hat = np.zeros((4,) * 4, dtype=np.int64)
    for i, j, k, l in itertools.product(range(4), repeat=4):
        if i == j == k == l:
            tilde[i, j, k, l] = 1
        elif i == l and j == k:
            tilde[i, j, k, l] = -1
        hat[i, j, k, l] = len({i, j, k, l}) == 4
    return {
        "tilde": Tensor(2, 2, 4, tilde),
        "hat": Tensor(2, 2, 4, hat),
        "Paabb": evaluate(compose(cup(), cap()), std),
        "Pabba": evaluate(identity(2), std),
    }


def so4_check() -> list[Check]:
    H = two_i_minus_j()
    F = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=np.int64)
    checks = [
        Check.holds("F is walsh(2)", np.array_equal(F, walsh(2).entries)),
        Check.holds("H and F are self-adjoint", np.array_equal(H.entries, H.entries.T) and np.array_equal(F, F.T)),
    ]
    ctx = H.context()
    black = evaluate(black_spider(2, 2), ctx)
    white = evaluate(white_spider(2, 2), ctx)
    t = so4_tensors()
    FF = Tensor.from_matrix(np.kron(F, F), 2, 2, 4)
    FFinv = FF.scaled(Fraction(1, 16))

    def conj(core: Tensor) -> Tensor:
        return FF.compose(core).compose(FFinv).scaled(Fraction(1, 4))

    rest = t["Paabb"] + t["Pabba"] - t["tilde"]
    checks.append(Check.holds("F_H(black) = 1/4 F(-t~ + P^ + Paabb + Pabba)F^-1", black == conj(rest + t["hat"])))
    checks.append(Check.holds("F_H(white) = 1/4 F(-t~ - P^ + Paabb + Pabba)F^-1", white == conj(rest - t["hat"])))
    checks.append(Check.holds("F^-1(black - white)F = P^/2",
                              FFinv.compose(black - white).compose(FF) == t["hat"].scaled(Fraction(1, 2))))
    checks.append(Check.holds("F^-1(black + white)F = (-t~ + Paabb + Pabba)/2",
                              FFinv.compose(black + white).compose(FF) == rest.scaled(Fraction(1, 2))))
    std = FibreContext.standard(4)
    for k in range(5):
        for l in range(5 - k):
            B = evaluate(black_spider(k, l), std)
            lhs = Tensor.from_matrix(_kron_power(F, l) @ B.matrix() @ _kron_power(F, k), k, l, 4,
                                     B.scale * Fraction(1, 4 ** l))
            rhs = Tensor.from_matrix(_xor_delta(k, l), k, l, 4, Fraction(4) ** (1 - l))
            checks.append(Check.holds(f"Fourier black ({k},{l}) = 4^(1-l) delta_xor", lhs == rhs))
    for name, other in shipped_matrices(4).items():
        checks.append(Check.holds(f"2I-J equivalent to {name}", find_equivalence(H, other) is not None))
    return checks
