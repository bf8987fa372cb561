"""Spider diagrams, exact fibre functors and Hadamard matrices from the command line.

Every subcommand writes a JSON report (command, checks, data, status) to
standard output.  Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import diagram as dg
from .fibre import (
    FibreContext,
    MissingHadamard,
    bipart_checks,
    default_leg_bound,
    evaluate,
    gram_det,
    gram_elements,
    gram_matrix,
    span_ranks,
)
from .hadamard import (
    HadamardMatrix,
    MatrixFormatError,
    automorphism_group,
    automorphism_group_bruteforce,
    hadamard_graph,
    is_group,
    magic_from_automorphism,
    paley_type1,
    quantum_graph_checks,
    quantum_hadamard_transpose,
    shipped_matrices,
    so4_check,
    walsh,
)
from .partitions import catalan
from .report import Check, Report
from .rewrite import ResidualDiagram, closed_family, evaluate_closed, normalize_with_trace


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _matrix(path: str) -> HadamardMatrix:
    return HadamardMatrix.from_text(_read(path))


def _shipped(N: int) -> HadamardMatrix:
    mats = shipped_matrices(N)
    if not mats:
        raise InputError(f"no built-in Hadamard matrix of size {N}")
    return next(iter(mats.values()))


# -- subcommands -------------------------------------------------------------------


def cmd_gen(args, report: Report):
    H = walsh(args.n) if args.kind == "walsh" else paley_type1(args.q)
    if args.output is None:
        return H.to_text()
    Path(args.output).write_text(H.to_text())
    report.data = {"file": args.output, "N": H.N}
    report.checks.append(Check.holds("is Hadamard", True))


def cmd_verify(args, report: Report):
    H = _matrix(args.file)
    report.data = {"N": H.N}
    report.extend(H.morphism_checks())


def cmd_graph(args, report: Report):
    H = _matrix(args.file)
    g = hadamard_graph(H, looped=args.looped)
    A, A0, N = g.A, g.A0, g.N
    rows, cols = slice(0, 2 * N), slice(2 * N, 4 * N)
    report.extend([
        Check.holds("A symmetric", np.array_equal(A, A.T)),
        Check.holds("A bipartite rows/columns", not A[rows, rows].any() and not A[cols, cols].any()),
        Check.equal("every degree in A", N, int(A.sum(axis=1).min()) if np.all(A.sum(axis=1) == N) else "uneven"),
        Check.holds("A0 = A + loops on rows", np.array_equal(A0 - A, np.diag([1] * (2 * N) + [0] * (2 * N)))),
    ])
    report.data = {"N": N, "looped": args.looped, "adjacency": g.adjacency_lists()}
    if args.output:
        Path(args.output).write_text(g.to_dot())
        report.data["dot"] = args.output


def cmd_aut(args, report: Report):
    H = _matrix(args.file)
    group = automorphism_group(H)
    qs = [a.q for a in group]
    report.data = {"N": H.N, "order": len(group)}
    report.checks.append(Check.holds("closed group", is_group(qs)))
    report.checks.append(Check.holds("P H = H Q for every companion",
                                     all(np.array_equal(a.p.matrix() @ H.entries, H.entries @ a.q.matrix())
                                         for a in group)))
    g = hadamard_graph(H)
    ok = True
    for a in group:
        u = magic_from_automorphism(H, a.q)
        ok &= np.array_equal(u @ g.A, g.A @ u) and np.array_equal(u @ g.A0, g.A0 @ u)
    report.checks.append(Check.holds("u A = A u and u A0 = A0 u", ok))
    if H.N <= 4:
        report.checks.append(Check.equal("order by exhaustive search", len(automorphism_group_bruteforce(H)), len(group)))


def _context(args) -> FibreContext:
    if args.matrix:
        return _matrix(args.matrix).context()
    if args.standard:
        return FibreContext.standard(args.standard)
    return quantum_hadamard_transpose(args.mn).context


def cmd_eval(args, report: Report):
    d = dg.from_text(_read(args.file))
    ctx = _context(args)
    t = evaluate(d, ctx)
    report.data = {"context": repr(ctx), "tensor": t.to_dict()}
    if d.is_closed:
        value = t.scale * int(t.entries)
        report.data["scalar"] = str(value)
        if d.planar:
            try:
                report.checks.append(Check.equal("agrees with rewriting", str(evaluate_closed(d, ctx.delta2)), str(value)))
            except ResidualDiagram:
                pass


def cmd_normalize(args, report: Report):
    d = dg.from_text(_read(args.file))
    nf, scalar, trace = normalize_with_trace(d, args.N)
    report.data = {"normal_form": dg.to_record(nf), "scalar": str(scalar)}
    if d.is_closed and not nf.vertices and not nf.loops:
        report.data["value"] = str(scalar * nf.prefactor.at(args.N))
    if args.trace:
        report.data["trace"] = trace.to_records()


def cmd_dims(args, report: Report):
    H = _shipped(args.N)
    ctx = H.context()
    slots = [(k, n - k) for n in range(2, args.max_legs + 1, 2) for k in range(n // 2 + 1)]
    bound = args.leg_bound or default_leg_bound(args.max_legs)
    gens = [dg.black_spider(0, 4), dg.white_spider(0, 4), dg.cap()]
    ranks = span_ranks(ctx, gens, slots, bound)
    for slot in slots:
        report.checks.append(Check.equal(f"rank at {slot}", catalan(sum(slot) // 2) ** 2, ranks[slot]))
    report.data = {"N": args.N, "leg_bound": bound}


def cmd_gram(args, report: Report):
    H = _shipped(args.N)
    ctx = H.context()
    ts = [evaluate(d, ctx) for d in gram_elements().values()]
    det = gram_det(ts)
    N = args.N
    report.checks.append(Check.equal("det = N^3 (N-1)^4 (N-2)", Fraction(N ** 3 * (N - 1) ** 4 * (N - 2)), det))
    report.data = {"N": N, "elements": list(gram_elements()), "gram": [[str(x) for x in row] for row in gram_matrix(ts)],
                   "determinant": str(det)}


def cmd_so4(args, report: Report):
    report.extend(so4_check())


def cmd_qh(args, report: Report):
    qh = quantum_hadamard_transpose(args.n)
    report.extend(qh.checks())
    report.extend(bipart_checks(qh.context))
    report.extend(quantum_graph_checks(qh, looped=False))
    report.extend(quantum_graph_checks(qh, looped=True))
    report.data = {"n": args.n, "dim": qh.space.dim, "delta2": str(qh.space.delta2)}


def cmd_invariance(args, report: Report):
    mats = shipped_matrices(args.size)
    if not mats:
        raise InputError(f"no built-in Hadamard matrix of size {args.size}")
    family = closed_family(args.max_edges)
    contexts = {name: H.context() for name, H in mats.items()}
    disagree, mismatch = [], []
    for i, d in enumerate(family):
        ref = evaluate_closed(d, args.size)
        values = {name: evaluate(d, ctx) for name, ctx in contexts.items()}
        values = {name: t.scale * int(t.entries) for name, t in values.items()}
        if len(set(values.values())) != 1:
            disagree.append(i)
        if any(v != ref for v in values.values()):
            mismatch.append(i)
    report.checks.append(Check.holds("family has at least 100 diagrams", len(family) >= 100))
    report.checks.append(Check.equal("diagrams where matrices disagree", 0, len(disagree)))
    report.checks.append(Check.equal("diagrams where fibre and rewrite differ", 0, len(mismatch)))
    report.data = {"size": args.size, "matrices": list(mats), "family": len(family), "max_edges": args.max_edges}


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spidercalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a Hadamard matrix file")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g = gen_sub.add_parser("walsh")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("-o", "--output")
    g = gen_sub.add_parser("paley")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="check the Hadamard identities of a matrix file")
    ver_sub = ver.add_subparsers(dest="kind", required=True)
    v = ver_sub.add_parser("had")
    v.add_argument("file")
    ver.set_defaults(func=cmd_verify)

    gr = sub.add_parser("graph", help="Hadamard graph of a matrix file")
    gr.add_argument("file")
    gr.add_argument("--looped", action="store_true")
    gr.add_argument("-o", "--output", help="DOT file")
    gr.set_defaults(func=cmd_graph)

    au = sub.add_parser("aut", help="automorphism group of a matrix file")
    au.add_argument("file")
    au.set_defaults(func=cmd_aut)

    ev = sub.add_parser("eval", help="evaluate a diagram file to a tensor")
    ev.add_argument("file")
    which = ev.add_mutually_exclusive_group(required=True)
    which.add_argument("--matrix")
    which.add_argument("--standard", type=int)
    which.add_argument("--mn", type=int)
    ev.set_defaults(func=cmd_eval)

    no = sub.add_parser("normalize", help="rewrite a diagram file to normal form")
    no.add_argument("file")
    no.add_argument("--N", type=int, required=True)
    no.add_argument("--trace", action="store_true")
    no.set_defaults(func=cmd_normalize)

    di = sub.add_parser("dims", help="span ranks against squared Catalan numbers")
    di.add_argument("--N", type=int, required=True)
    di.add_argument("--max-legs", type=int, default=4)
    di.add_argument("--leg-bound", type=int)
    di.set_defaults(func=cmd_dims)

    gm = sub.add_parser("gram", help="determinant of the five-element Gram matrix")
    gm.add_argument("--N", type=int, required=True)
    gm.set_defaults(func=cmd_gram)

    so = sub.add_parser("so4", help="the size-four conjugation identities")
    so.set_defaults(func=cmd_so4)

    qh = sub.add_parser("qh", help="quantum Hadamard matrices")
    qh_sub = qh.add_subparsers(dest="kind", required=True)
    q = qh_sub.add_parser("transpose")
    q.add_argument("--n", type=int, required=True)
    qh.set_defaults(func=cmd_qh)

    inv = sub.add_parser("invariance", help="closed diagrams evaluate alike for all matrices of one size")
    inv.add_argument("--size", type=int, required=True)
    inv.add_argument("--max-edges", type=int, default=12)
    inv.set_defaults(func=cmd_invariance)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(list(argv if argv is not None else sys.argv[1:]))
    try:
        text = args.func(args, report)
    except (InputError, MatrixFormatError, dg.DiagramFormatError, MissingHadamard, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if text is not None:
        out.write(text)
        return 0
    out.write(report.to_text())
    return 0 if report.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
