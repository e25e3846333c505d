"""``phase-contract`` command line.

Exit codes: 0 success or PASS, 1 audit/acceptance FAIL, 2 usage or domain
error.  All numbers are printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import io
from ._backend import ordered_map
from .contraction import contraction_sum, epsilon_sweep, kernel_block_compare, laguerre_integral
from .errors import DomainError, PreconditionError, QuadratureError
from .numbers import HalfInt, half
from .particle_kernel import FockSpace, PhasePoint, wigner_function, wigner_integral_check
from .special_functions import SpherePoint, clebsch_gordan, clebsch_gordan_float
from .spin_kernel import (
    SignPattern,
    SphereGrid,
    SphereSamples,
    audit_postulates,
    kernel_at,
    kernel_via_rotation,
    reconstruct_operator,
    sample_symbol,
)

fmt = io.fmt


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if not out:
        raise UsageError("list must not be empty")
    return out


def _spin_list(text: str) -> list[HalfInt]:
    try:
        out = [half(x) for x in text.split(",") if x.strip()]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"expected comma-separated spins, got {text!r}") from exc
    if not out:
        raise UsageError("list must not be empty")
    return out


def _pattern(two_s: int, mask: Optional[str]) -> SignPattern:
    s = HalfInt(two_s)
    return SignPattern.all_plus(s) if mask is None else SignPattern.from_mask(s, mask)


def _alpha(args) -> complex:
    return complex(args.alpha_re, args.alpha_im)


# ---------------------------------------------------------------------------
# subcommands


def cmd_cg(args) -> int:
    qn = [half(x) for x in (args.j1, args.m1, args.j2, args.m2, args.J, args.M)]
    exact = clebsch_gordan(*qn, strict=True)
    value = clebsch_gordan_float(*qn, strict=True)
    note = ""
    if not exact and qn[5] != qn[1] + qn[3]:
        note = "  # M != m1 + m2"
    print(f"{exact}  {fmt(value)}{note}")
    return 0


def cmd_kernel(args) -> int:
    eps = _pattern(args.two_s, args.epsilon_mask)
    pt = SpherePoint(args.theta, args.phi)
    build = kernel_via_rotation if args.method == "rotation" else kernel_at
    K = build(HalfInt(args.two_s), eps, pt).matrix
    io.write_text(io.operator_to_json(K, two_s=args.two_s) + "\n", args.out)
    return 0


def _grid(args, s: HalfInt) -> SphereGrid:
    if args.n_theta or args.n_phi:
        if not (args.n_theta and args.n_phi):
            raise UsageError("give both --n-theta and --n-phi")
        return SphereGrid.of_size(args.n_theta, args.n_phi)
    return SphereGrid.for_spin(s)


def _random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (X + X.conj().T)


def cmd_reconstruct(args) -> int:
    if args.operator:
        header, A = io.read_operator(args.operator)
        if "two_s" not in header:
            raise DomainError("operator file must carry two_s")
        two_s = header["two_s"]
        if args.two_s is not None and args.two_s != two_s:
            raise DomainError(f"--two-s {args.two_s} disagrees with the file (two_s={two_s})")
    else:
        if args.two_s is None:
            raise UsageError("give --two-s or --operator")
        two_s = args.two_s
        A = _random_hermitian(two_s + 1, args.seed)
    s = HalfInt(two_s)
    eps = _pattern(two_s, args.epsilon_mask)
    grid = _grid(args, s)
    samples = sample_symbol(A, s, eps, grid)
    if args.samples_out:
        th, ph, w = grid.nodes()
        io.write_text(io.samples_csv(th, ph, w, samples.values), args.samples_out)
    A_rec = reconstruct_operator(SphereSamples(grid, samples.values), s, eps)
    if args.out:
        io.write_text(io.operator_to_json(A_rec, two_s=two_s) + "\n", args.out)
    print(f"max_abs_error {fmt(np.abs(A_rec - A).max())}")
    return 0


def cmd_audit(args) -> int:
    eps = _pattern(args.two_s, args.epsilon_mask)
    rep = audit_postulates(HalfInt(args.two_s), eps, trials=args.trials, seed=args.seed,
                           negative_control=args.negative_control)
    text = "\n".join(rep.lines()) + "\n"
    io.write_text(text, args.out)
    return 0 if rep.passed else 1


def cmd_wigner(args) -> int:
    if args.state:
        header, rho = io.read_operator(args.state)
        if "n_max" not in header:
            raise DomainError("state file must carry n_max")
        space = FockSpace(header["n_max"])
        psi = None
    else:
        if args.fock is None:
            raise UsageError("give --fock N or --state FILE")
        if args.fock < 0:
            raise DomainError("--fock must be >= 0")
        n_max = args.n_max if args.n_max is not None else args.fock
        if n_max < args.fock:
            raise DomainError("--n-max must be >= --fock")
        space = FockSpace(n_max)
        psi = np.zeros(space.dim, dtype=complex)
        psi[args.fock] = 1.0
        rho = np.outer(psi, psi.conj())
    qs = np.linspace(-args.extent, args.extent, args.points)
    pts = [PhasePoint.from_qp(q, p) for q in qs for p in qs]
    w = wigner_function(rho, space, pts)
    q = [pt.q for pt in pts]
    p = [pt.p for pt in pts]
    if args.integral_check:
        if psi is None:
            raise UsageError("--integral-check needs a pure Fock state (--fock)")
        wi = ordered_map(lambda pt: 2 * math.pi * wigner_integral_check(psi, pt.q, pt.p), pts)
        rows = {"q": q, "p": p, "w": list(w), "w_integral": wi}
    else:
        rows = {"q": q, "p": p, "w": list(w)}
    if args.format == "json":
        io.write_text(io.dump_json(rows), args.out)
    elif args.integral_check:
        text = io.wigner_csv(q, p, w).splitlines()
        text[0] += ",w_integral"
        text[1:] = [f"{line},{fmt(x)}" for line, x in zip(text[1:], rows["w_integral"])]
        io.write_text("\n".join(text) + "\n", args.out)
    else:
        io.write_text(io.wigner_csv(q, p, w), args.out)
    return 0


def cmd_contract_table(args) -> int:
    spins = [HalfInt(t) for t in _int_list(args.two_s_list)]
    ns = _int_list(args.n_list)
    for s in spins:
        if s.twice_value <= 0:
            raise DomainError("two_s must be positive")
        for n in ns:
            if n < 0 or 20 * n > s.twice_value:
                raise PreconditionError(f"n={n} exceeds s/10 for s={s}")
    if args.terms:
        if len(spins) != 1 or len(ns) != 1:
            raise UsageError("--terms needs exactly one spin and one n")
        s = spins[0]
        table = contraction_sum(s, ns[0], _pattern(s.twice_value, args.epsilon_mask))
        integral = laguerre_integral(ns[0], 2.0) * (-1) ** ns[0] if args.integral else None
        io.write_text(io.term_table_csv(table, integral), args.out)
        return 0
    jobs = [(s, n) for s in spins for n in ns]
    tables = ordered_map(lambda j: contraction_sum(j[0], j[1], _pattern(j[0].twice_value, args.epsilon_mask)), jobs)
    header = ["two_s", "n", "S", "abs_error"] + (["integral_t2"] if args.integral else [])
    integrals = {n: (-1) ** n * laguerre_integral(n, 2.0) for n in ns} if args.integral else {}
    rows = []
    for (s, n), t in zip(jobs, tables):
        row = [s.twice_value, n, t.total, t.error]
        if args.integral:
            row.append(integrals[n])
        rows.append(row)
    if args.format == "json":
        io.write_text(io.dump_json([dict(zip(header, r)) for r in rows]), args.out)
    else:
        io.write_text(io.table_csv(header, rows), args.out)
    return 0


def cmd_compare(args) -> int:
    alpha = _alpha(args)
    if args.s_ladder:
        spins = _spin_list(args.s_ladder)
    elif args.two_s is not None:
        spins = [HalfInt(args.two_s)]
    else:
        raise UsageError("give --two-s or --s-ladder")
    if args.epsilon_mask is not None and len(spins) > 1:
        patterns = [SignPattern.from_mask(spins[0], args.epsilon_mask).tiled(s) for s in spins]
    else:
        patterns = [_pattern(s.twice_value, args.epsilon_mask) for s in spins]
    devs = ordered_map(lambda j: kernel_block_compare(j[0], alpha, args.block, j[1], args.n_max),
                       list(zip(spins, patterns)))
    header = ["two_s", "s", "deviation"]
    rows = [[s.twice_value, float(s), d] for s, d in zip(spins, devs)]
    if args.format == "json":
        io.write_text(io.dump_json({"alpha": [alpha.real, alpha.imag], "block": args.block,
                                    "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        io.write_text(io.table_csv(header, rows), args.out)
    return 0


def cmd_sweep_eps(args) -> int:
    ladder = _spin_list(args.s_ladder)
    ns = _int_list(args.n_list)
    if args.epsilon_mask is not None:
        patterns = [SignPattern.from_mask(HalfInt(args.two_s), m) for m in args.epsilon_mask.split(",")]
    else:
        patterns = list(SignPattern.exhaustive(HalfInt(args.two_s)))
    report = epsilon_sweep(ladder, ns, patterns)
    doc = report.to_json()
    doc["converging"] = report.converging_masks()
    io.write_text(io.dump_json(doc), args.out)
    return 0


def cmd_acceptance(args) -> int:
    from .acceptance import CHECKS, run_all

    only = _int_list(args.only) if args.only else None
    if only and not all(1 <= i <= len(CHECKS) for i in only):
        raise UsageError(f"check numbers run from 1 to {len(CHECKS)}")
    results = run_all(only)
    for r in results:
        print(r.line(), flush=True)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phase-contract",
                                description="Phase-space kernels for spins and particles, and the contraction between them.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, two_s_required=True, fmt_choice=False):
        sp.add_argument("--two-s", type=int, required=two_s_required, help="twice the spin, 2s")
        sp.add_argument("--epsilon-mask", default=None,
                        help="bitstring of length 2s; character l-1 is eps_l, '1' means -1 (default all plus)")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--seed", type=int, default=0)
        if fmt_choice:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("cg", help="Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, exact and float")
    for name in ("j1", "m1", "j2", "m2", "J", "M"):
        sp.add_argument(name, help="integer or half-integer such as 3/2")
    sp.set_defaults(func=cmd_cg)

    sp = sub.add_parser("kernel", help="spin kernel matrix at a point, as JSON")
    common(sp)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--method", choices=("expansion", "rotation"), default="expansion")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("reconstruct", help="sample a symbol on the sphere and rebuild the operator")
    common(sp, two_s_required=False)
    sp.add_argument("--operator", help="operator JSON file (default: random Hermitian from --seed)")
    sp.add_argument("--n-theta", type=int, default=0)
    sp.add_argument("--n-phi", type=int, default=0)
    sp.add_argument("--samples-out", help="write theta,phi,weight,re,im samples here")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("audit", help="check the kernel postulates; exit 0 iff PASS")
    common(sp)
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--negative-control", action="store_true",
                    help="use diag((-1)^(s-m)) in place of the kernel diagonal (expected to FAIL)")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("wigner", help="particle Wigner function on a square (q, p) grid")
    sp.add_argument("--fock", type=int, help="Fock state |n>")
    sp.add_argument("--state", help="density matrix JSON with n_max")
    sp.add_argument("--n-max", type=int, default=None)
    sp.add_argument("--extent", type=float, default=3.0)
    sp.add_argument("--points", type=int, default=21)
    sp.add_argument("--integral-check", action="store_true", help="add the position-space integral column")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_wigner)

    sp = sub.add_parser("contract-table", help="S(s, n) and |S - 2| per (s, n)")
    sp.add_argument("--two-s-list", required=True, help="comma-separated values of 2s")
    sp.add_argument("--n-list", required=True, help="comma-separated n (each <= s/10)")
    sp.add_argument("--epsilon-mask", default=None)
    sp.add_argument("--integral", action="store_true",
                    help="append (-1)^n times the t=2 Laguerre integral (reference value 2)")
    sp.add_argument("--terms", action="store_true", help="emit l,x_l,term,partial_sum for one (s, n)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_contract_table)

    sp = sub.add_parser("compare", help="contracted spin kernel vs particle kernel on a corner block")
    common(sp, two_s_required=False, fmt_choice=True)
    sp.add_argument("--alpha-re", type=float, default=0.0)
    sp.add_argument("--alpha-im", type=float, default=0.0)
    sp.add_argument("--block", type=int, default=3)
    sp.add_argument("--n-max", type=int, default=None)
    sp.add_argument("--s-ladder", help="comma-separated spins, e.g. 100,200,400")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep-eps", help="convergence verdict for sign patterns, as JSON")
    common(sp)
    sp.add_argument("--s-ladder", default="50,100,200,400")
    sp.add_argument("--n-list", default="0,1,2,3")
    sp.set_defaults(func=cmd_sweep_eps)

    sp = sub.add_parser("acceptance", help="run the acceptance checks, one PASS/FAIL line each")
    sp.add_argument("--only", help="comma-separated check numbers")
    sp.set_defaults(func=cmd_acceptance)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError, PreconditionError, ValueError, TypeError, QuadratureError, OSError) as exc:
        print(f"phase-contract {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
