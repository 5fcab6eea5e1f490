"""Command-line front end.

Subcommands: spectrum, metric-check, fock-check, thermo, figure, selfcheck.
"""

import argparse
import json
import sys

import numpy as np

from . import fock as fk
from . import metric as mt
from . import operators as op
from . import figure as fg
from . import thermo as th
from .params import make_params, mode_energy
from .selfcheck import run_all


def _cmd_spectrum(args) -> int:
    p = make_params(args.gamma)
    H = op.build_hamiltonian(p, args.truncation)
    ev = op.dense_spectrum(H, args.count)
    print(f"gamma={args.gamma} M={args.truncation} Lambda={p.lambda_scale!r}")
    print(f"{'n':>3} {'eigenvalue':>24} {'analytic':>24} {'rel err':>10}")
    for n, lam in enumerate(ev, start=1):
        an = mode_energy(p, n)
        print(f"{n:>3} {float(lam)!r:>24} {an!r:>24} {abs(lam - an) / an:>10.2e}")
    return 0


def _cmd_metric_check(args) -> int:
    p = make_params(args.gamma)
    M, n = args.truncation, args.truncation // 2
    met = mt.build_metric(p, M)
    H = op.build_hamiltonian(p, M).entries
    T0, Tp, Tm = (t.entries for t in op.build_t_operators(p, M))

    def rel(R, *scales):
        s = sum(np.abs(a) @ np.abs(b) for a, b in scales)
        return float(np.abs(R[:n, :n]).max() / s[:n, :n].max())

    checks = [
        ("D2 H - H^T D2 (interior, relative)",
         rel(met.d2 @ H - H.T @ met.d2, (met.d2, H), (H.T, met.d2))),
        ("D2 T+ - T-^T D2 (interior, relative)",
         rel(met.d2 @ Tp - Tm.T @ met.d2, (met.d2, Tp), (Tm.T, met.d2))),
    ]
    for which, T in (("S0", T0), ("Splus", Tp), ("Sminus", Tm)):
        C = mt.conjugate_generator(p, M, which).entries
        checks.append((f"conjugated {which} vs T (interior, max)",
                       float(np.abs(C[:n, :n] - T[:n, :n]).max())))
    bad = False
    for name, value in checks:
        ok = value <= args.tol
        bad |= not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {args.tol:g})")
    return 1 if bad else 0


def _cmd_fock_check(args) -> int:
    p = make_params(args.gamma)
    space = fk.build_fock(args.modes)
    bio = op.dense_biorthogonal(p, args.modes)
    pf = fk.build_pseudo_fermions(space, bio)
    import scipy.sparse as sp
    I = sp.identity(space.dimension)
    worst = 0.0
    for i in range(args.modes):
        for j in range(args.modes):
            A = pf.d_dag[i].matrix @ pf.d[j].matrix + pf.d[j].matrix @ pf.d_dag[i].matrix
            if i == j:
                A = A - I
            A = sp.coo_matrix(A)
            if A.nnz:
                worst = max(worst, float(np.abs(A.data).max()))
    diag = fk.diagonal_form_residual(space, p, pf)
    checks = [("pseudo-fermion anticommutators", worst),
              ("diagonal-form residual", diag)]
    bad = False
    for name, value in checks:
        ok = value <= args.tol
        bad |= not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {args.tol:g})")
    return 1 if bad else 0


def _cmd_thermo(args) -> int:
    p = make_params(args.gamma)
    points = []
    if args.method in ("exact", "both"):
        points.append(th.exact_expectations(p, args.beta, args.mu,
                                            tail_tol=args.tail_tol))
    if args.method in ("em", "both"):
        points.append(th.em_expectations(p, args.beta, args.mu))
    for tp in points:
        print(f"method={tp.method} beta={tp.beta!r} mu={tp.mu!r} "
              f"zeta'={tp.zeta_prime!r}")
        print(f"  log Z   = {tp.log_z!r}")
        print(f"  energy  = {tp.energy!r}")
        print(f"  number  = {tp.number!r}")
        print(f"  entropy = {tp.entropy!r}"
              + (f"  (modes summed: {tp.n_modes})" if tp.n_modes else ""))
    return 0


def _cmd_figure(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            config = json.load(f)
    else:
        config = fg.default_figure_config()
    records = fg.figure_records(config)
    payload = (fg.records_to_csv(records) if args.format == "csv"
               else fg.records_to_json(records))
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        f.write(payload)
    boundary = fg.hull_boundary(make_params(config["gamma"]), config["n_max"])
    exact_pts = [r for r in records if r.method == "exact"]
    if exact_pts:
        report = fg.containment_check(exact_pts, boundary)
        print(f"containment: min margin {min(report.margins):.3e}, "
              f"violations {len(report.violations)}")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_selfcheck(_args) -> int:
    results = run_all()
    failed = False
    for r in results:
        tag = "PASS" if r.passed else ("FAIL (expected)" if r.expected_failure else "FAIL")
        failed |= (not r.passed and not r.expected_failure)
        print(f"criterion {r.cid:>3} {tag:>16}  {r.name}: {r.detail}")
    print("selfcheck:", "FAIL" if failed else "PASS")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nhfermi",
                                 description="non-Hermitian fermionic ladder model")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="low eigenvalues of the truncation")
    sp.add_argument("--gamma", type=float, default=0.6)
    sp.add_argument("--truncation", type=int, default=100)
    sp.add_argument("--count", type=int, default=8)
    sp.set_defaults(fn=_cmd_spectrum)

    mc = sub.add_parser("metric-check", help="metric/Hermitization residuals")
    mc.add_argument("--gamma", type=float, default=0.6)
    mc.add_argument("--truncation", type=int, default=60)
    mc.add_argument("--tol", type=float, default=1e-8)
    mc.set_defaults(fn=_cmd_metric_check)

    fc = sub.add_parser("fock-check", help="pseudo-fermion identities")
    fc.add_argument("--gamma", type=float, default=0.6)
    fc.add_argument("--modes", type=int, default=6)
    fc.add_argument("--tol", type=float, default=1e-10)
    fc.set_defaults(fn=_cmd_fock_check)

    tm = sub.add_parser("thermo", help="grand-canonical point")
    tm.add_argument("--gamma", type=float, default=0.6)
    tm.add_argument("--beta", type=float, required=True)
    tm.add_argument("--mu", type=float, required=True)
    tm.add_argument("--method", choices=("exact", "em", "both"), default="exact")
    tm.add_argument("--tail-tol", type=float, default=1e-12)
    tm.set_defaults(fn=_cmd_thermo)

    fig = sub.add_parser("figure", help="emit the curve-family dataset")
    fig.add_argument("--config", default=None, help="JSON config path")
    fig.add_argument("--out", required=True)
    fig.add_argument("--format", choices=("csv", "json"), default="csv")
    fig.set_defaults(fn=_cmd_figure)

    sc = sub.add_parser("selfcheck", help="run the acceptance battery")
    sc.set_defaults(fn=_cmd_selfcheck)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
