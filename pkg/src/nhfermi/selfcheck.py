"""Acceptance battery: every check the package must pass, as callable
functions shared by the CLI selfcheck command and the pytest suite.

Each criterion returns a CriterionResult with the worst observed metric in
``detail``.  One check (5b) is flagged ``expected_failure``: the ladder-
pattern bilinears and the truncated linear combinations of T+/T- cannot
agree on a finite mode set, because the combination matrices have nonzero
trace -(gamma/Lambda) m(2m-1)/4 while any similarity image of the strictly
off-diagonal ladder pattern is traceless.  The check is still executed and
reported honestly.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fock as fk
from . import metric as mt
from . import operators as op
from . import figure as fg
from . import thermo as th
from .params import make_params, mode_energy

__all__ = ["CriterionResult", "run_criterion", "run_all", "CRITERIA"]


@dataclass
class CriterionResult:
    cid: str
    name: str
    passed: bool
    detail: str
    expected_failure: bool = False


def _result(cid, name, ok, detail, expected_failure=False):
    return CriterionResult(cid=cid, name=name, passed=bool(ok), detail=detail,
                           expected_failure=expected_failure)


# -- 1 ---------------------------------------------------------------------

def criterion_1():
    """Truncated spectrum matches the analytic ladder at M = 100."""
    worst_eig, worst_gap = 0.0, 0.0
    for gamma in (0.2, 0.6, 1.5):
        p = make_params(gamma)
        H = op.build_hamiltonian(p, 100)
        ev = op.dense_spectrum(H, 8)
        an = np.array([mode_energy(p, k) for k in range(1, 9)])
        worst_eig = max(worst_eig, float(np.abs((ev - an) / an).max()))
        gaps = np.diff(ev)
        worst_gap = max(worst_gap, float(np.abs(gaps - p.lambda_scale).max()
                                         / p.lambda_scale))
    ok = worst_eig <= 1e-8 and worst_gap <= 1e-8
    return _result("1", "spectrum vs analytic ladder (M=100)", ok,
                   f"eig rel {worst_eig:.2e}, gap rel {worst_gap:.2e} (<= 1e-8)")


# -- 2 ---------------------------------------------------------------------

def criterion_2():
    """Seed vectors and ladder biorthogonality at gamma = 3/5, M = 60."""
    p = make_params(0.6)
    M = 60
    H = op.build_hamiltonian(p, M).entries
    lam1 = mode_energy(p, 1)
    r, l = op.ground_vectors(p, M)
    res_r = np.linalg.norm(H @ r - lam1 * r) / np.linalg.norm(r)
    res_l = np.linalg.norm(H.T @ l - lam1 * l) / np.linalg.norm(l)
    sys = op.build_biorthogonal(p, M, 5)
    gram = sys.gram_defect()
    ok = res_r <= 1e-10 and res_l <= 1e-10 and gram <= 1e-8
    return _result("2", "seed vectors + biorthogonal Gram (M=60)", ok,
                   f"residuals {res_r:.2e}/{res_l:.2e} (<= 1e-10), "
                   f"Gram defect {gram:.2e} (<= 1e-8)")


# -- 3 ---------------------------------------------------------------------

def _relative_residual(R, *scales):
    scale = sum(np.abs(a) @ np.abs(b) for a, b in scales)
    n = R.shape[0] // 2
    return float(np.abs(R[:n, :n]).max() / scale[:n, :n].max())


def criterion_3():
    """Metric identities at gamma = 3/5, M = 60 (interior, scale-relative);
    gamma = 0 collapses the metric to the exact identity."""
    p = make_params(0.6)
    M, n = 60, 30
    met = mt.build_metric(p, M)
    H = op.build_hamiltonian(p, M).entries
    T0, Tp, Tm = (t.entries for t in op.build_t_operators(p, M))
    herm = _relative_residual(met.d2 @ H - H.T @ met.d2,
                              (met.d2, H), (H.T, met.d2))
    adj = _relative_residual(met.d2 @ Tp - Tm.T @ met.d2,
                             (met.d2, Tp), (Tm.T, met.d2))
    conj = 0.0
    for which, T in (("S0", T0), ("Splus", Tp), ("Sminus", Tm)):
        C = mt.conjugate_generator(p, M, which).entries
        conj = max(conj, float(np.abs(C[:n, :n] - T[:n, :n]).max()))
    ident = float(np.abs(mt.build_metric(make_params(0.0), M).d2 - np.eye(M)).max())
    ok = herm <= 1e-8 and adj <= 1e-8 and conj <= 1e-8 and ident == 0.0
    return _result("3", "metric: Hermitization, T-adjointness, conjugations", ok,
                   f"rel resid {herm:.2e}/{adj:.2e}, conj {conj:.2e} "
                   f"(<= 1e-8), gamma=0 identity {ident:.1e}")


# -- 4 ---------------------------------------------------------------------

def _fock_frame(gamma=0.6, m=6):
    p = make_params(gamma)
    space = fk.build_fock(m)
    bio = op.dense_biorthogonal(p, m)
    pf = fk.build_pseudo_fermions(space, bio)
    return p, space, bio, pf


def _max_abs(M):
    M = sp.coo_matrix(M)
    return float(np.abs(M.data).max()) if M.nnz else 0.0


def criterion_4():
    """Fock algebra at m = 6, gamma = 3/5: canonical and pseudo-fermion
    anticommutators, diagonal form, single-particle restriction."""
    p, space, bio, pf = _fock_frame()
    m, I = space.modes, sp.identity(space.dimension)
    car = 0.0
    for i in range(1, m + 1):
        ci_d = fk.creation_op(space, i)
        for j in range(1, m + 1):
            cj = fk.annihilation_op(space, j)
            A = fk.anticommutator(ci_d, cj)
            if i == j:
                A = A - I
            car = max(car, _max_abs(A))
            car = max(car, _max_abs(ci_d.matrix @ fk.creation_op(space, j).matrix
                                    + fk.creation_op(space, j).matrix @ ci_d.matrix))
    pf_car = 0.0
    for i in range(m):
        for j in range(m):
            A = pf.d_dag[i].matrix @ pf.d[j].matrix + pf.d[j].matrix @ pf.d_dag[i].matrix
            if i == j:
                A = A - I
            pf_car = max(pf_car, _max_abs(A))
    diag = fk.diagonal_form_residual(space, p, pf)
    Hf = fk.second_quantize(space, op.build_hamiltonian(p, m).entries).matrix
    a1 = space.sector(1)
    restr = Hf[np.ix_(a1, a1)].toarray().real
    a1_gap = float(np.abs(restr - op.build_hamiltonian(p, m).entries).max())
    ok = car <= 1e-13 and pf_car <= 1e-10 and diag <= 1e-10 and a1_gap == 0.0
    return _result("4", "Fock algebra + diagonal form (m=6)", ok,
                   f"CAR {car:.1e}, pseudo-CAR {pf_car:.2e} (<= 1e-10), "
                   f"diag form {diag:.2e} (<= 1e-10), A1 restriction {a1_gap:.1e}")


# -- 5 ---------------------------------------------------------------------

def _a1_matrix(space, X):
    a1 = space.sector(1)
    return X.matrix[np.ix_(a1, a1)].toarray()


def criterion_5a():
    """T0 bilinear vs combination on A1; ladder raising to the second
    eigenvector (m = 6, gamma = 3/5)."""
    p, space, bio, pf = _fock_frame()
    T0b, Tmb, Tpb = fk.build_t_operators_fock(space, p, pf)
    T0c, Tmc, Tpc = fk.t_operators_combination(space, p)
    t0_gap = float(np.abs(_a1_matrix(space, T0b) - _a1_matrix(space, T0c)).max())
    psi1 = np.zeros(space.dimension, dtype=complex)
    a1 = space.sector(1)
    for k in range(space.modes):
        psi1[1 << k] = bio.right_vectors[k, 0]
    v = Tpb.matrix @ psi1
    Hf = fk.second_quantize(space, op.build_hamiltonian(p, space.modes).entries).matrix
    raising = float(np.linalg.norm(Hf @ v - bio.eigenvalues[1] * v) / np.linalg.norm(v))
    ok = t0_gap <= 1e-9 and raising <= 1e-9
    return _result("5a", "T0 bilinear = combination; T+ raising (m=6)", ok,
                   f"T0 gap {t0_gap:.2e}, raising residual {raising:.2e} (<= 1e-9)")


def criterion_5b():
    """T+/T- bilinear vs combination on A1 at 1e-9 (m = 6, gamma = 3/5).

    Unattainable on a finite mode set: trace(T+-combination) =
    -(gamma/Lambda) m(2m-1)/4 != 0 = trace of any similarity image of the
    off-diagonal ladder pattern.  Executed and reported, expected to fail.
    """
    p, space, bio, pf = _fock_frame()
    _, Tmb, Tpb = fk.build_t_operators_fock(space, p, pf)
    _, Tmc, Tpc = fk.t_operators_combination(space, p)
    gap = max(
        float(np.abs(_a1_matrix(space, Tpb) - _a1_matrix(space, Tpc)).max()),
        float(np.abs(_a1_matrix(space, Tmb) - _a1_matrix(space, Tmc)).max()),
    )
    ok = gap <= 1e-9
    return _result("5b", "T+/T- bilinear vs combination (m=6)", ok,
                   f"gap {gap:.2e} (<= 1e-9 unattainable: combination trace "
                   f"{-p.gamma / p.lambda_scale * 6 * 11 / 4:.3f} vs traceless pattern)",
                   expected_failure=True)


# -- 6 ---------------------------------------------------------------------

def criterion_6():
    """Sector-2 Gram of eigen-wedges under the lifted metric is the
    identity (m = 6, gamma = 3/5)."""
    p, space, bio, pf = _fock_frame()
    m = space.modes
    W = fk.one_particle_metric(bio)
    vac = np.zeros(space.dimension, dtype=complex)
    vac[0] = 1.0
    wedges = []
    for i in range(m):
        for j in range(i + 1, m):
            wedges.append(pf.d_dag[i].matrix @ (pf.d_dag[j].matrix @ vac))
    n = len(wedges)
    G = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            G[a, b] = fk.physical_inner_fock(space, W, wedges[a], wedges[b], 2)
    off = float(np.abs(G - np.diag(np.diag(G))).max())
    diag_min = float(np.real(np.diag(G)).min())
    diag_imag = float(np.abs(np.imag(np.diag(G))).max())
    ok = off <= 1e-9 and diag_min > 0 and diag_imag <= 1e-9
    return _result("6", "physical inner product Gram on A2 (m=6)", ok,
                   f"off-diag {off:.2e} (<= 1e-9), min diag {diag_min:.6f} > 0")


# -- 7 ---------------------------------------------------------------------

def _per_mode_entropy(p, beta, mu, n_modes):
    """Independent oracle: S = -sum_k [f ln f + (1-f) ln(1-f)]."""
    k = np.arange(1, n_modes + 1, dtype=float)
    x = beta * p.lambda_scale * (4 * k - 3) / 4.0 - beta * mu
    # f = 1/(1+e^x); stable via softplus: -[f ln f + (1-f) ln(1-f)]
    #   = log(1+e^{-x}) + x f
    f = 1.0 / (1.0 + np.exp(np.clip(x, -700, 700)))
    return math.fsum(np.logaddexp(0.0, -x) + x * f)


def criterion_7():
    """Entropy identities and finite-difference gradients of log Z for 20
    random (beta, mu) at gamma = 3/5."""
    p = make_params(0.6)
    rng = np.random.default_rng(20250808)
    worst_ident, worst_modes, worst_grad = 0.0, 0.0, 0.0
    for _ in range(20):
        beta = float(np.exp(rng.uniform(np.log(1e-3), 0.0)))
        mu = float(rng.uniform(-2 * p.lambda_scale, 2 * p.lambda_scale))
        tp = th.exact_expectations(p, beta, mu)
        ident = abs(tp.entropy - (beta * (tp.energy - mu * tp.number) + tp.log_z))
        modes = abs(_per_mode_entropy(p, beta, mu, tp.n_modes) - tp.entropy)
        h_b = 1e-5 * beta
        e_fd = -(th.exact_log_z(p, beta + h_b, tp.zeta)
                 - th.exact_log_z(p, beta - h_b, tp.zeta)) / (2 * h_b)
        h_z = 1e-5 * max(1.0, abs(tp.zeta))
        n_fd = -(th.exact_log_z(p, beta, tp.zeta + h_z)
                 - th.exact_log_z(p, beta, tp.zeta - h_z)) / (2 * h_z)
        worst_ident = max(worst_ident, ident)
        worst_modes = max(worst_modes, modes)
        worst_grad = max(worst_grad,
                         abs(e_fd - tp.energy) / max(1e-30, abs(tp.energy)),
                         abs(n_fd - tp.number) / max(1e-30, abs(tp.number)))
    ok = worst_ident <= 1e-9 and worst_modes <= 1e-9 and worst_grad <= 1e-5
    return _result("7", "entropy identities + log Z gradients (20 points)", ok,
                   f"identity {worst_ident:.2e}, per-mode {worst_modes:.2e} "
                   f"(<= 1e-9), gradients {worst_grad:.2e} (<= 1e-5)")


# -- 8 ---------------------------------------------------------------------

def criterion_8():
    """Euler-Maclaurin accuracy and its monotone improvement at high T."""
    p = make_params(0.6)
    gaps_n, gaps_e = {}, {}
    for beta in (0.2, 0.08, 0.04, 0.02, 0.01, 0.001):
        ex = th.exact_expectations(p, beta, 0.0)
        em = th.em_expectations(p, beta, 0.0)
        gaps_n[beta] = abs(em.number - ex.number) / ex.number
        gaps_e[beta] = abs(em.energy - ex.energy) / ex.energy
    seq = [gaps_n[b] for b in (0.2, 0.08, 0.04, 0.02, 0.01, 0.001)]
    monotone = all(a >= b for a, b in zip(seq, seq[1:]))
    ok = (gaps_e[0.01] <= 1e-3 and gaps_n[0.01] <= 1e-3
          and gaps_e[0.001] <= 1e-4 and gaps_n[0.001] <= 1e-4 and monotone)
    return _result("8", "Euler-Maclaurin vs exact sums", ok,
                   f"beta=0.01: E {gaps_e[0.01]:.2e} N {gaps_n[0.01]:.2e} (<= 1e-3); "
                   f"beta=0.001: E {gaps_e[0.001]:.2e} N {gaps_n[0.001]:.2e} (<= 1e-4); "
                   f"monotone={monotone}")


# -- 9 ---------------------------------------------------------------------

def criterion_9():
    """Figure regeneration: curve counts, containment, determinism."""
    config = fg.default_figure_config()
    records = fg.figure_records(config)
    n_curve_pts = config["mu_sweep"]["count"]
    expected = (len(config["beta_list"]) + len(config["mu_list"])) * n_curve_pts
    p = make_params(config["gamma"])
    boundary = fg.hull_boundary(p, config["n_max"])
    report = fg.containment_check(records, boundary)
    csv1 = fg.records_to_csv(records)
    csv2 = fg.records_to_csv(fg.figure_records(config))
    min_margin = min(report.margins)
    ok = (len(records) == expected and report.ok and csv1 == csv2)
    return _result("9", "figure curves, containment, determinism", ok,
                   f"{len(records)} records (expect {expected}), "
                   f"min margin {min_margin:.2e} (>= -1e-9), "
                   f"byte-deterministic={csv1 == csv2}")


# -- 10 --------------------------------------------------------------------

def criterion_10():
    """gamma = 0 collapses every construction to its symmetric counterpart."""
    p = make_params(0.0)
    M, m = 40, 4
    S0, Sp, Sm = (x.entries for x in op.build_generators(M))
    T0, Tp, Tm = (x.entries for x in op.build_t_operators(p, M))
    t_eq_s = max(np.abs(T0 - S0).max(), np.abs(Tp - Sp).max(), np.abs(Tm - Sm).max())
    d2_eq = float(np.abs(mt.build_metric(p, M).d2 - np.eye(M)).max())
    r, l = op.ground_vectors(p, M)
    e1 = np.zeros(M)
    e1[0] = 1.0
    seeds = max(np.abs(r - e1).max(), np.abs(l - e1).max())
    space = fk.build_fock(m)
    bio = op.dense_biorthogonal(p, m)
    pf = fk.build_pseudo_fermions(space, bio)
    d_eq_c = 0.0
    for i in range(m):
        d_eq_c = max(d_eq_c, _max_abs(pf.d_dag[i].matrix
                                      - fk.creation_op(space, i + 1).matrix))
        d_eq_c = max(d_eq_c, _max_abs(pf.d[i].matrix
                                      - fk.annihilation_op(space, i + 1).matrix))
    diag = fk.diagonal_form_residual(space, p, pf)
    ok = (t_eq_s == 0.0 and d2_eq == 0.0 and seeds == 0.0
          and d_eq_c <= 1e-12 and diag <= 1e-12)
    return _result("10", "gamma = 0 degenerate collapse", ok,
                   f"T=S {t_eq_s:.1e}, D2=I {d2_eq:.1e}, seeds {seeds:.1e}, "
                   f"d=c {d_eq_c:.1e}, diag {diag:.1e} (round-off)")


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5a": criterion_5a,
    "5b": criterion_5b,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
    "10": criterion_10,
}


def run_criterion(cid: str) -> CriterionResult:
    return CRITERIA[cid]()


def run_all():
    return [fn() for fn in CRITERIA.values()]
