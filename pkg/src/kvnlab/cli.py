"""Config-driven experiment runner.

Every subcommand reads an INI-style config (flat ``key = value`` pairs
under section headers), runs one experiment family, and writes
deterministic artifacts into the output directory:

* one or more CSV files (17-significant-digit numbers, ``\\n`` endings,
  a version-tag header line, no timestamps — re-runs with the same config
  and seed are byte-identical);
* a PNG figure next to each CSV;
* ``summary.txt`` listing each checked identity with pass/fail and
  residual.  The exit status is 0 iff every check passed.

The environment variable ``KVNLAB_THREADS`` caps internal parallelism.
"""

from __future__ import annotations

import configparser
from pathlib import Path

import click
import numpy as np

from . import __version__
from .checks import (
    bracket_rows,
    cartan_rows,
    charge_algebra_rows,
    grassmann_rows,
    standard_hamiltonians,
)
from .dynamics import (
    HamiltonianSpec,
    SlitConfig,
    count_minima,
    gaussian_phase_space_state,
    gaussian_position_state,
    liouville_evolve,
    make_axis,
    moments,
    nsm_experiment,
    two_slit,
    two_slit_phase_invariance,
)
from .gauge import ab_spectra, bessel_zero, landau_spectrum, quantum_landau_levels
from .metrics import (
    build_metric,
    classify_metric,
    hermiticity_report,
    metric_eigenvalues,
    nogo_scan,
)
from .plotting import (
    save_profile_png,
    save_residuals_png,
    save_series_png,
    save_spectrum_png,
)

VERSION_TAG = f"# kvnlab {__version__}"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns, rows) -> Path:
    lines = [VERSION_TAG, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


class Summary:
    """Collects identity checks and writes summary.txt."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.items = []

    def add(self, name: str, passed: bool, residual: float):
        self.items.append((name, bool(passed), float(residual)))

    def add_rows(self, rows):
        for r in rows:
            self.add(f"{r['identity']} (n={r['n']})", r["passed"],
                     r["residual"])

    def finish(self) -> bool:
        lines = [VERSION_TAG]
        for name, passed, residual in self.items:
            lines.append(
                f"{'PASS' if passed else 'FAIL'}  residual={residual:.3e}  {name}"
            )
        ok = all(p for _, p, _ in self.items)
        lines.append(f"overall: {'PASS' if ok else 'FAIL'} "
                     f"({sum(p for _, p, _ in self.items)}/{len(self.items)})")
        (self.out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
        for line in lines[1:]:
            click.echo(line)
        return ok


def load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        p = Path(path)
        if not p.exists():
            raise click.ClickException(f"config file not found: {path}")
        try:
            cfg.read(p)
        except configparser.Error as exc:
            raise click.ClickException(f"malformed config {path}: {exc}")
    return cfg


def _get(cfg, section, key, default, cast=float):
    if cfg.has_option(section, key):
        raw = cfg.get(section, key)
        try:
            if cast is bool:
                return cfg.getboolean(section, key)
            return cast(raw)
        except ValueError as exc:
            raise click.ClickException(
                f"config [{section}] {key} = {raw!r}: {exc}"
            )
    return default


def common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(),
                      default=None, help="INI config file.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(file_okay=False),
                      default=".", help="Output directory.")(fn)
    fn = click.option("--seed", type=int, default=0,
                      help="Seed for randomized sweeps.")(fn)
    fn = click.option("--tol", type=float, default=None,
                      help="Tolerance override.")(fn)
    return fn


def _prepare(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out, Summary(out)


def _residual_csv(out, summary, ctx, name, rows):
    csv = write_csv(
        out / f"{name}.csv",
        ("identity", "n", "residual", "pass"),
        [(r["identity"], r["n"], r["residual"], r["passed"]) for r in rows],
    )
    save_residuals_png(csv, [r["identity"] for r in rows],
                       [r["residual"] for r in rows], name)
    summary.add_rows(rows)
    ctx.exit(0 if summary.finish() else 1)


@click.group()
@click.version_option(__version__)
def main():
    """Operatorial classical mechanics toolkit."""


@main.command("algebra-check")
@common_options
@click.pass_context
def algebra_check(ctx, config_path, out_dir, seed, tol):
    """Ladder-operator, Cartan-calculus and charge-algebra identities."""
    cfg = load_config(config_path)
    tol = tol if tol is not None else _get(cfg, "algebra", "tol", 1e-12)
    n_max = _get(cfg, "algebra", "n_max", 3, int)
    beta = _get(cfg, "algebra", "beta", 0.7)
    out, summary = _prepare(out_dir)
    rows = (
        grassmann_rows(range(1, n_max + 1), tol=tol)
        + cartan_rows(1, tol=tol)
        + charge_algebra_rows(1, beta=beta, tol=tol)
    )
    _residual_csv(out, summary, ctx, "algebra_check", rows)


@main.command("brackets-check")
@common_options
@click.pass_context
def brackets_check(ctx, config_path, out_dir, seed, tol):
    """Generalized brackets, hat-map round trip, superfield identity."""
    cfg = load_config(config_path)
    tol = tol if tol is not None else _get(cfg, "brackets", "tol", 1e-12)
    out, summary = _prepare(out_dir)
    rows = bracket_rows(seed=seed, tol=tol)
    _residual_csv(out, summary, ctx, "brackets_check", rows)


def _report_hamiltonians():
    """Scan family: the standard trio plus the matched (unit mass and
    frequency) harmonic oscillator and a quartic well."""
    from .polyfield import poly_variable

    hams = dict(standard_hamiltonians(1))
    p = poly_variable(1, ("p", 1))
    q = poly_variable(1, ("q", 1))
    hams["p^2/2+q^2/2"] = p * p * 0.5 + q * q * 0.5
    hams["p^2/2+q^4"] = p * p * 0.5 + q * q * q * q
    return hams


def _metric_family(cfg, section):
    b = _get(cfg, section, "gen_symplectic_b", 2.0)
    return [
        build_metric("svh", 1),
        build_metric("gauge", 1),
        build_metric("symplectic", 1),
        build_metric("genSymplectic", 1, {"b": b}),
    ]


def _metric_table_rows(metrics, hams, tol):
    table = []
    for m in metrics:
        ev = metric_eigenvalues(m)
        param = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(m.params.items()))
        for hname, H in hams.items():
            rep = hermiticity_report(H, m, tol=tol)
            table.append(
                (m.kind, classify_metric(m), param, hname,
                 rep.verdict == "hermitian", rep.residual,
                 float(np.min(ev)), float(np.max(ev)))
            )
    return table


@main.command("metric-report")
@common_options
@click.pass_context
def metric_report(ctx, config_path, out_dir, seed, tol):
    """Metric eigenvalues and evolution-operator hermiticity per metric."""
    cfg = load_config(config_path)
    tol = tol if tol is not None else _get(cfg, "metric", "tol", 1e-10)
    out, summary = _prepare(out_dir)
    metrics = _metric_family(cfg, "metric")
    hams = _report_hamiltonians()
    table = _metric_table_rows(metrics, hams, tol)
    csv = write_csv(
        out / "metric_report.csv",
        ("metric", "kind", "param", "H", "hermitian", "residual",
         "min_eig", "max_eig"),
        table,
    )
    save_residuals_png(csv, [f"{r[0]}:{r[3]}" for r in table],
                       [r[5] for r in table], "hermiticity residuals")
    gs = [m for m in metrics if m.kind == "genSymplectic"][0]
    b = gs.params["b"]
    want = np.sort(np.array([1.0, b, -b, -b * b]))
    res = float(np.max(np.abs(np.sort(metric_eigenvalues(gs)) - want)))
    summary.add(f"genSymplectic(b={b}) eigenvalue pattern", res <= 1e-10, res)
    svh_rows = {r[3]: r for r in table if r[0] == "svh"}
    summary.add("positive metric hermitian for the matched harmonic case",
                svh_rows["p^2/2+q^2/2"][4], svh_rows["p^2/2+q^2/2"][5])
    summary.add("positive metric non-hermitian for quartic potential",
                not svh_rows["p^2/2+q^4"][4], svh_rows["p^2/2+q^4"][5])
    for m in metrics:
        rows_m = [r for r in table if r[0] == m.kind]
        herm_all = all(r[4] for r in rows_m)
        positive = classify_metric(m) == "positive-definite"
        summary.add(
            f"{m.kind}: {'positive' if positive else 'indefinite'}, "
            f"{'hermitian for all H' if herm_all else 'not hermitian for all H'}",
            not (positive and herm_all), 0.0,
        )
    ctx.exit(0 if summary.finish() else 1)


@main.command("nogo")
@common_options
@click.pass_context
def nogo(ctx, config_path, out_dir, seed, tol):
    """Scan Hamiltonians x metrics: positivity vs. hermiticity trade-off."""
    cfg = load_config(config_path)
    tol = tol if tol is not None else _get(cfg, "nogo", "tol", 1e-10)
    out, summary = _prepare(out_dir)
    metrics = _metric_family(cfg, "nogo")
    hams = _report_hamiltonians()
    table = _metric_table_rows(metrics, hams, tol)
    csv = write_csv(
        out / "nogo.csv",
        ("metric", "kind", "param", "H", "hermitian", "residual",
         "min_eig", "max_eig"),
        table,
    )
    save_residuals_png(csv, [f"{r[0]}:{r[3]}" for r in table],
                       [r[5] for r in table], "no-go scan residuals")
    scan = nogo_scan(list(hams.values()), metrics, tol=tol)
    offenders = [r for r in scan if r["positive"] and r["hermitian_all"]]
    summary.add(
        f"no metric simultaneously positive-definite and hermitian for all "
        f"{len(hams)} scanned H",
        not offenders, float(len(offenders)),
    )
    svh = build_metric("svh", 1)
    harm = hams["p^2/2+q^2/2"]
    res = hermiticity_report(harm, svh).residual
    summary.add("positive metric hermitian for the matched harmonic case",
                res == 0.0, res)
    quart = hams["p^2/2+q^4"]
    res = hermiticity_report(quart, svh).residual
    summary.add("positive metric non-hermitian for quartic potential",
                res > tol, res)
    ctx.exit(0 if summary.finish() else 1)


@main.command("evolve")
@common_options
@click.pass_context
def evolve(ctx, config_path, out_dir, seed, tol):
    """Free classical evolution of a double-Gaussian: moment series."""
    cfg = load_config(config_path)
    tol = tol if tol is not None else _get(cfg, "evolve", "tol", 5e-3)
    sec = "evolve"
    a = _get(cfg, sec, "a", 1.0)
    b = _get(cfg, sec, "b", 1.0)
    p_i = _get(cfg, sec, "p_i", 2.0)
    mass = _get(cfg, sec, "mass", 1.0)
    t_max = _get(cfg, sec, "t_max", 3.0)
    samples = _get(cfg, sec, "samples", 7, int)
    grid_n = _get(cfg, sec, "grid", 512, int)
    out, summary = _prepare(out_dir)
    span_q = 8 * max(a, np.sqrt(a * a + b * b * t_max**2 / mass**2))
    q = make_axis(-span_q, span_q, grid_n)
    p = make_axis(p_i - 8 * b, p_i + 8 * b, grid_n)
    psi0 = gaussian_phase_space_state(q, p, a, b, p_i=p_i)
    H = HamiltonianSpec("free", mass=mass)
    rows = []
    worst = 0.0
    worst_norm = 0.0
    for t in np.linspace(0.0, t_max, samples):
        psi = liouville_evolve(H, psi0, t)
        worst_norm = max(worst_norm, abs(psi.norm_squared() - 1.0))
        mom = moments(psi)
        qm, qv = mom["q"]
        pm, pv = mom["p"]
        rows.append((t, qm, pm, qv, pv))
        ref = (p_i * t / mass, p_i, a * a / 2 + b * b * t * t / (2 * mass**2),
               b * b / 2)
        got = (qm, pm, qv, pv)
        scale = max(1.0, *np.abs(ref))
        worst = max(worst, max(abs(g - r) for g, r in zip(got, ref)) / scale)
    csv = write_csv(out / "evolve.csv",
                    ("t", "q_mean", "p_mean", "q_var", "p_var"), rows)
    ts = [r[0] for r in rows]
    save_series_png(csv, ts,
                    {"q_mean": [r[1] for r in rows],
                     "p_mean": [r[2] for r in rows],
                     "q_var": [r[3] for r in rows],
                     "p_var": [r[4] for r in rows]},
                    "t", "free-evolution moments")
    summary.add("moments match analytic free-flow values", worst <= tol, worst)
    summary.add("norm conserved", worst_norm < 1e-6, worst_norm)
    ctx.exit(0 if summary.finish() else 1)


def _slit_config(cfg, sec) -> SlitConfig:
    return SlitConfig(
        x_A=_get(cfg, sec, "x_a", 0.5),
        delta=_get(cfg, sec, "delta", 0.1),
        y_F=_get(cfg, sec, "y_f", 1.0),
        y_S=_get(cfg, sec, "y_s", 2.0),
        p_y0=_get(cfg, sec, "p_y0", 1.0),
        a=_get(cfg, sec, "a", 1.0),
        b=_get(cfg, sec, "b", 1.0),
        m=_get(cfg, sec, "mass", 1.0),
        hbar=_get(cfg, sec, "hbar", 1.0),
    )


@main.command("two-slit")
@common_options
@click.pass_context
def two_slit_cmd(ctx, config_path, out_dir, seed, tol):
    """Two-slit screen profile (classical, quantum or simplified)."""
    cfg = load_config(config_path)
    sec = "two_slit"
    mode = _get(cfg, sec, "mode", "quantum", str)
    slit = _slit_config(cfg, sec)
    t_F = _get(cfg, sec, "t_f", 1.0)
    t_S = _get(cfg, sec, "t_s", 2.0)
    out, summary = _prepare(out_dir)
    x, P = two_slit(slit, mode, t_F=t_F, t_S=t_S)
    csv = write_csv(out / "two_slit.csv", ("x", "P"), list(zip(x, P)))
    save_profile_png(csv, x, P, "x", "P(x)", f"two-slit screen profile ({mode})")
    minima = count_minima(P)
    summary.add(f"{mode} profile computed ({minima} interior minima)", True,
                0.0)
    if mode == "quantum":
        expected = {0.5: 6, 1.0: 12}.get(slit.x_A)
        if expected is not None:
            summary.add(f"interference minima count = {expected}",
                        minima == expected, abs(minima - expected))
    if mode == "classical":
        tol_add = tol if tol is not None else 1e-6
        _, Pb = two_slit(slit, "classical", x=x, normalize=False)
        _, P1 = two_slit(slit, "classical", x=x, slits="upper",
                         normalize=False)
        _, P2 = two_slit(slit, "classical", x=x, slits="lower",
                         normalize=False)
        res = float(np.max(np.abs(Pb - P1 - P2)) / np.max(Pb))
        summary.add("slit probabilities additive", res < tol_add, res)
        res = two_slit_phase_invariance(slit, seed=seed)
        summary.add("profile blind to injected initial phase", res < 1e-8, res)
    ctx.exit(0 if summary.finish() else 1)


@main.command("nsm")
@common_options
@click.pass_context
def nsm_cmd(ctx, config_path, out_dir, seed, tol):
    """Non-selective measurement: classical invariance, quantum flattening."""
    cfg = load_config(config_path)
    sec = "nsm"
    tau = _get(cfg, sec, "tau", 1.0)
    a = _get(cfg, sec, "a", 1.0)
    b = _get(cfg, sec, "b", 1.0)
    p_i = _get(cfg, sec, "p_i", 2.0)
    out, summary = _prepare(out_dir)
    tol_c = tol if tol is not None else 1e-6
    q = make_axis(-8 - tau * (p_i + 8 * b), 8 + tau * (p_i + 8 * b), 512)
    p = make_axis(p_i - 8 * b, p_i + 8 * b, 512)
    psi_qp = gaussian_phase_space_state(q, p, a, b, p_i=p_i)
    rho_free, rho_nsm = nsm_experiment("classical", psi_qp, tau)
    res = float(np.max(np.abs(rho_free - rho_nsm)))
    summary.add("classical distribution unchanged by the measurement",
                res < tol_c, res)
    x = make_axis(-30, 30, 4096)
    psi_x = gaussian_position_state(x, a)
    rho_free_q, rho_nsm_q = nsm_experiment("quantum", psi_x, tau)
    csv1 = write_csv(out / "nsm_quantum_free.csv", ("x", "P"),
                     list(zip(x, rho_free_q)))
    save_profile_png(csv1, x, rho_free_q, "x", "P(x)",
                     "quantum density without measurement")
    csv2 = write_csv(out / "nsm_quantum_post.csv", ("x", "P"),
                     list(zip(x, rho_nsm_q)))
    save_profile_png(csv2, x, rho_nsm_q, "x", "P(x)",
                     "quantum density after non-selective measurement")
    win = np.abs(x) < 5
    cv_nsm = float(np.std(rho_nsm_q[win]) / np.mean(rho_nsm_q[win]))
    cv_free = float(np.std(rho_free_q[win]) / np.mean(rho_free_q[win]))
    summary.add("quantum post-measurement density flat (CV < 0.05)",
                cv_nsm < 0.05, cv_nsm)
    summary.add("quantum no-measurement density not flat", cv_free > 1.0,
                cv_free)
    ctx.exit(0 if summary.finish() else 1)


@main.command("landau")
@common_options
@click.pass_context
def landau_cmd(ctx, config_path, out_dir, seed, tol):
    """Uniform-magnetic-field spectra, classical and quantum."""
    cfg = load_config(config_path)
    sec = "landau"
    B = _get(cfg, sec, "b_field", 1.0)
    mass = _get(cfg, sec, "mass", 1.0)
    N_tr = _get(cfg, sec, "n_tr", 40, int)
    fd_grid = _get(cfg, sec, "fd_grid", 128, int)
    fd = _get(cfg, sec, "fd_check", True, bool)
    out, summary = _prepare(out_dir)
    res = landau_spectrum(B, N_tr, mass=mass, fd_check=fd, fd_grid=fd_grid)
    spec = res["classical"]
    omega = res["omega"]
    rows = list(zip(spec.labels, spec.eigenvalues, spec.degeneracies))
    csv = write_csv(out / "landau.csv", ("label", "eigenvalue", "degeneracy"),
                    rows)
    save_spectrum_png(csv, spec.eigenvalues, spec.degeneracies,
                      "classical Landau spectrum")
    frac = float(np.max(np.abs(spec.eigenvalues / omega
                               - np.round(spec.eigenvalues / omega))))
    summary.add("classical eigenvalues are integer multiples of omega",
                frac == 0.0, frac)
    if fd:
        dev = res["fd_max_cluster_deviation"] / omega
        summary.add("finite-difference eigenvalues cluster on the integer "
                    "lattice (< 0.05 omega)", dev < 0.05, dev)
    quantum = quantum_landau_levels(B, mass=mass, n_max=5)
    half = float(np.max(np.abs((quantum.eigenvalues * mass / B) % 1.0 - 0.5)))
    summary.add("quantum levels keep the half-integer offset", half == 0.0,
                half)
    ctx.exit(0 if summary.finish() else 1)


@main.command("ab")
@common_options
@click.pass_context
def ab_cmd(ctx, config_path, out_dir, seed, tol):
    """Flux-line spectra: quantum shift vs. classical invariance."""
    cfg = load_config(config_path)
    sec = "ab"
    alpha = _get(cfg, sec, "alpha", 0.1)
    radius = _get(cfg, sec, "radius", 1.0)
    mu = _get(cfg, sec, "mu", 1.0)
    hbar = _get(cfg, sec, "hbar", 1.0)
    out, summary = _prepare(out_dir)
    res = ab_spectra(alpha, radius, levels=[(2, 1)], mu=mu, hbar=hbar)
    rows = []
    for row in res["quantum"]:
        rows.append((alpha, row["k"], row["m"], row["E_flux"],
                     res["classical_identical"]))
    csv = write_csv(out / "ab.csv",
                    ("alpha", "k", "m", "E_quantum", "E_classical_flag"),
                    rows)
    alphas = np.linspace(0, 0.9, 10)
    Es = [hbar**2 * bessel_zero(abs(1 - al), 2) ** 2 / (2 * mu * radius**2)
          for al in alphas]
    save_profile_png(csv, alphas, Es, "flux alpha",
                     "E (hbar^2 / mu b^2)", "quantum level vs. flux")
    z21 = bessel_zero(1, 2)
    summary.add("first nontrivial J_1 zero = 3.8317",
                abs(z21 - 3.8317) <= 1e-4, abs(z21 - 3.8317))
    z209 = bessel_zero(0.9, 2)
    summary.add("shifted-order zero = 3.70", abs(z209 - 3.70) <= 5e-3,
                abs(z209 - 3.70))
    dev = res["classical_elementwise_deviation"]
    summary.add("classical operator unchanged by the flux", dev <= 1e-10, dev)
    ctx.exit(0 if summary.finish() else 1)


if __name__ == "__main__":
    main()
