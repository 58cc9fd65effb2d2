"""Unified command-line front end.

Every run prints (and prepends to file outputs) a reproducibility header
with the fully resolved configuration, so identical configurations give
byte-identical outputs for deterministic subcommands.  Exit codes: 0
success, 1 domain failure or failed verdict, 2 resource failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import moments
from .errors import DomainError, HardcoreError, ResourceError
from .gadgets import (GadgetSpec, append_trees, build_hg,
                      count_short_cycles, read_graph, sample_core, write_graph)
from .treegibbs import (ModelParams, check_extra_conditions, critical_fugacity,
                        fixed_point_residuals, solve_fixed_points)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_RESOURCE = 2


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _levels(text: str) -> list:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _grid(text: str) -> tuple:
    try:
        ni, nj = text.lower().split("x")
        return int(ni), int(nj)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 100x32, got {text!r}")


def _config_header(ns: argparse.Namespace) -> list:
    pairs = sorted((k, v) for k, v in vars(ns).items()
                   if k not in ("func_impl",) and v is not None)
    joined = " ".join(f"{k}={v}" for k, v in pairs)
    return [f"# hardcore {ns.command}", f"# config: {joined}"]


class _Out:
    """Mirrors report lines to stdout and optionally a file."""

    def __init__(self, ns, path=None):
        self.lines = _config_header(ns)
        self.path = Path(path) if path else None

    def emit(self, text: str):
        self.lines.extend(text.rstrip("\n").split("\n"))

    def close(self):
        body = "\n".join(self.lines) + "\n"
        sys.stdout.write(body)
        if self.path:
            self.path.write_text(body)

    def write_csv(self, header, rows, ns):
        assert self.path, "csv output needs --out"
        with open(self.path, "w", newline="") as fh:
            for line in _config_header(ns):
                fh.write(line + "\n")
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def _default_threads() -> int:
    return int(os.environ.get("HARDCORE_THREADS", "1"))


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def cmd_fixed_points(ns) -> int:
    params = ModelParams(ns.d, float(ns.lam))
    fp = solve_fixed_points(params, tol=ns.tol)
    lc = critical_fugacity(ns.d)
    out = _Out(ns, ns.out)
    out.emit(f"lambda_c: {lc} = {float(lc)!r}")
    for name in ("p_plus", "p_minus", "p_star", "q_plus", "q_minus"):
        out.emit(f"{name}: {getattr(fp, name)!r}")
    out.emit(f"regime: {'non-uniqueness' if float(ns.lam) > float(lc) else 'uniqueness'}")
    for name, val in fixed_point_residuals(fp, params).items():
        out.emit(f"residual[{name}]: {val!r}")
    extra = check_extra_conditions(fp, ns.d)
    out.emit(f"extra_condition_product: value={extra.product_value!r} "
             f"margin={extra.product_margin!r} holds={extra.product_condition}")
    out.emit(f"extra_condition_qplus: value={extra.qplus_value!r} "
             f"margin={extra.qplus_margin!r} holds={extra.qplus_condition}")
    out.close()
    return EXIT_OK


def cmd_moments_eval(ns) -> int:
    params = ModelParams(ns.d, float(ns.lam))
    vals = [float(x) for x in ns.point.split(",")]
    out = _Out(ns, ns.out)
    name = ns.func
    if name == "phi1":
        pt = moments.OccupancyPair(*vals[:2])
        res = moments.phi1(pt, params)
    elif name == "f":
        pt = moments.OccupancyPair(*vals[:2])
        ov = moments.OverlapPoint(*vals[2:5])
        res = moments.second_moment_f(pt, ov, params)
    elif name == "tau":
        res = moments.tau(moments.OccupancyPair(*vals[:2]), ns.d)
    else:
        pt = moments.OccupancyPair(*vals[:2])
        g, dlt = vals[2], vals[3]
        res = {
            "ghat": lambda: moments.ghat(pt, g, dlt, params),
            "h1": lambda: moments.h1_bound(pt, g, dlt, ns.d),
            "psi": lambda: moments.psi_upper(pt, g, dlt, ns.d),
            "phi": lambda: moments.phi_cert(pt, g, dlt, ns.d),
        }[name]()
    out.emit(f"{name}: {res!r}")
    out.close()
    return EXIT_OK


def cmd_moments_grid(ns) -> int:
    import numpy as np
    params = ModelParams(ns.d, float(ns.lam))
    if ns.alpha is None or ns.beta is None:
        fp = solve_fixed_points(params)
        alpha = fp.p_minus if ns.alpha is None else float(ns.alpha)
        beta = fp.p_plus if ns.beta is None else float(ns.beta)
    else:
        alpha, beta = float(ns.alpha), float(ns.beta)
    pt = moments.OccupancyPair(alpha, beta)
    gammas = np.linspace(alpha * 1e-6, alpha * (1 - 1e-6), ns.gn)
    deltas = np.linspace(ns.dmin, ns.dmax, ns.dn)
    fun = {
        "ghat": lambda g, dd: moments.ghat(pt, g, dd, params),
        "h1": lambda g, dd: moments.h1_bound(pt, g, dd, ns.d),
        "psi": lambda g, dd: moments.psi_upper(pt, g, dd, ns.d),
        "phi": lambda g, dd: moments.phi_cert(pt, g, dd, ns.d),
    }[ns.func]
    values = np.empty((ns.gn, ns.dn))
    rows = []
    for i, g in enumerate(gammas):
        for j, dd in enumerate(deltas):
            values[i, j] = fun(float(g), float(dd))
            rows.append((float(g), float(dd), values[i, j]))
    writer = _Out(ns)
    writer.path = Path(ns.out)
    writer.write_csv(("gamma", "delta", ns.func), rows, ns)
    sys.stdout.write(f"wrote {ns.out} ({ns.gn * ns.dn} rows)\n")
    if not ns.no_plot:
        from .plotting import companion_png, save_moment_grid
        png = save_moment_grid(gammas, deltas, values, ns.func, companion_png(ns.out))
        sys.stdout.write(f"wrote {png}\n")
    return EXIT_OK


def cmd_certify(ns) -> int:
    from .certifier import certify_max_overlap, certify_preliminaries
    lam = Fraction(ns.lam)
    params = ModelParams(ns.d, float(lam))
    fp = solve_fixed_points(params, tol=1e-14)
    prelim = certify_preliminaries(fp, nbhd=ns.nbhd, d=ns.d, lam=lam)
    report = certify_max_overlap(fp, nbhd=ns.nbhd, grid=ns.grid,
                                 refine=ns.refine, threads=ns.threads,
                                 d=ns.d, lam=lam)
    out = _Out(ns, ns.out)
    out.emit(prelim.to_text())
    out.emit(report.to_text())
    overall = prelim.verdict and report.verdict
    out.emit(f"overall: {'PASS' if overall else 'FAIL'}")
    out.close()
    if ns.out and not ns.no_plot:
        from .plotting import companion_png, save_certification_heatmap
        png = save_certification_heatmap(report, companion_png(ns.out))
        sys.stdout.write(f"wrote {png}\n")
    return EXIT_OK if overall else EXIT_DOMAIN


def _spec_from(ns) -> GadgetSpec:
    return GadgetSpec.from_params(ns.n, ns.theta, ns.psi, ns.d, ns.seed,
                                  roots=ns.roots)


def cmd_gadget_sample(ns) -> int:
    g = sample_core(_spec_from(ns))
    write_graph(g, ns.out)
    sys.stdout.write("\n".join(_config_header(ns)) + "\n")
    sys.stdout.write(f"wrote {ns.out}: {g.n_vertices} vertices, "
                     f"{g.num_edges()} edges, max degree {g.max_degree()}, "
                     f"{g.collapsed_parallel} collapsed parallel edges\n")
    return EXIT_OK


def cmd_gadget_append_trees(ns) -> int:
    g = read_graph(ns.infile)
    g = append_trees(g, _spec_from(ns))
    write_graph(g, ns.out)
    sys.stdout.write("\n".join(_config_header(ns)) + "\n")
    sys.stdout.write(f"wrote {ns.out}: {g.n_vertices} vertices, "
                     f"max degree {g.max_degree()}\n")
    return EXIT_OK


def cmd_gadget_build_hg(ns) -> int:
    h = read_graph(ns.h)
    gadget = read_graph(ns.gadget)
    hg = build_hg(h, gadget, ns.k)
    write_graph(hg, ns.out)
    sys.stdout.write("\n".join(_config_header(ns)) + "\n")
    sys.stdout.write(f"wrote {ns.out}: {hg.n_vertices} vertices, "
                     f"{len(hg.cross_edges())} cross edges, "
                     f"max degree {hg.max_degree()}\n")
    return EXIT_OK


def cmd_gadget_cycles(ns) -> int:
    g = read_graph(ns.infile)
    ab = (ns.alpha, ns.beta) if ns.alpha is not None else None
    stats = count_short_cycles(g, ns.imax, alpha_beta=ab)
    out = _Out(ns, None)
    for s in stats:
        out.emit(f"length {s.length}: count={s.count} poisson_mean={s.lambda_mean!r}"
                 + (f" delta={s.delta_perturbation!r}" if s.delta_perturbation else ""))
    out.close()
    if ns.out:
        writer = _Out(ns)
        writer.path = Path(ns.out)
        writer.write_csv(("length", "count", "poisson_mean", "delta"),
                         [(s.length, s.count, s.lambda_mean, s.delta_perturbation)
                          for s in stats], ns)
        if not ns.no_plot:
            from .plotting import companion_png, save_cycle_bars
            save_cycle_bars(stats, companion_png(ns.out))
    return EXIT_OK


def _read_eta(path, g) -> dict:
    eta = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise DomainError(f"eta file line {lineno}: need '<vertex> <0|1>'")
            eta[int(parts[0])] = int(parts[1])
    for v in eta:
        if not 0 <= v < g.n_vertices:
            raise DomainError(f"eta vertex {v} out of range")
    return eta


def cmd_z_exact(ns) -> int:
    from .measure import exact_partition
    g = read_graph(ns.infile)
    z = exact_partition(g, Fraction(ns.lam), size_cap=ns.size_cap)
    out = _Out(ns, ns.out)
    out.emit(f"Z: {z} = {float(z)!r}")
    out.close()
    return EXIT_OK


def cmd_z_conditional(ns) -> int:
    from .measure import conditional_partition
    g = read_graph(ns.infile)
    eta = _read_eta(ns.eta, g)
    phase = {"plus": 1, "minus": -1, None: None}[ns.phase]
    cp = conditional_partition(g, Fraction(ns.lam), eta, phase=phase,
                               size_cap=ns.size_cap)
    out = _Out(ns, ns.out)
    out.emit(f"eta_consistent: {cp.eta_consistent}")
    out.emit(f"Z_eta: {cp.value} = {float(cp.value)!r}")
    out.close()
    return EXIT_OK


def cmd_z_formulas(ns) -> int:
    from .measure import expected_Z2_formula, expected_Z_formula, sample_conditional_z
    spec = _spec_from(ns)
    first = expected_Z_formula(spec, ns.alpha, ns.beta, (ns.eta_plus, ns.eta_minus),
                               lam=Fraction(ns.lam))
    second = expected_Z2_formula(spec, ns.alpha, ns.beta, (ns.eta_plus, ns.eta_minus),
                                 lam=Fraction(ns.lam))
    out = _Out(ns, ns.out)
    out.emit(f"E_Z: {first.gadget} = {float(first.gadget)!r}")
    out.emit(f"E_Z_no_ports: {first.no_ports} = {float(first.no_ports)!r}")
    out.emit(f"C_star: {float(first.c_star)!r}")
    out.emit(f"eta_ratio_prediction: {float(first.eta_ratio_prediction)!r}")
    out.emit(f"E_Z2: {second.gadget} = {float(second.gadget)!r}")
    out.emit(f"E_Z2_no_ports: {second.no_ports} = {float(second.no_ports)!r}")
    if ns.check:
        import numpy as np
        if Fraction(ns.lam) != 1:
            raise DomainError("--check sampling assumes fugacity 1")
        an = int(Fraction(ns.alpha) * ns.n)
        bn = int(Fraction(ns.beta) * ns.n)
        vals = np.array(sample_conditional_z(
            spec, [(an, bn, ns.eta_plus, ns.eta_minus)], ns.mc_samples, ns.seed)[0],
            dtype=float)
        for name, target, mc in (("E_Z", float(first.gadget), vals),
                                 ("E_Z2", float(second.gadget), vals ** 2)):
            mean = float(mc.mean())
            se = float(mc.std(ddof=1) / len(mc) ** 0.5)
            z = abs(mean - target) / se if se else 0.0
            out.emit(f"mc[{name}]: mean={mean!r} se={se!r} z={z:.2f}")
    out.close()
    return EXIT_OK


def cmd_sample_glauber(ns) -> int:
    from .measure import glauber_run
    g = read_graph(ns.infile)
    traj = glauber_run(g, float(Fraction(ns.lam)), ns.sweeps, ns.init, ns.seed,
                       record_every=ns.record_every)
    writer = _Out(ns)
    writer.path = Path(ns.out)
    writer.write_csv(("sweep", "w_plus", "w_minus", "phase"), list(traj.rows()), ns)
    sys.stdout.write("\n".join(_config_header(ns)) + "\n")
    sys.stdout.write(f"wrote {ns.out} ({len(traj.w_plus)} rows); "
                     f"final phase {traj.phases[-1] if traj.phases else 'n/a'}\n")
    if not ns.no_plot:
        from .plotting import companion_png, save_trajectory_plot
        save_trajectory_plot(traj, companion_png(ns.out))
    return EXIT_OK


def cmd_reconstruct(ns) -> int:
    from .reconstruction import estimate_decay
    params = ModelParams(ns.d, float(ns.lam))
    fp = solve_fixed_points(params)
    est = estimate_decay(fp, ns.d, float(ns.lam), ns.levels, ns.samples, ns.seed,
                         sign=ns.sign, zeta1=ns.zeta1)
    rows = [(l, est.x_mean[l], est.x_se[l], est.x_from_variance[l],
             est.identity_z[l], est.abs_gap_q[l], est.tail[l])
            for l in est.levels]
    writer = _Out(ns)
    writer.path = Path(ns.out)
    writer.write_csv(("level", "x_mean", "x_se", "x_from_variance",
                      "identity_z", "abs_gap_q", "tail"), rows, ns)
    sys.stdout.write("\n".join(_config_header(ns)) + "\n")
    sys.stdout.write(f"wrote {ns.out}; fitted_two_level_rate="
                     f"{est.fitted_two_level_rate!r} predicted="
                     f"{est.predicted_two_level_rate!r}\n")
    if not ns.no_plot:
        from .plotting import companion_png, save_decay_plot
        save_decay_plot(est, companion_png(ns.out))
    return EXIT_OK


def cmd_reduce(ns) -> int:
    from .reduction import run_reduction
    h = read_graph(ns.h)
    spec = _spec_from(ns)
    params = ModelParams(ns.d, float(ns.lam))
    fp = solve_fixed_points(params)
    rep = run_reduction(h, spec, Fraction(ns.lam), ns.k, mode=ns.mode, fp=fp,
                        size_cap=ns.size_cap, sweeps=ns.sweeps,
                        roots_overridden=ns.roots is not None)
    out = _Out(ns, ns.out)
    out.emit(rep.to_text())
    out.close()
    return EXIT_OK if rep.argmax_subset_of_maxcut else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_model_flags(p, default_d=6, default_lam="1"):
    p.add_argument("--d", type=int, default=default_d)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(default_lam))


def _add_spec_flags(p):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, default=0.12)
    p.add_argument("--psi", type=float, default=0.12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--roots", type=int, default=None,
                   help="desk-scale override of the derived port count m")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hardcore",
        description="hardcore-model toolkit: tree fixed points, moment "
                    "functions, rigorous certification, gadgets, exact "
                    "partition functions, broadcast reconstruction and the "
                    "MAX-CUT reduction")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixed-points", help="solve the tree fixed points")
    _add_model_flags(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_fixed_points)

    pm = sub.add_parser("moments", help="evaluate moment-exponent functions")
    msub = pm.add_subparsers(dest="moments_command", required=True)
    p = msub.add_parser("eval")
    _add_model_flags(p)
    p.add_argument("--func", required=True,
                   choices=("phi1", "f", "ghat", "tau", "h1", "psi", "phi"))
    p.add_argument("--point", required=True,
                   help="comma-separated alpha,beta[,gamma,delta[,epsilon]]")
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_moments_eval)
    p = msub.add_parser("grid")
    _add_model_flags(p)
    p.add_argument("--func", required=True, choices=("ghat", "h1", "psi", "phi"))
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gn", type=int, default=50)
    p.add_argument("--dn", type=int, default=50)
    p.add_argument("--dmin", type=float, default=0.015)
    p.add_argument("--dmax", type=float, default=0.33)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func_impl=cmd_moments_grid)

    p = sub.add_parser("certify", help="rigorous second-moment maximization certification")
    _add_model_flags(p)
    p.add_argument("--nbhd", type=float, default=1e-9)
    p.add_argument("--grid", type=_grid, default=(100, 32))
    p.add_argument("--refine", type=int, default=8)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func_impl=cmd_certify)

    pg = sub.add_parser("gadget", help="gadget constructions and statistics")
    gsub = pg.add_subparsers(dest="gadget_command", required=True)
    p = gsub.add_parser("sample")
    p.add_argument("--d", type=int, default=6)
    _add_spec_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func_impl=cmd_gadget_sample)
    p = gsub.add_parser("append-trees")
    p.add_argument("--d", type=int, default=6)
    _add_spec_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func_impl=cmd_gadget_append_trees)
    p = gsub.add_parser("build-hg")
    p.add_argument("--h", required=True)
    p.add_argument("--gadget", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func_impl=cmd_gadget_build_hg)
    p = gsub.add_parser("cycles")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--imax", type=int, default=8)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func_impl=cmd_gadget_cycles)

    pz = sub.add_parser("z", help="exact partition values and moment formulas")
    zsub = pz.add_subparsers(dest="z_command", required=True)
    p = zsub.add_parser("exact")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    p.add_argument("--size-cap", type=int, default=40)
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_z_exact)
    p = zsub.add_parser("conditional")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    p.add_argument("--phase", choices=("plus", "minus"), default=None)
    p.add_argument("--size-cap", type=int, default=40)
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_z_conditional)
    p = zsub.add_parser("formulas")
    p.add_argument("--d", type=int, default=3)
    _add_spec_flags(p)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--beta", type=_fraction, required=True)
    p.add_argument("--eta-plus", type=int, default=0)
    p.add_argument("--eta-minus", type=int, default=0)
    p.add_argument("--check", action="store_true",
                   help="compare against Monte Carlo over sampled gadget cores")
    p.add_argument("--mc-samples", type=int, default=20000)
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_z_formulas)

    ps = sub.add_parser("sample", help="Markov chain sampling")
    ssub = ps.add_subparsers(dest="sample_command", required=True)
    p = ssub.add_parser("glauber")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--init", choices=("empty", "plus", "minus"), default="empty")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func_impl=cmd_sample_glauber)

    p = sub.add_parser("reconstruct", help="broadcast decay estimation")
    _add_model_flags(p)
    p.add_argument("--levels", type=_levels, default=list(range(2, 13)))
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--zeta1", type=float, default=0.3)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func_impl=cmd_reconstruct)

    p = sub.add_parser("reduce", help="end-to-end MAX-CUT reduction")
    p.add_argument("--h", required=True)
    p.add_argument("--d", type=int, default=3)
    _add_spec_flags(p)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(8))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--mode", choices=("exact", "glauber"), default="exact")
    p.add_argument("--sweeps", type=int, default=2000)
    p.add_argument("--size-cap", type=int, default=80)
    p.add_argument("--out", default=None)
    p.set_defaults(func_impl=cmd_reduce)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return ns.func_impl(ns)
    except ResourceError as exc:
        sys.stdout.write(f"error: resource: {exc}\n")
        return EXIT_RESOURCE
    except HardcoreError as exc:
        sys.stdout.write(f"error: domain: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
