"""Command-line front end: fitting, evaluation, and verification runners.

Subcommands
-----------
fit          solve a sparse variational problem from a CSV dataset and
             persist the model (JSON) plus an iteration-diagnostics CSV
eval         evaluate a persisted model on a grid or a CSV of locations
verify       run the library's invariant checks, emit a pass/fail CSV
radon-check  transform-module invariants only (adjoint, inversion, parity,
             isotropy)
growth-check kernel growth and decay invariants only

Exit codes: 0 success, 1 usage or input error (also any failed verify
check), 2 non-convergence.  Every error is reported as a one-line JSON
object on stderr with fields "kind" (the exception class name) and
"message".  The environment variable LIZKIT_SEED overrides every seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .config import DEFAULT_N_TERMS, default_seed
from .errors import (
    InfeasibleInterpolation,
    InputNotFound,
    LizkitError,
    NotConverged,
    SchemaMismatch,
)
from .fourier import (
    AtomicMeasure1D,
    FourierSeries,
    dirac_pairing,
    frac_derivative,
    mnorm_atomic,
    periodic_bump,
    project_P0,
)
from .kernels import (
    CutoffFunction,
    FracLaplaceKernel,
    corrected_kernel_frac,
    norm_power_derivative,
    verify_growth_bound,
)
from .polynomials import monomial_exponents
from .radon import SampledField, backproject, default_angles, filter_Krad, radon, slice_check
from .solver import (
    REL_GAP,
    FitProblem,
    RidgeModel,
    evaluate_model,
    fit,
    mnorm_of_model,
    model_from_json,
    verify_seminorm_ridge,
)


class _Usage(Exception):
    """Raised in place of argparse's sys.exit so the error contract holds."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _emit_error(kind: str, message: str):
    print(json.dumps({"kind": kind, "message": message}), file=sys.stderr)


# ---------------------------------------------------------------------------
# tabular I/O


def _read_table(path: str) -> np.ndarray:
    """Read a numeric CSV with a header row into a float array.

    A first row that happens to parse as numbers is accepted as data, so
    headerless files also load.
    """
    if not os.path.exists(path):
        raise InputNotFound(f"no such file: {path}")
    rows = []
    with open(path, newline="") as fh:
        for i, rec in enumerate(csv.reader(fh)):
            rec = [c.strip() for c in rec if c.strip() != ""]
            if not rec:
                continue
            try:
                rows.append([float(c) for c in rec])
            except ValueError:
                if i == 0:
                    continue  # header row
                raise SchemaMismatch(f"{path}: non-numeric entry in row {i + 1}")
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaMismatch(f"{path}: rows have inconsistent column counts")
    return np.asarray(rows, dtype=np.float64)


def _write_table(path: str | None, header: list, rows):
    buf = []
    buf.append(",".join(header))
    for row in rows:
        buf.append(",".join(_cell(v) for v in row))
    text = "\n".join(buf) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# fit


def _parse_lambdas(text: str) -> list:
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise _Usage(f"--lambda must be a number or comma list, got {text!r}")
    if not vals or any(v <= 0 for v in vals):
        raise _Usage("--lambda values must be positive")
    return vals


def _ladder_paths(path: str, n: int) -> list:
    """One output path per ladder rung: stem-0.ext, stem-1.ext, ..."""
    if n == 1:
        return [path]
    root, ext = os.path.splitext(path)
    return [f"{root}-{i}{ext}" for i in range(n)]


def _load_data(args):
    table = _read_table(args.data)
    if table.shape[1] < 2:
        raise SchemaMismatch(f"{args.data}: need location columns plus a value column")
    loc, y = table[:, :-1], table[:, -1]
    if args.family == "periodic":
        if loc.shape[1] != 1:
            raise SchemaMismatch(
                f"{args.data}: periodic data must be (t, y) rows, got "
                f"{table.shape[1]} columns"
            )
        return loc[:, 0], y
    d = loc.shape[1]
    if args.d is not None and args.d != d:
        raise SchemaMismatch(
            f"{args.data}: {d} location columns but --d {args.d} was given"
        )
    return loc, y


def cmd_fit(args) -> int:
    if not args.interpolation and args.lam is None:
        raise _Usage("--lambda is required unless --interpolation is set")
    lams = [None] if args.interpolation else _parse_lambdas(args.lam)
    loc, y = _load_data(args)
    d = None if args.family == "periodic" else loc.shape[1]
    seed = default_seed() if args.seed is None else args.seed
    if os.environ.get("LIZKIT_SEED") is not None:
        seed = int(os.environ["LIZKIT_SEED"])
    outs = _ladder_paths(args.out, len(lams))
    diags = _ladder_paths(args.diagnostics, len(lams)) if args.diagnostics else [None] * len(lams)
    stamp = datetime.now(timezone.utc).isoformat()
    all_converged = True
    for lam, out_path, diag_path in zip(lams, outs, diags):
        problem = FitProblem(
            family=args.family,
            locations=loc,
            values=y,
            lam=0.0 if lam is None else lam,
            loss=args.loss,
            huber_delta=args.huber_delta,
            interpolation=args.interpolation,
            alpha=args.alpha,
            period=args.period,
            n_terms=args.n_terms,
            m=args.m,
            d=d,
            extended=args.extended,
            seed=seed,
        )
        try:
            result = fit(problem, rel_gap=args.rel_gap, max_iter=args.max_iter)
        except InfeasibleInterpolation as exc:
            # persist the best iterate so the failure can be inspected
            if exc.model is not None:
                with open(out_path, "w") as fh:
                    fh.write(exc.model.to_json() + "\n")
            if diag_path and exc.diagnostics is not None:
                exc.diagnostics.to_csv(diag_path, timestamp=stamp)
            raise
        model, diag = result.model, result.diagnostics
        with open(out_path, "w") as fh:
            fh.write(model.to_json() + "\n")
        if diag_path:
            diag.to_csv(diag_path, timestamp=stamp)
        print(
            json.dumps(
                {
                    "model": out_path,
                    "lambda": lam,
                    "converged": diag.converged,
                    "n_atoms": model.n_atoms,
                    "mnorm": mnorm_of_model(model),
                }
            )
        )
        all_converged = all_converged and diag.converged
    if not all_converged:
        _emit_error("NotConverged", "certificate gap not closed within the iteration budget")
        return 2
    return 0


# ---------------------------------------------------------------------------
# eval


def _model_family(model) -> str:
    return json.loads(model.to_json())["family"]


def _model_dim(model) -> int:
    return 1 if _model_family(model) == "periodic" else model.d


def _parse_grid(spec: str, d: int) -> np.ndarray:
    """Mesh from per-axis specs lo:hi:n; one spec is reused for every axis."""
    parts = [p for p in spec.split(",") if p.strip()]
    if len(parts) == 1:
        parts = parts * d
    if len(parts) != d:
        raise _Usage(f"--grid needs 1 or {d} axis specs, got {len(parts)}")
    axes = []
    for p in parts:
        try:
            lo, hi, n = p.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(n)))
        except ValueError:
            raise _Usage(f"bad --grid axis spec {p!r}; expected lo:hi:n")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def cmd_eval(args) -> int:
    if not os.path.exists(args.model):
        raise InputNotFound(f"no such file: {args.model}")
    with open(args.model) as fh:
        model = model_from_json(fh.read())
    if args.family is not None and args.family != _model_family(model):
        raise SchemaMismatch(
            f"model file holds family {_model_family(model)!r}, not {args.family!r}"
        )
    d = _model_dim(model)
    if (args.points is None) == (args.grid is None):
        raise _Usage("exactly one of --points or --grid is required")
    if args.points is not None:
        table = _read_table(args.points)
        if table.shape[1] < d:
            raise SchemaMismatch(
                f"{args.points}: model needs {d} location columns, file has {table.shape[1]}"
            )
        pts = table[:, :d]  # extra columns (e.g. sample values) are ignored
    else:
        pts = _parse_grid(args.grid, d)
    vals = evaluate_model(model, pts[:, 0] if d == 1 else pts)
    header = [f"x{i + 1}" for i in range(d)] + ["f"]
    rows = [list(p) + [v] for p, v in zip(pts, np.atleast_1d(vals))]
    _write_table(args.out, header, rows)
    return 0


# ---------------------------------------------------------------------------
# verification checks; each returns rows (name, measured, tolerance)


def _random_series(rng, order=256, period=1.0):
    n = np.arange(1, order + 1)
    half = (rng.standard_normal(order) + 1j * rng.standard_normal(order)) / (1.0 + n)
    c = np.zeros(2 * order + 1, dtype=np.complex128)
    c[order + 1 :] = half
    c[:order] = np.conj(half[::-1])
    return FourierSeries(period, c)


def _checks_operators(rng):
    err = 0.0
    for _ in range(20):
        s = _random_series(rng)
        base = s.sample_uniform(2048)
        for alpha in (0.5, 1.0, 1.5, 2.0):
            back = frac_derivative(frac_derivative(s, alpha), -alpha)
            err = max(err, float(np.max(np.abs(back.sample_uniform(2048) - base))))
    rows = [("operator_roundtrip", err, 1e-9)]
    s = _random_series(rng)
    p1 = project_P0(s)
    p2 = project_P0(p1)
    rows.append(("projector_idempotent", float(np.max(np.abs(p2.coeffs - p1.coeffs))), 0.0))
    rows.append(("projector_mean", abs(p1.mean), 1e-14))
    err = 0.0
    for _ in range(5):
        s = project_P0(_random_series(rng, order=64))
        t0 = float(rng.uniform(0.0, 1.0))
        err = max(err, abs(dirac_pairing(t0, s) - float(s.evaluate(t0))))
    rows.append(("dirac_pairing", err, 1e-10))
    w = rng.standard_normal(6)
    mu = AtomicMeasure1D(w, np.linspace(0.05, 0.95, 6))
    rows.append(("mnorm_atomic", abs(mnorm_atomic(mu) - float(np.sum(np.abs(w)))), 0.0))
    bump = periodic_bump(0.37, 0.02, 1.0)
    rows.append(("bump_saturation", 1.0 - dirac_pairing(0.37, bump), 1e-2))
    return rows


def _gaussian_field(n=129, extent=8.0):
    return SampledField.from_function(
        lambda x1, x2: np.exp(-0.5 * (x1 * x1 + x2 * x2)), n, extent
    )


def _checks_slice(rng):
    odd = SampledField.from_function(
        lambda x1, x2: x1 * np.exp(-0.5 * (x1 * x1 + x2 * x2)), 129, 8.0
    )
    rows = []
    for name, fld, tol in (
        ("slice_gaussian", _gaussian_field(), 1e-6),
        ("slice_odd", odd, 1e-5),
    ):
        # normalize across directions: a column can vanish identically
        # (odd field, slice along its null direction), which makes the
        # per-column ratio noise over noise
        worst, scale = 0.0, 0.0
        for theta in default_angles(180):
            rep = slice_check(fld, [math.cos(theta), math.sin(theta)])
            worst = max(
                worst,
                float(np.max(np.abs(rep.column_spectrum - rep.field_spectrum))),
            )
            scale = max(scale, float(np.max(np.abs(rep.column_spectrum))))
        rows.append((name, worst / scale, tol))
    return rows


def _checks_inversion(rng):
    fld = SampledField.from_function(
        lambda x1, x2: np.cos(2.0 * x1) * np.exp(-0.5 * (x1 * x1 + x2 * x2)), 129, 8.0
    )
    rec = backproject(filter_Krad(radon(fld)), fld.n, fld.spacing)
    ax = fld.coords
    x1, x2 = np.meshgrid(ax, ax, indexing="ij")
    interior = x1 * x1 + x2 * x2 <= (0.5 * fld.radius) ** 2
    err = np.max(np.abs(rec.values[interior] - fld.values[interior]))
    return [("inversion_identity", float(err / np.max(np.abs(fld.values))), 1e-3)]


def _random_field(rng, n=65, extent=7.0):
    a = rng.standard_normal(3)
    k = rng.uniform(0.5, 2.5, (3, 2))
    ph = rng.uniform(0, 2 * np.pi, 3)

    def f(x1, x2):
        env = np.exp(-0.5 * (x1 * x1 + x2 * x2))
        out = np.zeros_like(x1)
        for ai, ki, pi in zip(a, k, ph):
            out += ai * np.cos(ki[0] * x1 + ki[1] * x2 + pi)
        return out * env

    return SampledField.from_function(f, n, extent)


def _sino_inner(g1, g2):
    # full-circle inner product; both sinograms even, so double the half circle
    return 2.0 * float(np.sum(g1.values * g2.values)) * g1.dt * (math.pi / g1.n_dir)


def _checks_adjoint(rng):
    worst = 0.0
    for _ in range(20):
        f = _random_field(rng)
        u = _random_field(rng)
        rf = radon(f, angles=default_angles(90))
        g = radon(u, angles=default_angles(90))
        lhs = _sino_inner(rf, g)
        bg = backproject(g, f.n, f.spacing, upsample=16)
        rhs = float(np.sum(f.values * bg.values)) * f.spacing**2
        # the pairing of independent draws can cancel to near zero, so
        # normalize by the norms, not by the pairing itself
        scale = math.sqrt(_sino_inner(rf, rf) * _sino_inner(g, g))
        worst = max(worst, abs(lhs - rhs) / scale)
    return [("adjoint_pairing", worst, 1e-4)]


def _checks_parity(rng):
    even = SampledField.from_function(
        lambda x1, x2: np.cos(2.0 * x1) * np.cos(x2) * np.exp(-0.5 * (x1 * x1 + x2 * x2)),
        65,
        7.0,
    )
    odd = SampledField.from_function(
        lambda x1, x2: x1 * np.exp(-0.5 * (x1 * x1 + x2 * x2)), 65, 7.0
    )
    rows = []
    for name, fld, sign in (("parity_even", even, 1.0), ("parity_odd", odd, -1.0)):
        g = radon(fld, angles=default_angles(60))
        v = g.values
        defect = np.max(np.abs(v - sign * v[::-1, :]))  # t grid is symmetric
        rows.append((name, float(defect / max(np.max(np.abs(v)), 1e-30)), 1e-10))
    return rows


def _checks_isotropy(rng):
    # cubic-interpolation anisotropy decays like h^4; the fine lattice is
    # what brings the column spread under the tolerance
    g = radon(_gaussian_field(449, 7.0), angles=default_angles(12))
    v = g.values
    spread = np.max(np.abs(v - v[:, :1]))
    return [("isotropy_columns", float(spread / np.max(np.abs(v))), 1e-8)]


def _fd_error(kern, k, pts):
    """Closed-form d^k against a central difference of the order-(|k|-1) form."""
    if sum(k) == 0:
        return 0.0
    i = next(j for j, kj in enumerate(k) if kj > 0)
    km = tuple(kj - (1 if j == i else 0) for j, kj in enumerate(k))
    h = 1e-5
    hv = np.zeros(kern.d)
    hv[i] = h
    hi = kern.A * norm_power_derivative(kern.beta, km, pts + hv)
    lo = kern.A * norm_power_derivative(kern.beta, km, pts - hv)
    ex = kern.A * norm_power_derivative(kern.beta, k, pts)
    scale = np.maximum(np.abs(ex), 1e-9 * float(np.max(np.abs(ex))))
    return float(np.max(np.abs((hi - lo) / (2.0 * h) - ex) / scale))


def _far_points(rng, d, count=400):
    r = np.exp(rng.uniform(np.log(1.0), np.log(100.0), count))
    if d == 1:
        return (r * rng.choice([-1.0, 1.0], count))[:, None]
    ang = rng.uniform(0.0, 2.0 * np.pi, count)
    return r[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def _checks_growth(rng):
    rows = []
    for d, alpha in ((1, 2.5), (2, 3.5)):
        kern = FracLaplaceKernel(alpha, d)
        pts = _far_points(rng, d)
        worst_fd, worst_slope = 0.0, 0.0
        for k in monomial_exponents(d, 2):
            rep = verify_growth_bound(kern, k, pts)
            worst_slope = max(worst_slope, abs(rep.slope))
            worst_fd = max(worst_fd, _fd_error(kern, k, pts[:25]))
        rows.append((f"growth_fd_{d}d", worst_fd, 1e-4))
        rows.append((f"growth_trend_{d}d", worst_slope, 2e-2))
    return rows


def _checks_decay(rng):
    chi = CutoffFunction()
    rows = []
    for d, alpha in ((1, 2.5), (2, 3.5)):
        kern = FracLaplaceKernel(alpha, d)
        xs = _far_points(rng, d, 40) * 0.05  # fixed observation points, |x| <= 5
        if d == 1:
            dirs = np.array([[1.0], [-1.0]])
        else:
            th = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False)
            dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        envelope = (np.sqrt(np.sum(xs * xs, axis=-1)) + 2.0) ** kern.beta
        worst_ratio, calib, worst_env = 0.0, 0.0, 0.0
        for xi in dirs:
            levels = []
            for radius in (10.0, 100.0, 1000.0):
                vals = np.abs(corrected_kernel_frac(kern, chi, xs, radius * xi))
                levels.append(vals)
            calib = max(calib, float(np.max(levels[0] / envelope)))
            for prev, nxt in zip(levels, levels[1:]):
                worst_ratio = max(worst_ratio, float(np.max(nxt / prev)))
        for xi in dirs:
            for radius in (10.0, 100.0, 1000.0):
                vals = np.abs(corrected_kernel_frac(kern, chi, xs, radius * xi))
                worst_env = max(worst_env, float(np.max(vals / (2.0 * calib * envelope))))
        rows.append((f"decay_monotone_{d}d", worst_ratio, 1.0))
        rows.append((f"decay_envelope_{d}d", worst_env, 1.0))
    return rows


def _checks_seminorm(rng):
    th = math.radians(34.0)
    model = RidgeModel(2, 2, [1.0], [0.3], [[math.cos(th), math.sin(th)]])
    rep = verify_seminorm_ridge(model)
    return [("seminorm_single", rep.rel_deviation, 1e-1)]


_GROUPS = [
    ("operators", _checks_operators, (
        "operator_roundtrip", "projector_idempotent", "projector_mean",
        "dirac_pairing", "mnorm_atomic", "bump_saturation")),
    ("slice", _checks_slice, ("slice_gaussian", "slice_odd")),
    ("inversion", _checks_inversion, ("inversion_identity",)),
    ("adjoint", _checks_adjoint, ("adjoint_pairing",)),
    ("parity", _checks_parity, ("parity_even", "parity_odd")),
    ("isotropy", _checks_isotropy, ("isotropy_columns",)),
    ("growth", _checks_growth, (
        "growth_fd_1d", "growth_trend_1d", "growth_fd_2d", "growth_trend_2d")),
    ("decay", _checks_decay, (
        "decay_monotone_1d", "decay_envelope_1d",
        "decay_monotone_2d", "decay_envelope_2d")),
    ("seminorm", _checks_seminorm, ("seminorm_single",)),
]


def _run_checks(groups, only, tol_scale, out_path, seed) -> int:
    tokens = [t.strip() for t in only.split(",") if t.strip()] if only else None
    rows = []
    for group, fn, names in _GROUPS:
        if group not in groups:
            continue
        if tokens is not None:
            wanted = [
                n
                for n in names
                if any(t == group or n == t or n.startswith(t) for t in tokens)
            ]
            if not wanted:
                continue
        else:
            wanted = list(names)
        rng = np.random.default_rng(seed)
        for name, measured, tol in fn(rng):
            if name in wanted:
                rows.append((name, measured, tol * tol_scale))
    if not rows:
        raise _Usage(f"--only {only!r} matched no checks")
    table = [
        (name, f"{measured:.9e}", f"{tol:.9e}", "pass" if measured <= tol else "fail")
        for name, measured, tol in rows
    ]
    _write_table(out_path, ["check", "measured", "tolerance", "status"], table)
    n_fail = sum(1 for r in table if r[3] == "fail")
    if out_path is not None:
        print(f"{len(table) - n_fail}/{len(table)} checks passed")
    return 0 if n_fail == 0 else 1


def _seed_of(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    if os.environ.get("LIZKIT_SEED") is not None:
        seed = int(os.environ["LIZKIT_SEED"])
    return seed


def cmd_verify(args) -> int:
    groups = {"operators", "slice", "inversion", "growth", "decay", "seminorm"}
    return _run_checks(groups, args.only, args.tol_scale, args.out, _seed_of(args))


def cmd_radon_check(args) -> int:
    groups = {"adjoint", "inversion", "parity", "isotropy"}
    return _run_checks(groups, args.only, args.tol_scale, args.out, _seed_of(args))


def cmd_growth_check(args) -> int:
    groups = {"growth", "decay"}
    return _run_checks(groups, args.only, args.tol_scale, args.out, _seed_of(args))


# ---------------------------------------------------------------------------
# argument wiring


def _add_check_flags(p):
    p.add_argument("--only", default=None, help="comma list of check or group names")
    p.add_argument("--tol-scale", type=float, default=1.0,
                   help="multiply every tolerance (e.g. a tiny value forces failures)")
    p.add_argument("--out", default=None, help="write the pass/fail CSV here instead of stdout")
    p.add_argument("--seed", type=int, default=None)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lizkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a sparse model to CSV data")
    p.add_argument("--family", required=True, choices=("periodic", "fraclap", "ridge"))
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--period", type=float, default=None)
    p.add_argument("--n-terms", type=int, default=DEFAULT_N_TERMS)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--d", type=int, default=None,
                   help="checked against the data's location columns")
    p.add_argument("--extended", action="store_true",
                   help="ridge only: add the unpenalized polynomial part")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="regularization weight, or a comma ladder for one model per value")
    p.add_argument("--interpolation", action="store_true",
                   help="drive lambda to zero until the data are matched")
    p.add_argument("--loss", choices=("quadratic", "huber"), default="quadratic")
    p.add_argument("--huber-delta", type=float, default=1.0)
    p.add_argument("--data", required=True, help="CSV of (location..., value) rows")
    p.add_argument("--out", required=True, help="model JSON path; ladders get -0, -1, ... suffixes")
    p.add_argument("--diagnostics", default=None, help="per-iteration CSV path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rel-gap", type=float, default=REL_GAP)
    p.add_argument("--max-iter", type=int, default=50)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a model JSON on points")
    p.add_argument("--model", required=True)
    p.add_argument("--family", default=None,
                   help="assert the model family; mismatch is an error")
    p.add_argument("--points", default=None,
                   help="CSV whose leading columns are locations (extras ignored)")
    p.add_argument("--grid", default=None,
                   help="per-axis lo:hi:n specs, comma separated; one spec covers all axes")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run all library invariant checks")
    _add_check_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("radon-check", help="transform invariants only")
    _add_check_flags(p)
    p.set_defaults(func=cmd_radon_check)

    p = sub.add_parser("growth-check", help="kernel growth/decay invariants only")
    _add_check_flags(p)
    p.set_defaults(func=cmd_growth_check)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        _emit_error("UsageError", str(exc))
        return 1
    except (NotConverged, InfeasibleInterpolation) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    except LizkitError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except (OSError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
