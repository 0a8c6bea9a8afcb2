"""Command-line front end: ``opencavity {master,ou,dilation,weyl,all}``.

Scenarios come from a flat ``key = value`` file (an optional ``[scenario]``
header is accepted) with flag overrides. Tables are written as CSV
(``#``-prefixed metadata, 17 significant digits) or JSON, atomically.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .composite import DensityOperator
from .dilation import DilationGrid, diagram_residual
from .errors import GridAlignmentError, IntegrationDiverged, PreconditionError
from .fock import CavityParams, annihilation, coherent_state, number
from .lindblad import IntegratorConfig, LindbladModel, default_dim, integrate
from .ou import (
    analytic_mean,
    analytic_variance,
    ensemble_stats,
    printed_variance,
    simulate_ensemble,
)
from .weyl import (
    ccr_residual,
    ladder_errors,
    lindblad_channel_crosscheck,
    semigroup_law_residual,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

DEFAULTS = {
    "omega": "1.0",
    "gamma_prime": "0.5",
    "kappa": "0.1",
    "hbar": "1.0",
    "mass": "1.0",
    "alpha0": "0.5",
    "dim": "auto",
    "dt": "1e-3",
    "t_final": "5.0",
    "record_every": "100",
    "n_traj": "10000",
    "seed": "12345",
    "method": "euler-maruyama",
    "x_max": "auto",
    "dx_ladder": "4e-3, 2e-3, 1e-3",
    "t_values": "0, 0.5, 1, 2",
    "z": "1.0",
    "ccr_f": "0.5",
    "ccr_h": "0.5j",
    "ccr_dims": "20, 40, 60",
    "weyl_dim": "40",
    "weyl_z": "0.4",
    "weyl_t": "1.0",
    "crosscheck_gamma_prime": "0.4",
    "crosscheck_kappa": "0.0",
    "crosscheck_dt": "1e-3",
    "ladder_h": "1e-3",
    "fuzz_cases": "1000",
    "master_tol": "1e-6",
    "z_score_max": "4.0",
    "dilation_tol": "1e-3",
    "ratio_min": "1.4",
    "ratio_max": "2.8",
    "ccr_tol": "1e-6",
    "semigroup_tol": "1e-12",
    "crosscheck_tol": "1e-4",
    "ladder_tol": "1e-5",
    "format": "csv",
}


class ConfigError(Exception):
    pass


@dataclass
class Scenario:
    raw: dict
    params: CavityParams = field(init=False)

    def __post_init__(self):
        try:
            self.params = CavityParams(
                omega=self.as_float("omega"),
                gamma_prime=self.as_float("gamma_prime"),
                kappa=self.as_float("kappa"),
                hbar=self.as_float("hbar"),
                mass=self.as_float("mass"),
            )
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc
        if self.raw["format"] not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.raw['format']!r}")
        if self.raw["dim"] == "auto":
            self.raw["dim"] = str(default_dim(self.params, self.as_complex("alpha0")))
        if self.raw["x_max"] == "auto":
            self.raw["x_max"] = repr(20.0 / (2.0 * self.params.g))

    def _get(self, key, conv):
        try:
            return conv(self.raw[key])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {self.raw[key]!r}") from exc

    def as_float(self, key) -> float:
        return self._get(key, float)

    def as_int(self, key) -> int:
        return self._get(key, int)

    def as_complex(self, key) -> complex:
        return self._get(key, lambda s: complex(s.replace(" ", "")))

    def as_floats(self, key) -> list[float]:
        return self._get(key, lambda s: [float(x) for x in s.split(",") if x.strip()])

    def as_ints(self, key) -> list[int]:
        return self._get(key, lambda s: [int(x) for x in s.split(",") if x.strip()])

    def integrator(self) -> IntegratorConfig:
        try:
            return IntegratorConfig(self.as_float("dt"), self.as_float("t_final"), self.as_int("record_every"))
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc


def load_scenario(path: str | None, overrides: dict) -> Scenario:
    raw = dict(DEFAULTS)
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = p.read_text()
        if not text.lstrip().startswith("["):
            text = "[scenario]\n" + text
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        for section in cp.sections():
            for key, value in cp.items(section):
                if key not in DEFAULTS:
                    raise ConfigError(f"unknown config key {key!r}")
                raw[key] = value.strip()
    for key, value in overrides.items():
        if value is not None:
            raw[key] = str(value)
    return Scenario(raw)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    passed: bool = True


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


def render(table: Table, scenario: Scenario, fmt: str) -> str:
    meta = {"tool": "opencavity", "version": __version__, "command": table.name, **scenario.raw}
    if fmt == "json":
        rows = [[_json_value(v) for v in row] for row in table.rows]
        doc = {"meta": meta, "passed": table.passed, "columns": table.columns, "rows": rows}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key} = {value}\n")
    buf.write(f"# passed = {'true' if table.passed else 'false'}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if abs(diff) <= 1e-12 else math.copysign(math.inf, diff)


# --- commands -------------------------------------------------------------------


def cmd_master(sc: Scenario) -> Table:
    p = sc.params
    dim = sc.as_int("dim")
    alpha0 = sc.as_complex("alpha0")
    cfg = sc.integrator()
    model = LindbladModel(p, dim)
    rho0 = DensityOperator.pure(coherent_state(alpha0, dim))
    ev = integrate(model, rho0, cfg)
    a, n = annihilation(dim), number(dim)
    tol = sc.as_float("master_tol")
    table = Table(
        "master",
        ["t", "re_a", "im_a", "n", "trace", "min_eig", "re_a_analytic", "im_a_analytic", "abs_err"],
    )
    worst = 0.0
    for t, state in ev:
        m = state.matrix
        mean = np.trace(m @ a)
        ref = analytic_mean(alpha0, t, p)
        err = abs(mean - ref)
        worst = max(worst, err)
        lam = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        table.rows.append(
            [t, mean.real, mean.imag, np.trace(m @ n).real, np.trace(m).real, lam, ref.real, ref.imag, err]
        )
    table.passed = worst < tol
    return table


def cmd_ou(sc: Scenario) -> Table:
    p = sc.params
    alpha0 = sc.as_complex("alpha0")
    cfg = sc.integrator()
    n_traj, seed = sc.as_int("n_traj"), sc.as_int("seed")
    method = sc.raw["method"]
    if method not in ("euler-maruyama", "exact"):
        raise ConfigError(f"method must be euler-maruyama or exact, got {method!r}")
    if n_traj < 1 or not 0 <= seed < 2**64:
        raise ConfigError("n_traj must be >= 1 and seed a 64-bit unsigned integer")
    ens = simulate_ensemble(alpha0, cfg, n_traj, seed, p, method)
    st = ensemble_stats(ens)
    zmax = sc.as_float("z_score_max")
    table = Table(
        "ou",
        [
            "t", "mc_mean_re", "mc_mean_im", "mc_var", "mean_se", "var_se",
            "analytic_mean_re", "analytic_mean_im", "analytic_var", "printed_var",
            "z_mean", "z_var", "z_var_printed",
        ],
    )
    ok = True
    for k, t in enumerate(st.times):
        ref = analytic_mean(alpha0, t, p)
        var = analytic_variance(t, p)
        pvar = printed_variance(t, p)
        z_mean = _z(abs(st.mean[k] - ref), st.mean_se[k])
        z_var = _z(st.variance[k] - var, st.variance_se[k])
        z_pr = _z(st.variance[k] - pvar, st.variance_se[k])
        ok &= abs(z_mean) < zmax and abs(z_var) < zmax
        table.rows.append(
            [t, st.mean[k].real, st.mean[k].imag, st.variance[k], st.mean_se[k], st.variance_se[k],
             ref.real, ref.imag, var, pvar, z_mean, z_var, z_pr]
        )
    table.passed = bool(ok)
    return table


def cmd_dilation(sc: Scenario) -> Table:
    p = sc.params
    x_max = sc.as_float("x_max")
    z = sc.as_complex("z")
    tol = sc.as_float("dilation_tol")
    lo, hi = sc.as_float("ratio_min"), sc.as_float("ratio_max")
    ladder = sorted(sc.as_floats("dx_ladder"), reverse=True)
    t_values = sc.as_floats("t_values")
    table = Table("dilation", ["dx", "x_max", "t", "z_re", "z_im", "residual", "ratio", "status"])
    ok = True
    try:
        grids = [DilationGrid.from_spacing(dx, x_max, p) for dx in ladder]
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from exc
    for t in t_values:
        prev = None
        for level, grid in enumerate(grids):
            try:
                r = diagram_residual(z, t, grid, p)
            except GridAlignmentError as exc:
                raise ConfigError(str(exc)) from exc
            ratio = prev / r if prev is not None and r > 0 else math.nan
            good = True
            if level == len(grids) - 1:
                good &= r < tol * abs(z)
            if prev is not None:
                good &= lo <= ratio <= hi
            ok &= good
            table.rows.append([grid.dx, grid.x_max, t, z.real, z.imag, r, ratio, "pass" if good else "fail"])
            prev = r
    table.passed = bool(ok)
    return table


def cmd_weyl(sc: Scenario) -> Table:
    table = Table("weyl", ["section", "case", "value", "tolerance", "status"])
    ok = True

    def add(section, case, value, tol, good=None):
        nonlocal ok
        if good is None:
            status = "info"
        else:
            status = "pass" if good else "fail"
            ok &= bool(good)
        table.rows.append([section, case, value, tol, status])

    # CCR
    f, h = sc.as_complex("ccr_f"), sc.as_complex("ccr_h")
    ccr_tol = sc.as_float("ccr_tol")
    dims = sc.as_ints("ccr_dims")
    values = [ccr_residual(f, h, d) for d in dims]
    for d, v in zip(dims, values):
        last = d == dims[-1]
        add("ccr", f"dim={d}", v, ccr_tol if last else math.nan, (v < ccr_tol) if last else None)
    mono = all(b < a for a, b in zip(values, values[1:]))
    add("ccr", "monotone_in_dim", float(mono), math.nan, mono)
    wdim = sc.as_int("weyl_dim")
    if wdim not in dims:
        add("ccr", f"dim={wdim}", ccr_residual(f, h, wdim), math.nan)

    # semigroup law on labels
    p = sc.params
    rng = np.random.default_rng(sc.as_int("seed"))
    n = sc.as_int("fuzz_cases")
    worst = 0.0
    for _ in range(n):
        t, s = rng.uniform(0, 10, 2)
        zz = complex(*rng.normal(0, 1, 2))
        worst = max(worst, semigroup_law_residual(t, s, zz, p))
    tol = sc.as_float("semigroup_tol")
    add("semigroup_law", f"max_over_{n}", worst, tol, worst < tol)

    # Lindblad crosscheck, noiseless cavity
    kx = sc.as_float("crosscheck_kappa")
    if kx != 0:
        raise ConfigError("the Weyl/Lindblad crosscheck needs crosscheck_kappa = 0")
    try:
        px = CavityParams(omega=p.omega, gamma_prime=sc.as_float("crosscheck_gamma_prime"), kappa=0.0,
                          hbar=p.hbar, mass=p.mass)
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from exc
    zx, tx = sc.as_complex("weyl_z"), sc.as_float("weyl_t")
    dist = lindblad_channel_crosscheck(zx, tx, wdim, px, dt=sc.as_float("crosscheck_dt"))
    tol = sc.as_float("crosscheck_tol")
    add("crosscheck", f"z={zx},t={tx},dim={wdim}", dist, tol, dist < tol)

    # ladder recovery
    hl = sc.as_float("ladder_h")
    err_a, err_ad = ladder_errors(tx, wdim, px, hl)
    err_half, _ = ladder_errors(tx, wdim, px, hl / 2)
    tol = sc.as_float("ladder_tol")
    add("ladder", f"a(t),h={hl}", err_a, tol, err_a < tol)
    add("ladder", f"adag(t),h={hl}", err_ad, tol, err_ad < tol)
    ratio = err_a / err_half
    add("ladder", "halving_ratio", ratio, math.nan, 3.0 <= ratio <= 5.0)
    table.passed = bool(ok)
    return table


COMMANDS = {"master": cmd_master, "ou": cmd_ou, "dilation": cmd_dilation, "weyl": cmd_weyl}


def _out_path(out: str | None, name: str, multi: bool, fmt: str) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    if not multi:
        return path
    suffix = path.suffix or f".{fmt}"
    return path.with_name(f"{path.stem}_{name}{suffix}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opencavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "all"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value scenario file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=("csv", "json"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "format": args.format}
    if args.dim is not None:
        overrides["dim"] = args.dim
        overrides["weyl_dim"] = args.dim
    try:
        sc = load_scenario(args.config, overrides)
        if args.out is not None and not Path(args.out).resolve().parent.is_dir():
            raise ConfigError(f"output directory does not exist: {Path(args.out).parent}")
        fmt = sc.raw["format"]
        names = list(COMMANDS) if args.command == "all" else [args.command]
        status = EXIT_OK
        for name in names:
            try:
                table = COMMANDS[name](sc)
            except IntegrationDiverged as exc:
                print(f"{name}: {exc}", file=sys.stderr)
                status = EXIT_FAIL
                continue
            text = render(table, sc, fmt)
            path = _out_path(args.out, name, len(names) > 1, fmt)
            if path is None:
                sys.stdout.write(text)
            else:
                write_atomic(path, text)
            print(f"{name}: {'pass' if table.passed else 'FAIL'}", file=sys.stderr)
            if not table.passed:
                status = EXIT_FAIL
        return status
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
