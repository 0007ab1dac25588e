"""
Command-line front end: parse key=value configs, dispatch the protocol
drivers and emit deterministic CSV tables plus a plain-text summary.

Exit codes: 0 success, 1 usage/config error, 2 required steady state is
unstable, 3 numerical failure.
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import acceptance
from .delay import DelayedLoopSpec, delayed_steady_state
from .dynamics import assemble, is_hurwitz, integrate, lyapunov_steady_state
from .gaussian import log_negativity, mean_occupancy, min_quadrature_eigenvalue
from .loops import passive_loop, squeeze_loss_loop, two_mode_squeeze_loop
from .model import NoiseEnvironment, Regime, SystemParams
from .protocols import (
    METRIC_COLUMNS,
    optimize_cooling_active,
    optimize_cooling_strong,
    optimize_cooling_weak,
    state_transfer,
    tms_stabilization,
)

COMMANDS = (
    "steady", "transient", "cooling-weak", "cooling-strong", "cooling-active",
    "delay", "entangle", "tms-stabilize", "squeeze", "transfer", "verify",
)

_COMMON_KEYS = {
    "regime", "G", "kappa", "Gamma_m", "Delta", "omega_m", "N_l", "N_m",
    "loop", "a", "b", "eta", "z", "r", "flipped", "kappa_eff", "two_interfaces",
}
_KEYS: dict[str, set[str]] = {
    "steady": set(_COMMON_KEYS),
    "transient": _COMMON_KEYS | {"t_final", "dt_out"},
    "cooling-weak": set(_COMMON_KEYS),
    "cooling-strong": _COMMON_KEYS | {"G_min", "G_max", "G_points", "G_scale", "kappa_eff_cap"},
    "cooling-active": _COMMON_KEYS | {"n_eta", "n_z"},
    "delay": _COMMON_KEYS | {"tau", "tau_min", "tau_max", "tau_points", "tau_scale"},
    "entangle": _COMMON_KEYS | {
        "family", "kappa_eff_min", "kappa_eff_max", "kappa_eff_points", "kappa_eff_scale",
        "z_min", "z_max", "z_points", "z_scale",
    },
    "tms-stabilize": set(_COMMON_KEYS),
    "squeeze": _COMMON_KEYS | {"eta_min", "eta_max", "eta_points"},
    "transfer": _COMMON_KEYS | {
        "kappa_eff_min", "kappa_eff_max", "kappa_eff_points", "theta_samples",
    },
    "verify": set(),
}
_STRING_KEYS = {"regime", "loop", "family", "G_scale", "tau_scale", "kappa_eff_scale", "z_scale"}
_INT_KEYS = {
    "flipped", "two_interfaces", "G_points", "tau_points", "kappa_eff_points",
    "z_points", "eta_points", "theta_samples", "n_eta", "n_z",
}
_POSITIVE_KEYS = {"G", "kappa", "Gamma_m", "omega_m", "z", "t_final", "dt_out", "kappa_eff_cap"}

_DEFAULTS = {"omega_m": 1.0, "N_l": 1.0, "N_m": 1.0, "regime": "red-rwa", "loop": "none"}


class UsageError(Exception):
    pass


def parse_config(text: str) -> dict:
    """Parse `key = value` lines with `#` comments; duplicate keys are errors."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise UsageError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise UsageError(f"line {lineno}: empty value for key {key!r}")
        out[key] = value
    return out


def _coerce(key: str, value: str):
    if key in _STRING_KEYS:
        return value
    try:
        num = int(value) if key in _INT_KEYS else float(value)
    except ValueError:
        raise UsageError(f"value for {key!r} must be numeric, got {value!r}") from None
    if key in _POSITIVE_KEYS and num <= 0:
        raise UsageError(f"{key} must be positive, got {value}")
    return num


def build_config(command: str, file_cfg: dict, flag_cfg: dict) -> dict:
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    allowed = _KEYS[command]
    cfg = dict(_DEFAULTS)
    for source in (file_cfg, flag_cfg):  # flags override the file
        for key, value in source.items():
            if key not in allowed:
                raise UsageError(f"unknown key {key!r} for command {command!r}")
            cfg[key] = _coerce(key, value) if isinstance(value, str) else value
    return cfg


def _regime(cfg) -> Regime:
    try:
        return Regime(cfg["regime"])
    except ValueError:
        raise UsageError(f"unknown regime {cfg['regime']!r}") from None


def _system(cfg) -> tuple[SystemParams, NoiseEnvironment]:
    for key in ("G", "kappa", "Gamma_m"):
        if key not in cfg:
            raise UsageError(f"missing required key {key!r}")
    params = SystemParams(
        g_lin=cfg["G"], kappa=cfg["kappa"], gamma_m=cfg["Gamma_m"],
        regime=_regime(cfg), delta=cfg.get("Delta", -1.0), omega_m=cfg["omega_m"],
    )
    env = NoiseEnvironment(n_l=cfg["N_l"], n_m=cfg["N_m"])
    return params, env


def _loop(cfg, params):
    kind = cfg["loop"]
    if kind == "none" and "kappa_eff" in cfg:
        kind = "passive-kappa-eff"
    if kind == "none":
        return None
    if kind == "passive-kappa-eff":
        a = 1.0 - cfg["kappa_eff"] / (2.0 * params.kappa)
        return passive_loop(a, cfg.get("b", 0.0))
    if kind == "passive":
        return passive_loop(cfg.get("a", 1.0), cfg.get("b", 0.0))
    if kind == "squeeze":
        return squeeze_loss_loop(cfg.get("eta", 1.0), cfg.get("z", 1.0))
    if kind == "tms":
        return two_mode_squeeze_loop(cfg.get("r", 0.0), flipped=bool(cfg.get("flipped", 0)))
    raise UsageError(f"unknown loop kind {cfg['loop']!r}")


def _axis(cfg, name, default_scale="linear"):
    if name in cfg:
        return np.array([cfg[name]])
    lo, hi = cfg.get(f"{name}_min"), cfg.get(f"{name}_max")
    if lo is None or hi is None:
        raise UsageError(f"missing grid spec for axis {name!r} ({name}_min/{name}_max)")
    points = int(cfg.get(f"{name}_points", 51))
    scale = cfg.get(f"{name}_scale", default_scale)
    if scale == "log":
        return np.logspace(np.log10(lo), np.log10(hi), points)
    if scale == "linear":
        return np.linspace(lo, hi, points)
    raise UsageError(f"unknown scale {scale!r} for axis {name!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    if isinstance(value, float) and np.isnan(value):
        return ""
    return "%.12e" % value


def write_csv(path: str, axis_names: tuple[str, ...], rows: list[dict]) -> None:
    """Deterministic CSV: axes, stable, the fixed metric columns, then params."""
    param_cols = sorted(
        {k for row in rows for k in row}
        - set(axis_names) - {"stable"} - set(METRIC_COLUMNS)
    )
    header = list(axis_names) + ["stable"] + list(METRIC_COLUMNS) + param_cols
    lines = [",".join(header)]
    for row in rows:
        cells = [_fmt(row.get(col)) for col in header]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _steady_metrics(params, env, loop, two_interfaces=False):
    dyn = assemble(params, env, loop, two_optical_interfaces=two_interfaces)
    stable, absc = is_hurwitz(dyn)
    row = {"stable": stable, "abscissa": absc}
    if stable:
        sigma = lyapunov_steady_state(dyn)
        row.update(
            occupancy=mean_occupancy(sigma[2:, 2:]),
            log_neg=log_negativity(sigma),
            min_opt_eig=min_quadrature_eigenvalue(sigma[:2, :2]),
            min_mech_eig=min_quadrature_eigenvalue(sigma[2:, 2:]),
        )
    return row


def _sys_cols(cfg) -> dict:
    return {k: cfg[k] for k in ("regime", "G", "kappa", "Gamma_m", "omega_m", "N_l", "N_m")
            if k in cfg}


# -- per-point workers (module level so --jobs can pickle them) --------------

def _delay_point(args):
    tau, a_fb, params, env = args
    spec = DelayedLoopSpec(a=a_fb, tau=tau, params=params, env=env)
    sigma = delayed_steady_state(spec)
    return {"tau": tau, "stable": True, "occupancy": mean_occupancy(sigma[2:, 2:]),
            "min_mech_eig": min_quadrature_eigenvalue(sigma[2:, 2:])}


def _entangle_point(args):
    ke, params, env = args
    dyn = assemble(params, env, passive_loop(1.0 - ke / (2.0 * params.kappa), 0.0))
    stable, absc = is_hurwitz(dyn)
    en = log_negativity(lyapunov_steady_state(dyn)) if stable else 0.0
    return {"kappa_eff": ke, "stable": stable, "log_neg": en, "abscissa": absc}


def _squeeze_point(args):
    eta, z, params, env = args
    dyn = assemble(params, env, squeeze_loss_loop(eta, z))
    stable, absc = is_hurwitz(dyn)
    row = {"eta": eta, "stable": stable, "abscissa": absc, "z": z}
    if stable:
        sigma = lyapunov_steady_state(dyn)
        row["min_opt_eig"] = min_quadrature_eigenvalue(sigma[:2, :2])
        row["min_mech_eig"] = min_quadrature_eigenvalue(sigma[2:, 2:])
    return row


def _transfer_point(args):
    ke, z, params, env, theta_samples, prepared = args
    res = state_transfer(params, env, z, ke, theta_samples=theta_samples,
                         prepared_optics=prepared)
    return {"kappa_eff": ke, "stable": True, "v_min": res.v_min,
            "min_mech_eig": res.min_mech_eigenvalue, "prepared": int(prepared),
            "t_min": res.t_min, "z": z}


def _pmap(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- command implementations -------------------------------------------------

def _run_command(command: str, cfg: dict, out: str, jobs: int) -> int:
    if command == "verify":
        results = acceptance.run_all(verbose=True)
        return 0 if all(r.passed for r in results) else 3

    params, env = _system(cfg)
    extra = _sys_cols(cfg)

    if command == "steady":
        row = _steady_metrics(params, env, _loop(cfg, params),
                              two_interfaces=bool(cfg.get("two_interfaces", 0)))
        row.update(extra)
        write_csv(out, (), [row])
        if not row["stable"]:
            print(f"unstable: spectral abscissa {row['abscissa']:.6g}")
            return 2
        print(f"steady state occupancy {row['occupancy']:.6f}, "
              f"log-negativity {row['log_neg']:.6f}")
        return 0

    if command == "transient":
        loop = _loop(cfg, params)
        dyn = assemble(params, env, loop, two_optical_interfaces=bool(cfg.get("two_interfaces", 0)))
        t_final = cfg.get("t_final", 100.0)
        dt_out = cfg.get("dt_out", t_final / 200.0)
        sigma0 = np.diag([env.n_l, env.n_l, env.n_m, env.n_m])
        times, sigmas = integrate(dyn, sigma0, t_final, dt_out)
        rows = []
        for t, s in zip(times, sigmas):
            rows.append({"t": t, "stable": is_hurwitz(dyn)[0],
                         "occupancy": mean_occupancy(s[2:, 2:]),
                         "min_opt_eig": min_quadrature_eigenvalue(s[:2, :2]),
                         "min_mech_eig": min_quadrature_eigenvalue(s[2:, 2:]), **extra})
        write_csv(out, ("t",), rows)
        print(f"final occupancy {rows[-1]['occupancy']:.6f} at t = {times[-1]:.6g}")
        return 0

    if command == "cooling-weak":
        a, b, occ = optimize_cooling_weak(params, env)
        row = {"stable": True, "occupancy": occ, "a": a, "b": b,
               "kappa_eff": 2.0 * params.kappa * (1.0 - a), **extra}
        write_csv(out, (), [row])
        print(f"optimal passive loop a = {a:.6f}, b = {b:.1f}: occupancy {occ:.6f}")
        return 0

    if command == "cooling-strong":
        grid = _axis(cfg, "G", default_scale="log")
        table = optimize_cooling_strong(params, env, grid,
                                        kappa_eff_cap=cfg.get("kappa_eff_cap", 0.1))
        rows = [dict(row, **{k: v for k, v in extra.items() if k != "G"})
                for row in table.rows]
        write_csv(out, ("g",), rows)
        print(f"optimized {len(rows)} coupling strengths; "
              f"occupancy range [{min(r['occupancy'] for r in rows):.4f}, "
              f"{max(r['occupancy'] for r in rows):.4f}]")
        return 0

    if command == "cooling-active":
        eta, z, occ, (eta_g, z_g) = optimize_cooling_active(
            params, env, n_eta=int(cfg.get("n_eta", 51)), n_z=int(cfg.get("n_z", 51)))
        row = {"stable": True, "occupancy": occ, "eta": eta, "z": z,
               "grid_eta": eta_g, "grid_z": z_g, **extra}
        write_csv(out, (), [row])
        print(f"optimal squeeze-loss loop eta = {eta:.6f}, z = {z:.6f}: occupancy {occ:.6f}")
        return 0

    if command == "delay":
        taus = _axis(cfg, "tau")
        a_fb = cfg.get("a", 1.0 - params.g_lin / params.kappa)
        rows = _pmap(_delay_point, ((t, a_fb, params, env) for t in taus), jobs)
        for row in rows:
            row.update(a=a_fb, **extra)
        write_csv(out, ("tau",), rows)
        for row in rows:
            print(f"tau = {row['tau']:g}: occupancy {row['occupancy']:.6f}")
        return 0

    if command == "entangle":
        family = cfg.get("family", "passive")
        if family == "passive":
            kes = _axis(cfg, "kappa_eff")
            rows = _pmap(_entangle_point, ((ke, params, env) for ke in kes), jobs)
            for row in rows:
                row.update(extra)
            write_csv(out, ("kappa_eff",), rows)
            best = max(rows, key=lambda r: r["log_neg"])
            print(f"best E_N {best['log_neg']:.6f} at kappa_eff = {best['kappa_eff']:.6g}")
            return 0
        if family == "squeeze":
            from .protocols import entanglement_sweep
            zs = _axis(cfg, "z", default_scale="log")
            table = entanglement_sweep(params, env, "squeeze", zs)
            rows = [dict(row, **extra) for row in table.rows]
            write_csv(out, ("z",), rows)
            best = max(rows, key=lambda r: r["log_neg"])
            print(f"best E_N {best['log_neg']:.6f} at z = {best['z']:.6g}")
            return 0
        raise UsageError(f"unknown family {family!r}")

    if command == "tms-stabilize":
        res = tms_stabilization(params, env)
        if res.passively_stabilizable:
            write_csv(out, (), [{"stable": True, "r_star": 0.0, **extra}])
            print("system is stabilizable passively; no two-mode squeezing needed")
            return 0
        row = {"stable": True, "log_neg": res.log_neg, "r_star": res.r_analytic,
               "r_bisected": res.r_bisected, **extra}
        write_csv(out, (), [row])
        print(f"stabilizing squeezing r* = {res.r_analytic:.6f} "
              f"(bisected {res.r_bisected:.6f}); E_N there {res.log_neg:.6f}")
        return 0

    if command == "squeeze":
        z = cfg.get("z", 1.0)
        etas = _axis(cfg, "eta")
        rows = _pmap(_squeeze_point, ((e, z, params, env) for e in etas), jobs)
        for row in rows:
            row.update(extra)
        write_csv(out, ("eta",), rows)
        stable_rows = [r for r in rows if r["stable"]]
        if stable_rows:
            best = min(stable_rows, key=lambda r: r["min_opt_eig"])
            print(f"min optical eigenvalue {best['min_opt_eig']:.6f} at eta = {best['eta']:.6g}")
        else:
            print("no stable grid point")
            return 2
        return 0

    if command == "transfer":
        z = cfg.get("z", 0.25)
        theta_samples = int(cfg.get("theta_samples", 16))
        kes = _axis(cfg, "kappa_eff")
        work = [(ke, z, params, env, theta_samples, prep)
                for ke in kes for prep in (True, False)]
        rows = _pmap(_transfer_point, work, jobs)
        for row in rows:
            row.update(extra)
        write_csv(out, ("kappa_eff",), rows)
        best = min((r for r in rows if r["prepared"]), key=lambda r: r["v_min"])
        print(f"best prepared-optics V_min {best['v_min']:.6f} "
              f"at kappa_eff = {best['kappa_eff']:.6g}")
        return 0

    raise UsageError(f"unhandled command {command!r}")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        print(f"\nusage: covarloop <command> [--key value]... [--config FILE] "
              f"[--out FILE.csv] [--jobs N]\ncommands: {', '.join(COMMANDS)}")
        return 0 if argv else 1
    command, rest = argv[0], argv[1:]
    try:
        flags: dict[str, str] = {}
        config_path = None
        out = None
        jobs = os.cpu_count() or 1
        i = 0
        while i < len(rest):
            tok = rest[i]
            if not tok.startswith("--"):
                raise UsageError(f"unexpected argument {tok!r}")
            if i + 1 >= len(rest):
                raise UsageError(f"flag {tok!r} is missing a value")
            key, value = tok[2:], rest[i + 1]
            i += 2
            if key == "config":
                config_path = value
            elif key == "out":
                out = value
            elif key == "jobs":
                jobs = int(value)
            elif key in flags:
                raise UsageError(f"duplicate flag --{key}")
            else:
                flags[key] = value
        file_cfg = {}
        if config_path is not None:
            with open(config_path, encoding="utf-8") as fh:
                file_cfg = parse_config(fh.read())
        cfg = build_config(command, file_cfg, flags)
        out = out or f"covarloop_{command}.csv"
        return _run_command(command, cfg, out, jobs)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if "Hurwitz" in str(exc) or "steady state" in str(exc) else 1
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
