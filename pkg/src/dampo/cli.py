"""Command-line surface.

Subcommands: validate | moments | state | evolve | figures | oracle-compare
| kernel.  A TOML config describes the model; command-line flags override
config values.  Exit codes: 0 success, 1 physics/tolerance failure,
2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bath, dynamics, fano, figures, oracle, spectral, states
from .errors import (
    ConfigError,
    DampedOscillatorError,
    PositivityViolation,
    QuadratureNonConvergence,
    ValidationFailure,
)

EXIT_OK = 0
EXIT_PHYSICS = 1
EXIT_USAGE = 2


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace("i", "j"))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot parse complex rate from {value!r}")


@dataclass
class RunModel:
    kind: str
    density: spectral.SpectralDensity | None
    m: float
    Omega0: float | None
    omega0: float | None
    beta: float
    coupling: fano.CouplingSpectrum | None = None
    ohmic: bath.OhmicBath | None = None

    def require_density(self) -> spectral.SpectralDensity:
        if self.density is None:
            self.density = fano.density_from_coupling(self.coupling, self.Omega0)
        return self.density


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc


def build_model(cfg: dict, args) -> RunModel:
    model = cfg.get("model", {})
    osc = cfg.get("oscillator", {})
    sources = []
    if "Gamma" in model:
        sources.append("parametric")
    if "coupling_csv" in model:
        sources.append("coupling")
    if "gamma" in model and "omega_c" in model:
        sources.append("ohmic")
    if "table_csv" in model:
        sources.append("table")
    if len(sources) != 1:
        raise ConfigError(
            f"exactly one model source required, found {sources or 'none'}"
        )
    kind = sources[0]
    m = float(getattr(args, "m", None) or osc.get("m", 1.0))
    if m <= 0:
        raise ConfigError("mass must be positive")
    beta_raw = getattr(args, "beta", None) or cfg.get("temperature", {}).get("beta", "inf")
    if isinstance(beta_raw, str) and beta_raw.lower() in ("inf", "infinity"):
        beta = math.inf
    else:
        try:
            beta = float(beta_raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"beta must be a positive number or 'inf', got {beta_raw!r}"
            ) from None
        if beta <= 0:
            raise ConfigError("beta must be positive")
    omega0_cfg = osc.get("omega0")
    Omega0_cfg = getattr(args, "Omega0", None) or osc.get("Omega0")

    if kind == "parametric":
        density = spectral.make_parametric_density(
            float(model["Gamma"]),
            _as_complex(model["gamma_plus"]),
            _as_complex(model["gamma_minus"]),
        )
        Omega0 = math.sqrt(density.omega0_sq)
        omega0 = math.sqrt(density.classical_omega0_sq)
        return RunModel(kind, density, m, Omega0, omega0, beta)
    if kind == "table":
        try:
            density = spectral.read_density_csv(
                model["table_csv"], tail_exponent=float(model.get("tail_exponent", 4.0))
            )
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read weight table: {exc}") from exc
        Omega0 = math.sqrt(density.omega0_sq)
        return RunModel(kind, density, m, Omega0, None, beta)
    if kind == "coupling":
        if Omega0_cfg is None:
            raise ConfigError("coupling models need oscillator.Omega0")
        try:
            coupling = fano.read_coupling_csv(
                model["coupling_csv"], cutoff=model.get("cutoff")
            )
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read coupling table: {exc}") from exc
        Omega0 = float(Omega0_cfg)
        check = fano.positivity_check(coupling, Omega0)
        omega0_sq = Omega0**2 - Omega0 * check.integral
        omega0 = math.sqrt(omega0_sq) if omega0_sq > 0 else None
        return RunModel(kind, None, m, Omega0, omega0, beta, coupling=coupling)
    # ohmic
    ob = bath.OhmicBath(gamma=float(model["gamma"]), omega_c=float(model["omega_c"]), m=m)
    if Omega0_cfg is not None:
        Omega0 = float(Omega0_cfg)
        omega0_sq = Omega0**2 - ob.kappa0
        omega0 = math.sqrt(omega0_sq) if omega0_sq > 0 else None
    elif omega0_cfg is not None:
        omega0 = float(omega0_cfg)
        Omega0 = math.sqrt(omega0**2 + ob.kappa0)
    else:
        raise ConfigError("ohmic models need oscillator.Omega0 or oscillator.omega0")
    coupling = fano.coupling_from_ohmic(ob, Omega0)
    return RunModel(kind, None, m, Omega0, omega0, beta, coupling=coupling, ohmic=ob)


def time_grid(cfg: dict, args) -> np.ndarray:
    grid = cfg.get("grid", {})
    start = float(getattr(args, "start", None) or grid.get("start", 0.0))
    stop = float(getattr(args, "stop", None) or grid.get("stop", 20.0))
    points = int(getattr(args, "points", None) or grid.get("points", 801))
    spacing = grid.get("spacing", "linear")
    if points < 1:
        raise ConfigError("grid.points must be at least 1")
    if spacing == "linear":
        return np.linspace(start, stop, points)
    if spacing == "log":
        if start <= 0:
            raise ConfigError("log spacing needs start > 0")
        return np.geomspace(start, stop, points)
    raise ConfigError(f"unknown grid spacing {spacing!r}")


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=float)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def quad_options(cfg: dict) -> dict:
    q = cfg.get("quadrature", {})
    opts = {
        "rel_tol": float(q.get("rel_tol", 1e-9)),
        "abs_tol": float(q.get("abs_tol", 1e-7)),
        "phys_tol": float(q.get("phys_tol", 1e-6)),
    }
    if any(v <= 0 for v in opts.values()):
        raise ConfigError("quadrature tolerances must be positive")
    return opts


def resolve_out(args, cfg: dict, default_name: str) -> str:
    if args.out:
        return args.out
    out_dir = cfg.get("output", {}).get("dir")
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        return str(Path(out_dir) / default_name)
    return default_name


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    tol = quad_options(cfg)
    payload: dict = {"kind": model.kind}
    ok = True
    if model.kind == "ohmic":
        freq = bath.frequency_constraints(model.ohmic, Omega0=model.Omega0)
        payload["frequency_constraints"] = freq.to_dict()
        ok = ok and freq.omega0_positive and freq.bound_satisfied and freq.consistent
    if model.coupling is not None:
        check = fano.positivity_check(model.coupling, model.Omega0)
        payload["positivity"] = {"integral": check.integral, "ok": check.ok}
        ok = ok and check.ok
        if ok:
            try:
                model.require_density()
            except ValidationFailure as exc:
                payload["density_error"] = str(exc)
                ok = False
    if model.density is not None:
        report = spectral.validate(model.density, phys_tol=tol["phys_tol"])
        payload["density"] = report.to_dict()
        ok = ok and report.all_passed()
    payload["passed"] = ok
    _emit_json(payload, args.out)
    return EXIT_OK if ok else EXIT_PHYSICS


def cmd_moments(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    sd = model.require_density()
    mom = sd.moments()
    payload = {
        "mean_omega": mom.mean_omega,
        "mean_inv_omega": mom.mean_inv_omega,
        "second_moment": mom.omega0_sq,
        "Omega0": model.Omega0,
        "omega0": model.omega0,
        "cauchy_schwartz_product": mom.mean_omega * mom.mean_inv_omega,
    }
    if isinstance(sd, spectral.ParametricDensity):
        closed = spectral.closed_form_moments(sd)
        payload["closed_form"] = {
            "mean_omega": closed.mean_omega,
            "mean_inv_omega": closed.mean_inv_omega,
            "second_moment": closed.omega0_sq,
        }
    _emit_json(payload, args.out)
    return EXIT_OK


_STATE_PROVENANCE = {
    "var_x": "position variance, inverse-frequency moment over 2m",
    "var_p": "momentum variance, m times first-frequency moment over 2",
    "energy_at_Omega0": "oscillator energy booked at the short-time frequency",
    "energy_at_omega0": "oscillator energy booked at the long-time frequency",
    "omega_diag": "frequency at which the state's quadratures decorrelate",
    "n_bar_c": "thermal occupancy of the diagonalising mode",
    "T_eff": "temperature reproducing n_bar_c at omega_diag",
    "entropy": "von Neumann entropy of the reduced state (nats)",
    "mutual_information": "oscillator-environment mutual information (nats)",
}


def cmd_state(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    sd = model.require_density()
    state = states.thermal_state(sd, model.m, model.beta)
    diag = states.diagonal_form(state, model.m)
    payload = {
        "beta": "inf" if math.isinf(model.beta) else model.beta,
        "state": json.loads(states.state_to_json(state)),
        "energy_at_Omega0": states.oscillator_energy(state, model.m, model.Omega0),
        "energy_at_omega0": (
            states.oscillator_energy(state, model.m, model.omega0)
            if model.omega0 else None
        ),
        "omega_diag": diag.omega_diag,
        "n_bar_c": diag.n_bar_c,
        "T_eff": diag.T_eff,
        "entropy": diag.entropy,
        "mutual_information": diag.mutual_information,
        "provenance": _STATE_PROVENANCE,
    }
    _emit_json(payload, args.out)
    if args.table:
        rows = [
            ("mean_x", state.mean_x), ("mean_p", state.mean_p),
            ("var_x", state.var_x), ("var_p", state.var_p),
            ("cov_xp", state.cov_xp),
            ("energy_at_Omega0", payload["energy_at_Omega0"]),
            ("energy_at_omega0", payload["energy_at_omega0"]),
            ("omega_diag", diag.omega_diag), ("n_bar_c", diag.n_bar_c),
            ("T_eff", diag.T_eff), ("entropy", diag.entropy),
            ("mutual_information", diag.mutual_information),
        ]
        for name, value in rows:
            print(f"{name:>20s}  {'-' if value is None else format(value, '.12g')}",
                  file=sys.stderr)
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    sd = model.require_density()
    times = time_grid(cfg, args)
    initial = cfg.get("initial", {})
    x0 = float(args.x0 if args.x0 is not None else initial.get("x0", 1.0))
    p0 = float(args.p0 if args.p0 is not None else initial.get("p0", 0.0))
    if args.method == "closed":
        if not isinstance(sd, spectral.ParametricDensity):
            raise ConfigError("--method closed needs a parametric model")
        series = dynamics.closed_form_kernels(sd, times)
    else:
        tol = quad_options(cfg)
        series = dynamics.kernels(sd, times, abs_tol=tol["abs_tol"],
                                  raise_on_failure=True)
    series = dynamics.evolve_means(series, x0, p0, model.m)
    stamp = f"kind={model.kind} m={model.m} x0={x0} p0={p0} method={args.method}"
    out = resolve_out(args, cfg, "evolution.csv")
    dynamics.write_series_csv(series, out, header_comment=stamp)
    if args.classify:
        label = dynamics.classify_damping(series)
        with open(out, "a") as fh:
            line = f"# classification={label.value}"
            if isinstance(sd, spectral.ParametricDensity):
                line += f" classical_label={dynamics.classical_damping_label(sd).value}"
            fh.write(line + "\n")
    return EXIT_OK


def cmd_figures(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    facts = figures.emit_figure(
        args.which,
        out_dir / f"fig_{args.which}.svg",
        out_dir / f"fig_{args.which}.csv",
    )
    print(json.dumps(facts, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    if model.coupling is None:
        raise ConfigError(
            "oracle comparison needs a coupling or ohmic model (the discrete "
            "bath is built from V(omega), which a bare spectral weight does not fix)"
        )
    oracle_cfg = cfg.get("oracle", {})
    n_modes = int(args.n_modes or oracle_cfg.get("n_modes", 300))
    if n_modes < 50:
        raise ConfigError("n_modes must be at least 50 for a meaningful comparison")
    bound = float(args.bound or oracle_cfg.get("bound", 0.01))
    support_end = model.coupling.support[1]
    omega_max = float(
        oracle_cfg.get("omega_max", min(support_end, 50.0 * model.Omega0))
    )
    # band-limit the coupling so the continuum reference and the discrete
    # bath describe the same model
    banded = fano.CouplingSpectrum(
        model.coupling.omega_grid, model.coupling.v_values, cutoff=omega_max
    )
    db = oracle.discretize(banded, model.Omega0, model.m, n_modes,
                           omega_max=omega_max)
    times = time_grid(cfg, args)
    initial = cfg.get("initial", {})
    x0 = float(initial.get("x0", 1.0))
    p0 = float(initial.get("p0", 0.0))

    uncoupled = fano.positivity_check(banded, model.Omega0).integral == 0.0
    if uncoupled:
        # the induced weight degenerates to a point mass at the bare
        # frequency; use the bare-rotation kernels and state directly
        om = model.Omega0
        series = dynamics.EvolutionSeries(
            times=times, c=np.cos(om * times), s=np.sin(om * times) / om,
            d=om * np.sin(om * times),
        )
        series = dynamics.evolve_means(series, x0, p0, model.m)
        coth = (1.0 if math.isinf(model.beta)
                else 1.0 / math.tanh(0.5 * model.beta * om))
        target = states.GaussianState(
            0.0, 0.0, coth / (2.0 * model.m * om), model.m * om * coth / 2.0, 0.0
        )
    else:
        sd = fano.density_from_coupling(banded, model.Omega0)
        series = dynamics.evolve_means(dynamics.kernels(sd, times), x0, p0, model.m)
        target = states.thermal_state(sd, model.m, model.beta)
    mx, mp = oracle.evolve_means_discrete(db, x0, p0, times)
    scale_x = max(abs(x0), abs(p0) / (model.m * model.Omega0), 1e-30)
    scale_p = max(abs(p0), model.m * model.Omega0 * abs(x0), 1e-30)
    dev_x = np.abs(mx - series.mean_x) / scale_x
    dev_p = np.abs(mp - series.mean_p) / scale_p
    mean_dev_max = float(max(dev_x.max(), dev_p.max()))
    mean_dev_rms = float(
        np.sqrt(0.5 * (np.mean(dev_x**2) + np.mean(dev_p**2)))
    )

    vac = states.GaussianState(0.0, 0.0, 1.0 / (2 * model.m * model.Omega0),
                               model.m * model.Omega0 / 2, 0.0)
    traj = oracle.evolve_covariance_discrete(db, model.beta, vac, times,
                                             warn_recurrence=False)
    late = times >= 0.75 * times.max()
    cov_dev = max(
        float(np.abs(traj.var_x[late] - target.var_x).max() / target.var_x),
        float(np.abs(traj.var_p[late] - target.var_p).max() / target.var_p),
    )
    payload = {
        "n_modes": n_modes,
        "recurrence_time": db.recurrence_time,
        "means_rms_deviation": mean_dev_rms,
        "means_max_deviation": mean_dev_max,
        "late_covariance_deviation": cov_dev,
        "bound": bound,
    }
    _emit_json(payload, args.out)
    worst = max(mean_dev_max, cov_dev)
    return EXIT_OK if worst <= bound else EXIT_PHYSICS


def cmd_kernel(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg, args)
    times = time_grid(cfg, args)
    if model.ohmic is not None:
        kern = bath.ohmic_kernel(model.ohmic, times)
    elif model.coupling is not None:
        grid = model.coupling.omega_grid
        j_vals = (np.pi * model.m * model.Omega0 / 2.0) * model.coupling.v_values**2
        kern = bath.kernel_from_density(grid, j_vals, model.m, times)
    else:
        raise ConfigError("kernel command needs an ohmic or coupling model")
    out = resolve_out(args, cfg, "kernel.csv")
    bath.write_kernel_csv(kern, out)
    try:
        rate = bath.markov_damping(kern)
        print(json.dumps({"markov_damping": rate, "kappa0": kern.kappa0}))
    except DampedOscillatorError:
        print(json.dumps({"kappa0": kern.kappa0}))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dampo",
        description="Damped quantum oscillator: spectral weights, Gaussian "
        "states, mean dynamics, and a discrete-bath oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False, initial=False):
        p.add_argument("-c", "--config", help="TOML run configuration")
        p.add_argument("-o", "--out", help="output path (JSON/CSV)")
        p.add_argument("--m", type=float, help="oscillator mass override")
        p.add_argument("--Omega0", type=float, help="short-time frequency override")
        p.add_argument("--beta", help="inverse temperature override ('inf' allowed)")
        if grid:
            p.add_argument("--start", type=float)
            p.add_argument("--stop", type=float)
            p.add_argument("--points", type=int)
        if initial:
            p.add_argument("--x0", type=float)
            p.add_argument("--p0", type=float)

    common(sub.add_parser("validate", help="run all physics checks"))
    common(sub.add_parser("moments", help="weighted frequency moments"))
    p_state = sub.add_parser("state", help="reduced thermal/ground state")
    common(p_state)
    p_state.add_argument("--table", action="store_true",
                         help="also print a fixed-order table to stderr")
    p_evolve = sub.add_parser("evolve", help="kernel + mean-value evolution CSV")
    common(p_evolve, grid=True, initial=True)
    p_evolve.add_argument("--classify", action="store_true",
                          help="append the damping classification")
    p_evolve.add_argument("--method", choices=("quad", "closed"), default="quad")
    p_fig = sub.add_parser("figures", help="emit a reference figure (SVG + CSV)")
    p_fig.add_argument("which", choices=sorted(figures.FIGURES))
    p_fig.add_argument("--out-dir", default="figures")
    p_oracle = sub.add_parser("oracle-compare",
                              help="discrete-bath check of the continuum results")
    common(p_oracle, grid=True)
    p_oracle.add_argument("--n-modes", type=int)
    p_oracle.add_argument("--bound", type=float)
    common(sub.add_parser("kernel", help="memory kernel CSV"), grid=True)
    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "moments": cmd_moments,
    "state": cmd_state,
    "evolve": cmd_evolve,
    "figures": cmd_figures,
    "oracle-compare": cmd_oracle_compare,
    "kernel": cmd_kernel,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationFailure, PositivityViolation, QuadratureNonConvergence) as exc:
        print(f"physics failure: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except DampedOscillatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
