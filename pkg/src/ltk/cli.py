"""Command-line frontend for simulations, validation and structure checks.

The ``ltk`` command dispatches on a subcommand::

    ltk simulate  --system gas_piston_damper --u "0.1*sin(t)" --t-end 10 --dt 1e-3
    ltk validate  --system heat_exchanger
    ltk bracket   --k1 "q1*p0" --k2 "q0*p1" --dimensions 2
    ltk reduce    --system ideal_gas_SVN --at 1.0,1.0,1.0
    ltk flowcheck --system gas_piston_damper --t-end 1 --dt 1e-3
    ltk list

Every run is described by a :class:`RunConfig`, assembled from an optional
JSON config file (``--config``) overlaid with command-line flags (flags win).
Config keys are snake_case versions of the kebab-case flags; a config file
may also carry ``"command"`` so that :func:`run` can execute it directly.

Outputs are data only: ``simulate`` writes a CSV trajectory (header row,
comma-separated, LF line endings, shortest round-trip float formatting, so
identical configurations produce byte-identical files); the checking
subcommands write a JSON report mapping each check name to
``{"max_residual": ..., "tolerance": ..., "pass": ...}``.

Exit codes: 0 on success, 1 when a check fails (or a run aborts), 2 for
configuration errors including unreadable config files.  Log verbosity is
controlled by the ``LTK_LOG`` environment variable (``error``, ``warn``,
``info`` or ``debug``; default ``warn``), logging to stderr so that stdout
stays machine-readable.
"""

from __future__ import annotations

import argparse
import inspect
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from .brackets import degree_check, poisson
from .diffkit import ScalarFn
from .dynamics import flow_transport_check
from .exprlang import ExprError, compile_fn, free_names, parse
from .geometry import PhasePoint
from .portsys import (BUILTIN_SYSTEMS, MONITOR_NAMES, PortSignal, PortSystem,
                      _sample_surface_params, builtin, simulate, validate)
from .submanifold import (GeneratingFunction, gibbs_duhem_check,
                          reduced_point, specific_form)

__all__ = ["RunConfig", "ConfigError", "run", "main"]

log = logging.getLogger("ltk")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


class ConfigError(ValueError):
    """A run description that cannot be executed (exit code 2)."""


@dataclass
class RunConfig:
    """A declarative description of one CLI run.

    ``system`` is a built-in name, a ``{"name", "params"}`` mapping, or
    ``{"custom": {...}}`` declaring dimensions, a generating-function
    expression, the energy/entropy partition and drift/port generator
    expressions.  ``input`` is a signal spec (``zero``, ``constant``,
    ``sinusoid`` or expressions in ``t``).  The remaining fields cover
    integration, monitor selection, output paths, chart selection and the
    sampling seed; ``k1``/``k2``/``degree1``/``degree2``/``dimensions`` feed
    the ``bracket`` subcommand and ``at`` feeds ``reduce``.
    """

    command: str = ""
    system: object = None
    input: object = None
    t_end: float = 10.0
    dt: float = 1e-3
    monitors: tuple = ("K_res", "alpha_res")
    initial: tuple = None
    output: str = None
    report: str = None
    chart: int = 0
    seed: int = 0
    samples: int = 25
    k1: str = None
    k2: str = None
    degree1: int = 1
    degree2: int = 1
    dimensions: int = 2
    at: tuple = None

    @classmethod
    def from_mapping(cls, mapping) -> "RunConfig":
        """Build and validate a RunConfig from a plain (JSON-shaped) dict."""
        if not isinstance(mapping, dict):
            raise ConfigError("the configuration root must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}; "
                              f"known keys: {sorted(known)}")
        cfg = cls()
        for key, value in mapping.items():
            setattr(cfg, key, value)
        cfg._validate()
        return cfg

    def _validate(self):
        try:
            self.t_end = float(self.t_end)
            self.dt = float(self.dt)
            self.chart = int(self.chart)
            self.seed = int(self.seed)
            self.samples = int(self.samples)
            self.degree1 = int(self.degree1)
            self.degree2 = int(self.degree2)
            self.dimensions = int(self.dimensions)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"malformed numeric config value: {err}") from None
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.samples <= 0:
            raise ConfigError("samples must be positive")
        if self.chart < 0:
            raise ConfigError("chart must be a nonnegative coordinate index")
        if self.dimensions < 1:
            raise ConfigError("dimensions must be at least 1")
        if {self.degree1, self.degree2} - {0, 1}:
            raise ConfigError("declared bracket degrees must be 0 or 1")
        if isinstance(self.monitors, str):
            self.monitors = tuple(s.strip() for s in self.monitors.split(",")
                                  if s.strip())
        self.monitors = tuple(self.monitors)
        bad = [m for m in self.monitors if m not in MONITOR_NAMES]
        if bad:
            raise ConfigError(f"unknown monitors {bad}; available: "
                              f"{', '.join(MONITOR_NAMES)}")
        for name in ("initial", "at"):
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, str):
                value = [s for s in value.split(",") if s.strip()]
            try:
                setattr(self, name, tuple(float(v) for v in value))
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must be a list of numbers") from None


# ---------------------------------------------------------------------------
# System and signal construction


def _phase_var_names(m: int) -> list:
    return [f"q{i}" for i in range(m)] + [f"p{i}" for i in range(m)]


def _compile(source: str, var_names, what: str) -> ScalarFn:
    try:
        return compile_fn(source, var_names, name=source)
    except ExprError as err:
        raise ConfigError(f"bad {what} expression {source!r}: {err}") from None


def _build_custom_system(spec: dict) -> PortSystem:
    """Construct a PortSystem from expression strings in the config."""
    if not isinstance(spec, dict):
        raise ConfigError("custom system spec must be an object")
    for key in ("dimensions", "gf", "partition"):
        if key not in spec:
            raise ConfigError(f"custom system spec needs a {key!r} entry")
    m = int(spec["dimensions"])
    if m < 1:
        raise ConfigError("a system needs at least one coordinate")
    n = m - 1

    gf_spec = spec["gf"]
    if not isinstance(gf_spec, dict) or "expr" not in gf_spec:
        raise ConfigError("the gf entry must be an object with an 'expr'")
    chart = int(gf_spec.get("chart", 0))
    I = tuple(sorted(int(i) for i in gf_spec.get("I", range(1, m))))
    J = tuple(sorted(int(j) for j in gf_spec.get("J", ())))
    gf_vars = [f"q{i}" for i in I] + [f"gamma{j}" for j in J]
    Fhat = _compile(gf_spec["expr"], gf_vars, "generating-function")
    try:
        gf = GeneratingFunction(
            n=n, Fhat=Fhat, I=I, J=J, chart=chart,
            q_homogeneous=bool(gf_spec.get("q_homogeneous", False)),
            name=spec.get("name", "custom"))
    except ValueError as err:
        raise ConfigError(f"invalid generating function: {err}") from None

    partition = spec["partition"]
    if not isinstance(partition, dict):
        raise ConfigError("partition must be an object with "
                          "'energy' and 'entropy' index lists")
    energy = tuple(int(i) for i in partition.get("energy", ()))
    entropy = tuple(int(i) for i in partition.get("entropy", ()))

    phase_vars = _phase_var_names(m)
    Ka = _compile(spec.get("Ka", "0"), phase_vars, "drift generator")
    Kc = tuple(_compile(src, phase_vars, "port generator")
               for src in spec.get("Kc", ()))
    initial = spec.get("initial")
    param_box = spec.get("param_box")
    try:
        return PortSystem(
            name=spec.get("name", "custom"), gf=gf, Ka=Ka, Kc=Kc,
            energy_indices=energy, entropy_indices=entropy,
            default_params=None if initial is None
            else tuple(float(v) for v in initial),
            param_box=None if param_box is None
            else tuple((float(a), float(b)) for a, b in param_box))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"invalid custom system: {err}") from None


def _build_system(spec) -> PortSystem:
    if spec is None:
        raise ConfigError("no system specified; pass --system or a config "
                          "with a 'system' entry")
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict):
        raise ConfigError("system must be a name or an object")
    if "custom" in spec:
        return _build_custom_system(spec["custom"])
    name = spec.get("name")
    if not name:
        raise ConfigError("system object needs a 'name' or 'custom' entry")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("system params must be an object of named values")
    try:
        system = builtin(name, **params)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"cannot construct system {name!r}: {err}") from None
    log.info("constructed system %s (%d coordinates, %d ports)",
             system.name, system.n_coords, system.n_ports)
    return system


def _make_signal(spec, n_ports: int) -> PortSignal:
    if spec is None:
        return PortSignal.zero(n_ports)
    if isinstance(spec, str):
        spec = {"kind": "expr", "exprs": [s.strip() for s in spec.split(";")]}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("input must be an expression string or an object "
                          "with a 'kind' entry")
    kind = spec["kind"]
    if kind == "zero":
        return PortSignal.zero(n_ports)
    if n_ports == 0:
        raise ConfigError("the system has no ports; only a zero input applies")
    if kind == "constant":
        values = spec.get("values", spec.get("value"))
        if values is None:
            raise ConfigError("constant input needs 'values'")
        signal = PortSignal.constant(np.atleast_1d(values))
    elif kind == "sinusoid":
        if "amplitude" not in spec:
            raise ConfigError("sinusoid input needs an 'amplitude'")
        signal = PortSignal.sinusoid(spec["amplitude"],
                                     spec.get("frequency", 1.0),
                                     spec.get("phase", 0.0))
    elif kind == "expr":
        sources = spec.get("exprs", ())
        if isinstance(sources, str):
            sources = [sources]
        if not sources:
            raise ConfigError("expression input needs 'exprs'")
        for src in sources:
            try:
                extra = free_names(parse(src)) - {"t"}
            except ExprError as err:
                raise ConfigError(f"bad input expression {src!r}: {err}") from None
            if extra:
                raise ConfigError(f"input expression {src!r} may only use "
                                  f"the time variable t; found {sorted(extra)}")
        signal = PortSignal.from_exprs(sources)
    else:
        raise ConfigError(f"unknown input kind {kind!r}; use zero, constant, "
                          f"sinusoid or expr")
    if signal.n_ports != n_ports:
        raise ConfigError(f"input supplies {signal.n_ports} channel(s) for a "
                          f"system with {n_ports} port(s)")
    return signal


# ---------------------------------------------------------------------------
# Output writers


def _format_value(x: float) -> str:
    return repr(float(x))


def _write_text(path, text: str, what: str):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    log.info("wrote %s to %s", what, path)


def _write_csv(path, header, columns):
    lines = [",".join(header)]
    rows = len(columns[0])
    for i in range(rows):
        lines.append(",".join(_format_value(col[i]) for col in columns))
    _write_text(path, "\n".join(lines) + "\n", f"{rows} trajectory rows")


def _write_report(path, checks: dict):
    _write_text(path, json.dumps(checks, indent=2) + "\n", "report")


def _check(max_residual: float, tolerance: float) -> dict:
    return {"max_residual": float(max_residual), "tolerance": float(tolerance),
            "pass": bool(max_residual <= tolerance)}


def _report_exit(path, checks: dict) -> int:
    _write_report(path, checks)
    failed = [name for name, c in checks.items() if not c["pass"]]
    if failed:
        log.error("failed checks: %s", ", ".join(failed))
        return 1
    return 0


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_simulate(cfg: RunConfig) -> int:
    system = _build_system(cfg.system)
    signal = _make_signal(cfg.input, system.n_ports)
    result = simulate(system, cfg.t_end, cfg.dt, u=signal,
                      params=cfg.initial, monitors=cfg.monitors)
    m = system.n_coords
    header = (["t"] + [f"q{i}" for i in range(m)] + [f"p{i}" for i in range(m)]
              + [key for k in range(system.n_ports)
                 for key in (f"y_p{k + 1}", f"y_e{k + 1}")]
              + list(cfg.monitors))
    columns = [result.t]
    columns += [result.x[:, j] for j in range(2 * m)]
    for k in range(system.n_ports):
        columns.append(result.outputs[f"y_p{k + 1}"])
        columns.append(result.outputs[f"y_e{k + 1}"])
    columns += [result.monitors[name] for name in cfg.monitors]
    _write_csv(cfg.output, header, columns)
    return 0


def _cmd_validate(cfg: RunConfig) -> int:
    system = _build_system(cfg.system)
    report = validate(system, n_samples=cfg.samples, seed=cfg.seed)
    checks = {
        "degree": _check(report.degree_residual, 1e-8),
        "on_surface": _check(report.on_surface_residual, 1e-9),
        "first_law": _check(report.first_law_residual, 1e-8),
        "second_law": _check(max(0.0, -report.second_law_min), 1e-12),
        "chart_form": _check(report.chart_form_residual, 1e-6),
    }
    return _report_exit(cfg.report, checks)


def _bracket_operands(cfg: RunConfig):
    if cfg.k1 is not None or cfg.k2 is not None:
        if not (cfg.k1 and cfg.k2):
            raise ConfigError("bracket needs both k1 and k2 expressions")
        phase_vars = _phase_var_names(cfg.dimensions)
        return (_compile(cfg.k1, phase_vars, "bracket operand"),
                _compile(cfg.k2, phase_vars, "bracket operand"),
                cfg.degree1, cfg.degree2)
    if cfg.system is not None:
        system = _build_system(cfg.system)
        if system.n_ports == 0:
            raise ConfigError("bracketing a system's generators needs at "
                              "least one port; pass k1/k2 instead")
        return system.Ka, system.Kc[0], 1, 1
    raise ConfigError("bracket needs k1/k2 expressions or a system")


def _cmd_bracket(cfg: RunConfig) -> int:
    K1, K2, deg1, deg2 = _bracket_operands(cfg)
    degree_report = degree_check(deg1, deg2, K1, K2,
                                 n_samples=cfg.samples, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    m = K1.dim // 2
    antisym = 0.0
    for _ in range(cfg.samples):
        pt = PhasePoint(rng.uniform(0.6, 1.4, m),
                        rng.uniform(0.2, 1.0, m) * rng.choice([-1.0, 1.0], m))
        try:
            antisym = max(antisym, abs(poisson(K1, K2, pt)
                                       + poisson(K2, K1, pt)))
        except (ValueError, ZeroDivisionError, ArithmeticError):
            continue
    checks = {
        "operand_degrees": _check(degree_report.max_input_residual, 1e-9),
        f"bracket_{degree_report.expected}": _check(
            degree_report.max_residual, 1e-9),
        "antisymmetry": _check(antisym, 1e-12),
    }
    return _report_exit(cfg.report, checks)


def _cmd_reduce(cfg: RunConfig) -> int:
    system = _build_system(cfg.system)
    gf = system.gf
    try:
        specific_form(gf)
    except ValueError as err:
        raise ConfigError(f"system {system.name!r} has no reduced form: "
                          f"{err}") from None
    if system.param_box is None:
        raise ConfigError(f"system {system.name!r} has no param_box to "
                          f"sample the surface from")
    params = _sample_surface_params(system, cfg.samples, cfg.seed)
    gd = gibbs_duhem_check(gf, params)
    checks = {
        "extensive_euler": _check(gd.max_qp_rel, 1e-10),
        "gibbs_duhem": _check(gd.max_beta, 1e-9),
        "scaling_tangency": _check(gd.max_w_membership, 1e-9),
    }
    failed = [name for name, check in checks.items() if not check["pass"]]
    if cfg.at is not None:
        try:
            point = reduced_point(gf, cfg.at)
        except ValueError as err:
            raise ConfigError(f"cannot reduce at {list(cfg.at)}: {err}") from None
        checks["reduced_point"] = {"at": list(cfg.at),
                                   "point": [float(v) for v in point]}
    _write_report(cfg.report, checks)
    if failed:
        log.error("failed checks: %s", ", ".join(failed))
        return 1
    return 0


def _cmd_flowcheck(cfg: RunConfig) -> int:
    system = _build_system(cfg.system)
    grid = []
    if system.default_params is not None:
        grid.append(system.default_params)
    if system.param_box is not None:
        grid.extend(_sample_surface_params(system,
                                           max(0, cfg.samples - len(grid)),
                                           cfg.seed))
    if not grid:
        raise ConfigError(f"system {system.name!r} has neither default "
                          f"parameters nor a param_box to sample")
    report = flow_transport_check(system.gf, system.Ka, cfg.t_end, grid,
                                  dt=cfg.dt)
    checks = {
        "alpha_on_tangents": _check(report.alpha_residual, 1e-6),
        "membership_drift": _check(report.membership_drift, 1e-6),
    }
    return _report_exit(cfg.report, checks)


def _cmd_list(cfg: RunConfig) -> int:
    lines = []
    for name, factory in sorted(BUILTIN_SYSTEMS.items()):
        system = factory()
        params = ", ".join(inspect.signature(factory).parameters)
        lines.append(f"{name}: {system.n_coords} coordinates, "
                     f"{system.n_ports} port(s); params: {params}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
    "bracket": _cmd_bracket,
    "reduce": _cmd_reduce,
    "flowcheck": _cmd_flowcheck,
    "list": _cmd_list,
}


# ---------------------------------------------------------------------------
# Entry points


def _setup_logging():
    raw = os.environ.get("LTK_LOG", "warn").lower()
    level = _LOG_LEVELS.get(raw)
    if level is None:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if raw not in _LOG_LEVELS and raw != "warn":
        log.warning("unknown LTK_LOG level %r; using warn "
                    "(choices: %s)", raw, ", ".join(_LOG_LEVELS))


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: "
                          f"line {err.lineno}: {err.msg}") from None


def _dispatch(cfg: RunConfig) -> int:
    handler = _COMMANDS.get(cfg.command)
    if handler is None:
        raise ConfigError(f"unknown command {cfg.command!r}; available: "
                          f"{', '.join(_COMMANDS)}")
    log.info("running %s", cfg.command)
    return handler(cfg)


def _fail(err: BaseException) -> int:
    if isinstance(err, ConfigError):
        print(f"ltk: config error: {err}", file=sys.stderr)
        return 2
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    print(f"ltk: [{stamp}] {type(err).__name__}: {err}", file=sys.stderr)
    return 1


def run(config_path: str) -> int:
    """Execute the run described by a JSON config file; returns the exit code.

    The file must carry a ``"command"`` entry naming the subcommand.  Exit
    codes follow the CLI: 0 success, 1 failed checks or aborted runs, 2
    configuration errors (including an unreadable file).
    """
    _setup_logging()
    try:
        cfg = RunConfig.from_mapping(_load_config_file(config_path))
        return _dispatch(cfg)
    except ConfigError as err:
        return _fail(err)
    except Exception as err:           # noqa: BLE001 - boundary of the CLI
        return _fail(err)


def _parse_param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(
            f"parameters take the form name=value, got {text!r}")
    key, _, raw = text.partition("=")
    parts = raw.split(",")
    try:
        values = [float(v) for v in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"parameter {key!r} needs a number or comma-separated numbers")
    return key.strip(), values[0] if len(values) == 1 else tuple(values)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltk",
        description="Simulate and check port-thermodynamic systems.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--system", help="built-in system name")
        p.add_argument("--param", action="append", type=_parse_param,
                       default=None, metavar="NAME=VALUE",
                       help="system parameter override (repeatable)")
        p.add_argument("--seed", type=int, help="sampling seed")
        p.add_argument("--report", help="JSON report path (default: stdout)")
        p.add_argument("--chart", type=int, help="chart coordinate index")

    p = sub.add_parser("simulate", help="integrate a system and write a CSV")
    common(p)
    p.add_argument("--u", help="input expression(s) in t, ';'-separated")
    p.add_argument("--t-end", type=float, help="integration end time")
    p.add_argument("--dt", type=float, help="integration step")
    p.add_argument("--initial", help="surface parameters, comma-separated")
    p.add_argument("--monitors", help="monitor names, comma-separated")
    p.add_argument("--output", help="CSV path (default: stdout)")

    p = sub.add_parser("validate", help="check structural invariants")
    common(p)
    p.add_argument("--samples", type=int, help="number of surface samples")

    p = sub.add_parser("bracket", help="bracket two generators and check degrees")
    common(p)
    p.add_argument("--k1", help="first operand expression over q<i>, p<i>")
    p.add_argument("--k2", help="second operand expression over q<i>, p<i>")
    p.add_argument("--degree1", type=int, help="declared fiber degree of k1")
    p.add_argument("--degree2", type=int, help="declared fiber degree of k2")
    p.add_argument("--dimensions", type=int,
                   help="number of extensive coordinates")
    p.add_argument("--samples", type=int, help="number of sample points")

    p = sub.add_parser("reduce", help="check extensivity and reduce a surface")
    common(p)
    p.add_argument("--at", help="extensive values q1..qn, comma-separated")
    p.add_argument("--samples", type=int, help="number of surface samples")

    p = sub.add_parser("flowcheck", help="transport the surface along the drift")
    common(p)
    p.add_argument("--t-end", type=float, help="transport time")
    p.add_argument("--dt", type=float, help="integration step")
    p.add_argument("--samples", type=int, help="number of surface members")

    p = sub.add_parser("list", help="list built-in systems")
    common(p)
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    mapping = {}
    if getattr(args, "config", None):
        mapping = _load_config_file(args.config)
        if not isinstance(mapping, dict):
            raise ConfigError("the configuration root must be a JSON object")
        mapping = dict(mapping)
    mapping["command"] = args.command

    plain = {"seed", "report", "chart", "t_end", "dt", "initial", "monitors",
             "output", "samples", "k1", "k2", "degree1", "degree2",
             "dimensions", "at"}
    for key in plain:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value

    if getattr(args, "u", None) is not None:
        mapping["input"] = args.u
    params = dict(getattr(args, "param", None) or ())
    if getattr(args, "system", None) is not None:
        mapping["system"] = {"name": args.system, "params": params}
    elif params:
        spec = mapping.get("system")
        if isinstance(spec, str):
            spec = {"name": spec}
        if not isinstance(spec, dict) or "name" not in spec:
            raise ConfigError("--param overrides need a named built-in system")
        merged = dict(spec.get("params", {}))
        merged.update(params)
        spec = dict(spec)
        spec["params"] = merged
        mapping["system"] = spec
    return RunConfig.from_mapping(mapping)


def main(argv=None) -> int:
    """The ``ltk`` console entry point; returns the process exit code."""
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        return _dispatch(cfg)
    except ConfigError as err:
        return _fail(err)
    except Exception as err:           # noqa: BLE001 - boundary of the CLI
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
