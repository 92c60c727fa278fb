"""Port-thermodynamic systems: state surfaces driven by degree-1 generators.

A system couples a state surface (a lifted generating function, carrying the
physical properties) with generators of motion along it:

* ``Ka`` — the internal (drift) generator, and
* ``Kc`` — one generator per external port, entering as ``Ka + sum_k u_k Kc_k``
  for a control signal ``u(t)``.

All generators are homogeneous of degree 1 in the costate and vanish on the
surface, so the flow stays on the surface and is independent of the costate
ray chosen to represent a state.  Structure, not just trajectories, encodes
the two laws: with designated energy and entropy coordinates,

* first law — the drift never produces energy: ``sum_{i in energy}
  dKa/dp_i = 0`` on the surface; energy changes only through ports,
  balanced by the power conjugate outputs ``y_p_k = sum_{i in energy}
  dKc_k/dp_i``;
* second law — the drift never destroys entropy: ``sum_{i in entropy}
  dKa/dp_i >= 0`` on the surface, with port entropy flow measured by
  ``y_e_k = sum_{i in entropy} dKc_k/dp_i``.

:func:`validate` measures all of these on sampled surface points and
:func:`interconnect` composes two systems through a static feedback law
between their outputs, rejecting compositions that break the second law.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .diffkit import ScalarFn, exp, grad
from .dynamics import HamiltonianSpec, rk4_step, validate_degree
from .geometry import PhasePoint, dehomogenize, project, scale_costate
from .submanifold import (GeneratingFunction, lift_generating_function,
                          liouville_point, membership_residual)

__all__ = [
    "PortSystem",
    "PortSignal",
    "SimulationResult",
    "ValidationReport",
    "assemble_K",
    "outputs",
    "simulate",
    "energy_balance",
    "entropy_balance",
    "validate",
    "interconnect",
    "gas_piston_damper",
    "heat_compartment",
    "heat_exchanger",
    "ideal_gas_SVN",
    "BUILTIN_SYSTEMS",
    "builtin",
    "MONITOR_NAMES",
]

# A simulated state whose membership residual exceeds this aborts the run:
# past it the trajectory no longer represents the modeled surface.
MEMBERSHIP_ABORT = 1e-5


@dataclass
class PortSystem:
    """A state surface with internal and port generators.

    ``y_p`` / ``y_e`` are the port outputs as explicit phase functions; when
    omitted they are derived from ``Kc`` by differentiation (at the cost of
    falling back to finite differences inside nested gradients).
    ``default_params`` seeds simulations and ``param_box`` bounds the
    surface-sampling used by validation, both over the parameter layout
    ``[q_I ascending, p_chart, p_J ascending]``.
    """

    name: str
    gf: GeneratingFunction
    Ka: ScalarFn
    Kc: tuple = ()
    energy_indices: tuple = ()
    entropy_indices: tuple = ()
    y_p: tuple = None
    y_e: tuple = None
    default_params: tuple = None
    param_box: tuple = None

    def __post_init__(self):
        m = self.gf.n + 1
        self.Kc = tuple(self.Kc)
        self.energy_indices = tuple(sorted(self.energy_indices))
        self.entropy_indices = tuple(sorted(self.entropy_indices))
        if self.Ka.dim != 2 * m:
            raise ValueError(f"Ka must be a phase function of dimension {2 * m}")
        for K in self.Kc:
            if K.dim != 2 * m:
                raise ValueError(f"every port generator must have dimension {2 * m}")
        for i in self.energy_indices + self.entropy_indices:
            if not 0 <= i < m:
                raise ValueError(f"coordinate index {i} out of range")
        if set(self.energy_indices) & set(self.entropy_indices):
            raise ValueError("a coordinate cannot carry both energy and entropy")
        if self.y_p is None:
            self.y_p = tuple(self._derived_output(k, self.energy_indices, "y_p")
                             for k in range(len(self.Kc)))
        if self.y_e is None:
            self.y_e = tuple(self._derived_output(k, self.entropy_indices, "y_e")
                             for k in range(len(self.Kc)))
        if len(self.y_p) != len(self.Kc) or len(self.y_e) != len(self.Kc):
            raise ValueError("need one y_p and one y_e function per port")
        if self.param_box is not None:
            self.param_box = tuple((float(a), float(b)) for a, b in self.param_box)
            if len(self.param_box) != self.gf.n_params:
                raise ValueError(f"param_box must bound all {self.gf.n_params} "
                                 f"surface parameters")

    def _derived_output(self, k: int, indices, label: str) -> ScalarFn:
        K = self.Kc[k]
        m = self.gf.n + 1

        def fn(x, _K=K, _idx=indices):
            g = grad(_K, [float(v) for v in x])
            return float(sum(g[m + i] for i in _idx))

        return ScalarFn(fn, dim=2 * m, name=f"{label}{k + 1}({self.name})",
                        provenance="derived", dual_safe=False)

    @property
    def n_ports(self) -> int:
        return len(self.Kc)

    @property
    def n_coords(self) -> int:
        return self.gf.n + 1


class PortSignal:
    """A vector-valued control signal ``u(t)`` with a fixed port count."""

    def __init__(self, fn, n_ports: int, description: str = ""):
        self.fn = fn
        self.n_ports = n_ports
        self.description = description

    def __call__(self, t: float) -> np.ndarray:
        u = np.atleast_1d(np.asarray(self.fn(t), dtype=float))
        if u.size != self.n_ports:
            raise ValueError(f"signal produced {u.size} values for "
                             f"{self.n_ports} ports")
        return u

    @classmethod
    def zero(cls, n_ports: int) -> "PortSignal":
        return cls(lambda t: np.zeros(n_ports), n_ports, "zero")

    @classmethod
    def constant(cls, values) -> "PortSignal":
        vals = np.atleast_1d(np.asarray(values, dtype=float))
        return cls(lambda t: vals, vals.size, f"constant {vals.tolist()}")

    @classmethod
    def sinusoid(cls, amplitude: float, frequency: float,
                 phase: float = 0.0) -> "PortSignal":
        a, w, ph = float(amplitude), float(frequency), float(phase)
        return cls(lambda t: np.array([a * np.sin(w * t + ph)]), 1,
                   f"{a} * sin({w} t + {ph})")

    @classmethod
    def from_exprs(cls, sources) -> "PortSignal":
        from .exprlang import compile_fn
        fns = [compile_fn(src, ["t"]) for src in sources]
        return cls(lambda t: np.array([f([t]) for f in fns]), len(fns),
                   "; ".join(sources))


@dataclass
class SimulationResult:
    """A port-system trajectory with recorded inputs, outputs and monitors."""

    system: str
    t: np.ndarray
    x: np.ndarray                       # packed phase states, shape (N+1, 2m)
    u: np.ndarray                       # shape (N+1, n_ports)
    outputs: dict                       # "y_p1", "y_e1", ... -> arrays
    monitors: dict = field(default_factory=dict)

    @property
    def n_coords(self) -> int:
        return self.x.shape[1] // 2

    @property
    def q(self) -> np.ndarray:
        return self.x[:, :self.n_coords]

    @property
    def p(self) -> np.ndarray:
        return self.x[:, self.n_coords:]


@dataclass
class ValidationReport:
    """Worst-case structural residuals of a port system on sampled states.

    ``degree_residual`` is the relative fiber-degree defect over all
    generators; ``on_surface_residual`` the largest generator value on the
    surface; ``first_law_residual`` the largest drift energy production;
    ``second_law_min`` the smallest drift entropy production (negative means
    a violation); ``chart_form_residual`` the largest disagreement between
    full-phase coordinate rates and their chart-coordinate form on the
    energy and entropy charts.
    """

    system: str
    n_samples: int
    degree_residual: float
    on_surface_residual: float
    first_law_residual: float
    second_law_min: float
    chart_form_residual: float

    @property
    def passed(self) -> bool:
        return (self.degree_residual <= 1e-8
                and self.on_surface_residual <= 1e-9
                and self.first_law_residual <= 1e-8
                and self.second_law_min >= -1e-12
                and self.chart_form_residual <= 1e-6)

    def as_dict(self) -> dict:
        return {
            "system": self.system,
            "n_samples": self.n_samples,
            "degree_residual": self.degree_residual,
            "on_surface_residual": self.on_surface_residual,
            "first_law_residual": self.first_law_residual,
            "second_law_min": self.second_law_min,
            "chart_form_residual": self.chart_form_residual,
            "passed": self.passed,
        }


def assemble_K(sys: PortSystem, u_values) -> HamiltonianSpec:
    """The total generator ``Ka + sum_k u_k Kc_k`` for a frozen input value.

    Degree-1 homogeneity survives the sum, so the result is returned as a
    ready-to-validate :class:`~ltk.dynamics.HamiltonianSpec`.
    """
    u_values = [float(v) for v in np.atleast_1d(u_values)] if sys.n_ports else []
    if len(u_values) != sys.n_ports:
        raise ValueError(f"expected {sys.n_ports} input values, got {len(u_values)}")
    parts = [(1.0, sys.Ka)] + list(zip(u_values, sys.Kc))

    def fn(x):
        return sum(c * K(x) for c, K in parts)

    K = ScalarFn(fn, dim=sys.Ka.dim, name=f"K[{sys.name}]",
                 provenance="derived",
                 dual_safe=all(K.dual_safe for _, K in parts))
    return HamiltonianSpec(K, degree=1, name=f"K[{sys.name}] at u={u_values}")


def outputs(sys: PortSystem, pt: PhasePoint):
    """Evaluate all port outputs at a phase point; returns ``(y_p, y_e)``.

    Both arrays have one entry per port.  The outputs only carry their
    thermodynamic meaning on the state surface, so a membership residual
    above 1e-6 triggers a warning (the values are still returned — they are
    defined off the surface, just not meaningful).
    """
    res = float(np.max(np.abs(membership_residual(sys.gf, pt))))
    if res > 1e-6:
        warnings.warn(f"outputs of {sys.name!r} requested at a state with "
                      f"membership residual {res:.3g}; the point is not on "
                      f"the modeled surface", stacklevel=2)
    x = pt.packed()
    y_p = np.array([float(fn(x)) for fn in sys.y_p])
    y_e = np.array([float(fn(x)) for fn in sys.y_e])
    return y_p, y_e


def _field_and_value(sys: PortSystem, x, uv):
    """Gradient of the total generator and its value at a packed state."""
    g = grad(sys.Ka, x)
    val = float(sys.Ka(x))
    for k in range(sys.n_ports):
        if uv[k] != 0.0:
            g = g + uv[k] * grad(sys.Kc[k], x)
            val += uv[k] * float(sys.Kc[k](x))
    return g, val


MONITOR_NAMES = ("K_res", "alpha_res", "E_total", "S_total", "membership")


def _monitor_fn(sys: PortSystem, u: PortSignal, name: str):
    m = sys.n_coords
    if name == "E_total":
        return lambda t, x: float(sum(x[i] for i in sys.energy_indices))
    if name == "S_total":
        return lambda t, x: float(sum(x[i] for i in sys.entropy_indices))
    if name == "membership":
        return lambda t, x: float(np.max(np.abs(
            membership_residual(sys.gf, PhasePoint(x[:m], x[m:])))))
    if name == "K_res":
        def k_res(t, x):
            uv = u(t)
            val = float(sys.Ka(x))
            for k in range(sys.n_ports):
                val += uv[k] * float(sys.Kc[k](x))
            return abs(val)
        return k_res
    if name == "alpha_res":
        def alpha_res(t, x):
            g, val = _field_and_value(sys, x, u(t))
            return abs(float(np.dot(x[m:], g[m:])) - val)
        return alpha_res
    raise ValueError(f"unknown monitor {name!r}; available: "
                     f"{', '.join(MONITOR_NAMES)}")


def simulate(sys: PortSystem, t_end: float, dt: float, u: PortSignal = None,
             params=None, monitors=(), membership_tol: float = MEMBERSHIP_ABORT
             ) -> SimulationResult:
    """Integrate a port system from a surface point with input ``u(t)``.

    The state is the packed phase vector of the lifted surface; outputs,
    inputs and requested monitors are recorded at every grid point.  The
    surface membership residual is checked each step and a drift beyond
    ``membership_tol`` aborts: a trajectory off the surface no longer means
    anything thermodynamically.
    """
    if params is None:
        params = sys.default_params
    if params is None:
        raise ValueError(f"system {sys.name!r} has no default initial "
                         f"parameters; pass params explicitly")
    if u is None:
        u = PortSignal.zero(sys.n_ports)
    if u.n_ports != sys.n_ports:
        raise ValueError(f"signal has {u.n_ports} ports, system {sys.n_ports}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = round(t_end / dt)
    if steps < 0 or abs(steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError(f"t_end={t_end} is not an integer multiple of dt={dt}")

    m = sys.n_coords
    x = liouville_point(sys.gf, params).packed()
    monitor_fns = [(nm, _monitor_fn(sys, u, nm)) for nm in monitors]

    def f(t, xv):
        g, _ = _field_and_value(sys, xv, u(t))
        return np.concatenate([g[m:], -g[:m]])

    ts = np.empty(steps + 1)
    xs = np.empty((steps + 1, 2 * m))
    us = np.empty((steps + 1, sys.n_ports))
    out = {}
    for k in range(sys.n_ports):
        out[f"y_p{k + 1}"] = np.empty(steps + 1)
        out[f"y_e{k + 1}"] = np.empty(steps + 1)
    mon = {nm: np.empty(steps + 1) for nm, _ in monitor_fns}

    def record(i, t, xv):
        res = float(np.max(np.abs(
            membership_residual(sys.gf, PhasePoint(xv[:m], xv[m:])))))
        if res > membership_tol:
            raise RuntimeError(
                f"simulation of {sys.name!r} left the state surface at "
                f"t={t:g}: membership residual {res:.3g} exceeds "
                f"{membership_tol:g}")
        ts[i] = t
        xs[i] = xv
        us[i] = u(t)
        for k in range(sys.n_ports):
            out[f"y_p{k + 1}"][i] = float(sys.y_p[k](xv))
            out[f"y_e{k + 1}"][i] = float(sys.y_e[k](xv))
        for nm, fn in monitor_fns:
            mon[nm][i] = float(fn(t, xv))

    record(0, 0.0, x)
    for i in range(1, steps + 1):
        x = rk4_step(f, (i - 1) * dt, x, dt)
        if not np.all(np.isfinite(x)):
            raise RuntimeError(f"simulation of {sys.name!r} produced a "
                               f"non-finite state at t={i * dt:g}")
        record(i, i * dt, x)
    return SimulationResult(sys.name, ts, xs, us, out, mon)


def _trapezoid(y: np.ndarray, t: np.ndarray) -> float:
    return float(np.sum((y[1:] + y[:-1]) * np.diff(t)) / 2.0)


def energy_balance(sys: PortSystem, result: SimulationResult) -> dict:
    """Compare the energy change against the integrated port power.

    Power supplied through port k is ``y_p_k * u_k``; the integral uses the
    trapezoid rule on the recorded grid.  The defect is the first-law
    discrepancy of the recorded trajectory.
    """
    E = result.q[:, list(sys.energy_indices)].sum(axis=1)
    supplied = sum(
        _trapezoid(result.outputs[f"y_p{k + 1}"] * result.u[:, k], result.t)
        for k in range(sys.n_ports))
    delta = float(E[-1] - E[0])
    return {"delta": delta, "supplied": float(supplied),
            "defect": float(delta - supplied)}


def entropy_balance(sys: PortSystem, result: SimulationResult) -> dict:
    """Split the entropy change into port flow and internal production."""
    S = result.q[:, list(sys.entropy_indices)].sum(axis=1)
    flow = sum(
        _trapezoid(result.outputs[f"y_e{k + 1}"] * result.u[:, k], result.t)
        for k in range(sys.n_ports))
    delta = float(S[-1] - S[0])
    return {"delta": delta, "flow": float(flow),
            "production": float(delta - flow)}


def _sample_surface_params(sys: PortSystem, n_samples: int, seed: int):
    if sys.param_box is None:
        raise ValueError(f"system {sys.name!r} has no param_box to sample from")
    rng = np.random.default_rng(seed)
    lo = np.array([a for a, _ in sys.param_box])
    hi = np.array([b for _, b in sys.param_box])
    return [rng.uniform(lo, hi) for _ in range(n_samples)]


def _chart_form_residual(sys: PortSystem, pt: PhasePoint, chart: int,
                         Khat: ScalarFn) -> float:
    """Defect between full-phase coordinate rates and their chart form."""
    m = sys.n_coords
    pc = pt.p[chart]
    if abs(pc) < 1e-9 * float(np.max(np.abs(pt.p))):
        return 0.0                       # chart unusable at this state; skip
    rep = scale_costate(pt, -1.0 / pc)   # representative with p_chart = -1
    g_full = grad(sys.Ka, rep.packed())

    xhat = project(rep, chart).packed()
    ghat = grad(Khat, xhat)
    val = float(Khat(xhat))
    gamma = xhat[m:]
    others = [j for j in range(m) if j != chart]

    worst = 0.0
    for pos, j in enumerate(others):
        worst = max(worst, abs(g_full[m + j] - ghat[m + pos]))
    chart_rate = float(np.dot(gamma, ghat[m:])) - val
    worst = max(worst, abs(g_full[m + chart] - chart_rate))
    return worst


def validate(sys: PortSystem, n_samples: int = 25, seed: int = 9
             ) -> ValidationReport:
    """Measure the structural invariants of a port system on sampled states.

    Generators are degree-checked on generic phase points; the surface
    statements (generators vanish, first and second law) are evaluated at
    ``n_samples`` points drawn from ``param_box``; the chart-form agreement
    is checked on the energy chart (0) and, when present, the entropy
    chart (1).
    """
    m = sys.n_coords
    degree_res = 0.0
    for K in (sys.Ka,) + sys.Kc:
        degree_res = max(degree_res, validate_degree(K, 1, n_samples=30,
                                                     seed=seed))

    charts = [0] + ([1] if m > 1 else [])
    khats = {c: dehomogenize(sys.Ka, c) for c in charts}

    on_surface = 0.0
    first_law = 0.0
    second_min = np.inf
    chart_form = 0.0
    params_list = _sample_surface_params(sys, n_samples, seed)
    for params in params_list:
        pt = liouville_point(sys.gf, params)
        x = pt.packed()
        for K in (sys.Ka,) + sys.Kc:
            on_surface = max(on_surface, abs(float(K(x))))
        g = grad(sys.Ka, x)
        first_law = max(first_law, abs(float(
            sum(g[m + i] for i in sys.energy_indices))))
        second_min = min(second_min, float(
            sum(g[m + i] for i in sys.entropy_indices)))
        for c in charts:
            chart_form = max(chart_form,
                             _chart_form_residual(sys, pt, c, khats[c]))
    return ValidationReport(sys.name, len(params_list), degree_res, on_surface,
                            first_law, float(second_min), chart_form)


# ---------------------------------------------------------------------------
# Interconnection


def interconnect(sys1: PortSystem, sys2: PortSystem, feedback,
                 name: str = None, n_check: int = 20, seed: int = 13
                 ) -> PortSystem:
    """Close two systems through a static output feedback law.

    ``feedback(y_p1, y_e1, y_p2, y_e2) -> (u1, u2)`` receives the output
    values of both systems (sequences, one entry per port) and returns the
    inputs to apply to each; it must be a pure function built from arithmetic
    so that it composes with both plain floats and derivative-carrying
    numbers.  The result is a closed system (no remaining ports) on the
    product surface, with the feedback substituted into the drift generator.

    The composition is rejected if the substituted drift produces negative
    total entropy at any sampled surface state: a feedback law is only a
    valid interconnection if it respects the second law.
    """
    if sys1.n_ports == 0 and sys2.n_ports == 0:
        raise ValueError("interconnection needs at least one port to close")
    m1, m2 = sys1.n_coords, sys2.n_coords
    M = m1 + m2
    n = M - 1
    gf1, gf2 = sys1.gf, sys2.gf
    name = name or f"{sys1.name}+{sys2.name}"

    def split(x):
        xs = list(x)
        x1 = xs[0:m1] + xs[M:M + m1]
        x2 = xs[m1:M] + xs[M + m1:2 * M]
        return x1, x2

    def inputs(x1, x2):
        yp1 = [fn(x1) for fn in sys1.y_p]
        ye1 = [fn(x1) for fn in sys1.y_e]
        yp2 = [fn(x2) for fn in sys2.y_p]
        ye2 = [fn(x2) for fn in sys2.y_e]
        u1, u2 = feedback(yp1, ye1, yp2, ye2)
        if len(u1) != sys1.n_ports or len(u2) != sys2.n_ports:
            raise ValueError("feedback returned the wrong number of inputs")
        return u1, u2

    def Ka_fn(x):
        x1, x2 = split(x)
        u1, u2 = inputs(x1, x2)
        total = sys1.Ka(x1) + sys2.Ka(x2)
        for k in range(sys1.n_ports):
            total = total + u1[k] * sys1.Kc[k](x1)
        for k in range(sys2.n_ports):
            total = total + u2[k] * sys2.Kc[k](x2)
        return total

    dual_safe = all(K.dual_safe for K in
                    (sys1.Ka, sys2.Ka) + sys1.Kc + sys2.Kc
                    + sys1.y_p + sys1.y_e + sys2.y_p + sys2.y_e)
    Ka = ScalarFn(Ka_fn, dim=2 * M, name=f"drift({name})",
                  provenance="derived", dual_safe=dual_safe)

    # Product surface: chart of system 1 stays the chart; system 2's chart
    # costate becomes one more intensive parameter.
    I = tuple(sorted(gf1.I + tuple(m1 + i for i in gf2.I)))
    J = tuple(sorted(gf1.J + (m1 + gf2.chart,) + tuple(m1 + j for j in gf2.J)))
    chart = gf1.chart
    F1 = lift_generating_function(gf1)
    F2 = lift_generating_function(gf2)

    def Fhat_fn(args):
        nI1, nI2 = len(gf1.I), len(gf2.I)
        qI1 = list(args[:nI1])
        qI2 = list(args[nI1:nI1 + nI2])
        gam = list(args[nI1 + nI2:])
        gvals = dict(zip(J, gam))
        # With the composite chart costate frozen at -1, every other costate
        # equals its chart ratio.
        a1 = qI1 + [-1.0] + [gvals[j] for j in gf1.J]
        a2 = qI2 + [gvals[m1 + gf2.chart]] + [gvals[m1 + j] for j in gf2.J]
        return F1(a1) + F2(a2)
    Fhat = ScalarFn(Fhat_fn, dim=n,
                    name=f"product({gf1.name or 'L1'}, {gf2.name or 'L2'})",
                    provenance="derived",
                    dual_safe=F1.dual_safe and F2.dual_safe)
    gf = GeneratingFunction(
        n=n, Fhat=Fhat, I=I, J=J, chart=chart,
        q_homogeneous=gf1.q_homogeneous and gf2.q_homogeneous, name=name)

    energy = tuple(sorted(sys1.energy_indices
                          + tuple(m1 + i for i in sys2.energy_indices)))
    entropy = tuple(sorted(sys1.entropy_indices
                           + tuple(m1 + i for i in sys2.entropy_indices)))

    def compose_params(v1, v2):
        if v1 is None or v2 is None:
            return None
        q = {}
        pv = {}
        for vec, gfi, shift in ((v1, gf1, 0), (v2, gf2, m1)):
            nI = len(gfi.I)
            for k, i in enumerate(gfi.I):
                q[shift + i] = vec[k]
            pv[shift + gfi.chart] = vec[nI]
            for k, j in enumerate(gfi.J):
                pv[shift + j] = vec[nI + 1 + k]
        return tuple([q[i] for i in I] + [pv[chart]] + [pv[j] for j in J])

    default_params = compose_params(sys1.default_params, sys2.default_params)
    param_box = compose_params(sys1.param_box, sys2.param_box)

    composed = PortSystem(
        name=name, gf=gf, Ka=Ka, Kc=(), energy_indices=energy,
        entropy_indices=entropy, y_p=(), y_e=(),
        default_params=default_params, param_box=param_box)

    # Reject feedback laws that let the composed drift destroy entropy.
    worst_rate = np.inf
    worst_params = None
    for params in _sample_surface_params(composed, n_check, seed):
        pt = liouville_point(gf, params)
        g = grad(Ka, pt.packed())
        rate = float(sum(g[M + i] for i in entropy))
        if rate < worst_rate:
            worst_rate = rate
            worst_params = params
    if worst_rate < -1e-12:
        raise ValueError(
            f"interconnection {name!r} violates the second law: the composed "
            f"drift produces entropy at rate {worst_rate:.3g} at surface "
            f"parameters {np.asarray(worst_params).tolist()}")
    return composed


# ---------------------------------------------------------------------------
# Built-in systems


def _zero_fn(dim: int) -> ScalarFn:
    return ScalarFn(lambda x: 0.0, dim=dim, name="0")


def gas_piston_damper(mass: float = 1.0, damping: float = 0.5,
                      U0: float = 1.0, V0: float = 1.0, S0: float = 0.0,
                      R: float = 1.0, c_v: float = 1.5) -> PortSystem:
    """A gas cylinder under a damped piston with one mechanical force port.

    Coordinates ``(E, S, V, pi)``: total energy, entropy, volume and piston
    momentum.  The gas has internal energy
    ``U(S, V) = U0 (V0/V)^(R/c_v) exp((S - S0)/c_v)`` (temperature
    ``T = U/c_v``, pressure ``P = (R/c_v) U/V``), the piston carries kinetic
    energy ``pi^2/(2 mass)``, and the damper dissipates mechanical power
    ``damping * (pi/mass)^2`` back into the gas as heat.  The port applies an
    external force to the piston; its conjugate power output is the piston
    velocity.
    """
    if min(mass, U0, V0, c_v, R) <= 0:
        raise ValueError("mass, U0, V0, R and c_v must be positive")
    if damping < 0:
        raise ValueError("damping must be nonnegative")

    def U(S, V):
        return U0 * (V0 / V) ** (R / c_v) * exp((S - S0) / c_v)

    def Fhat_fn(args):
        S, V, pi = args
        return U(S, V) + pi * pi / (2.0 * mass)

    gf = GeneratingFunction(
        n=3, Fhat=ScalarFn(Fhat_fn, 3, name="gas+piston energy"),
        I=(1, 2, 3), J=(), chart=0, name="gas_piston_damper")

    def Ka_fn(x):
        S, V, pi = x[1], x[2], x[3]
        pS, pV, ppi = x[5], x[6], x[7]
        u_val = U(S, V)
        T = u_val / c_v
        P = (R / c_v) * u_val / V
        v = pi / mass
        return pV * v + ppi * (P - damping * v) + pS * damping * v * v / T

    def Kc_fn(x):
        return x[7] + x[4] * (x[3] / mass)

    return PortSystem(
        name="gas_piston_damper",
        gf=gf,
        Ka=ScalarFn(Ka_fn, 8, name="piston drift"),
        Kc=(ScalarFn(Kc_fn, 8, name="piston force port"),),
        energy_indices=(0,),
        entropy_indices=(1,),
        y_p=(ScalarFn(lambda x: x[3] / mass, 8, name="piston velocity"),),
        y_e=(_zero_fn(8),),
        default_params=(0.0, 1.0, 0.0, -1.0),
        param_box=((-0.3, 0.8), (0.5, 1.8), (-1.2, 1.2), (-1.6, -0.4)),
    )


def heat_compartment(C: float = 1.0, T_ref: float = 1.0,
                     name: str = "heat_compartment") -> PortSystem:
    """A lumped thermal mass with one heat port.

    Coordinates ``(E, S)`` with the constitutive relation
    ``E(S) = C T_ref exp(S/C)``, so the temperature is
    ``T = dE/dS = T_ref exp(S/C)`` and the heat capacity is C.  The port
    input is the heat flow rate; the conjugate outputs are the constant 1
    (all supplied power is heat) and the inverse temperature carrying the
    port entropy flow.
    """
    if C <= 0 or T_ref <= 0:
        raise ValueError("heat capacity and reference temperature must be positive")

    def T_of(S):
        return T_ref * exp(S / C)

    gf = GeneratingFunction(
        n=1, Fhat=ScalarFn(lambda a: C * T_ref * exp(a[0] / C), 1,
                           name="stored heat"),
        I=(1,), J=(), chart=0, name=name)

    def Kc_fn(x):
        return x[3] / T_of(x[1]) + x[2]

    return PortSystem(
        name=name,
        gf=gf,
        Ka=_zero_fn(4),
        Kc=(ScalarFn(Kc_fn, 4, name="heat port"),),
        energy_indices=(0,),
        entropy_indices=(1,),
        y_p=(ScalarFn(lambda x: 1.0, 4, name="unit power"),),
        y_e=(ScalarFn(lambda x: 1.0 / T_of(x[1]), 4, name="inverse temperature"),),
        default_params=(0.0, -1.0),
        param_box=((-0.5, 1.0), (-1.5, -0.5)),
    )


def heat_exchanger(C=(1.0, 1.0), T_ref=(1.0, 1.0), lam: float = 1.0
                   ) -> PortSystem:
    """Two heat compartments closed through Fourier heat conduction.

    The feedback drives a heat flow ``lam * (T1 - T2)`` from the hotter to
    the colder compartment; the composition conserves total energy exactly
    and produces entropy at rate ``lam (T1 - T2)^2 / (T1 T2) >= 0``.
    """
    if lam < 0:
        raise ValueError("a negative conductance would pump heat from cold "
                         "to hot; lam must be nonnegative")
    c1 = heat_compartment(C[0], T_ref[0], name="compartment_1")
    c2 = heat_compartment(C[1], T_ref[1], name="compartment_2")

    def fourier(yp1, ye1, yp2, ye2):
        w = lam * (1.0 / ye1[0] - 1.0 / ye2[0])
        return (-w,), (w,)

    return interconnect(c1, c2, fourier, name="heat_exchanger")


def ideal_gas_SVN(c_v: float = 1.5, R: float = 1.0, T_ref: float = 1.0,
                  v0: float = 1.0, s0: float = 0.0) -> PortSystem:
    """An ideal gas with extensive entropy, volume and particle number.

    Coordinates ``(E, S, V, N)`` with internal energy
    ``E = N c_v T_ref (N v0 / V)^(R/c_v) exp((S/N - s0)/c_v)``, jointly
    homogeneous of degree 1 in (S, V, N) — the textbook extensive state
    surface, so all the homogeneity-based reductions apply.  The system is
    closed (no ports, zero drift); it exists to carry the surface.
    """
    if min(c_v, R, T_ref, v0) <= 0:
        raise ValueError("c_v, R, T_ref and v0 must be positive")

    def Fhat_fn(args):
        S, V, N = args
        return N * c_v * T_ref * (N * v0 / V) ** (R / c_v) \
            * exp((S / N - s0) / c_v)

    gf = GeneratingFunction(
        n=3, Fhat=ScalarFn(Fhat_fn, 3, name="extensive internal energy"),
        I=(1, 2, 3), J=(), chart=0, q_homogeneous=True, name="ideal_gas_SVN")

    return PortSystem(
        name="ideal_gas_SVN",
        gf=gf,
        Ka=_zero_fn(8),
        Kc=(),
        energy_indices=(0,),
        entropy_indices=(1,),
        y_p=(),
        y_e=(),
        default_params=(0.0, 1.0, 1.0, -1.0),
        param_box=((-0.4, 0.8), (0.6, 1.5), (0.7, 1.3), (-1.5, -0.5)),
    )


BUILTIN_SYSTEMS = {
    "gas_piston_damper": gas_piston_damper,
    "heat_compartment": heat_compartment,
    "heat_exchanger": heat_exchanger,
    "ideal_gas_SVN": ideal_gas_SVN,
}


# Short physical-symbol spellings accepted for factory keywords.
_PARAM_ALIASES = {"m": "mass", "d": "damping", "lambda": "lam"}


def builtin(name: str, **params) -> PortSystem:
    """Construct a built-in system by name with optional parameter overrides.

    Names are matched case-insensitively with hyphens treated as
    underscores, so ``"heat-exchanger"`` and ``"heat_exchanger"`` construct
    the same system.
    """
    key = name.replace("-", "_")
    if key not in BUILTIN_SYSTEMS:
        folded = {k.lower(): k for k in BUILTIN_SYSTEMS}
        if key.lower() not in folded:
            raise ValueError(f"unknown system {name!r}; available: "
                             f"{', '.join(sorted(BUILTIN_SYSTEMS))}")
        key = folded[key.lower()]
    kwargs = {_PARAM_ALIASES.get(k, k): v for k, v in params.items()}
    return BUILTIN_SYSTEMS[key](**kwargs)
