"""State-property surfaces: generating functions and their lifts.

A state surface is described by a generating function ``Fhat(q_I, gamma_J)``
on a chart ``c`` with a disjoint partition ``I ∪ J = {0..n} \\ {c}``.  The
surface in chart coordinates (a Legendre submanifold) is

    q_c     = Fhat - sum_J gamma_j dFhat/dgamma_j
    q_J     = -dFhat/dgamma_J
    gamma_I =  dFhat/dq_I

and its conical lift to the full cotangent bundle (a Liouville submanifold) is
cut out by the degree-1 function

    F(q_I, p_c, p_J) = -p_c * Fhat(q_I, p_J / (-p_c))

via ``q_c = -dF/dp_c``, ``q_J = -dF/dp_J``, ``p_I = dF/dq_I``.  The canonical
one-form vanishes on the lift, and the lift is invariant under costate
scaling — both properties are checked numerically in the test suite rather
than assumed.

When ``Fhat`` is additionally homogeneous of degree 1 in the extensive
variables ``q_I`` (declared via ``q_homogeneous``), the surface satisfies the
generalized Gibbs-Duhem relations: ``sum_i q_i p_i = 0`` on the surface and
``beta = sum_i q_i dp_i`` vanishes on its tangent spaces.  Such a surface
divides through by one extensive variable to a reduced description in
specific coordinates ``eps_l = q_l / q_1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffkit import ScalarFn, grad
from .geometry import (CHART_DEGENERACY_RATIO, ChartDegenerateError,
                       ContactPoint, PhasePoint, TangentVector, best_chart)

__all__ = [
    "GeneratingFunction",
    "SubmanifoldSample",
    "GibbsDuhemReport",
    "lift_generating_function",
    "lift_phase_fn",
    "liouville_point",
    "liouville_sample",
    "legendre_point",
    "membership_residual",
    "tangent_basis",
    "gibbs_duhem_check",
    "specific_form",
    "reduced_point",
]

# Finite-difference step for tangent vectors of the parameterization, scaled
# to match the oracle used by the differentiation layer.
TANGENT_STEP = 1e-3


@dataclass
class GeneratingFunction:
    """A generating function ``Fhat(q_I, gamma_J)`` for one state surface.

    ``Fhat`` takes the concatenation of the q-values at the indices ``I``
    (ascending) followed by the gamma-values at the indices ``J`` (ascending).
    ``q_homogeneous`` declares that Fhat is homogeneous of degree 1 in its
    q_I arguments; the declaration is spot-checked at construction.
    """

    n: int
    Fhat: ScalarFn
    I: tuple = ()
    J: tuple = ()
    chart: int = 0
    q_homogeneous: bool = False
    name: str = ""

    def __post_init__(self):
        self.I = tuple(sorted(int(i) for i in self.I))
        self.J = tuple(sorted(int(j) for j in self.J))
        if not 0 <= self.chart <= self.n:
            raise ValueError(f"chart index {self.chart} out of range")
        expected = [i for i in range(self.n + 1) if i != self.chart]
        if set(self.I) & set(self.J):
            raise ValueError("I and J must be disjoint")
        if sorted(self.I + self.J) != expected:
            raise ValueError(f"I ∪ J must cover the non-chart indices {expected}, "
                             f"got I={self.I}, J={self.J}")
        if self.Fhat.dim != self.n:
            raise ValueError(f"Fhat must take {self.n} arguments "
                             f"(|I| + |J|), declared dimension {self.Fhat.dim}")
        if self.q_homogeneous:
            if not self.I:
                raise ValueError("q-homogeneity needs a nonempty I: with I = ∅ "
                                 "the surface cannot be homogeneous in q")
            self._check_q_homogeneous()

    def _check_q_homogeneous(self):
        """Verify sum_{i in I} q_i dFhat/dq_i = Fhat at a few sample points."""
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(6):
            x = rng.uniform(0.5, 1.5, self.n)
            try:
                g = grad(self.Fhat, x)
                val = float(self.Fhat(x))
            except (ValueError, ZeroDivisionError, ArithmeticError):
                continue
            radial = float(np.dot(x[:len(self.I)], g[:len(self.I)]))
            if abs(radial - val) > 1e-9 * (1.0 + abs(val)):
                raise ValueError(
                    f"generating function declared q_homogeneous but its "
                    f"degree-1 Euler residual in q_I is {radial - val:.3g} "
                    f"at {x.tolist()}")
            checked += 1
        if not checked:
            raise ValueError("could not evaluate the generating function at "
                             "any sample point to verify q-homogeneity")

    @property
    def n_params(self) -> int:
        """Parameters of the lifted surface: q_I values, p_chart, p_J values."""
        return self.n + 1


@dataclass
class SubmanifoldSample:
    """A parameter vector together with the phase point it generates."""

    params: np.ndarray
    point: PhasePoint


@dataclass
class GibbsDuhemReport:
    """Worst-case residuals of the three q-homogeneity consequences."""

    n_samples: int
    max_qp_abs: float       # max |sum_i q_i p_i|
    max_qp_rel: float       # same, relative to max(1, sum_i |q_i p_i|)
    max_beta: float         # max |beta| over finite-difference tangents
    max_w_membership: float  # membership residual of the q-scaled point

    def as_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "max_qp_abs": self.max_qp_abs,
            "max_qp_rel": self.max_qp_rel,
            "max_beta": self.max_beta,
            "max_w_membership": self.max_w_membership,
        }


def _split_params(gf: GeneratingFunction, params):
    params = [float(v) for v in params]
    if len(params) != gf.n_params:
        raise ValueError(f"expected {gf.n_params} parameters "
                         f"(q_I, p_chart, p_J), got {len(params)}")
    nI = len(gf.I)
    return params[:nI], params[nI], params[nI + 1:]


def lift_generating_function(gf: GeneratingFunction) -> ScalarFn:
    """The degree-1 lift ``F(q_I, p_c, p_J) = -p_c Fhat(q_I, p_J/(-p_c))``.

    Argument layout: q_I values (ascending index), then p_chart, then p_J
    values (ascending index).  Evaluation at p_chart = 0 raises.
    """
    nI = len(gf.I)

    def fn(x):
        qI = list(x[:nI])
        pc = x[nI]
        pJ = x[nI + 1:]
        neg_pc = -pc
        return neg_pc * gf.Fhat(qI + [pj / neg_pc for pj in pJ])

    return ScalarFn(fn, dim=gf.n + 1, name=f"lift({gf.name or gf.Fhat.name})",
                    provenance=gf.Fhat.provenance, dual_safe=gf.Fhat.dual_safe)


def lift_phase_fn(gf: GeneratingFunction) -> ScalarFn:
    """The lift as a function of a full (q, p) phase vector.

    Coordinates outside (q_I, p_chart, p_J) are ignored, so the result is a
    genuine degree-1 function on the whole bundle, convenient for Euler
    residual sweeps with :func:`ltk.geometry.euler_residual`.
    """
    F = lift_generating_function(gf)
    m = gf.n + 1

    def fn(x):
        q = x[:m]
        p = x[m:]
        args = [q[i] for i in gf.I] + [p[gf.chart]] + [p[j] for j in gf.J]
        return F(args)

    return ScalarFn(fn, dim=2 * m, name=F.name, provenance=F.provenance,
                    dual_safe=F.dual_safe)


def liouville_point(gf: GeneratingFunction, params) -> PhasePoint:
    """Realize the surface point generated by (q_I, p_chart, p_J).

    The remaining coordinates come from the generating relations
    ``q_c = -dF/dp_c``, ``q_J = -dF/dp_J``, ``p_I = dF/dq_I``.
    """
    qI, pc, pJ = _split_params(gf, params)
    if pc == 0.0:
        raise ValueError("p_chart must be nonzero to generate a lift point")
    F = lift_generating_function(gf)
    x = qI + [pc] + pJ
    g = grad(F, x)
    nI = len(gf.I)

    q = np.empty(gf.n + 1)
    p = np.empty(gf.n + 1)
    for k, i in enumerate(gf.I):
        q[i] = qI[k]
        p[i] = g[k]                      # p_I = dF/dq_I
    q[gf.chart] = -g[nI]                 # q_c = -dF/dp_c
    p[gf.chart] = pc
    for k, j in enumerate(gf.J):
        q[j] = -g[nI + 1 + k]            # q_J = -dF/dp_J
        p[j] = pJ[k]
    return PhasePoint(q, p)


def liouville_sample(gf: GeneratingFunction, params) -> SubmanifoldSample:
    """Bundle a parameter vector with its realized phase point."""
    return SubmanifoldSample(np.asarray(params, dtype=float),
                             liouville_point(gf, params))


def legendre_point(gf: GeneratingFunction, params) -> ContactPoint:
    """Realize the chart-coordinate surface point generated by (q_I, gamma_J).

    Equals ``project(liouville_point(...), chart)`` with p_chart = -1 and
    p_J = gamma_J; computed directly from Fhat.
    """
    params = [float(v) for v in params]
    if len(params) != gf.n:
        raise ValueError(f"expected {gf.n} parameters (q_I, gamma_J), "
                         f"got {len(params)}")
    nI = len(gf.I)
    qI, gJ = params[:nI], params[nI:]
    g = grad(gf.Fhat, params)
    val = float(gf.Fhat(params))

    q = np.empty(gf.n + 1)
    gamma = np.empty(gf.n + 1)           # indexed by coordinate, chart unused
    for k, i in enumerate(gf.I):
        q[i] = qI[k]
        gamma[i] = g[k]                  # gamma_I = dFhat/dq_I
    q[gf.chart] = val - sum(gJ[k] * g[nI + k] for k in range(len(gf.J)))
    for k, j in enumerate(gf.J):
        q[j] = -g[nI + k]                # q_J = -dFhat/dgamma_J
        gamma[j] = gJ[k]
    packed = np.array([gamma[j] for j in range(gf.n + 1) if j != gf.chart])
    return ContactPoint(gf.chart, q, packed)


def membership_residual(gf: GeneratingFunction, pt: PhasePoint) -> np.ndarray:
    """Defect of the generating relations at ``pt``; zero iff pt is on the lift.

    Component order: the chart relation ``q_c + dF/dp_c``, then
    ``q_J + dF/dp_J`` (ascending), then ``p_I - dF/dq_I`` (ascending).
    """
    if len(pt.q) != gf.n + 1:
        raise ValueError(f"point dimension {len(pt.q)} does not match n={gf.n}")
    pc = pt.p[gf.chart]
    if abs(pc) < CHART_DEGENERACY_RATIO * np.max(np.abs(pt.p)):
        raise ChartDegenerateError(gf.chart, best_chart(pt))
    F = lift_generating_function(gf)
    x = [pt.q[i] for i in gf.I] + [pc] + [pt.p[j] for j in gf.J]
    g = grad(F, x)
    nI = len(gf.I)

    out = [pt.q[gf.chart] + g[nI]]
    for k, j in enumerate(gf.J):
        out.append(pt.q[j] + g[nI + 1 + k])
    for k, i in enumerate(gf.I):
        out.append(pt.p[i] - g[k])
    return np.array(out)


def tangent_basis(gf: GeneratingFunction, params) -> list:
    """Finite-difference tangent vectors of the parameterization at ``params``.

    One Richardson-extrapolated central difference of :func:`liouville_point`
    per parameter: combining the full-step and half-step quotients as
    ``(4 D(h/2) - D(h)) / 3`` cancels the O(h^2) truncation term, leaving
    O(h^4) + O(eps/h) error — around 1e-12 at the default step.  The vectors
    span the tangent space of the lifted surface and feed the one-form
    vanishing checks.
    """
    params = [float(v) for v in params]

    def quotient(k: int, h: float):
        plus = list(params)
        minus = list(params)
        plus[k] = params[k] + h
        minus[k] = params[k] - h
        a = liouville_point(gf, plus)
        b = liouville_point(gf, minus)
        return (a.q - b.q) / (2.0 * h), (a.p - b.p) / (2.0 * h)

    out = []
    for k, v in enumerate(params):
        h = TANGENT_STEP * max(1.0, abs(v))
        q_full, p_full = quotient(k, h)
        q_half, p_half = quotient(k, 0.5 * h)
        out.append(TangentVector((4.0 * q_half - q_full) / 3.0,
                                 (4.0 * p_half - p_full) / 3.0))
    return out


def gibbs_duhem_check(gf: GeneratingFunction, samples) -> GibbsDuhemReport:
    """Check the three consequences of q-homogeneity on sampled members.

    For each parameter vector: (a) the Euler pairing ``sum_i q_i p_i``,
    (b) ``beta`` on the finite-difference tangent basis, and (c) the
    membership residual of the base-scaled point ``(2q, p)`` — a finite test
    of tangency of the base Euler field W.  Requires the generating function
    to be declared q_homogeneous (with nonempty I).
    """
    if not gf.q_homogeneous:
        raise ValueError("gibbs_duhem_check requires a generating function "
                         "declared q_homogeneous")
    max_qp = 0.0
    max_qp_rel = 0.0
    max_beta = 0.0
    max_w = 0.0
    count = 0
    for params in samples:
        pt = liouville_point(gf, params)
        qp = float(np.dot(pt.q, pt.p))
        scale = max(1.0, float(np.sum(np.abs(pt.q * pt.p))))
        max_qp = max(max_qp, abs(qp))
        max_qp_rel = max(max_qp_rel, abs(qp) / scale)
        for v in tangent_basis(gf, params):
            max_beta = max(max_beta, abs(float(np.dot(pt.q, v.vp))))
        scaled = PhasePoint(2.0 * pt.q, pt.p)
        max_w = max(max_w, float(np.max(np.abs(membership_residual(gf, scaled)))))
        count += 1
    return GibbsDuhemReport(count, max_qp, max_qp_rel, max_beta, max_w)


def _require_specific_shape(gf: GeneratingFunction):
    if gf.chart != 0 or gf.J or gf.I != tuple(range(1, gf.n + 1)):
        raise ValueError("specific coordinates need chart 0, I = {1..n}, J = ∅")
    if not gf.q_homogeneous:
        raise ValueError("specific coordinates need a q_homogeneous "
                         "generating function")


def specific_form(gf: GeneratingFunction) -> ScalarFn:
    """Divide a degree-1 generating function through by q_1.

    Returns ``Fbar(eps_2, ..., eps_n) = Fhat(1, eps_2, ..., eps_n)``, the
    per-unit-q_1 (specific) form; the identity
    ``Fhat(q_1..q_n) = q_1 Fbar(q_2/q_1, ...)`` holds wherever q_1 > 0.
    """
    _require_specific_shape(gf)

    def fn(eps):
        return gf.Fhat([1.0] + list(eps))

    return ScalarFn(fn, dim=gf.n - 1, name=f"specific({gf.name or gf.Fhat.name})",
                    provenance=gf.Fhat.provenance, dual_safe=gf.Fhat.dual_safe)


def reduced_point(gf: GeneratingFunction, params) -> np.ndarray:
    """The reduced-surface point generated by q_I = (q_1, ..., q_n).

    Returns the packed vector ``[eps_0, eps_2..eps_n, gamma_1..gamma_n]``
    where ``eps_l = q_l / q_1`` and

        eps_0   = Fbar(eps)
        gamma_1 = Fbar - sum_l eps_l dFbar/deps_l
        gamma_j = dFbar/deps_j                       (j >= 2).
    """
    _require_specific_shape(gf)
    params = [float(v) for v in params]
    if len(params) != gf.n:
        raise ValueError(f"expected {gf.n} parameters (q_1..q_n), got {len(params)}")
    q1 = params[0]
    if abs(q1) < 1e-12 * max(1.0, max(abs(v) for v in params)):
        raise ValueError("q_1 is below the reduction threshold; specific "
                         "coordinates divide by q_1")
    eps = [v / q1 for v in params[1:]]
    Fbar = specific_form(gf)
    val = float(Fbar(eps))
    g = grad(Fbar, eps) if eps else np.zeros(0)
    gamma = np.empty(gf.n)
    gamma[0] = val - float(np.dot(eps, g))
    gamma[1:] = g
    return np.concatenate([[val], eps, gamma])
