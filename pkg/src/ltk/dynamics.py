"""Hamiltonian dynamics of degree-1 generators, with chart and reduced forms.

A generator ``K(q, p)`` that is homogeneous of degree 1 in the costate induces
the canonical field

    dq_i/dt =  dK/dp_i        dp_i/dt = -dK/dq_i

whose flow preserves both the symplectic form and the cone structure: it
commutes with costate scaling, so it descends to chart coordinates
(contact form) and — when K is additionally homogeneous of degree 1 in q —
to the doubly-reduced specific/intensive coordinates.

Each of the three fields comes in two forms: a point evaluator
(:func:`hamiltonian_field`, :func:`contact_field`, :func:`reduced_field`)
returning the tangent at one point, and a right-hand-side builder
(:func:`phase_rhs`, :func:`contact_rhs`, :func:`reduced_rhs`) returning a
callable ``f(t, x) -> ndarray`` over packed state vectors for use with
:func:`integrate`.  Integration is fixed-step RK4, chosen for determinism:
given the same inputs the trajectory is bitwise reproducible.

Packing conventions (m = n + 1 coordinates):

* phase:    ``x = [q_0..q_n, p_0..p_n]``                       (dim 2m)
* contact:  ``x = [q_0..q_n, gamma_j ascending, j != chart]``  (dim 2n+1)
* reduced:  ``x = [eps_0, eps_2..eps_n, gamma_1..gamma_n]``    (dim 2n)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffkit import ScalarFn, grad
from .geometry import (ChartDegenerateError, ContactPoint, EulerFieldKind,
                       PhasePoint, TangentVector, euler_residual)
from .submanifold import GeneratingFunction, liouville_point, membership_residual

__all__ = [
    "HamiltonianSpec",
    "Trajectory",
    "TransportReport",
    "hamiltonian_field",
    "contact_field",
    "reduced_field",
    "phase_rhs",
    "contact_rhs",
    "reduced_rhs",
    "rk4_step",
    "integrate",
    "validate_degree",
    "commutator_residual",
    "lie_bracket_fd",
    "flow_transport_check",
    "scaling_commutation_check",
    "project_contact",
    "project_reduced",
]

# Step scale for finite-difference Jacobian-vector products on vector fields.
FIELD_FD_STEP = 1e-5


@dataclass
class HamiltonianSpec:
    """A generator together with the homogeneity it is expected to have.

    ``degree`` is the declared fiber degree (1 for every generator that
    drives dynamics here).  Generators that are additionally homogeneous of
    degree 1 in the extensive variables declare ``q_degree_one=True`` and are
    then also checked against the base Euler field.
    """

    K: ScalarFn
    degree: int = 1
    q_degree_one: bool = False
    name: str = ""

    def validate(self, n_samples: int = 50, seed: int = 3) -> float:
        """Max relative Euler residual over random points; see validate_degree."""
        worst = validate_degree(self.K, degree=self.degree,
                                n_samples=n_samples, seed=seed)
        if self.q_degree_one:
            worst = max(worst, validate_degree(
                self.K, degree=1, n_samples=n_samples, seed=seed,
                wrt=EulerFieldKind.W))
        return worst


def _scalar_fn(K) -> ScalarFn:
    """Accept either a bare ScalarFn or a HamiltonianSpec wrapper."""
    return K.K if isinstance(K, HamiltonianSpec) else K


@dataclass
class Trajectory:
    """A fixed-step trajectory with optional per-step monitor channels."""

    t: np.ndarray
    x: np.ndarray                      # shape (len(t), dim)
    monitors: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]


@dataclass
class TransportReport:
    """Residuals of flow transport of a lifted surface."""

    t_end: float
    alpha_residual: float       # max |canonical one-form| on transported tangents
    membership_drift: float     # max membership residual along the trajectory


def validate_degree(K, degree: int = 1, n_samples: int = 50,
                    seed: int = 3, wrt: EulerFieldKind = EulerFieldKind.Z) -> float:
    """Max relative Euler residual of K over random sample points.

    Points are drawn with q in (0.6, 1.4) and |p_i| in (0.2, 1.0) so that
    chart divisions stay well-conditioned; points where K is undefined are
    skipped.  Raises if fewer than half the samples are evaluable.
    """
    K = _scalar_fn(K)
    if K.dim % 2:
        raise ValueError("phase-space functions need an even dimension")
    m = K.dim // 2
    rng = np.random.default_rng(seed)
    worst = 0.0
    evaluated = 0
    for _ in range(n_samples):
        q = rng.uniform(0.6, 1.4, m)
        p = rng.uniform(0.2, 1.0, m) * rng.choice([-1.0, 1.0], m)
        pt = PhasePoint(q, p)
        try:
            r = euler_residual(K, pt, degree, wrt=wrt)
            val = float(K(pt.packed()))
        except (ValueError, ZeroDivisionError, ArithmeticError):
            continue
        worst = max(worst, abs(r) / (1.0 + abs(val)))
        evaluated += 1
    if evaluated < n_samples // 2:
        raise ValueError(f"could only evaluate K at {evaluated}/{n_samples} "
                         f"sample points; adjust the sampling domain")
    return worst


def phase_rhs(K):
    """The canonical field of K as ``f(t, x)`` over packed phase vectors."""
    K = _scalar_fn(K)
    if K.dim % 2:
        raise ValueError("phase-space functions need an even dimension")
    m = K.dim // 2

    def f(t, x):
        g = grad(K, x)
        return np.concatenate([g[m:], -g[:m]])

    return f


def hamiltonian_field(K, pt: PhasePoint) -> TangentVector:
    """The canonical field of K at one point: vq = dK/dp, vp = -dK/dq."""
    K = _scalar_fn(K)
    x = pt.packed()
    if K.dim != len(x):
        raise ValueError(f"K expects dimension {K.dim}, point has {len(x)}")
    m = len(pt.q)
    g = grad(K, x)
    return TangentVector(g[m:], -g[:m])


def contact_rhs(Khat: ScalarFn, chart: int):
    """The chart-coordinate form of the canonical field, as ``f(t, x)``.

    ``Khat`` takes a packed contact vector (all q, then gamma ascending with
    the chart index omitted).  With s the chart coordinate and the sums over
    the non-chart indices j:

        dq_s/dt     = sum_j gamma_j dKhat/dgamma_j - Khat
        dq_j/dt     = dKhat/dgamma_j
        dgamma_j/dt = -dKhat/dq_j - gamma_j dKhat/dq_s
    """
    if Khat.dim % 2 == 0 or Khat.dim < 3:
        raise ValueError("contact functions need an odd dimension >= 3")
    m = (Khat.dim + 1) // 2
    if not 0 <= chart < m:
        raise ValueError(f"chart index {chart} out of range")
    others = [j for j in range(m) if j != chart]

    def f(t, x):
        g = grad(Khat, x)
        val = float(Khat(x))
        gamma = x[m:]
        g_q, g_gamma = g[:m], g[m:]
        dq = np.empty(m)
        dq[others] = g_gamma
        dq[chart] = float(np.dot(gamma, g_gamma)) - val
        dgamma = -g_q[others] - gamma * g_q[chart]
        return np.concatenate([dq, dgamma])

    return f


def contact_field(Khat: ScalarFn, cpt: ContactPoint):
    """The contact-chart field at one point; returns (dq/dt, dgamma/dt)."""
    x = cpt.packed()
    if Khat.dim != len(x):
        raise ValueError(f"Khat expects dimension {Khat.dim}, point has {len(x)}")
    dx = contact_rhs(Khat, cpt.chart)(0.0, x)
    m = len(cpt.q)
    return dx[:m], dx[m:]


def reduced_rhs(Kbar: ScalarFn):
    """The specific-coordinate form of the canonical field, as ``f(t, x)``.

    ``Kbar(eps, gamma)`` is the doubly-reduced generator over the packed
    vector ``[eps_0, eps_2..eps_n, gamma_1..gamma_n]``; eps are the
    extensive ratios q_j/q_1 (j != 1) and gamma the intensive ratios
    p_j/(-p_0) (j != 0).  Writing

        A = sum_l gamma_l dKbar/dgamma_l - Kbar
        B = dKbar/dgamma_1
        C = dKbar/deps_0
        D = Kbar - sum_l eps_l dKbar/deps_l

    the reduced motion — the exact projection of the full canonical field
    when the generator is homogeneous in both q and p — is

        deps_0/dt   = A - eps_0 B
        deps_j/dt   = dKbar/dgamma_j - eps_j B      (j >= 2)
        dgamma_1/dt = -D - gamma_1 C
        dgamma_j/dt = -dKbar/deps_j - gamma_j C     (j >= 2).
    """
    if Kbar.dim % 2 or Kbar.dim < 2:
        raise ValueError("reduced generators need an even dimension >= 2")
    n = Kbar.dim // 2

    def f(t, x):
        g = grad(Kbar, x)
        val = float(Kbar(x))
        eps, gamma = x[:n], x[n:]
        g_eps, g_gamma = g[:n], g[n:]
        A = float(np.dot(gamma, g_gamma)) - val
        B = g_gamma[0]
        C = g_eps[0]
        D = val - float(np.dot(eps, g_eps))
        deps = np.empty(n)
        deps[0] = A - eps[0] * B
        deps[1:] = g_gamma[1:] - eps[1:] * B
        dgamma = np.empty(n)
        dgamma[0] = -D - gamma[0] * C
        dgamma[1:] = -g_eps[1:] - gamma[1:] * C
        return np.concatenate([deps, dgamma])

    return f


def reduced_field(Kbar: ScalarFn, eps, gamma):
    """The reduced field at one point; returns (deps/dt, dgamma/dt)."""
    eps = np.asarray(eps, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if eps.size != gamma.size:
        raise ValueError("eps and gamma must have equal length")
    dx = reduced_rhs(Kbar)(0.0, np.concatenate([eps, gamma]))
    n = eps.size
    return dx[:n], dx[n:]


def rk4_step(f, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of size dt."""
    k1 = f(t, x)
    k2 = f(t + dt / 2.0, x + (dt / 2.0) * k1)
    k3 = f(t + dt / 2.0, x + (dt / 2.0) * k2)
    k4 = f(t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(f, x0, t_end: float, dt: float, monitors=None) -> Trajectory:
    """Fixed-step RK4 integration of ``f(t, x)`` from 0 to t_end.

    ``t_end`` must be an integer multiple of ``dt`` (the grid is t_i = i*dt).
    ``monitors`` is an iterable of (name, fn) pairs with ``fn(t, x)`` scalar,
    recorded at every grid point including t = 0.  A non-finite state aborts
    with the offending time in the message.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = round(t_end / dt)
    if steps < 0 or abs(steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError(f"t_end={t_end} is not an integer multiple of dt={dt}")
    x = np.asarray(x0, dtype=float).copy()
    monitors = list(monitors or [])

    ts = np.empty(steps + 1)
    xs = np.empty((steps + 1, x.size))
    mon = {name: np.empty(steps + 1) for name, _ in monitors}

    def record(i, t, xi):
        ts[i] = t
        xs[i] = xi
        for name, fn in monitors:
            mon[name][i] = float(fn(t, xi))

    record(0, 0.0, x)
    for i in range(1, steps + 1):
        t_prev = (i - 1) * dt
        x = rk4_step(f, t_prev, x, dt)
        if not np.all(np.isfinite(x)):
            raise RuntimeError(f"integration produced a non-finite state at "
                               f"t={i * dt:g} (step {i})")
        record(i, i * dt, x)
    return Trajectory(ts, xs, mon)


def lie_bracket_fd(X, Y, x) -> np.ndarray:
    """Finite-difference Lie bracket [X, Y](x) = DY·X - DX·Y.

    ``X`` and ``Y`` map state vectors to state vectors.  Each Jacobian-vector
    product uses a central difference along the evaluated direction with step
    ``1e-5 * (1 + |x|)`` scaled by the direction's magnitude.
    """
    x = np.asarray(x, dtype=float)
    h0 = FIELD_FD_STEP * (1.0 + float(np.max(np.abs(x))))

    def jvp(F, d):
        scale = float(np.max(np.abs(d)))
        if scale == 0.0:
            return np.zeros_like(x)
        h = h0 / scale
        return (np.asarray(F(x + h * d)) - np.asarray(F(x - h * d))) / (2.0 * h)

    Xx = np.asarray(X(x))
    Yx = np.asarray(Y(x))
    return jvp(Y, Xx) - jvp(X, Yx)


def commutator_residual(K, pt: PhasePoint,
                        kind: EulerFieldKind = EulerFieldKind.Z) -> np.ndarray:
    """The bracket [X_K, E] at pt, with E the fiber (Z) or base (W) Euler field.

    Vanishes identically when K has the matching homogeneity (fiber degree 1
    for Z; base degree 1 for W).  Returned as a packed phase vector of
    residual components.
    """
    K = _scalar_fn(K)
    m = K.dim // 2
    XK = phase_rhs(K)

    def X(x):
        return XK(0.0, x)

    if kind is EulerFieldKind.Z:
        def E(x):
            return np.concatenate([np.zeros(m), x[m:]])
    else:
        def E(x):
            return np.concatenate([x[:m], np.zeros(m)])

    return lie_bracket_fd(X, E, pt.packed())


def flow_transport_check(gf: GeneratingFunction, K, t_end: float,
                         sample_grid, dt: float = 1e-3) -> TransportReport:
    """Transport lifted surface members along the flow of K; measure defects.

    ``sample_grid`` is an iterable of parameter vectors.  The flow of a
    fiber-degree-1 K maps Liouville surfaces to Liouville surfaces, so the
    canonical one-form must stay zero on transported tangent vectors
    (``alpha_residual``, estimated by flowing finite-difference parameter
    perturbations of each grid member).  When K additionally vanishes on the
    surface, the surface is invariant and the membership residual of the
    original generating relations stays small along every trajectory
    (``membership_drift``).  Both reported numbers are maxima over the grid.
    """
    K = _scalar_fn(K)
    f = phase_rhs(K)
    m = gf.n + 1

    def flow_from(par):
        x0 = liouville_point(gf, par).packed()
        return integrate(f, x0, t_end, dt)

    drift = 0.0
    alpha_res = 0.0
    for params in sample_grid:
        params = [float(v) for v in params]
        base = flow_from(params)
        for x in base.x:
            res = membership_residual(gf, PhasePoint(x[:m], x[m:]))
            drift = max(drift, float(np.max(np.abs(res))))

        xf = base.final
        for k, v in enumerate(params):
            h = 1e-5 * max(1.0, abs(v))
            plus = list(params)
            minus = list(params)
            plus[k] = v + h
            minus[k] = v - h
            va = flow_from(plus).final
            vb = flow_from(minus).final
            tangent = (va - vb) / (2.0 * h)
            alpha_res = max(alpha_res, abs(float(np.dot(xf[m:], tangent[:m]))))
    return TransportReport(t_end, alpha_res, drift)


def scaling_commutation_check(K, pt: PhasePoint, lam: float,
                              t_end: float, dt: float = 1e-3) -> float:
    """Distance between flow-then-scale and scale-then-flow at t_end.

    Costate scaling acts by (q, p) -> (q, lam*p).  For a fiber-degree-1 K the
    two final states agree; the returned sup-norm distance is a quantitative
    homogeneity check of the *dynamics* rather than of K's values.
    """
    if lam == 0.0:
        raise ValueError("scaling factor must be nonzero")
    K = _scalar_fn(K)
    m = K.dim // 2
    f = phase_rhs(K)

    a = integrate(f, pt.packed(), t_end, dt).final.copy()
    a[m:] *= lam                       # flow, then scale

    x0 = pt.packed().copy()
    x0[m:] *= lam
    b = integrate(f, x0, t_end, dt).final   # scale, then flow
    return float(np.max(np.abs(a - b)))


def project_contact(x: np.ndarray, chart: int) -> np.ndarray:
    """Pack a phase vector into chart coordinates [q, gamma (j != chart)]."""
    x = np.asarray(x, dtype=float)
    m = x.size // 2
    q, p = x[:m], x[m:]
    pc = p[chart]
    if abs(pc) < 1e-12 * float(np.max(np.abs(p))):
        raise ChartDegenerateError(chart, int(np.argmax(np.abs(p))))
    gamma = np.array([p[j] / -pc for j in range(m) if j != chart])
    return np.concatenate([q, gamma])


def project_reduced(x: np.ndarray) -> np.ndarray:
    """Pack a phase vector into specific coordinates.

    Divides q by q_1 and p by -p_0, returning
    ``[eps_0, eps_2..eps_n, gamma_1..gamma_n]``; q_1 and p_0 must be safely
    away from zero.
    """
    x = np.asarray(x, dtype=float)
    m = x.size // 2
    q, p = x[:m], x[m:]
    if abs(q[1]) < 1e-12 * max(1.0, float(np.max(np.abs(q)))):
        raise ValueError("q_1 is below the reduction threshold")
    if abs(p[0]) < 1e-12 * float(np.max(np.abs(p))):
        raise ChartDegenerateError(0, int(np.argmax(np.abs(p))))
    eps = np.concatenate([[q[0] / q[1]], q[2:] / q[1]])
    gamma = p[1:] / -p[0]
    return np.concatenate([eps, gamma])
