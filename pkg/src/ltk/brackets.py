"""Poisson brackets of phase functions and their chart-coordinate form.

The bracket convention used throughout is

    {K1, K2} = sum_i (dK1/dp_i dK2/dq_i - dK1/dq_i dK2/dp_i)

which pairs with the canonical field of :mod:`ltk.dynamics` so that
``[X_K1, X_K2] = X_{K1, K2}`` — the correspondence is itself a library check
(:func:`correspondence_residual`) rather than an assumption.

Brackets interact with fiber homogeneity by degree counting: the bracket of
degree-a and degree-b functions is homogeneous of degree a + b - 1.  In
particular degree-1 generators are closed under the bracket, and the bracket
of a degree-1 with a degree-0 function is again degree 0.  For pairs of
degree-0 functions built from chart ratios or from the base alone the bracket
vanishes; :func:`degree_check` measures all three statements on samples.

Chart coordinates inherit a bracket by conjugation with the chart
correspondence: homogenize both operands, bracket, then read the result back
in the chart (:func:`jacobi`, with :func:`jacobi_fn` the function-valued
form).  The result is a well-defined bracket on chart functions but it is not
a derivation in each slot — the product rule fails by a measurable defect
(:func:`leibniz_defect`) whenever the first operand is not the restriction of
a degree-1 function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffkit import ScalarFn, grad
from .dynamics import lie_bracket_fd, phase_rhs
from .geometry import (ContactPoint, EulerFieldKind, PhasePoint, dehomogenize,
                       euler_residual, homogenize)

__all__ = [
    "BracketReport",
    "poisson",
    "poisson_fn",
    "jacobi",
    "jacobi_fn",
    "degree_check",
    "jacobi_identity_residual",
    "leibniz_defect",
    "correspondence_residual",
]


@dataclass
class BracketReport:
    """Worst-case residuals of a sampled bracket degree statement."""

    degree1: int
    degree2: int
    expected: str             # "degree-1", "degree-0", or "zero"
    max_residual: float       # relative residual of the statement, see degree_check
    max_input_residual: float  # worst relative Euler residual of the operands
    n_samples: int


def _check_pair(K1: ScalarFn, K2: ScalarFn):
    if K1.dim != K2.dim:
        raise ValueError(f"bracket operands must share a phase space, got "
                         f"dimensions {K1.dim} and {K2.dim}")
    if K1.dim % 2:
        raise ValueError("phase-space functions need an even dimension")
    return K1.dim // 2


def poisson(K1: ScalarFn, K2: ScalarFn, pt: PhasePoint) -> float:
    """Evaluate {K1, K2} at a phase point."""
    m = _check_pair(K1, K2)
    x = pt.packed()
    g1 = grad(K1, x)
    g2 = grad(K2, x)
    return float(np.dot(g1[m:], g2[:m]) - np.dot(g1[:m], g2[m:]))


def poisson_fn(K1: ScalarFn, K2: ScalarFn) -> ScalarFn:
    """The bracket {K1, K2} as a phase function.

    The closure differentiates its operands at each call, so the result is
    marked not dual-safe: downstream gradients of it fall back to finite
    differences instead of nesting derivative passes.
    """
    m = _check_pair(K1, K2)

    def fn(x):
        xf = [float(v) for v in x]
        g1 = grad(K1, xf)
        g2 = grad(K2, xf)
        return float(np.dot(g1[m:], g2[:m]) - np.dot(g1[:m], g2[m:]))

    return ScalarFn(fn, dim=2 * m,
                    name=f"{{{K1.name or 'K1'}, {K2.name or 'K2'}}}",
                    provenance="derived", dual_safe=False)


def jacobi_fn(K1hat: ScalarFn, K2hat: ScalarFn, chart: int) -> ScalarFn:
    """The chart-coordinate bracket {K1hat, K2hat} on chart ``chart``.

    Computed by conjugation: homogenize both operands to degree-1 phase
    functions, bracket there, and restrict back to the chart.
    """
    if K1hat.dim != K2hat.dim:
        raise ValueError("chart bracket operands must share a chart space")
    B = poisson_fn(homogenize(K1hat, chart), homogenize(K2hat, chart))
    out = dehomogenize(B, chart)
    return ScalarFn(out.fn, dim=out.dim,
                    name=f"{{{K1hat.name or 'K1'}, {K2hat.name or 'K2'}}}_chart{chart}",
                    provenance="derived", dual_safe=False)


def jacobi(K1hat: ScalarFn, K2hat: ScalarFn, cpt: ContactPoint) -> float:
    """Evaluate the chart-coordinate bracket at a contact point."""
    return float(jacobi_fn(K1hat, K2hat, cpt.chart)(cpt.packed()))


def _sample_points(dim: int, n_samples: int, seed: int):
    m = dim // 2
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_samples):
        q = rng.uniform(0.6, 1.4, m)
        p = rng.uniform(0.2, 1.0, m) * rng.choice([-1.0, 1.0], m)
        out.append(PhasePoint(q, p))
    return out


def degree_check(degree1: int, degree2: int, K1: ScalarFn, K2: ScalarFn,
                 points=None, n_samples: int = 40, seed: int = 5) -> BracketReport:
    """Check the homogeneity statement for the bracket of K1 and K2.

    For declared fiber degrees (1,1) the bracket is checked to be degree 1;
    for (1,0) and (0,1), degree 0; for (0,0) the bracket value itself is
    checked to vanish (valid for chart-ratio and base-only functions, which
    is how degree-0 observables arise here).  The operands' own declared
    degrees are verified alongside and reported as ``max_input_residual``.
    Residuals are relative: Euler residuals are divided by 1 + |value|, and
    the (0,0) bracket value by 1 + |K1 K2| at the point.  Points where an
    operand is undefined are skipped.
    """
    if {degree1, degree2} - {0, 1}:
        raise ValueError("degree_check handles fiber degrees 0 and 1")
    B = poisson_fn(K1, K2)
    if points is None:
        points = _sample_points(K1.dim, n_samples, seed)
    worst = 0.0
    worst_input = 0.0
    used = 0
    for pt in points:
        try:
            r1 = euler_residual(K1, pt, degree1, wrt=EulerFieldKind.Z)
            r2 = euler_residual(K2, pt, degree2, wrt=EulerFieldKind.Z)
            in_res = max(abs(r1) / (1.0 + abs(float(K1(pt.packed())))),
                         abs(r2) / (1.0 + abs(float(K2(pt.packed())))))
            if degree1 == 0 and degree2 == 0:
                val = float(B(pt.packed()))
                scale = 1.0 + abs(float(K1(pt.packed())) * float(K2(pt.packed())))
                res = abs(val) / scale
            else:
                expected_degree = degree1 + degree2 - 1
                r = euler_residual(B, pt, expected_degree, wrt=EulerFieldKind.Z)
                res = abs(r) / (1.0 + abs(float(B(pt.packed()))))
        except (ValueError, ZeroDivisionError, ArithmeticError):
            continue
        worst = max(worst, res)
        worst_input = max(worst_input, in_res)
        used += 1
    if not used:
        raise ValueError("no sample point was evaluable for both operands")
    label = ("zero" if degree1 == degree2 == 0
             else f"degree-{degree1 + degree2 - 1}")
    return BracketReport(degree1, degree2, label, worst, worst_input, used)


def jacobi_identity_residual(K1: ScalarFn, K2: ScalarFn, K3: ScalarFn,
                             pt: PhasePoint) -> float:
    """|{{K1,K2},K3} + {{K2,K3},K1} + {{K3,K1},K2}| at a point.

    The outer brackets differentiate non-dual-safe closures, so this residual
    carries finite-difference noise of order 1e-9 on unit-scale data.
    """
    total = (poisson(poisson_fn(K1, K2), K3, pt)
             + poisson(poisson_fn(K2, K3), K1, pt)
             + poisson(poisson_fn(K3, K1), K2, pt))
    return abs(total)


def leibniz_defect(f: ScalarFn, g: ScalarFn, h: ScalarFn,
                   cpt: ContactPoint) -> float:
    """{f, g*h} - {f, g} h - g {f, h} in the chart bracket, at a contact point.

    Zero whenever f homogenizes to a bracket derivation (for instance when f
    is the restriction of a degree-1 function in the chart's own fiber slot);
    nonzero in general — the chart bracket is not a Poisson bracket.
    """
    if not (f.dim == g.dim == h.dim):
        raise ValueError("Leibniz operands must share a chart space")
    gh = ScalarFn(lambda v: g(v) * h(v), dim=g.dim, name="g*h",
                  provenance="derived",
                  dual_safe=g.dual_safe and h.dual_safe)
    chart = cpt.chart
    x = cpt.packed()
    left = float(jacobi_fn(f, gh, chart)(x))
    right = (float(jacobi_fn(f, g, chart)(x)) * float(h(x))
             + float(g(x)) * float(jacobi_fn(f, h, chart)(x)))
    return left - right


def correspondence_residual(K1: ScalarFn, K2: ScalarFn, pt: PhasePoint) -> float:
    """Max-abs defect of [X_K1, X_K2] = X_{K1,K2} at a point.

    The left side is a finite-difference Lie bracket of the two canonical
    fields; the right side is the canonical field of the bracket function.
    """
    _check_pair(K1, K2)
    f1 = phase_rhs(K1)
    f2 = phase_rhs(K2)
    fb = phase_rhs(poisson_fn(K1, K2))
    x = pt.packed()
    lhs = lie_bracket_fd(lambda v: f1(0.0, v), lambda v: f2(0.0, v), x)
    rhs = fb(0.0, x)
    return float(np.max(np.abs(lhs - rhs)))
