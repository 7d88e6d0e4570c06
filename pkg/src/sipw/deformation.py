"""Bernoulli machinery behind the deformation terms and residuals of every condition.

A deformation term solves ``W' + W^2 - k1 W = 0``.  Writing
``F = integral of exp(integral of k1)``, the general solution is
``W = c1 F' / (c2 + c1 F)``; only the ratio ``p = c2/c1`` matters, and with
``W1+ = F'/(p + F)``, ``W1- = F'/(q + F)`` the algebraic compatibility
condition becomes linear in ``(p, q)``::

    p (k1 - 2 W0) + q (k1 + 2 W0) = 2 F' - 2 k1 F

which is what :func:`solve_constants` exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import catalog
from .catalog import FamilyId, FamilyParams
from .errors import (
    BlowUp,
    DegenerateDenominator,
    NoNontrivialSolution,
    PoleError,
    QuadratureFailure,
)
from .grid import Grid

BLOWUP = 1e12


# ------------------------------------------------------------------ numeric ODE


def _rk4_step(f, x, w, h):
    k1 = f(x, w)
    k2 = f(x + h / 2, w + h / 2 * k1)
    k3 = f(x + h / 2, w + h / 2 * k2)
    k4 = f(x + h, w + h * k3)
    return w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def bernoulli_solve_numeric(
    k1: Callable[[float], float], x0: float, w0_init: float, grid: Grid
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``W' = k1 W - W^2`` from ``W(x0) = w0_init`` onto every grid point.

    Classical RK4 marches outward from ``x0`` in both directions with the grid
    spacing (the first step to the nearest node is shorter).

    Returns:
        ``(x, W)`` arrays over the grid points.

    Raises:
        BlowUp: when ``|W|`` exceeds 1e12, i.e. the trajectory crossed a pole.
    """
    xs = grid.points
    if not grid.a <= x0 <= grid.b:
        raise ValueError(f"x0={x0} outside grid range [{grid.a}, {grid.b}]")

    def rhs(x, w):
        return k1(x) * w - w * w

    out = np.empty(xs.shape, dtype=np.result_type(float, w0_init))
    right = np.flatnonzero(xs >= x0)
    left = np.flatnonzero(xs < x0)[::-1]
    for indices in (right, left):
        x, w = x0, w0_init
        for i in indices:
            target = xs[i]
            w = _rk4_step(rhs, x, w, target - x)
            x = target
            if not abs(w) < BLOWUP:
                raise BlowUp(x)
            out[i] = w
    return xs, out


# ---------------------------------------------------------------- closed form


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12,
                     max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = simpson(fa, fm, fb, a, b)
    # explicit stack keeps deep refinement off the recursion limit
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(flo, flm, fmid, lo, mid)
        right = simpson(fmid, frm, fhi, mid, hi)
        delta = left + right - est
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                raise QuadratureFailure(f"no convergence on [{lo}, {hi}]")
            total += left + right + delta / 15.0
            continue
        stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
    if not math.isfinite(total):
        raise QuadratureFailure("non-finite integrand")
    return total


@dataclass(frozen=True)
class BernoulliSolution:
    """``W = d/dx log(c2 + c1 * integral of exp(K))`` with ``K' = k1``.

    ``exp_integral`` is an antiderivative of ``exp(K)``; when omitted the
    integral is taken from ``x_ref`` by adaptive Simpson quadrature.  ``c2`` is
    relative to whichever antiderivative is in use.
    """

    c1: float
    c2: float
    k1_antiderivative: Callable[[float], float]
    exp_integral: Callable[[float], float] | None = None
    x_ref: float = 0.0


def bernoulli_closed_form(solution: BernoulliSolution, x: float) -> float:
    c1, c2 = solution.c1, solution.c2
    if c1 == 0:
        return 0.0
    slope = math.exp(solution.k1_antiderivative(x))
    if solution.exp_integral is not None:
        integral = solution.exp_integral(x)
    else:
        integral = adaptive_simpson(
            lambda y: math.exp(solution.k1_antiderivative(y)), solution.x_ref, x
        )
    arg = c2 + c1 * integral
    if abs(arg) < catalog.POLE_RTOL * (1.0 + abs(c1 * slope)):
        raise PoleError(x)
    return c1 * slope / arg


@dataclass(frozen=True)
class BernoulliBasis:
    """Per-family ``k1``, ``K = int k1``, ``F = int exp(K)`` and ``F' = exp(K)``."""

    k1: Callable
    K: Callable
    F: Callable
    dF: Callable

    def solution(self, c2_over_c1: float) -> BernoulliSolution:
        return BernoulliSolution(1.0, c2_over_c1, self.K, self.F)


def bernoulli_basis(family, params: FamilyParams) -> BernoulliBasis:
    family = FamilyId.parse(family)
    c, s = params.c, params.sign
    if family is FamilyId.SCARF_HYPERBOLIC:
        return BernoulliBasis(lambda x: c * np.tanh(c * x), lambda x: np.log(np.cosh(c * x)),
                              lambda x: np.sinh(c * x) / c, lambda x: np.cosh(c * x))
    if family is FamilyId.GEN_POSCHL_TELLER:
        return BernoulliBasis(lambda x: c / np.tanh(c * x), lambda x: np.log(np.sinh(c * x)),
                              lambda x: np.cosh(c * x) / c, lambda x: np.sinh(c * x))
    if family is FamilyId.SHIFTED_EXPONENTIAL:
        k = s * c
        return BernoulliBasis(lambda x: k + 0.0 * x, lambda x: k * x,
                              lambda x: np.exp(k * x) / k, lambda x: np.exp(k * x))
    if family is FamilyId.COMPLEX_EXPONENTIAL:
        k = 1j * s * c
        return BernoulliBasis(lambda x: k + 0.0 * x, lambda x: k * x,
                              lambda x: np.exp(k * x) / k, lambda x: np.exp(k * x))
    if family in (FamilyId.RADIAL_OSCILLATOR, FamilyId.INVERSE_M):
        return BernoulliBasis(lambda x: 1.0 / x, np.log, lambda x: x * x / 2, lambda x: x)
    if family is FamilyId.LINEAR:
        return BernoulliBasis(lambda x: 0.0 * x, lambda x: 0.0 * x,
                              lambda x: x, lambda x: 1.0 + 0.0 * x)
    if family is FamilyId.SCARF_TRIGONOMETRIC:
        return BernoulliBasis(lambda x: -c * np.tan(c * x), lambda x: np.log(np.cos(c * x)),
                              lambda x: np.sin(c * x) / c, lambda x: np.cos(c * x))
    if family is FamilyId.POSCHL_TELLER_TRIGONOMETRIC:
        return BernoulliBasis(lambda x: c / np.tan(c * x), lambda x: np.log(np.sin(c * x)),
                              lambda x: -np.cos(c * x) / c, lambda x: np.sin(c * x))
    raise AssertionError(family)


# ------------------------------------------------------------------ constants


@dataclass(frozen=True)
class ConstantRatios:
    c2_over_c1: complex | float
    c4_over_c3: complex | float

    @property
    def trivial(self) -> bool:
        """Equal ratios give ``W1+ = W1-``: the deformation cancels in ``W``."""
        return self.c2_over_c1 == self.c4_over_c3


def derive_constants(family, params: FamilyParams) -> ConstantRatios:
    """Constant ratios that make the tabulated closed forms out of ``F'/(p + F)``.

    Raises:
        NoNontrivialSolution: for the trivial-only families.
        DegenerateDenominator: when the relation divides by a vanishing ``d`` (or ``b``).
    """
    family = FamilyId.parse(family)
    catalog.validate(family, params)
    b, c, d, m = params.b, params.c, params.d, params.m
    if family is FamilyId.LINEAR:
        raise NoNontrivialSolution("linear superpotential b x + d admits no nontrivial deformation")
    if family is FamilyId.INVERSE_M:
        raise NoNontrivialSolution("superpotential b/m + m k1 admits no nontrivial deformation")
    if family in (FamilyId.SHIFTED_EXPONENTIAL, FamilyId.COMPLEX_EXPONENTIAL):
        return ConstantRatios(0.0, 0.0)
    if family is FamilyId.RADIAL_OSCILLATOR:
        if b == 0:
            raise DegenerateDenominator("radial relation divides by b")
        return ConstantRatios(-(1 + 2 * d + 2 * m) / (2 * b), (1 - 2 * d - 2 * m) / (2 * b))
    if d == 0:
        raise DegenerateDenominator(f"{family.cli_name} relation divides by d")
    scale = 2 * c * c * d
    if family is FamilyId.SCARF_HYPERBOLIC:
        return ConstantRatios((2 * b + 2 * c * c * m + c * c) / scale,
                              (2 * b + 2 * c * c * m - c * c) / scale)
    if family is FamilyId.GEN_POSCHL_TELLER:
        return ConstantRatios(-(2 * b + c * c * (2 * m + 1)) / scale,
                              (-2 * b + c * c * (1 - 2 * m)) / scale)
    # both trigonometric families share the relation
    return ConstantRatios((2 * b - c * c * (2 * m + 1)) / scale,
                          (2 * b + c * c * (1 - 2 * m)) / scale)


def _generic_points(family: FamilyId, params: FamilyParams, count: int) -> np.ndarray:
    lo, hi = catalog.domain(family, params).truncated(4.0)
    fractions = (np.sqrt(2) - 1, (np.sqrt(5) - 1) / 2, 1 / np.e, np.pi - 3, 0.8731, 0.2219,
                 0.5557, 0.9321, 0.0713, 0.3877)
    return lo + (hi - lo) * np.asarray(fractions[:count])


def solve_constants(family, params: FamilyParams, *, rtol: float = 1e-8) -> ConstantRatios:
    """Find ``(c2/c1, c4/c3)`` from the algebraic compatibility condition alone.

    The linear system is assembled at two generic points and solved (least
    squares over all sample points when it is rank deficient); the candidate
    must then make the true condition vanish at every other sample point.
    The one-sided branches ``W1+ = 0`` or ``W1- = 0`` (which need
    ``2 W0 = +-k1`` identically) are checked as well.

    Raises:
        NoNontrivialSolution: when no candidate survives verification.
    """
    family = FamilyId.parse(family)
    catalog.validate(family, params)
    basis = bernoulli_basis(family, params)
    xs = _generic_points(family, params, 8)
    with np.errstate(all="ignore"):
        k0, k1, _, _ = catalog._base_terms(family, params, xs)
        w0 = k0 + params.m * k1
        F, dF = basis.F(xs), basis.dF(xs)
    lhs = np.stack([k1 - 2 * w0, k1 + 2 * w0], axis=1)
    rhs = 2 * dF - 2 * k1 * F

    candidates = []
    try:
        if np.linalg.cond(lhs[:2]) < 1e12:
            candidates.append(np.linalg.solve(lhs[:2], rhs[:2]))
    except np.linalg.LinAlgError:
        pass
    candidates.append(np.linalg.lstsq(lhs, rhs, rcond=None)[0])

    best = math.inf
    for p, q in candidates:
        ratios = ConstantRatios(_real_if_close(p), _real_if_close(q))
        res = _max_relative(compatibility_residual("algebraic", family, params, xs[2:],
                                                   ratios=ratios))
        best = min(best, res)
        if res < rtol:
            return ratios
    # one-sided branches leave the other constant free; report it as 0
    one_sided = ((1, ConstantRatios(math.inf, 0.0)), (-1, ConstantRatios(0.0, math.inf)))
    for sgn, ratios in one_sided:
        if np.all(np.abs(k1 - sgn * 2 * w0) <= rtol * (1 + np.abs(k1) + 2 * np.abs(w0))):
            return ratios
    raise NoNontrivialSolution(
        f"no constants satisfy the algebraic compatibility condition for {family.cli_name} "
        f"(best verification residual {best:.3g})",
        residual=best,
    )


def _real_if_close(z):
    z = complex(z)
    return z.real if abs(z.imag) <= 1e-14 * (1 + abs(z.real)) else z


# ------------------------------------------------------------------ residuals


@dataclass(frozen=True)
class ResidualSample:
    x: object
    value: object
    scale: object

    @property
    def relative(self):
        return np.abs(self.value) / np.maximum(1.0, self.scale)


def _max_relative(sample: ResidualSample) -> float:
    rel = np.asarray(sample.relative, dtype=float)
    return float(np.nanmax(rel)) if rel.size else 0.0


def deformation_from_ratios(family, params: FamilyParams, ratios: ConstantRatios, x):
    """``(W1+, W1+', W1-, W1-')`` from the general Bernoulli solution and given ratios."""
    family = FamilyId.parse(family)
    basis = bernoulli_basis(family, params)
    xa = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        k1, F, dF = basis.k1(xa), basis.F(xa), basis.dF(xa)
        out = []
        for r in (ratios.c2_over_c1, ratios.c4_over_c3):
            if np.isinf(r):
                out += [0.0 * F, 0.0 * F]
                continue
            den = r + F
            pole = catalog.pole_mask(den, dF)
            w = dF / np.where(pole, np.nan, den)
            out += [w, k1 * w - w * w]
    return tuple(out)


def _terms(family, params, x, ratios):
    x = np.asarray(x, dtype=float)
    if ratios is None:
        wp, dwp, wm, dwm = catalog.deformation_derivatives(family, params, x, allow_complex=True)
    else:
        catalog.validate(FamilyId.parse(family), params)
        wp, dwp, wm, dwm = deformation_from_ratios(family, params, ratios, x)
    parts = catalog.superpotential_parts(family, params, x, allow_complex=True)
    return x, parts, wp, dwp, wm, dwm


def _pole_guard(x, *arrays):
    bad = np.zeros(np.shape(x), dtype=bool)
    for a in arrays:
        bad |= np.isnan(a)
    if np.ndim(x) == 0 and bad:
        raise PoleError(float(x))
    return bad


def bernoulli_residual(family, params: FamilyParams, x, which: Literal["plus", "minus"] = "plus",
                       ratios: ConstantRatios | None = None) -> ResidualSample:
    """Residual of ``W' + W^2 - k1 W`` for one deformation term (analytic ``W'``)."""
    x, parts, wp, dwp, wm, dwm = _terms(family, params, x, ratios)
    w, dw = (wp, dwp) if which == "plus" else (wm, dwm)
    _pole_guard(x, w)
    k1 = parts.k1
    terms = (dw, w * w, k1 * w)
    value = dw + w * w - k1 * w
    return ResidualSample(x, value, _scale(terms))


def _scale(terms):
    return np.max(np.abs(np.broadcast_arrays(*terms)), axis=0)


def compatibility_residual(mode: Literal["full", "algebraic"], family, params: FamilyParams, x,
                           ratios: ConstantRatios | None = None) -> ResidualSample:
    """Residual of the compatibility condition at ``x``.

    ``full`` evaluates the differential form with analytic derivatives,
    ``algebraic`` the reduced form that assumes both terms solve the
    Bernoulli equation.  Without ``ratios`` the tabulated closed forms are used;
    with ``ratios`` the general Bernoulli solution with those constants is.

    Raises:
        PoleError: scalar ``x`` at a pole of either deformation term.
    """
    x, parts, wp, dwp, wm, dwm = _terms(family, params, x, ratios)
    _pole_guard(x, wp, wm)
    w0, k1 = parts.w0, parts.k1
    if mode == "full":
        terms = (wp * wp, dwp, wm * wm, dwm, 2 * w0 * wm, 2 * w0 * wp, 2 * wm * wp)
        value = wp * wp + dwp + wm * wm + dwm - 2 * w0 * wm + 2 * w0 * wp - 2 * wm * wp
    elif mode == "algebraic":
        terms = (2 * w0 * wp, 2 * w0 * wm, k1 * wp, k1 * wm, 2 * wm * wp)
        value = 2 * w0 * (wp - wm) + k1 * (wp + wm) - 2 * wm * wp
    else:
        raise ValueError(f"mode must be 'full' or 'algebraic', got {mode!r}")
    return ResidualSample(x, value, _scale(terms))


@dataclass(frozen=True)
class ShapeInvarianceResidual:
    """``sic3 = W1-(x, m) - W1+(x, m-1)`` and the same difference of derivatives."""

    x: object
    sic3: object
    sic2: object
    scale3: object
    scale2: object

    @property
    def relative3(self):
        return np.abs(self.sic3) / np.maximum(1.0, self.scale3)

    @property
    def relative2(self):
        return np.abs(self.sic2) / np.maximum(1.0, self.scale2)


def strong_si_residual(family, params: FamilyParams, x) -> ShapeInvarianceResidual:
    x = np.asarray(x, dtype=float)
    _, _, wm, dwm = catalog.deformation_derivatives(family, params, x, allow_complex=True)
    wp1, dwp1, _, _ = catalog.deformation_derivatives(family, params.shifted(-1), x,
                                                      allow_complex=True)
    _pole_guard(x, wm, wp1)
    return ShapeInvarianceResidual(
        x, wm - wp1, dwm - dwp1,
        np.maximum(np.abs(wm), np.abs(wp1)), np.maximum(np.abs(dwm), np.abs(dwp1)),
    )


def max_relative(sample) -> float:
    """Largest finite relative residual of a vectorized residual sample."""
    return _max_relative(sample)
