"""Partner potentials, the two-route deformed pair, ladder constants and zero modes.

The factorization constant is fixed to zero for deformed families.
Non-evaluable samples (poles of a deformation term) are stored as NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import catalog
from .catalog import FamilyId, FamilyParams
from .deformation import ConstantRatios, deformation_from_ratios
from .errors import ComplexFamily, PoleOnGrid, TrivialOnlyFamily
from .grid import Grid

QUADRATIC_TOL = 1e-12


@dataclass
class PotentialPair:
    grid: Grid
    v: np.ndarray
    v_tilde: np.ndarray
    epsilon: float = 0.0
    m: float = math.nan
    w: np.ndarray | None = None
    dw: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def evaluable(self) -> np.ndarray:
        return np.isfinite(self.v) & np.isfinite(self.v_tilde)


def relative_error(diff, *scales) -> np.ndarray:
    """Pointwise ``|diff| / max(1, largest |scale|)``; NaN where not evaluable."""
    scale = np.maximum(1.0, np.max(np.abs(np.broadcast_arrays(*scales)), axis=0))
    return np.abs(diff) / scale


def _relative(diff, *scales):
    rel = relative_error(diff, *scales)
    rel = rel[np.isfinite(rel)]
    return float(rel.max()) if rel.size else 0.0


def partner_identity_errors(pair: PotentialPair) -> dict[str, np.ndarray]:
    """Pointwise relative errors of ``Vt - V = 2W'`` and ``(Vt-eps) + (V-eps) = 2W^2``."""
    v, vt, eps = pair.v, pair.v_tilde, pair.epsilon
    with np.errstate(all="ignore"):
        sq, dw = pair.w * pair.w, pair.dw
        return {
            "partner_derivative": relative_error(vt - v - 2 * dw, vt, v, 2 * dw),
            "partner_quadratic": relative_error((vt - eps) + (v - eps) - 2 * sq,
                                                vt - eps, v - eps, 2 * sq),
        }


def _sample_w(w, grid: Grid):
    if callable(w):
        out = w(grid.points)
    else:
        out = w
    if isinstance(out, tuple) and len(out) == 2:
        values, deriv = out
    else:
        raise TypeError("w must give a (W, W') pair of samples")
    values = np.broadcast_to(np.asarray(values, dtype=float), grid.points.shape)
    deriv = np.broadcast_to(np.asarray(deriv, dtype=float), grid.points.shape)
    return values, deriv


def partner_pair_from_w(w, epsilon: float, grid: Grid, m: float = math.nan) -> PotentialPair:
    """Build ``V = W^2 - W' + eps`` and ``Vt = W^2 + W' + eps`` on the grid.

    Args:
        w: callable ``x -> (W, W')`` or a ``(W, W')`` tuple of samples.
        epsilon: factorization constant.
        grid: sample points.
        m: parameter value recorded in the result.
    """
    values, deriv = _sample_w(w, grid)
    with np.errstate(all="ignore"):
        sq = values * values
        pair = PotentialPair(grid, sq - deriv + epsilon, sq + deriv + epsilon, epsilon, m,
                             values, deriv)
    for name, err in partner_identity_errors(pair).items():
        finite = err[np.isfinite(err)]
        pair.residuals[name] = float(finite.max()) if finite.size else 0.0
    if pair.residuals["partner_quadratic"] > QUADRATIC_TOL:
        raise ArithmeticError(
            f"quadratic partner identity violated ({pair.residuals['partner_quadratic']:.3g})"
        )
    return pair


def _reject_complex(family: FamilyId) -> None:
    if not family.info.hermitian:
        raise ComplexFamily(f"{family.cli_name} has non-Hermitian partner potentials")


def full_superpotential(family, params: FamilyParams, x,
                        ratios: ConstantRatios | None = None):
    """``(W, W')`` for ``W = W0 + W1+ - W1-``; plain ``W0`` for the trivial-only families."""
    family = FamilyId.parse(family)
    _reject_complex(family)
    w0, dw0 = catalog.base_superpotential(family, params, x)
    if family.info.trivial_only:
        return w0, dw0
    if ratios is None:
        wp, dwp, wm, dwm = catalog.deformation_derivatives(family, params, x)
    else:
        wp, dwp, wm, dwm = deformation_from_ratios(family, params, ratios, x)
    return w0 + wp - wm, dw0 + dwp - dwm


@dataclass
class DeformedPair:
    pair: PotentialPair
    crosscheck: float
    v_route: np.ndarray
    v_tilde_route: np.ndarray

    @property
    def discrepancy(self) -> np.ndarray:
        """Pointwise relative gap between the two construction routes."""
        with np.errstate(all="ignore"):
            return np.fmax(
                relative_error(self.v_route - self.pair.v, self.v_route, self.pair.v),
                relative_error(self.v_tilde_route - self.pair.v_tilde,
                               self.v_tilde_route, self.pair.v_tilde),
            )


def deformed_pair(family, params: FamilyParams, grid: Grid,
                  ratios: ConstantRatios | None = None) -> DeformedPair:
    """Deformed partners built two ways and compared.

    Route one shifts the classical partners, ``V0 - 2 W1+'`` and
    ``Vt0 - 2 W1-'``; route two squares the full superpotential.  They agree
    exactly when the compatibility condition holds, and ``crosscheck`` is the
    largest relative discrepancy between them.
    """
    family = FamilyId.parse(family)
    _reject_complex(family)
    if family.info.trivial_only:
        raise TrivialOnlyFamily(f"{family.cli_name} has no deformed pair")
    x = grid.points
    w0, dw0 = catalog.base_superpotential(family, params, x)
    if ratios is None:
        wp, dwp, wm, dwm = catalog.deformation_derivatives(family, params, x)
    else:
        wp, dwp, wm, dwm = deformation_from_ratios(family, params, ratios, x)
    with np.errstate(all="ignore"):
        v_route = w0 * w0 - dw0 - 2 * dwp
        vt_route = w0 * w0 + dw0 - 2 * dwm
        pair = partner_pair_from_w((w0 + wp - wm, dw0 + dwp - dwm), 0.0, grid, params.m)
        cross = max(_relative(v_route - pair.v, v_route, pair.v),
                    _relative(vt_route - pair.v_tilde, vt_route, pair.v_tilde))
    pair.residuals["two_route"] = cross
    return DeformedPair(pair, cross, v_route, vt_route)


@dataclass
class LadderEntry:
    """One shape-invariance rung: ``Vt(x, m) = V(x, m-1) + R``.

    ``m`` is the upper parameter of the rung and ``R`` the measured constant
    (the value of R at ``m - 1``).
    """

    m: float
    R: float
    constancy: float
    spectral_shift: float | None = None
    spectral_defect: float | None = None

    def certified(self, rtol: float = 1e-9) -> bool:
        return self.constancy < rtol * max(1.0, abs(self.R))


def extract_R(family, params: FamilyParams, grid: Grid) -> LadderEntry:
    """Measure the shape-invariance constant as a grid mean of ``Vt(m) - V(m-1)``.

    Raises:
        PoleOnGrid: if either potential is not evaluable somewhere on the grid.
    """
    upper = deformed_pair(family, params, grid).pair
    lower = deformed_pair(family, params.shifted(-1), grid).pair
    diff = upper.v_tilde - lower.v
    bad = np.flatnonzero(~np.isfinite(diff))
    if bad.size:
        raise PoleOnGrid(
            f"potential not evaluable at {bad.size} grid points (first x={grid.points[bad[0]]:.6g})",
            bad,
        )
    return LadderEntry(params.m, float(diff.mean()), float(diff.std()))


@dataclass
class ZeroMode:
    x: np.ndarray
    psi0: np.ndarray
    normalizable: bool
    tail_fraction: float


def zero_mode(w: Callable | np.ndarray | tuple, grid: Grid, tail_tol: float = 1e-8) -> ZeroMode:
    """State annihilated by ``d/dx + W``: ``psi0 = exp(-int W)``.

    The exponent is accumulated by the trapezoidal rule and exponentiated
    after subtracting its maximum, so nothing overflows.  ``psi0`` has unit
    discrete norm.  It counts as normalizable when the outermost sample at
    each end carries less than ``tail_tol`` of the discrete square norm,
    i.e. the state has decayed before the truncation points.
    """
    x = grid.points
    values = w(x) if callable(w) else w
    if isinstance(values, tuple):
        values = values[0]
    values = np.broadcast_to(np.asarray(values, dtype=float), x.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise PoleOnGrid("superpotential not evaluable on the grid", bad)
    steps = 0.5 * (values[1:] + values[:-1]) * np.diff(x)
    log_psi = -np.concatenate([[0.0], np.cumsum(steps)])
    psi = np.exp(log_psi - log_psi.max())
    dens = psi * psi
    total = dens.sum()
    tail = max(dens[0], dens[-1]) / total
    psi /= math.sqrt(total * grid.h)
    return ZeroMode(x, psi, bool(tail < tail_tol), float(tail))
