"""Finite-difference Hamiltonians and a Sturm-bisection eigensolver.

``H = -d^2/dx^2 + V`` is discretized with second-order central differences
and Dirichlet conditions at the truncation points.  Physics checks compare
Richardson-extrapolated eigenvalues from grids with spacing ``h`` and ``h/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import catalog
from .catalog import FamilyId, FamilyParams
from .errors import NonHermitianFamily, PoleOnGrid, SingularFamilyParams
from .grid import Grid
from .potentials import LadderEntry, deformed_pair, extract_R, full_superpotential, zero_mode

MIN_POINTS = 64
EIGEN_TOL = 1e-10


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must be one shorter than diag")

    @property
    def dimension(self) -> int:
        return len(self.diag)

    @cached_property
    def _lists(self):
        return list(map(float, self.diag)), list(map(float, np.square(self.offdiag)))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def discretize(v, grid: Grid) -> TridiagonalOperator:
    """Central-difference matrix of ``-d^2/dx^2 + V`` on the grid's interior points.

    Raises:
        PoleOnGrid: if some potential sample is not finite.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} potential samples, got shape {v.shape}")
    if grid.n < MIN_POINTS:
        raise ValueError(f"spectral grids need at least {MIN_POINTS} points, got {grid.n}")
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        raise PoleOnGrid(f"potential has a pole at x={grid.points[bad[0]]:.6g}", bad)
    inv_h2 = 1.0 / grid.h**2
    return TridiagonalOperator(2.0 * inv_h2 + v, np.full(grid.n - 1, -inv_h2))


def sturm_count(op: TridiagonalOperator, shift: float) -> int:
    """Number of eigenvalues strictly below ``shift`` (negative LDL^T pivots)."""
    diag, off2 = op._lists
    pivmin = 1e-300 * max(1.0, max(off2, default=1.0))
    q = diag[0] - shift
    count = 0
    if q < 0:
        count = 1
    elif q == 0:
        q = -pivmin
        count = 1
    for di, e2 in zip(diag[1:], off2):
        q = di - shift - e2 / q
        if q < 0:
            count += 1
        elif q == 0:
            q = -pivmin
            count += 1
    return count


def _gershgorin(op: TridiagonalOperator) -> tuple[float, float]:
    radius = np.zeros(op.dimension)
    radius[:-1] += np.abs(op.offdiag)
    radius[1:] += np.abs(op.offdiag)
    return float(np.min(op.diag - radius)), float(np.max(op.diag + radius))


def lowest_eigenvalues(op: TridiagonalOperator, k: int, tol: float = EIGEN_TOL) -> np.ndarray:
    """The ``k`` algebraically smallest eigenvalues, each bisected to width ``tol``."""
    n = op.dimension
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, top = _gershgorin(op)
    # grow the bracket from below; Gershgorin's top is very loose for stiff potentials
    width = 1.0
    hi = min(lo + width, top)
    while hi < top and sturm_count(op, hi) < k:
        width *= 2.0
        hi = min(lo + width, top)
    lower = np.full(k, lo)
    upper = np.full(k, hi)
    for j in range(k):
        a, b = lower[j], upper[j]
        while b - a > tol:
            mid = 0.5 * (a + b)
            if not a < mid < b:
                break
            c = sturm_count(op, mid)
            # every count tightens the brackets of all wanted eigenvalues
            upper[:c] = np.minimum(upper[:c], mid)
            lower[c:] = np.maximum(lower[c:], mid)
            a, b = lower[j], upper[j]
        lower[j], upper[j] = a, b
    return 0.5 * (lower + upper)


def richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Cancel the ``h^2`` error term using spacings ``h`` and ``h/2``."""
    return (4.0 * np.asarray(fine) - np.asarray(coarse)) / 3.0


def rayleigh_quotient(op: TridiagonalOperator, psi: np.ndarray) -> float:
    return float(psi @ op.matvec(psi) / (psi @ psi))


def default_grid(family, params: FamilyParams, n: int = 8192, length: float = 20.0) -> Grid:
    """Truncate infinite ends at ``+-length``; finite ends are used as they are."""
    a, b = catalog.domain(family, params).truncated(length)
    return Grid(a, b, n)


@dataclass
class SpectralReport:
    energies: np.ndarray
    energies_tilde: np.ndarray
    pairing_defects: np.ndarray
    ladder_defects: np.ndarray = field(default_factory=lambda: np.zeros(0))
    unbroken: bool = True
    grid: Grid | None = None
    raw: dict = field(default_factory=dict)

    def passes(self, tol: float) -> bool:
        ok = bool(np.all(self.pairing_defects < tol))
        if self.unbroken:
            ok = ok and abs(float(self.energies[0])) < tol
        return ok


def _require_free(family: FamilyId, params: FamilyParams, rung: int | None = None) -> None:
    if not family.info.hermitian:
        raise NonHermitianFamily(f"{family.cli_name} is non-Hermitian; no real spectrum")
    verdict = catalog.singularity_verdict(family, params)
    if not verdict:
        where = f"rung {rung} (m={params.m:g})" if rung is not None else f"m={params.m:g}"
        raise SingularFamilyParams(
            f"{family.cli_name} is singular at {where}: pole near x={verdict.witness:.6g}",
            rung=rung,
        )


def _extrapolated(family, params, grid, k, which, tol):
    out = []
    for g in (grid, grid.refine()):
        pair = deformed_pair(family, params, g).pair
        v = pair.v if which == "v" else pair.v_tilde
        out.append(lowest_eigenvalues(discretize(v, g), k, tol))
    return richardson(*out), out


def partner_spectrum_check(family, params: FamilyParams, grid: Grid, k: int = 4,
                           tol: float = EIGEN_TOL) -> SpectralReport:
    """Spectra of the discretized partner Hamiltonians and their pairing.

    With a normalizable zero mode the partner spectrum should equal the
    original one without its ground level (zero); otherwise the two should
    coincide level by level.

    Raises:
        SingularFamilyParams: parameters with a pole inside the domain, or
            the non-Hermitian family.
    """
    family = FamilyId.parse(family)
    _require_free(family, params)
    energies, raw_v = _extrapolated(family, params, grid, k, "v", tol)
    energies_t, raw_vt = _extrapolated(family, params, grid, k, "vt", tol)
    zm = zero_mode(lambda x: full_superpotential(family, params, x), grid)
    if zm.normalizable:
        defects = np.abs(energies_t[:-1] - energies[1:])
    else:
        defects = np.abs(energies_t - energies)
    return SpectralReport(
        energies, energies_t, defects, unbroken=zm.normalizable, grid=grid,
        raw={"v": raw_v, "v_tilde": raw_vt, "zero_mode_tail": zm.tail_fraction},
    )


def ladder_check(family, params: FamilyParams, depth: int, grid: Grid, k: int = 4,
                 tol: float = EIGEN_TOL) -> list[LadderEntry]:
    """Walk ``m, m-1, ..., m-depth`` and confirm each rung spectrally.

    For rung ``j`` the spectrum of the partner Hamiltonian at ``m-j`` must be
    the spectrum of the original one at ``m-j-1`` shifted by the measured R.

    Raises:
        SingularFamilyParams: naming the first rung whose parameters are singular.
    """
    family = FamilyId.parse(family)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0:
        return []
    for j in range(depth + 1):
        _require_free(family, params.shifted(-j), rung=j)
    entries = []
    for j in range(depth):
        upper = params.shifted(-j)
        entry = extract_R(family, upper, grid)
        e_tilde, _ = _extrapolated(family, upper, grid, k, "vt", tol)
        e_lower, _ = _extrapolated(family, upper.shifted(-1), grid, k, "v", tol)
        shift = e_tilde - e_lower
        entry.spectral_shift = float(np.mean(shift))
        entry.spectral_defect = float(np.max(np.abs(shift - entry.R)))
        entries.append(entry)
    return entries
