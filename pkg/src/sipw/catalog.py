"""Closed-form catalog of the deformable translational superpotential families.

Every family is written as a classical superpotential ``W0 = k0(x) + m k1(x)``
plus a pair of deformation terms ``W1+``/``W1-`` that solve the Bernoulli
equation ``W' + W^2 - k1 W = 0``.  All evaluators are vectorized over ``x``.

Sign conventions are fixed so that the deformation terms, constant relations
and singularity thresholds below are mutually consistent:

* ``scarf_hyperbolic`` and ``gen_poschl_teller`` carry ``-d/cosh`` and
  ``-d/sinh`` in ``k0``;
* ``poschl_teller_trigonometric`` uses ``+m c cot(cx)`` (``k1 = c cot(cx)``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ComplexFamily,
    InvalidParams,
    OutOfDomain,
    TrivialOnlyFamily,
)

# |den| below POLE_RTOL * (1 + |numerator|) counts as a pole
POLE_RTOL = 1e-12


class FamilyId(str, enum.Enum):
    SCARF_HYPERBOLIC = "scarf_hyperbolic"
    GEN_POSCHL_TELLER = "gen_poschl_teller"
    SHIFTED_EXPONENTIAL = "shifted_exponential"
    RADIAL_OSCILLATOR = "radial_oscillator"
    LINEAR = "linear"
    SCARF_TRIGONOMETRIC = "scarf_trigonometric"
    POSCHL_TELLER_TRIGONOMETRIC = "poschl_teller_trigonometric"
    COMPLEX_EXPONENTIAL = "complex_exponential"
    INVERSE_M = "inverse_m"

    @classmethod
    def parse(cls, name: str | FamilyId) -> FamilyId:
        """Accept ``radial_oscillator`` as well as the CLI spelling ``radial-oscillator``."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            known = ", ".join(f.cli_name for f in cls)
            raise ValueError(f"unknown family {name!r} (expected one of: {known})") from None

    @property
    def cli_name(self) -> str:
        return self.value.replace("_", "-")

    @property
    def info(self) -> FamilyInfo:
        return FAMILIES[self]


@dataclass(frozen=True)
class FamilyInfo:
    heading: str
    domain: str
    trivial_only: bool = False
    hermitian: bool = True
    uses_c: bool = True
    uses_sign: bool = False
    note: str = ""

    @property
    def deformable(self) -> bool:
        return not self.trivial_only


FAMILIES: dict[FamilyId, FamilyInfo] = {
    FamilyId.SCARF_HYPERBOLIC: FamilyInfo(
        "(b/c) tanh(cx) - d/cosh(cx) + m c tanh(cx)",
        "(-inf, inf)",
        note="singular for every d != 0",
    ),
    FamilyId.GEN_POSCHL_TELLER: FamilyInfo(
        "(b/c) coth(cx) - d/sinh(cx) + m c coth(cx)",
        "(0, inf)",
    ),
    FamilyId.SHIFTED_EXPONENTIAL: FamilyInfo(
        "s b/c + d exp(-s c x) + s m c",
        "(-inf, inf)",
        uses_sign=True,
        note="W1+ = W1- = s c, deformation cancels",
    ),
    FamilyId.RADIAL_OSCILLATOR: FamilyInfo(
        "(b/2) x + d/x + m/x",
        "(0, inf)",
        uses_c=False,
    ),
    FamilyId.LINEAR: FamilyInfo(
        "b x + d",
        "(-inf, inf)",
        trivial_only=True,
        uses_c=False,
        note="no nontrivial deformation (b != 0)",
    ),
    FamilyId.SCARF_TRIGONOMETRIC: FamilyInfo(
        "(b/c) tan(cx) + d/cos(cx) - m c tan(cx)",
        "(-pi/(2c), pi/(2c))",
    ),
    FamilyId.POSCHL_TELLER_TRIGONOMETRIC: FamilyInfo(
        "-(b/c) cot(cx) + d/sin(cx) + m c cot(cx)",
        "(0, pi/c)",
    ),
    FamilyId.COMPLEX_EXPONENTIAL: FamilyInfo(
        "-s i b/c + d exp(-s i c x) + s m i c",
        "(-inf, inf)",
        hermitian=False,
        uses_sign=True,
        note="complex codomain, W1+ = W1- = s i c",
    ),
    FamilyId.INVERSE_M: FamilyInfo(
        "b/m + m/x  (q = b)",
        "(0, inf)",
        trivial_only=True,
        uses_c=False,
        note="no nontrivial deformation",
    ),
}

DEFORMABLE = tuple(f for f in FamilyId if f.info.deformable)
HERMITIAN_DEFORMABLE = tuple(f for f in DEFORMABLE if f.info.hermitian)


@dataclass(frozen=True)
class FamilyParams:
    """Real parameters of a family; ``m`` is translated by ``m -> m - 1``."""

    b: float = 0.0
    c: float = 1.0
    d: float = 0.0
    sign: int = 1
    m: float = 0.0

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise InvalidParams(f"sign must be +1 or -1, got {self.sign!r}")
        for name in ("b", "c", "d", "m"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"parameter {name} must be finite")

    def shifted(self, dm: float = -1.0) -> FamilyParams:
        return replace(self, m=self.m + dm)

    def with_m(self, m: float) -> FamilyParams:
        return replace(self, m=m)

    def as_dict(self) -> dict:
        return {"b": self.b, "c": self.c, "d": self.d, "sign": self.sign, "m": self.m}


def validate(family: FamilyId, params: FamilyParams) -> None:
    family = FamilyId.parse(family)
    if family.info.uses_c and not params.c > 0:
        raise InvalidParams(f"{family.cli_name} needs c > 0, got c={params.c}")
    if family is FamilyId.INVERSE_M and params.m == 0:
        raise InvalidParams("inverse-m superpotential b/m + m/x is undefined at m = 0")


@dataclass(frozen=True)
class DomainSpec:
    lower: float
    upper: float
    open: bool = True

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lower) & (x < self.upper)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def truncated(self, length: float = 20.0) -> tuple[float, float]:
        """Finite bounds: infinite ends become ``-length``/``+length``."""
        lo = self.lower if math.isfinite(self.lower) else -length
        hi = self.upper if math.isfinite(self.upper) else length
        return lo, hi

    def __str__(self) -> str:
        return f"({self.lower:g}, {self.upper:g})"


def domain(family: FamilyId, params: FamilyParams) -> DomainSpec:
    family = FamilyId.parse(family)
    inf = math.inf
    if family in (FamilyId.GEN_POSCHL_TELLER, FamilyId.RADIAL_OSCILLATOR, FamilyId.INVERSE_M):
        return DomainSpec(0.0, inf)
    if family is FamilyId.SCARF_TRIGONOMETRIC:
        half = math.pi / (2.0 * params.c)
        return DomainSpec(-half, half)
    if family is FamilyId.POSCHL_TELLER_TRIGONOMETRIC:
        return DomainSpec(0.0, math.pi / params.c)
    return DomainSpec(-inf, inf)


def _prepare(family, params, x, allow_complex):
    family = FamilyId.parse(family)
    validate(family, params)
    if not family.info.hermitian and not allow_complex:
        raise ComplexFamily(
            f"{family.cli_name} is complex valued; pass allow_complex=True"
        )
    xa = np.asarray(x, dtype=float)
    dom = domain(family, params)
    inside = dom.contains(xa)
    if not np.all(inside):
        bad = xa[~inside] if xa.ndim else xa
        raise OutOfDomain(float(np.ravel(bad)[0]), dom)
    return family, xa


def _base_terms(family: FamilyId, p: FamilyParams, x: np.ndarray):
    """Return ``(k0, k1, k0', k1')`` for the classical superpotential."""
    b, c, d, s = p.b, p.c, p.d, p.sign
    if family is FamilyId.SCARF_HYPERBOLIC:
        t, sech = np.tanh(c * x), 1.0 / np.cosh(c * x)
        return (b / c * t - d * sech, c * t,
                b * sech**2 + c * d * sech * t, c * c * sech**2)
    if family is FamilyId.GEN_POSCHL_TELLER:
        ct, csch = 1.0 / np.tanh(c * x), 1.0 / np.sinh(c * x)
        return (b / c * ct - d * csch, c * ct,
                -b * csch**2 + c * d * csch * ct, -c * c * csch**2)
    if family is FamilyId.SHIFTED_EXPONENTIAL:
        e = np.exp(-s * c * x)
        one = np.ones_like(x)
        return s * b / c + d * e, s * c * one, -s * c * d * e, 0.0 * one
    if family is FamilyId.RADIAL_OSCILLATOR:
        return b / 2 * x + d / x, 1.0 / x, b / 2 - d / x**2, -1.0 / x**2
    if family is FamilyId.LINEAR:
        one = np.ones_like(x)
        return b * x + d, 0.0 * one, b * one, 0.0 * one
    if family is FamilyId.SCARF_TRIGONOMETRIC:
        t, sec = np.tan(c * x), 1.0 / np.cos(c * x)
        return (b / c * t + d * sec, -c * t,
                b * sec**2 + c * d * sec * t, -c * c * sec**2)
    if family is FamilyId.POSCHL_TELLER_TRIGONOMETRIC:
        ct, csc = 1.0 / np.tan(c * x), 1.0 / np.sin(c * x)
        return (-b / c * ct + d * csc, c * ct,
                b * csc**2 - c * d * csc * ct, -c * c * csc**2)
    if family is FamilyId.COMPLEX_EXPONENTIAL:
        e = np.exp(-1j * s * c * x)
        one = np.ones_like(x, dtype=complex)
        return (-1j * s * b / c + d * e, 1j * s * c * one,
                -1j * s * c * d * e, 0.0 * one)
    if family is FamilyId.INVERSE_M:
        one = np.ones_like(x)
        return b / p.m * one, 1.0 / x, 0.0 * one, -1.0 / x**2
    raise AssertionError(family)


@dataclass(frozen=True)
class SuperpotentialParts:
    k0: object
    k1: object
    w0: object


def superpotential_parts(family, params: FamilyParams, x, *, allow_complex: bool = False):
    """Evaluate ``k0``, ``k1`` and ``w0 = k0 + m k1`` at ``x``.

    Raises:
        OutOfDomain: if some ``x`` is not strictly inside the family domain.
        ComplexFamily: for the complex family unless ``allow_complex`` is set.
    """
    family, xa = _prepare(family, params, x, allow_complex)
    with np.errstate(all="ignore"):
        k0, k1, _, _ = _base_terms(family, params, xa)
        w0 = k0 + params.m * k1
    return SuperpotentialParts(_unwrap(k0), _unwrap(k1), _unwrap(w0))


def base_superpotential(family, params: FamilyParams, x, *, allow_complex: bool = False):
    """``(W0, W0')`` of the undeformed superpotential."""
    family, xa = _prepare(family, params, x, allow_complex)
    with np.errstate(all="ignore"):
        k0, k1, dk0, dk1 = _base_terms(family, params, xa)
        return k0 + params.m * k1, dk0 + params.m * dk1


def _denominators(family: FamilyId, p: FamilyParams, x: np.ndarray):
    """Printed deformation terms as ``D'/D``: returns ``(D, D', D'')`` for W1+ and W1-.

    The two constant families are encoded with ``D = 1``, ``D' = k``, ``D'' = k^2``.
    """
    b, c, d, m, s = p.b, p.c, p.d, p.m, p.sign
    if family is FamilyId.SCARF_HYPERBOLIC:
        sh, ch = np.sinh(c * x), np.cosh(c * x)
        num, num2 = 2 * c * c * d * ch, 2 * c**3 * d * sh
        dp = 2 * b + c * c * (2 * m + 1) + 2 * c * d * sh
        dm = 2 * b + c * c * (2 * m - 1) + 2 * c * d * sh
        return (dp, num, num2), (dm, num, num2)
    if family is FamilyId.GEN_POSCHL_TELLER:
        sh, ch = np.sinh(c * x), np.cosh(c * x)
        num, num2 = 2 * c * c * d * sh, 2 * c**3 * d * ch
        dp = 2 * c * d * ch - 2 * b - c * c * (2 * m + 1)
        dm = 2 * c * d * ch - 2 * b + c * c * (1 - 2 * m)
        return (dp, num, num2), (dm, num, num2)
    if family is FamilyId.RADIAL_OSCILLATOR:
        num, num2 = 2 * b * x, 2 * b * np.ones_like(x)
        dp = b * x**2 - 1 - 2 * d - 2 * m
        dm = b * x**2 + 1 - 2 * d - 2 * m
        return (dp, num, num2), (dm, num, num2)
    if family is FamilyId.SCARF_TRIGONOMETRIC:
        sn, cs = np.sin(c * x), np.cos(c * x)
        num, num2 = 2 * c * c * d * cs, -2 * c**3 * d * sn
        dp = 2 * c * d * sn + 2 * b - c * c * (2 * m + 1)
        dm = 2 * c * d * sn + 2 * b + c * c * (1 - 2 * m)
        return (dp, num, num2), (dm, num, num2)
    if family is FamilyId.POSCHL_TELLER_TRIGONOMETRIC:
        sn, cs = np.sin(c * x), np.cos(c * x)
        num, num2 = 2 * c * c * d * sn, 2 * c**3 * d * cs
        dp = 2 * b - c * c * (2 * m + 1) - 2 * c * d * cs
        dm = 2 * b + c * c * (1 - 2 * m) - 2 * c * d * cs
        return (dp, num, num2), (dm, num, num2)
    if family in (FamilyId.SHIFTED_EXPONENTIAL, FamilyId.COMPLEX_EXPONENTIAL):
        k = s * c if family is FamilyId.SHIFTED_EXPONENTIAL else 1j * s * c
        one = np.ones_like(x, dtype=type(k))
        term = (one, k * one, k * k * one)
        return term, term
    raise TrivialOnlyFamily(f"{family.cli_name} admits no nontrivial deformation terms")


def pole_mask(den, num) -> np.ndarray:
    return np.abs(den) < POLE_RTOL * (1.0 + np.abs(num))


def _log_derivative(den, num, num2):
    # a numerator that vanishes with its derivative is the d = 0 limit: W = 0 exactly
    null = (num == 0) & (num2 == 0)
    pole = pole_mask(den, num) & ~null
    safe = np.where(pole, np.nan, np.where(null, 1.0, den))
    w = num / safe
    dw = num2 / safe - w * w
    return w, dw


@dataclass(frozen=True)
class DeformationTerms:
    w1_plus: object
    w1_minus: object


@dataclass(frozen=True)
class PoleAt:
    """Marker returned instead of values when a deformation denominator vanishes."""

    x: float


def deformation_derivatives(family, params: FamilyParams, x, *, allow_complex: bool = False):
    """``(W1+, W1+', W1-, W1-')`` as arrays, NaN where a denominator vanishes."""
    family, xa = _prepare(family, params, x, allow_complex)
    with np.errstate(all="ignore"):
        plus, minus = _denominators(family, params, xa)
        wp, dwp = _log_derivative(*plus)
        wm, dwm = _log_derivative(*minus)
    return wp, dwp, wm, dwm


def deformation_terms(family, params: FamilyParams, x, *, allow_complex: bool = False):
    """Evaluate the tabulated ``W1+``/``W1-`` closed forms.

    A scalar ``x`` at a pole yields :class:`PoleAt`; array input carries NaN
    at pole samples instead.
    """
    wp, _, wm, _ = deformation_derivatives(family, params, x, allow_complex=allow_complex)
    if np.ndim(wp) == 0:
        if np.isnan(wp) or np.isnan(wm):
            return PoleAt(float(x))
        return DeformationTerms(_unwrap(wp), _unwrap(wm))
    return DeformationTerms(wp, wm)


def _unwrap(a):
    a = np.asarray(a)
    return a.item() if a.ndim == 0 else a


# ---------------------------------------------------------------- singularities


@dataclass(frozen=True)
class Free:
    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Singular:
    witness: float

    def __bool__(self) -> bool:
        return False


def _scan_points(family: FamilyId, p: FamilyParams, dom: DomainSpec) -> np.ndarray:
    if dom.finite:
        return np.linspace(dom.lower, dom.upper, 4001)
    top = 8.0
    if family.info.uses_c:
        top = min(top, math.log10(700.0 / p.c))
    tail = np.logspace(-8, top, 3000)
    if math.isfinite(dom.lower):
        return np.concatenate([[dom.lower], dom.lower + tail])
    return np.concatenate([-tail[::-1], [0.0], tail])


def _bisect_root(f, lo: float, hi: float, flo: float) -> float:
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def singularity_verdict(family, params: FamilyParams) -> Free | Singular:
    """Decide whether both deformation terms stay finite on the whole domain.

    The denominators are monotone on every family domain, so a sign-change
    scan over a dense (log-spaced towards infinite ends) sample, plus a check
    of the limits at the open ends, finds every zero.  A root is refined by
    bisection to 1e-12.
    """
    family = FamilyId.parse(family)
    validate(family, params)
    if family.info.trivial_only:
        raise TrivialOnlyFamily(f"{family.cli_name} has no deformation terms to check")
    if family in (FamilyId.SHIFTED_EXPONENTIAL, FamilyId.COMPLEX_EXPONENTIAL):
        return Free()
    dom = domain(family, params)
    xs = _scan_points(family, params, dom)
    roots = []
    with np.errstate(all="ignore"):
        for which in (0, 1):
            den, num, _ = _denominators(family, params, xs)[which]
            den = np.broadcast_to(den, xs.shape)
            num = np.broadcast_to(num, xs.shape)
            if not np.any(num != 0):
                continue  # W1 vanishes identically
            hits = np.flatnonzero(pole_mask(den, num))
            if hits.size:
                roots.append(float(xs[hits[0]]))
                continue
            flips = np.flatnonzero(np.sign(den[:-1]) != np.sign(den[1:]))
            if flips.size:
                i = flips[0]

                def f(t, which=which):
                    return float(_denominators(family, params, np.float64(t))[which][0])

                roots.append(_bisect_root(f, float(xs[i]), float(xs[i + 1]), float(den[i])))
    if roots:
        return Singular(min(roots))
    return Free()


@dataclass(frozen=True)
class Threshold:
    value: float
    free_side: str  # "below" or "above"


def published_thresholds(family, params: FamilyParams) -> list[Threshold]:
    """Thresholds in ``m`` of the published singularity-free conditions.

    ``m`` is free iff it lies on the ``free_side`` of at least one threshold.
    An empty list means "always free" except for ``scarf_hyperbolic`` with
    ``d != 0`` (never free), which is reported through
    :func:`published_free_condition`.
    """
    family = FamilyId.parse(family)
    b, c, d = params.b, params.c, params.d
    if family.info.trivial_only:
        raise TrivialOnlyFamily(family.cli_name)
    if d == 0 and family is not FamilyId.RADIAL_OSCILLATOR:
        return []
    c2 = 2 * c * c
    if family is FamilyId.GEN_POSCHL_TELLER:
        if d > 0:
            return [Threshold((2 * c * d - 2 * b - c * c) / c2, "below")]
        return [Threshold((2 * c * d - 2 * b + c * c) / c2, "above")]
    if family is FamilyId.RADIAL_OSCILLATOR:
        if b <= 0:
            return []
        return [Threshold(-0.5 * (1 + 2 * d), "below")]
    if family in (FamilyId.SCARF_TRIGONOMETRIC, FamilyId.POSCHL_TELLER_TRIGONOMETRIC):
        if d > 0:
            return [Threshold((2 * b + c * c + 2 * c * d) / c2, "above"),
                    Threshold((2 * b - c * c - 2 * c * d) / c2, "below")]
        return [Threshold((2 * b + c * c - 2 * c * d) / c2, "above"),
                Threshold((2 * b - c * c + 2 * c * d) / c2, "below")]
    return []


def published_free_condition(family, params: FamilyParams) -> bool | None:
    """The published singularity-free inequality, or None where none is stated."""
    family = FamilyId.parse(family)
    if family.info.trivial_only:
        raise TrivialOnlyFamily(family.cli_name)
    if family is FamilyId.SCARF_HYPERBOLIC:
        return params.d == 0
    if family is FamilyId.RADIAL_OSCILLATOR and params.b <= 0:
        return None
    thresholds = published_thresholds(family, params)
    if not thresholds:
        return True
    m = params.m
    return any(m < t.value if t.free_side == "below" else m > t.value for t in thresholds)


def reference_table() -> list[dict]:
    rows = []
    for fam in FamilyId:
        info = fam.info
        if info.trivial_only:
            status = "trivial-only"
        elif not info.hermitian:
            status = "deformable (non-Hermitian)"
        else:
            status = "deformable"
        rows.append({
            "family": fam.cli_name,
            "superpotential": info.heading,
            "domain": info.domain,
            "status": status,
            "note": info.note,
        })
    return rows
