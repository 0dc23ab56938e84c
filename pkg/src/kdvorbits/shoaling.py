"""Cnoidal wave trains in shallow water and the shoaling path.

The dimensionless orbit machinery meets the ocean here.  A right-moving
surface wave of period T over depth h, with the standard shallow-water
conventions (central charge c = -32 pi^3, small parameter eps = h^2 /
lambda^2), is a cnoidal wave whose average vanishes; that pins the
velocity parameter to the pointedness, V = 2E/K - (4 - 2m)/3.  Keeping
the period and the energy transport fixed while the depth decreases
turns the pair (h, lambda) into functions of m, so a shoaling wave
traces a definite path through the orbit diagram -- and that path
crosses into the forbidden wedge at a critical pointedness m* where
E(m*)/K(m*) = 1/2, i.e. at a computable critical depth.

Everything dimensionful is SI; every function states its units.  The
leading-order relations deliberately drop the 1 + O(eps) factors, and
:class:`WaveTrain` carries eps so the caller can judge how much that
omission costs.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .elliptic import _jacobi_real
from .errors import DomainError
from .orbits import OrbitClass, classify, uniform_representative
from .weierstrass import lattice

__all__ = [
    "WaveTrain",
    "zero_average_V",
    "critical_m",
    "wavelength",
    "energy_transport",
    "depth_from_m",
    "m_from_depth",
    "critical_depth",
    "depth_profile_D",
    "PathPoint",
    "ShoalingPath",
    "shoaling_path",
    "read_bathymetry",
]

_EPS_WARN = 0.05
# Inversion bracket for m_from_depth.  The transport bracket behaves as
# (3/8)(pi/2)^4 m^2 near m = 0, so below ~1e-6 it drowns in double-precision
# cancellation noise; the floor keeps the bracket trustworthy while the
# corresponding depth is already ~400x the natural depth scale.
_M_FLOOR = 1e-6
_M_CEIL = 1.0 - 1e-15

_SHALLOW_CHARGE = -32.0 * math.pi**3


def _require_positive(**fields):
    for name, value in fields.items():
        value = float(value)
        if not (math.isfinite(value) and value > 0.0):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


def zero_average_V(m: float) -> float:
    """Velocity parameter of the zero-average cnoidal wave: 2E/K - (4-2m)/3.

    Runs from 2/3 at m = 0 (hugging the parabolic line (2-m)/3 from
    below) down to -2/3 as m -> 1.
    """
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise DomainError(f"squared modulus must lie in [0, 1), got {m!r}")
    lat = lattice(m)
    return 2.0 * lat.E / lat.K - (4.0 - 2.0 * m) / 3.0


@lru_cache(maxsize=1)
def critical_m() -> float:
    """The pointedness m* where the zero-average curve enters the wedge.

    Fixed point of m -> 2E(m)/K(m) - 1 + m, equivalently E/K = 1/2;
    plain iteration contracts (|slope| ~ 0.74 at the fixed point) and is
    run to 1e-15 increments, giving m* = 0.8261147659849698... .
    """
    m = 0.8
    for _ in range(500):
        lat = lattice(m)
        m_next = 2.0 * lat.E / lat.K - 1.0 + m
        if abs(m_next - m) <= 1e-15:
            return m_next
        m = m_next
    raise AssertionError("fixed-point iteration for m* failed to settle")


def wavelength(h: float, T: float, g: float) -> float:
    """Leading-order wavelength lambda = sqrt(g h) T  [m]."""
    _require_positive(h=h, T=T, g=g)
    return math.sqrt(g * h) * T


@dataclass(frozen=True)
class WaveTrain:
    """One cnoidal wave train over a flat bed, in SI units.

    h: average depth [m]; lam: wavelength [m]; m: pointedness (squared
    modulus); T: period [s]; rho: density [kg/m^3]; g: gravitational
    acceleration [m/s^2]; F: energy transport [N], computed from the
    other fields when not supplied.

    The shallow-water expansion parameter eps = h^2/lam^2 is exposed as
    a property, and construction warns when it exceeds 0.05 -- beyond
    that the dropped 1 + O(eps) factors are no longer decoration.
    """

    h: float
    lam: float
    m: float
    T: float
    rho: float
    g: float
    F: float | None = None

    def __post_init__(self):
        _require_positive(h=self.h, lam=self.lam, T=self.T,
                          rho=self.rho, g=self.g)
        if not 0.0 <= self.m < 1.0:
            raise DomainError(
                f"squared modulus must lie in [0, 1), got {self.m!r}")
        if self.F is None:
            object.__setattr__(self, "F", energy_transport(self))
        if self.epsilon > _EPS_WARN:
            warnings.warn(
                f"eps = h^2/lambda^2 = {self.epsilon:.3g} exceeds "
                f"{_EPS_WARN}; the shallow-water expansion is strained",
                RuntimeWarning, stacklevel=3)

    @property
    def epsilon(self) -> float:
        """The shallow-water expansion parameter h^2 / lambda^2."""
        return self.h * self.h / (self.lam * self.lam)


def _transport_bracket(m: float) -> float:
    """(m-1)K^4/3 + (4-2m)EK^3/3 - E^2K^2; zero at m = 0, increasing."""
    lat = lattice(m)
    K, E = lat.K, lat.E
    return ((m - 1.0) * K**4 / 3.0
            + (4.0 - 2.0 * m) * E * K**3 / 3.0
            - E * E * K * K)


def energy_transport(train: WaveTrain) -> float:
    """Energy carried shoreward by the train per unit time  [N].

    (256/9) rho g (h^6/lambda^3) [(m-1)K^4/3 + (4-2m)EK^3/3 - E^2K^2],
    the closed form of the period integral of (energy density x speed).
    A flat train (m = 0) transports nothing: the bracket cancels
    algebraically.
    """
    return (256.0 / 9.0 * train.rho * train.g
            * train.h**6 / train.lam**3 * _transport_bracket(train.m))


def depth_from_m(m: float, T: float, F: float, rho: float, g: float) -> float:
    """The depth at which a conserved train has pointedness m  [m].

    h^(9/2) = (27/256)(sqrt(g)/rho) T^3 F / [(m-1)K^4 + 2(2-m)EK^3 - 3E^2K^2],
    a strictly decreasing bijection of m in (0, 1) onto (0, infinity):
    deep water means round waves, shallow water means pointed ones.
    The bracket vanishes at m = 0, so that endpoint is out of domain.
    """
    m = float(m)
    if not 0.0 < m < 1.0:
        raise DomainError(
            f"pointedness must lie in (0, 1) to invert the transport "
            f"relation, got {m!r}")
    _require_positive(T=T, F=F, rho=rho, g=g)
    bracket = 3.0 * _transport_bracket(m)
    power = 27.0 / 256.0 * math.sqrt(g) / rho * T**3 * F / bracket
    return power ** (2.0 / 9.0)


def m_from_depth(h: float, T: float, F: float, rho: float, g: float) -> float:
    """Invert the depth-pointedness relation: the m with depth_from_m = h."""
    _require_positive(h=h, T=T, F=F, rho=rho, g=g)
    if h > depth_from_m(_M_FLOOR, T, F, rho, g):
        raise DomainError(
            f"depth {h!r} exceeds the m -> 0 reach of the transport "
            "relation; the train would be rounder than representable")
    if h < depth_from_m(_M_CEIL, T, F, rho, g):
        raise DomainError(
            f"depth {h!r} lies below the m -> 1 floor of the transport "
            "relation")
    return brentq(lambda m: depth_from_m(m, T, F, rho, g) - h,
                  _M_FLOOR, _M_CEIL, xtol=1e-15, rtol=8.9e-16)


def critical_depth(T: float, F: float, rho: float, g: float) -> float:
    """The depth at which the shoaling path enters the forbidden wedge  [m].

    h* = (g T^6 F^2 / rho^2)^(1/9) (3 / (4 K(m*)^(4/3)))^(2/3), the
    transport relation evaluated at E/K = 1/2; the numerical coefficient
    is 0.3905... .
    """
    _require_positive(T=T, F=F, rho=rho, g=g)
    K_star = lattice(critical_m()).K
    return ((g * T**6 * F * F / (rho * rho)) ** (1.0 / 9.0)
            * (3.0 / (4.0 * K_star ** (4.0 / 3.0))) ** (2.0 / 3.0))


def depth_profile_D(X, t: float, train: WaveTrain):
    """Water depth at lab position X [m] and time t [s]  [m].

    D = h + (16/3)(h^3/lambda^2) K^2 [dn^2(2K(X - sqrt(gh) t)/lambda | m)
    - E/K], the zero-average train translating at the leading-order
    speed sqrt(gh).  The deviation from h, rescaled by 2 pi lambda^2 /
    h^3, is exactly the dimensionless zero-average profile at central
    charge -32 pi^3.  Accepts scalar or array X.
    """
    lat = lattice(train.m)
    phase = (2.0 * lat.K / train.lam
             * (np.asarray(X, dtype=float) - math.sqrt(train.g * train.h) * t))
    dn = _jacobi_real(phase, train.m)[2]
    bump = (16.0 / 3.0 * train.h**3 / train.lam**2 * lat.K * lat.K
            * (dn * dn - lat.E / lat.K))
    return train.h + bump


class PathPoint(NamedTuple):
    """One record of the shoaling path (SI units; kc is dimensionless)."""

    h: float
    lam: float
    m: float
    V: float
    kc: complex
    orbit: OrbitClass
    in_wedge: bool
    epsilon: float
    speed: float


class ShoalingPath(NamedTuple):
    """Path records in input order plus the wedge-entry bookkeeping.

    ``entry_index`` is the first record with m > m* (None if the water
    never gets that shallow) and ``crossing_depth`` the bisected depth
    at which m = m* exactly, matching critical_depth of the same train.
    """

    points: list
    entry_index: int | None
    crossing_depth: float | None


def shoaling_path(h_values, T: float, F: float, rho: float,
                  g: float) -> ShoalingPath:
    """Trace a conserved wave train through decreasing depths.

    For each depth: invert the transport relation for m, apply the
    leading-order wavelength, place the zero-average wave in the orbit
    diagram (V, k/c, class), and flag whether it sits inside the
    forbidden wedge.  The speed column is the leading-order sqrt(g h);
    the recorded eps says how much to trust it.

    If consecutive depths straddle the wedge boundary, the crossing
    depth is refined by bisection in h to a relative 1e-9 and reported
    on the returned path.
    """
    hs = [float(h) for h in h_values]
    if not hs:
        raise DomainError("need at least one depth")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise DomainError("depths must be strictly decreasing along the path")

    m_star = critical_m()
    points = []
    entry = None
    for i, h in enumerate(hs):
        m = m_from_depth(h, T, F, rho, g)
        V = zero_average_V(m)
        rep = uniform_representative(m, V)
        in_wedge = m > m_star
        if in_wedge and entry is None:
            entry = i
        lam = wavelength(h, T, g)
        points.append(PathPoint(
            h=h, lam=lam, m=m, V=V, kc=rep.kc,
            orbit=classify(m, V), in_wedge=in_wedge,
            epsilon=h * h / (lam * lam), speed=math.sqrt(g * h)))

    crossing = None
    if entry is not None and entry > 0:
        lo, hi = hs[entry], hs[entry - 1]  # lo is inside the wedge
        while (hi - lo) > 1e-9 * hi:
            mid = 0.5 * (lo + hi)
            if m_from_depth(mid, T, F, rho, g) > m_star:
                lo = mid
            else:
                hi = mid
        crossing = 0.5 * (lo + hi)
    return ShoalingPath(points, entry, crossing)


def read_bathymetry(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column bathymetry CSV (X, h) with a header row.

    Returns (positions, depths) as float arrays; raises DomainError on
    malformed rows, short files, or non-positive depths.
    """
    xs: list[float] = []
    hs: list[float] = []
    with open(path, newline="") as handle:
        rows = csv.reader(handle)
        header = next(rows, None)
        if header is None or len(header) < 2:
            raise DomainError("bathymetry file needs a two-column header row")
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DomainError(f"bathymetry line {lineno}: expected two columns")
            try:
                x, h = float(row[0]), float(row[1])
            except ValueError as exc:
                raise DomainError(f"bathymetry line {lineno}: {exc}") from exc
            if not (math.isfinite(h) and h > 0.0):
                raise DomainError(
                    f"bathymetry line {lineno}: depth must be positive, got {h!r}")
            xs.append(x)
            hs.append(h)
    if not xs:
        raise DomainError("bathymetry file contains no data rows")
    return np.asarray(xs), np.asarray(hs)
