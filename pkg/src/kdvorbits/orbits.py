"""Monodromy and coadjoint-orbit classification of cnoidal Hill potentials.

A cnoidal wave with parameters (m, V) determines a Hill operator whose
monodromy is known in closed form: with ``a = wp_inverse(V)`` on the
boundary of the half fundamental rectangle, the half Floquet exponent is

    w = K zeta(a) - eta1 a,

the trace of the monodromy is 2 cosh(2w), and the orbit invariant is
kc = w^2 / (6 pi^2) (the energy of the constant representative, in units
of the central charge).

On each of the four edges of the rectangle w is purely real or purely
imaginary up to the constant -i pi/2, and the addition formula for zeta
collapses to elementary real expressions in the Jacobi epsilon function:

    right edge (band,   e3 < V < e1):  w = -i phi,
        phi = K eps(Y|1-m) - (K - E) Y
    imaginary axis (below the wedge, V < e2):  w = -i phi,
        phi = K eps(Y|1-m) - (K - E) Y + K cn dn/sn (Y|1-m)
    top edge (inside the wedge, e2 < V < e3):  w = rho - i pi/2,
        rho = K eps(X|m) - E X
    real axis (above the spectrum, V > e1):  w = rho,
        rho = K eps(X|m) - E X + K cn dn/sn (X|m)

(Legendre's relation makes phi -> pi/2 exactly at both wedge corners.)
Working edge-by-edge in real arithmetic keeps the trichotomy
|trace| < 2 / = 2 / > 2 exact, which the classifier relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .elliptic import _jacobi_epsilon, _jacobi_real, _jacobi_scalar
from .errors import DomainError, InsideWedgeError, NumericalError
from .profiles import Profile
from .weierstrass import (
    RectLattice,
    _wp_band_line,
    _wp_imag_axis,
    _wp_prime_band_line_im,
    _wp_prime_imag_axis_im,
    _wp_prime_real,
    _wp_real,
    lattice,
    wp_inverse,
)

__all__ = [
    "OrbitKind",
    "OrbitClass",
    "UniformRepresentative",
    "monodromy_trace",
    "uniform_representative",
    "classify",
    "winding_from_kc",
    "constant_trace",
    "dk_dV",
    "level_curve",
    "cnoidal_profile",
    "cnoidal_speed",
]

#: Absolute tolerance on V for deciding membership of the boundary curves.
BOUNDARY_TOL = 1e-12

_SIX_PI_SQ = 6.0 * math.pi**2

# Snap width used when flooring nearly-integer winding ratios; must stay
# well below the 1e-9 offsets the classifier is specified to resolve.
_FLOOR_SNAP = 4e-12


class OrbitKind(str, Enum):
    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    EXCEPTIONAL = "Exceptional"


@dataclass(frozen=True)
class OrbitClass:
    """A coadjoint-orbit label: the class of the monodromy plus a winding."""

    kind: OrbitKind
    winding: int

    def __str__(self) -> str:  # e.g. "Elliptic(n=2)"
        return f"{self.kind.value}(n={self.winding})"


class UniformRepresentative(NamedTuple):
    """Energy kc of the constant orbit representative, in units of c.

    ``kc`` is complex: inside the wedge the orbit contains no constant
    (rest-frame) potential and the analytic continuation picks up an
    imaginary part; ``has_rest_frame`` records that distinction.
    """

    kc: complex
    has_rest_frame: bool


class _Region(Enum):
    BELOW = "below"
    LOWER_EDGE = "lower_edge"
    WEDGE = "wedge"
    UPPER_EDGE = "upper_edge"
    BAND = "band"
    PARABOLIC_EDGE = "parabolic_edge"
    ABOVE = "above"


def _region_of(lat: RectLattice, V: float) -> _Region:
    if not math.isfinite(V):
        raise DomainError(f"V must be finite, got {V!r}")
    # Edge tests first: at m = 0 the wedge degenerates (e2 == e3) and the
    # double corner must classify as the lower edge.
    if abs(V - lat.e2) <= BOUNDARY_TOL:
        return _Region.LOWER_EDGE
    if abs(V - lat.e3) <= BOUNDARY_TOL:
        return _Region.UPPER_EDGE
    if abs(V - lat.e1) <= BOUNDARY_TOL:
        return _Region.PARABOLIC_EDGE
    if V < lat.e2:
        return _Region.BELOW
    if V < lat.e3:
        return _Region.WEDGE
    if V < lat.e1:
        return _Region.BAND
    return _Region.ABOVE


def _phi_band(Y: float, lat: RectLattice) -> float:
    """phi on the right edge: K eps(Y|1-m) - (K-E) Y, increasing 0 -> pi/2."""
    return lat.K * _jacobi_epsilon(Y, 1.0 - lat.m) - (lat.K - lat.E) * Y


def _phi_below(Y: float, lat: RectLattice) -> float:
    """phi on the imaginary axis: band term + K cn dn/sn at (Y|1-m).

    Decreases monotonically from +inf (V -> -inf) to pi/2 (V = e2).
    """
    s, c, d = _jacobi_scalar(Y, 1.0 - lat.m)
    return _phi_band(Y, lat) + lat.K * c * d / s


def _rho_wedge(X: float, lat: RectLattice) -> float:
    """Re w on the top edge: K eps(X|m) - E X; zero at both corners."""
    return lat.K * _jacobi_epsilon(X, lat.m) - lat.E * X


def _rho_above(X: float, lat: RectLattice) -> float:
    """w on the real axis: wedge term + K cn dn/sn at (X|m).

    Decreases monotonically from +inf (V -> +inf) to 0 (V = e1).
    """
    s, c, d = _jacobi_scalar(X, lat.m)
    return _rho_wedge(X, lat) + lat.K * c * d / s


def _holonomy(m: float, V: float) -> tuple[RectLattice, _Region, complex]:
    """The half Floquet exponent w = K zeta(a) - eta1 a, snapped per region."""
    lat = lattice(m)
    region = _region_of(lat, V)
    if region in (_Region.LOWER_EDGE, _Region.UPPER_EDGE):
        return lat, region, complex(0.0, -math.pi / 2)
    if region is _Region.PARABOLIC_EDGE:
        return lat, region, 0.0 + 0.0j
    a = wp_inverse(V, lat)
    if region is _Region.BELOW:
        return lat, region, complex(0.0, -_phi_below(a.imag, lat))
    if region is _Region.BAND:
        return lat, region, complex(0.0, -_phi_band(a.imag, lat))
    if region is _Region.WEDGE:
        return lat, region, complex(_rho_wedge(a.real, lat), -math.pi / 2)
    return lat, region, complex(_rho_above(a.real, lat), 0.0)


def monodromy_trace(m: float, V: float) -> float:
    """Trace of the Hill monodromy of the cnoidal wave (m, V): 2 cosh(2w).

    Independent of the central charge.  Exactly -2 on the wedge edges and
    +2 at V = e1; in (-2, 2) on the elliptic regions; beyond otherwise.
    """
    _, region, w = _holonomy(m, V)
    if region in (_Region.LOWER_EDGE, _Region.UPPER_EDGE):
        return -2.0
    if region is _Region.PARABOLIC_EDGE:
        return 2.0
    if region in (_Region.BELOW, _Region.BAND):
        return 2.0 * math.cos(2.0 * abs(w.imag))
    if region is _Region.WEDGE:
        return -2.0 * math.cosh(2.0 * w.real)
    return 2.0 * math.cosh(2.0 * w.real)


def uniform_representative(m: float, V: float) -> UniformRepresentative:
    """kc = w^2/(6 pi^2): the constant representative of the orbit of (m, V).

    Real except inside the wedge, where w = rho - i pi/2 gives
    kc = (rho^2 - pi^2/4)/(6 pi^2) - i rho/(6 pi) and no rest frame exists.
    On the wedge edges the value is exactly -1/24.
    """
    _, region, w = _holonomy(m, V)
    if region in (_Region.LOWER_EDGE, _Region.UPPER_EDGE):
        return UniformRepresentative(complex(-1.0 / 24.0, 0.0), True)
    if region is _Region.PARABOLIC_EDGE:
        return UniformRepresentative(0.0 + 0.0j, True)
    if region in (_Region.BELOW, _Region.BAND):
        phi = abs(w.imag)
        return UniformRepresentative(complex(-phi * phi / _SIX_PI_SQ, 0.0), True)
    if region is _Region.WEDGE:
        rho = w.real
        kc = complex((rho * rho - math.pi**2 / 4.0) / _SIX_PI_SQ,
                     -rho / (6.0 * math.pi))
        return UniformRepresentative(kc, False)
    rho = w.real
    return UniformRepresentative(complex(rho * rho / _SIX_PI_SQ, 0.0), True)


def _floor_snap(x: float) -> int:
    r = round(x)
    if abs(x - r) < _FLOOR_SNAP:
        return int(r)
    return math.floor(x)


def classify(m: float, V: float) -> OrbitClass:
    """The coadjoint-orbit class of the cnoidal wave (m, V).

    Below the wedge the orbits are elliptic with winding
    n = floor(sqrt(24 |kc|)) >= 1; the wedge itself is the n = 1
    hyperbolic family bounded by the two n = 1 exceptional edges; the
    band between e3 and e1 is elliptic with n = 0; V = e1 is the
    parabolic n = 0 orbit of the constant; above it sits the n = 0
    hyperbolic family.
    """
    _, region, w = _holonomy(m, V)
    if region is _Region.BELOW:
        n = _floor_snap(2.0 * abs(w.imag) / math.pi)
        return OrbitClass(OrbitKind.ELLIPTIC, n)
    if region in (_Region.LOWER_EDGE, _Region.UPPER_EDGE):
        return OrbitClass(OrbitKind.EXCEPTIONAL, 1)
    if region is _Region.WEDGE:
        return OrbitClass(OrbitKind.HYPERBOLIC, 1)
    if region is _Region.BAND:
        return OrbitClass(OrbitKind.ELLIPTIC, 0)
    if region is _Region.PARABOLIC_EDGE:
        return OrbitClass(OrbitKind.PARABOLIC, 0)
    return OrbitClass(OrbitKind.HYPERBOLIC, 0)


def winding_from_kc(kc: float) -> int:
    """Winding number floor(sqrt(24 |kc|)) of an elliptic orbit with kc <= 0."""
    kc = float(kc)
    if math.isnan(kc) or kc > 0.0:
        raise DomainError(f"winding_from_kc requires kc <= 0, got {kc!r}")
    return _floor_snap(math.sqrt(-24.0 * kc))


def constant_trace(kc: float) -> float:
    """Monodromy trace of the constant potential p = kc * c.

    2 cosh(2 pi sqrt(6 kc)) for kc >= 0, turning into
    2 cos(2 pi sqrt(6 |kc|)) for kc < 0.
    """
    kc = float(kc)
    if kc >= 0.0:
        return 2.0 * math.cosh(2.0 * math.pi * math.sqrt(6.0 * kc))
    return 2.0 * math.cos(2.0 * math.pi * math.sqrt(-6.0 * kc))


def dk_dV(m: float, V: float) -> float:
    """Derivative d(kc)/dV along fixed m, in units of the central charge.

    From differentiating w^2/(6 pi^2) with dV = wp'(a) da:

        d(kc)/dV = - w (K V + eta1) / (3 pi^2 wp'(a)).

    wp' vanishes at the corners: the derivative diverges (+inf is
    returned) on the wedge edges, while at V = e1 the limit is finite,
    E(m)^2 / (6 pi^2 (1 - m)).  Inside the wedge kc is not real and the
    one-dimensional derivative is undefined (:class:`InsideWedgeError`).
    """
    lat, region, w = _holonomy(m, V)
    if region is _Region.WEDGE:
        raise InsideWedgeError(
            "d(kc)/dV is undefined inside the wedge (kc is not real there)")
    if region in (_Region.LOWER_EDGE, _Region.UPPER_EDGE):
        return math.inf
    if region is _Region.PARABOLIC_EDGE:
        return lat.E**2 / (_SIX_PI_SQ * (1.0 - lat.m))
    a = wp_inverse(V, lat)
    coeff = lat.K * V + lat.eta1
    if region is _Region.BELOW:
        phi = abs(w.imag)
        return phi * coeff / (3.0 * math.pi**2 * _wp_prime_imag_axis_im(a.imag, lat))
    if region is _Region.BAND:
        phi = abs(w.imag)
        return phi * coeff / (3.0 * math.pi**2 * _wp_prime_band_line_im(a.imag, lat))
    return -w.real * coeff / (3.0 * math.pi**2 * _wp_prime_real(a.real, lat))


def _bracket_downward(f, hi: float, flo_positive: bool, start: float) -> float:
    """Shrink a lower bracket endpoint until f changes sign against f(hi)."""
    lo = start
    for _ in range(200):
        if (f(lo) > 0.0) == flo_positive:
            return lo
        lo *= 0.5
    raise NumericalError("failed to bracket the level-curve root", abscissa=lo)


def _corner_slack(V: float, corner: float, slope: float, curv_half: float) -> float:
    """kc resolution limit where a level curve meets a wedge corner.

    Near the corners at e2 and e3 the invariant follows a square-root law,
    kc + 1/24 ~ -(slope / 6 pi) sqrt((corner - V)/curv_half), so the
    boundary snap of width BOUNDARY_TOL flattens a small kc-neighbourhood
    of -1/24 onto the corner exactly.  Targets inside that neighbourhood
    are resolved to the corner; the verification must allow for it.
    """
    gap = abs(V - corner)
    if gap > 4.0 * BOUNDARY_TOL:
        return 0.0
    return 2.0 * (slope / (6.0 * math.pi)) * math.sqrt((gap + BOUNDARY_TOL) / curv_half)


def level_curve(target_kc: float, m: float, region: str) -> float:
    """Solve kc(m, V) = target_kc for V on one side of the wedge.

    ``region`` is "below_wedge" (requires target_kc <= -1/24; returns
    V <= e2) or "above_wedge" (requires target_kc >= -1/24; returns
    V >= e3).  Exactly -1/24 returns the corresponding wedge edge.

    The root is found in the arc-length variable of the relevant edge,
    where the problem is smooth and monotone, and the result is verified
    by recomputing kc.  Because kc varies like a square root of V at the
    wedge corners, targets within roughly 1e-8 of -1/24 resolve to the
    corner itself; away from the corners the round trip is good to 1e-10.
    """
    target_kc = float(target_kc)
    if math.isnan(target_kc):
        raise DomainError("target kc must be a real number")
    lat = lattice(m)
    boundary = -1.0 / 24.0

    if region == "below_wedge":
        if target_kc > boundary + BOUNDARY_TOL:
            raise DomainError(
                f"kc = {target_kc!r} has no solution below the wedge (needs kc <= -1/24)")
        if abs(target_kc - boundary) <= BOUNDARY_TOL:
            return lat.e2
        if m == 0.0:
            return 2.0 / 3.0 + 24.0 * target_kc
        phi_t = math.sqrt(-_SIX_PI_SQ * target_kc)

        def g(Y):
            return _phi_below(Y, lat) - phi_t

        lo = _bracket_downward(g, lat.Kc, True, min(lat.Kc / 2.0, lat.K / phi_t))
        Y = brentq(g, lo, lat.Kc, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        V = _wp_imag_axis(Y, lat)
        slack = _corner_slack(V, lat.e2, lat.K - lat.E, m)
    elif region == "above_wedge":
        if target_kc < boundary - BOUNDARY_TOL:
            raise DomainError(
                f"kc = {target_kc!r} has no solution above the wedge (needs kc >= -1/24)")
        if abs(target_kc - boundary) <= BOUNDARY_TOL:
            return lat.e3
        if target_kc == 0.0:
            return lat.e1
        if m == 0.0:
            return 2.0 / 3.0 + 24.0 * target_kc
        if target_kc < 0.0:
            phi_t = math.sqrt(-_SIX_PI_SQ * target_kc)
            Y = brentq(lambda Y: _phi_band(Y, lat) - phi_t, 0.0, lat.Kc,
                       xtol=1e-15, rtol=4 * np.finfo(float).eps)
            V = _wp_band_line(Y, lat)
            slack = _corner_slack(V, lat.e3, abs(lat.E - (1.0 - m) * lat.K),
                                  m * (1.0 - m))
        else:
            rho_t = math.sqrt(_SIX_PI_SQ * target_kc)

            def g(X):
                return _rho_above(X, lat) - rho_t

            lo = _bracket_downward(g, lat.K, True, min(lat.K / 2.0, lat.K / rho_t))
            X = brentq(g, lo, lat.K, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            V = _wp_real(X, lat)
            slack = 0.0
    else:
        raise DomainError(f"region must be 'below_wedge' or 'above_wedge', got {region!r}")

    check = uniform_representative(m, V).kc
    if abs(check.real - target_kc) > 1e-10 * max(1.0, abs(target_kc)) + slack:
        raise NumericalError("level-curve solve failed verification", abscissa=V)
    return V


# ---------------------------------------------------------------------------
# The cnoidal profile itself.
# ---------------------------------------------------------------------------


def cnoidal_profile(m: float, V: float, c: float, tau: float = 0.0,
                    n: int = 512) -> Profile:
    """The 2pi-periodic cnoidal Hill potential with parameters (m, V).

    p(x, tau) = (c K^2 / 3 pi^2) [ V/2 - (m+1)/3 + m sn^2(K (x - v tau) / pi | m) ]

    with v = :func:`cnoidal_speed`: under KdV the wave translates rigidly,
    so ``tau`` just shifts the profile.  At m = 0 this degenerates to the
    constant c (V/2 - 1/3)/12.
    """
    lat = lattice(m)
    K = lat.K
    amp = c * K * K / (3.0 * math.pi**2)
    offset = 0.5 * V - (m + 1.0) / 3.0
    shift = cnoidal_speed(m, V, c) * tau

    def evaluate(x):
        s = _jacobi_real((np.asarray(x, float) - shift) * (K / math.pi), m)[0]
        return amp * (offset + m * s * s)

    return Profile.from_callable(evaluate, n=n)


def cnoidal_speed(m: float, V: float, c: float) -> float:
    """Propagation speed of the cnoidal wave under KdV: v = c K^2 V / (2 pi^2)."""
    K = lattice(m).K
    return c * K * K * V / (2.0 * math.pi**2)
