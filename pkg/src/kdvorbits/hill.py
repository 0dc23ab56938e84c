"""Numerical Floquet analysis of Hill operators, independent of closed forms.

The potential p enters Hill's equation as psi'' = q(x) psi with
q = 6 p / c, so a constant p = kc*c reproduces the trace
2 cosh(2 pi sqrt(6 kc)).  Everything in this module works from the
sampled profile by direct ODE integration or spectral stepping; nothing
here touches the elliptic closed forms, which is what makes the
trace/winding cross-checks in the test suite meaningful.

The one exception is :func:`lame_exact_residual`, which goes the other
way: it evaluates the classical product-of-sigmas solution of the
translated Lame equation and measures, by finite differences, how well it
actually solves the cnoidal Hill equation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericalError, StabilityError
from .orbits import monodromy_trace
from .profiles import Profile
from .weierstrass import lattice, sigma, wp, wp_inverse, zeta

__all__ = [
    "floquet_monodromy",
    "winding_number",
    "lame_exact_residual",
    "kdv_evolve",
]

_RTOL = 1e-10
_ATOL = 1e-10
_DET_TOL = 1e-8

# RK4 covers the imaginary axis out to ~2.828; keep a sliver of margin.
_CFL_LIMIT = 2.8


def _hill_q(profile: Profile, c: float):
    if c == 0.0:
        raise DomainError("central charge c must be nonzero")

    def q(x):
        return 6.0 * profile(x) / c

    return q


def floquet_monodromy(profile: Profile, c: float) -> np.ndarray:
    """2x2 monodromy matrix of psi'' = (6 p / c) psi over one period.

    Both columns of the fundamental matrix are integrated together with
    DOP853; the determinant (a Wronskian, exactly 1 in arithmetic) is
    used as an a-posteriori error check: 1e-8 absolute at moderate
    matrix norms, relaxed to the integrator's relative error budget
    ~|M|^2 rtol once the entries grow exponentially large (there an
    absolute check is unsatisfiable in double precision).
    """
    q = _hill_q(profile, c)

    def rhs(x, y):
        qq = q(x)
        return (y[1], qq * y[0], y[3], qq * y[2])

    sol = solve_ivp(rhs, (0.0, profile.period), (1.0, 0.0, 0.0, 1.0),
                    method="DOP853", rtol=_RTOL, atol=_ATOL)
    if not sol.success:
        raise NumericalError(f"Floquet integration failed: {sol.message}",
                             abscissa=float(sol.t[-1]))
    y = sol.y[:, -1]
    mat = np.array([[y[0], y[2]], [y[1], y[3]]])
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    nrm = float(np.max(np.abs(mat)))
    if abs(det - 1.0) > max(_DET_TOL, 10.0 * _RTOL * nrm * nrm):
        raise NumericalError(
            f"monodromy determinant drifted to {det!r}; integration untrustworthy")
    return mat


def winding_number(profile: Profile, c: float) -> int:
    """Winding of the projective solution ratio psi2/psi1 over one period.

    With the fundamental pair (psi1(0), psi1'(0)) = (1, 0) and
    (psi2(0), psi2'(0)) = (0, 1) the stereographic angle
    theta = 2 atan2(psi2, psi1) obeys theta' = 2 / (psi1^2 + psi2^2) > 0
    (the 2 x 2 Wronskian is 1), so the accumulated lap count
    L = theta(2 pi) / 2 pi is monotone and cheap to integrate as a fifth
    component alongside the pair itself.

    In the stable case |trace| < 2 the winding is floor(L).  In the
    unstable case the fractional part of L is not an invariant -- it
    shifts with the spatial phase of the profile, and floor(L) jumps
    when a zero of psi2 crosses an endpoint -- but L always straddles
    the winding within one lap, and the winding has a definite parity
    there: odd for trace < -2, even for trace > 2.  So the count is
    corrected to the member of {floor(L), floor(L) + 1} with that
    parity, which is exactly the (phase-independent) number of zeros of
    a Floquet solution per period.  Values of L within 1e-6 of an
    integer (band edges, where |trace| = 2) snap to it first.
    """
    q = _hill_q(profile, c)

    def rhs(x, y):
        qq = q(x)
        return (y[1], qq * y[0], y[3], qq * y[2],
                2.0 / (y[0] * y[0] + y[2] * y[2]))

    sol = solve_ivp(rhs, (0.0, profile.period), (1.0, 0.0, 0.0, 1.0, 0.0),
                    method="DOP853", rtol=_RTOL, atol=_ATOL)
    if not sol.success:
        raise NumericalError(f"Floquet integration failed: {sol.message}",
                             abscissa=float(sol.t[-1]))
    y = sol.y[:, -1]
    trace = y[0] + y[3]
    laps = y[4] / (2.0 * math.pi)
    nearest = round(laps)
    if abs(laps - nearest) < 1e-6:
        base = int(nearest)
    else:
        base = math.floor(laps)

    if trace <= -2.0 + 1e-9:
        parity = 1
    elif trace >= 2.0 - 1e-9:
        parity = 0
    else:
        return max(0, base)
    if base % 2 != parity:
        base = base + 1 if laps - base > 0.0 else base - 1
    return max(0, base)


def lame_exact_residual(m: float, V: float, zs, step: float = 1e-4) -> float:
    """Residual of the sigma-quotient solutions in the N = 1 Lame equation.

    In the half-period variable z the cnoidal Hill equation becomes
    psi'' = (2 wp(z) + V) psi, solved exactly by the pair

        phi_pm(z) = exp(-+ zeta(a) z) sigma(z +- a) / (sigma(z) sigma(+-a)),

    where wp(a) = V.  Both solutions are checked at every point of
    ``zs`` with a 5-point finite-difference second derivative of width
    ``step`` scaled by |z|, and the largest relative defect is returned
    (expect ~1e-7: the stencil cancellation eats half the mantissa).

    Two side checks tie the formula to the Floquet layer: the
    multipliers phi_pm(z + 2K) / phi_pm(z) must multiply to 1 and sum
    to the closed-form monodromy trace, both within 1e-8, else
    :class:`NumericalError`.  Points within 1e-6 of a pole or zero of
    the pair (the period lattice and its translates by -+a) are
    rejected, since differencing there is meaningless.
    """
    lat = lattice(m)
    if m == 0.0:
        raise DomainError("the m = 0 profile is constant; nothing to validate")
    zs = [complex(z) for z in zs]
    if not zs:
        raise DomainError("need at least one evaluation point")
    a = wp_inverse(V, lat)
    za = zeta(a, lat)
    sig_a = sigma(a, lat)

    def phi(z: complex, sign: float) -> complex:
        return (np.exp(-sign * za * z) * sigma(z + sign * a, lat)
                / (sigma(z, lat) * sign * sig_a))

    two_k = 2.0 * lat.K
    two_kc = 2.0 * lat.Kc

    def lattice_distance(z: complex) -> float:
        zr = z.real - two_k * round(z.real / two_k)
        zi = z.imag - two_kc * round(z.imag / two_kc)
        return math.hypot(zr, zi)

    for z in zs:
        if min(lattice_distance(z), lattice_distance(z + a),
               lattice_distance(z - a)) < 1e-6:
            raise DomainError(
                f"z = {z!r} is within 1e-6 of a pole or zero of the solution")

    z0 = zs[0]
    factors = [phi(z0 + two_k, s) / phi(z0, s) for s in (1.0, -1.0)]
    if abs(factors[0] * factors[1] - 1.0) > 1e-8:
        raise NumericalError(
            "Floquet multipliers of the sigma quotients are not reciprocal")
    if abs(factors[0] + factors[1] - monodromy_trace(m, V)) > 1e-8:
        raise NumericalError(
            "sigma-quotient multipliers disagree with the monodromy trace")

    worst = 0.0
    for z in zs:
        h = step * max(1.0, abs(z))
        potential = 2.0 * wp(z, lat) + V
        for sign in (1.0, -1.0):
            stencil = [phi(z + j * h, sign) for j in (-2, -1, 0, 1, 2)]
            d2 = (-stencil[0] + 16 * stencil[1] - 30 * stencil[2]
                  + 16 * stencil[3] - stencil[4]) / (12.0 * h * h)
            rhs = potential * stencil[2]
            scale = max(abs(rhs), abs(d2), 1e-30)
            worst = max(worst, abs(d2 - rhs) / scale)
    return worst


def kdv_evolve(profile: Profile, c: float, tau: float,
               steps: int | None = None) -> Profile:
    """Evolve the profile under KdV, p_tau = (c/12) p_xxx - 3 p p_x.

    Pseudo-spectral integrating-factor RK4 with 2/3-rule dealiasing.  The
    step count is chosen so that the advective CFL number stays under the
    RK4 imaginary-axis limit; passing an explicit ``steps`` that violates
    it raises :class:`StabilityError`.  Cnoidal waves translate rigidly:
    p(x, tau) = p(x - v tau, 0) with v from :func:`cnoidal_speed`.
    """
    if c == 0.0:
        raise DomainError("central charge c must be nonzero")
    if tau == 0.0:
        return profile
    samples = profile.samples.astype(float)
    n = samples.size
    k = np.arange(n // 2 + 1, dtype=float)
    kmax = k[-1]

    speed = 3.0 * float(np.max(np.abs(samples))) + 1e-30
    needed = int(math.ceil(abs(tau) * speed * kmax / _CFL_LIMIT)) + 1
    if steps is None:
        steps = max(needed, 16)
    elif steps < needed:
        raise StabilityError(
            f"steps={steps} violates the advective CFL bound (need >= {needed})")
    dt = tau / steps

    mask = k <= n // 3  # 2/3-rule: drop the top third before and after squaring
    L = (c / 12.0) * (1j * k) ** 3
    E = np.exp(L * dt / 2.0)
    E2 = E * E

    def nonlinear(ph):
        u = np.fft.irfft(np.where(mask, ph, 0.0), n)
        w = np.fft.rfft(u * u)
        return np.where(mask, -1.5j * k * w, 0.0)

    ph = np.fft.rfft(samples)
    for _ in range(steps):
        k1 = nonlinear(ph)
        k2 = nonlinear(E * (ph + 0.5 * dt * k1))
        k3 = nonlinear(E * ph + 0.5 * dt * k2)
        k4 = nonlinear(E2 * ph + dt * E * k3)
        ph = E2 * ph + (dt / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)
        if not np.all(np.isfinite(ph)):
            raise StabilityError("KdV step blew up; reduce the time step")
    return Profile.from_samples(np.fft.irfft(ph, n))
