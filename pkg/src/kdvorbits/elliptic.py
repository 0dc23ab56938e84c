"""Jacobi elliptic functions and complete elliptic integrals.

Everything downstream (Weierstrass functions, monodromy, band structure,
shoaling) is built on the four primitives in this module:

* ``ellint_K`` / ``ellint_E`` -- complete elliptic integrals via the
  arithmetic-geometric mean,
* ``jacobi`` -- real-argument sn/cn/dn by the descending Landen (AGM
  amplitude) recursion,
* ``jacobi_complex`` -- complex-argument sn/cn/dn assembled from two real
  evaluations (one at modulus parameter ``m``, one at ``1 - m``),
* ``dn_power_integral`` -- full-period integrals of even powers of dn.

Throughout the package the *parameter* convention is used: ``m`` is the
squared elliptic modulus, so ``sn(u, m) -> sin(u)`` as ``m -> 0`` and
``-> tanh(u)`` as ``m -> 1``.  All public entry points accept
``0 <= m < 1``; the degenerate hyperbolic case ``m == 1`` is reachable
internally (it is what the complementary-parameter evaluations at
``1 - m`` turn into when ``m == 0``).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "JacobiTriple",
    "ellint_K",
    "ellint_E",
    "jacobi",
    "jacobi_complex",
    "dn_power_integral",
]

# Stop the AGM once c_n is below this; the truncation error of the
# amplitude recursion is of the same order.
_AGM_TOL = 4e-16
_AGM_MAX_ITER = 40

# Reject complex evaluations closer than this to a pole of sn/cn/dn.
_POLE_TOL = 1e-9


class JacobiTriple(NamedTuple):
    """The values sn(u|m), cn(u|m), dn(u|m) for a common argument."""

    sn: float | complex | np.ndarray
    cn: float | complex | np.ndarray
    dn: float | complex | np.ndarray


def _check_parameter(m: float, *, allow_one: bool = False) -> float:
    m = float(m)
    if math.isnan(m) or m < 0.0 or m > 1.0 or (m == 1.0 and not allow_one):
        upper = "<= 1" if allow_one else "< 1"
        raise DomainError(f"elliptic parameter must satisfy 0 <= m {upper}, got {m!r}")
    return m


@lru_cache(maxsize=None)
def _agm_chain(m: float) -> tuple[tuple[float, ...], tuple[float, ...], float]:
    """AGM sequence for parameter m: (a_n), (c_n), and sum 2^(n-1) c_n^2.

    Seeds a0 = 1, b0 = sqrt(1 - m), c0 = sqrt(m); then
    a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n), c_{n+1} = (a_n - b_n)/2.
    Convergence is quadratic, so ten or so rounds suffice even for
    m = 1 - 1e-15.
    """
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq = [a]
    c_seq = [c]
    csum = 0.5 * c * c
    power = 0.5
    for _ in range(_AGM_MAX_ITER):
        if abs(c) <= _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        a_seq.append(a)
        c_seq.append(c)
        csum += power * c * c
    return tuple(a_seq), tuple(c_seq), csum


def ellint_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m).

    K(m) = integral_0^{pi/2} dt / sqrt(1 - m sin^2 t), computed as
    pi / (2 * agm(1, sqrt(1-m))).  Relative accuracy is a few ulp for
    every m in [0, 1); K diverges (like -log sqrt(1-m) + log 4) at m = 1.
    """
    m = _check_parameter(m)
    a_seq, _, _ = _agm_chain(m)
    return math.pi / (2.0 * a_seq[-1])


def ellint_E(m: float) -> float:
    """Complete elliptic integral of the second kind, E(m).

    E(m) = integral_0^{pi/2} sqrt(1 - m sin^2 t) dt, from the same AGM
    chain as K via E = K * (1 - sum_n 2^(n-1) c_n^2).  E(1) = 1 exactly.
    """
    m = _check_parameter(m, allow_one=True)
    if m == 1.0:
        return 1.0
    a_seq, _, csum = _agm_chain(m)
    K = math.pi / (2.0 * a_seq[-1])
    return K * (1.0 - csum)


# ---------------------------------------------------------------------------
# Real-argument sn/cn/dn: descending Landen amplitude recursion.
# ---------------------------------------------------------------------------


def _jacobi_scalar(u: float, m: float) -> tuple[float, float, float]:
    """sn, cn, dn for one real argument; m may be anything in [0, 1]."""
    if m == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if m == 1.0:
        s = math.tanh(u)
        c = 1.0 / math.cosh(u)
        return s, c, c

    a_seq, c_seq, _ = _agm_chain(m)
    n_last = len(a_seq) - 1
    # Range-reduce modulo the real period 4K before amplifying by 2^N,
    # otherwise sin() gets fed huge arguments and accuracy degrades.
    four_k = 2.0 * math.pi / a_seq[-1]
    u = u - four_k * round(u / four_k)
    phi = math.ldexp(a_seq[-1] * u, n_last)
    for n in range(n_last, 0, -1):
        t = (c_seq[n] / a_seq[n]) * math.sin(phi)
        t = min(1.0, max(-1.0, t))
        phi = 0.5 * (phi + math.asin(t))
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def _jacobi_array(u: np.ndarray, m: float) -> tuple[np.ndarray, ...]:
    """Vectorized counterpart of :func:`_jacobi_scalar`."""
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        s = np.tanh(u)
        c = 1.0 / np.cosh(u)
        return s, c, c.copy()

    a_seq, c_seq, _ = _agm_chain(m)
    n_last = len(a_seq) - 1
    four_k = 2.0 * math.pi / a_seq[-1]
    u = u - four_k * np.round(u / four_k)
    phi = np.ldexp(a_seq[-1] * u, n_last)
    for n in range(n_last, 0, -1):
        t = np.clip((c_seq[n] / a_seq[n]) * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(t))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def _jacobi_real(u, m: float):
    """Internal dispatcher: accepts 0 <= m <= 1 and scalar/array u."""
    if np.ndim(u) == 0 and not isinstance(u, np.ndarray):
        return _jacobi_scalar(float(u), m)
    arr = np.asarray(u, dtype=float)
    return _jacobi_array(arr, m)


def jacobi(u, m: float) -> JacobiTriple:
    """Jacobi sn, cn, dn for real argument(s) ``u`` and parameter ``m``.

    Implemented by the AGM/descending-Landen amplitude recursion:
    phi_N = 2^N a_N u, then phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n))/2,
    with sn = sin(phi_0), cn = cos(phi_0), dn = sqrt(1 - m sn^2).
    Accepts scalars or arrays; scalar in, floats out.
    """
    m = _check_parameter(m)
    s, c, d = _jacobi_real(u, m)
    return JacobiTriple(s, c, d)


# ---------------------------------------------------------------------------
# Complex argument: split through real evaluations at m and 1 - m.
# ---------------------------------------------------------------------------


def jacobi_complex(z: complex, m: float) -> JacobiTriple:
    """Jacobi sn, cn, dn for a complex argument.

    With s, c, d = sn, cn, dn(Re z | m) and s1, c1, d1 = sn, cn, dn(Im z | 1-m):

        den = c1^2 + m s^2 s1^2
        sn(z) = (s d1 + i c d s1 c1) / den
        cn(z) = (c c1 - i s d s1 d1) / den
        dn(z) = (d c1 d1 - i m s c s1) / den

    The argument is first reduced modulo the common period lattice
    (4K, 4iK') of the three functions.  Arguments within 1e-9 of a pole
    (z = 2nK + (2n'+1) i K') raise :class:`PoleError`.
    """
    m = _check_parameter(m)
    z = complex(z)
    K = ellint_K(m)
    Kc = ellint_K(1.0 - m)

    x = z.real - 4.0 * K * round(z.real / (4.0 * K))
    y = z.imag - 4.0 * Kc * round(z.imag / (4.0 * Kc))

    # Poles of sn/cn/dn within the reduced cell [-2K,2K) x [-2K',2K').
    dist = min(
        math.hypot(x - px, y - py)
        for px in (-2.0 * K, 0.0, 2.0 * K)
        for py in (-Kc, Kc)
    )
    if dist < _POLE_TOL:
        raise PoleError(f"jacobi_complex evaluated within {dist:.2e} of a pole")

    s, c, d = _jacobi_scalar(x, m)
    s1, c1, d1 = _jacobi_scalar(y, 1.0 - m)
    den = c1 * c1 + m * s * s * s1 * s1
    sn = complex(s * d1, c * d * s1 * c1) / den
    cn = complex(c * c1, -s * d * s1 * d1) / den
    dn = complex(d * c1 * d1, -m * s * c * s1) / den
    return JacobiTriple(sn, cn, dn)


# ---------------------------------------------------------------------------
# Full-period integrals of dn^N.
# ---------------------------------------------------------------------------


def dn_power_integral(N: int, m: float) -> float:
    """Integral of dn^N(u|m) over a full real period, u in [0, 2K].

    Seeds I_0 = 2K, I_2 = 2E and the three-term recursion

        (N+1) I_{N+2} = 2N(2-m) I_N/... (written for the step N -> N+2):
        (n+1) I_{n+2} = (2-m) n I_n + (m-1)(n-1) I_{n-2},

    obtained by integrating d/du [sn cn dn^(n-1)] over the period.
    Only even N >= 0 are supported (odd powers integrate to 2K-periodic
    combinations that this package never needs).
    """
    if not isinstance(N, (int, np.integer)) or N < 0 or N % 2:
        raise DomainError(f"dn_power_integral expects an even integer N >= 0, got {N!r}")
    m = _check_parameter(m)
    I_prev = 2.0 * ellint_K(m)  # I_0
    if N == 0:
        return I_prev
    I_curr = 2.0 * ellint_E(m)  # I_2
    n = 2
    while n < N:
        I_prev, I_curr = I_curr, ((2.0 - m) * n * I_curr + (m - 1.0) * (n - 1) * I_prev) / (n + 1)
        n += 2
    return I_curr


# ---------------------------------------------------------------------------
# Jacobi epsilon function (integral of dn^2); internal helper used by the
# Weierstrass zeta closed form.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _dn2_integral_segment(r: float, m: float) -> float:
    """integral_0^r dn^2(t|m) dt for |r| <= K(m), by composite Gauss-Legendre.

    dn^2 is analytic in a strip of half-width K'(m) >= pi/2 about the real
    axis, so 24-point panels of width <= 1 converge far past double
    precision.
    """
    if r == 0.0:
        return 0.0
    sign = 1.0 if r > 0 else -1.0
    r = abs(r)
    panels = max(1, math.ceil(r / 1.0))
    nodes, weights = _gl_rule(24)
    edges = np.linspace(0.0, r, panels + 1)
    widths = np.diff(edges)
    ts = (edges[:-1, None] + widths[:, None] * nodes[None, :]).ravel()
    _, _, dn = _jacobi_array(ts, m)
    vals = (dn * dn).reshape(panels, -1)
    return sign * float(np.sum(vals @ weights * widths))


def _jacobi_epsilon(u: float, m: float) -> float:
    """Jacobi epsilon function: integral_0^u dn^2(t|m) dt.

    Quasi-periodic, eps(u + 2K) = eps(u) + 2E; reduced to a base interval
    and finished by quadrature.  Supports m = 1, where it is tanh(u).
    """
    if m == 1.0:
        return math.tanh(u)
    K = ellint_K(m)
    E = ellint_E(m)
    n = round(u / (2.0 * K))
    r = u - 2.0 * K * n
    return 2.0 * E * n + _dn2_integral_segment(r, m)
