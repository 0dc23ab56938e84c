"""Deterministic command-line front end.

Every figure-class quantity in the library is reachable from here as
CSV (default) or JSON (``--json``), written to stdout or ``--out PATH``.
The same invocation always produces the same bytes: fixed column order,
fixed row order, floats printed with 17 significant digits, booleans as
``true``/``false``, infinities as ``inf``/``-inf``.

Commands::

    classify            orbit data of one cnoidal wave (m, V)
    diagram             classifier sweep over an (m, V) grid
    level-curve         V(m) along one level curve of kc
    band                dispersion scan (E, kappa_ell, in_gap, winding)
    shoal               shoaling path over a bathymetry profile
    check-asymptotics   convergence-order battery for every expansion
    profile             sampled cnoidal Hill potential
    oracle              closed form vs. numerical Floquet cross-check

Exit codes: 0 on success, 2 on a domain error, 3 on a numerical
failure; the error is reported on stderr as a one-line JSON object
``{"error": <class>, "message": <text>}``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np
import scipy.special as sp
from scipy.optimize import brentq

from .asymptotics import (
    K_asymptotes,
    V_near_m0,
    V_near_m1,
    degenerate_zeta,
    exceptional_V_asymptote,
    k_large_V,
    k_near_wedge,
    one_minus_m_nonperturbative,
)
from .bands import _TANGENCY, _floquet_traces, crystal_momentum
from .errors import DomainError, NumericalError
from .hill import floquet_monodromy, kdv_evolve, winding_number
from .orbits import (
    classify,
    cnoidal_profile,
    level_curve,
    monodromy_trace,
    uniform_representative,
)
from .profiles import grid
from .shoaling import read_bathymetry, shoaling_path
from .weierstrass import lattice, zeta

_GRID_LIMIT = 4096


# ---------------------------------------------------------------- output

def _fmt(value) -> str:
    """One CSV cell: %.17g floats, lowercase booleans, plain ints."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _table(args, columns, rows, extra=None) -> str:
    if args.json:
        payload = {"columns": list(columns), "rows": [list(r) for r in rows]}
        if extra:
            payload.update(extra)
        return _json_text(payload)
    return _csv(columns, rows)


def _axis(lo: float, hi: float, n: int, name: str) -> np.ndarray:
    if not 0 <= n <= _GRID_LIMIT:
        raise DomainError(
            f"{name} grid size must lie in [0, {_GRID_LIMIT}], got {n}")
    if n == 0:
        return np.empty(0)
    if n == 1:
        return np.array([float(lo)])
    return np.linspace(float(lo), float(hi), n)


# -------------------------------------------------------------- commands

def _cmd_classify(args) -> str:
    trace = monodromy_trace(args.m, args.V)
    rep = uniform_representative(args.m, args.V)
    label = classify(args.m, args.V)
    return _json_text({
        "trace": trace,
        "kc_real": rep.kc.real,
        "kc_imag": rep.kc.imag,
        "has_rest_frame": rep.has_rest_frame,
        "class": label.kind.value,
        "winding": label.winding,
    })


_DIAGRAM_COLUMNS = ("m", "V", "trace", "kc_real", "kc_imag", "class",
                    "winding")


def _cmd_diagram(args) -> str:
    ms = _axis(args.m_range[0], args.m_range[1], args.grid[0], "m")
    vs = _axis(args.V_range[0], args.V_range[1], args.grid[1], "V")
    rows = []
    for m in ms:           # row-major: m is the outer loop
        for v in vs:
            rep = uniform_representative(m, v)
            label = classify(m, v)
            rows.append([float(m), float(v), monodromy_trace(m, v),
                         rep.kc.real, rep.kc.imag, label.kind.value,
                         label.winding])
    return _table(args, _DIAGRAM_COLUMNS, rows)


def _cmd_level_curve(args) -> str:
    ms = _axis(args.m_min, args.m_max, args.m_samples, "m")
    rows = [[float(m), level_curve(args.kc, m, args.region)] for m in ms]
    return _table(args, ("m", "V"), rows)


_BAND_COLUMNS = ("E", "kappa_ell", "in_gap", "winding")


def _band_rows_closed_form(energies, m: float) -> list:
    rows = []
    for e in energies:
        point = crystal_momentum(e, m)
        wind = int(math.floor(point.kappa_ell_extended.real / math.pi + 1e-9))
        rows.append([float(e), point.kappa_ell, point.in_gap, wind])
    return rows


def _band_rows_scanned(energies, N: int, m: float) -> list:
    traces = _floquet_traces(np.asarray(energies, float),
                             N * (N + 1) * m, lattice(m).K, m)
    forbidden = np.abs(traces) > 2.0
    kappa = np.arccos(np.clip(traces / 2.0, -1.0, 1.0))

    # The winding column counts resolved gaps: runs of forbidden samples
    # that neither start at E = 0 (below the spectrum) nor merely graze
    # |Tr| = 2.  Rows in and above the g-th such run are labeled g.
    winding = np.zeros(len(traces), dtype=int)
    count = 0
    j = 0
    while j < len(traces):
        if not forbidden[j]:
            winding[j] = count
            j += 1
            continue
        j0 = j
        while j < len(traces) and forbidden[j]:
            j += 1
        peak = float(np.max(np.abs(traces[j0:j]))) - 2.0
        if j0 > 0 and peak > _TANGENCY:
            count += 1
        winding[j0:j] = count
    return [[float(e), float(k), bool(f), int(w)]
            for e, k, f, w in zip(energies, kappa, forbidden, winding)]


def _cmd_band(args) -> str:
    if args.N < 1:
        raise DomainError(f"Lame index N must be >= 1, got {args.N}")
    if not args.E_max > 0.0:
        raise DomainError(f"E_max must be positive, got {args.E_max!r}")
    energies = _axis(0.0, args.E_max, args.samples, "E")
    if args.N == 1:
        rows = _band_rows_closed_form(energies, args.m)
    else:
        rows = _band_rows_scanned(energies, args.N, args.m)
    return _table(args, _BAND_COLUMNS, rows)


_SHOAL_COLUMNS = ("X", "h", "lambda", "m", "V", "kc_real", "kc_imag",
                  "class", "winding", "in_wedge", "epsilon", "speed")


def _cmd_shoal(args) -> str:
    xs, hs = read_bathymetry(args.bathymetry)
    path = shoaling_path(hs, args.T, args.F, args.rho, args.g)
    rows = []
    for x, p in zip(xs, path.points):
        rows.append([float(x), p.h, p.lam, p.m, p.V, p.kc.real, p.kc.imag,
                     p.orbit.kind.value, p.orbit.winding, p.in_wedge,
                     p.epsilon, p.speed])
    extra = {"entry_index": path.entry_index,
             "crossing_depth": path.crossing_depth}
    return _table(args, _SHOAL_COLUMNS, rows, extra=extra)


def _cmd_profile(args) -> str:
    if not 0 < args.samples <= _GRID_LIMIT:
        raise DomainError(
            f"samples must lie in [1, {_GRID_LIMIT}], got {args.samples}")
    prof = cnoidal_profile(args.m, args.V, args.c, n=args.samples)
    xs = grid(args.samples)
    rows = [[float(x), float(p)] for x, p in zip(xs, prof.samples)]
    return _table(args, ("x", "p"), rows)


def _cmd_oracle(args) -> str:
    prof = cnoidal_profile(args.m, args.V, args.c)
    closed = monodromy_trace(args.m, args.V)
    floquet = float(np.trace(floquet_monodromy(prof, args.c)))
    tau = 1e-4
    evolved = kdv_evolve(prof, args.c, tau)
    expected = cnoidal_profile(args.m, args.V, args.c, tau=tau)
    drift = float(np.max(np.abs(evolved.samples - expected.samples)))
    return _json_text({
        "closed_trace": closed,
        "floquet_trace": floquet,
        "winding_closed": classify(args.m, args.V).winding,
        "winding_numeric": winding_number(prof, args.c),
        "kdv_translation_error": drift,
    })


# ------------------------------------------- the convergence-order battery

def _exact_kc(m: float, V: float) -> float:
    return uniform_representative(m, V).kc.real


def _m_for_nome_sq(target: float) -> float:
    def gap(m):
        lat = lattice(m)
        return math.exp(-2.0 * math.pi * lat.Kc / lat.K) - target

    return brentq(gap, 1e-8, 0.9)


def _invert_level_curve_m1(kc: float, V: float) -> float:
    """The 1 - m at which the deep level curve kc passes through V."""
    def defect(t):
        return level_curve(kc, 1.0 - 10.0**t, "below_wedge") - V

    return 10.0 ** brentq(defect, -15.5, -1.0)


def _ratio_check(name, errs, window) -> dict:
    errs = [float(e) for e in errs]
    ratio = errs[0] / errs[1]
    return {"name": name, "criterion": "ratio_in_window",
            "measured": errs, "ratio": ratio, "window": list(window),
            "ok": bool(window[0] <= ratio <= window[1])}


def _decreasing_check(name, values) -> dict:
    values = [float(v) for v in values]
    return {"name": name, "criterion": "decreasing",
            "measured": values, "ratio": None, "window": None,
            "ok": all(a > b for a, b in zip(values, values[1:]))}


def _cmd_check_asymptotics(args) -> str:
    checks = []

    def err_large(V):
        return abs(k_large_V(0.5, V).value - _exact_kc(0.5, V))
    checks.append(_ratio_check("k_large_V_first_order",
                               [err_large(500.0), err_large(1000.0)],
                               (1.5, 3.0)))

    def rel_exceptional(n):
        exact = level_curve(-n * n / 24.0, 0.2, "below_wedge")
        return abs(exceptional_V_asymptote(n, 0.2).value / exact - 1.0)
    checks.append(_ratio_check("exceptional_V_second_order",
                               [rel_exceptional(32), rel_exceptional(64)],
                               (3.0, 5.0)))

    e2 = lattice(0.5).e2

    def err_wedge(nu):
        return abs(k_near_wedge(0.5, e2 - nu, "lower").value
                   - _exact_kc(0.5, e2 - nu))
    checks.append(_ratio_check("k_near_wedge_linear",
                               [err_wedge(2e-5), err_wedge(1e-5)],
                               (1.5, 3.0)))

    def rel_nonpert(dv):
        predicted = one_minus_m_nonperturbative(-4.0 / 24.0,
                                                -2.0 / 3.0 - dv).value
        actual = _invert_level_curve_m1(-4.0 / 24.0, -2.0 / 3.0 - dv)
        return abs(predicted / actual - 1.0)
    checks.append(_decreasing_check("one_minus_m_nonperturbative_sharpens",
                                    [rel_nonpert(0.02), rel_nonpert(0.01)]))

    def err_m1(g):
        return abs(V_near_m1(0.05, 1.0 - g).value
                   - level_curve(0.05, 1.0 - g, "above_wedge"))
    checks.append(_ratio_check("V_near_m1_second_order",
                               [err_m1(2e-4), err_m1(1e-4)], (3.0, 5.0)))

    def err_m0(m):
        return abs(V_near_m0(0.1, m).value
                   - level_curve(0.1, m, "above_wedge"))
    checks.append(_ratio_check("V_near_m0_second_order",
                               [err_m0(0.01), err_m0(0.005)], (3.0, 5.0)))

    def rel_zeta(q2):
        m = _m_for_nome_sq(q2)
        lat = lattice(m)
        z = 0.37 * lat.K
        exact = zeta(z, lat)
        return abs(degenerate_zeta(z, m, "m_to_0").value - exact) / abs(exact)
    checks.append(_ratio_check("degenerate_zeta_quartic_in_nome",
                               [rel_zeta(1e-4), rel_zeta(5e-5)], (3.0, 5.0)))

    def errs_K(g):
        big, small = K_asymptotes(1.0 - g)
        return (abs(big.value - sp.ellipkm1(g)),
                abs(small.value - sp.ellipk(g)))
    big_1, small_1 = errs_K(1e-5)
    big_2, small_2 = errs_K(5e-6)
    checks.append(_ratio_check("K_log_branch_first_order",
                               [big_1, big_2], (1.5, 3.0)))
    checks.append(_ratio_check("K_complement_second_order",
                               [small_1, small_2], (3.0, 5.0)))

    return _json_text({"checks": checks,
                       "all_ok": all(c["ok"] for c in checks)})


# ------------------------------------------------------------ the parser

def _add_output_flags(sub):
    sub.add_argument("--json", action="store_true",
                     help="emit JSON instead of CSV")
    sub.add_argument("--out", metavar="PATH", default=None,
                     help="write to PATH instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvorbits",
        description="Coadjoint orbits of cnoidal waves: classification, "
                    "band structure, asymptotics, and shoaling.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("classify", help="orbit data of one wave (m, V)")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--V", type=float, required=True)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_classify)

    p = subs.add_parser("diagram", help="classifier sweep over an (m, V) grid")
    p.add_argument("--m-range", nargs=2, type=float, required=True,
                   metavar=("LO", "HI"))
    p.add_argument("--V-range", nargs=2, type=float, required=True,
                   metavar=("LO", "HI"), dest="V_range")
    p.add_argument("--grid", nargs=2, type=int, required=True,
                   metavar=("NM", "NV"),
                   help=f"points per axis, each at most {_GRID_LIMIT}")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_diagram)

    p = subs.add_parser("level-curve", help="V(m) along a level curve of kc")
    p.add_argument("--kc", type=float, required=True)
    p.add_argument("--region", choices=("below_wedge", "above_wedge"),
                   required=True)
    p.add_argument("--m-samples", type=int, required=True)
    p.add_argument("--m-min", type=float, default=0.0)
    p.add_argument("--m-max", type=float, default=0.99)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_level_curve)

    p = subs.add_parser("band", help="dispersion scan of the Lame-N operator")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--E-max", type=float, required=True, dest="E_max")
    p.add_argument("--samples", type=int, default=512)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_band)

    p = subs.add_parser("shoal", help="shoaling path over a bathymetry CSV")
    p.add_argument("--bathymetry", required=True, metavar="CSV",
                   help="two-column (X, h) file with a header row")
    p.add_argument("--T", type=float, required=True, help="wave period [s]")
    p.add_argument("--F", type=float, required=True,
                   help="energy transport [N]")
    p.add_argument("--rho", type=float, default=1025.0,
                   help="water density [kg/m^3]")
    p.add_argument("--g", type=float, default=9.81,
                   help="gravitational acceleration [m/s^2]")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_shoal)

    p = subs.add_parser("check-asymptotics",
                        help="convergence-order battery, JSON report")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_check_asymptotics)

    p = subs.add_parser("profile", help="sampled cnoidal Hill potential")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--V", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--samples", type=int, default=512)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_profile)

    p = subs.add_parser("oracle",
                        help="closed form vs. numerical Floquet cross-check")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--V", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = args.handler(args)
    except (DomainError, OSError) as exc:
        _report_error(exc)
        return 2
    except NumericalError as exc:
        _report_error(exc)
        return 3
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    return 0


def _report_error(exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                 "message": str(exc)}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
