"""Trace-map orbits, the period-2 curve near (1, 1, 1), and the lam = 0 torus factor."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .trace_core import MU0, Point3, fricke_vogt, line_point, trace_map

MAX_ITER_CAP = 10**6


@dataclass(frozen=True)
class OrbitResult:
    escaped: bool
    steps: int
    final_point: Point3
    max_coordinate: float


def escape_threshold(lam: float) -> float:
    return 1.0 + lam / 2.0 + 2.0


def escape_time(p, max_iter: int, lam: float | None = None) -> OrbitResult:
    """Iterate T until the orbit provably runs off, or ``max_iter`` steps.

    Escape is declared once the two leading coordinates both exceed 1 in
    absolute value and the running coordinate maximum exceeds 3 + lam/2.
    When ``lam`` is omitted it is read off the surface, lam = 2 sqrt(G(p)).
    ``escaped=False`` only means bounded so far.
    """
    if not 0 <= max_iter <= MAX_ITER_CAP:
        raise DomainError(f"max_iter must be in 0..{MAX_ITER_CAP}, got {max_iter}")
    if lam is None:
        lam = 2.0 * math.sqrt(max(fricke_vogt(p), 0.0))
    limit = escape_threshold(lam)
    x, y, z = (float(c) for c in p)
    peak = max(abs(x), abs(y), abs(z))
    for step in range(1, max_iter + 1):
        x, y, z = 2 * x * y - z, x, y
        peak = max(peak, abs(x))
        if abs(x) > 1 and abs(y) > 1 and peak > limit:
            return OrbitResult(True, step, Point3(x, y, z), peak)
    return OrbitResult(False, max_iter, Point3(x, y, z), peak)


def spectrum_member(lam: float, E: float, max_iter: int) -> bool:
    """One-sided test for E in Sigma_lam: the orbit of L_lam(E) has not escaped."""
    return not escape_time(line_point(float(E), float(lam)), max_iter, lam).escaped


def escape_raster(lam: float, energies, max_iter: int) -> list:
    """(E, escape step or None) along the line of initial conditions."""
    out = []
    for E in energies:
        r = escape_time(line_point(float(E), float(lam)), max_iter, lam)
        out.append((float(E), r.steps if r.escaped else None))
    return out


# ---------------------------------------------------------------- period 2


@dataclass(frozen=True)
class Period2Point:
    coupling: float
    x: float
    point: Point3
    mu_u: float


def per2_point(x: float) -> Point3:
    return Point3(x, x / (2 * x - 1), x)


def _per2_constraint(x: float) -> tuple:
    """G on the period-2 curve and its x-derivative."""
    y = x / (2 * x - 1)
    dy = -1.0 / (2 * x - 1) ** 2
    g = 2 * x * x + y * y - 2 * x * x * y - 1
    dg = 4 * x + 2 * y * dy - 4 * x * y - 2 * x * x * dy
    return g, dg


def per2_solve(lam: float, tol: float = 1e-13, max_steps: int = 100) -> Period2Point:
    """Period-2 point (x, x/(2x-1), x) on S_lam with x > 1 near the singularity.

    Newton from x = 1 + lam/(2 sqrt 5), kept inside a sign bracket and falling
    back to bisection whenever a step leaves it.
    """
    if lam < 0:
        raise DomainError(f"coupling must be >= 0, got {lam}")
    if lam >= 2:
        raise DomainError(f"per2_solve is a local solve near x = 1; needs lam < 2, got {lam}")
    target = lam * lam / 4.0
    if lam == 0:
        return Period2Point(0.0, 1.0, per2_point(1.0), unstable_multiplier(1.0))

    a, b = 1.0, 1.0 + lam / math.sqrt(5.0)
    while _per2_constraint(b)[0] - target <= 0:
        b = 1.0 + 2 * (b - 1.0)
    x = 1.0 + lam / (2.0 * math.sqrt(5.0))
    for _ in range(max_steps):
        g, dg = _per2_constraint(x)
        r = g - target
        if abs(r) <= tol:
            return Period2Point(float(lam), x, per2_point(x), unstable_multiplier(x))
        if r < 0:
            a = x
        else:
            b = x
        step = x - r / dg if dg != 0 else a - 1.0
        x = step if a < step < b else 0.5 * (a + b)
    raise ConvergenceError(f"per2_solve did not converge for lam={lam}")


def unstable_multiplier(x: float) -> float:
    """Largest eigenvalue of DT^2 at the period-2 point with first coordinate x."""
    if x == 0.5:
        raise DomainError("x = 1/2 is not on the period-2 curve")
    rad = -3 + 12 * x + 4 * x**2 - 32 * x**3 + 64 * x**4
    if rad < 0:
        raise DomainError(f"radicand {rad} < 0 at x = {x}")
    return (1 - 2 * x + 8 * x**2 + math.sqrt(rad)) / (2 * (2 * x - 1))


def dt(p) -> np.ndarray:
    x, y, _ = p
    return np.array([[2 * y, 2 * x, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def dt2_jacobian(p) -> np.ndarray:
    """D(T o T)(p) = DT(T(p)) DT(p)."""
    return dt(trace_map(p)) @ dt(p)


def dt2_per2_closed_form(x: float) -> np.ndarray:
    """DT^2 written out entrywise at the orbit point (x/(2x-1), x, x/(2x-1)).

    This is T applied to ``per2_point(x)``; the two points of the 2-cycle
    have conjugate DT^2, so the spectra agree.
    """
    d = 2 * x - 1
    return np.array([
        [2 * x * (4 * x - 1) / d, (4 * x - 1) / d**2, 2 * x / (1 - 2 * x)],
        [2 * x, 2 * x / d, -1.0],
        [1.0, 0.0, 0.0],
    ])


def multiplier_excess(lam: float) -> float:
    """mu_u(lam) - mu_0; positive for small lam > 0."""
    return per2_solve(lam).mu_u - MU0


# ---------------------------------------------------------------- torus factor


@dataclass(frozen=True)
class TorusPoint:
    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % 1.0)
        object.__setattr__(self, "phi", self.phi % 1.0)


CAT_MATRIX = np.array([[1, 1], [1, 0]])


def cat_map(t: TorusPoint) -> TorusPoint:
    return TorusPoint(t.theta + t.phi, t.theta)


def semiconjugacy(t: TorusPoint) -> Point3:
    """F(theta, phi) = (cos 2pi(theta + phi), cos 2pi theta, cos 2pi phi)."""
    tau = 2 * math.pi
    return Point3(math.cos(tau * (t.theta + t.phi)), math.cos(tau * t.theta),
                  math.cos(tau * t.phi))


def semiconjugacy_defect(t: TorusPoint) -> float:
    """max |F(A t) - T(F t)| over the three coordinates."""
    lhs = semiconjugacy(cat_map(t))
    rhs = trace_map(semiconjugacy(t))
    return max(abs(u - v) for u, v in zip(lhs, rhs))
