"""Transfer matrices, half-traces and the Fibonacci trace map.

Half-traces are computed with the scalar triple recursion

    x_{k+1} = 2 x_k x_{k-1} - x_{k-2},   x_{-1} = 1, x_0 = E/2, x_1 = (E - lam)/2

which works unchanged on Python floats, numpy arrays and ``mpmath.mpf``
values. Float inputs are clamped at +-HUGE so that deep levels far outside
the spectrum keep a usable sign instead of turning into nan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import DomainError

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
MU = (1.0 + math.sqrt(5.0)) / 2.0
MU0 = (7.0 + 3.0 * math.sqrt(5.0)) / 2.0

HUGE = 1e150


@lru_cache(maxsize=None)
def fibonacci(k: int) -> int:
    """F_{-1} = 0, F_0 = 1, F_k = F_{k-1} + F_{k-2}."""
    if k < -1:
        raise DomainError(f"fibonacci index must be >= -1, got {k}")
    a, b = 0, 1
    for _ in range(k + 1):
        a, b = b, a + b
    return a


def approximant_alpha(k: int) -> Fraction:
    """Rotation number F_{k-1}/F_k of the level-k periodic approximant."""
    if k < 0:
        raise DomainError(f"approximant level must be >= 0, got {k}")
    return Fraction(fibonacci(k - 1), fibonacci(k))


def _is_float_like(x) -> bool:
    return isinstance(x, (float, np.floating, np.ndarray))


def _clamp(x):
    if isinstance(x, np.ndarray):
        return np.clip(x, -HUGE, HUGE, out=x)
    if isinstance(x, (float, np.floating)):
        return min(max(x, -HUGE), HUGE) if x == x else x
    return x


def half_trace(E, lam, k: int):
    """x_k(E, lam) = tr(M_k)/2 via the triple recursion, O(k) operations."""
    return trace_values(E, lam, k)[1]


def trace_values(E, lam, k: int):
    """Return (x_{k-1}, x_k, x_{k+1}) at (E, lam).

    k = -1 gives (x_{-2}, x_{-1}, x_0) where x_{-2} is defined by running the
    recursion backwards: x_{-2} = 2 x_{-1} x_0 - x_1 = (E + lam)/2.
    """
    if k < -1:
        raise DomainError(f"level must be >= -1, got {k}")
    if isinstance(E, (list, tuple)):
        E = np.asarray(E, dtype=float)
    if isinstance(E, (int, Fraction)):
        E = float(E)
    one = E * 0 + 1
    a, b, c = one, E / 2, (E - lam) / 2
    if k == -1:
        return (E + lam) / 2, a, b
    clamp = _is_float_like(E) or _is_float_like(lam)
    for _ in range(k):
        a, b, c = b, c, 2 * c * b - a
        if clamp:
            c = _clamp(c)
    return a, b, c


def half_trace_derivative(E, lam, k: int):
    """(x_k, dx_k/dE) by differentiating the recursion; float or mpf input."""
    if k < -1:
        raise DomainError(f"level must be >= -1, got {k}")
    one = E * 0 + 1
    a, b, c = one, E / 2, (E - lam) / 2
    da, db, dc = 0 * one, one / 2, one / 2
    if k == -1:
        return a, da
    if k == 0:
        return b, db
    for _ in range(k - 1):
        a, b, c, da, db, dc = b, c, 2 * c * b - a, db, dc, 2 * (dc * b + c * db) - da
    return c, dc


@dataclass(frozen=True)
class TraceTriple:
    coupling: float
    energy: float
    level: int
    values: tuple

    def invariant(self):
        """Fricke-Vogt combination; equals 1 + lam^2/4 on every orbit."""
        zm, z, zp = self.values
        return zp * zp + z * z + zm * zm - 2 * zp * z * zm


def trace_triple(E, lam, k: int) -> TraceTriple:
    return TraceTriple(lam, E, k, tuple(trace_values(E, lam, k)))


@dataclass(frozen=True)
class TransferMatrix:
    level: int
    entries: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    @property
    def half_trace(self) -> float:
        return 0.5 * float(np.trace(self.entries))


def transfer_matrix(E: float, lam: float, k: int, dps: int | None = None) -> TransferMatrix:
    """M_k from the seeds M_{-1}, M_0 and M_k = M_{k-2} M_{k-1}.

    In binary64 the products lose accuracy where the entries are large but the
    trace is O(1) (inside bands at deep k). With ``dps`` the products run in
    mpmath and only the result is rounded.
    """
    if k < -1:
        raise DomainError(f"level must be >= -1, got {k}")
    if dps is not None:
        with mpmath.workdps(dps):
            e, g = mpmath.mpf(E), mpmath.mpf(lam)
            m_prev = mpmath.matrix([[1, -g], [0, 1]])
            m = mpmath.matrix([[e, -1], [1, 0]])
            if k == -1:
                m = m_prev
            for _ in range(max(k, 0)):
                m_prev, m = m, m_prev * m
            entries = np.array([[float(m[i, j]) for j in range(2)] for i in range(2)])
        return TransferMatrix(k, entries)
    m_prev = np.array([[1.0, -lam], [0.0, 1.0]])
    m = np.array([[E, -1.0], [1.0, 0.0]])
    if k == -1:
        return TransferMatrix(-1, m_prev)
    for _ in range(k):
        m_prev, m = m, m_prev @ m
    return TransferMatrix(k, m)


def site_transfer_product(E: float, potentials) -> np.ndarray:
    """Product T(V_q) ... T(V_1) of one-step matrices [[E - V, -1], [1, 0]]."""
    m = np.eye(2)
    for v in potentials:
        m = np.array([[E - v, -1.0], [1.0, 0.0]]) @ m
    return m


def potential(lam: float, omega, n: int, alpha_value=ALPHA) -> float:
    """lam * chi_[1-a, 1)(n a + omega mod 1).

    Rational ``alpha_value`` and ``omega`` are reduced exactly, so approximant
    potentials never misclassify a site sitting on an interval endpoint.
    """
    if isinstance(alpha_value, Rational) and isinstance(omega, Rational):
        a = Fraction(alpha_value)
        if not 0 <= a <= 1:
            raise DomainError(f"alpha_value must lie in [0, 1], got {a}")
        t = (n * a + Fraction(omega)) % 1
        return float(lam) if 1 - a <= t < 1 else 0.0
    a = float(alpha_value)
    if not 0 <= a <= 1:
        raise DomainError(f"alpha_value must lie in [0, 1], got {a}")
    t = (n * a + float(omega)) % 1.0
    return float(lam) if 1 - a <= t < 1 else 0.0


def approximant_potential(lam: float, k: int) -> np.ndarray:
    """V_k(1), ..., V_k(F_k): one period of the level-k approximant at omega = 0."""
    a = approximant_alpha(k)
    return np.array([potential(lam, 0, j, a) for j in range(1, fibonacci(k) + 1)])


class Point3(NamedTuple):
    x: float
    y: float
    z: float


def trace_map(p) -> Point3:
    x, y, z = p
    return Point3(2 * x * y - z, x, y)


def trace_map_inverse(p) -> Point3:
    x, y, z = p
    return Point3(y, z, 2 * y * z - x)


def fricke_vogt(p) -> float:
    """G(x, y, z) = x^2 + y^2 + z^2 - 2xyz - 1; S_lam is the level set lam^2/4."""
    x, y, z = p
    return x * x + y * y + z * z - 2 * x * y * z - 1


def line_point(E, lam) -> Point3:
    """L_lam(E) = ((E - lam)/2, E/2, 1), the initial condition (x_1, x_0, x_{-1})."""
    return Point3((E - lam) / 2, E / 2, E * 0 + 1.0)
