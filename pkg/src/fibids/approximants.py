"""Band spectra sigma_k = {E : |x_k(E)| <= 1} of the periodic approximants.

Two constructions are provided:

* ``build_band_tree`` (lam > 4) grows the A/B containment hierarchy level by
  level. Every bracket it searches holds exactly one band of the target level,
  so x_n changes sign exactly once inside it and plain bisection isolates the
  band without any grid.
* ``scan_bands`` (any lam >= 0) brackets the F_n bands between consecutive
  Dirichlet eigenvalues of the period, which interlace with the bands.

``periodic_hamiltonian_eigs`` is the independent dense-matrix oracle.
"""
from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import (
    DomainError,
    ResolutionError,
    ResourceError,
    StructuralError,
    UnsupportedCouplingError,
)
from .trace_core import approximant_potential, fibonacci, half_trace

TREE_LEVEL_CAP = 20
SCAN_LEVEL_CAP = 18
EIG_SIZE_CAP = 2000
MP_EIG_SIZE_CAP = 144
COUPLING_CAP = 1e4
SCAN_MARGIN = 1e-6
# widths below this many ulps trigger the switch to mpmath in "auto" mode
MIN_ULPS = 2.0**20
# |x_n| within TOUCH_TOL of 1 at a bracket end within TOUCH_GAP of the edge = touching bands
TOUCH_TOL = 1e-10
TOUCH_GAP = 1e-7


class Kind(str, enum.Enum):
    A = "A"
    B = "B"
    UNLABELED = "U"


@dataclass(frozen=True)
class Band:
    """One closed band [lo, hi] of sigma_level.

    ``lo``/``hi`` are floats, or ``mpmath.mpf`` when the band was resolved in
    extended precision. ``residuals`` holds x_level - (+-1) at the stored
    edges, kept for auditing the bisection.
    """

    level: int
    index: int
    kind: Kind
    lo: object
    hi: object
    parent: Optional["Band"] = field(default=None, repr=False, compare=False)
    residuals: tuple = field(default=(0.0, 0.0), repr=False, compare=False)

    @property
    def length(self) -> float:
        return float(self.hi - self.lo)

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, other: "Band", strict: bool = True) -> bool:
        if strict:
            return self.lo < other.lo and other.hi < self.hi
        return self.lo <= other.lo and other.hi <= self.hi

    def key(self) -> tuple:
        return (self.level, self.index)


@dataclass(frozen=True)
class BandTree:
    coupling: float
    max_level: int
    levels: tuple
    dps: Optional[int] = None  # working precision used from ``mp_from_level`` on
    mp_from_level: Optional[int] = None

    def bands(self, level: int) -> list:
        if not 0 <= level <= self.max_level:
            raise DomainError(f"level {level} not in tree (0..{self.max_level})")
        return list(self.levels[level])

    def counts(self, level: int) -> tuple:
        bands = self.bands(level)
        a = sum(b.kind is Kind.A for b in bands)
        return a, len(bands) - a

    def edges(self) -> list:
        """Containment edges as ((parent level, index), (child level, index))."""
        return [
            (b.parent.key(), b.key())
            for level in self.levels
            for b in level
            if b.parent is not None
        ]

    def children(self, band: Band) -> list:
        out = []
        for n in (band.level + 1, band.level + 2):
            if n <= self.max_level:
                out.extend(b for b in self.levels[n] if b.parent is band)
        return out

    def bands_inside(self, band: Band, level: int) -> list:
        """Bands of ``level`` lying inside ``band``, found geometrically."""
        bands = self.levels[level]
        los = [b.lo for b in bands]
        i = bisect.bisect_left(los, band.lo)
        out = []
        while i < len(bands) and bands[i].hi <= band.hi:
            out.append(bands[i])
            i += 1
        return out


@dataclass(frozen=True)
class PeriodicSpectrum:
    coupling: float
    level: int
    bands: tuple

    def __len__(self):
        return len(self.bands)


def min_band_length(lam: float, k: int) -> float:
    """Lower bound 4 / (2 lam + 22)^(2k/3) on every band of sigma_k (lam > 4, k >= 3)."""
    return 4.0 / (2.0 * lam + 22.0) ** (2.0 * k / 3.0)


def thin_base(lam: float) -> float:
    """((lam - 4) + sqrt((lam - 4)^2 - 12)) / 2, defined for lam >= 8."""
    if lam < 8:
        raise DomainError(f"thin-band base needs lam >= 8, got {lam}")
    return 0.5 * ((lam - 4.0) + math.sqrt((lam - 4.0) ** 2 - 12.0))


def thin_band_bound(lam: float, k: int) -> float:
    """Upper bound on the thinnest type-B band of sigma_k (lam >= 8, k = 1 mod 3)."""
    return 4.0 / thin_base(lam) ** (2.0 * k / 3.0)


# ---------------------------------------------------------------- bisection

_EPS = np.finfo(float).eps


def _bisect_float(pred, a, b, pa=None):
    """Vectorised bisection for the switch point of a boolean predicate.

    ``pred(a)`` and ``pred(b)`` must differ elementwise; ``pa`` overrides the
    value taken at ``a``. Stops once every bracket is within a couple of ulps
    of (1 + |E|). Returns the final (a, b).
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    pa = pred(a) if pa is None else np.broadcast_to(pa, a.shape)
    for _ in range(200):
        m = 0.5 * (a + b)
        live = (b - a > 2 * _EPS * (1 + np.abs(m))) & (m > a) & (m < b)
        if not live.any():
            break
        same = pred(m) == pa
        a = np.where(live & same, m, a)
        b = np.where(live & ~same, m, b)
    return a, b


def _bisect_mp(pred, a, b, tol, pa=None):
    pa = pred(a) if pa is None else pa
    while b - a > tol * (1 + abs(a)):
        m = (a + b) / 2
        if pred(m) == pa:
            a = m
        else:
            b = m
    return a, b


def _locate_float(lam, n, lo, hi):
    """Isolate the unique band of sigma_n inside each bracket [lo_i, hi_i].

    x_n has one zero in the bracket; the band edges are where |x_n| first
    reaches 1 on either side of it. Bracket ends are treated as outside the
    band even when rounding puts |x_n| just below 1 there: a Dirichlet
    eigenvalue may sit on the edge of the neighbouring band. Bisecting from
    the zero outwards then lands on the nearer crossing.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    lam = float(lam)

    def x(E):
        return half_trace(E, lam, n)

    def inside(E):
        return np.abs(x(E)) < 1

    xl, xh = x(lo), x(hi)
    bad = np.flatnonzero(np.sign(xl) * np.sign(xh) >= 0)
    if bad.size:
        return None, bad
    z, _ = _bisect_float(lambda E: x(E) > 0, lo, hi)
    _, e_lo = _bisect_float(inside, lo, z, pa=False)
    e_hi, _ = _bisect_float(inside, z, hi, pa=True)
    # closed gap: the bracket end is a tangency with |x_n| = 1, and bisecting
    # |x_n| < 1 can only get within ~sqrt(eps) of it, so snap to the end
    near_l = (np.abs(np.abs(xl) - 1) <= TOUCH_TOL) & (e_lo - lo <= TOUCH_GAP * (1 + np.abs(lo)))
    near_h = (np.abs(np.abs(xh) - 1) <= TOUCH_TOL) & (hi - e_hi <= TOUCH_GAP * (1 + np.abs(hi)))
    e_lo = np.where(near_l, lo, e_lo)
    e_hi = np.where(near_h, hi, e_hi)
    xa, xb = x(e_lo), x(e_hi)
    res = np.stack([xa - np.sign(xa), xb - np.sign(xb)], axis=1)
    return list(zip(e_lo.tolist(), e_hi.tolist(), map(tuple, res.tolist()))), None


def _locate_mp(lam, n, lo, hi, dps):
    out = []
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps - 3))
        lam = mpmath.mpf(lam)
        x = lambda E: half_trace(E, lam, n)  # noqa: E731
        inside = lambda E: abs(x(E)) < 1  # noqa: E731
        for i, (a, b) in enumerate(zip(lo, hi)):
            a, b = mpmath.mpf(a), mpmath.mpf(b)
            xa, xb = x(a), x(b)
            if mpmath.sign(xa) * mpmath.sign(xb) >= 0:
                return None, [i]
            z = _bisect_mp(lambda E: x(E) > 0, a, b, tol)[0]
            e_lo = _bisect_mp(inside, a, z, tol, pa=False)[1]
            e_hi = _bisect_mp(inside, z, b, tol, pa=True)[0]
            ra, rb = x(e_lo), x(e_hi)
            out.append((e_lo, e_hi, (float(ra - mpmath.sign(ra)), float(rb - mpmath.sign(rb)))))
    return out, None


def _tree_dps(lam: float, max_level: int) -> int:
    digits = math.log10(2 + lam) + (2 * max_level / 3) * math.log10(2 * lam + 22) - math.log10(4)
    return int(math.ceil(digits)) + 15


def _too_thin(bands) -> bool:
    for b in bands:
        scale = max(abs(float(b.lo)), abs(float(b.hi)), 1.0)
        if b.length < MIN_ULPS * math.ulp(scale):
            return True
    return False


# ---------------------------------------------------------------- tree


def build_band_tree(lam: float, max_level: int, precision: str = "auto",
                    level_cap: int = TREE_LEVEL_CAP) -> BandTree:
    """Build the type A/B band hierarchy of sigma_0 ... sigma_max_level.

    Level n is grown from levels n-1 and n-2: each B band of level n-1 holds
    one A band of level n; each A band of level n-2 holds one B band; each B
    band of level n-2 holds two B bands of level n on either side of its A
    child at level n-1.

    ``precision`` is "float", "mp" or "auto". In "auto" the tree is built in
    binary64 until a level has a band narrower than ~1e6 ulps (or a bracket
    loses its sign pattern); that level and the rest are then redone in mpmath.
    """
    if not lam > 4:
        raise UnsupportedCouplingError(
            f"hierarchy requires lambda > 4 (got {lam}); use scan_bands")
    if lam > COUPLING_CAP:
        raise DomainError(f"lambda {lam} exceeds the overflow guard {COUPLING_CAP:g}")
    if not 0 <= max_level <= level_cap:
        raise DomainError(f"max_level must be in 0..{level_cap}, got {max_level}")
    if precision not in ("auto", "float", "mp"):
        raise DomainError(f"unknown precision mode {precision!r}")

    dps = _tree_dps(lam, max_level)
    use_mp = precision == "mp"
    mp_from = 0 if use_mp else None

    def seed(v):
        return mpmath.mpf(v) if use_mp else float(v)

    lam_f = float(lam)
    if use_mp:
        with mpmath.workdps(dps):
            lvl0 = [Band(0, 0, Kind.A, seed(-2), seed(2))]
            lvl1 = [Band(1, 0, Kind.B, mpmath.mpf(lam) - 2, mpmath.mpf(lam) + 2)]
    else:
        lvl0 = [Band(0, 0, Kind.A, -2.0, 2.0)]
        lvl1 = [Band(1, 0, Kind.B, lam_f - 2.0, lam_f + 2.0)]
    levels = [lvl0, lvl1][: max_level + 1]

    n = 2
    while n <= max_level:
        jobs = _child_brackets(levels[n - 1], levels[n - 2])
        lo = [j[0] for j in jobs]
        hi = [j[1] for j in jobs]
        if use_mp:
            found, bad = _locate_mp(lam, n, lo, hi, dps)
        else:
            found, bad = _locate_float(lam_f, n, lo, hi)
        if found is None:
            if not use_mp and precision == "auto":
                use_mp, mp_from = True, n
                continue
            raise StructuralError(
                f"no sign change of x_{n} inside the bracket of parent band "
                f"{jobs[bad[0]][3].key()} (lambda={lam})", parent=jobs[bad[0]][3])
        level = sorted(
            ((e_lo, e_hi, kind, parent, res) for (e_lo, e_hi, res), (_, _, kind, parent)
             in zip(found, jobs)),
            key=lambda t: t[0])
        bands = [Band(n, i, kind, e_lo, e_hi, parent, res)
                 for i, (e_lo, e_hi, kind, parent, res) in enumerate(level)]
        if not use_mp and precision == "auto" and _too_thin(bands):
            use_mp, mp_from = True, n
            continue
        _check_level(bands, lam, n)
        levels.append(bands)
        n += 1

    return BandTree(float(lam), max_level, tuple(tuple(level) for level in levels),
                    dps if use_mp else None, mp_from)


def _child_brackets(prev, prev2):
    """(lo, hi, kind, parent) brackets each holding one band of the next level."""
    jobs = [(b.lo, b.hi, Kind.A, b) for b in prev if b.kind is Kind.B]
    a_child = {id(b.parent): b for b in prev if b.kind is Kind.A}
    for p in prev2:
        if p.kind is Kind.A:
            jobs.append((p.lo, p.hi, Kind.B, p))
        else:
            c = a_child.get(id(p))
            if c is None:
                raise StructuralError(f"B band {p.key()} has no A child", parent=p)
            jobs.append((p.lo, c.lo, Kind.B, p))
            jobs.append((c.hi, p.hi, Kind.B, p))
    return jobs


def _check_level(bands, lam, n):
    expected = fibonacci(n)
    if len(bands) != expected:
        raise StructuralError(f"level {n} has {len(bands)} bands, expected {expected}")
    for b in bands:
        if not b.lo < b.hi:
            raise StructuralError(f"degenerate band {b.key()} at lambda={lam}", parent=b.parent)
        if b.parent is not None and not b.parent.contains(b, strict=False):
            raise StructuralError(f"band {b.key()} escapes its parent", parent=b.parent)
    for left, right in zip(bands, bands[1:]):
        if not left.hi < right.lo:
            raise StructuralError(f"bands {left.key()} and {right.key()} overlap",
                                  parent=right.parent)


def thinnest_band(tree: BandTree, k: int) -> Band:
    """Type-B band of minimal length at level k."""
    if not 0 <= k <= tree.max_level:
        raise DomainError(f"level {k} absent from tree (max {tree.max_level})")
    bs = [b for b in tree.levels[k] if b.kind is Kind.B]
    if not bs:
        raise DomainError(f"level {k} has no type-B band")
    return min(bs, key=lambda b: b.hi - b.lo)


# ---------------------------------------------------------------- scan


def dirichlet_eigs(lam: float, n: int) -> np.ndarray:
    """Eigenvalues of one period restricted to sites 1..F_n - 1 (zero boundary)."""
    v = approximant_potential(lam, n)[:-1]
    if v.size == 0:
        return np.empty(0)
    if v.size == 1:
        return v.copy()
    return eigvalsh_tridiagonal(v, np.ones(v.size - 1))


@lru_cache(maxsize=64)
def scan_bands(lam: float, n: int, level_cap: int = SCAN_LEVEL_CAP) -> PeriodicSpectrum:
    """All F_n bands of sigma_n for any coupling lam >= 0.

    The closed gaps of a periodic Jacobi operator each hold exactly one
    Dirichlet eigenvalue, so consecutive Dirichlet eigenvalues bracket exactly
    one band; inside, x_n has a single zero and one crossing of +-1 per side.
    Touching bands (lam -> 0) show up as a bracket endpoint with |x_n| = 1.
    """
    if lam < 0:
        raise DomainError(f"coupling must be >= 0, got {lam}")
    if lam > COUPLING_CAP:
        raise DomainError(f"lambda {lam} exceeds the overflow guard {COUPLING_CAP:g}")
    if not 0 <= n <= level_cap:
        raise DomainError(f"level must be in 0..{level_cap}, got {n}")
    lam = float(lam)
    d = dirichlet_eigs(lam, n)
    lo = np.concatenate([[-2.0 - SCAN_MARGIN], d])
    hi = np.concatenate([d, [2.0 + lam + SCAN_MARGIN]])
    found, bad = _locate_float(lam, n, lo, hi)
    expected = fibonacci(n)
    if found is None:
        raise ResolutionError(
            f"sigma_{n} at lambda={lam}: resolved {expected - len(bad)} of {expected} bands",
            found=expected - len(bad), expected=expected)
    bands = tuple(Band(n, i, Kind.UNLABELED, e_lo, e_hi, None, res)
                  for i, (e_lo, e_hi, res) in enumerate(found))
    ok = sum(b.lo < b.hi and abs(half_trace(float(b.mid), lam, n)) <= 1 + 1e-9 for b in bands)
    ordered = all(l.hi <= r.lo for l, r in zip(bands, bands[1:]))
    if ok != expected or not ordered:
        raise ResolutionError(
            f"sigma_{n} at lambda={lam}: resolved {ok} of {expected} bands "
            f"(bands narrower than binary64 resolution?)", found=ok, expected=expected)
    return PeriodicSpectrum(lam, n, bands)


# ---------------------------------------------------------------- oracle


def periodic_matrix(lam: float, n: int) -> np.ndarray:
    """F_n x F_n periodic Schroedinger matrix of the level-n approximant.

    Hopping 1 with a wraparound entry; the wrap adds onto the existing
    coupling for F_n = 2 and onto the diagonal for F_n = 1.
    """
    v = approximant_potential(lam, n)
    q = v.size
    h = np.diag(v) + np.diag(np.ones(q - 1), 1) + np.diag(np.ones(q - 1), -1)
    h[0, q - 1] += 1.0
    h[q - 1, 0] += 1.0
    return h


def periodic_hamiltonian_eigs(lam: float, n: int, dps: int | None = None) -> np.ndarray:
    """Sorted eigenvalues of the periodic approximant matrix (dense solve).

    With ``dps`` the solve runs in mpmath and the result is correctly rounded
    to binary64; LAPACK alone is off by a few ulps of the matrix norm.
    """
    q = fibonacci(n)
    cap = EIG_SIZE_CAP if dps is None else MP_EIG_SIZE_CAP
    if q > cap:
        raise ResourceError(f"F_{n} = {q} exceeds the dense eigensolve cap {cap}")
    h = periodic_matrix(lam, n)
    if dps is None:
        return np.sort(np.linalg.eigvalsh(h))
    with mpmath.workdps(dps):
        ev, _ = mpmath.eigsy(mpmath.matrix(h.tolist()))
        return np.sort(np.array([float(e) for e in ev]))
