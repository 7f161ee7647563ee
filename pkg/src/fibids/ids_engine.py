"""Integrated density of states by band counting on periodic approximants."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .approximants import BandTree, PeriodicSpectrum, scan_bands
from .errors import DomainError
from .trace_core import fibonacci, half_trace


@dataclass(frozen=True)
class IdsSample:
    energy: float
    coupling: float
    level_used: int
    value: float
    error_bound: float


@dataclass(frozen=True)
class GapRecord:
    level: int
    lo: float
    hi: float
    plateau: Fraction


def ids_free(E):
    """N_0(E) = arccos(-E/2)/pi on (-2, 2), clamped to 0 and 1 outside."""
    e = np.clip(np.asarray(E, dtype=float), -2.0, 2.0)
    out = np.arccos(-e / 2.0) / math.pi
    return float(out) if out.ndim == 0 else out


def bloch_fraction(spectrum: PeriodicSpectrum, band_index: int, E: float) -> float:
    """Position of E inside a band in [0, 1], measured by the Bloch phase.

    The orientation is fixed by the sign of x_n at the band's left edge, so the
    fraction runs from 0 at ``lo`` to 1 at ``hi``.
    """
    band = spectrum.bands[band_index]
    n, lam = spectrum.level, spectrum.coupling
    x = half_trace(float(E), lam, n)
    s = 1.0 if half_trace(float(band.lo), lam, n) > 0 else -1.0
    return math.acos(min(1.0, max(-1.0, s * x))) / math.pi


def ids_from_spectrum(spectrum: PeriodicSpectrum, E: float) -> float:
    bands = spectrum.bands
    # closed-band convention: a band with hi <= E counts as fully below
    his = [b.hi for b in bands]
    below = bisect.bisect_right(his, E)
    frac = 0.0
    if below < len(bands) and bands[below].lo <= E:
        frac = bloch_fraction(spectrum, below, E)
    return (below + frac) / len(bands)


def ids(lam: float, E: float, n: int) -> IdsSample:
    """N_lam(E) approximated on sigma_n, with the working error bound 2/F_n."""
    if lam <= 0:
        raise DomainError(f"ids needs lam > 0, got {lam}; use ids_free for lam = 0")
    spectrum = scan_bands(float(lam), n)
    value = ids_from_spectrum(spectrum, float(E))
    return IdsSample(float(E), float(lam), n, value, 2.0 / fibonacci(n))


def ids_grid(lam: float, energies, n: int) -> list:
    spectrum = scan_bands(float(lam), n)
    bound = 2.0 / fibonacci(n)
    return [IdsSample(float(E), float(lam), n, ids_from_spectrum(spectrum, float(E)), bound)
            for E in energies]


def gap_plateau(tree: BandTree, level: int, gap_index: int) -> GapRecord:
    """Plateau of N_lam on the gap left of band ``gap_index`` at ``level``.

    Gap j separates bands j-1 and j; j = 0 is (-inf, lowest band) and
    j = F_level is (highest band, +inf). The plateau is j/F_level exactly.
    """
    bands = tree.bands(level)
    q = len(bands)
    if not 0 <= gap_index <= q:
        raise DomainError(f"gap index {gap_index} outside 0..{q}")
    lo = -math.inf if gap_index == 0 else bands[gap_index - 1].hi
    hi = math.inf if gap_index == q else bands[gap_index].lo
    if not lo < hi:
        raise DomainError(f"bands {gap_index - 1} and {gap_index} at level {level} touch")
    return GapRecord(level, lo, hi, Fraction(gap_index, q))


def gap_containing(tree: BandTree, level: int, E: float) -> GapRecord:
    """The level-``level`` gap that contains energy E."""
    bands = tree.bands(level)
    j = bisect.bisect_right([b.hi for b in bands], E)
    if j < len(bands) and bands[j].lo <= E:
        raise DomainError(f"E = {E} lies in band {j} of level {level}, not in a gap")
    return gap_plateau(tree, level, j)


def psi(lam: float, E: float, n: int) -> float:
    """Psi_lam(E) = -2 cos(pi N_lam(E)), the energy of the free Laplacian with equal IDS."""
    return -2.0 * math.cos(math.pi * ids(lam, E, n).value)


def psi_from_ids(value: float) -> float:
    return -2.0 * math.cos(math.pi * value)
