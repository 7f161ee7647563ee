"""Hoelder-exponent envelopes and empirical exponents from band widths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .approximants import BandTree, Kind, thin_base, thinnest_band
from .errors import DomainError
from .trace_core import ALPHA, MU0, fibonacci

LOG_INV_ALPHA = math.log(1.0 / ALPHA)


def gamma_lower(lam: float) -> float:
    """3 log(1/alpha) / (2 log(2 lam + 22)): IDS is Hoelder with any smaller exponent."""
    if not lam > 4:
        raise DomainError(f"gamma_lower needs lam > 4, got {lam}")
    return 3.0 * LOG_INV_ALPHA / (2.0 * math.log(2.0 * lam + 22.0))


def gamma_upper(lam: float) -> float:
    """3 log(1/alpha) / (2 log b(lam)); no larger exponent works (lam >= 8)."""
    if lam < 8:
        raise DomainError(f"gamma_upper needs lam >= 8, got {lam}")
    return 3.0 * LOG_INV_ALPHA / (2.0 * math.log(thin_base(lam)))


def gamma_k(lam: float, k: int) -> float:
    if not lam > 4:
        raise DomainError(f"gamma_k needs lam > 4, got {lam}")
    if k < 3:
        raise DomainError(f"gamma_k needs k >= 3, got {k}")
    den = (2.0 / 3.0) * (k + 1) * math.log(2.0 * lam + 22.0) - math.log(4.0)
    return (k - 3) * LOG_INV_ALPHA / den


def gamma_tilde_k(lam: float, k: int) -> float:
    if lam < 8:
        raise DomainError(f"gamma_tilde_k needs lam >= 8, got {lam}")
    if k < 4:
        raise DomainError(f"gamma_tilde_k needs k >= 4, got {k}")
    den = (2.0 / 3.0) * k * math.log(thin_base(lam)) - math.log(4.0)
    return (k + 1) * LOG_INV_ALPHA / den


def gamma_small(lam: float, mu_lambda: float) -> float:
    """Largest gamma <= 1/2 with mu_lambda^(2 gamma) <= mu_0.

    ``mu_lambda`` is the unstable multiplier of the period-2 orbit born from
    (1, 1, 1) at coupling ``lam``; see ``dynamics.per2_solve``.
    """
    if lam < 0:
        raise DomainError(f"coupling must be >= 0, got {lam}")
    if mu_lambda <= 1:
        raise DomainError(f"multiplier must exceed 1, got {mu_lambda}")
    return min(0.5, math.log(MU0) / (2.0 * math.log(mu_lambda)))


@dataclass(frozen=True)
class HolderBounds:
    coupling: float
    gamma_lower: float | None
    gamma_upper: float | None
    gamma_small: float | None
    per_k: list = field(default_factory=list)


def holder_bounds(lam: float, ks=range(4, 13), mu_lambda: float | None = None) -> HolderBounds:
    lo = gamma_lower(lam) if lam > 4 else None
    up = gamma_upper(lam) if lam >= 8 else None
    small = gamma_small(lam, mu_lambda) if mu_lambda is not None else None
    per_k = []
    if lam > 4:
        for k in ks:
            per_k.append((k, gamma_k(lam, k), gamma_tilde_k(lam, k) if lam >= 8 else None))
    return HolderBounds(lam, lo, up, small, per_k)


@dataclass(frozen=True)
class HolderEstimate:
    coupling: float
    k: int
    scale: float
    delta_N: float
    exponent: float
    source: str
    delta_N_finite: float | None = None
    gamma_lower: float | None = None
    gamma_tilde_k: float | None = None

    @property
    def in_envelope(self) -> bool:
        lo = self.gamma_lower * (1 - 1e-9)
        hi = self.gamma_tilde_k * (1 + 1e-9)
        return lo <= self.exponent <= hi


def _estimate(lam, k, scale, delta_n, source, finite=None):
    return HolderEstimate(
        lam, k, scale, delta_n, math.log(delta_n) / math.log(scale), source, finite,
        gamma_lower(lam), gamma_tilde_k(lam, k) if lam >= 8 and k >= 4 else None)


def empirical_holder(tree: BandTree, k_range) -> list:
    """Exponent estimates log(Delta N)/log(Delta E) at each level k.

    band_pair: endpoints of the thinnest type-B band of sigma_k. A B band at
    level k holds F_{n-k} bands of sigma_n, so Delta N = lim F_{n-k}/F_n =
    alpha^k; the finite ratio at the tree's deepest level is kept for audit.

    gap_edge: the two bands of sigma_k adjacent to the narrowest gap at that
    level, taken from the left edge of one to the right edge of the other.
    """
    lam = tree.coupling
    out = []
    for k in k_range:
        if k > tree.max_level:
            raise DomainError(f"tree depth {tree.max_level} < k = {k}")
        band = thinnest_band(tree, k)
        n = tree.max_level
        finite = None
        if n > k:
            finite = len(tree.bands_inside(band, n)) / fibonacci(n)
        out.append(_estimate(lam, k, band.length, ALPHA**k, "band_pair", finite))

        bands = tree.levels[k]
        if len(bands) > 1:
            i = min(range(len(bands) - 1), key=lambda j: bands[j + 1].lo - bands[j].hi)
            left, right = bands[i], bands[i + 1]
            weight = sum(ALPHA ** b.level * (ALPHA**2 if b.kind is Kind.A else 1.0)
                         for b in (left, right))
            scale = float(right.hi - left.lo)
            if scale < 1:
                out.append(_estimate(lam, k, scale, weight, "gap_edge"))
    return out
