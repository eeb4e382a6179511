"""Yields, resource-reduction ratios and scans for channels cut into equal sections.

Everything is expressed per source pair: the number of sources ``N`` cancels
in every ratio, so it never appears.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import entmeasures as em
from .channels import (
    BellInput,
    ChannelKind,
    bell_mixture_lambda,
    propagate_bell,
    watched_conditional,
)
from .smallmat import LinalgError

ENTANGLED_TOL = 1e-12
BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 200

DEFAULT_M_MAX_EXACT = 20
DEFAULT_M_MAX_CONJECTURE = 60


class ZeroDenominatorError(LinalgError):
    """The undivided channel delivers no entanglement, so the ratio is undefined."""


class NoSignChangeError(LinalgError):
    """The bracket given to a root search does not straddle a sign change."""


class BoundMode(enum.Enum):
    EXACT = "exact"
    CONJECTURE_BASED = "conjecture-based"


EXACT_KINDS = frozenset(
    {
        ChannelKind.WATCHED_AMPLITUDE_DAMPING,
        ChannelKind.BIT_FLIP,
        ChannelKind.PHASE_FLIP,
        ChannelKind.BIT_PHASE_FLIP,
    }
)


def bound_mode_for(kind: ChannelKind) -> BoundMode:
    return BoundMode.EXACT if kind in EXACT_KINDS else BoundMode.CONJECTURE_BASED


@dataclass(frozen=True)
class Scenario:
    """A channel, the Bell state fed into it, and the full-channel length ``gamma``.

    ``bound_mode`` defaults to the only mode valid for ``kind``.
    """

    kind: ChannelKind
    bell: BellInput
    gamma: float
    bound_mode: Optional[BoundMode] = None

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma < 0.0:
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", gamma)
        expected = bound_mode_for(self.kind)
        if self.bound_mode is None:
            object.__setattr__(self, "bound_mode", expected)
        elif self.bound_mode is not expected:
            raise ValueError(
                f"{self.kind.value} requires bound mode {expected.value}, got {self.bound_mode.value}"
            )

    @property
    def exact(self) -> bool:
        return self.bound_mode is BoundMode.EXACT

    def with_gamma(self, gamma: float) -> "Scenario":
        return replace(self, gamma=gamma)


@dataclass(frozen=True)
class EtaPoint:
    """Resource-reduction ratio for ``m`` sections.

    ``lower_bound_value`` is the distillable entanglement per pair delivered
    over one section: the exact value in exact mode, the (possibly negative)
    coherent-information bound otherwise.
    """

    m: int
    eta: float
    lower_bound_value: float
    entangled: bool


@dataclass(frozen=True)
class EtaScan:
    scenario: Scenario
    points: tuple[EtaPoint, ...]

    @property
    def ms(self) -> list[int]:
        return [p.m for p in self.points]

    @property
    def etas(self) -> list[float]:
        return [p.eta for p in self.points]


@dataclass(frozen=True)
class YieldTable:
    """Yield per source ``values[i, j]`` at ``gammas[i]`` with ``sections[j]`` sections."""

    scenario: Scenario
    sections: tuple[int, ...]
    gammas: tuple[float, ...]
    values: np.ndarray = field(repr=False)


def _check_m(m: int, name: str = "m") -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"{name} must be an integer >= 1, got {m!r}")
    return int(m)


def segment_value(s: Scenario, m: int) -> float:
    """Distillable entanglement per pair sent over one of ``m`` sections.

    Exact mode returns the known value (including the survival probability
    for the watched channel). Conjecture-based mode returns the smaller
    coherent information, which may be negative.
    """
    m = _check_m(m)
    g = s.gamma / m
    if s.kind.is_watched:
        outcome = watched_conditional(s.bell, g)
        return outcome.survival_probability * em.distill_pure(outcome.conditional_state)
    if s.kind.is_flip:
        return em.distill_two_bell_mixture(bell_mixture_lambda(s.kind, g))
    ci1, ci2 = em.coherent_info_pair(propagate_bell(s.kind, s.bell, g))
    return min(ci1, ci2)


def yield_per_source(s: Scenario, m: int) -> float:
    """End-to-end ebits obtained per source pair when the channel has ``m`` sections."""
    m = _check_m(m)
    return max(0.0, segment_value(s, m)) / m


def undivided_reference(s: Scenario) -> float:
    """Denominator of the resource-reduction ratio for the undivided channel."""
    if s.exact:
        ref = yield_per_source(s, 1)
    else:
        ref = em.entanglement_of_formation(propagate_bell(s.kind, s.bell, s.gamma))
    if ref <= 0.0:
        raise ZeroDenominatorError(
            f"undivided {s.kind.value} channel at gamma={s.gamma:g} carries no entanglement"
        )
    return ref


def eta(s: Scenario, m: int, reference: Optional[float] = None) -> EtaPoint:
    """Ratio of sources needed without repeaters to sources needed with ``m`` sections.

    In conjecture-based mode the sectioned channel is credited only with its
    lower bound while the undivided channel gets its entanglement of
    formation, so any advantage found is not an artifact of the bounds.
    """
    m = _check_m(m)
    ref = undivided_reference(s) if reference is None else reference
    value = segment_value(s, m)
    entangled = value > ENTANGLED_TOL
    ratio = value / (m * ref) if value > 0.0 else 0.0
    return EtaPoint(m=m, eta=ratio, lower_bound_value=value, entangled=entangled)


def scan(s: Scenario, m_max: Optional[int] = None) -> EtaScan:
    if m_max is None:
        m_max = DEFAULT_M_MAX_EXACT if s.exact else DEFAULT_M_MAX_CONJECTURE
    m_max = _check_m(m_max, "m_max")
    ref = undivided_reference(s)
    return EtaScan(scenario=s, points=tuple(eta(s, m, ref) for m in range(1, m_max + 1)))


def optimal_sections(s: Scenario, m_max: Optional[int] = None) -> tuple[int, float]:
    """Section count maximizing eta over ``1..m_max``; ties go to the smaller count."""
    best = None
    for p in scan(s, m_max).points:
        if best is None or p.eta > best.eta:
            best = p
    return best.m, best.eta


def threshold_sections(s: Scenario, m_max: Optional[int] = None) -> tuple[Optional[int], Optional[int]]:
    """Smallest section count that is entangled, and smallest with eta > 1."""
    if s.exact:
        raise ValueError("threshold_sections applies to conjecture-based scenarios")
    m_entangled = m_gain = None
    for p in scan(s, m_max).points:
        if m_entangled is None and p.entangled:
            m_entangled = p.m
        if m_gain is None and p.eta > 1.0:
            m_gain = p.m
    return m_entangled, m_gain


def bisect(f, lo: float, hi: float, tol: float = BISECTION_TOL, max_iter: int = BISECTION_MAX_ITER) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoSignChangeError(f"no sign change on [{lo:g}, {hi:g}] ({flo:.3g}, {fhi:.3g})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crossover_gamma(
    s: Scenario, m_a: int, m_b: int, bracket: tuple[float, float] = (0.0, 10.0)
) -> float:
    """Full-channel length where ``m_a`` and ``m_b`` sections give equal yield."""
    if not s.exact:
        raise ValueError("crossover_gamma applies to exact scenarios")
    m_a = _check_m(m_a, "m_a")
    m_b = _check_m(m_b, "m_b")
    lo, hi = (float(x) for x in bracket)
    if not 0.0 <= lo < hi:
        raise ValueError(f"bracket must satisfy 0 <= lo < hi, got {bracket!r}")

    def diff(g: float) -> float:
        t = s.with_gamma(g)
        return yield_per_source(t, m_a) - yield_per_source(t, m_b)

    return bisect(diff, lo, hi)


def scan_yield(s: Scenario, sections: Sequence[int], gamma_grid: Sequence[float]) -> YieldTable:
    """Yield per source over a grid of full-channel lengths; ``s.gamma`` is ignored."""
    sections = tuple(_check_m(m, "section count") for m in sections)
    gammas = tuple(float(g) for g in gamma_grid)
    if not sections or not gammas:
        raise ValueError("sections and gamma grid must be non-empty")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gamma grid must be strictly ascending")
    values = np.array(
        [[yield_per_source(s.with_gamma(g), m) for m in sections] for g in gammas]
    )
    return YieldTable(scenario=s, sections=sections, gammas=gammas, values=values)


def scan_grid(s: Scenario, m_max: int, gamma_grid: Sequence[float]) -> list[EtaScan]:
    """One eta scan per full-channel length in ``gamma_grid``."""
    gammas = [float(g) for g in gamma_grid]
    if not gammas:
        raise ValueError("gamma grid must be non-empty")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gamma grid must be strictly ascending")
    return [scan(s.with_gamma(g), m_max) for g in gammas]


def linspace(lo: float, hi: float, steps: int) -> list[float]:
    """``steps`` evenly spaced points from ``lo`` to ``hi`` inclusive."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return [float(lo)]
    return [float(x) for x in np.linspace(lo, hi, steps)]
