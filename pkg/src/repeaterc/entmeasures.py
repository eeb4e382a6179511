"""Entropies and two-qubit entanglement measures (all in bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import SIGMA_Y, DensityMatrix, as_density
from .smallmat import clamp_spectrum, drop_roundoff, eigvalsh, mat_sqrt_psd, partial_trace, tensor

ENTROPY_CUTOFF = 1e-15
NORM_TOL = 1e-12
_YY = tensor(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class BoundsReport:
    """Upper and lower bounds on the distillable entanglement of a two-qubit state.

    ``lower_bound`` is the smaller of the two coherent informations.
    ``exact_distillable`` is filled in only where the value is known in closed
    form (pure states, two-Bell mixtures).
    """

    e_formation: float
    coherent_info_1: float
    coherent_info_2: float
    lower_bound: float
    exact_distillable: Optional[float] = None

    @property
    def entangled(self) -> bool:
        value = self.lower_bound if self.exact_distillable is None else self.exact_distillable
        return value > 1e-12


def _entropy_of_spectrum(w) -> float:
    w = clamp_spectrum(w)
    w = w[w > ENTROPY_CUTOFF]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho``."""
    return _entropy_of_spectrum(eigvalsh(as_density(rho).mat))


def binary_entropy(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _two_qubit(rho) -> DensityMatrix:
    rho = as_density(rho)
    if rho.dim != 4:
        raise ValueError("a two-qubit (4x4) density matrix is required")
    return rho


def concurrence(rho) -> float:
    """Wootters concurrence.

    Uses the Hermitian form ``sqrt(rho) rho~ sqrt(rho)``, whose eigenvalues are
    the squares of the Wootters lambdas, so no non-Hermitian solve is needed.
    """
    r = _two_qubit(rho).mat
    flipped = _YY @ r.conj() @ _YY
    root = mat_sqrt_psd(r)
    h = root @ flipped @ root
    h = (h + h.conj().T) / 2
    lam = np.sqrt(drop_roundoff(clamp_spectrum(eigvalsh(h))))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    c = min(max(float(c), 0.0), 1.0)
    return binary_entropy((1.0 + math.sqrt(1.0 - c * c)) / 2.0)


def entanglement_of_formation(rho) -> float:
    return eof_from_concurrence(concurrence(rho))


def coherent_info_pair(rho) -> tuple[float, float]:
    """``(S(rho_1) - S(rho_12), S(rho_2) - S(rho_12))``; either may be negative."""
    r = _two_qubit(rho).mat
    joint = von_neumann_entropy(r)
    return (
        von_neumann_entropy(partial_trace(r, 1)) - joint,
        von_neumann_entropy(partial_trace(r, 2)) - joint,
    )


def distill_pure(state) -> float:
    """Distillable entanglement (ebits per copy) of a pure two-qubit state vector."""
    psi = np.asarray(state, dtype=np.complex128).ravel()
    if psi.shape != (4,):
        raise ValueError(f"expected a 4-component state vector, got shape {psi.shape}")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (|psi|^2 = {norm:.15g})")
    return von_neumann_entropy(partial_trace(np.outer(psi, psi.conj()), 1))


def distill_two_bell_mixture(lam: float) -> float:
    """``1 - h(lam)`` for a mixture of two Bell states with weights ``lam``, ``1 - lam``."""
    lam = float(lam)
    if not 0.5 <= lam <= 1.0:
        raise ValueError(f"Bell weight must lie in [1/2, 1], got {lam!r}")
    return max(0.0, 1.0 - binary_entropy(lam))


def bounds(rho, exact_distillable: Optional[float] = None) -> BoundsReport:
    rho = _two_qubit(rho)
    ci1, ci2 = coherent_info_pair(rho)
    return BoundsReport(
        e_formation=entanglement_of_formation(rho),
        coherent_info_1=ci1,
        coherent_info_2=ci2,
        lower_bound=min(ci1, ci2),
        exact_distillable=exact_distillable,
    )
