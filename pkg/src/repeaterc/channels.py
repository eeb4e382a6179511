"""Single-qubit noise channels, their length parameterization, and Bell-pair propagation.

Every channel is parameterized by a dimensionless ``gamma`` proportional to the
distance a qubit travels. Both qubits of a pair cross an independent copy of
the channel at the same ``gamma``; a channel cut into ``m`` sections is
modeled by evaluating the pair at ``gamma / m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .smallmat import (
    HERMITIAN_TOL,
    PSD_TOL,
    as_matrix,
    eigvalsh,
    hermiticity_error,
    tensor,
)

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class ChannelKind(enum.Enum):
    AMPLITUDE_DAMPING = "amplitude-damping"
    WATCHED_AMPLITUDE_DAMPING = "watched-amplitude-damping"
    BIT_FLIP = "bit-flip"
    PHASE_FLIP = "phase-flip"
    BIT_PHASE_FLIP = "bit-phase-flip"
    PHASE_DAMPING = "phase-damping"
    DEPOLARIZING = "depolarizing"

    @classmethod
    def parse(cls, token: str) -> "ChannelKind":
        try:
            return cls(token)
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown channel {token!r} (expected one of: {known})") from None

    @property
    def is_flip(self) -> bool:
        return self in FLIP_PAULI

    @property
    def is_watched(self) -> bool:
        return self is ChannelKind.WATCHED_AMPLITUDE_DAMPING


FLIP_PAULI = {
    ChannelKind.BIT_FLIP: SIGMA_X,
    ChannelKind.PHASE_FLIP: SIGMA_Z,
    ChannelKind.BIT_PHASE_FLIP: SIGMA_Y,
}


class BellInput(enum.Enum):
    PSI_PLUS = "psi-plus"
    PHI_PLUS = "phi-plus"

    @classmethod
    def parse(cls, token: str) -> "BellInput":
        try:
            return cls(token)
        except ValueError:
            known = ", ".join(b.value for b in cls)
            raise ValueError(f"unknown Bell input {token!r} (expected one of: {known})") from None

    def vector(self) -> np.ndarray:
        v = np.zeros(4, dtype=np.complex128)
        if self is BellInput.PSI_PLUS:
            v[1] = v[2] = _SQRT_HALF
        else:
            v[0] = v[3] = _SQRT_HALF
        return v

    def projector(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())


class DensityMatrix:
    """A validated one- or two-qubit density matrix.

    Raises ``ValueError`` unless the matrix is 2x2 or 4x4, Hermitian, of unit
    trace and has no eigenvalue below ``-PSD_TOL`` (all tolerances 1e-10).
    """

    __slots__ = ("mat",)

    def __init__(self, mat):
        m = as_matrix(mat)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        if hermiticity_error(m) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"density matrix trace is {tr.real:.12g}, expected 1")
        m = (m + m.conj().T) / 2
        w = eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __repr__(self) -> str:
        return f"DensityMatrix({self.mat!r})"

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        return cls(np.outer(psi, psi.conj()))


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


@dataclass(frozen=True)
class WatchedOutcome:
    """Conditional pure state after a no-decay record, and its probability."""

    conditional_state: np.ndarray
    survival_probability: float


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0.0:
        raise ValueError(f"gamma must be finite and >= 0, got {gamma!r}")
    return gamma


def param_from_gamma(kind: ChannelKind, gamma: float) -> float:
    """Channel strength ``p`` reached after a (per-qubit) length ``gamma``.

    For the flip channels the returned value is the per-qubit flip
    probability, chosen so that a pair sees the two-Bell mixture weight
    ``(1 + exp(-gamma)) / 2``.
    """
    gamma = _check_gamma(gamma)
    if kind in (ChannelKind.AMPLITUDE_DAMPING, ChannelKind.WATCHED_AMPLITUDE_DAMPING):
        return -math.expm1(-2.0 * gamma)
    if kind is ChannelKind.PHASE_DAMPING:
        return -math.expm1(-gamma)
    if kind is ChannelKind.DEPOLARIZING:
        return 0.75 * -math.expm1(-gamma)
    if kind.is_flip:
        return 0.5 * -math.expm1(-gamma / 2.0)
    raise ValueError(f"unsupported channel kind {kind!r}")


def kraus_ops(kind: ChannelKind, p: float) -> list[np.ndarray]:
    """Kraus operators of ``kind`` at strength ``p``.

    The watched amplitude damping channel returns its single no-jump operator
    ``diag(1, sqrt(1 - p))``, which is trace decreasing.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        return [
            np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=np.complex128),
            np.array([[0, math.sqrt(p)], [0, 0]], dtype=np.complex128),
        ]
    if kind is ChannelKind.WATCHED_AMPLITUDE_DAMPING:
        return [np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=np.complex128)]
    if kind is ChannelKind.PHASE_DAMPING:
        # environment levels |1>_E and |2>_E record which of |0>, |1> scattered
        return [
            math.sqrt(1 - p) * I2,
            math.sqrt(p) * np.diag([1, 0]).astype(np.complex128),
            math.sqrt(p) * np.diag([0, 1]).astype(np.complex128),
        ]
    if kind is ChannelKind.DEPOLARIZING:
        r = math.sqrt(p / 3)
        return [math.sqrt(1 - p) * I2, r * SIGMA_X, r * SIGMA_Y, r * SIGMA_Z]
    if kind.is_flip:
        return [math.sqrt(1 - p) * I2, math.sqrt(p) * FLIP_PAULI[kind]]
    raise ValueError(f"unsupported channel kind {kind!r}")


def apply_local(rho, kraus_a, kraus_b=None) -> np.ndarray:
    """Apply independent single-qubit channels to both halves of a 4x4 operator."""
    rho = as_matrix(rho)
    kraus_b = kraus_a if kraus_b is None else kraus_b
    out = np.zeros((4, 4), dtype=np.complex128)
    for ka in kraus_a:
        for kb in kraus_b:
            k = tensor(ka, kb)
            out += k @ rho @ k.conj().T
    return out


def propagate_bell(kind: ChannelKind, bell: BellInput, gamma_per_qubit: float) -> DensityMatrix:
    """Two-qubit state after each half of ``bell`` crosses ``kind`` at ``gamma_per_qubit``."""
    if kind.is_watched:
        raise ValueError("watched amplitude damping is conditional; use watched_conditional")
    gamma = _check_gamma(gamma_per_qubit)
    ops = kraus_ops(kind, param_from_gamma(kind, gamma))
    return DensityMatrix(apply_local(bell.projector(), ops))


def watched_conditional(bell: BellInput, gamma_per_qubit: float) -> WatchedOutcome:
    """Pure state left when neither environment registers a decay, and its probability."""
    gamma = _check_gamma(gamma_per_qubit)
    (m,) = kraus_ops(
        ChannelKind.WATCHED_AMPLITUDE_DAMPING,
        param_from_gamma(ChannelKind.WATCHED_AMPLITUDE_DAMPING, gamma),
    )
    v = bell.vector()
    psi = tensor(m, m) @ v
    prob = float(np.vdot(psi, psi).real / np.vdot(v, v).real)
    psi = psi / np.linalg.norm(psi)
    return WatchedOutcome(conditional_state=psi, survival_probability=prob)


def bell_mixture_lambda(kind: ChannelKind, gamma: float) -> float:
    """Weight kept on the input Bell state by a flip channel of length ``gamma``."""
    if not kind.is_flip:
        raise ValueError(f"{kind.value} is not a flip channel")
    gamma = _check_gamma(gamma)
    return (1.0 + math.exp(-gamma)) / 2.0


def bell_mixture_state(kind: ChannelKind, bell: BellInput, lam: float) -> DensityMatrix:
    """``lam |bell><bell| + (1 - lam) |partner><partner|`` for a flip channel.

    The partner is the Bell state reached by one flip on one qubit.
    """
    if not kind.is_flip:
        raise ValueError(f"{kind.value} is not a flip channel")
    partner = tensor(FLIP_PAULI[kind], I2) @ bell.vector()
    return DensityMatrix(
        lam * bell.projector() + (1.0 - lam) * np.outer(partner, partner.conj())
    )
