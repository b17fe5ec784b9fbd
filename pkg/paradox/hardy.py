"""
Hardy State, Observables and Probabilities
==========================================

The partially entangled spin-orbit state

    |psi> = cos(g) |L>_p |-1>_o - sin(g) |R>_p |+1>_o

the four two-outcome observables Sigma, Sigma' (polarization) and
Lambda, Lambda' (OAM), and the probabilities of the four Hardy events.

OAM states are filtered by holograms of opposite topological charge, so
on the OAM slot the coefficients of each measurement state appear in
mirrored m-order relative to the polarization slot. Under this
convention the events P1-P3 are impossible for every gamma and the
fourth event follows the closed form

    P4 = [sin(4g) / (4 (cos^3 g + sin^3 g))]^2
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable, Dict, Mapping, NamedTuple, Tuple, Union

import numpy as np

from .errors import GammaRangeError, InvalidDistributionError, OptimizationError
from .qstate import (
    DensityOperator, ProjectiveObservable, Slot, StateVector, _as_density, born_probability,
    projector,
)

logger = logging.getLogger(__name__)


GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
GOLDEN_RATIO_BOUND = GOLDEN_RATIO ** -5
PARADOX_INTERVAL = (0.0, math.pi / 4.0)
EXPLORATION_INTERVAL = (0.0, math.pi / 2.0)
OPTIMIZER_TOLERANCE = 1e-9
OPTIMIZER_MAX_ITERATIONS = 200
PROBABILITY_TOLERANCE = 1e-12
CONCURRENCE_EIGEN_FLOOR = 1e-12

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0

# sigma_y (x) sigma_y in the global ordering
SIGMA_YY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=complex)

BASIS_STATE_LABELS = ('L,+1', 'L,-1', 'R,+1', 'R,-1')


class ObservableKind(str, Enum):
    SIGMA = 'sigma'
    SIGMA_PRIME = "sigma'"
    LAMBDA = 'lambda'
    LAMBDA_PRIME = "lambda'"

    @property
    def slot(self) -> Slot:
        if self in (ObservableKind.SIGMA, ObservableKind.SIGMA_PRIME):
            return Slot.POLARIZATION
        return Slot.OAM

    @property
    def primed(self) -> bool:
        return self in (ObservableKind.SIGMA_PRIME, ObservableKind.LAMBDA_PRIME)


class HardyEvent(Enum):
    """The four joint outcomes entering the paradox, in inequality order"""
    SIGMA_LAMBDA_PP = ('sigma_lambda_pp', 'sigma,lambda(+1,+1)',
                       ObservableKind.SIGMA, ObservableKind.LAMBDA, +1, +1)
    SIGMAP_LAMBDA_MM = ('sigmap_lambda_mm', "sigma',lambda(-1,-1)",
                        ObservableKind.SIGMA_PRIME, ObservableKind.LAMBDA, -1, -1)
    SIGMA_LAMBDAP_MM = ('sigma_lambdap_mm', "sigma,lambda'(-1,-1)",
                        ObservableKind.SIGMA, ObservableKind.LAMBDA_PRIME, -1, -1)
    SIGMAP_LAMBDAP_MM = ('sigmap_lambdap_mm', "sigma',lambda'(-1,-1)",
                         ObservableKind.SIGMA_PRIME, ObservableKind.LAMBDA_PRIME, -1, -1)

    def __init__(self, field_name, label, obs_a, obs_b, a, b):
        self.field_name = field_name
        self.label = label
        self.obs_a = obs_a
        self.obs_b = obs_b
        self.a = a
        self.b = b

    @classmethod
    def from_label(cls, text: str) -> 'HardyEvent':
        """Resolve a label, field name or member name."""
        key = str(text).strip()
        for event in cls:
            if key in (event.label, event.field_name) or key.upper() == event.name:
                return event
        raise KeyError(f"Unknown Hardy event label {text!r}")


# The three events that vanish for the Hardy state, and the one that does not.
ZERO_EVENTS = (HardyEvent.SIGMA_LAMBDA_PP, HardyEvent.SIGMAP_LAMBDA_MM, HardyEvent.SIGMA_LAMBDAP_MM)
PARADOX_EVENT = HardyEvent.SIGMAP_LAMBDAP_MM


@dataclass(frozen=True)
class HardyAngles:
    """Entanglement angle; paradox mode enforces 0 < gamma < pi/4."""
    gamma: float
    exploration: bool = False

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma):
            raise GammaRangeError(f"gamma must be finite, got {self.gamma!r}")
        lo, hi = PARADOX_INTERVAL
        if not self.exploration and not (lo < gamma < hi):
            raise GammaRangeError(
                f"gamma={gamma!r} rad is outside the paradox interval (0, pi/4)"
            )
        object.__setattr__(self, 'gamma', gamma)

    @classmethod
    def from_degrees(cls, degrees: float, exploration: bool = False) -> 'HardyAngles':
        return cls(math.radians(degrees), exploration)

    @property
    def degrees(self) -> float:
        return math.degrees(self.gamma)


def _basis_gamma(gamma: float, exploration: bool) -> float:
    gamma = HardyAngles(gamma, exploration).gamma
    lo, hi = EXPLORATION_INTERVAL
    if exploration and not (lo <= gamma <= hi):
        raise GammaRangeError(f"gamma={gamma!r} rad is outside the exploration interval [0, pi/2]")
    return gamma


@dataclass(frozen=True)
class JointProbabilityTable:
    """Probabilities of the four Hardy events"""
    sigma_lambda_pp: float
    sigmap_lambda_mm: float
    sigma_lambdap_mm: float
    sigmap_lambdap_mm: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value) or value < -PROBABILITY_TOLERANCE or value > 1.0 + PROBABILITY_TOLERANCE:
                raise InvalidDistributionError(f"{f.name}={value!r} is not a probability")
            object.__setattr__(self, f.name, min(max(value, 0.0), 1.0))

    @classmethod
    def from_mapping(cls, values: Mapping) -> 'JointProbabilityTable':
        """Build from a mapping keyed by HardyEvent, label or field name."""
        resolved = {}
        for key, value in values.items():
            event = key if isinstance(key, HardyEvent) else HardyEvent.from_label(key)
            resolved[event.field_name] = float(value)
        missing = [e.label for e in HardyEvent if e.field_name not in resolved]
        if missing:
            raise InvalidDistributionError(f"Missing Hardy probabilities: {', '.join(missing)}")
        return cls(**resolved)

    def __getitem__(self, event: HardyEvent) -> float:
        return getattr(self, event.field_name)

    def as_dict(self) -> Dict[str, float]:
        return {event.label: self[event] for event in HardyEvent}


def hardy_state(gamma: float) -> StateVector:
    """cos(g)|L>|-1> - sin(g)|R>|+1> for any real gamma"""
    amps = np.zeros(4, dtype=complex)
    amps[1] = math.cos(gamma)
    amps[2] = -math.sin(gamma)
    return StateVector(amps)


def hardy_density(gamma: float) -> DensityOperator:
    return DensityOperator.from_state(hardy_state(gamma))


def measurement_basis(
    gamma: float,
    primed: bool = False,
    slot: Slot = Slot.POLARIZATION,
    exploration: bool = False,
) -> Tuple[StateVector, StateVector]:
    """
    The (|+>, |->) or (|+'>, |-'>) pair for one qubit slot.

    Polarization coordinates follow the defining expressions literally; the
    OAM slot carries them in mirrored m-order.
    """
    gamma = _basis_gamma(gamma, exploration)
    s, c = math.sin(gamma), math.cos(gamma)
    # clip guards against -0.0 at the interval ends
    s, c = max(s, 0.0), max(c, 0.0)

    if primed:
        norm = (s ** 3 + c ** 3) ** -0.5
        plus = norm * np.array([math.sqrt(c ** 3), math.sqrt(s ** 3)], dtype=complex)
        minus = norm * np.array([-math.sqrt(s ** 3), math.sqrt(c ** 3)], dtype=complex)
    else:
        norm = (s + c) ** -0.5
        plus = norm * np.array([math.sqrt(s), math.sqrt(c)], dtype=complex)
        minus = norm * np.array([-math.sqrt(c), math.sqrt(s)], dtype=complex)

    if Slot(slot) is Slot.OAM:
        plus, minus = plus[::-1], minus[::-1]
    return StateVector(plus), StateVector(minus)


def observable(kind: ObservableKind, gamma: float, exploration: bool = False) -> ProjectiveObservable:
    kind = ObservableKind(kind)
    plus, minus = measurement_basis(gamma, kind.primed, kind.slot, exploration)
    return ProjectiveObservable.from_basis(plus, minus, kind.slot)


def _joint_projector(gamma, obs_a, obs_b, a, b, exploration) -> np.ndarray:
    obs_a, obs_b = ObservableKind(obs_a), ObservableKind(obs_b)
    if obs_a.slot is not Slot.POLARIZATION or obs_b.slot is not Slot.OAM:
        raise ValueError(
            f"Joint outcome needs a polarization observable then an OAM one, got {obs_a.value}, {obs_b.value}"
        )
    first = observable(obs_a, gamma, exploration).embedded(a)
    second = observable(obs_b, gamma, exploration).embedded(b)
    return first @ second


def joint_probability(
    gamma: float,
    obs_a: ObservableKind,
    obs_b: ObservableKind,
    a: int,
    b: int,
    exploration: bool = False,
) -> float:
    """Born probability of outcome (a, b) for (obs_a, obs_b) on the Hardy state."""
    proj = _joint_projector(gamma, obs_a, obs_b, a, b, exploration)
    return born_probability(hardy_density(gamma), proj)


def event_projector(gamma: float, event: HardyEvent, exploration: bool = False) -> np.ndarray:
    return _joint_projector(gamma, event.obs_a, event.obs_b, event.a, event.b, exploration)


def hardy_probabilities(gamma: float, exploration: bool = False) -> JointProbabilityTable:
    rho = hardy_density(gamma)
    values = {
        event: born_probability(rho, event_projector(gamma, event, exploration))
        for event in HardyEvent
    }
    return JointProbabilityTable.from_mapping(values)


def basis_state_projectors() -> Dict[str, np.ndarray]:
    """S_z / L_z eigenstate projectors |L,+1>, |L,-1>, |R,+1>, |R,-1>"""
    return {
        label: projector(StateVector.basis(index, 4))
        for index, label in enumerate(BASIS_STATE_LABELS)
    }


def basis_state_probabilities(gamma: float) -> Dict[str, float]:
    rho = hardy_density(gamma)
    return {label: born_probability(rho, proj) for label, proj in basis_state_projectors().items()}


def hardy_p4_closed_form(gamma: float) -> float:
    s, c = math.sin(gamma), math.cos(gamma)
    denominator = 4.0 * (c ** 3 + s ** 3)
    if denominator == 0.0:
        return float('nan')
    return (math.sin(4.0 * gamma) / denominator) ** 2


def golden_section_maximize(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = OPTIMIZER_TOLERANCE,
    max_iterations: int = OPTIMIZER_MAX_ITERATIONS,
) -> Tuple[float, float, int]:
    """
    Golden-section search for the maximum of a unimodal f on [a, b].

    Returns (x, f(x), iterations) with the final bracket narrower than tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x), 0

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    if n > max_iterations:
        raise OptimizationError(f"Golden-section search needs {n} steps, limit is {max_iterations}")

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)

    for _ in range(n):
        if yc > yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if b - a > tol or not (math.isfinite(yc) and math.isfinite(yd)):
        raise OptimizationError(f"Golden-section search did not converge: bracket [{a!r}, {b!r}]")
    x = c if yc > yd else d
    return x, f(x), n


class Optimum(NamedTuple):
    gamma_star: float
    p_star: float


def optimal_gamma(tol: float = OPTIMIZER_TOLERANCE) -> Optimum:
    """Maximize the closed-form P4 over the paradox interval."""
    lo, hi = PARADOX_INTERVAL
    gamma_star, p_star, iterations = golden_section_maximize(hardy_p4_closed_form, lo, hi, tol)
    if not (lo < gamma_star < hi):
        raise OptimizationError(f"Optimum {gamma_star!r} is not interior to (0, pi/4)")
    logger.debug(
        f"Optimal gamma {math.degrees(gamma_star):.6f} deg, P4={p_star:.10f} after {iterations} steps"
    )
    return Optimum(gamma_star, hardy_p4_closed_form(gamma_star))


def concurrence(rho: Union[DensityOperator, np.ndarray]) -> float:
    """
    Wootters concurrence of a two-qubit operator.

    With rho = X X^dagger, the square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy) are the singular values of X^T (sy x sy) X.
    """
    rho = _as_density(rho)
    if rho.dim != 4:
        raise ValueError(f"Concurrence is defined for dim-4 operators, got dim {rho.dim}")
    w, v = np.linalg.eigh(rho.entries)
    w = np.where(w < CONCURRENCE_EIGEN_FLOOR, 0.0, w)
    x = v * np.sqrt(w)
    lambdas = np.sort(np.linalg.svd(x.T @ SIGMA_YY @ x, compute_uv=False))[::-1]
    return float(max(0.0, lambdas[0] - np.sum(lambdas[1:])))
