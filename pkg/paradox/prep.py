"""
Optical State Preparation
=========================

Jones-calculus wave plates acting on polarization, followed by a q-plate
(q = 1/2) coupling circular polarization to OAM:

    |L>|0> -> |R>|+1>        |R>|0> -> |L>|-1>

The Hardy state is produced from horizontal input by HWP(gamma/2),
QWP(pi/4), HWP(-pi/8) and the q-plate. Plate angles are measured from
the horizontal axis; the retardance sign follows HARDYLAB_RETARDANCE_SIGN.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .conf import lab_setting
from .errors import ConventionMismatchError, GammaRangeError, InvalidDimensionError, UnsupportedModeError
from .hardy import PARADOX_INTERVAL, hardy_state
from .qstate import PHASE_TOLERANCE, StateVector, overlap

logger = logging.getLogger(__name__)


HORIZONTAL = StateVector(np.array([1.0, 0.0], dtype=complex))
VERTICAL = StateVector(np.array([0.0, 1.0], dtype=complex))
# Jones vectors of the circular states in the (H, V) basis
LEFT = StateVector(np.array([1.0, -1.0j]) / math.sqrt(2.0))
RIGHT = StateVector(np.array([1.0, 1.0j]) / math.sqrt(2.0))


class PlateKind(str, Enum):
    HALF_WAVE = 'half-wave'
    QUARTER_WAVE = 'quarter-wave'

    @property
    def retardance(self) -> float:
        return math.pi if self is PlateKind.HALF_WAVE else math.pi / 2.0


@dataclass(frozen=True)
class WavePlate:
    kind: PlateKind
    theta: float

    def __post_init__(self):
        object.__setattr__(self, 'kind', PlateKind(self.kind))
        if not math.isfinite(self.theta):
            raise ValueError(f"Plate angle must be finite, got {self.theta!r}")

    def __str__(self):
        return f"{self.kind.value}@{math.degrees(self.theta):.3f}deg"


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def retardance_sign() -> int:
    sign = int(lab_setting('HARDYLAB_RETARDANCE_SIGN', 1))
    if sign not in (-1, 1):
        raise ValueError(f"HARDYLAB_RETARDANCE_SIGN must be +1 or -1, got {sign}")
    return sign


def jones_matrix(plate: WavePlate, sign: Optional[int] = None) -> np.ndarray:
    """R(theta) diag(1, exp(i sign delta)) R(-theta)"""
    sign = retardance_sign() if sign is None else sign
    retarder = np.diag([1.0, np.exp(1j * sign * plate.kind.retardance)])
    return rotation(plate.theta) @ retarder @ rotation(-plate.theta)


def circular_components(polarization: StateVector) -> Tuple[complex, complex]:
    """(<L|pol>, <R|pol>)"""
    if polarization.dim != 2:
        raise InvalidDimensionError(f"Polarization state must be dim 2, got dim {polarization.dim}")
    return LEFT.inner(polarization), RIGHT.inner(polarization)


def qplate_apply(polarization: StateVector, oam: int = 0) -> StateVector:
    """Spin-orbit state emerging from a q=1/2 plate for a zero-OAM input."""
    if oam != 0:
        raise UnsupportedModeError(f"q-plate model covers the zero-OAM input only, got m={oam}")
    alpha_l, alpha_r = circular_components(polarization)
    amps = np.zeros(4, dtype=complex)
    amps[1] = alpha_r    # |L>_p |-1>_o
    amps[2] = alpha_l    # |R>_p |+1>_o
    return StateVector(amps)


@dataclass(frozen=True)
class PrepPipeline:
    input_polarization: StateVector = HORIZONTAL
    plates: Tuple[WavePlate, ...] = field(default_factory=tuple)
    qplate_enabled: bool = True

    def jones_product(self, sign: Optional[int] = None) -> np.ndarray:
        total = np.eye(2, dtype=complex)
        for plate in self.plates:
            total = jones_matrix(plate, sign) @ total
        return total

    def polarization(self, sign: Optional[int] = None) -> StateVector:
        """Polarization after the plates, before the q-plate."""
        if self.input_polarization.dim != 2:
            raise InvalidDimensionError("Pipeline input must be a polarization state")
        out = self.jones_product(sign) @ self.input_polarization.amplitudes
        return StateVector(out)

    def run(self, sign: Optional[int] = None) -> StateVector:
        pol = self.polarization(sign)
        if not self.qplate_enabled:
            return pol
        return qplate_apply(pol)

    def describe(self) -> str:
        steps = ' -> '.join(str(p) for p in self.plates) or 'no plates'
        return f"{steps} -> q-plate" if self.qplate_enabled else steps


def hardy_pipeline(gamma: float) -> PrepPipeline:
    return PrepPipeline(
        input_polarization=HORIZONTAL,
        plates=(
            WavePlate(PlateKind.HALF_WAVE, gamma / 2.0),
            WavePlate(PlateKind.QUARTER_WAVE, math.pi / 4.0),
            WavePlate(PlateKind.HALF_WAVE, -math.pi / 8.0),
        ),
    )


def prepare_hardy(gamma: float, sign: Optional[int] = None) -> StateVector:
    """
    Run the preparation chain and check it against the Hardy state.

    The prepared vector keeps its global phase. Raises
    ConventionMismatchError when the overlap with the target falls below
    1 - 1e-10, which flags an inconsistent plate or handedness convention.
    """
    lo, hi = PARADOX_INTERVAL
    if not (lo <= gamma <= hi):
        raise GammaRangeError(f"Preparation supports gamma in [0, pi/4], got {gamma!r}")

    pipeline = hardy_pipeline(gamma)
    prepared = pipeline.run(sign)
    fid = overlap(hardy_state(gamma), prepared)
    if fid < 1.0 - PHASE_TOLERANCE:
        raise ConventionMismatchError(
            f"Prepared state overlaps the Hardy state by {fid:.12f} at gamma={gamma!r}",
            overlap=fid,
        )
    logger.debug(f"Prepared Hardy state via {pipeline.describe()} (overlap {fid:.15f})")
    return prepared
