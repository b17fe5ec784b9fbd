"""
Simulated Photon-Counting Laboratory
====================================

Each measured projector is counted for a fixed window with Poisson
statistics whose mean is (noisy) probability x total rate x window.
Frequencies are normalized by the total counts of a run over the four
S_z / L_z eigenstates, and the Hardy gap

    P4 - P1 - P2 - P3

is reported with its root-sum-square uncertainty.

Every projector label draws from its own counter-based stream keyed by
(seed, label), so runs are reproducible and independent of the order in
which projectors are simulated.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .conf import lab_setting
from .errors import ConfigError, MissingLabelError, NoiseParameterError, ZeroTotalError
from .hardy import (
    PARADOX_EVENT, ZERO_EVENTS, HardyAngles, HardyEvent, JointProbabilityTable, basis_state_projectors,
    event_projector, hardy_density,
)
from .qstate import DensityOperator, _as_density, born_probability

logger = logging.getLogger(__name__)


DEFAULT_TOTAL_RATE = 120.0    # Hz
DEFAULT_WINDOW = 100.0        # s
VIOLATION_THRESHOLD = 7.0     # sigmas


def label_rng(seed: int, label: str) -> np.random.Generator:
    """Independent Philox stream for one (seed, label) pair."""
    digest = hashlib.sha256(f"{seed}:{label}".encode('utf-8')).digest()
    key = int.from_bytes(digest[:16], 'little')
    return np.random.Generator(np.random.Philox(key=key))


def _number(data: Mapping, key: str, default=None, cast=float):
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")


def _check_keys(data: Mapping, allowed: Iterable[str], section: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"'{section}' must be an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {section}: {', '.join(unknown)}")


def gamma_from_config(data: Mapping, key: str = 'gamma') -> Optional[float]:
    """Entanglement angle in radians from '<key>' (rad) or '<key>_deg'."""
    rad, deg = data.get(key), data.get(f"{key}_deg")
    if rad is not None and deg is not None:
        raise ConfigError(f"Give either '{key}' or '{key}_deg', not both")
    if deg is not None:
        return math.radians(_number(data, f"{key}_deg"))
    if rad is not None:
        return _number(data, key)
    return None


@dataclass(frozen=True)
class NoiseModel:
    """
    depolarizing_p: rho -> (1 - p) rho + p I/4 before measurement
    crosstalk_eps: q -> (1 - eps) q + eps/4 on each measured probability
    override_frequencies: Hardy-event probabilities replacing the quantum
        model outright, in event order (P1, P2, P3, P4)
    """
    depolarizing_p: float = 0.0
    crosstalk_eps: float = 0.0
    override_frequencies: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for name in ('depolarizing_p', 'crosstalk_eps'):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise NoiseParameterError(f"{name} must be in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)
        if self.override_frequencies is not None:
            values = tuple(float(v) for v in self.override_frequencies)
            if len(values) != len(HardyEvent):
                raise NoiseParameterError(
                    f"override_frequencies needs {len(HardyEvent)} entries, got {len(values)}"
                )
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise NoiseParameterError(f"override_frequencies must lie in [0, 1], got {values}")
            object.__setattr__(self, 'override_frequencies', values)

    @property
    def is_ideal(self) -> bool:
        return self.depolarizing_p == 0.0 and self.crosstalk_eps == 0.0 and self.override_frequencies is None

    def override_for(self, label: str) -> Optional[float]:
        if self.override_frequencies is None:
            return None
        for event, value in zip(HardyEvent, self.override_frequencies):
            if label == event.label:
                return value
        return None

    @classmethod
    def from_dict(cls, data: Optional[Mapping]) -> 'NoiseModel':
        if data is None:
            return cls()
        _check_keys(data, ('depolarizing_p', 'crosstalk_eps', 'override_frequencies'), 'noise')
        override = data.get('override_frequencies')
        if isinstance(override, Mapping):
            try:
                table = JointProbabilityTable.from_mapping(override)
            except (KeyError, ValueError) as e:
                raise ConfigError(f"Invalid override_frequencies: {e}")
            override = tuple(table[event] for event in HardyEvent)
        elif override is not None and not isinstance(override, (list, tuple)):
            raise ConfigError("override_frequencies must be a list or an object keyed by event label")
        try:
            return cls(
                depolarizing_p=_number(data, 'depolarizing_p', 0.0),
                crosstalk_eps=_number(data, 'crosstalk_eps', 0.0),
                override_frequencies=override,
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'depolarizing_p': self.depolarizing_p,
            'crosstalk_eps': self.crosstalk_eps,
            'override_frequencies': list(self.override_frequencies) if self.override_frequencies else None,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float
    total_rate: float = DEFAULT_TOTAL_RATE
    window: float = DEFAULT_WINDOW
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        HardyAngles(self.gamma)
        if not (math.isfinite(self.total_rate) and self.total_rate > 0.0):
            raise ConfigError(f"total_rate must be positive, got {self.total_rate!r}")
        if not (math.isfinite(self.window) and self.window > 0.0):
            raise ConfigError(f"window must be positive, got {self.window!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, 'seed', int(self.seed))
        object.__setattr__(self, 'gamma', float(self.gamma))

    @property
    def expected_total(self) -> float:
        return self.total_rate * self.window

    def with_seed(self, seed: int) -> 'ExperimentConfig':
        return ExperimentConfig(self.gamma, self.total_rate, self.window, seed, self.noise)

    @classmethod
    def from_dict(cls, data: Mapping, seed: Optional[int] = None) -> 'ExperimentConfig':
        """Parse a config object; an explicit seed wins over the file's."""
        _check_keys(data, ('gamma', 'gamma_deg', 'total_rate', 'window', 'seed', 'noise'), 'config')
        gamma = gamma_from_config(data)
        if gamma is None:
            raise ConfigError("Config needs 'gamma' (rad) or 'gamma_deg'")
        if seed is None:
            seed = _number(data, 'seed', lab_setting('HARDYLAB_DEFAULT_SEED', 0), cast=int)
        return cls(
            gamma=gamma,
            total_rate=_number(data, 'total_rate', DEFAULT_TOTAL_RATE),
            window=_number(data, 'window', DEFAULT_WINDOW),
            seed=seed,
            noise=NoiseModel.from_dict(data.get('noise')),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'gamma_deg': math.degrees(self.gamma),
            'total_rate': self.total_rate,
            'window': self.window,
            'seed': self.seed,
            'noise': self.noise.to_dict(),
        }


@dataclass(frozen=True)
class CountRecord:
    projector_label: str
    counts: int
    window: float

    def __post_init__(self):
        if self.counts < 0:
            raise ValueError(f"Counts must be non-negative, got {self.counts}")

    @property
    def rate_hz(self) -> float:
        return self.counts / self.window


@dataclass(frozen=True)
class FrequencyEstimate:
    label: str
    frequency: float
    sigma: float
    counts: Optional[int] = None

    @property
    def degenerate(self) -> bool:
        return self.counts == 0

    def to_dict(self) -> Dict[str, Any]:
        return {'frequency': self.frequency, 'sigma': self.sigma, 'counts': self.counts}


@dataclass(frozen=True)
class ViolationReport:
    estimates: Dict[str, FrequencyEstimate]
    gap: float
    gap_sigma: float
    n_sigmas: Optional[float]

    @property
    def violated(self) -> bool:
        return self.gap > 0.0

    @property
    def p_value(self) -> Optional[float]:
        """One-sided Gaussian tail beyond n_sigmas."""
        if self.n_sigmas is None:
            return None
        return float(norm.sf(self.n_sigmas))

    @property
    def degenerate_labels(self) -> List[str]:
        return [label for label, est in self.estimates.items() if est.degenerate]

    def significant(self, threshold: float = VIOLATION_THRESHOLD) -> bool:
        return self.n_sigmas is not None and self.n_sigmas >= threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            'frequencies': {label: est.to_dict() for label, est in self.estimates.items()},
            'gap': self.gap,
            'gap_sigma': self.gap_sigma,
            'n_sigmas': self.n_sigmas,
            'p_value': self.p_value,
            'violated': self.violated,
            'degenerate_labels': self.degenerate_labels,
        }


def apply_noise(rho, noise: NoiseModel) -> DensityOperator:
    """Depolarize the state; crosstalk and overrides act on probabilities."""
    rho = _as_density(rho)
    if noise.depolarizing_p == 0.0:
        return rho
    p = noise.depolarizing_p
    mixed = (1.0 - p) * rho.entries + p * np.eye(rho.dim) / rho.dim
    return DensityOperator(0.5 * (mixed + mixed.conj().T))


def transform_probabilities(
    q: Sequence[float],
    noise: NoiseModel,
    labels: Optional[Sequence[str]] = None,
    dim: int = 4,
) -> np.ndarray:
    """
    Crosstalk on a probability vector, then overrides.

    With labels, only Hardy-event labels are overridden. Without labels the
    override replaces the whole vector, whose length must then match.
    """
    q = np.asarray(q, dtype=float)
    out = (1.0 - noise.crosstalk_eps) * q + noise.crosstalk_eps / dim
    if noise.override_frequencies is None:
        return out
    if labels is None:
        if q.size != len(noise.override_frequencies):
            raise NoiseParameterError(
                f"override_frequencies has {len(noise.override_frequencies)} entries for {q.size} projectors"
            )
        return np.array(noise.override_frequencies, dtype=float)
    for k, label in enumerate(labels):
        value = noise.override_for(label)
        if value is not None:
            out[k] = value
    return out


def basis_projectors() -> Dict[str, np.ndarray]:
    return basis_state_projectors()


def hardy_projectors(gamma: float, exploration: bool = False) -> Dict[str, np.ndarray]:
    return {event.label: event_projector(gamma, event, exploration) for event in HardyEvent}


def simulate_counts(cfg: ExperimentConfig, projectors: Mapping[str, np.ndarray]) -> List[CountRecord]:
    rho = apply_noise(hardy_density(cfg.gamma), cfg.noise)
    labels = list(projectors)
    q = np.array([born_probability(rho, projectors[label]) for label in labels])
    q = transform_probabilities(q, cfg.noise, labels)
    means = q * cfg.total_rate * cfg.window

    records = []
    for label, mean in zip(labels, means):
        counts = int(label_rng(cfg.seed, label).poisson(mean))
        records.append(CountRecord(label, counts, cfg.window))
    return records


def estimate_frequencies(records: Iterable[CountRecord], total: float) -> Dict[str, FrequencyEstimate]:
    """f = N_i / N_tot with Poisson uncertainty sqrt(N_i) / N_tot."""
    if not total > 0:
        raise ZeroTotalError(f"Total counts must be positive, got {total!r}")
    estimates = {}
    for record in records:
        if record.counts == 0:
            logger.debug(f"Zero counts for {record.projector_label}; its uncertainty is zero")
        estimates[record.projector_label] = FrequencyEstimate(
            label=record.projector_label,
            frequency=record.counts / total,
            sigma=math.sqrt(record.counts) / total,
            counts=record.counts,
        )
    return estimates


def violation_statistic(estimates: Mapping[Any, FrequencyEstimate]) -> ViolationReport:
    resolved: Dict[HardyEvent, FrequencyEstimate] = {}
    for key, est in estimates.items():
        try:
            event = key if isinstance(key, HardyEvent) else HardyEvent.from_label(key)
        except KeyError:
            continue
        resolved[event] = est
    missing = [event.label for event in HardyEvent if event not in resolved]
    if missing:
        raise MissingLabelError(f"Missing Hardy frequencies: {', '.join(missing)}")

    # frequencies, not probabilities: N_tot comes from its own run, so f > 1 is possible
    gap = resolved[PARADOX_EVENT].frequency - sum(resolved[event].frequency for event in ZERO_EVENTS)
    gap_sigma = math.sqrt(sum(resolved[event].sigma ** 2 for event in (*ZERO_EVENTS, PARADOX_EVENT)))
    n_sigmas = gap / gap_sigma if gap_sigma > 0.0 else None
    if n_sigmas is None:
        logger.warning("Gap uncertainty is zero; significance is undefined")
    return ViolationReport(
        estimates={event.label: resolved[event] for event in HardyEvent},
        gap=gap,
        gap_sigma=gap_sigma,
        n_sigmas=n_sigmas,
    )


@dataclass(frozen=True)
class ExperimentRun:
    config: ExperimentConfig
    basis_records: List[CountRecord]
    hardy_records: List[CountRecord]
    n_total: int
    report: ViolationReport

    def count_rows(self) -> List[Tuple[str, int, float, float]]:
        return [
            (r.projector_label, r.counts, r.window, r.rate_hz)
            for r in (*self.basis_records, *self.hardy_records)
        ]


def simulate_experiment(cfg: ExperimentConfig) -> ExperimentRun:
    """Basis-state normalization run, Hardy-event run, frequencies and gap."""
    basis_records = simulate_counts(cfg, basis_projectors())
    n_total = sum(r.counts for r in basis_records)
    hardy_records = simulate_counts(cfg, hardy_projectors(cfg.gamma))
    report = violation_statistic(estimate_frequencies(hardy_records, n_total))
    logger.debug(
        f"seed={cfg.seed} N_tot={n_total} gap={report.gap:.5f} n_sigmas={report.n_sigmas}"
    )
    return ExperimentRun(cfg, basis_records, hardy_records, n_total, report)


def replicate(
    cfg: ExperimentConfig,
    runs: int,
    progress: Optional[Callable[[Iterable[int]], Iterable[int]]] = None,
) -> List[ExperimentRun]:
    """Independent runs with seeds seed, seed+1, ..."""
    if runs < 1:
        raise ConfigError(f"runs must be at least 1, got {runs}")
    offsets = range(runs) if progress is None else progress(range(runs))
    return [simulate_experiment(cfg.with_seed(cfg.seed + k)) for k in offsets]


def power_summary(runs: Sequence[ExperimentRun], threshold: float = VIOLATION_THRESHOLD) -> Dict[str, Any]:
    """Fraction of runs reaching the significance threshold, with N_tot spread."""
    sigmas = [r.report.n_sigmas for r in runs if r.report.n_sigmas is not None]
    totals = np.array([r.n_total for r in runs], dtype=float)
    hits = sum(1 for r in runs if r.report.significant(threshold))
    return {
        'runs': len(runs),
        'threshold_sigmas': threshold,
        'fraction_significant': hits / len(runs) if runs else 0.0,
        'n_sigmas_mean': float(np.mean(sigmas)) if sigmas else None,
        'n_sigmas_min': float(np.min(sigmas)) if sigmas else None,
        'n_total_mean': float(totals.mean()) if runs else None,
        'n_total_std': float(totals.std(ddof=1)) if len(runs) > 1 else None,
    }
