"""
Spin-Orbit State Tomography
===========================

Product projections on the eigenstates of the three Pauli operators of
each qubit (36 settings, summing to 9 I), Poisson counts per setting, and
maximum-likelihood reconstruction by the iterative R rho R scheme.

The iteration starts from the linear-inversion estimate projected onto
physical states and lightly mixed with I/4. Every iteration compares the
R rho R step, diluted as (I + eps R) rho (I + eps R) when the full step
loses likelihood, with a projected-gradient step whose length follows
the last displacement (Barzilai-Borwein) and is halved until it gains.
The projected step reaches rank-deficient optima that the multiplicative
R rho R update only approaches slowly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .conf import lab_setting
from .errors import ConfigError, InvalidDimensionError, MissingLabelError, ZeroTotalError
from .hardy import concurrence, hardy_density
from .prep import prepare_hardy
from .qstate import DensityOperator, StateVector, _as_density, fidelity, is_projector, projector, tensor
from .simlab import NoiseModel, _check_keys, _number, apply_noise, gamma_from_config, label_rng, transform_probabilities

logger = logging.getLogger(__name__)


PAULI_EIGENSTATES: Dict[str, StateVector] = {
    'Z+': StateVector(np.array([1.0, 0.0], dtype=complex)),
    'Z-': StateVector(np.array([0.0, 1.0], dtype=complex)),
    'X+': StateVector(np.array([1.0, 1.0]) / math.sqrt(2.0)),
    'X-': StateVector(np.array([1.0, -1.0]) / math.sqrt(2.0)),
    'Y+': StateVector(np.array([1.0, 1.0j]) / math.sqrt(2.0)),
    'Y-': StateVector(np.array([1.0, -1.0j]) / math.sqrt(2.0)),
}

PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# sigma_i (x) sigma_j, orthogonal with tr(G_k G_l) = 4 delta_kl
PAULI_PRODUCTS = np.array([np.kron(a, b) for a in PAULI_MATRICES for b in PAULI_MATRICES])

INITIAL_MIXING = 1e-6
MIN_DILUTION = 1e-8
MIN_STEP = 1e-10
MAX_STEP = 1e3
MAX_BACKTRACKS = 60
ARMIJO = 1e-4
# moves below this, scaled by the step, are rounding noise
FIXED_POINT = 1e-13


@dataclass(frozen=True, eq=False)
class TomographySetting:
    label: str
    projector: np.ndarray

    def __post_init__(self):
        p = np.array(self.projector, dtype=complex)
        if p.shape != (4, 4):
            raise InvalidDimensionError(f"Setting {self.label} needs a 4x4 projector, got {p.shape}")
        if not is_projector(p) or abs(np.trace(p).real - 1.0) > 1e-10:
            raise ValueError(f"Setting {self.label} is not a rank-1 projector")
        p.setflags(write=False)
        object.__setattr__(self, 'projector', p)


@dataclass
class TomographyResult:
    rho_hat: DensityOperator
    log_likelihood: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)


def tomography_settings() -> List[TomographySetting]:
    """All 36 products of single-qubit Pauli eigenstates, polarization first."""
    settings = []
    for p_label, p_state in PAULI_EIGENSTATES.items():
        for o_label, o_state in PAULI_EIGENSTATES.items():
            settings.append(TomographySetting(
                label=f"p:{p_label}|o:{o_label}",
                projector=projector(tensor(p_state, o_state)),
            ))
    return settings


def measurement_matrix(settings: Optional[Sequence[TomographySetting]] = None) -> np.ndarray:
    """
    Real design matrix A with A[s, k] = tr(Pi_s G_k) / 4, so that
    rho = sum_k x_k G_k / 4 gives tr(rho Pi_s) = (A x)_s.

    Rank 16 means the settings are informationally complete.
    """
    settings = tomography_settings() if settings is None else settings
    stack = np.array([s.projector for s in settings])
    return np.einsum('sij,kji->sk', stack, PAULI_PRODUCTS).real / 4.0


def _stack(settings: Sequence[TomographySetting]) -> Tuple[np.ndarray, float]:
    stack = np.array([s.projector for s in settings])
    total = stack.sum(axis=0)
    scale = float(np.trace(total).real) / total.shape[0]
    if np.max(np.abs(total - scale * np.eye(total.shape[0]))) > 1e-10:
        raise ValueError("Tomography settings must sum to a multiple of the identity")
    return stack, scale


def simulate_tomography(
    rho,
    counts_per_setting: float,
    seed: int,
    settings: Optional[Sequence[TomographySetting]] = None,
    exact: bool = False,
    noise: Optional[NoiseModel] = None,
) -> Dict[str, float]:
    """
    Poisson counts with mean q_s * counts_per_setting for every setting.

    With exact=True the means themselves are returned.
    """
    rho = _as_density(rho)
    if not counts_per_setting > 0:
        raise ValueError(f"counts_per_setting must be positive, got {counts_per_setting!r}")
    settings = tomography_settings() if settings is None else settings
    stack = np.array([s.projector for s in settings])
    q = np.clip(np.einsum('sij,ji->s', stack, rho.entries).real, 0.0, 1.0)
    if noise is not None:
        q = transform_probabilities(q, noise, [s.label for s in settings])
    means = q * counts_per_setting

    if exact:
        return {s.label: float(m) for s, m in zip(settings, means)}
    return {s.label: int(label_rng(seed, s.label).poisson(m)) for s, m in zip(settings, means)}


def project_to_states(m: np.ndarray) -> np.ndarray:
    """
    Closest density operator in Frobenius norm: Hermitian part, then the
    eigenvalues projected onto the probability simplex.
    """
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    u = np.sort(w)[::-1]
    excess = np.cumsum(u) - 1.0
    k = np.nonzero(u - excess / np.arange(1, u.size + 1) > 0.0)[0][-1]
    w = np.clip(w - excess[k] / (k + 1), 0.0, None)
    return (v * w) @ v.conj().T


def linear_inversion(frequencies: np.ndarray, settings: Sequence[TomographySetting]) -> np.ndarray:
    """Least-squares operator reproducing the frequencies; may be unphysical."""
    _, scale = _stack(settings)
    a = measurement_matrix(settings)
    x, *_ = np.linalg.lstsq(a, scale * frequencies, rcond=None)
    return np.einsum('k,kij->ij', x, PAULI_PRODUCTS) / 4.0


def mle_reconstruct(
    counts: Mapping[str, float],
    settings: Optional[Sequence[TomographySetting]] = None,
    tolerance: Optional[float] = None,
    max_iterations: Optional[int] = None,
) -> TomographyResult:
    """
    Maximum-likelihood density operator for the counts.

    log_likelihood is sum_s n_s log p_s over the raw counts, and the
    tolerance applies to its improvement per iteration. Each iteration
    takes the better of an R rho R step (diluted when the full step
    loses likelihood) and a projected-gradient step with a spectral step
    length; a step that no longer moves rho ends the run as converged.
    Non-convergence is reported through the result, not raised.
    """
    settings = tomography_settings() if settings is None else settings
    tolerance = lab_setting('HARDYLAB_MLE_TOLERANCE', 1e-10) if tolerance is None else tolerance
    if max_iterations is None:
        max_iterations = lab_setting('HARDYLAB_MLE_MAX_ITERATIONS', 5000)

    missing = [s.label for s in settings if s.label not in counts]
    if missing:
        raise MissingLabelError(f"Counts missing for {len(missing)} setting(s), e.g. {missing[0]}")
    n = np.array([float(counts[s.label]) for s in settings])
    if np.any(n < 0) or not np.all(np.isfinite(n)):
        raise ValueError("Counts must be finite and non-negative")
    total = float(n.sum())
    if total <= 0:
        raise ZeroTotalError("Tomography counts sum to zero")

    stack, scale = _stack(settings)
    dim = stack.shape[1]
    f = n / total
    observed = f > 0
    identity = np.eye(dim, dtype=complex)

    def probabilities(rho):
        return np.einsum('sij,ji->s', stack, rho).real / scale

    def gain(p_new, p_old):
        # per-count log-likelihood change
        if not np.all(np.isfinite(p_new)) or np.any(p_new[observed] <= 0.0):
            return -math.inf
        ratio = (p_new[observed] - p_old[observed]) / p_old[observed]
        return float(np.sum(f[observed] * np.log1p(ratio)))

    def r_operator(p):
        ratio = np.zeros_like(f)
        ratio[observed] = f[observed] / p[observed]
        return np.einsum('s,sij->ij', ratio, stack) / scale

    def rr_step(rho, operator):
        out = operator @ rho @ operator
        out = 0.5 * (out + out.conj().T)
        trace = np.trace(out).real
        if not trace > 0.0:
            return None
        return out / trace

    rho = (1.0 - INITIAL_MIXING) * project_to_states(linear_inversion(f, settings)) \
        + INITIAL_MIXING * identity / dim
    rho = DensityOperator(rho).entries
    p = probabilities(rho)
    current = float(np.sum(n[observed] * np.log(p[observed])))
    history = [current]
    converged = False
    iterations = 0
    step_length = 1.0
    previous = None

    for iterations in range(1, max_iterations + 1):
        r_op = r_operator(p)
        if previous is not None:
            # Barzilai-Borwein length from the last displacement
            s, y = rho - previous[0], previous[1] - r_op
            sy = float(np.vdot(s, y).real)
            if sy > 0.0:
                step_length = min(max(float(np.vdot(s, s).real) / sy, MIN_STEP), MAX_STEP)
        floor = FIXED_POINT * (1.0 + step_length * float(np.max(np.abs(r_op))))
        candidates = []

        at_fixed_point = False
        t = step_length
        for _ in range(MAX_BACKTRACKS):
            trial = project_to_states(rho + t * r_op)
            move = trial - rho
            if np.max(np.abs(move)) <= floor:
                at_fixed_point = True
                break
            value = gain(probabilities(trial), p)
            if value >= 0.0 and value >= ARMIJO * float(np.vdot(r_op, move).real):
                candidates.append((value, trial))
                break
            t /= 2.0

        eps = 1.0
        trial = rr_step(rho, r_op)
        value = -math.inf if trial is None else gain(probabilities(trial), p)
        while not value >= 0.0 and eps >= MIN_DILUTION:
            trial = rr_step(rho, identity + eps * r_op)
            value = -math.inf if trial is None else gain(probabilities(trial), p)
            eps /= 2.0
        if value >= 0.0 and np.max(np.abs(trial - rho)) > floor:
            candidates.append((value, trial))

        if not candidates:
            converged = at_fixed_point
            break

        value, best = max(candidates, key=lambda c: c[0])
        previous = (rho, r_op)
        rho = DensityOperator(0.5 * (best + best.conj().T)).entries
        p = probabilities(rho)
        improvement = total * value
        current += improvement
        history.append(current)
        if improvement < tolerance:
            converged = True
            break

    if not converged:
        logger.warning(f"MLE stopped after {iterations} iterations without converging")
    logger.debug(f"MLE finished after {iterations} iterations, logL={current:.6f}")
    return TomographyResult(DensityOperator(rho), current, iterations, converged, history)


def reconstruct_state(
    gamma: float,
    counts_per_setting: float,
    noise: Optional[NoiseModel] = None,
    seed: int = 0,
    exact: bool = False,
) -> Tuple[DensityOperator, TomographyResult]:
    """Prepare the Hardy state, simulate tomography counts and reconstruct."""
    noise = NoiseModel() if noise is None else noise
    true_rho = apply_noise(DensityOperator.from_state(prepare_hardy(gamma)), noise)
    counts = simulate_tomography(true_rho, counts_per_setting, seed, exact=exact, noise=noise)
    return true_rho, mle_reconstruct(counts)


@dataclass(frozen=True)
class CurvePoint:
    gamma: float
    concurrence: float
    theory: float
    fidelity: float

    def to_row(self) -> Tuple[float, float, float, float, float]:
        return self.gamma, math.degrees(self.gamma), self.concurrence, self.theory, self.fidelity


def concurrence_curve(
    gamma_grid: Iterable[float],
    counts_per_setting: float,
    noise: Optional[NoiseModel] = None,
    seed: int = 0,
    exact: bool = False,
) -> List[CurvePoint]:
    """Concurrence of the reconstructed state per grid angle; point k uses seed + k."""
    points = []
    for k, gamma in enumerate(gamma_grid):
        _, result = reconstruct_state(gamma, counts_per_setting, noise, seed + k, exact)
        points.append(CurvePoint(
            gamma=gamma,
            concurrence=concurrence(result.rho_hat),
            theory=math.sin(2.0 * gamma),
            fidelity=fidelity(result.rho_hat, hardy_density(gamma)),
        ))
    return points


@dataclass(frozen=True)
class TomographyConfig:
    gamma: float
    counts_per_setting: float = 10000.0
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    exact: bool = False
    sweep_gammas: Tuple[float, ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.counts_per_setting) and self.counts_per_setting > 0):
            raise ConfigError(f"counts_per_setting must be positive, got {self.counts_per_setting!r}")
        if self.noise.override_frequencies is not None:
            raise ConfigError("override_frequencies does not apply to tomography")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, 'seed', int(self.seed))

    @classmethod
    def from_dict(cls, data: Mapping, seed: Optional[int] = None) -> 'TomographyConfig':
        _check_keys(data, (
            'gamma', 'gamma_deg', 'counts_per_setting', 'seed', 'noise', 'exact',
            'sweep_gammas', 'sweep_gammas_deg',
        ), 'config')
        gamma = gamma_from_config(data)
        if gamma is None:
            raise ConfigError("Config needs 'gamma' (rad) or 'gamma_deg'")
        if seed is None:
            seed = _number(data, 'seed', lab_setting('HARDYLAB_DEFAULT_SEED', 0), cast=int)

        sweep_rad, sweep_deg = data.get('sweep_gammas'), data.get('sweep_gammas_deg')
        if sweep_rad is not None and sweep_deg is not None:
            raise ConfigError("Give either 'sweep_gammas' or 'sweep_gammas_deg', not both")
        sweep = sweep_rad if sweep_deg is None else sweep_deg
        if sweep is None:
            sweep = []
        if not isinstance(sweep, (list, tuple)):
            raise ConfigError("Sweep angles must be a list of numbers")
        try:
            sweep = [float(g) for g in sweep]
        except (TypeError, ValueError):
            raise ConfigError("Sweep angles must be a list of numbers")
        if sweep_deg is not None:
            sweep = [math.radians(g) for g in sweep]

        exact = data.get('exact', False)
        if not isinstance(exact, bool):
            raise ConfigError(f"'exact' must be true or false, got {exact!r}")
        return cls(
            gamma=gamma,
            counts_per_setting=_number(data, 'counts_per_setting', 10000.0),
            seed=seed,
            noise=NoiseModel.from_dict(data.get('noise')),
            exact=exact,
            sweep_gammas=tuple(sweep),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'gamma_deg': math.degrees(self.gamma),
            'counts_per_setting': self.counts_per_setting,
            'seed': self.seed,
            'noise': self.noise.to_dict(),
            'exact': self.exact,
            'sweep_gammas': list(self.sweep_gammas),
        }
