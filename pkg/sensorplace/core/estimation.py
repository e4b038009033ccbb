import logging
import math
import typing as t

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from ..common.linalg import (
    block_diagonal,
    cholesky_lower,
    cholesky_update_rows,
    logdet_from_cholesky,
    spd_inverse,
    spd_logdet,
    symmetrize,
)
from ..errors import ZeroProcessNoise
from ..models.components import SensorSet
from ..models.enums import EstimationPath, UpdateMode
from ..models.results import ErrorReport
from ..models.system import LtvSystem
from .stacked import (
    InformationAtoms,
    build_stacked_maps,
    information_matrix,
    reduced_observability,
)
from .system import prior_covariance_z

log = logging.getLogger(__name__)


def prior_information(system: LtvSystem, reduced: bool = False) -> np.ndarray:
    """
    sigma^2 times the inverse prior covariance of the estimated vector.

    The inverse is assembled from per-block inverses; a time-invariant
    C(w) is inverted once.
    """
    scale = system.sigma**2
    x0_inv = spd_inverse(system.cov_x0, "cov_x0")
    if reduced:
        return scale * x0_inv
    if system.zero_process_noise:
        raise ZeroProcessNoise(
            "No stacked prior information without process noise"
        )
    if system.cov_w is not None and system.cov_w.ndim == 2:
        w_inv = spd_inverse(system.cov_w, "cov_w")
        noise = [w_inv] * system.k
    else:
        noise = [
            spd_inverse(system.cov_w_block(j), f"cov_w[{j}]")
            for j in range(system.k)
        ]
    return scale * block_diagonal([x0_inv] + noise)


class LogdetObjective:
    """
    Log-det estimation error as a set function over sensor sets.

    h(S) = 2 dim log(sigma) - log det(O_S + sigma^2 C^-1), with O_S the
    sum of the atoms of S in ascending order. Instances are read-only and
    safe to share between worker threads.
    """

    def __init__(self, system: LtvSystem, atoms: InformationAtoms):
        self.system = system
        self.atoms = atoms
        self.prior = prior_information(system, reduced=atoms.reduced)
        self.dim = atoms.dim
        self.offset = 2.0 * self.dim * math.log(system.sigma)

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def path(self) -> EstimationPath:
        if self.atoms.reduced:
            return EstimationPath.REDUCED_ZERO_PROCESS_NOISE
        return EstimationPath.GENERAL

    def information(self, S: SensorSet) -> np.ndarray:
        """O_S + sigma^2 C^-1."""
        return self.prior + information_matrix(self.atoms, S)

    def factor(self, S: SensorSet) -> np.ndarray:
        return cholesky_lower(self.information(S), name=f"information of {S}")

    def value(self, S: SensorSet) -> float:
        """h(S), always refactored from scratch."""
        return self.offset - logdet_from_cholesky(self.factor(S))

    def value_with(
        self,
        base_factor: np.ndarray,
        base_information: np.ndarray,
        sensor: int,
        update: UpdateMode = UpdateMode.RANK_ONE,
    ) -> float:
        """
        h(S + {sensor}) from the factor of S.

        Args:
            base_factor (np.ndarray): Lower Cholesky factor of the
                information matrix of S.
            base_information (np.ndarray): The information matrix of S,
                used by the refactor strategy.
            sensor (int): 1-based index of the candidate.
            update (UpdateMode): Rank-one update chain over the k + 1 atom
                factors, or a full refactorization.
        """
        m = sensor - 1
        if update == UpdateMode.RANK_ONE:
            factor = cholesky_update_rows(base_factor, self.atoms.factors[m])
        else:
            factor = cholesky_lower(
                base_information + self.atoms.atoms[m], name=f"candidate {sensor}"
            )
        return self.offset - logdet_from_cholesky(factor)

    def covariance(self, S: SensorSet) -> np.ndarray:
        """Error covariance sigma^2 (O_S + sigma^2 C^-1)^-1."""
        return self.system.sigma**2 * spd_inverse(
            self.information(S), name=f"information of {S}"
        )


def logdet_error(
    system: LtvSystem, atoms: InformationAtoms, S: SensorSet
) -> float:
    """Closed-form log-det error on the general path.

    Raises:
        ZeroProcessNoise: Use `logdet_error_reduced` instead.
    """
    if system.zero_process_noise or atoms.reduced:
        raise ZeroProcessNoise(
            "Zero process noise: use the reduced log-det error"
        )
    return LogdetObjective(system, atoms).value(S)


def logdet_error_reduced(system: LtvSystem, S: SensorSet) -> float:
    """
    Log-det error of x_0 with zero process noise.

    Computed from `reduced_observability` directly, independent of any
    precomputed atoms.
    """
    n = system.n
    information = reduced_observability(system, S) + prior_information(
        system, reduced=True
    )
    return 2.0 * n * math.log(system.sigma) - spd_logdet(
        information, name=f"reduced information of {S}"
    )


def _direct(prior: np.ndarray, O: np.ndarray, sigma: float) -> np.ndarray:
    if O.shape[0] == 0:
        return prior.copy()
    projected = O @ prior
    innovation = projected @ O.T + sigma**2 * np.eye(O.shape[0])
    correction = projected.T @ scipy.linalg.solve(
        innovation, projected, assume_a="pos"
    )
    return symmetrize(prior - correction)


def error_covariance_direct(system: LtvSystem, S: SensorSet) -> np.ndarray:
    """
    Error covariance from the covariance-form update with the stacked
    observation matrix built explicitly.

    Cross-check only; placement never calls it.
    """
    prior = prior_covariance_z(system)
    O = build_stacked_maps(system).stacked(S.zero_based())
    return _direct(prior, O, system.sigma)


def error_covariance_direct_reduced(
    system: LtvSystem, S: SensorSet
) -> np.ndarray:
    """Covariance-form error covariance of x_0 with zero process noise."""
    maps = build_stacked_maps(system)
    rows = S.zero_based()
    if rows.size:
        O = np.concatenate(
            [maps.transition(j)[rows, :] for j in range(system.k + 1)]
        )
    else:
        O = np.zeros((0, system.n))
    return _direct(system.cov_x0, O, system.sigma)


def mmse_report(
    system: LtvSystem,
    atoms: InformationAtoms,
    S: SensorSet,
    objective: t.Optional[LogdetObjective] = None,
) -> ErrorReport:
    """Error statistics of S on the path matching `atoms`."""
    objective = objective or LogdetObjective(system, atoms)
    cov = objective.covariance(S)
    maps = atoms.maps
    n, k = system.n, system.k
    if atoms.reduced:
        phi_k = maps.transition(k)
        mmse_z = float(np.trace(cov))
        mmse_x0 = mmse_z
        mmse_xk = float(np.trace(phi_k @ cov @ phi_k.T))
    else:
        L_k = maps.L(k)
        mmse_z = float(np.trace(cov))
        mmse_x0 = float(np.trace(cov[:n, :n]))
        mmse_xk = float(np.trace(L_k @ cov @ L_k.T))
    value = objective.value(S)
    if value > mmse_z - objective.dim + 1e-9:
        log.warning(
            f"log-det {value:.6g} exceeds mmse - dim {mmse_z - objective.dim:.6g}"
            f" for {S}"
        )
    return ErrorReport(
        logdet_error=value,
        mmse_z=mmse_z,
        mmse_x0=mmse_x0,
        mmse_xk=mmse_xk,
        path=objective.path,
    )


def log_ellipsoid_volume(
    system: LtvSystem, logdet_error: float, epsilon: float
) -> float:
    """
    Log-volume of the confidence ellipsoid {e : e^T Sigma^-1 e <= epsilon}.

    The dimension is that of the estimated vector: n(k+1) in general, n on
    the reduced path.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    dim = system.estimation_dim
    return (
        (dim / 2.0) * math.log(epsilon * math.pi)
        - float(gammaln(dim / 2.0 + 1.0))
        + logdet_error / 2.0
    )
