import logging
import typing as t

import numpy as np

from ..common.linalg import (
    asymmetry,
    block_diagonal,
    is_positive_definite,
    spd_inverse,
    symmetrize,
)
from ..const import SYMMETRY_TOLERANCE
from ..errors import (
    DimensionMismatch,
    InvalidCoupling,
    NonPositiveSigma,
    NotPositiveDefinite,
    ZeroProcessNoise,
)
from ..models.system import LtvSystem, NoisePriorSummary

log = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _check_covariance(matrix: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(matrix)):
        raise NotPositiveDefinite(name, "not finite")
    skew = asymmetry(matrix)
    if skew > SYMMETRY_TOLERANCE:
        raise NotPositiveDefinite(name, f"not symmetric (asymmetry {skew:.3g})")
    matrix = symmetrize(matrix)
    if not is_positive_definite(matrix):
        raise NotPositiveDefinite(name)
    return matrix


def _as_sequence(
    array: np.ndarray, n: int, k: int, name: str
) -> np.ndarray:
    """Shape-check a single matrix or a sequence of k matrices."""
    if array.size == 0 and k == 0:
        return array.reshape(0, n, n)
    if array.ndim == 2:
        if array.shape != (n, n):
            raise DimensionMismatch(
                f"{name} must be {n}x{n}, got {array.shape[0]}x{array.shape[1]}"
            )
        return array
    if array.ndim == 3:
        if array.shape[1:] != (n, n):
            raise DimensionMismatch(
                f"{name} entries must be {n}x{n}, got {array.shape[1:]}"
            )
        if array.shape[0] != k:
            raise DimensionMismatch(
                f"{name} holds {array.shape[0]} matrices, expected k={k}"
            )
        return array
    raise DimensionMismatch(f"{name} must be a matrix or a sequence of matrices")


def validate(system: LtvSystem) -> LtvSystem:
    """
    Check an instance against the model assumptions.

    Covariances with asymmetry up to `SYMMETRY_TOLERANCE` are replaced by
    their symmetric part. The returned copy holds read-only arrays.

    Raises:
        NonPositiveSigma: sigma <= 0.
        DimensionMismatch: Wrong shapes or sequence lengths.
        NotPositiveDefinite: A covariance fails the symmetry or Cholesky test.
    """
    n, k = system.n, system.k
    if n < 1:
        raise DimensionMismatch(f"State dimension must be positive, got {n}")
    if k < 0:
        raise DimensionMismatch(f"Horizon must be non-negative, got {k}")
    if not np.isfinite(system.sigma) or system.sigma <= 0:
        raise NonPositiveSigma(f"sigma must be positive, got {system.sigma}")

    dynamics = _as_sequence(system.dynamics, n, k, "A")
    if not np.all(np.isfinite(dynamics)):
        raise DimensionMismatch("A contains non-finite values")

    if system.cov_x0.shape != (n, n):
        raise DimensionMismatch(
            f"cov_x0 must be {n}x{n}, got shape {system.cov_x0.shape}"
        )
    cov_x0 = _check_covariance(system.cov_x0, "cov_x0")

    cov_w = None
    if system.cov_w is not None:
        cov_w = _as_sequence(system.cov_w, n, k, "cov_w")
        if cov_w.ndim == 2:
            cov_w = _check_covariance(cov_w, "cov_w")
        elif len(cov_w):
            cov_w = np.stack(
                [_check_covariance(w, f"cov_w[{j}]") for j, w in enumerate(cov_w)]
            )

    return system.model_copy(
        update={
            "dynamics": _frozen(dynamics),
            "cov_x0": _frozen(cov_x0),
            "cov_w": None if cov_w is None else _frozen(cov_w),
            "sigma": float(system.sigma),
        }
    )


def prior_covariance_z(system: LtvSystem) -> np.ndarray:
    """Block diagonal covariance of (x_0, w_0, .., w_{k-1}).

    Raises:
        ZeroProcessNoise: The system has no process noise; use the
            reduced path.
    """
    if system.zero_process_noise:
        raise ZeroProcessNoise(
            "The stacked prior does not exist without process noise"
        )
    blocks = [system.cov_x0] + [system.cov_w_block(j) for j in range(system.k)]
    return block_diagonal(blocks)


def noise_prior_summary(system: LtvSystem) -> NoisePriorSummary:
    """Prior variances and the dynamics norm mu over the horizon.

    mu is the largest spectral norm among A_0..A_{k-1}, the matrices that
    enter L_0..L_k, so a time-invariant system and its time-varying
    encoding share one value. It is 0 when k = 0.
    """
    mu = max(
        (float(np.linalg.norm(system.A(m), 2)) for m in range(system.k)),
        default=0.0,
    )
    noise = system.noise_list()
    sigmaw_sq = max((float(np.max(np.diag(w))) for w in noise), default=0.0)
    return NoisePriorSummary(
        sigma0_sq=float(np.max(np.diag(system.cov_x0))),
        sigma0_inv_sq=float(np.max(np.diag(spd_inverse(system.cov_x0, "cov_x0")))),
        sigmaw_sq=sigmaw_sq,
        mu=mu,
    )


def gen_integrator_chain(n: int) -> np.ndarray:
    """Chain dynamics: -1 on the diagonal, 1 on the first subdiagonal."""
    if n < 1:
        raise DimensionMismatch(f"Chain length must be positive, got {n}")
    return -np.eye(n) + np.eye(n, k=-1)


def gen_diffusion_grid(rows: int, cols: int, coupling: float) -> np.ndarray:
    """
    Row-stochastic diffusion on a rows x cols grid with 4-neighbour coupling.

    Node (r, c) has index r * cols + c. Each node keeps weight
    `1 - coupling * degree` and receives `coupling` from every neighbour.

    Raises:
        InvalidCoupling: coupling outside (0, 1) or large enough to make a
            diagonal weight non-positive.
    """
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"Grid must be at least 1x1, got {rows}x{cols}")
    if not 0.0 < coupling < 1.0:
        raise InvalidCoupling(f"coupling must lie in (0, 1), got {coupling}")
    size = rows * cols
    A = np.zeros((size, size))
    max_degree = 0
    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            neighbours = [
                (r + dr, c + dc)
                for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
                if 0 <= r + dr < rows and 0 <= c + dc < cols
            ]
            for nr, nc in neighbours:
                A[node, nr * cols + nc] = coupling
            A[node, node] = 1.0 - coupling * len(neighbours)
            max_degree = max(max_degree, len(neighbours))
    if coupling * max_degree >= 1.0:
        raise InvalidCoupling(
            f"coupling * max degree must be < 1, got {coupling * max_degree:.3g}"
        )
    return A


def build_system(
    dynamics: np.ndarray,
    k: int,
    sigma: float = 1.0,
    x0_variance: float = 1.0,
    w_variance: float = 1.0,
    zero_process_noise: bool = False,
) -> LtvSystem:
    """Time-invariant system with scaled identity covariances."""
    n = dynamics.shape[0]
    return validate(
        LtvSystem(
            n=n,
            k=k,
            A=dynamics,
            cov_x0=x0_variance * np.eye(n),
            cov_w=None if zero_process_noise else w_variance * np.eye(n),
            sigma=sigma,
        )
    )


def chain_system(n: int, k: int, sigma: float = 1.0) -> LtvSystem:
    """Integrator chain with identity covariances."""
    return build_system(gen_integrator_chain(n), k, sigma=sigma)


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    B = rng.normal(size=(n, n))
    return B @ B.T / n + 0.5 * np.eye(n)


def _random_dynamics(rng: np.random.Generator, n: int, mu: float) -> np.ndarray:
    A = rng.normal(size=(n, n))
    norm = np.linalg.norm(A, 2)
    if norm == 0.0:
        return np.zeros((n, n))
    return A * (mu / norm)


def gen_random_system(
    n: int,
    k: int,
    seed: t.Optional[int] = None,
    mu: float = 0.9,
    zero_process_noise: bool = False,
    time_varying: bool = False,
) -> LtvSystem:
    """
    Seeded random instance.

    Every dynamics matrix has spectral norm `mu`; covariances are random
    SPD matrices and sigma is drawn from [0.5, 2].
    """
    if mu < 0:
        raise ValueError(f"mu must be non-negative, got {mu}")
    rng = np.random.default_rng(seed)
    if time_varying:
        dynamics = np.array(
            [_random_dynamics(rng, n, mu) for _ in range(k)]
        ).reshape(k, n, n)
    else:
        dynamics = _random_dynamics(rng, n, mu)
    cov_x0 = _random_spd(rng, n)
    cov_w: t.Optional[np.ndarray] = None
    if not zero_process_noise:
        if time_varying:
            cov_w = np.array([_random_spd(rng, n) for _ in range(k)]).reshape(
                k, n, n
            )
        else:
            cov_w = _random_spd(rng, n)
    sigma = float(rng.uniform(0.5, 2.0))
    log.debug(f"Random system n={n} k={k} mu={mu} seed={seed}")
    return validate(
        LtvSystem(n=n, k=k, A=dynamics, cov_x0=cov_x0, cov_w=cov_w, sigma=sigma)
    )
