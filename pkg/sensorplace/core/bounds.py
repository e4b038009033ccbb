import logging
import math

import numpy as np

from ..const import MU_TOLERANCE, VACUOUS_THRESHOLD
from ..errors import InfeasibleAlpha, InvalidSensorSet, MuEqualsOne, MuEqualsZero
from ..models.components import SensorSet
from ..models.enums import Target
from ..models.results import BoundsReport
from ..models.system import NoisePriorSummary
from .stacked import StackedMaps

log = logging.getLogger(__name__)


def _check_mu(mu: float):
    if abs(mu - 1.0) <= MU_TOLERANCE:
        raise MuEqualsOne(f"The bounds exclude mu = 1 (mu = {mu:.12g})")


def _geometric(mu: float, k: int) -> float:
    """sum_{m=0..k} mu^(2m) in closed form, mu != 1."""
    return (1.0 - mu ** (2 * (k + 1))) / (1.0 - mu**2)


def _alpha_term(
    summary: NoisePriorSummary, alpha: float, n: int, sigma: float, l_i: float
) -> float:
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return n * sigma**2 * l_i / alpha - sigma**2 * summary.sigma0_inv_sq


def theorem1_bounds(
    summary: NoisePriorSummary,
    maps: StackedMaps,
    S: SensorSet,
    target: Target,
    sigma: float,
) -> BoundsReport:
    """
    Lower and upper bounds on mmse(x_0) or mmse(x_k) for any set of |S|
    sensors.

    For x_k the extreme eigenvalues of the Gram matrix L_k^T L_k enter the
    bound. Its smallest eigenvalue is zero whenever k >= 1, in which case
    the report carries a vacuous lower bound of 0.

    Raises:
        MuEqualsOne: mu within `MU_TOLERANCE` of 1.
    """
    _check_mu(summary.mu)
    n, k = maps.n, maps.k
    denominator = len(S) * _geometric(summary.mu, k) + sigma**2 * summary.sigma0_inv_sq
    if target == Target.X0:
        l_i = 1.0
        u_i = summary.sigma0_sq
        lower = n * sigma**2 * l_i / denominator
        return BoundsReport(target=target, lower=lower, upper=n * u_i, l_i=l_i, u_i=u_i)

    L_k = maps.L(k)
    eigenvalues = np.linalg.eigvalsh(L_k.T @ L_k)
    l_i = max(float(eigenvalues[0]), 0.0)
    u_i = (k + 1) * float(eigenvalues[-1]) * max(summary.sigma0_sq, summary.sigmaw_sq)
    vacuous = l_i <= VACUOUS_THRESHOLD
    if vacuous:
        log.info(
            f"Smallest eigenvalue of L_k^T L_k is {l_i:.3g}: lower bound is vacuous"
        )
        lower = 0.0
    else:
        lower = n * sigma**2 * l_i / denominator
    return BoundsReport(
        target=target,
        lower=lower,
        upper=n * u_i,
        l_i=l_i,
        u_i=u_i,
        vacuous=vacuous,
    )


def corollary1_min_sensors(
    summary: NoisePriorSummary,
    alpha: float,
    k: int,
    n: int,
    sigma: float,
    l_i: float,
) -> float:
    """
    Real-valued lower bound on |S| for any placement achieving
    mmse(x_i) = alpha. Values <= 0 mean no constraint.
    """
    _check_mu(summary.mu)
    return _alpha_term(summary, alpha, n, sigma, l_i) / _geometric(summary.mu, k)


def corollary2_min_interval(
    summary: NoisePriorSummary,
    alpha: float,
    n: int,
    sigma: float,
    cardS: int,
    l_i: float,
) -> float:
    """
    Real-valued lower bound on k for an interval on which |S| sensors
    achieve mmse(x_i) = alpha.

    Raises:
        MuEqualsOne: mu within `MU_TOLERANCE` of 1.
        MuEqualsZero: mu = 0 leaves the logarithm undefined.
        InfeasibleAlpha: No finite interval reaches alpha with |S| sensors.
    """
    _check_mu(summary.mu)
    if summary.mu == 0.0:
        raise MuEqualsZero("The interval bound is undefined for mu = 0")
    if cardS < 1:
        raise InvalidSensorSet("The interval bound needs at least one sensor")
    argument = (
        1.0
        - _alpha_term(summary, alpha, n, sigma, l_i) * (1.0 - summary.mu**2) / cardS
    )
    if argument <= 0.0:
        raise InfeasibleAlpha(
            f"alpha = {alpha:.6g} is out of reach with {cardS} sensors"
        )
    return math.log(argument) / (2.0 * math.log(summary.mu)) - 1.0


def empty_set_logdet_bound(
    summary: NoisePriorSummary, n: int, k: int, reduced: bool = False
) -> float:
    """Upper bound dim * log max(sigma_0^2, sigma_w^2) on the no-sensor log-det."""
    dim = n if reduced else n * (k + 1)
    if reduced:
        variance = summary.sigma0_sq
    else:
        variance = max(summary.sigma0_sq, summary.sigmaw_sq)
    return dim * math.log(variance)
