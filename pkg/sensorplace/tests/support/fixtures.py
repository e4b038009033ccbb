import typing as t

import numpy as np

from ...core.system import (
    build_system,
    chain_system,
    gen_diffusion_grid,
    gen_random_system,
    validate,
)
from ...models import LtvSystem


def scalar_system(a: float = 0.5, k: int = 0, x0: float = 1.0) -> LtvSystem:
    return validate(
        LtvSystem(n=1, k=k, A=[[a]], cov_x0=[[x0]], cov_w=[[1.0]], sigma=1.0)
    )


def demo_chain() -> LtvSystem:
    """5-node integrator chain on [0, 5], identity covariances, sigma = 1."""
    return chain_system(5, 5)


def grid_stand_in() -> LtvSystem:
    """3x3 diffusion grid, coupling 0.2, k = 20, no process noise."""
    return build_system(
        gen_diffusion_grid(3, 3, 0.2), 20, zero_process_noise=True
    )


def random_systems(
    count: int,
    seed: int,
    n_range: t.Tuple[int, int] = (1, 4),
    k_range: t.Tuple[int, int] = (0, 4),
    mu_range: t.Tuple[float, float] = (0.2, 0.95),
    zero_process_noise: bool = False,
) -> t.Iterator[LtvSystem]:
    """Seeded stream of random instances; every other one is time-varying."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        yield gen_random_system(
            int(rng.integers(n_range[0], n_range[1] + 1)),
            int(rng.integers(k_range[0], k_range[1] + 1)),
            seed=int(rng.integers(0, 2**31)),
            mu=float(rng.uniform(*mu_range)),
            zero_process_noise=zero_process_noise,
            time_varying=bool(i % 2),
        )


def random_subset(rng: np.random.Generator, n: int) -> t.List[int]:
    """Uniformly random subset of 1..n."""
    return [i + 1 for i in range(n) if rng.random() < 0.5]
