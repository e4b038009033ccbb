import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..models.components import SensorSet
from ..models.system import LtvSystem

log = logging.getLogger(__name__)


class StackedMaps(BaseModel):
    """
    Block maps L_0 .. L_k with x_i = L_i z, z = (x_0, w_0, .., w_{k-1}).

    `blocks[i]` is the n x n(k+1) matrix L_i. Its first column block is the
    state transition Phi_i = A_{i-1} .. A_0 used on the reduced path.
    """

    n: int
    k: int
    blocks: np.ndarray
    """Array of shape (k + 1, n, n(k + 1))."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def width(self) -> int:
        return self.n * (self.k + 1)

    def L(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def transition(self, i: int) -> np.ndarray:
        """Phi_i, the map from x_0 to x_i."""
        return self.blocks[i][:, : self.n]

    def stacked(self, rows: np.ndarray) -> np.ndarray:
        """Observation matrix stacking the selected rows of every L_j."""
        if rows.size == 0:
            return np.zeros((0, self.width))
        return self.blocks[:, rows, :].reshape(-1, self.width)


class InformationAtoms(BaseModel):
    """
    Per-sensor information matrices and their rank-one factors.

    `factors[m]` has k + 1 rows (row m of each L_j, or of each Phi_j on the
    reduced path) and `atoms[m] = factors[m].T @ factors[m]`.
    """

    maps: StackedMaps
    factors: np.ndarray
    """Array of shape (n, k + 1, dim)."""
    atoms: np.ndarray
    """Array of shape (n, dim, dim)."""
    reduced: bool = False
    """True when atoms act on x_0 alone (zero process noise)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def n(self) -> int:
        return self.maps.n

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]


def build_stacked_maps(system: LtvSystem) -> StackedMaps:
    n, k = system.n, system.k
    width = n * (k + 1)
    identity = np.eye(n)
    blocks = np.zeros((k + 1, n, width))
    blocks[0, :, :n] = identity
    for i in range(1, k + 1):
        # prefix of L_i = A_{i-1} @ prefix of L_{i-1}, then the identity block
        blocks[i, :, : n * i] = system.A(i - 1) @ blocks[i - 1, :, : n * i]
        blocks[i, :, n * i : n * (i + 1)] = identity
    blocks.setflags(write=False)
    return StackedMaps(n=n, k=k, blocks=blocks)


def build_information_atoms(
    maps: StackedMaps, reduced: bool = False
) -> InformationAtoms:
    """
    Precompute one information atom per sensor.

    Args:
        maps (StackedMaps): Output of `build_stacked_maps`.
        reduced (bool, optional): Build n x n atoms over x_0 from the
            transitions Phi_j instead of the full L_j.
    """
    dim = maps.n if reduced else maps.width
    # (k+1, n, dim) -> (n, k+1, dim): row m of every block, per sensor
    factors = np.ascontiguousarray(
        np.transpose(maps.blocks[:, :, :dim], (1, 0, 2))
    )
    atoms = np.einsum("mjp,mjq->mpq", factors, factors)
    factors.setflags(write=False)
    atoms.setflags(write=False)
    log.debug(f"Built {maps.n} information atoms of size {dim} (reduced={reduced})")
    return InformationAtoms(maps=maps, factors=factors, atoms=atoms, reduced=reduced)


def atoms_for(system: LtvSystem) -> InformationAtoms:
    """Maps and atoms on the path the system calls for."""
    return build_information_atoms(
        build_stacked_maps(system), reduced=system.zero_process_noise
    )


def information_matrix(atoms: InformationAtoms, S: SensorSet) -> np.ndarray:
    """Sum of the atoms of S, added in ascending sensor order."""
    total = np.zeros((atoms.dim, atoms.dim))
    for m in S.zero_based():
        total += atoms.atoms[m]
    return total


def reduced_observability(system: LtvSystem, S: SensorSet) -> np.ndarray:
    """Sum over m = 0..k of Phi_m^T C_S^T C_S Phi_m."""
    n = system.n
    rows = S.zero_based()
    total = np.zeros((n, n))
    phi = np.eye(n)
    for m in range(system.k + 1):
        if m > 0:
            phi = system.A(m - 1) @ phi
        selected = phi[rows, :]
        total += selected.T @ selected
    return total
