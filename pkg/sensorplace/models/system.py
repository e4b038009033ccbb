import json
import typing as t
from pathlib import Path

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator


@t.runtime_checkable
class Loadable(t.Protocol):
    def load(self) -> t.Any: ...


ZERO = "zero"


class LtvSystem(BaseModel):
    """
    One placement instance: dynamics, noise covariances and horizon.

    Build instances through `LtvSystem.load()` or pass a constructed model
    through `sensorplace.core.system.validate()`; both return a validated,
    read-only copy.
    """

    n: int
    """
    State dimension.
    """
    k: int
    """
    Last index of the observation interval [0, k]; the interval holds
    k + 1 measurements.
    """
    dynamics: np.ndarray = Field(alias="A")
    """
    Either one n x n matrix (time-invariant, stored once) or an array of
    k matrices A_0 .. A_{k-1} with shape (k, n, n).
    """
    cov_x0: np.ndarray
    """
    Covariance of the initial state.
    """
    cov_w: t.Optional[np.ndarray]
    """
    Process noise covariance: one n x n matrix, k matrices with shape
    (k, n, n), or `None` for zero process noise. The JSON value `"zero"`
    maps to `None`.
    """
    sigma: float
    """
    Measurement noise standard deviation; C(v_k) = sigma^2 I.
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        populate_by_name=True,
        frozen=True,
    )

    @field_validator("dynamics", "cov_x0", mode="before")
    @classmethod
    def _as_array(cls, v):
        return np.array(v, dtype=float)

    @field_validator("cov_w", mode="before")
    @classmethod
    def _as_noise(cls, v):
        if v is None:
            return None
        if isinstance(v, str):
            if v.strip().lower() == ZERO:
                return None
            raise ValueError(f"Unknown cov_w value: {v!r}")
        return np.array(v, dtype=float)

    @property
    def time_invariant(self) -> bool:
        return self.dynamics.ndim == 2

    @property
    def zero_process_noise(self) -> bool:
        return self.cov_w is None

    @property
    def estimation_dim(self) -> int:
        """Size of the estimated vector: z_{k-1}, or x_0 alone without process noise."""
        return self.n if self.zero_process_noise else self.n * (self.k + 1)

    def A(self, m: int) -> np.ndarray:
        if self.time_invariant:
            return self.dynamics
        return self.dynamics[m]

    def cov_w_block(self, j: int) -> np.ndarray:
        """C(w_j); caller must check `zero_process_noise` first."""
        if self.cov_w is None:
            raise ValueError("Zero process noise has no covariance blocks")
        if self.cov_w.ndim == 2:
            return self.cov_w
        return self.cov_w[j]

    def noise_list(self) -> t.List[np.ndarray]:
        """C(w_0)..C(w_{k-1}); empty without process noise."""
        if self.cov_w is None:
            return []
        return [self.cov_w_block(j) for j in range(self.k)]

    def to_dict(self) -> t.Dict[str, t.Any]:
        """Plain JSON-ready representation in the system file format."""
        return {
            "n": self.n,
            "k": self.k,
            "A": self.dynamics.tolist(),
            "cov_x0": self.cov_x0.tolist(),
            "cov_w": ZERO if self.cov_w is None else self.cov_w.tolist(),
            "sigma": self.sigma,
        }

    def dump(self, indent: t.Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def load(
        cls,
        source: t.Union[str, Path, t.IO[str], Loadable, t.Mapping[str, t.Any]],
    ) -> "LtvSystem":
        """Load and validate a system from JSON or YAML.

        Args:
            source (str | Path | IO[str] | Loadable | Mapping):
                - Path to a .json/.yaml file
                - Raw JSON or YAML text
                - File-like object
                - Any object with a `.load()` method returning Python data
                - An already parsed mapping

        Returns:
            LtvSystem: a validated instance.
        """
        from ..core.system import validate

        if isinstance(source, t.Mapping):
            data: t.Any = dict(source)
        elif isinstance(source, Loadable):
            data = source.load()
        else:
            if isinstance(source, Path):
                text = source.read_text()
            elif hasattr(source, "read"):
                text = t.cast(t.IO[str], source).read()
            else:
                text = str(source)
            try:
                data = yaml.safe_load(text)
            except yaml.YAMLError:
                data = None
            # A bare string parses as a YAML scalar: treat it as a file name
            if isinstance(data, str):
                try:
                    data = yaml.safe_load(Path(data).read_text())
                except (OSError, yaml.YAMLError) as e:
                    raise ValueError(
                        f"Could not interpret {data!r} as a system or file path"
                    ) from e

        if not isinstance(data, dict):
            raise ValueError(
                f"Expected a system object, got {type(data).__name__}"
            )
        return validate(cls.model_validate(data))


class NoisePriorSummary(BaseModel):
    """Scalar summaries of the prior used by the fundamental limits."""

    sigma0_sq: float
    """Largest diagonal element of C(x_0)."""
    sigma0_inv_sq: float
    """Largest diagonal element of C(x_0)^-1."""
    sigmaw_sq: float
    """Largest diagonal element among all C(w_j); 0 without process noise."""
    mu: float
    """Largest spectral norm among the dynamics matrices."""

    model_config = ConfigDict(frozen=True)
