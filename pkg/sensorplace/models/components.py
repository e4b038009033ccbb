import typing as t

import numpy as np
from pydantic import ConfigDict, RootModel, model_validator

from ..errors import InvalidSensorSet


class SensorSet(RootModel[t.Tuple[int, ...]]):
    """
    Strictly increasing tuple of 1-based state indices carrying a sensor.

    Indices are 1-based everywhere outside the numerical kernels.
    `zero_based()` and `from_zero_based()` are the only conversion
    points to array positions.
    """

    root: t.Tuple[int, ...] = ()
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "SensorSet":
        items = self.root
        if any(i < 1 for i in items):
            raise ValueError("Sensor indices start at 1")
        if any(b <= a for a, b in zip(items, items[1:])):
            raise ValueError("Sensor indices must be strictly increasing")
        return self

    @classmethod
    def of(cls, indices: t.Iterable[int], n: int) -> "SensorSet":
        """Build a set from indices in any order, checked against `n`.

        Raises:
            InvalidSensorSet: On duplicates or indices outside 1..n.
        """
        items = [int(i) for i in indices]
        if len(set(items)) != len(items):
            raise InvalidSensorSet(f"Duplicate sensor index in {items}")
        bad = [i for i in items if i < 1 or i > n]
        if bad:
            raise InvalidSensorSet(f"Sensor index out of range 1..{n}: {bad}")
        return cls(tuple(sorted(items)))

    @classmethod
    def parse(cls, text: str, n: int) -> "SensorSet":
        """Parse a comma separated list such as `3,5`; empty means no sensors."""
        text = (text or "").strip()
        if not text:
            return cls(())
        try:
            items = [int(it) for it in text.split(",") if it.strip()]
        except ValueError:
            raise InvalidSensorSet(f"Cannot parse sensor list: {text!r}")
        return cls.of(items, n)

    @classmethod
    def full(cls, n: int) -> "SensorSet":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_mask(cls, mask: int) -> "SensorSet":
        """Bit i of `mask` marks sensor i+1."""
        items = []
        i = 0
        while mask:
            if mask & 1:
                items.append(i + 1)
            mask >>= 1
            i += 1
        return cls(tuple(items))

    @classmethod
    def from_zero_based(cls, positions: t.Iterable[int], n: int) -> "SensorSet":
        return cls.of((int(p) + 1 for p in positions), n)

    @property
    def mask(self) -> int:
        out = 0
        for i in self.root:
            out |= 1 << (i - 1)
        return out

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.root, dtype=int) - 1

    def with_sensor(self, index: int) -> "SensorSet":
        if index in self.root:
            raise InvalidSensorSet(f"Sensor {index} already placed")
        return SensorSet(tuple(sorted(self.root + (index,))))

    def values(self) -> t.List[int]:
        return list(self.root)

    def __len__(self) -> int:
        return len(self.root)

    def __iter__(self):  # type: ignore[override]
        return iter(self.root)

    def __contains__(self, index: object) -> bool:
        return index in self.root

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.root) + "}"
