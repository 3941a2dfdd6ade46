from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of a linear master equation.

    ``values[i]`` is the state at ``times[i]``: a reduced vector, a population
    vector or a full density matrix.  ``ground_index`` points at the
    ground-state population inside a reduced/population vector.
    """

    times: np.ndarray
    values: np.ndarray
    labels: tuple[str, ...] = ()
    ground_index: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def ground_population(self) -> np.ndarray:
        v = self.values
        if v.ndim == 3:
            return v[:, self.ground_index, self.ground_index].real
        return v[:, self.ground_index].real

    def final(self) -> np.ndarray:
        return self.values[-1]
