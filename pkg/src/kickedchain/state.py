"""Single-excitation states on the chain.

A state is a normalized complex amplitude vector; entry k is the amplitude
for the excitation sitting on site k+1 (sites are numbered from 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Construction tolerance on |sum |a|^2 - 1|.  Unitary steps preserve the norm
# to machine precision, so drift stays far below this even over long runs.
NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SpinState:
    """Normalized amplitude vector over chain sites (read-only)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("amplitudes must be a nonempty 1-D vector")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.sum(np.abs(arr) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.size

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def site_state(n_sites: int, site: int) -> SpinState:
    """Excitation perfectly localized on one site (1-based index)."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site must lie in [1, {n_sites}], got {site}")
    amps = np.zeros(n_sites, dtype=np.complex128)
    amps[site - 1] = 1.0
    return SpinState(amps)
