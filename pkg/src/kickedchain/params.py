"""Chain parameters and the dimensionless quantities derived from them.

The model is a spin chain restricted to its single-excitation sector,
evolving under free exchange hopping for one period and then receiving an
instantaneous parabolic phase kick centered on one site.  Two numbers fix
the physics:

    beta  -- integrated hopping phase per period (2*J*T0),
    b_q   -- curvature of the parabolic kick phase.

Their product K_s = beta * b_q is the stochasticity parameter of the
equivalent kicked rotor, with b_q playing the role of the effective
Planck constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ChainParams:
    """Static description of one chain-plus-kick configuration.

    Sites are numbered 1..n_sites; ``center`` is the site the parabolic
    kick is centered on.  ``boundary`` selects the open chain (the
    physical case) or a ring (used for exact kicked-rotor comparisons).
    """

    n_sites: int
    center: int
    beta: float
    b_q: float
    boundary: str = "open"

    def __post_init__(self) -> None:
        if not isinstance(self.n_sites, int) or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if self.boundary not in ("open", "ring"):
            raise ValueError(f"boundary must be 'open' or 'ring', got {self.boundary!r}")
        if self.boundary == "ring" and self.n_sites < 3:
            raise ValueError("ring boundary needs n_sites >= 3")
        if not isinstance(self.center, int) or not 1 <= self.center <= self.n_sites:
            raise ValueError(
                f"center must be an integer in [1, {self.n_sites}], got {self.center!r}"
            )
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"beta must be finite and nonnegative, got {self.beta!r}")
        if not (math.isfinite(self.b_q) and self.b_q >= 0.0):
            raise ValueError(f"b_q must be finite and nonnegative, got {self.b_q!r}")


@dataclass(frozen=True)
class DerivedParams:
    """Dimensionless parameters implied by a ChainParams value.

    k_s                 -- rotor stochasticity parameter beta * b_q
    hbar_eff            -- effective Planck constant (= b_q)
    alpha               -- k_s / 2*pi, the accelerator-mode tuning parameter
    hop_distance        -- per-period site advance of an accelerator mode, 2*pi/b_q
    localization_length -- predicted dynamical-localization length beta**2 / 4
    break_time          -- periods until quantum spreading saturates, beta**2
    """

    k_s: float
    hbar_eff: float
    alpha: float
    hop_distance: float
    localization_length: float
    break_time: float


def derived_params(p: ChainParams) -> DerivedParams:
    """Compute every derived dimensionless parameter for ``p``.

    Total on valid inputs; b_q = 0 gives an infinite hop distance.
    """
    k_s = p.beta * p.b_q
    hop = 2.0 * math.pi / p.b_q if p.b_q > 0.0 else math.inf
    return DerivedParams(
        k_s=k_s,
        hbar_eff=p.b_q,
        alpha=k_s / (2.0 * math.pi),
        hop_distance=hop,
        localization_length=p.beta**2 / 4.0,
        break_time=p.beta**2,
    )
