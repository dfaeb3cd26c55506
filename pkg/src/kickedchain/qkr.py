"""Kicked-rotor reference: Bessel kick matrix, classical map, diffusion.

In the rotor picture the chain's roles are swapped: the site offset from
the kick center acts as the momentum quantum number (with b_q the
effective Planck constant) and the hopping step acts as a cosine kick of
strength beta.  The one-period hopping propagator therefore matches the
rotor kick operator,

    U_hop(r, s) ~ e^{-i beta} i^{r-s} J_{r-s}(beta),

exactly on a ring and up to boundary-image terms on the open chain.  The
classical limit is the standard map with stochasticity K = beta * b_q.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureConvergenceError, WeakChaosWarning
from .params import ChainParams

BESSEL_MAX_ORDER = 200
BESSEL_MAX_ARG = 1e3

# Stable first-order accelerator modes exist for alpha = K/2pi in this window
# (inclusive); outside it the kicked dynamics has no ballistic island pair.
ACCEL_ALPHA_MIN = 1.03
ACCEL_ALPHA_MAX = 1.10

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class RotorBasis:
    """Momentum-space basis of the reference rotor.

    kick_strength is the classical K; kick_strength / hbar is the argument
    of the Bessel functions in the kick matrix.
    """

    size: int
    hbar: float
    kick_strength: float

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 1:
            raise ValueError(f"size must be a positive integer, got {self.size!r}")
        if not (math.isfinite(self.hbar) and self.hbar > 0.0):
            raise ValueError(f"hbar must be finite and positive, got {self.hbar!r}")
        if not (math.isfinite(self.kick_strength) and self.kick_strength >= 0.0):
            raise ValueError(f"kick_strength must be nonnegative, got {self.kick_strength!r}")

    @property
    def beta(self) -> float:
        return self.kick_strength / self.hbar

    @classmethod
    def from_chain(cls, p: ChainParams) -> "RotorBasis":
        if p.b_q <= 0.0:
            raise ValueError("rotor correspondence requires b_q > 0")
        return cls(size=p.n_sites, hbar=p.b_q, kick_strength=p.beta * p.b_q)


@dataclass(frozen=True)
class PhasePoint:
    """One point of the classical standard map, angle wrapped to [0, 2*pi)."""

    angle: float
    momentum: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.angle) and math.isfinite(self.momentum)):
            raise ValueError("angle and momentum must be finite")
        object.__setattr__(self, "angle", self.angle % (2.0 * math.pi))


def _bessel_series(n: int, x: float) -> float:
    # Alternating power series; used only for small x where it cannot cancel.
    half = 0.5 * x
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
    total = term
    k = 1
    while True:
        term *= -(half * half) / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1


def _bessel_all(n_max: int, x: float) -> np.ndarray:
    """J_0(x)..J_{n_max}(x) by one downward-recurrence (Miller) pass.

    Rescales on the fly so that orders far above the turning point, whose
    true values underflow, do not overflow the recurrence.
    """
    if x < 0.0 or n_max < 0:
        raise ValueError("internal: _bessel_all expects x >= 0 and n_max >= 0")
    out = np.zeros(n_max + 1, dtype=np.float64)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x <= 1.0:
        for n in range(n_max + 1):
            out[n] = _bessel_series(n, x)
        return out

    start = max(n_max, int(math.ceil(x))) + 2 * int(math.ceil(math.sqrt(max(n_max, x)))) + 20
    jp = 0.0
    jc = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp, jc = jc, jm
        if k - 1 <= n_max:
            out[k - 1] = jc
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            norm *= 1e-250
            out *= 1e-250
    total = 2.0 * norm + jc  # J_0 + 2 * sum_{even k >= 2} J_k = 1
    out /= total
    return out


def bessel_j(order: int, arg: float) -> float:
    """Bessel function of the first kind J_order(arg).

    Downward recurrence with a power-series fallback at small argument;
    relative accuracy ~1e-10 away from zeros.  The supported domain is
    |order| <= 200 and |arg| <= 1e3.
    """
    if not isinstance(order, (int, np.integer)):
        raise ValueError(f"order must be an integer, got {order!r}")
    if abs(order) > BESSEL_MAX_ORDER:
        raise ValueError(f"|order| exceeds supported maximum {BESSEL_MAX_ORDER}")
    if not math.isfinite(arg) or abs(arg) > BESSEL_MAX_ARG:
        raise ValueError(f"|arg| exceeds supported maximum {BESSEL_MAX_ARG}")
    n, x = int(order), float(arg)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0.0:
        x = -x
        if n % 2:
            sign = -sign
    return sign * float(_bessel_all(n, x)[n])


def _i_power_times_bessel(orders: np.ndarray, bessel_by_abs: np.ndarray) -> np.ndarray:
    # i^d * J_d(x) depends only on |d|: i^{-d} J_{-d} = i^d J_d.
    a = np.abs(orders)
    phases = np.asarray(_I_POW, dtype=np.complex128)[a % 4]
    return phases * bessel_by_abs[a]


def qkr_kick_matrix(basis: RotorBasis) -> np.ndarray:
    """Rotor kick operator in the momentum basis: entry (r, s) = i^{r-s} J_{r-s}(beta).

    Symmetric Toeplitz; at beta = 0 it is the identity.
    """
    n = basis.size
    js = _bessel_all(n - 1, basis.beta)
    idx = np.arange(n)
    d = idx[:, None] - idx[None, :]
    return _i_power_times_bessel(d, js)


def ring_kick_matrix(basis: RotorBasis) -> np.ndarray:
    """Kick operator on a ring of ``size`` momentum states (circulant).

    Index differences wrap to the nearest representative in [-N/2, N/2);
    aliased orders beyond that are negligible for beta well below N.
    """
    n = basis.size
    js = _bessel_all(n // 2, basis.beta)
    idx = np.arange(n)
    d = idx[:, None] - idx[None, :]
    dw = (d + n // 2) % n - n // 2
    return _i_power_times_bessel(dw, js)


def ring_propagator(p: ChainParams) -> np.ndarray:
    """One-period hopping propagator on the ring, from plane-wave eigenmodes.

    Eigenphases are beta * (1 - cos(2*pi*k/N)); the matrix is circulant.
    Equals exp(-i*beta) times ring_kick_matrix to machine precision.
    """
    if p.boundary != "ring":
        raise ValueError("ring_propagator requires boundary='ring'")
    n = p.n_sites
    theta = 2.0 * np.pi * np.arange(n) / n
    col = np.fft.ifft(np.exp(-1j * p.beta * (1.0 - np.cos(theta))))
    idx = np.arange(n)
    return col[(idx[:, None] - idx[None, :]) % n]


def frs_quadrature(r: int, s: int, p: ChainParams, panels: int = 2**14) -> complex:
    """Continuum (large-N) hopping matrix element between sites r and s.

    Evaluates (1/pi) * e^{-i beta} * int_0^pi [cos((r+s-1)x) + cos((r-s)x)]
    e^{i beta cos x} dx by the trapezoid rule, normalized so the matrix is
    the identity at beta = 0.  Raises QuadratureConvergenceError if halving
    the resolution shifts the result by more than 1e-9.
    """
    if panels < 8 or panels % 2:
        raise ValueError("panels must be an even integer >= 8")
    if not (1 <= r <= p.n_sites and 1 <= s <= p.n_sites):
        raise ValueError(f"site indices must lie in [1, {p.n_sites}]")

    def integrate(m: int) -> complex:
        x = np.linspace(0.0, np.pi, m + 1)
        f = (np.cos((r + s - 1) * x) + np.cos((r - s) * x)) * np.exp(1j * p.beta * np.cos(x))
        return complex(np.trapezoid(f, dx=np.pi / m) / np.pi)

    fine = integrate(panels)
    coarse = integrate(panels // 2)
    if abs(fine - coarse) > 1e-9:
        raise QuadratureConvergenceError(
            f"quadrature not converged at {panels} panels "
            f"(refinement shift {abs(fine - coarse):.3e})"
        )
    return complex(np.exp(-1j * p.beta)) * fine


def bessel_interior_mask(n_sites: int, beta: float) -> np.ndarray:
    """Entries of an open-chain propagator where the Toeplitz Bessel form holds.

    The open chain adds boundary-image terms of Bessel order r+s-1 (near one
    end) and 2N+1-r-s (near the other); those are negligible once the order
    exceeds beta + 2*sqrt(beta), which defines the interior block.
    """
    cutoff = beta + 2.0 * math.sqrt(beta) if beta > 0.0 else 1.0
    idx = np.arange(n_sites)
    w = idx[:, None] + idx[None, :] + 1  # r + s - 1 for 1-based r, s
    return (w >= cutoff) & (2 * n_sites - w >= cutoff)


def standard_map_step(pt: PhasePoint, kick_strength: float) -> PhasePoint:
    """One iteration of the standard map: p' = p + K sin(x), x' = x + p'."""
    if not math.isfinite(kick_strength):
        raise ValueError("kick_strength must be finite")
    p_new = pt.momentum + kick_strength * math.sin(pt.angle)
    return PhasePoint(angle=pt.angle + p_new, momentum=p_new)


def classical_diffusion(
    kick_strength: float, ensemble: int = 10_000, steps: int = 50, seed: int = 0
) -> float:
    """Momentum-diffusion coefficient of the standard map, measured.

    Evolves an ensemble started at momentum zero with uniformly random
    angles and returns the least-squares slope of <(p - p0)^2> versus step
    count.  Deterministic for a given seed.
    """
    if ensemble < 1_000:
        raise ValueError("ensemble must be >= 1000 for a stable estimate")
    if steps < 10:
        raise ValueError("steps must be >= 10")
    if not math.isfinite(kick_strength) or kick_strength < 0.0:
        raise ValueError(f"kick_strength must be nonnegative, got {kick_strength!r}")
    if kick_strength < 4.0:
        warnings.warn(
            "kick strength below ~4: transport is not cleanly diffusive",
            WeakChaosWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 2.0 * np.pi, size=ensemble)
    p = np.zeros(ensemble)
    msd = np.zeros(steps + 1)
    for t in range(1, steps + 1):
        p += kick_strength * np.sin(x)
        x = (x + p) % (2.0 * np.pi)
        msd[t] = float(np.mean(p * p))
    t_axis = np.arange(steps + 1, dtype=np.float64)
    slope = float(np.polyfit(t_axis, msd, 1)[0])
    return slope


def rechester_d(kick_strength: float) -> float:
    """Quasilinear diffusion coefficient with the leading correlation correction:

        D(K) = (K^2 / 2) * (1 - 2*J_2(K) + 2*J_2(K)^2).
    """
    if not math.isfinite(kick_strength) or kick_strength <= 0.0:
        raise ValueError(f"kick_strength must be positive, got {kick_strength!r}")
    j2 = bessel_j(2, kick_strength)
    return 0.5 * kick_strength**2 * (1.0 - 2.0 * j2 + 2.0 * j2 * j2)


@dataclass(frozen=True)
class AcceleratorWindow:
    alpha: float
    inside: bool


def accelerator_window(kick_strength: float) -> AcceleratorWindow:
    """Where K sits relative to the stable accelerator-mode window."""
    if not math.isfinite(kick_strength) or kick_strength < 0.0:
        raise ValueError(f"kick_strength must be nonnegative, got {kick_strength!r}")
    alpha = kick_strength / (2.0 * math.pi)
    return AcceleratorWindow(alpha=alpha, inside=ACCEL_ALPHA_MIN <= alpha <= ACCEL_ALPHA_MAX)
