"""Measurements on evolved states: spreading, localization, entanglement,
and detection of the ballistic accelerator-mode wavepackets.

Site coordinates here are 1-based, matching the chain convention; fitted
peak positions are real-valued in the same coordinate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BreakTimeWindowWarning,
    InsufficientDataError,
    NotLocalizedError,
    PoorFitWarning,
)
from .params import ChainParams, DerivedParams
from .state import SpinState

# Localization-fit window rules: start 2 sites off-peak, stop at the first
# probability below FIT_FLOOR, never closer than EDGE_MARGIN sites to a chain
# end; demand at least MIN_DECAY_ORDERS decades of decay across the window.
FIT_FLOOR = 1e-8
EDGE_MARGIN = 5
MIN_DECAY_ORDERS = 4.0
RESIDUAL_TOL = 3.0

MODE_WEIGHT_THRESHOLD = 0.02
# A packet peak stands well above the median of its own +-3 width window
# (x90 for an isolated Gaussian, x8 or more on the chaotic pedestal);
# interference ripples stay within about x2 of theirs.
MODE_PROMINENCE = 3.0
# Weight beating counts as oscillation only when detrended residuals are
# well above fit noise and flip sign at least this often.
OSC_MIN_RMS = 0.02
OSC_MIN_FLIPS = 0.4
# Transporting packets advance by exactly 2*pi/b_q sites per period; any
# candidate farther than a quarter of one advance from the ballistic
# position (caustics of the free spreading, boundary pile-up) is not one.
CORRIDOR_FRACTION = 0.25


@dataclass(frozen=True, eq=False)
class SiteDistribution:
    """Probability of finding the excitation on each site (sums to one)."""

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probabilities, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("probabilities must be a nonempty 1-D vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ValueError("probabilities must be finite and nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "probabilities", arr)

    @property
    def n_sites(self) -> int:
        return self.probabilities.size


def site_distribution(state: SpinState) -> SiteDistribution:
    return SiteDistribution(np.abs(state.amplitudes) ** 2)


def spread_variance(dist: SiteDistribution, s0: int, b_q: float) -> float:
    """Rotor-momentum variance b_q^2 * sum_s P(s) (s - s0)^2 about site s0."""
    if not 1 <= s0 <= dist.n_sites:
        raise ValueError(f"s0 must lie in [1, {dist.n_sites}], got {s0}")
    offsets = np.arange(1, dist.n_sites + 1, dtype=np.float64) - s0
    return float(b_q * b_q * np.sum(dist.probabilities * offsets * offsets))


@dataclass(frozen=True)
class DiffusionFit:
    slope: float
    intercept: float
    r_squared: float


def fit_diffusion(
    series: Sequence[tuple[int, float]],
    window: tuple[int, int],
    break_time: float | None = None,
) -> DiffusionFit:
    """Least-squares slope of a variance-versus-period series inside ``window``.

    ``series`` holds (period, variance) pairs; ``window`` is an inclusive
    period range.  If ``break_time`` is given and the window runs past half
    of it, a BreakTimeWindowWarning is emitted (the straight-line model
    stops being meaningful as the spreading saturates).
    """
    lo, hi = window
    if lo > hi:
        raise ValueError(f"window must satisfy lo <= hi, got {window!r}")
    pts = [(t, v) for t, v in series if lo <= t <= hi]
    if len(pts) < 3:
        raise InsufficientDataError(
            f"diffusion fit needs >= 3 points inside {window}, found {len(pts)}"
        )
    if break_time is not None and hi > 0.5 * break_time:
        warnings.warn(
            f"fit window ends at {hi} periods, past half the break time {break_time:g}",
            BreakTimeWindowWarning,
            stacklevel=2,
        )
    t = np.array([q[0] for q in pts], dtype=np.float64)
    v = np.array([q[1] for q in pts], dtype=np.float64)
    slope, intercept = np.polyfit(t, v, 1)
    fitted = slope * t + intercept
    ss_res = float(np.sum((v - fitted) ** 2))
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    if ss_tot <= 1e-300:
        r_squared = 0.0
        warnings.warn("variance series is flat; no diffusive growth to fit",
                      PoorFitWarning, stacklevel=2)
    else:
        r_squared = 1.0 - ss_res / ss_tot
        if r_squared < 0.5:
            warnings.warn(f"diffusion fit explains little variance (r^2 = {r_squared:.3f})",
                          PoorFitWarning, stacklevel=2)
    return DiffusionFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def break_time(d: DerivedParams) -> float:
    """Periods until quantum interference halts diffusive spreading, (K_s/b_q)^2."""
    return d.break_time


@dataclass(frozen=True)
class LocalizationFit:
    length: float
    intercept: float
    residual: float
    window: tuple[int, int]


def fit_localization_length(dist: SiteDistribution, s0: int) -> LocalizationFit:
    """Localization length from the exponential envelope P(s) ~ e^{-2|s-s0|/L}.

    Log-linear regression of ln P against |s - s0| over both tails; the
    window starts 2 sites off-peak and ends where P first drops below
    FIT_FLOOR (capped EDGE_MARGIN sites short of the chain ends).  Raises
    NotLocalizedError when the profile has not decayed at least
    MIN_DECAY_ORDERS decades, the slope is not negative, or the residual
    scatter exceeds RESIDUAL_TOL.
    """
    n = dist.n_sites
    if not 1 <= s0 <= n:
        raise ValueError(f"s0 must lie in [1, {n}], got {s0}")
    probs = dist.probabilities
    peak = float(probs.max())
    if peak <= 0.0:
        raise NotLocalizedError("distribution has no probability mass")

    offsets: list[float] = []
    logs: list[float] = []
    edge_values: list[float] = []
    outer_used = 0
    for direction in (-1, +1):
        if direction < 0:
            cap = s0 - 1 - EDGE_MARGIN
        else:
            cap = n - EDGE_MARGIN - s0
        last = 0
        for d in range(2, cap + 1):
            val = probs[s0 - 1 + direction * d]
            if val < FIT_FLOOR:
                break
            offsets.append(float(d))
            logs.append(math.log(val))
            last = d
        if last:
            edge_values.append(float(probs[s0 - 1 + direction * last]))
            outer_used = max(outer_used, last)

    if len(offsets) < 8:
        raise NotLocalizedError(
            f"only {len(offsets)} usable sites in the fit window; profile too narrow"
        )
    decay = math.log10(peak / max(edge_values))
    if decay < MIN_DECAY_ORDERS:
        raise NotLocalizedError(
            f"profile decays only {decay:.2f} decades across the window "
            f"(need >= {MIN_DECAY_ORDERS})"
        )
    x = np.asarray(offsets)
    y = np.asarray(logs)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if slope >= 0.0:
        raise NotLocalizedError(f"envelope does not decay (slope = {slope:.3e})")
    if residual > RESIDUAL_TOL:
        raise NotLocalizedError(
            f"log-profile scatter {residual:.2f} exceeds tolerance {RESIDUAL_TOL}"
        )
    return LocalizationFit(
        length=float(-2.0 / slope),
        intercept=float(intercept),
        residual=residual,
        window=(2, outer_used),
    )


def q_measure(state: SpinState) -> float:
    """Global entanglement (4/N) * (1 - sum_k |a_k|^4)."""
    p2 = float(np.sum(np.abs(state.amplitudes) ** 4))
    return 4.0 / state.n_sites * (1.0 - p2)


def ipr(state: SpinState) -> float:
    """Inverse participation ratio 1 / sum_k |a_k|^4."""
    p2 = float(np.sum(np.abs(state.amplitudes) ** 4))
    return 1.0 / p2


def concurrence(state: SpinState, i: int, j: int) -> float:
    """Pairwise concurrence 4 |a_i| |a_j| between sites i and j.

    Single-excitation convention: a state shared equally over two sites
    gives 2 (this normalization exceeds the usual spin-pair bound of 1).
    """
    n = state.n_sites
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"site indices must lie in [1, {n}], got {(i, j)}")
    if i == j:
        raise ValueError("concurrence needs two distinct sites")
    a = state.amplitudes
    return float(4.0 * abs(a[i - 1]) * abs(a[j - 1]))


@dataclass(frozen=True)
class ConcurrenceMax:
    l_star: float
    c_star: float


def concurrence_profile_max(d: float) -> ConcurrenceMax:
    """Maximum over L of the localized-envelope concurrence (8/L) e^{-2d/L}
    for two sites 2d apart: peak at L* = 2d with value C* = 4/(d*e)."""
    if not (math.isfinite(d) and d > 0.0):
        raise ValueError(f"site separation d must be positive, got {d!r}")
    return ConcurrenceMax(l_star=2.0 * d, c_star=4.0 / (d * math.e))


def max_concurrence(state: SpinState) -> float:
    """Largest pairwise concurrence, 4 * (two largest |a_k|)."""
    mags = np.abs(state.amplitudes)
    if mags.size < 2:
        return 0.0
    top = np.partition(mags, mags.size - 2)[-2:]
    return float(4.0 * top[0] * top[1])


def remnant_halfwidth(pulse_index: int, p: ChainParams) -> float:
    """Half-width pi * j / b_q of the central remnant region at pulse j
    (half the expected accelerator-mode displacement)."""
    if pulse_index < 1:
        raise ValueError("pulse_index must be >= 1")
    if p.b_q <= 0.0:
        raise ValueError("remnant geometry needs b_q > 0")
    return math.pi * pulse_index / p.b_q


@dataclass(frozen=True)
class GaussianMode:
    """One fitted wavepacket |psi|^2 ~ amplitude^2 * e^{-2 B (s - position)^2}."""

    position: float
    amplitude: float
    width_parameter: float
    weight: float

    @property
    def width(self) -> float:
        """e-folding half-width of the amplitude profile, 1/sqrt(B)."""
        return 1.0 / math.sqrt(self.width_parameter)


@dataclass(frozen=True)
class ModeReport:
    """Fitted packets at one pulse; remnant_weight is everything not in a mode."""

    pulse_index: int
    modes: tuple[GaussianMode, ...]
    remnant_weight: float


def _fit_gaussian_peak(probs: np.ndarray, i_peak: int) -> GaussianMode | None:
    """Quadratic fit of ln P over the peak's FWHM window (weighted by P)."""
    n = probs.size
    p_peak = probs[i_peak]
    if p_peak <= 0.0:
        return None
    half = 0.5 * p_peak
    lo = i_peak
    while lo - 1 >= 0 and probs[lo - 1] >= half and i_peak - (lo - 1) <= 8:
        lo -= 1
    hi = i_peak
    while hi + 1 < n and probs[hi + 1] >= half and (hi + 1) - i_peak <= 8:
        hi += 1
    while hi - lo + 1 < 5:  # quadratic fit needs headroom beyond 3 points
        if lo > 0:
            lo -= 1
        if hi < n - 1:
            hi += 1
        if lo == 0 and hi == n - 1:
            break
    window = np.arange(lo, hi + 1)
    vals = probs[window]
    good = vals > 0.0
    if good.sum() < 4:
        return None
    x = window[good].astype(np.float64)
    y = np.log(vals[good])
    c2, c1, c0 = np.polyfit(x, y, 2, w=vals[good])
    if c2 >= 0.0:
        return None
    center = -c1 / (2.0 * c2)
    if abs(center - i_peak) > 3.0:
        return None
    b_fit = -0.5 * c2
    width = 1.0 / math.sqrt(b_fit)
    peak_log = c0 - c1 * c1 / (4.0 * c2)
    span_lo = max(0, int(math.ceil(center - 3.0 * width)))
    span_hi = min(n - 1, int(math.floor(center + 3.0 * width)))
    backdrop = float(np.median(probs[span_lo:span_hi + 1]))
    if backdrop > 0.0 and p_peak < MODE_PROMINENCE * backdrop:
        return None  # ripple riding on a pedestal, not a freestanding packet
    weight = float(probs[span_lo:span_hi + 1].sum())
    return GaussianMode(
        position=center + 1.0,  # 1-based site coordinate
        amplitude=math.sqrt(math.exp(peak_log)),
        width_parameter=b_fit,
        weight=weight,
    )


def detect_accelerator_modes(
    state: SpinState,
    pulse_index: int,
    p: ChainParams,
    weight_threshold: float = MODE_WEIGHT_THRESHOLD,
) -> ModeReport:
    """Locate ballistic wavepackets outside the central remnant at pulse j.

    Scans each side beyond the remnant half-width for local maxima, fits a
    Gaussian to each candidate (largest first), sums the probability within
    +-3 fitted widths, and keeps non-overlapping peaks whose weight exceeds
    ``weight_threshold`` and that sit within the ballistic corridor around
    the expected centers, center +- 2*pi*j/b_q.  Finding no such peak is a
    normal outcome, not an error.
    """
    if state.n_sites != p.n_sites:
        raise ValueError(f"state has {state.n_sites} sites but params have {p.n_sites}")
    probs = np.abs(state.amplitudes) ** 2
    b = remnant_halfwidth(pulse_index, p)
    n = p.n_sites
    center0 = p.center - 1  # 0-based
    offsets = np.arange(n, dtype=np.float64) - center0
    advance = 2.0 * math.pi / p.b_q
    corridor = CORRIDOR_FRACTION * advance

    accepted: list[GaussianMode] = []
    for side in (-1, +1):
        region = np.nonzero((offsets * side > b) & (np.arange(n) > 0) & (np.arange(n) < n - 1))[0]
        if region.size < 3:
            continue
        local_max = region[(probs[region] >= probs[region - 1]) & (probs[region] >= probs[region + 1])]
        if local_max.size == 0:
            continue
        order = local_max[np.argsort(probs[local_max])[::-1][:12]]
        for i_peak in order:
            if probs[i_peak] <= 0.0:
                continue
            mode = _fit_gaussian_peak(probs, int(i_peak))
            if mode is None or mode.weight <= weight_threshold:
                continue
            if abs(abs(mode.position - p.center) - advance * pulse_index) > corridor:
                continue
            if any(abs(mode.position - m.position) <= 3.0 * (mode.width + m.width)
                   for m in accepted):
                continue
            accepted.append(mode)

    accepted.sort(key=lambda m: m.position)
    # everything not captured by a fitted packet counts as remnant, so the
    # report always partitions total probability
    remnant = 1.0 - sum(m.weight for m in accepted)
    return ModeReport(
        pulse_index=pulse_index,
        modes=tuple(accepted),
        remnant_weight=remnant,
    )


@dataclass(frozen=True)
class ModeDecayFit:
    rate: float
    oscillatory: bool
    residual: float


def mode_decay(reports: Iterable[ModeReport]) -> ModeDecayFit:
    """Exponential fit of packet-pair weight versus pulse index.

    Tracks the two heaviest fitted packets per pulse (the counter-propagating
    pair, immune to transient fringe detections), with weight(j) ~ e^{-rate*j}.
    ``oscillatory`` is set when the residuals of the log-linear fit beat
    around the trend instead of scattering (their signs alternate and their
    size is well above numerical noise).
    """
    pts = []
    for r in reports:
        if not r.modes:
            continue
        top = sorted((m.weight for m in r.modes), reverse=True)[:2]
        pts.append((r.pulse_index, sum(top)))
    pts = [(j, w) for j, w in pts if w > 0.0]
    if len(pts) < 5:
        raise InsufficientDataError(
            f"mode-decay fit needs >= 5 pulses with detected modes, found {len(pts)}"
        )
    x = np.array([q[0] for q in pts], dtype=np.float64)
    y = np.log(np.array([q[1] for q in pts], dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    # Beating shows up as sign-alternating residuals around the local trend;
    # detrend with a quadratic first so a slowly drifting decay rate (a
    # convex log-series) does not mask or mimic it.
    around_trend = y - np.polyval(np.polyfit(x, y, 2), x)
    osc_rms = float(np.sqrt(np.mean(around_trend**2)))
    signs = np.sign(around_trend[np.abs(around_trend) > 1e-12])
    flip_fraction = (
        float(np.sum(signs[1:] != signs[:-1])) / (signs.size - 1)
        if signs.size > 1 else 0.0
    )
    oscillatory = bool(osc_rms >= OSC_MIN_RMS and flip_fraction >= OSC_MIN_FLIPS)
    return ModeDecayFit(rate=-float(slope), oscillatory=oscillatory, residual=rms)
