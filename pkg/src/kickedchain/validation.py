"""Self-check suite: every analytic shortcut against an independent route.

Each check pits a production code path against a slower or
independently derived alternative (dense diagonalization, matrix
exponential, direct quadrature, closed-form limits) and records the
measured deviation next to its tolerance.  The tolerances are frozen;
a failure here means a real regression, not noise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from . import observables
from .chain import build_eigenbasis, evolve, make_context, oracle_hamiltonian, uhc_matrix
from .params import ChainParams
from .qkr import (
    RotorBasis,
    bessel_interior_mask,
    classical_diffusion,
    frs_quadrature,
    qkr_kick_matrix,
    rechester_d,
    ring_kick_matrix,
    ring_propagator,
)
from .state import SpinState, site_state

THREADS_ENV = "KICKEDCHAIN_THREADS"


@dataclass(frozen=True)
class CheckResult:
    """One cross-check: measured deviation against its frozen tolerance."""

    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.passed)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "deviation": c.deviation,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def _check_eigenbasis() -> float:
    # Cosine modes and phases against dense diagonalization of the
    # bond-counting Hamiltonian.
    p = ChainParams(n_sites=64, center=32, beta=10.0, b_q=0.1)
    h = oracle_hamiltonian(p)
    basis = build_eigenbasis(p)
    g = basis.mode_vectors
    residual = float(np.max(np.abs(h @ g.T - g.T * basis.eigenphases[None, :])))
    eigvals = np.linalg.eigvalsh(h)
    value_dev = float(np.max(np.abs(np.sort(eigvals) - basis.eigenphases)))
    return max(residual, value_dev)


def _check_propagator_expm() -> float:
    p = ChainParams(n_sites=64, center=32, beta=10.0, b_q=0.1)
    u = uhc_matrix(p, 1.0)
    e = scipy.linalg.expm(-1j * oracle_hamiltonian(p))
    # Allow a global phase even though none is expected.
    k = int(np.argmax(np.abs(e)))
    phase = u.flat[k] / e.flat[k]
    phase /= abs(phase)
    return float(np.max(np.abs(u - phase * e)))


def _check_engine_equivalence() -> float:
    p = ChainParams(n_sites=257, center=129, beta=30.0, b_q=0.1)
    ctx = make_context(p)
    start = site_state(p.n_sites, p.center)
    dense = evolve(start, ctx, 5, engine="dense").final
    fast = evolve(start, ctx, 5, engine="transform").final
    return float(np.max(np.abs(dense.amplitudes - fast.amplitudes)))


def _check_quadrature() -> float:
    # The integral is the continuum-k limit of the mode sum, so it only
    # approaches matrix elements at O(1/N): compare central entries of a
    # long chain.
    p = ChainParams(n_sites=1024, center=512, beta=10.0, b_q=0.1)
    u = uhc_matrix(p, 1.0)
    picks = (500, 511, 512, 513, 524)
    worst = 0.0
    for r in picks:
        for s in picks:
            worst = max(worst, abs(frs_quadrature(r, s, p) - u[r - 1, s - 1]))
    return worst


def _check_kick_matrix_interior() -> float:
    n, beta = 256, 10.0
    p = ChainParams(n_sites=n, center=n // 2, beta=beta, b_q=0.1)
    u = uhc_matrix(p, 1.0) * np.exp(1j * beta)
    approx = qkr_kick_matrix(RotorBasis(size=n, hbar=0.1, kick_strength=beta * 0.1))
    mask = bessel_interior_mask(n, beta)
    return float(np.max(np.abs((u - approx)[mask])))


def _check_ring_exactness() -> float:
    n, beta = 256, 10.0
    p = ChainParams(n_sites=n, center=n // 2, beta=beta, b_q=0.1, boundary="ring")
    u = ring_propagator(p)
    exact = np.exp(-1j * beta) * ring_kick_matrix(
        RotorBasis(size=n, hbar=0.1, kick_strength=beta * 0.1)
    )
    return float(np.max(np.abs(u - exact)))


def _check_classical_diffusion() -> float:
    slope = classical_diffusion(10.0, ensemble=10_000, steps=50, seed=0)
    return abs(slope / rechester_d(10.0) - 1.0)


def _check_q_ipr_identity() -> float:
    rng = np.random.default_rng(12345)
    n = 64
    worst = 0.0
    for _ in range(1000):
        amps = rng.normal(size=n) + 1j * rng.normal(size=n)
        state = SpinState(amps / np.linalg.norm(amps))
        q = observables.q_measure(state)
        via_ipr = 4.0 / n * (1.0 - 1.0 / observables.ipr(state))
        worst = max(worst, abs(q - via_ipr) / max(abs(q), 1e-300))
    return worst


def _check_concurrence_grid() -> float:
    # Grid-search the envelope concurrence (8/L) e^{-2d/L} and compare the
    # located optimum against the closed form (2d, 4/(d*e)).
    worst = 0.0
    for d in (5.0, 10.0, 50.0):
        grid = np.linspace(d, 3.0 * d, 20001)
        values = (8.0 / grid) * np.exp(-2.0 * d / grid)
        k = int(np.argmax(values))
        best = observables.concurrence_profile_max(d)
        worst = max(
            worst,
            abs(grid[k] / best.l_star - 1.0),
            abs(values[k] / best.c_star - 1.0),
        )
    return worst


_CHECKS: tuple[tuple[str, Callable[[], float], float], ...] = (
    ("eigenbasis_vs_diagonalization", _check_eigenbasis, 1e-10),
    ("propagator_vs_matrix_exponential", _check_propagator_expm, 1e-8),
    ("engine_equivalence", _check_engine_equivalence, 1e-10),
    ("quadrature_vs_propagator", _check_quadrature, 5e-3),
    ("kick_matrix_interior", _check_kick_matrix_interior, 1e-3),
    ("ring_exactness", _check_ring_exactness, 1e-10),
    ("rechester_vs_ensemble", _check_classical_diffusion, 0.10),
    ("q_ipr_identity", _check_q_ipr_identity, 1e-12),
    ("concurrence_maximum_grid", _check_concurrence_grid, 1e-3),
)


def thread_count() -> int:
    """Worker count for embarrassingly parallel loops, from the environment.

    Unset, empty, or invalid values fall back to 1 so results never depend
    on the machine the suite happens to run on.
    """
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def validate_suite() -> ValidationReport:
    """Run every cross-check and report deviations against tolerances.

    Check results are ordered as declared regardless of the worker count,
    so the report is reproducible byte for byte.
    """
    workers = thread_count()
    if workers == 1:
        results = [fn() for _, fn, _ in _CHECKS]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn) for _, fn, _ in _CHECKS]
            results = [f.result() for f in futures]
    checks = tuple(
        CheckResult(name=name, deviation=float(dev), tolerance=tol)
        for (name, _, tol), dev in zip(_CHECKS, results)
    )
    return ValidationReport(checks=checks)
