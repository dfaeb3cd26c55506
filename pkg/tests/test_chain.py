import numpy as np
import pytest
import scipy.linalg

from kickedchain import (
    CapacityError,
    ChainParams,
    MemoryBudgetError,
    apply_kick,
    apply_uhc,
    build_eigenbasis,
    evolve,
    hop_eigenphases,
    make_context,
    oracle_hamiltonian,
    site_state,
    step_period,
    step_period_inverse,
    uhc_matrix,
)
from kickedchain.chain import kick_phases

P64 = ChainParams(n_sites=64, center=32, beta=10.0, b_q=0.1)


class TestEigenbasis:
    def test_phases_small_chain(self):
        # beta * (1 - cos(pi*(m-1)/N)) for N=4, m=1..4
        got = hop_eigenphases(4, 2.0)
        want = 2.0 * (1.0 - np.cos(np.pi * np.arange(4) / 4.0))
        assert np.allclose(got, want, atol=1e-15)
        assert got[0] == 0.0

    def test_modes_orthonormal(self):
        g = build_eigenbasis(P64).mode_vectors
        assert np.max(np.abs(g @ g.T - np.eye(64))) < 1e-12

    def test_modes_diagonalize_hamiltonian(self):
        # Independent route: dense bond-counting Hamiltonian.
        h = oracle_hamiltonian(P64)
        basis = build_eigenbasis(P64)
        g = basis.mode_vectors
        residual = np.max(np.abs(h @ g.T - g.T * basis.eigenphases[None, :]))
        assert residual < 1e-10

    def test_phases_match_dense_spectrum(self):
        h = oracle_hamiltonian(P64)
        eigvals = np.sort(np.linalg.eigvalsh(h))
        assert np.max(np.abs(eigvals - build_eigenbasis(P64).eigenphases)) < 1e-10

    def test_ring_refused(self):
        ring = ChainParams(n_sites=8, center=4, beta=1.0, b_q=0.1, boundary="ring")
        with pytest.raises(ValueError):
            build_eigenbasis(ring)

    def test_ring_hamiltonian_wraps(self):
        ring = ChainParams(n_sites=8, center=4, beta=2.0, b_q=0.1, boundary="ring")
        h = oracle_hamiltonian(ring)
        assert h[0, 7] == pytest.approx(-1.0)
        # every ring site touches two bonds
        assert h[0, 0] == pytest.approx(2.0)


class TestPropagator:
    def test_matches_matrix_exponential(self):
        # scipy expm is the independent oracle for the one-period propagator.
        u = uhc_matrix(P64, 1.0)
        e = scipy.linalg.expm(-1j * oracle_hamiltonian(P64))
        assert np.max(np.abs(u - e)) < 1e-8

    def test_unitary(self):
        u = uhc_matrix(P64, 1.0)
        assert np.max(np.abs(u @ u.conj().T - np.eye(64))) < 1e-12

    def test_periods_compose(self):
        u1 = uhc_matrix(P64, 1.0)
        u2 = uhc_matrix(P64, 2.0)
        assert np.max(np.abs(u2 - u1 @ u1)) < 1e-12

    def test_zero_periods_is_identity(self):
        assert np.max(np.abs(uhc_matrix(P64, 0.0) - np.eye(64))) < 1e-12

    def test_dense_cap(self):
        big = ChainParams(n_sites=5000, center=2500, beta=1.0, b_q=0.1)
        with pytest.raises(CapacityError):
            uhc_matrix(big, 1.0)
        with pytest.raises(CapacityError):
            oracle_hamiltonian(big)

    def test_transform_route_matches_dense(self, make_random_state):
        state = make_random_state(64)
        basis = build_eigenbasis(P64)
        via_transform = apply_uhc(state, basis, 1.0).amplitudes
        via_matrix = uhc_matrix(P64, 1.0) @ state.amplitudes
        assert np.max(np.abs(via_transform - via_matrix)) < 1e-12


class TestKick:
    def test_phase_values(self):
        p = ChainParams(n_sites=5, center=3, beta=1.0, b_q=0.4)
        phases = kick_phases(p)
        # site r picks up e^{-i (b_q/2) (r - center)^2}
        want = np.exp(-0.2j * (np.arange(1, 6) - 3) ** 2)
        assert np.allclose(phases, want, atol=1e-15)

    def test_kick_preserves_probabilities(self, make_random_state):
        p = ChainParams(n_sites=32, center=16, beta=1.0, b_q=0.3)
        state = make_random_state(32)
        kicked = apply_kick(state, p)
        assert np.allclose(
            np.abs(kicked.amplitudes), np.abs(state.amplitudes), atol=1e-15
        )

    def test_kick_off_is_identity(self, make_random_state):
        p = ChainParams(n_sites=32, center=16, beta=1.0, b_q=0.0)
        state = make_random_state(32)
        assert np.array_equal(apply_kick(state, p).amplitudes, state.amplitudes)


class TestEvolution:
    def test_period_reversible(self, make_random_state):
        ctx = make_context(P64)
        state = make_random_state(64)
        back = step_period_inverse(step_period(state, ctx), ctx)
        assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-12

    def test_engines_agree(self):
        p = ChainParams(n_sites=101, center=51, beta=20.0, b_q=0.2)
        ctx = make_context(p)
        start = site_state(101, 51)
        dense = evolve(start, ctx, 7, engine="dense").final
        fast = evolve(start, ctx, 7, engine="transform").final
        assert np.max(np.abs(dense.amplitudes - fast.amplitudes)) < 1e-10

    def test_norm_conserved_long_run(self):
        ctx = make_context(P64)
        traj = evolve(site_state(64, 32), ctx, 200, record_every=200)
        assert traj.final.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_recording_schedule(self):
        ctx = make_context(P64)
        traj = evolve(site_state(64, 32), ctx, 7, record_every=3)
        assert traj.periods == (0, 3, 6, 7)
        assert len(traj.states) == 4

    def test_snapshot_budget(self):
        ctx = make_context(P64)
        with pytest.raises(MemoryBudgetError):
            evolve(site_state(64, 32), ctx, 10, max_snapshot_values=100)

    def test_rejects_engine_typo(self):
        ctx = make_context(P64)
        with pytest.raises(ValueError):
            evolve(site_state(64, 32), ctx, 1, engine="fast")

    def test_rejects_size_mismatch(self):
        ctx = make_context(P64)
        from kickedchain import DimensionMismatchError

        with pytest.raises(DimensionMismatchError):
            evolve(site_state(32, 16), ctx, 1)

    def test_matches_brute_force_product(self):
        # Full period against explicit matrix product kick * U_hop.
        p = ChainParams(n_sites=32, center=16, beta=5.0, b_q=0.25)
        ctx = make_context(p)
        start = site_state(32, 16)
        got = evolve(start, ctx, 3).final.amplitudes
        u = np.diag(kick_phases(p)) @ uhc_matrix(p, 1.0)
        want = np.linalg.matrix_power(u, 3) @ start.amplitudes
        assert np.max(np.abs(got - want)) < 1e-12
