import math

import numpy as np
import pytest

from kickedchain import ChainParams, SpinState, derived_params, site_state

FIG1 = ChainParams(n_sites=1401, center=701, beta=100.0, b_q=1.0 / 15.0)


class TestChainParams:
    def test_valid_construction(self):
        p = ChainParams(n_sites=100, center=50, beta=10.0, b_q=0.1)
        assert p.boundary == "open"

    def test_frozen(self):
        with pytest.raises(AttributeError):
            FIG1.beta = 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_sites": 1},
            {"n_sites": 100.0},
            {"center": 0},
            {"center": 101},
            {"beta": -1.0},
            {"beta": math.inf},
            {"b_q": -0.5},
            {"b_q": math.nan},
            {"boundary": "torus"},
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        base = dict(n_sites=100, center=50, beta=10.0, b_q=0.1)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ChainParams(**base)

    def test_ring_needs_three_sites(self):
        with pytest.raises(ValueError):
            ChainParams(n_sites=2, center=1, beta=1.0, b_q=0.1, boundary="ring")


class TestDerivedParams:
    def test_fig1_values(self):
        d = derived_params(FIG1)
        assert d.k_s == pytest.approx(20.0 / 3.0)
        assert d.hbar_eff == FIG1.b_q
        assert d.alpha == pytest.approx(1.0610329539459689)
        assert d.hop_distance == pytest.approx(94.2477796076938)
        assert d.localization_length == 2500.0
        assert d.break_time == 10000.0

    def test_alpha_is_k_over_two_pi(self):
        p = ChainParams(n_sites=100, center=50, beta=40.0, b_q=0.25)
        d = derived_params(p)
        assert d.alpha == pytest.approx(d.k_s / (2.0 * math.pi), rel=1e-15)

    def test_kick_off_gives_infinite_hop(self):
        p = ChainParams(n_sites=100, center=50, beta=10.0, b_q=0.0)
        d = derived_params(p)
        assert d.k_s == 0.0
        assert math.isinf(d.hop_distance)


class TestSpinState:
    def test_site_state(self):
        s = site_state(5, 3)
        assert s.n_sites == 5
        assert s.amplitudes[2] == 1.0
        assert s.norm_sq() == pytest.approx(1.0)

    def test_site_state_bounds(self):
        with pytest.raises(ValueError):
            site_state(5, 0)
        with pytest.raises(ValueError):
            site_state(5, 6)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            SpinState(np.array([1.0, 1.0], dtype=complex))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SpinState(np.array([np.nan + 0j, 0.0]))

    def test_rejects_matrix(self):
        with pytest.raises(ValueError):
            SpinState(np.eye(2, dtype=complex))

    def test_amplitudes_read_only(self):
        s = site_state(4, 1)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0
