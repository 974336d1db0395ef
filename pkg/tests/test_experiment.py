import numpy as np
import pytest
from math import pi, sqrt

from belllab.qlinalg import PureState
from belllab.correlations import conditional_correlation_closed, conditional_probability
from belllab.experiment import (
    EmptySubensemble,
    outcome_probabilities,
    postselect,
    sample_shots,
)
from belllab.states import Direction, TriorthogonalSpec, make_triorthogonal
from test_states import random_direction, random_spec

INV_SQRT2 = 1 / sqrt(2)
Z = Direction(0.0, 0.0)
X = Direction(pi / 2, 0.0)

GHZ = make_triorthogonal(TriorthogonalSpec(3, INV_SQRT2, INV_SQRT2, (1, 1, 1)))


class TestSampling:
    def test_deterministic_product_state(self):
        up_up = PureState(2, np.array([1, 0, 0, 0], dtype=complex))
        shots = sample_shots(up_up, [Z, Z], 1000, seed=0)
        assert np.all(shots == 1)

    def test_ghz_z_outcomes_perfectly_correlated(self):
        shots = sample_shots(GHZ, [Z, Z, Z], 20000, seed=1)
        same = (shots[:, 0] == shots[:, 1]) & (shots[:, 1] == shots[:, 2])
        assert np.all(same)
        frac_up = np.mean(shots[:, 0] == 1)
        assert abs(frac_up - 0.5) <= 5 * sqrt(0.25 / 20000)

    def test_ghz_x_product_always_plus_one(self):
        # GHZ is the +1 eigenstate of the triple-x observable
        shots = sample_shots(GHZ, [X, X, X], 20000, seed=2)
        assert np.all(shots[:, 0] * shots[:, 1] * shots[:, 2] == 1)

    def test_distribution_matches_born_rule(self):
        rng = np.random.default_rng(3)
        spec = random_spec(rng, 3)
        psi = make_triorthogonal(spec)
        dirs = [random_direction(rng) for _ in range(3)]
        probs = outcome_probabilities(psi, dirs)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        n_shots = 50000
        shots = sample_shots(psi, dirs, n_shots, seed=4)
        idx = np.sum(((1 - shots) // 2) * (2 ** np.arange(2, -1, -1)), axis=1)
        counts = np.bincount(idx, minlength=8) / n_shots
        for k in range(8):
            band = 5 * sqrt(max(probs[k] * (1 - probs[k]), 1e-12) / n_shots)
            assert abs(counts[k] - probs[k]) <= band

    def test_seed_determinism_byte_identical(self):
        a = sample_shots(GHZ, [X, X, Z], 100000, seed=9)
        b = sample_shots(GHZ, [X, X, Z], 100000, seed=9)
        assert a.tobytes() == b.tobytes()

    def test_determinism_across_parallelism(self, monkeypatch):
        a = sample_shots(GHZ, [X, X, Z], 200000, seed=10)
        monkeypatch.setenv("BELLLAB_THREADS", "4")
        b = sample_shots(GHZ, [X, X, Z], 200000, seed=10)
        assert a.tobytes() == b.tobytes()

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            sample_shots(GHZ, [X, X, Z], 0, seed=0)
        with pytest.raises(ValueError):
            sample_shots(GHZ, [X, X], 10, seed=0)


class TestPostselect:
    def test_trivial(self):
        shots = np.ones((50, 3), dtype=np.int8)
        stats = postselect(shots, 3, +1)
        assert stats.p_hat == 1.0 and stats.e12_hat == 1.0 and stats.stderr == 0.0

    def test_empty_subensemble(self):
        shots = np.ones((50, 3), dtype=np.int8)
        with pytest.raises(EmptySubensemble):
            postselect(shots, 3, -1)

    def test_ghz_x_selection(self):
        shots = sample_shots(GHZ, [X, X, X], 100000, seed=5)
        stats = postselect(shots, 3, +1)
        closed = conditional_correlation_closed(
            TriorthogonalSpec(3, INV_SQRT2, INV_SQRT2, (1, 1, 1)), X, X, X, +1
        ).value
        assert closed == pytest.approx(1.0)
        assert abs(stats.e12_hat - closed) <= max(5 * stats.stderr, 1e-12)
        assert abs(stats.p_hat - 0.5) <= 5 * sqrt(0.25 / stats.shots_total)

    def test_singlet_chsh_combination(self):
        spec = TriorthogonalSpec(3, INV_SQRT2, -INV_SQRT2, (1, -1, 1))
        psi = make_triorthogonal(spec)
        e3 = Direction(pi / 2, 0.0)
        pairs = [
            (Direction(0, 0), Direction(pi / 4, 0), +1),
            (Direction(0, 0), Direction(-pi / 4, 0), +1),
            (Direction(pi / 2, 0), Direction(pi / 4, 0), +1),
            (Direction(pi / 2, 0), Direction(-pi / 4, 0), -1),
        ]
        total, var = 0.0, 0.0
        for i, (e1, e2, sign) in enumerate(pairs):
            shots = sample_shots(psi, [e1, e2, e3], 200000, seed=100 + i)
            stats = postselect(shots, 3, +1)
            total += sign * stats.e12_hat
            var += stats.stderr**2
        assert abs(abs(total) - 2 * sqrt(2)) <= 5 * sqrt(var)

    def test_empirical_analytic_convergence(self):
        # 5 sigma bands hold across seeds (binomial slack on the 5 sigma event)
        rng = np.random.default_rng(6)
        spec = random_spec(rng, 3)
        psi = make_triorthogonal(spec)
        dirs = [random_direction(rng) for _ in range(3)]
        branch = +1
        p = conditional_probability(spec, dirs[2], branch)
        if p <= 1e-6:
            pytest.skip("degenerate draw")
        closed = conditional_correlation_closed(spec, dirs[0], dirs[1], dirs[2], branch).value
        n_shots = 20000
        hits = 0
        n_seeds = 100
        for seed in range(n_seeds):
            shots = sample_shots(psi, dirs, n_shots, seed=seed)
            stats = postselect(shots, 3, branch * spec.labels[2])
            ok_e = abs(stats.e12_hat - closed) <= max(5 * stats.stderr, 1e-12)
            ok_p = abs(stats.p_hat - p) <= 5 * sqrt(p * (1 - p) / n_shots)
            hits += ok_e and ok_p
        assert hits >= 0.99 * n_seeds

    def test_rejects_bad_arguments(self):
        shots = np.ones((10, 3), dtype=np.int8)
        with pytest.raises(ValueError):
            postselect(shots, 0, +1)
        with pytest.raises(ValueError):
            postselect(shots, 1, 0)
