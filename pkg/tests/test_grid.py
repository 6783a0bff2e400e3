import numpy as np
import pytest

import cosra
from cosra import ResolutionTooCoarse, certify_covering, generate_grid, grid_point_count
from cosra.grid import anchored_covering_bound, covering_radius_bound, resolution_for_points, simplex_lattice
from cosra.metrics import hilbert_vec


class TestLattice:
    def test_point_counts_match_binomials(self):
        assert grid_point_count(80, 3) == 3321
        assert grid_point_count(100, 3) == 5151
        assert grid_point_count(130, 3) == 8646
        assert grid_point_count(160, 3) == 13041
        assert grid_point_count(4, 2) == 5

    def test_lattice_counts_and_exactness(self):
        for m, d in [(7, 3), (4, 2), (5, 4)]:
            lat = simplex_lattice(m, d)
            assert len(lat) == grid_point_count(m, d)
            assert np.all(lat.sum(axis=1) == m)
            assert np.all(lat >= 0)
            # coordinates are exact multiples of 1/m before normalization
            pts = lat / m
            assert np.all(pts * m == lat)

    def test_colexicographic_order(self):
        lat = simplex_lattice(2, 3)
        expected = [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
        assert [tuple(row) for row in lat] == expected

    def test_resolution_for_points(self):
        assert resolution_for_points(8646, 3) == 130
        assert resolution_for_points(8000, 3) <= 130
        assert grid_point_count(resolution_for_points(5000, 3), 3) >= 5000


class TestCoveringBound:
    def test_direct_formula_value(self):
        # kappa 0.2, d 3, m 130
        h = covering_radius_bound(130, 3, 0.2)
        expected = 2 * np.log(1 + (3 / 130) / (0.2 - 3 / 130))
        assert h == pytest.approx(expected, abs=1e-12)
        assert h == pytest.approx(0.2452046441846647, abs=1e-12)

    def test_monotone_to_zero(self):
        values = [covering_radius_bound(m, 3, 0.2) for m in (40, 80, 160, 320, 1280, 12800)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.003

    def test_guard_raises_when_step_too_big(self):
        with pytest.raises(ResolutionTooCoarse):
            covering_radius_bound(30, 3, 0.1)  # d/m = 0.1 >= kappa/2

    def test_anchored_bound_finite_when_direct_fails(self):
        kappa = np.array([0.33, 0.05, 0.022])
        h = anchored_covering_bound(40, kappa)
        assert np.isfinite(h) and h > 0

    def test_anchored_bound_fails_when_hopeless(self):
        with pytest.raises(ResolutionTooCoarse):
            anchored_covering_bound(1, np.array([0.4, 0.3, 0.3]))


class TestGenerateGrid:
    def test_leslie_grid_basics(self, leslie, leslie_cone):
        grid = generate_grid(leslie, leslie_cone, 20)
        assert grid.n_points == grid_point_count(20, 3)
        assert np.allclose(grid.points @ leslie.e_star, 1.0, atol=1e-12)
        assert grid.h_cert > 0 and np.isfinite(grid.h_cert)
        assert grid.in_cone[grid.base_index]

    def test_base_point_nearest_generator_barycenter(self, leslie, leslie_cone):
        grid = generate_grid(leslie, leslie_cone, 20)
        cand = np.where(grid.in_cone)[0]
        d2 = ((grid.points[cand] - leslie_cone.barycenter) ** 2).sum(axis=1)
        assert grid.base_index == cand[np.argmin(d2)]

    def test_too_coarse_raises(self, leslie, leslie_cone):
        with pytest.raises(ResolutionTooCoarse):
            generate_grid(leslie, leslie_cone, 2)  # no lattice point in the body

    def _min_hilbert_to_grid(self, samples, grid):
        interior = grid.points[np.all(grid.points > 0, axis=1)]
        logY = np.log(interior)
        lx = np.log(samples)
        fwd = (lx[:, None, :] - logY[None, :, :]).max(axis=2)
        bwd = (logY[None, :, :] - lx[:, None, :]).max(axis=2)
        return (fwd + bwd).min(axis=1)

    def test_empirical_covering_rejection_sampled(self, leslie, leslie_cone, rng):
        # 10^4 uniform simplex points filtered by cone membership are all
        # within h_cert of the grid in the Hilbert metric
        from cosra.cone import in_cone_mask

        grid = generate_grid(leslie, leslie_cone, 25)
        accepted = []
        while len(accepted) < 10**4:
            batch = rng.dirichlet(np.ones(3), size=4000)
            mask = in_cone_mask(leslie_cone, batch, 1e-9)
            accepted.extend(batch[mask])
        samples = np.asarray(accepted[: 10**4])
        assert np.all(self._min_hilbert_to_grid(samples, grid) <= grid.h_cert + 1e-9)

    def test_empirical_covering_stresses_corners(self, leslie, leslie_cone, rng):
        # rejection samples rarely land near the body's vertices, so cover
        # them separately: generators and sparse hull mixtures
        grid = generate_grid(leslie, leslie_cone, 25)
        G = leslie_cone.generators
        samples = [G]
        sparse = rng.dirichlet(np.ones(len(G)) * 0.05, size=300) @ G
        mixes = []
        for _ in range(100):
            i, j = rng.integers(len(G), size=2)
            t = rng.uniform()
            mixes.append(t * G[i] + (1 - t) * G[j])
        samples = np.vstack([G, sparse, np.asarray(mixes)])
        assert np.all(self._min_hilbert_to_grid(samples, grid) <= grid.h_cert + 1e-9)

    def test_general_e_star_section(self, rng):
        A = rng.uniform(0.8, 1.2, size=(3, 3))
        game = cosra.game_from_matrices([A], [np.eye(3)], e_star=[1.0, 2.0, 0.5])
        K = cosra.build_invariant_cone(game)
        grid = generate_grid(game, K, 15)
        assert np.allclose(grid.points @ game.e_star, 1.0, atol=1e-12)
        assert grid.h_cert > 0


class TestCertifyCovering:
    def test_prefers_direct_formula_when_valid(self):
        gens = np.array([[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])
        K = cosra.cone.cone_from_generators(gens, np.ones(3))
        h = certify_covering(100, 3, K)
        assert h == pytest.approx(covering_radius_bound(100, 3, 0.2), abs=1e-12)

    def test_falls_back_when_formula_guard_fails(self, leslie_cone):
        # benchmark cone floor is ~0.02: the direct guard fails at m=80
        with pytest.raises(ResolutionTooCoarse):
            covering_radius_bound(80, 3, leslie_cone.kappa_min)
        h = certify_covering(80, 3, leslie_cone)
        assert np.isfinite(h) and 0 < h < 5
