import math

import pytest

import sirl


@pytest.fixture(scope="module")
def world():
    return sirl.generate_world(grid_size=6, n_objects=8, seed=3)


def test_world_shapes(world):
    assert world.grid_size == 6
    assert len(world.objects) == 8
    assert sirl.true_reward(world).shape == (36,)
    assert sirl.features(world, "continuous").shape == (36, 4)
    assert sirl.features(world, "discrete").shape == (36, 24)


def test_instance_text_round_trip(world):
    again = sirl.Instance.from_text(world.to_text())
    assert again.objects == world.objects
    assert again.to_text() == world.to_text()


def test_optimal_policy_has_zero_evd(world):
    values, actions = sirl.optimal(world)
    assert len(actions) == 36
    assert all(0 <= a < 5 for a in actions)
    assert sirl.evd(world, [0.0] * 4, "continuous") >= -1e-8


def test_gradient_matches_finite_differences(world):
    demos = sirl.generate_demos(world, 10, 4, seed=1)
    w = [0.2, -0.1, 0.3, 0.05]
    g = sirl.gradient(world, demos, w, "continuous", soft_tol=1e-12)
    h = 1e-4
    for j in range(4):
        up = list(w)
        down = list(w)
        up[j] += h
        down[j] -= h
        fd = (sirl.log_likelihood(world, demos, up, "continuous", soft_tol=1e-12)
              - sirl.log_likelihood(world, demos, down, "continuous", soft_tol=1e-12)) / (2 * h)
        assert abs(g[j] - fd) < 1e-5 * max(1.0, abs(fd))


def test_gmm_fit_and_density():
    points = [[-10.0 + 0.01 * i] for i in range(50)] + [[10.0 + 0.01 * i] for i in range(50)]
    gmm, history = sirl.fit_gmm(points, 2, seed=1)
    assert sorted(round(m[0]) for m in gmm.means) == [-10, 10]
    assert all(b >= a - 1e-8 for a, b in zip(history, history[1:]))
    single = sirl.Gmm()
    single.mixing = [1.0]
    single.means = [[0.0]]
    single.variances = [[1.0]]
    assert single.log_pdf([0.0]) == pytest.approx(-0.5 * math.log(2 * math.pi))
    assert len(single.sample(5, 0)) == 5


def test_mcem_runs(world):
    demos = sirl.generate_demos(world, 8, 3, seed=2)
    gmm, converged = sirl.run_mcem(world, demos, "continuous", n0=4, m=3, components=2, max_outer_iters=2)
    assert len(gmm.mixing) == 2
    assert sum(gmm.mixing) == pytest.approx(1.0)
    assert isinstance(converged, bool)


def test_config_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        sirl.normalize_config('{"unknown": 1}')
    assert '"grid_size": 10' in sirl.normalize_config("{}")
