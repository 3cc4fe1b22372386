import numpy as np
import pytest

from foeed import grid, solver, tensors
from foeed.diffusivity import Diffusivity
from foeed.masks import random_mask
from foeed.solver import Init, Model, SolverConfig
from foeed.tensors import Eigenframe

import oracles

FOURTH_ORDER = ["foeed", "li1", "li2", "youkaveh", "hajiaboli"]


def image(seed, shape=(8, 8)):
    return np.random.default_rng(seed).uniform(0, 255, shape)


@pytest.fixture(scope="module")
def problem():
    jj, ii = np.mgrid[0:24, 0:24]
    f = np.where(ii + 0.5 * jj > 18, 200.0, 50.0) + 20 * np.sin(ii / 4)
    known = random_mask(24, 24, 0.2, seed=3)
    return f, known


# -- configuration -----------------------------------------------------------

def test_default_step_sizes():
    assert SolverConfig(model="eed").tau == 0.25
    for m in FOURTH_ORDER:
        assert SolverConfig(model=m).tau == 0.05


@pytest.mark.parametrize("bad", [
    {"tau": 0.0}, {"sigma": -1}, {"fsi_n": 0}, {"fsi_n": 2.5}, {"stop_tol": 0},
    {"max_cycles": 0}, {"dx": 0}, {"model": "heat"}, {"mu3": "median"}, {"init": "noise"},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SolverConfig(**bad)


def test_fsi_defaults_to_symmetric_models_only():
    assert SolverConfig(model="eed").use_fsi and SolverConfig(model="foeed").use_fsi
    for m in ["li1", "li2", "youkaveh", "hajiaboli"]:
        assert SolverConfig(model=m).use_fsi is False
    assert SolverConfig(model="li1", use_fsi=True).use_fsi is True


def test_config_replace_revalidates():
    cfg = SolverConfig()
    assert cfg.replace(mu3="one").mu3 is tensors.Mu3Rule.ONE
    with pytest.raises(ValueError):
        cfg.replace(tau=-1.0)


def test_fsi_alpha_values():
    assert solver.fsi_alpha(0) == pytest.approx(2 / 3)
    assert solver.fsi_alpha(1) == pytest.approx(6 / 5)
    for k in range(40):
        assert solver.fsi_alpha(k) == (4 * k + 2) / (2 * k + 3)


@pytest.mark.parametrize("dx, dy, expected", [(1, 1, 1 / 17), (2, 2, 1 / 68), (1, 2, 1 / 42)])
def test_stable_step_bound(dx, dy, expected):
    assert solver.stable_step_bound(dx, dy) == pytest.approx(expected, rel=1e-15)


# -- right-hand sides ----------------------------------------------------------

@pytest.mark.parametrize("model", ["eed"] + FOURTH_ORDER)
def test_rhs_vanishes_on_constants(model):
    assert np.abs(solver.rhs(np.full((7, 7), 80.0), SolverConfig(model=model))).max() < 1e-12


@pytest.mark.parametrize("model", ["li1", "li2", "youkaveh", "hajiaboli"])
@pytest.mark.parametrize("seed", range(3))
def test_adapter_rhs_equals_composed_pde(model, seed):
    u = image(seed)
    cfg = SolverConfig(model=model, diffusivity=Diffusivity("charbonnier", 0.1))
    np.testing.assert_allclose(solver.rhs(u, cfg),
                               oracles.composed_rhs(model, u, cfg.diffusivity),
                               rtol=0, atol=1e-10)


@pytest.mark.parametrize("rule", ["one", "amean", "gmean"])
def test_foeed_rhs_matches_coefficient_oracle(rule):
    u = image(7)
    cfg = SolverConfig(model="foeed", mu3=rule, diffusivity=Diffusivity("perona-malik", 0.1))
    ref = oracles.foeed_rhs(u, cfg.diffusivity, lambda m: float(tensors.mu3_value(rule, m)))
    for fast in (True, False):
        np.testing.assert_allclose(solver.rhs(u, cfg, fast=fast), ref, rtol=0, atol=1e-9)


def test_eed_rhs_matches_flux_oracle():
    u = image(8)
    cfg = SolverConfig(model="eed")
    frame = Eigenframe.from_gradient(*oracles.gradient(oracles.gaussian_dense(u, 1.0)),
                                     scale=255.0)
    D = tensors.eed_tensor(frame, cfg.diffusivity)
    ref = oracles.div_flux(D.xx, D.xy, D.yy, u)
    for fast in (True, False):
        np.testing.assert_allclose(solver.rhs(u, cfg, fast=fast), ref, rtol=0, atol=1e-9)


@pytest.mark.parametrize("model", ["eed", "foeed"])
@pytest.mark.parametrize("kind", ["charbonnier", "aubert", "perona-malik", "perona-malik2",
                                  "geman-reynolds"])
def test_fast_path_matches_reference(model, kind):
    u = image(9, (33, 20))
    cfg = SolverConfig(model=model, diffusivity=Diffusivity(kind, 0.2), sigma=1.3,
                       dx=1.0, dy=0.8)
    a, b = solver.rhs(u, cfg, fast=True), solver.rhs(u, cfg, fast=False)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-11 * np.abs(b).max())


def test_rhs_is_mean_free_for_divergence_forms():
    u = image(10, (12, 15))
    for model in ["eed"] + FOURTH_ORDER:
        assert abs(solver.rhs(u, SolverConfig(model=model)).sum()) < 1e-8


def test_frozen_foeed_operator_is_symmetric_negative_semidefinite():
    shape = (6, 7)
    frame = Eigenframe.from_image(image(11, shape), 1.0, scale=255.0)
    g = Diffusivity()

    def op(v):
        return -grid.outer_second(tensors.foeed_apply(frame, g, "gmean", grid.hessian(v)))

    P = oracles.matrix_of(op, shape)
    np.testing.assert_allclose(P, P.T, atol=1e-12)
    assert np.linalg.eigvalsh(P).max() < 1e-10


# -- time stepping -----------------------------------------------------------

def test_explicit_step_keeps_known_pixels(problem):
    f, known = problem
    cfg = SolverConfig()
    u = solver.initialize(f, known)
    nxt = solver.explicit_step(u, f, known, cfg)
    assert np.array_equal(nxt[known], f[known])
    expected = u + cfg.tau * solver.rhs(u, cfg)
    np.testing.assert_array_equal(nxt[~known], expected[~known])


def test_single_step_fsi_cycle_by_hand(problem):
    f, known = problem
    cfg = SolverConfig(fsi_n=1)
    u = solver.initialize(f, known, "nearest")
    want = u + (2 / 3) * cfg.tau * solver.rhs(u, cfg)
    want[known] = f[known]
    np.testing.assert_allclose(solver.fsi_cycle(u, f, known, cfg), want, atol=1e-12)


def test_two_step_fsi_cycle_by_hand(problem):
    f, known = problem
    cfg = SolverConfig(model="eed", fsi_n=2)
    u0 = solver.initialize(f, known, "nearest")
    u1 = (2 / 3) * (u0 + cfg.tau * solver.rhs(u0, cfg)) + (1 / 3) * u0
    u1[known] = f[known]
    u2 = (6 / 5) * (u1 + cfg.tau * solver.rhs(u1, cfg)) - (1 / 5) * u0
    u2[known] = f[known]
    np.testing.assert_allclose(solver.fsi_cycle(u0, f, known, cfg), u2, atol=1e-12)


def test_initializations(problem):
    f, known = problem
    assert np.all(solver.initialize(f, known, Init.ZERO)[~known] == 0)
    assert np.allclose(solver.initialize(f, known, "mean")[~known], f[known].mean())
    near = solver.initialize(f, known, "nearest")
    assert np.array_equal(near[known], f[known])
    assert set(np.unique(near)) <= set(np.unique(f[known]))


def test_smooth_run_is_l2_stable_at_bound():
    u = image(12, (20, 20))
    cfg = SolverConfig(model="foeed", tau=solver.stable_step_bound())
    norms = []
    out = solver.smooth_run(u, cfg, 60, norms)
    assert len(norms) == 61
    assert np.all(np.diff(norms) <= 1e-9)
    assert out.mean() == pytest.approx(u.mean(), rel=1e-12)


def test_smooth_run_zero_steps_and_validation():
    u = image(13)
    assert np.array_equal(solver.smooth_run(u, SolverConfig(), 0), u)
    with pytest.raises(ValueError):
        solver.smooth_run(u, SolverConfig(), -1)


@pytest.mark.parametrize("model", ["eed"] + FOURTH_ORDER)
def test_run_converges_and_keeps_known_pixels(problem, model):
    f, known = problem
    u, report = solver.run(f, known, SolverConfig(model=model))
    assert report.converged and not report.diverged
    assert report.final_residual < 1e-4
    assert report.operator_applications == 40 * report.cycles_run
    assert np.array_equal(u[known], f[known])
    assert np.all(np.isfinite(u))


def test_run_reports_non_convergence(problem, caplog):
    f, known = problem
    u, report = solver.run(f, known, SolverConfig(max_cycles=1))
    assert not report.converged and report.cycles_run == 1
    assert "no convergence" in caplog.text


def test_run_stops_on_blow_up(problem):
    f, known = problem
    cfg = SolverConfig(model="foeed", diffusivity=Diffusivity("geman-reynolds"))
    u, report = solver.run(f, known, cfg)
    assert report.diverged and not report.converged
    assert report.cycles_run < 10


def test_run_all_known_is_identity():
    f = image(14)
    u, report = solver.run(f, np.ones(f.shape, bool), SolverConfig())
    assert np.array_equal(u, f)
    assert report.converged and report.operator_applications == 0


def test_run_input_errors():
    f = image(15)
    with pytest.raises(ValueError):
        solver.run(f, np.ones((3, 3), bool), SolverConfig())
    with pytest.raises(ValueError):
        solver.run(f, np.zeros(f.shape, bool), SolverConfig())


def test_run_is_deterministic(problem):
    f, known = problem
    cfg = SolverConfig(model="foeed")
    a, _ = solver.run(f, known, cfg)
    b, _ = solver.run(f, known, cfg)
    assert np.array_equal(a, b)


def test_run_commutes_with_intensity_shift(problem):
    f, known = problem
    cfg = SolverConfig(model="foeed")
    a, _ = solver.run(f, known, cfg)
    b, _ = solver.run(f + 17.0, known, cfg)
    assert np.abs((b - 17.0) - a).max() < 1e-3


def test_fsi_and_explicit_reach_the_same_state(problem):
    f, known = problem
    cfg = SolverConfig(model="eed", fsi_n=5)
    a, ra = solver.run(f, known, cfg)
    b, rb = solver.run(f, known, cfg.replace(use_fsi=False))
    assert ra.operator_applications < rb.operator_applications
    assert np.mean((a - b) ** 2) < 0.5


def test_channelwise(problem):
    f, known = problem
    rgb = np.stack([f, 255 - f, f / 2], axis=-1)
    u, reports = solver.run_channelwise(rgb, known, SolverConfig(model="eed"))
    assert u.shape == rgb.shape and len(reports) == 3
    single, _ = solver.run(rgb[..., 1], known, SolverConfig(model="eed"))
    np.testing.assert_array_equal(u[..., 1], single)


def test_fourth_order_tensor_rejects_eed():
    with pytest.raises(ValueError):
        solver.fourth_order_tensor(image(16), SolverConfig(model=Model.EED))
