import math

import numpy as np
import pytest

from neutron_wigner.states import (
    FluctuationLaw,
    GaussianPacket,
    StateKind,
    cat_family,
    cat_wavefunction,
    norm_cat_averaged,
    psi_position,
    wigner_cat,
    wigner_cat_averaged,
    wigner_gaussian,
    wigner_squashed,
)
from neutron_wigner.transform import (
    DensityKernel,
    PhaseSpaceGrid,
    SampledWavefunction,
    SupportError,
    WignerField,
    average_over_shift,
    monte_carlo_average,
    normal_draws,
    reduce,
    sample_field,
    shift_nodes,
    wigner_from_density,
    wigner_transform,
    z_scores,
)

P = GaussianPacket(0.0, 1.7, 1.1)


def sampled(psi, half=24.0, step=0.05, norm=1.0):
    return SampledWavefunction.from_function(psi, -half, half, step, expected_norm=norm)


def support(exact, rel=1e-10):
    return np.abs(exact) > rel * np.abs(exact).max()


def test_grid_validation_and_window():
    with pytest.raises(ValueError):
        PhaseSpaceGrid(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        PhaseSpaceGrid(0.0, 1.0, 0.0, 1.0, 4, 16)
    g = PhaseSpaceGrid.for_state(StateKind("cat_averaged", P, FluctuationLaw(16.1, 1.0)), 64, 32)
    assert g.x_min == pytest.approx(-(8 * math.hypot(1.1, 1.0) + 16.1))
    assert g.x_max >= 8 * math.hypot(1.1, 1.0) + 16.1
    assert g.k_min == pytest.approx(1.7 - 8 / 2.2)
    assert np.min(np.abs(g.x)) < 1e-12 and np.min(np.abs(g.k - 1.7)) < 1e-12
    assert g.x.shape == (64,) and g.k.shape == (32,)
    assert g.hx == pytest.approx(np.diff(g.x)[0])


def test_field_rejects_bad_values():
    g = PhaseSpaceGrid(0, 1, 0, 1, 8, 8)
    with pytest.raises(ValueError):
        WignerField(g, np.zeros((8, 9)), {"kind": "x"})
    with pytest.raises(ValueError):
        WignerField(g, np.full((8, 8), np.nan), {"kind": "x"})
    with pytest.raises(ValueError):
        WignerField(g, np.zeros((8, 8)), {})


def test_sampled_wavefunction_norm_check():
    with pytest.raises(ValueError, match="squared norm"):
        sampled(lambda x: 2 * psi_position(x, P))
    cat = sampled(lambda x: cat_wavefunction(x, P, 16.1), half=40, norm=norm_cat_averaged(P, FluctuationLaw(16.1)))
    assert cat.amplitudes.size == 1601


@pytest.mark.parametrize("interpolation,tol,total_tol", [("fourier", 1e-6, 1e-8), ("cubic", 1e-3, 1e-5)])
def test_gaussian_transform(interpolation, tol, total_tol):
    s = StateKind("gaussian", P)
    grid = PhaseSpaceGrid.for_state(s, 128, 128)
    wf = wigner_transform(sampled(lambda x: psi_position(x, P)), grid, interpolation)
    exact = wigner_gaussian(grid.x[:, None], grid.k[None, :], P)
    m = support(exact)
    assert np.max(np.abs(wf.values[m] - exact[m]) / exact[m]) < tol
    assert reduce(wf).total == pytest.approx(1.0, abs=total_tol)


def test_coarse_samples_are_refined():
    grid = PhaseSpaceGrid(-6, 6, -3, 6, 64, 64)
    coarse = sampled(lambda x: psi_position(x, P), step=0.4)
    wf = wigner_transform(coarse, grid)
    assert wf.provenance["refine"] > 1
    exact = wigner_gaussian(grid.x[:, None], grid.k[None, :], P)
    assert np.allclose(wf.values, exact, rtol=0, atol=1e-9)


def test_cat_transform():
    law = FluctuationLaw(16.1)
    s = StateKind("cat", P, law)
    grid = PhaseSpaceGrid.for_state(s, 128, 128)
    psi = sampled(lambda x: cat_wavefunction(x, P, 16.1), half=40, norm=norm_cat_averaged(P, law))
    wf = wigner_transform(psi, grid)
    exact = wigner_cat(grid.x[:, None], grid.k[None, :], P, 16.1)
    assert np.allclose(wf.values, exact, rtol=0, atol=1e-9 * np.abs(exact).max())
    assert (wf.values < 0).any()


def test_even_wavefunction_gives_even_field():
    p = GaussianPacket(0.0, 0.0, 1.0)
    grid = PhaseSpaceGrid(-8, 8, -4, 4, 65, 65)
    wf = wigner_transform(sampled(lambda x: psi_position(x, p), half=16), grid)
    assert np.allclose(wf.values, wf.values[::-1, :], rtol=0, atol=1e-13)
    assert np.allclose(wf.values, wf.values[:, ::-1], rtol=0, atol=1e-13)


def test_support_error_on_truncated_samples():
    grid = PhaseSpaceGrid(-4, 4, -2, 5, 16, 16)
    with pytest.raises(SupportError, match="boundary"):
        wigner_transform(SampledWavefunction.from_function(lambda x: psi_position(x, P), -3, 3, 0.05, norm_tol=1.0), grid)


def test_pure_kernel_matches_transform():
    psi = lambda x: cat_wavefunction(x, P, 6.0)  # noqa: E731
    grid = PhaseSpaceGrid(-12, 12, -2, 5.4, 64, 64)
    norm = norm_cat_averaged(P, FluctuationLaw(6.0))
    a = wigner_transform(sampled(psi, half=30, norm=norm), grid)
    b = wigner_from_density(DensityKernel.pure(psi, 40.0), grid)
    assert np.allclose(a.values, b.values, rtol=0, atol=1e-10)


def test_mixture_kernel_matches_averaged_cat():
    law = FluctuationLaw(16.1, 1.0)
    family = lambda x, d: cat_wavefunction(x, P, d)  # noqa: E731
    rho = DensityKernel.mixture(family, law, 60.0)
    assert rho.hermiticity_defect(np.linspace(-20, 20, 9)) < 1e-15
    grid = PhaseSpaceGrid.for_state(StateKind("cat_averaged", P, law), 64, 64)
    wf = wigner_from_density(rho, grid)
    exact = wigner_cat_averaged(grid.x[:, None], grid.k[None, :], P, law)
    assert np.allclose(wf.values, exact, rtol=0, atol=1e-7 * np.abs(exact).max())


def test_kernel_scaling_is_linear():
    rho = DensityKernel.pure(lambda x: psi_position(x, P), 30.0)
    grid = PhaseSpaceGrid(-6, 6, -1, 4, 32, 32)
    a = wigner_from_density(rho, grid)
    b = wigner_from_density(rho.scaled(0.25), grid)
    assert np.allclose(b.values, 0.25 * a.values, rtol=1e-13, atol=1e-18)


def test_kernel_window_too_small():
    rho = DensityKernel.pure(lambda x: psi_position(x, P), 3.0)
    with pytest.raises(SupportError, match="not negligible"):
        wigner_from_density(rho, PhaseSpaceGrid(-4, 4, -1, 4, 16, 16))


def test_shift_nodes_moments():
    law = FluctuationLaw(2.0, 0.5)
    d, w = shift_nodes(law, 32)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    assert d @ w == pytest.approx(2.0, abs=1e-14)
    assert ((d - 2.0) ** 2) @ w == pytest.approx(0.25, abs=1e-14)
    with pytest.raises(ValueError):
        shift_nodes(law, 2)


def test_average_over_shift_squashed():
    law = FluctuationLaw(1.5, 0.8)
    avg = average_over_shift(lambda x, k: wigner_gaussian(x, k, P), law)
    x, k = np.meshgrid(np.linspace(-8, 10, 37), np.linspace(-1, 4, 21), indexing="ij")
    exact = wigner_squashed(x, k, P, law)
    assert np.allclose(avg(x, k), exact, rtol=1e-12, atol=1e-300)


def test_average_over_shift_cat_parametric():
    law = FluctuationLaw(16.1, 0.6)
    avg = average_over_shift(cat_family(P), law, parametric=True)
    x, k = np.meshgrid(np.linspace(-20, 20, 41), np.linspace(-1, 4, 21), indexing="ij")
    exact = wigner_cat_averaged(x, k, P, law)
    assert np.allclose(avg(x, k), exact, rtol=0, atol=1e-12 * np.abs(exact).max())


def test_average_over_shift_zero_sigma_is_translation():
    avg = average_over_shift(lambda x, k: wigner_gaussian(x, k, P), FluctuationLaw(0.7, 0.0))
    assert avg(0.7, 1.7) == pytest.approx(1 / math.pi, rel=1e-15)


def test_normal_draws_are_deterministic():
    law = FluctuationLaw(1.0, 2.0)
    a = normal_draws(law, 10_000, 11)
    b = normal_draws(law, 10_000, 11)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, normal_draws(law, 10_000, 12))
    assert a.mean() == pytest.approx(1.0, abs=0.1)
    assert a.std() == pytest.approx(2.0, rel=0.05)


def test_monte_carlo_squashed():
    law = FluctuationLaw(1.5, 0.8)
    s = StateKind("squashed", P, law)
    grid = PhaseSpaceGrid.for_state(s, 32, 32)
    base = lambda x, k: wigner_gaussian(x, k, P)  # noqa: E731
    mc = monte_carlo_average(base, law, grid, 20_000, seed=3)
    again = monte_carlo_average(base, law, grid, 20_000, seed=3)
    assert np.array_equal(mc.values, again.values)
    assert mc.provenance["seed"] == 3
    z = z_scores(mc, sample_field(s, grid).values)
    assert np.nanmax(np.abs(z)) < 5


def test_monte_carlo_zero_sigma_and_sample_floor():
    law = FluctuationLaw(0.5, 0.0)
    grid = PhaseSpaceGrid(-4, 4, -1, 4, 16, 16)
    base = lambda x, k: wigner_gaussian(x, k, P)  # noqa: E731
    mc = monte_carlo_average(base, law, grid, 100, seed=1)
    assert np.array_equal(mc.values, wigner_gaussian(grid.x[:, None] - 0.5, grid.k[None, :], P))
    assert not mc.stderr.any()
    with pytest.raises(ValueError):
        monte_carlo_average(base, law, grid, 99, seed=1)


def test_z_scores_need_stderr():
    s = StateKind("gaussian", P)
    wf = sample_field(s, PhaseSpaceGrid.for_state(s, 16, 16))
    with pytest.raises(ValueError):
        z_scores(wf, wf.values)


def test_reduce_moments():
    law = FluctuationLaw(1.5, 0.8)
    wf = sample_field(StateKind("squashed", P, law))
    r = reduce(wf)
    assert r.total == pytest.approx(1.0, abs=1e-10)
    assert r.mean_x == pytest.approx(1.5, abs=1e-10)
    assert r.var_x == pytest.approx(1.1**2 + 0.8**2, rel=1e-8)
    assert r.mean_k == pytest.approx(1.7, abs=1e-10)
    assert r.var_k == pytest.approx(1 / (4 * 1.1**2), rel=1e-8)
