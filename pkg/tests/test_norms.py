import math

import numpy as np
import pytest

from tfkac import (ModelParams, build_space_grid, build_time_grid, example1, fem_h1_error,
                   fem_h1_seminorm, level_norms, lift_boundary, march_fem, refinement_error,
                   spacetime_norms)
from tfkac.errors import GridMismatch
from tfkac.norms import h1_semi, inject, l2_h, max_h, norm_report, restrict


def test_zero_and_hand_case():
    grid = build_space_grid(0, 1, 2)
    assert level_norms(np.zeros(1), grid) == (0.0, 0.0, 0.0)
    l2, h1, mx = level_norms(np.array([1.0]), grid)
    assert l2 == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert h1 == pytest.approx(2.0, rel=1e-15)
    assert mx == 1.0


@pytest.mark.parametrize("m", [4, 16, 64, 256])
def test_poincare_inequalities(m, rng):
    grid = build_space_grid(0, 1, m)
    v = rng.standard_normal((1000, m - 1)) + 1j * rng.standard_normal((1000, m - 1))
    semi = h1_semi(v, grid)
    assert np.all(l2_h(v, grid) <= semi / math.sqrt(6))
    assert np.all(max_h(v) <= semi / math.sqrt(2))


def test_poincare_on_smooth_vectors():
    # the sine mode is the worst case for the L2 bound
    for m in (4, 16, 64, 256):
        grid = build_space_grid(0, 1, m)
        v = np.sin(math.pi * grid.interior)
        assert l2_h(v, grid) <= h1_semi(v, grid) / math.sqrt(6)
        assert max_h(v) <= h1_semi(v, grid) / math.sqrt(2)


def test_homogeneity(rng):
    grid = build_space_grid(0, 1, 32)
    v = rng.standard_normal(31) + 1j * rng.standard_normal(31)
    c = 2.5 - 1.5j
    for a, b in zip(level_norms(c * v, grid), level_norms(v, grid)):
        assert a == pytest.approx(abs(c) * b, rel=1e-14)
    hist = np.stack([v, 2 * v, -v])
    for a, b in zip(spacetime_norms(c * hist, 0.1, grid), spacetime_norms(hist, 0.1, grid)):
        assert a == pytest.approx(abs(c) * b, rel=1e-14)


def test_spacetime_small_cases(rng):
    grid = build_space_grid(0, 1, 8)
    assert spacetime_norms(np.zeros((4, 7)), 0.25, grid) == (0.0, 0.0)
    v = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    # level 0 is excluded
    hist = np.stack([100 * v, v])
    st_h1, st_inf = spacetime_norms(hist, 0.25, grid)
    assert st_inf == pytest.approx(0.25 * np.max(np.abs(v)), rel=1e-15)
    assert st_h1 == pytest.approx(0.5 * h1_semi(v, grid), rel=1e-15)
    with pytest.raises(ValueError):
        spacetime_norms(hist, 0.25)


def test_norm_report():
    sg, tg = build_space_grid(0, 1, 8), build_time_grid(1.0, 4)
    prob = lift_boundary(example1(ModelParams(0.5, 3.0, 1.0, 5.0)))
    sol = march_fem(prob.params, sg, tg, prob.source)
    rep = norm_report(sol)
    assert rep.l2_h.shape == (5,)
    assert (rep.st_0h1, rep.st_0prime_hinf) == spacetime_norms(sol, tg.tau)


def test_fem_seminorm():
    grid = build_space_grid(0, 1, 16)
    assert fem_h1_seminorm(np.zeros(15), grid) == 0.0
    hat = np.zeros(15)
    hat[6] = 1.0
    assert fem_h1_seminorm(hat, grid) == pytest.approx(math.sqrt(2 / grid.h), rel=1e-15)
    v = np.arange(15) * (1 + 0.5j)
    assert fem_h1_seminorm(v, grid) == h1_semi(v, grid)


def test_fem_h1_error_exact_for_interpolated_linear():
    grid = build_space_grid(0, 1, 8)
    # u = x(1-x) has u' = 1-2x; its interpolant error is h/sqrt(12) per unit curvature
    coeffs = grid.interior * (1 - grid.interior)
    err = fem_h1_error(coeffs, grid, lambda x, t: 1 - 2 * x, 0.0)
    assert err == pytest.approx(2 * grid.h / math.sqrt(12), rel=1e-13)


def test_inject_and_restrict(rng):
    coarse, fine = build_space_grid(0, 1, 8), build_space_grid(0, 1, 16)
    v = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    np.testing.assert_allclose(restrict(inject(v, coarse, fine), fine, coarse), v, rtol=1e-15)
    with pytest.raises(GridMismatch):
        inject(v, coarse, build_space_grid(0, 1, 12))
    with pytest.raises(GridMismatch):
        restrict(np.ones(11), build_space_grid(0, 1, 12), coarse)


def test_refinement_error_basic(rng):
    coarse, fine = build_space_grid(0, 1, 8), build_space_grid(0, 1, 16)
    v = rng.standard_normal(7)
    assert refinement_error(v, inject(v, coarse, fine), coarse, fine) == 0.0
    with pytest.raises(GridMismatch):
        refinement_error(v, np.ones(31), coarse, build_space_grid(0, 1, 32))


def test_refinement_error_triangle_bound():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    prob = lift_boundary(example1(params))
    tg = build_time_grid(1.0, 64)
    coarse, fine = build_space_grid(0, 1, 16), build_space_grid(0, 1, 32)
    gc = march_fem(params, coarse, tg, prob.source).final
    gf = march_fem(params, fine, tg, prob.source).final
    bound = 2 * fem_h1_error(gc, coarse, prob.exact_dx, 1.0)
    assert refinement_error(gc, gf, coarse, fine) <= bound
