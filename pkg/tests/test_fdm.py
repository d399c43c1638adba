import numpy as np
import pytest

from tfkac import (ModelParams, TridiagonalOperator, assemble_fdm_system, build_space_grid,
                   build_time_grid, d0_weight, example1, grunwald, lift_boundary, march_fdm,
                   spacetime_norms, tridiag_solve)
from tfkac.errors import IncompatibleData, SingularPivot
from tfkac.oracle import dense_solve_oracle

ZERO = lambda x, t: np.zeros(np.shape(x), dtype=complex)


def test_assembly_hand_case():
    params = ModelParams(0.5, 0.0, 1.0, 0.0)
    op = assemble_fdm_system(params, build_space_grid(0, 1, 4), 1.0, 1.0)
    np.testing.assert_allclose(op.diag, [33, 33, 33])
    np.testing.assert_allclose(op.sub, [-16, -16])
    np.testing.assert_allclose(op.sup, [-16, -16])


def test_assembly_without_diffusion_is_diagonal():
    # K_gamma = 0 is outside the model; build the operator directly
    params = ModelParams(0.5, 0.0, 1e-300, 0.0)
    op = assemble_fdm_system(params, build_space_grid(0, 1, 8), 0.25, 0.8)
    np.testing.assert_allclose(op.diag, 0.8 / 0.25**0.5)
    assert np.all(np.abs(op.sub) < 1e-290)


@pytest.mark.parametrize("gamma, lam", [(0.3, 3.0), (0.5, 3.0), (0.8, 3.0), (0.5, 0.0), (0.8, 5.0)])
@pytest.mark.parametrize("n, m", [(128, 2048), (512, 2048), (256, 16), (4096, 64), (16, 16)])
def test_strict_diagonal_dominance(gamma, lam, n, m):
    tau = 1.0 / n
    op = assemble_fdm_system(ModelParams(gamma, lam, 1.0, 5.0), build_space_grid(0, 1, m), tau,
                             d0_weight(gamma, lam, tau))
    off = np.abs(np.concatenate([[0], op.sub])) + np.abs(np.concatenate([op.sup, [0]]))
    assert np.all(op.diag / off > 1)


def test_tridiag_small_cases():
    rhs = np.array([1 + 2j, -1j, 3.0])
    ident = TridiagonalOperator(np.zeros(2), np.ones(3), np.zeros(2))
    np.testing.assert_array_equal(tridiag_solve(ident, rhs), rhs)
    op = TridiagonalOperator([-1, -1], [2, 2, 2], [-1, -1])
    np.testing.assert_allclose(tridiag_solve(op, np.ones(3)), [1.5, 2, 1.5], rtol=1e-15)
    for size in (1, 2):
        op = TridiagonalOperator(np.full(size - 1, 0.5), np.full(size, 3.0), np.full(size - 1, -1.0))
        x = tridiag_solve(op, np.arange(1, size + 1) * (1 + 1j))
        np.testing.assert_allclose(op.matvec(x), np.arange(1, size + 1) * (1 + 1j), rtol=1e-15)


def test_tridiag_matches_dense(rng):
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    grid = build_space_grid(0, 1, 129)
    op = assemble_fdm_system(params, grid, 1 / 128, d0_weight(0.5, 3.0, 1 / 128))
    rhs = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    x = tridiag_solve(op, rhs)
    ref = dense_solve_oracle(op.to_dense(), rhs)
    assert np.max(np.abs(x - ref)) <= 1e-12 * np.max(np.abs(ref))
    assert np.max(np.abs(op.matvec(x) - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_singular_pivot():
    with pytest.raises(SingularPivot):
        TridiagonalOperator(np.zeros(3), np.zeros(4), np.zeros(3))
    with pytest.raises(SingularPivot):
        TridiagonalOperator([1.0], [1.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        TridiagonalOperator([1.0], [1.0, 1.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        tridiag_solve(TridiagonalOperator([0.0], [1.0, 1.0], [0.0]), np.ones(3))


def test_zero_fixed_point():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    hist = march_fdm(params, build_space_grid(0, 1, 16), build_time_grid(1.0, 20), ZERO)
    assert len(hist) == 21
    assert np.all(hist.snapshots == 0)


def test_zero_ic_variant_rejects_data():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    with pytest.raises(IncompatibleData):
        march_fdm(params, build_space_grid(0, 1, 4), build_time_grid(1.0, 2), ZERO,
                  ic=np.ones(3), variant="zero_ic")


def test_initial_level_is_ic():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    phi = np.array([1.0, 2.0, 3.0]) + 0j
    hist = march_fdm(params, build_space_grid(0, 1, 4), build_time_grid(1.0, 2), ZERO, phi,
                     "general_ic")
    np.testing.assert_array_equal(hist[0], phi)


def _run_example1(params, n, m, variant):
    sg, tg = build_space_grid(0, 1, m), build_time_grid(1.0, n)
    prob = example1(params)
    if variant == "zero_ic":
        prob = lift_boundary(prob)
        hist = march_fdm(params, sg, tg, prob.source)
    else:
        hist = march_fdm(params, sg, tg, prob.source, prob.initial(sg.interior), "general_ic")
    exact = np.array([prob.exact(sg.interior, t) for t in tg.levels])
    return spacetime_norms(exact - hist.snapshots, tg.tau, sg)


def test_reference_value_zero_ic():
    _, err = _run_example1(ModelParams(0.5, 3.0, 1.0, 5.0), 128, 2048, "zero_ic")
    assert err == pytest.approx(1.2351e-06, rel=1e-3)


def test_reference_value_general_ic():
    params = ModelParams(0.3, 3.0, 1.0, 1 + 1j)
    e1 = _run_example1(params, 128, 2048, "general_ic")[1]
    e2 = _run_example1(params, 256, 2048, "general_ic")[1]
    assert e2 == pytest.approx(8.2423e-06, rel=1e-3)
    assert np.log2(e1 / e2) == pytest.approx(0.9879, abs=5e-3)


def test_first_order_in_time():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    errs = np.array([_run_example1(params, n, 1024, "zero_ic") for n in (16, 32, 64)])
    ratios = errs[:-1] / errs[1:]
    assert np.all((ratios >= 1.85) & (ratios <= 2.15))


def test_second_order_joint():
    params = ModelParams(0.3, 3.0, 1.0, 1 + 1j)
    errs = np.array([_run_example1(params, m * m, m, "zero_ic") for m in (8, 16, 32)])
    ratios = errs[:-1] / errs[1:]
    assert np.all((ratios >= 4 * 0.85) & (ratios <= 4 * 1.15))


def test_stability_bounded(rng):
    # zero source, random ic: sum_n tau ||G^n||_inf^2 stays below T ||phi||_inf^2
    # and saturates as tau -> 0 at fixed h
    params = ModelParams(0.5, 3.0, 1.0, 10j)
    sg = build_space_grid(0, 1, 32)
    phi = rng.uniform(-1, 1, 31) + 1j * rng.uniform(-1, 1, 31)
    energy = []
    for n in (8, 32, 128, 512, 1024):
        tg = build_time_grid(1.0, n)
        h = march_fdm(params, sg, tg, ZERO, phi, "general_ic")
        energy.append(tg.tau * np.sum(np.max(np.abs(h.snapshots[1:]), axis=1) ** 2))
    assert max(energy) <= np.max(np.abs(phi)) ** 2
    assert energy[-1] <= 1.05 * energy[-2]


def test_plain_grunwald_solver(rng):
    # lam = 0, p = 0: the scheme is the plain Grunwald subdiffusion solver
    gamma, n_count, m = 0.6, 12, 9
    params = ModelParams(gamma, 0.0, 0.7, 0.0)
    sg, tg = build_space_grid(0, 1, m), build_time_grid(1.0, n_count)
    f = lambda x, t: np.sin(3 * x) * (1 + t) + 1j * x * t
    hist = march_fdm(params, sg, tg, f)
    tau, h = tg.tau, sg.h
    g = grunwald(gamma, n_count)
    lap = (np.diag(np.full(m - 2, 1.0), -1) - 2 * np.eye(m - 1) + np.diag(np.full(m - 2, 1.0), 1)) / h**2
    a = np.eye(m - 1) / tau**gamma - 0.7 * lap
    ref = np.zeros((n_count + 1, m - 1), dtype=complex)
    for n in range(1, n_count + 1):
        hist_term = sum(g[k] * ref[n - k] for k in range(1, n + 1)) / tau**gamma
        ref[n] = dense_solve_oracle(a, f(sg.interior, n * tau) - hist_term)
    assert np.max(np.abs(hist.snapshots - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_bad_variant():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    with pytest.raises(ValueError):
        march_fdm(params, build_space_grid(0, 1, 4), build_time_grid(1.0, 2), ZERO, variant="x")
