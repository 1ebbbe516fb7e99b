import numpy as np
import pytest
import scipy.linalg

import twospeed as ts
from twospeed.errors import ConfigurationError, NumericalError
from twospeed.generator import symmetrized
from twospeed.spectral import mean_zero_basis, restricted_operator


def _gt_targets(kmax):
    """Closed-form continuum eigenvalues from the per-mode 2x2 blocks."""
    vals = [0.0 + 0.0j, -2.0 + 0.0j]
    for k in range(1, kmax + 1):
        omega = np.sqrt(4.0 * np.pi**2 * k**2 - 1.0)
        vals += [-1.0 + 1j * omega, -1.0 - 1j * omega]
    return np.array(vals)


def test_spectrum_zero_mode_and_stability(gen_gt_128):
    rep = ts.spectrum(gen_gt_128)
    scale = gen_gt_128.operator_scale()
    assert (np.abs(rep.eigenvalues) <= 1e-8 * scale).sum() == 1
    assert rep.eigenvalues.real.max() <= 1e-8 * scale
    assert len(rep.nonneg_violations) == 0
    assert rep.x0_abscissa < -0.5


def test_zero_mode_vector_aligned_with_steady(gen_gt_128):
    rep = ts.spectrum(gen_gt_128)
    v = gen_gt_128.steady / np.linalg.norm(gen_gt_128.steady)
    cosine = np.abs(np.vdot(rep.zero_mode_vector, v))
    assert np.arccos(min(cosine, 1.0)) < 1e-6


def test_eigenvalues_follow_upwind_law(gen_gt_128):
    # Known first-order behaviour: mode k picks up a real-part shift of
    # (1 - cos(2 pi k h)) / h next to the continuum block value.
    rep = ts.spectrum(gen_gt_128)
    h = gen_gt_128.grid.h
    for k in range(1, 6):
        target = -1.0 + 1j * np.sqrt(4.0 * np.pi**2 * k**2 - 1.0)
        err = np.abs(rep.eigenvalues - target).min()
        law = (1.0 - np.cos(2.0 * np.pi * k * h)) / h
        assert err == pytest.approx(law, rel=0.15)


def test_eigenvalue_error_is_first_order(gt_fields):
    target = -1.0 + 1j * np.sqrt(4.0 * np.pi**2 - 1.0)
    errs = {}
    for n in (64, 128):
        rep = ts.spectrum(ts.assemble(*gt_fields, ts.Grid(n)))
        errs[n] = np.abs(rep.eigenvalues - target).min()
    assert errs[64] / errs[128] == pytest.approx(2.0, rel=0.15)


def test_similarity_preserves_spectrum(gen_variant_64):
    direct = np.sort_complex(scipy.linalg.eigvals(gen_variant_64.matrix))
    transformed = np.sort_complex(scipy.linalg.eigvals(symmetrized(gen_variant_64)))
    assert np.abs(direct - transformed).max() < 1e-8 * gen_variant_64.operator_scale()


def test_variant_spectrum_in_left_half_plane(gen_variant_128):
    rep = ts.spectrum(gen_variant_128)
    scale = gen_variant_128.operator_scale()
    assert rep.eigenvalues.real.max() <= 1e-8 * scale
    assert (np.abs(rep.eigenvalues) <= 1e-8 * scale).sum() == 1


def test_dense_cap_enforced(gen_gt_64):
    with pytest.raises(NumericalError):
        ts.spectrum(gen_gt_64, dense_cap=16)


def test_mean_zero_basis_is_orthonormal_and_invariant(gen_variant_64):
    q = mean_zero_basis(gen_variant_64)
    m = gen_variant_64.size
    assert q.shape == (m, m - 1)
    assert np.abs(q.T @ q - np.eye(m - 1)).max() < 1e-12
    z0 = np.sqrt(gen_variant_64.grid.h * gen_variant_64.steady)
    # the deflated direction is a left null vector, so S maps the
    # complement into itself
    s = symmetrized(gen_variant_64)
    assert np.abs(z0 @ s).max() < 1e-10


def test_sigma_min_bounded_by_eigenvalues(gen_gt_64):
    # Applying (A - i lambda) to a unit eigenvector bounds the smallest
    # singular value by |Re mu| at lambda = Im mu.
    s0 = restricted_operator(gen_gt_64)
    vals = scipy.linalg.eigvals(s0)
    eye = np.eye(s0.shape[0])
    for mu in vals[np.argsort(np.abs(vals))[:6]]:
        smin = scipy.linalg.svdvals(s0 - 1j * mu.imag * eye)[-1]
        assert smin <= abs(mu.real) + 1e-8


def test_psi_sweep_goldstein_taylor(gen_gt_128):
    est = ts.psi_sweep(gen_gt_128, coarse_points=128, refine_depth=30)
    rep = ts.spectrum(gen_gt_128)
    assert 0.0 < est.psi_hat <= abs(rep.x0_abscissa) + 1e-9
    assert est.psi_hat == pytest.approx(1.0, abs=0.25)  # gap 1 + O(h)
    assert est.sigma_min_values.min() > 0.0
    assert not est.warnings


def test_psi_sweep_mirror_symmetry(gen_gt_64):
    s0 = restricted_operator(gen_gt_64)
    eye = np.eye(s0.shape[0])
    for lam in (0.7, 3.3, 12.0):
        plus = scipy.linalg.svdvals(s0 - 1j * lam * eye)[-1]
        minus = scipy.linalg.svdvals(s0 + 1j * lam * eye)[-1]
        assert plus == pytest.approx(minus, abs=1e-11)


def test_psi_sweep_warns_on_short_sweep(gen_gt_64):
    est = ts.psi_sweep(gen_gt_64, lambda_max=1.0, coarse_points=16, refine_depth=5)
    assert est.warnings


def test_psi_sweep_validates_arguments(gen_gt_64):
    with pytest.raises(ConfigurationError):
        ts.psi_sweep(gen_gt_64, lambda_max=-1.0)
    with pytest.raises(ConfigurationError):
        ts.psi_sweep(gen_gt_64, coarse_points=8)


def test_degenerate_gap_closes_under_refinement(gt_fields):
    b1, _, sigma = gt_fields
    psis = {}
    for n in (64, 128):
        gen = ts.assemble(b1, b1, sigma, ts.Grid(n))
        psis[n] = ts.psi_sweep(gen, lambda_max=40.0, coarse_points=64, refine_depth=25).psi_hat
    assert psis[128] < psis[64]
    assert psis[64] / psis[128] == pytest.approx(2.0, rel=0.2)


def test_semigroup_bound_and_contraction(gen_gt_128):
    est = ts.psi_sweep(gen_gt_128, coarse_points=128, refine_depth=30)
    report = ts.semigroup_bound_check(gen_gt_128, est, [0.0, 1.0, 2.0, 4.0])
    assert report.passed
    assert report.norms[0] == pytest.approx(1.0, abs=1e-10)
    assert report.norms[0] <= np.exp(np.pi / 2)
    assert (np.diff(report.norms) <= 1e-12).all()
    assert (report.margins > 0.0).all()


def test_semigroup_t_grid_validation(gen_gt_64):
    est = ts.psi_sweep(gen_gt_64, lambda_max=20.0, coarse_points=16, refine_depth=5)
    with pytest.raises(ConfigurationError):
        ts.semigroup_bound_check(gen_gt_64, est, [2.0, 1.0])


def test_consistency_triangle(gen_variant_128):
    est = ts.psi_sweep(gen_variant_128, coarse_points=128, refine_depth=30)
    rep = ts.spectrum(gen_variant_128)
    series = ts.evolve(
        gen_variant_128,
        ts.steady_plus_mode(gen_variant_128, 1, 0.01),
        T=8.0, dt=1e-3, observe_every=10,
    )
    fit = ts.estimate_decay(series)
    assert fit.alpha_hat >= est.psi_hat - 0.05
    assert abs(rep.x0_abscissa) >= est.psi_hat - 1e-6
    envelope = np.exp(np.pi / 2 - est.psi_hat * series.times) * series.deviation[0]
    assert (series.deviation <= envelope).all()
