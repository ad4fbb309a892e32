import numpy as np
import pytest

from starkchain import (
    BiorthogonalError,
    Boundary,
    ModelParams,
    average_fractal_dimension,
    biorthogonal_eigendecomposition,
    build_hamiltonian,
    fractal_dimension,
    hermitize_similarity,
    phase_boundaries,
)


def test_hermitian_matrix_left_equals_right():
    H = build_hamiltonian(ModelParams(0.0, 0.3, 10))
    spec = biorthogonal_eigendecomposition(H)
    assert np.max(np.abs(spec.eigenvalues.imag)) < 1e-10
    overlap = np.abs(np.einsum("ij,ij->j", spec.left_vectors.conj(), spec.right_vectors))
    assert np.allclose(overlap, 1.0, atol=1e-8)
    # left and right columns agree up to the biorthogonal rescaling phase
    for k in range(10):
        l, r = spec.left_vectors[:, k], spec.right_vectors[:, k]
        assert np.max(np.abs(l - (l @ r.conj()) / np.vdot(r, r) * r)) < 1e-8


def test_two_site_analytic_eigenvalues():
    H = np.array([[0.0, -0.5], [-1.5, 0.0]])
    spec = biorthogonal_eigendecomposition(H)
    assert np.allclose(spec.eigenvalues, [-np.sqrt(0.75), np.sqrt(0.75)], atol=1e-12)
    assert spec.eigenvalues[1] == pytest.approx(0.866025, abs=1e-6)


def test_biorthonormality_and_residuals_nonreciprocal():
    H = build_hamiltonian(ModelParams(-0.5, 0.5, 24))
    spec = biorthogonal_eigendecomposition(H)
    gram = spec.left_vectors.conj().T @ spec.right_vectors
    assert np.max(np.abs(gram - np.eye(24))) < 1e-8
    resid = H.matrix @ spec.right_vectors - spec.right_vectors * spec.eigenvalues
    assert np.max(np.abs(resid)) < 1e-8 * np.linalg.norm(H.matrix)


def test_reconstruction_rebuilds_hamiltonian():
    H = build_hamiltonian(ModelParams(0.4, 1.2, 16, Boundary.PERIODIC))
    spec = biorthogonal_eigendecomposition(H)
    assert np.max(np.abs(spec.reconstruct() - H.matrix)) < 1e-8 * np.linalg.norm(H.matrix)


def test_eigenvalues_sorted_deterministically():
    H = build_hamiltonian(ModelParams(-0.3, 0.2, 12, Boundary.PERIODIC))
    w = biorthogonal_eigendecomposition(H).eigenvalues
    key = np.lexsort((w.imag, w.real))
    assert np.array_equal(key, np.arange(12))


def test_open_chain_spectrum_real_for_any_tilt():
    for delta in (0.05, 0.15, 1.0):
        H = build_hamiltonian(ModelParams(-0.5, delta, 32))
        w = np.linalg.eigvals(H.matrix)
        assert np.max(np.abs(w.imag)) < 1e-8


def test_near_defective_raises_with_overlap_message():
    H = build_hamiltonian(ModelParams(-0.5, 0.001, 96))
    with pytest.raises(BiorthogonalError, match="overlap"):
        biorthogonal_eigendecomposition(H)


def test_hermitize_gamma_zero_is_identity_transform():
    H = build_hamiltonian(ModelParams(0.0, 0.4, 8))
    M, g = hermitize_similarity(H)
    assert g == 0.0
    assert np.allclose(M, H.matrix.real)


def test_hermitize_gauge_value():
    H = build_hamiltonian(ModelParams(-0.5, 0.0, 8))
    M, g = hermitize_similarity(H)
    assert g == pytest.approx(0.5 * np.log(1.0 / 3.0), abs=1e-12)
    assert g == pytest.approx(-0.549306, abs=1e-6)
    assert np.allclose(np.abs(np.diagonal(M, 1)), np.sqrt(0.75))
    # negative hoppings keep their sign so the gamma = 0 limit is the identity
    assert np.all(np.diagonal(M, 1) < 0)


def test_hermitize_preserves_spectrum():
    H = build_hamiltonian(ModelParams(-0.5, 0.15, 64))
    M, _ = hermitize_similarity(H)
    w_direct = np.sort(np.linalg.eigvals(H.matrix).real)
    w_herm = np.linalg.eigvalsh(M)
    assert np.max(np.abs(w_direct - w_herm)) < 1e-8


def test_hermitize_gauge_transform_is_explicit_similarity():
    # S^{-1} H S with S = diag(e^{j g}) reproduces the symmetric matrix
    H = build_hamiltonian(ModelParams(0.3, 0.7, 6))
    M, g = hermitize_similarity(H)
    S = np.diag(np.exp(np.arange(1, 7) * g))
    assert np.allclose(np.linalg.inv(S) @ H.matrix @ S, M, atol=1e-12)


def test_hermitize_rejects_strong_nonreciprocity_and_periodic():
    with pytest.raises(ValueError, match="gauge"):
        hermitize_similarity(build_hamiltonian(ModelParams(1.0, 0.1, 8)))
    with pytest.raises(ValueError, match="open"):
        hermitize_similarity(build_hamiltonian(ModelParams(0.5, 0.1, 8, Boundary.PERIODIC)))


def test_fractal_dimension_limits():
    L = 64
    uniform = np.full(L, 1.0 / np.sqrt(L))
    assert fractal_dimension(uniform) == pytest.approx(1.0, abs=1e-12)
    point = np.zeros(L)
    point[17] = 1.0
    assert fractal_dimension(point) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="zero"):
        fractal_dimension(np.zeros(8))


def test_fractal_dimension_exponential_profile_oracle():
    L = 128
    j = np.arange(1, L + 1)
    psi = np.exp(-np.abs(j - L / 2) / 4.0)
    # independent arithmetic: normalize and sum fourth powers directly
    p = psi**2 / np.sum(psi**2)
    gamma_expected = -np.log(np.sum(p**2)) / np.log(L)
    assert fractal_dimension(psi) == pytest.approx(gamma_expected, abs=1e-12)
    assert 0.0 < gamma_expected < 1.0


def test_fractal_dimension_internal_normalization():
    rng = np.random.default_rng(2)
    v = rng.normal(size=32) + 1j * rng.normal(size=32)
    assert fractal_dimension(3.7 * v) == pytest.approx(fractal_dimension(v), abs=1e-12)


def test_average_fractal_dimension_plane_wave_ring():
    H = build_hamiltonian(ModelParams(0.0, 0.0, 128, Boundary.PERIODIC))
    assert average_fractal_dimension(H) >= 0.8


def test_average_fractal_dimension_deep_tilt_localized():
    H = build_hamiltonian(ModelParams(-0.5, 20.0, 128))
    assert average_fractal_dimension(H) < 0.2


def test_average_fractal_dimension_bounded_and_mirror_symmetric():
    for gamma, delta, bc in [(-0.5, 1.0, Boundary.OPEN), (0.3, 0.0, Boundary.PERIODIC)]:
        H = build_hamiltonian(ModelParams(gamma, delta, 48, bc))
        g = average_fractal_dimension(H)
        assert -1e-8 <= g <= 1.0 + 1e-8
    # at delta = 0 the skin effect of +gamma mirrors that of -gamma exactly
    g_plus = average_fractal_dimension(build_hamiltonian(ModelParams(0.5, 0.0, 48)))
    g_minus = average_fractal_dimension(build_hamiltonian(ModelParams(-0.5, 0.0, 48)))
    assert g_plus == pytest.approx(g_minus, abs=1e-8)


def test_phase_boundaries_reference_values():
    pb = phase_boundaries(-0.5, 320)
    assert abs(pb.g) == pytest.approx(0.5 * np.log(3.0), abs=1e-12)
    assert pb.delta_ii == pytest.approx(2.0 * np.sqrt(3.0), abs=1e-12)
    assert pb.delta_i == pytest.approx(2.0 * np.e * np.sqrt(3.0) / 320, abs=1e-12)
    assert pb.delta_i == pytest.approx(0.029424, abs=5e-6)
    assert pb.gauge_ratio == pytest.approx(np.exp(pb.g), abs=1e-12)


def test_phase_boundaries_gamma_zero():
    pb = phase_boundaries(0.0, 100)
    assert pb.g == 0.0
    assert pb.delta_ii == pytest.approx(2.0)
    assert pb.delta_i == pytest.approx(2.0 * np.e / 100)


def test_phase_boundaries_size_scaling():
    a = phase_boundaries(-0.4, 64)
    b = phase_boundaries(-0.4, 128)
    assert b.delta_i == pytest.approx(a.delta_i / 2, rel=1e-12)
    assert b.delta_ii == a.delta_ii
    assert 0 < a.delta_i < a.delta_ii


def test_phase_boundaries_rejects_unit_gamma():
    with pytest.raises(ValueError, match="gamma"):
        phase_boundaries(1.0, 64)
