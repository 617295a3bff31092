import numpy as np
import pytest

from src.models.models import CausalClass, ELParams, Tolerances
from src.services.cfs_core import (
    DiscreteCFS,
    ProductSpectrum,
    SpinSignature,
    WaveEval,
    action,
    boundedness_integrand,
    causal_matrix,
    classify,
    closed_chain,
    dense_operator,
    el_function,
    el_residuals,
    fit_volume_multiplier,
    is_regular,
    kernel,
    lagrangian,
    pair_spectra,
    point_from_psi,
    point_from_wave_eval,
    product_spectrum,
    random_psi,
    signature_counts,
    spin_adjoint,
    spin_projection,
)
from src.services.scheduler import WorkScheduler
from src.utils.errors import StructuralError


def _nonzero_product_eigs(x, y, count):
    values = np.linalg.eigvals(dense_operator(x) @ dense_operator(y))
    return values[np.argsort(-np.abs(values))][:count]


def _match_multisets(a, b, rel):
    a = list(np.asarray(a, dtype=complex))
    scale = max(float(np.max(np.abs(b))), 1e-300)
    for value in b:
        index = int(np.argmin([abs(value - other) for other in a]))
        assert abs(a[index] - value) <= rel * scale
        a.pop(index)


# --- construction ----------------------------------------------------------------------


def test_zero_psi_gives_zero_operator():
    point = point_from_psi(np.zeros((4, 6)), 2)
    assert np.array_equal(dense_operator(point), np.zeros((6, 6)))
    assert signature_counts(point) == (0, 0)
    assert not is_regular(point)


def test_identity_psi_gives_minus_s():
    n = 2
    point = point_from_psi(np.eye(2 * n), n)
    s = SpinSignature(n).matrix
    assert np.allclose(dense_operator(point), -s)
    eigenvalues = sorted(np.linalg.eigvalsh(dense_operator(point)))
    assert eigenvalues == pytest.approx([-1.0, -1.0, 1.0, 1.0])
    assert is_regular(point)
    assert point.trace() == 0.0


def test_random_point_matches_triple_product(rng):
    psi = random_psi(rng, 2, 8)
    point = point_from_psi(psi, 2)
    s = SpinSignature(2).matrix
    direct = -(psi.conj().T @ s @ psi)
    assert np.allclose(dense_operator(point), direct, atol=1e-12)
    assert point.trace() == pytest.approx(np.trace(direct).real)
    assert signature_counts(point) == (2, 2)


def test_wave_eval_validation():
    with pytest.raises(StructuralError):
        WaveEval(psi=np.zeros((3, 4)))
    with pytest.raises(StructuralError):
        WaveEval(psi=np.full((2, 2), np.nan))
    with pytest.raises(StructuralError):
        point_from_wave_eval(WaveEval(psi=np.zeros((4, 2))), SpinSignature(1))
    with pytest.raises(StructuralError):
        SpinSignature(0)


def test_discrete_cfs_validation(rng):
    p = point_from_psi(random_psi(rng, 1, 3), 1)
    q = point_from_psi(random_psi(rng, 1, 4), 1)
    with pytest.raises(StructuralError):
        DiscreteCFS(points=(), weights=np.array([]))
    with pytest.raises(StructuralError):
        DiscreteCFS(points=(p,), weights=np.array([0.0]))
    with pytest.raises(StructuralError):
        DiscreteCFS(points=(p, q), weights=np.array([1.0, 1.0]))
    cfs = DiscreteCFS(points=(p,), weights=np.array([1.0]))
    with pytest.raises(StructuralError):
        cfs.check_index(1)


# --- kernel and spectra ---------------------------------------------------------------


def test_kernel_at_identity_point_is_s_up_to_sign():
    point = point_from_psi(np.eye(4), 2)
    s = SpinSignature(2).matrix
    assert np.allclose(np.abs(kernel(point, point)), np.abs(s))
    assert np.allclose(kernel(point, point), -s)


def test_kernel_matches_explicit_column_sum(rng):
    n, N = 2, 5
    x = point_from_psi(random_psi(rng, n, N), n)
    y = point_from_psi(random_psi(rng, n, N), n)
    s = SpinSignature(n).matrix
    explicit = sum(-np.outer(x.psi[:, i], y.psi[:, i].conj()) @ s for i in range(N))
    assert np.allclose(kernel(x, y), explicit, atol=1e-12)


def test_kernel_spin_adjoint_symmetry(make_cfs):
    cfs = make_cfs(n=3, N=9, n_points=3)
    for x in cfs.points:
        for y in cfs.points:
            assert np.allclose(spin_adjoint(kernel(x, y), x.sig), kernel(y, x), atol=1e-12)


def test_identity_point_paired_with_itself_has_unit_spectrum():
    point = point_from_psi(np.eye(2), 1)
    spec = product_spectrum(point, point)
    assert np.allclose(spec.lambdas, [1.0, 1.0])
    assert np.allclose(closed_chain(point, point), np.eye(2))
    assert classify(spec) is CausalClass.SPACELIKE


def test_self_pair_squares_dense_eigenvalues():
    # dense eigenvalues {nu1, -nu2} with nu1 = 3, nu2 = 2
    psi = np.diag([np.sqrt(2.0), np.sqrt(3.0)]).astype(complex)
    point = point_from_psi(psi, 1)
    assert sorted(np.linalg.eigvalsh(dense_operator(point))) == pytest.approx([-2.0, 3.0])
    spec = product_spectrum(point, point)
    assert np.allclose(sorted(spec.lambdas.real), [4.0, 9.0])
    assert np.allclose(spec.lambdas.imag, 0.0)


def test_isospectrality_against_dense_product(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        N = int(rng.integers(2 * n, 13))
        x = point_from_psi(random_psi(rng, n, N), n)
        y = point_from_psi(random_psi(rng, n, N), n)
        spec = product_spectrum(x, y)
        _match_multisets(_nonzero_product_eigs(x, y, 2 * n), spec.lambdas, 1e-9)


def test_low_rank_pair_matches_dense_product(rng):
    n, N = 2, 10
    x = point_from_psi(random_psi(rng, n, N, rank=2), n)
    y = point_from_psi(random_psi(rng, n, N), n)
    spec = product_spectrum(x, y)
    nonzero = spec.lambdas[np.abs(spec.lambdas) > 1e-9 * np.abs(spec.lambdas).max()]
    assert nonzero.size == 2
    _match_multisets(_nonzero_product_eigs(x, y, 2), nonzero, 1e-9)


def test_conjugate_pairing_and_classification_symmetry(make_cfs):
    cfs = make_cfs(n=2, N=7, n_points=4)
    spectra = pair_spectra(cfs)
    for i in range(len(cfs)):
        for j in range(len(cfs)):
            _match_multisets(spectra[j][i].lambdas, spectra[i][j].lambdas.conj(), 1e-9)
            assert classify(spectra[i][j]) is classify(spectra[j][i])


def test_spectrum_ordering_is_by_modulus():
    spec = product_spectrum(
        point_from_psi(np.diag([1.0, 2.0, 0.5, 1.5]).astype(complex), 2),
        point_from_psi(np.eye(4), 2),
    )
    assert list(spec.moduli) == sorted(spec.moduli)


# --- classification and Lagrangian ------------------------------------------------------


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        ([1, -1, 1j, -1j], CausalClass.SPACELIKE),
        ([4, 1, 1, 4], CausalClass.TIMELIKE),
        ([2, 1j, 0, 0], CausalClass.LIGHTLIKE),
        ([1, 1, -1, -1], CausalClass.SPACELIKE),
        ([0, 0], CausalClass.SPACELIKE),
    ],
)
def test_classify_examples(values, expected):
    assert classify(ProductSpectrum.of(values)) is expected


def test_classify_tolerance_is_relative():
    spec = ProductSpectrum.of([1e6, 1e6 * (1 + 1e-12)])
    assert classify(spec) is CausalClass.SPACELIKE
    spec = ProductSpectrum.of([1e6, 1e6 * (1 + 1e-6)])
    assert classify(spec) is CausalClass.TIMELIKE
    assert classify(spec, Tolerances(rel_eq=1e-5)) is CausalClass.SPACELIKE


@pytest.mark.parametrize(
    ("values", "n", "expected"),
    [
        ([1, -1, 1j, -1j], 2, 0.0),
        ([2, 0], 1, 2.0),
        ([4, 1, 1, 4], 2, 9.0),
    ],
)
def test_lagrangian_examples(values, n, expected):
    assert lagrangian(ProductSpectrum.of(values), n) == pytest.approx(expected)


def test_lagrangian_depends_on_moduli_only():
    base = lagrangian(ProductSpectrum.of([3, 1, 2, 0.5]), 2)
    permuted = lagrangian(ProductSpectrum.of([0.5, 2, 1, 3]), 2)
    rotated = lagrangian(ProductSpectrum.of([3j, -1, 2, 0.5j]), 2)
    assert base == pytest.approx(permuted)
    assert base == pytest.approx(rotated)


def test_scaling_of_points(rng):
    n, N, c = 2, 6, 1.7
    psi_x, psi_y = random_psi(rng, n, N), random_psi(rng, n, N)
    x, y = point_from_psi(psi_x, n), point_from_psi(psi_y, n)
    # x -> c x corresponds to psi -> sqrt(c) psi
    cx, cy = point_from_psi(np.sqrt(c) * psi_x, n), point_from_psi(np.sqrt(c) * psi_y, n)
    spec, scaled = product_spectrum(x, y), product_spectrum(cx, cy)
    _match_multisets(scaled.lambdas, c * c * spec.lambdas, 1e-9)
    assert classify(scaled) is classify(spec)
    assert lagrangian(scaled) == pytest.approx(c**4 * lagrangian(spec), rel=1e-9)


@pytest.mark.parametrize(
    ("values", "expected"),
    [([0, 0], 0.0), ([2, 0], 4.0), ([4, 1, 1, 4], 100.0)],
)
def test_boundedness_integrand_examples(values, expected):
    assert boundedness_integrand(ProductSpectrum.of(values)) == pytest.approx(expected)


# --- functionals ---------------------------------------------------------------------------


def test_single_spacelike_point_has_zero_action():
    # dense eigenvalues {1, -1}: the self spectrum {1, 1} is spacelike
    point = point_from_psi(np.eye(2), 1)
    cfs = DiscreteCFS(points=(point,), weights=np.array([1.0]))
    report = action(cfs)
    assert report.action == 0.0
    assert report.volume == 1.0
    assert el_function(cfs, 0, ELParams()) == 0.0


def test_action_matches_brute_force_double_sum(make_cfs):
    cfs = make_cfs(n=2, N=5, n_points=3)
    expected_action, expected_bound = 0.0, 0.0
    for i, x in enumerate(cfs.points):
        for j, y in enumerate(cfs.points):
            spec = product_spectrum(x, y)
            ww = cfs.weights[i] * cfs.weights[j]
            expected_action += ww * lagrangian(spec, cfs.n, cfs.tol)
            expected_bound += ww * boundedness_integrand(spec)
    report = action(cfs)
    assert report.action == pytest.approx(expected_action, rel=1e-12)
    assert report.boundedness == pytest.approx(expected_bound, rel=1e-12)
    assert report.volume == pytest.approx(cfs.weights.sum())
    expected_trace = sum(w * p.trace() for w, p in zip(cfs.weights, cfs.points))
    assert report.trace == pytest.approx(expected_trace)


def test_action_bilinear_in_weights(make_cfs):
    cfs = make_cfs(n=1, N=4, n_points=3)
    scaled = cfs.with_weights(2.0 * cfs.weights)
    base, doubled = action(cfs), action(scaled)
    assert doubled.action == pytest.approx(4.0 * base.action, rel=1e-12)
    assert doubled.volume == pytest.approx(2.0 * base.volume, rel=1e-12)


def test_action_is_independent_of_thread_count(make_cfs):
    cfs = make_cfs(n=2, N=6, n_points=5)
    serial = action(cfs)
    with WorkScheduler(3) as scheduler:
        threaded = action(cfs, scheduler=scheduler)
    assert serial == threaded


def test_el_function_matches_hand_expansion(make_cfs):
    cfs = make_cfs(n=1, N=3, n_points=2)
    params = ELParams(kappa=0.3, r_tr=0.2, s_vol=0.1)
    spectra = pair_spectra(cfs)
    expected = sum(
        cfs.weights[j]
        * (lagrangian(spectra[0][j], 1, cfs.tol) + 0.3 * boundedness_integrand(spectra[0][j]))
        for j in range(2)
    )
    expected -= 0.2 * cfs.points[0].trace() + 0.1
    assert el_function(cfs, 0, params) == pytest.approx(expected, rel=1e-12)


def test_el_offset_zeroes_one_point(make_cfs):
    cfs = make_cfs(n=2, N=6, n_points=3)
    value = el_function(cfs, 1, ELParams())
    assert el_function(cfs, 1, ELParams(s_vol=value)) == pytest.approx(0.0, abs=1e-12)


def test_fitted_volume_multiplier_zeroes_weighted_mean(make_cfs):
    cfs = make_cfs(n=2, N=6, n_points=4)
    params = ELParams(kappa=0.1)
    s_vol = fit_volume_multiplier(cfs, params)
    residuals = el_residuals(cfs, ELParams(kappa=0.1, s_vol=s_vol))
    assert np.dot(cfs.weights, residuals) == pytest.approx(0.0, abs=1e-9 * abs(s_vol))


def test_causal_matrix_is_symmetric(make_cfs):
    cfs = make_cfs(n=2, N=4, n_points=4)
    table = causal_matrix(cfs)
    for i in range(len(cfs)):
        for j in range(len(cfs)):
            assert table[i][j] is table[j][i]


# --- spin projection -----------------------------------------------------------------------


def test_spin_projection_cases(rng):
    zero = point_from_psi(np.zeros((4, 6)), 2)
    assert np.array_equal(spin_projection(zero), np.zeros((6, 6)))

    full = point_from_psi(np.eye(4) + 0.1 * random_psi(rng, 2, 4), 2)
    assert np.allclose(spin_projection(full), np.eye(4), atol=1e-10)

    low = point_from_psi(random_psi(rng, 2, 10, rank=4), 2)
    pi = spin_projection(low)
    assert np.allclose(pi @ pi, pi, atol=1e-10)
    assert np.trace(pi).real == pytest.approx(4.0)
    assert np.allclose(pi, pi.conj().T)


def test_rank_deficient_point_is_not_regular(rng):
    point = point_from_psi(random_psi(rng, 2, 8, rank=3), 2)
    # rows 0, 1 carry S = +1 and give negative eigenvalues of x = -psi^dagger S psi
    assert signature_counts(point) == (1, 2)
    assert not is_regular(point)
