import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from scipy.special import zeta as scipy_zeta

from treecount.dimension import (
    _curvature_bounds,
    T_deriv,
    T_map,
    TransferConfig,
    apply_operator,
    bisect_certified_threshold,
    centered_coefficients,
    certificate_curve,
    certify_lower,
    certify_upper,
    chebyshev_nodes,
    dimension_estimate,
    eigenvalue_at,
    fractal_circles,
    hurwitz_zeta,
    lagrange_basis,
    operator_tail,
    pressure_estimate,
    scalar_fit,
    transfer_matrix,
    zaremba_deriv,
    zaremba_map,
)
from treecount.errors import BudgetExceeded, CertificationFailed, DomainError
from treecount.monitoring import REFERENCE_EIGENVECTOR, REFERENCE_LOWER_COEFFS, REFERENCE_UPPER_COEFFS

GOLDEN = (1 + math.sqrt(5)) / 2
GRID = 10_000


def compose(word, x):
    for b in reversed(word):
        x = T_map(b, x)
    return x


def test_branch_maps():
    assert T_map(1, 0.0) == pytest.approx(0.5)
    assert T_map(1, 1.0) == pytest.approx(2 / 3)
    assert T_map(4, 0.0) == pytest.approx(0.8)
    h = 1e-6
    for b in (1, 3, 10):
        for x in (0.0, 0.4, 0.9):
            numeric = (T_map(b, x + h) - T_map(b, x - h)) / (2 * h)
            assert T_deriv(b, x) == pytest.approx(numeric, rel=1e-6)


def test_zaremba_maps():
    assert zaremba_map(1, 0.0) == pytest.approx(1.0)
    assert zaremba_map(2, 0.5) == pytest.approx(0.4)
    h = 1e-6
    for a in (1, 2, 5):
        numeric = (zaremba_map(a, 0.3 + h) - zaremba_map(a, 0.3 - h)) / (2 * h)
        assert zaremba_deriv(a, 0.3) == pytest.approx(abs(numeric), rel=1e-6)


def test_chebyshev_nodes():
    nodes = chebyshev_nodes(5)
    assert nodes.shape == (5,)
    assert np.all(np.diff(nodes) < 0)
    assert np.all((nodes > 0) & (nodes < 1))
    assert nodes[2] == pytest.approx(0.5)


def test_lagrange_basis_is_cardinal():
    nodes = chebyshev_nodes(6)
    basis = lagrange_basis(nodes)
    values = np.array([ell(nodes) for ell in basis])
    np.testing.assert_allclose(values, np.eye(6), atol=1e-12)


def test_centered_coefficients():
    # x^2 = (x-1)^2 + 2(x-1) + 1
    np.testing.assert_allclose(centered_coefficients([0.0, 0.0, 1.0]), [1.0, 2.0, 1.0], atol=1e-14)


def test_hurwitz_zeta_basel():
    assert hurwitz_zeta(2.0, 1.0) == pytest.approx(math.pi**2 / 6, abs=1e-12)


@pytest.mark.parametrize("s", [1.6, 2.5, 4.0, 7.3])
def test_hurwitz_zeta_matches_scipy(s):
    xs = np.array([1.0, 2.5, 10.0, 117.0])
    np.testing.assert_allclose(hurwitz_zeta(s, xs), scipy_zeta(s, xs), rtol=1e-10)


@pytest.mark.parametrize("s, x", [(1.5, 2.0), (1.2, 2.0), (2.0, 0.5)])
def test_hurwitz_zeta_domain(s, x):
    with pytest.raises(DomainError):
        hurwitz_zeta(s, x)


def test_operator_on_constants():
    cfg = TransferConfig(5, 0.6)
    x = 0.3
    expected = sum((1 + b + x) ** (-1.2) for b in range(1, 6))
    assert apply_operator(cfg, [1.0], x) == pytest.approx(expected, rel=1e-13)


def test_full_alphabet_operator_on_constants():
    cfg = TransferConfig(None, 0.8)
    xs = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(apply_operator(cfg, [1.0], xs), scipy_zeta(1.6, xs + 2.0), rtol=1e-10)


def test_full_alphabet_splits_into_head_and_tail():
    A = 10_000
    poly = Polynomial([0.52, -0.22, 0.11, -0.05, 0.012])
    xs = np.linspace(0.0, 1.0, 7)
    full = apply_operator(TransferConfig(None, 0.79), poly, xs)
    head = apply_operator(TransferConfig(A, 0.79), poly, xs)
    tail = operator_tail(TransferConfig(None, 0.79), poly, xs, A)
    np.testing.assert_allclose(full, head + tail, atol=1e-9)


def test_full_alphabet_diverges_at_half():
    with pytest.raises(DomainError):
        apply_operator(TransferConfig(None, 0.5), [1.0], 0.2)


def test_lower_110_eigenvector(lower_110):
    poly = lower_110.poly
    np.testing.assert_allclose(poly.eigenvector, REFERENCE_EIGENVECTOR, atol=1e-4)
    np.testing.assert_allclose(poly.coeffs, REFERENCE_LOWER_COEFFS, atol=1e-4)
    assert np.linalg.norm(poly.eigenvector) == pytest.approx(1.0)
    _, residual = scalar_fit(poly.eigenvector, REFERENCE_EIGENVECTOR)
    assert residual < 1e-3


def test_lower_110_matches_dense_eigensolver(lower_110):
    M, _, _ = transfer_matrix(TransferConfig(110, 0.775, 5))
    values, vectors = np.linalg.eig(M.T)
    k = int(np.argmax(values.real))
    v = np.real(vectors[:, k])
    v = v / np.linalg.norm(v)
    if v.sum() < 0:
        v = -v
    np.testing.assert_allclose(lower_110.poly.eigenvector, v, atol=1e-8)
    assert lower_110.poly.eigenvalue == pytest.approx(values[k].real, rel=1e-10)


def test_lower_110_certificate(lower_110):
    assert lower_110.certified
    assert lower_110.kind == "lower"
    assert lower_110.margin > 7e-5
    assert lower_110.min_f > 0.3
    assert lower_110.verification["method"] == "grid+curvature"


@pytest.mark.parametrize("order", [5, 10, 20])
def test_lower_100_fails(order):
    with pytest.raises(CertificationFailed) as err:
        certify_lower(100, 0.775, order, GRID)
    cert = err.value.certificate
    # a positive test function whose image falls short: the operator contracts at this s
    assert cert.poly.eigenvalue < 1
    assert cert.min_f > 0
    assert cert.margin < 0


@pytest.mark.parametrize("order", [8, 15])
def test_lower_110_at_higher_order(order):
    cert = certify_lower(110, 0.775, order, GRID)
    assert cert.certified
    assert len(cert.poly.cheb_coeffs) == order


def test_lagrange_basis_is_cardinal_at_high_order():
    nodes = chebyshev_nodes(20)
    values = np.array([ell(nodes) for ell in lagrange_basis(nodes)])
    np.testing.assert_allclose(values, np.eye(20), atol=1e-10)


def test_reporting_monomials_match_chebyshev_form(lower_110):
    xs = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(lower_110.poly.polynomial(xs), lower_110.poly(xs), atol=1e-12)


def test_lower_margin_holds_on_finer_grid():
    cert = certify_lower(110, 0.775, 5, 1_000)
    xs = np.linspace(0.0, 1.0, 100_001)
    f = cert.poly(xs)
    diff = apply_operator(TransferConfig(110, 0.775, 5), cert.poly, xs) - f
    assert diff.min() >= cert.margin
    assert f.min() >= cert.min_f


def test_upper_margin_holds_on_finer_grid():
    cert = certify_upper(0.799, 5, 1_000)
    xs = np.linspace(0.0, 1.0, 100_001)
    f = cert.poly(xs)
    diff = apply_operator(TransferConfig(None, 0.799, 5), cert.poly, xs) - f
    assert diff.max() <= cert.margin
    assert f.min() >= cert.min_f


def test_curvature_bound_dominates_second_differences(lower_110):
    cfg = TransferConfig(110, 0.775, 5)
    xs = np.linspace(0.0, 1.0, 2_001)
    h = xs[1] - xs[0]
    g = apply_operator(cfg, lower_110.poly, xs) - lower_110.poly(xs)
    second = (g[2:] - 2 * g[1:-1] + g[:-2]) / h**2
    bound, _, _ = _curvature_bounds(cfg, lower_110.poly.chebyshev, xs[:-1])
    assert np.all(np.abs(second) <= bound[:-1] + 1e-6)


def test_certified_lower_stays_below_certified_upper(lower_110, upper_799):
    assert lower_110.s < upper_799.s
    with pytest.raises(CertificationFailed):
        certify_upper(lower_110.s, 5, GRID)
    with pytest.raises(CertificationFailed):
        certify_lower(110, upper_799.s, 5, GRID)


def test_certificate_curve_signs():
    xs, f, diff = certificate_curve(TransferConfig(110, 0.775, 5), 51)
    assert xs.shape == f.shape == diff.shape == (51,)
    assert f.min() > 0.3
    assert diff.min() > 0
    _, _, upper = certificate_curve(TransferConfig(None, 0.799, 5), 51)
    assert upper.max() < 0
    with pytest.raises(DomainError):
        certificate_curve(TransferConfig(3, 0.5), 1)


def test_failed_certificate_is_attached():
    with pytest.raises(CertificationFailed) as err:
        certify_lower(3, 0.5, 5, GRID)
    assert err.value.certificate is not None
    assert err.value.certificate.margin <= 0
    assert err.value.best_margin < 0


def test_four_letters_exceed_half():
    cert = certify_lower(4, 0.5, 5, GRID)
    assert cert.certified
    assert cert.alphabet == 4


def test_upper_799(upper_799):
    assert upper_799.kind == "upper"
    assert upper_799.alphabet is None
    assert upper_799.certified
    assert upper_799.margin < -0.0002
    assert upper_799.min_f > 0.3
    np.testing.assert_allclose(upper_799.poly.coeffs, REFERENCE_UPPER_COEFFS, atol=1e-4)


def test_upper_fails_below_dimension():
    with pytest.raises(CertificationFailed):
        certify_upper(0.70, 5, GRID)


def test_upper_succeeds_well_above_dimension():
    assert certify_upper(0.95, 5, GRID).certified


def test_single_letter_pressure():
    for s in (0.2, 0.5, 0.9):
        value = pressure_estimate(TransferConfig(1, s), 20, method="ratio")
        assert value == pytest.approx(-4 * s * math.log(GOLDEN), abs=1e-8)


def test_pressure_decreases_in_s():
    values = [pressure_estimate(TransferConfig(3, s), 8) for s in (0.3, 0.5, 0.7)]
    assert values == sorted(values, reverse=True)


def test_three_letter_pressure_changes_sign():
    assert pressure_estimate(TransferConfig(3, 0.40), 10, method="ratio") > 0
    assert pressure_estimate(TransferConfig(3, 0.48), 10, method="ratio") < 0


def test_pressure_budget():
    with pytest.raises(BudgetExceeded):
        pressure_estimate(TransferConfig(10, 0.5), 8)


def test_pressure_needs_finite_alphabet():
    with pytest.raises(DomainError):
        pressure_estimate(TransferConfig(None, 0.7), 3)


def test_eigenvalue_agrees_with_pressure():
    lam = eigenvalue_at(3, 0.5)
    assert math.log(lam) == pytest.approx(pressure_estimate(TransferConfig(3, 0.5), 12, method="ratio"), abs=0.02)


def test_eigenvalue_decreases_in_s():
    values = [eigenvalue_at(20, s) for s in (0.5, 0.6, 0.7)]
    assert values == sorted(values, reverse=True)


def test_three_letter_threshold():
    lo, hi = bisect_certified_threshold(3, 0.40, 0.47, 1e-4, 5, GRID)
    assert 0.43 < lo < hi < 0.44
    assert hi - lo <= 1e-4


def test_three_letter_threshold_in_parallel():
    lo, hi = bisect_certified_threshold(3, 0.40, 0.47, 1e-4, 5, GRID, workers=2)
    assert 0.43 < lo < hi < 0.44
    assert hi - lo <= 1e-4
    assert certify_lower(3, lo, 5, GRID).certified


def test_threshold_rejects_negative_workers():
    with pytest.raises(DomainError):
        bisect_certified_threshold(3, 0.40, 0.47, 1e-2, 5, GRID, workers=-1)


def test_dimension_estimates_are_consistent():
    three = dimension_estimate(3)
    assert 0.43 < three < 0.44
    full = dimension_estimate(None)
    assert 0.775 < full < 0.799


def test_zaremba_two_letters():
    assert dimension_estimate(2, order=10, family="zaremba") == pytest.approx(0.531280506, abs=1e-3)


@pytest.mark.slow
def test_lower_110_on_fine_grid():
    assert certify_lower(110, 0.775, 5, 200_000).certified


@pytest.mark.slow
def test_high_alphabet_thresholds():
    lo108, _ = bisect_certified_threshold(108, 0.770, 0.780, 1e-5, 5, GRID)
    lo109, _ = bisect_certified_threshold(109, 0.770, 0.780, 1e-5, 5, GRID)
    assert lo108 == pytest.approx(0.77474, abs=5e-4)
    assert lo109 == pytest.approx(0.77490, abs=5e-4)
    assert lo108 <= lo109


def test_fractal_first_gap():
    (circle,) = fractal_circles(1)
    assert circle.center == pytest.approx(0.25)
    assert circle.diameter == pytest.approx(0.5)
    assert circle.word == ()


def test_fractal_gaps_are_disjoint_and_nested():
    circles = fractal_circles(3, max_digit=4)
    assert len(circles) == 1 + 4 + 16
    intervals = sorted((c.center - c.diameter / 2, c.center + c.diameter / 2) for c in circles)
    for (_, right), (left, _) in zip(intervals, intervals[1:]):
        assert right <= left + 1e-15
    assert sum(c.diameter for c in circles) < 1
    for c in circles:
        if not c.word:
            continue
        # a deeper gap sits inside the parent word's image of [1/2, 1]
        parent = c.word[:-1]
        lo, hi = compose(parent, 0.5), compose(parent, 1.0)
        assert lo - 1e-15 <= c.center - c.diameter / 2
        assert c.center + c.diameter / 2 <= hi + 1e-15


@pytest.mark.parametrize("depth, digit", [(0, 3), (2, 0)])
def test_fractal_domain(depth, digit):
    with pytest.raises(DomainError):
        fractal_circles(depth, digit)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(A=3, s=0.0),
        dict(A=3, s=1.0),
        dict(A=3, s=0.5, order=1),
        dict(A=0, s=0.5),
        dict(A=None, s=0.7, family="zaremba"),
        dict(A=3, s=0.5, family="gauss"),
    ],
)
def test_transfer_config_validation(kwargs):
    with pytest.raises(DomainError):
        TransferConfig(**kwargs)
