import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from phigamma.coeffs import (
    CoefficientAlgebra,
    SquareZeroExtension,
    dual_numbers,
    embedding_matrix,
    finite_field,
    make_coefficient_algebra,
    square_zero_extension,
)
from phigamma.config import Config, config
from phigamma.exceptions import NotALift, UnsupportedCoefficients
from phigamma.herr import (
    HerrComplex,
    class_of_extension,
    cohomology_report,
    h0,
    h0_basis,
    h1_basis,
    h1_dim,
    h2,
    hom_space,
    is_coboundary,
    kernel_phi_minus_one,
    lift_space_dim,
    obstruction_class,
    with_precision_growth,
)
from phigamma.laurent import GAMMA, PHI, LaurentSeries
from phigamma.matrix import SeriesMatrix, vec_is_zero
from phigamma.pgmod import (
    PhiGammaModule,
    block_module,
    cartier_dual,
    trivial_module,
)
from phigamma.suite import random_module

from .conftest import conjugated_sum, coords, unramified


@pytest.mark.parametrize(
    "fixture, dims",
    [
        ("trivial", (1, 2, 0)),
        ("tate", (0, 2, 1)),
        ("ur2", (0, 1, 0)),
    ],
)
def test_dimensions(
    request: pytest.FixtureRequest, fixture: str, dims: tuple[int, ...]
) -> None:
    m = request.getfixturevalue(fixture)
    assert (h0(m), h1_dim(m), h2(m)) == dims
    report = cohomology_report(m)
    assert (report.h0, report.h1, report.h2) == dims
    assert report.euler_ok
    assert report.duality_ok
    assert len(report.representatives) == dims[1]


def test_tate_h2_larger_fields(
    f5: CoefficientAlgebra, f9: CoefficientAlgebra
) -> None:
    for algebra in (f5, f9):
        assert h2(cartier_dual(trivial_module(algebra))) == 1
        assert h0(trivial_module(algebra)) == 1


def test_kernel_of_trivial(trivial: PhiGammaModule) -> None:
    (v,) = kernel_phi_minus_one(trivial)
    assert coords(v[0].coeff(0)) != [0]
    assert coords(v[0].coeff(1)) == [0]
    assert len(h0_basis(trivial)) == 1


def test_no_invariants_in_twist(tate: PhiGammaModule) -> None:
    assert h0_basis(tate) == []


def test_h1_basis_certified(trivial: PhiGammaModule) -> None:
    basis = h1_basis(trivial)
    assert len(basis) == 2
    for c in basis:
        assert c.certified
        assert c.certify() is c


def test_differentials_compose_to_zero(tate: PhiGammaModule) -> None:
    complex_ = HerrComplex(tate)
    x = [LaurentSeries.from_ints(tate.algebra, -2, [1, 2, 0, 1])]
    a, b = complex_.d0(x)
    assert vec_is_zero(complex_.d1(a, b))


def test_psi_comparison_is_chain_map(trivial: PhiGammaModule) -> None:
    complex_ = HerrComplex(trivial)
    for c in h1_basis(trivial):
        a, b = complex_.to_psi_complex(1, c.a, c.b)
        assert vec_is_zero(complex_.d1_psi(a, b))


def test_pairing_is_perfect(trivial: PhiGammaModule) -> None:
    report = cohomology_report(trivial, pairing=True)
    assert report.duality_ok
    assert "pairing-perfect" in report.certificates


def test_class_of_unipotent_extension(trivial: PhiGammaModule) -> None:
    algebra = trivial.algebra
    one = LaurentSeries.constant(algebra, 1)
    zero = LaurentSeries.zero(algebra)
    e = block_module(trivial, trivial, [[one]], [[zero]]).validate()
    c = class_of_extension(e, 1)
    assert c.certified
    assert coords(c.a[0].coeff(0)) == [1]
    assert vec_is_zero(c.b)
    assert not is_coboundary(c)


def _split_sum(
    trivial: PhiGammaModule, tate: PhiGammaModule
) -> PhiGammaModule:
    zero = [[LaurentSeries.zero(trivial.algebra)]]
    return block_module(trivial, tate, zero, zero).validate()


def _lift(
    mat: SeriesMatrix, algebra: CoefficientAlgebra
) -> SeriesMatrix:
    return mat.map_coeffs(embedding_matrix(mat.algebra, algebra), algebra)


def test_obstruction_vanishes(
    trivial: PhiGammaModule, tate: PhiGammaModule
) -> None:
    m = _split_sum(trivial, tate)
    ext = square_zero_extension(m.algebra, 1)
    phi, gamma = _lift(m.phi, ext.algebra), _lift(m.gamma, ext.algebra)
    tautological = obstruction_class(m, ext, phi, gamma)
    assert tautological.h2_dim == 2
    assert tautological.lifts_exist

    zero = LaurentSeries.zero(ext.algebra)
    bump = LaurentSeries.monomial(ext.algebra, ext.eps(0), 1)
    perturbed = phi + SeriesMatrix(ext.algebra, [[zero, bump], [zero, zero]])
    obstruction = obstruction_class(m, ext, perturbed, gamma)
    assert obstruction.lifts_exist
    assert len(obstruction.coords) == 1


def test_obstruction_rejects_non_lift(
    trivial: PhiGammaModule, tate: PhiGammaModule
) -> None:
    m = _split_sum(trivial, tate)
    ext = square_zero_extension(m.algebra, 1)
    gamma = _lift(m.gamma, ext.algebra)
    wrong = SeriesMatrix.identity(ext.algebra, 2).scale(
        ext.algebra.from_int(2)
    )
    with pytest.raises(NotALift):
        obstruction_class(m, ext, wrong, gamma)


def test_lift_space_dim(trivial: PhiGammaModule) -> None:
    assert lift_space_dim(trivial, 1) == 2
    assert lift_space_dim(trivial, 3) == 6
    assert lift_space_dim(trivial, 0) == 0


def test_hom_space(trivial: PhiGammaModule, tate: PhiGammaModule) -> None:
    assert hom_space(trivial, trivial).dim == 1
    assert hom_space(trivial, tate).dim == 0
    (f,) = hom_space(tate, tate).basis
    assert len(f) == 1 and len(f[0]) == 1


def test_dual_number_coefficients() -> None:
    m = trivial_module(dual_numbers(3))
    report = cohomology_report(m)
    assert report.over == "F_p"
    assert (report.h0, report.h1, report.h2) == (2, 4, 0)
    assert report.graded == [[1, 2, 0], [1, 2, 0]]
    assert "gorenstein-duality" in report.certificates
    with pytest.raises(UnsupportedCoefficients):
        h1_basis(m)


def test_dimensions_larger_prime(f5: CoefficientAlgebra) -> None:
    trivial = trivial_module(f5)
    for m, dims in (
        (trivial, (1, 2, 0)),
        (cartier_dual(trivial), (0, 2, 1)),
        (unramified(f5, 2), (0, 1, 0)),
    ):
        report = cohomology_report(m)
        assert (report.h0, report.h1, report.h2) == dims, m.label
        assert report.duality_ok


@pytest.mark.parametrize("p", [3, 5])
def test_dimensions_in_conjugated_basis(p: int) -> None:
    m = conjugated_sum(finite_field(p)).validate()
    report = cohomology_report(m)
    assert (report.h0, report.h1, report.h2) == (1, 4, 1)
    assert report.euler_ok


def test_non_gorenstein_coefficients() -> None:
    table = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        table[0, i, i] = table[i, 0, i] = 1
    a = make_coefficient_algebra(
        3,
        {
            "kind": "local_algebra",
            "dim": 3,
            "mult_table": table.tolist(),
            "max_ideal": [1, 2],
        },
    )
    assert not a.is_gorenstein
    m = trivial_module(a)
    assert h2(m) == 0
    report = cohomology_report(m)
    assert report.over == "F_p"
    assert (report.h0, report.h1, report.h2) == (3, 6, 0)
    assert report.euler_ok
    assert "restriction-of-scalars" in report.certificates
    assert "gorenstein-duality" not in report.certificates
    assert "graded-bound" in report.certificates
    assert report.graded == [[1, 2, 0], [2, 4, 0]]
    assert report.to_dict()["graded"] == report.graded


def test_precision_is_scoped_per_thread(conf: Config) -> None:
    barrier = threading.Barrier(2)

    def _working() -> int:
        barrier.wait(timeout=10)
        return config.precision

    def _read(precision: int) -> int:
        return with_precision_growth(_working, precision=precision)

    with ThreadPoolExecutor(max_workers=2) as pool:
        assert list(pool.map(_read, [24, 96])) == [24, 96]
    assert config.precision == 40


def test_concurrent_cohomology(tate: PhiGammaModule) -> None:
    with ThreadPoolExecutor(max_workers=2) as pool:
        results = list(
            pool.map(lambda n: h1_basis(tate, precision=n), [24, 80])
        )
    assert [len(basis) for basis in results] == [2, 2]
    for basis in results:
        assert all(c.certified for c in basis)
    assert config.precision == 40
    assert len(h1_basis(tate)) == 2


def _reparametrized_lift(
    rng: np.random.Generator, m: PhiGammaModule, ext: SquareZeroExtension
) -> tuple[SeriesMatrix, SeriesMatrix]:
    """Random lifts of both matrices, then conjugated by ``1 + eps X``."""
    algebra, d = ext.algebra, m.rank

    def _noise() -> SeriesMatrix:
        return SeriesMatrix.build(
            algebra,
            d,
            lambda i, j: LaurentSeries.monomial(
                algebra,
                ext.eps(0) * int(rng.integers(m.p)),
                int(rng.integers(-2, 3)),
            ),
        )

    phi = _lift(m.phi, algebra) + _noise()
    gamma = _lift(m.gamma, algebra) + _noise()
    x = _noise()
    ident = SeriesMatrix.identity(algebra, d)
    left, right = ident - x, ident + x
    return left @ phi @ right.act(PHI), left @ gamma @ right.act(GAMMA)


def test_obstruction_independent_of_lift(f3: CoefficientAlgebra) -> None:
    rng = np.random.default_rng(17)
    for _ in range(20):
        m = random_module(rng, f3, int(rng.integers(1, 3)))
        ext = square_zero_extension(f3, 1)
        reference = obstruction_class(
            m, ext, _lift(m.phi, ext.algebra), _lift(m.gamma, ext.algebra)
        )
        assert reference.lifts_exist
        for _ in range(10):
            phi, gamma = _reparametrized_lift(rng, m, ext)
            obstruction = obstruction_class(m, ext, phi, gamma)
            assert obstruction.coords == reference.coords, m.label
            assert obstruction.h2_dim == reference.h2_dim
