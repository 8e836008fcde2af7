from unittest import mock

import numpy as np
import pytest

from phigamma.coeffs import CoefficientAlgebra
from phigamma.exceptions import MalformedInput
from phigamma.herr import cohomology_report
from phigamma.laurent import LaurentSeries
from phigamma.matrix import SeriesMatrix
from phigamma.pgmod import make_module
from phigamma.schema import dumps
from phigamma.suite import (
    field_degree,
    random_module,
    random_suite,
    run_case,
)


def test_field_degree() -> None:
    assert field_degree(3, 3) == 1
    assert field_degree(3, 9) == 2
    assert field_degree(5, 25) == 2
    with pytest.raises(MalformedInput):
        field_degree(3, 6)


@pytest.mark.parametrize("p, d_max", [(7, 2), (3, 0), (5, 4)])
def test_suite_parameters(p: int, d_max: int) -> None:
    with pytest.raises(MalformedInput):
        random_suite(0, p, p, d_max, 1)


def test_empty_suite() -> None:
    suite = random_suite(0, 3, 3, 2, 0)
    assert suite.passed
    assert suite.cases == []
    assert suite.to_dict()["chi_gamma_convention"] == "1+p"


def test_characters_suite() -> None:
    suite = random_suite(11, 3, 3, 1, 3)
    assert suite.passed, suite.failures
    assert [case.rank for case in suite.cases] == [1, 1, 1]
    for case in suite.cases:
        assert case.h0 is not None and case.h1 is not None
        assert case.h2 is not None
        assert case.h0 - case.h1 + case.h2 == -1
        assert case.base_change_ok
        assert case.valid
        assert case.psi_bounds_ok


def test_suite_is_deterministic() -> None:
    first = dumps(random_suite(5, 5, 5, 1, 2).to_dict())
    assert dumps(random_suite(5, 5, 5, 1, 2).to_dict()) == first


def test_random_extension(f3: CoefficientAlgebra) -> None:
    rng = np.random.default_rng(3)
    m = random_module(rng, f3, 2)
    assert m.rank == 2
    assert m.validated
    report = cohomology_report(m)
    assert report.h0 - report.h1 + report.h2 == -2


def test_case_with_pairing(f3: CoefficientAlgebra) -> None:
    case = run_case(0, 2, f3, 2, pairing=True, regress=True)
    assert case.passed, case.error
    assert case.valid
    assert case.psi_bounds_ok
    assert case.pairing_ok
    assert case.regress_ok


def test_invalid_module_fails_case(f3: CoefficientAlgebra) -> None:
    t = LaurentSeries.monomial(f3, 1, 1)
    one = SeriesMatrix.identity(f3, 1)
    broken = make_module(f3, SeriesMatrix(f3, [[t]]), one, one)
    with mock.patch(
        "phigamma.suite.from_character", lambda *args: broken
    ):
        suite = random_suite(0, 3, 3, 1, 2)
    assert not suite.passed
    assert suite.failures == [0, 1]
    assert all(
        case.error and case.error.startswith("CommutationFailure")
        for case in suite.cases
    )
