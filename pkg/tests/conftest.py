from collections.abc import Iterator
from tempfile import NamedTemporaryFile

import numpy as np
import pytest
import yaml

from phigamma.coeffs import CoefficientAlgebra, finite_field
from phigamma.config import Config, config
from phigamma.laurent import LaurentSeries
from phigamma.matrix import SeriesMatrix
from phigamma.pgmod import (
    CharacterParams,
    PhiGammaModule,
    block_module,
    cartier_dual,
    change_basis,
    character_module,
    trivial_module,
)

TEST_CONF = {
    "precision": 40,
    "h1_budget": 32,
}


@pytest.fixture(autouse=True)
def conf() -> Iterator[Config]:
    with NamedTemporaryFile(suffix=".conf.yaml") as tf:
        with open(tf.name, "w") as f:
            f.write(yaml.dump(TEST_CONF))
        yield config.load(tf.name)
    config.load(None)


@pytest.fixture
def f3() -> CoefficientAlgebra:
    return finite_field(3)


@pytest.fixture
def f5() -> CoefficientAlgebra:
    return finite_field(5)


@pytest.fixture
def f9() -> CoefficientAlgebra:
    return finite_field(3, 2)


@pytest.fixture
def trivial(f3: CoefficientAlgebra) -> PhiGammaModule:
    return trivial_module(f3)


@pytest.fixture
def tate(trivial: PhiGammaModule) -> PhiGammaModule:
    return cartier_dual(trivial)


def unramified(algebra: CoefficientAlgebra, a: int) -> PhiGammaModule:
    one = algebra.one
    return character_module(
        algebra,
        CharacterParams(algebra.from_int(a), one, one),
        name=f"ur({a})",
    )


@pytest.fixture
def ur2(f3: CoefficientAlgebra) -> PhiGammaModule:
    return unramified(f3, 2)


def coords(x: np.ndarray) -> list[int]:
    return [int(c) for c in np.asarray(x).reshape(-1)]


def conjugated_sum(algebra: CoefficientAlgebra) -> PhiGammaModule:
    """``A + A(1)`` in the basis ``[[1 + T, 1/T], [T, 1]]``."""
    trivial = trivial_module(algebra)
    zero = [[LaurentSeries.zero(algebra)]]
    m = block_module(trivial, cartier_dual(trivial), zero, zero)
    basis = SeriesMatrix(
        algebra,
        [
            [
                LaurentSeries.from_ints(algebra, 0, [1, 1]),
                LaurentSeries.monomial(algebra, 1, -1),
            ],
            [
                LaurentSeries.monomial(algebra, 1, 1),
                LaurentSeries.constant(algebra, 1),
            ],
        ],
    )
    return change_basis(m, basis)
