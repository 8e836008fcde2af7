from math import comb

import numpy as np
import pytest

from phigamma.coeffs import CoefficientAlgebra, finite_field
from phigamma.exceptions import (
    BadInnerValuation,
    EmptyWindow,
    InsufficientPadicPrecision,
    NonUnitLeading,
)
from phigamma.fp import solve_mod
from phigamma.laurent import (
    DELTA,
    GAMMA,
    PHI,
    ActionKind,
    LaurentSeries,
    RingAction,
    gamma_image,
    invert,
    mul,
    psi_ring,
    substitute,
    unit_inverse,
)


def _ints(f: LaurentSeries, lo: int, hi: int) -> list[int]:
    return [int(c) for c in f.window(lo, hi)[:, 0]]


def _series(algebra: CoefficientAlgebra, v: int, *c: int) -> LaurentSeries:
    return LaurentSeries.from_ints(algebra, v, list(c))


def test_mul(f3: CoefficientAlgebra) -> None:
    f = _series(f3, -1, 1, 1)
    g = _series(f3, 1, 1, -1)
    assert _ints(f * g, -1, 3) == [0, 1, 0, 2]
    one = LaurentSeries.constant(f3, 1)
    cube = mul(_series(f3, 0, 1, 1), _series(f3, 0, 1, 2, 1))
    assert _ints(cube, 0, 4) == [1, 0, 0, 1]
    assert (f * one).agrees(f)


def test_mul_precision(f3: CoefficientAlgebra) -> None:
    f = LaurentSeries.from_ints(f3, 0, [1, 1], precision=5)
    g = _series(f3, -2, 1)
    product = mul(f, g)
    assert product.precision == 3
    assert _ints(product, -2, 3) == [1, 1, 0, 0, 0]
    with pytest.raises(EmptyWindow):
        product.coeff(3)


def test_invert(f3: CoefficientAlgebra) -> None:
    assert _ints(invert(_series(f3, 0, 1, 1), 8), 0, 6) == [
        1,
        2,
        1,
        2,
        1,
        2,
    ]
    t_inv = invert(_series(f3, 1, 1))
    assert t_inv.is_exact
    assert t_inv.v == -1
    assert _ints(invert(_series(f3, 0, 2, 1), 8), 0, 5) == [2] * 5
    with pytest.raises(NonUnitLeading):
        invert(LaurentSeries.zero(f3))


def test_invert_roundtrip(f5: CoefficientAlgebra) -> None:
    f = _series(f5, -2, 3, 1, 4, 2)
    product = f * invert(f, 20)
    assert product.precision == 20
    assert product.agrees(LaurentSeries.constant(f5, 1))


def test_substitute(f3: CoefficientAlgebra) -> None:
    t3 = _series(f3, 3, 1)
    assert _ints(substitute(_series(f3, 2, 1), t3), 0, 8) == [
        0,
        0,
        0,
        0,
        0,
        0,
        1,
        0,
    ]
    g = _series(f3, 1, 1, 1)
    f = substitute(_series(f3, -1, 1), g, 10)
    assert _ints(f, -1, 3) == [1, 2, 1, 2]
    one = LaurentSeries.constant(f3, 1)
    assert substitute(one, g).agrees(one)
    with pytest.raises(BadInnerValuation):
        substitute(f, _series(f3, 0, 1, 1))


def test_gamma_image(f3: CoefficientAlgebra) -> None:
    assert _ints(GAMMA.image(f3), 0, 6) == [0, 1, 0, 1, 1, 0]
    assert _ints(DELTA.image(f3, 6), 0, 6) == [0, 2, 1, 2, 1, 2]
    identity = RingAction(ActionKind.DELTA, 2)
    assert _ints(identity.image(f3), 0, 4) == [0, 1, 0, 0]
    image = gamma_image(f3, GAMMA, 10, padic_precision=5)
    assert _ints(image, 0, 6) == [0, 1, 0, 1, 1, 0]
    with pytest.raises(InsufficientPadicPrecision):
        gamma_image(f3, GAMMA, 10, padic_precision=2)


def test_actions_commute(f5: CoefficientAlgebra) -> None:
    t = _series(f5, 1, 1)
    assert PHI(GAMMA(t)).agrees(GAMMA(PHI(t)))
    delta_t = DELTA(t, 30)
    assert GAMMA(delta_t).agrees(DELTA(GAMMA(t), 30))
    power = t
    for _ in range(4):
        power = DELTA(power, 30)
    assert power.agrees(t)
    assert delta_t.valuation == 1


@pytest.mark.parametrize(
    "v, coeffs, expected_v, expected",
    [
        (4, [1], 1, [2]),
        (0, [1], 0, [1]),
        (-3, [1], -1, [1]),
    ],
)
def test_psi_examples(
    f3: CoefficientAlgebra,
    v: int,
    coeffs: list[int],
    expected_v: int,
    expected: list[int],
) -> None:
    psi = psi_ring(_series(f3, v, *coeffs))
    assert psi.v == expected_v
    assert _ints(psi, expected_v, expected_v + len(expected)) == expected


def _psi_oracle(
    algebra: CoefficientAlgebra, f: LaurentSeries, width: int
) -> list[int]:
    """Solve ``f = sum_i (1 + T)^i phi(f_i)`` and return ``f_0``."""
    p = algebra.p
    columns = []
    for i in range(p):
        shift = _series(algebra, 0, *[comb(i, k) % p for k in range(i + 1)])
        for e in range(width):
            columns.append(
                _ints(shift * _series(algebra, p * e, 1), 0, p * width)
            )
    a = np.array(columns, dtype=np.int64).T
    x = solve_mod(a, np.array(_ints(f, 0, p * width)), p)
    return [int(c) for c in x[:width]]


@pytest.mark.parametrize("p, width", [(3, 10), (5, 6)])
def test_psi_against_linear_solve(p: int, width: int) -> None:
    algebra = finite_field(p)
    rng = np.random.default_rng(p)
    for _ in range(5):
        values = rng.integers(p, size=p * width).tolist()
        f = _series(algebra, 0, *values)
        assert _psi_oracle(algebra, f, width) == _ints(psi_ring(f), 0, width)


def test_psi_identities(f5: CoefficientAlgebra) -> None:
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = _series(f5, -2, *rng.integers(5, size=6).tolist())
        b = _series(f5, -3, *rng.integers(5, size=9).tolist())
        assert psi_ring(a.phi()).agrees(a)
        assert psi_ring(a.phi() * b).agrees(a * psi_ring(b))


def test_residue(f3: CoefficientAlgebra) -> None:
    assert list(_series(f3, -1, 1).residue()) == [1]
    assert list(_series(f3, -2, 1).residue()) == [2]
    assert list(_series(f3, 0, 1, 1).residue()) == [0]
    coboundary = GAMMA(_series(f3, -2, 1)) - _series(f3, -2, 1)
    assert list(coboundary.residue()) == [0]


def test_unit_inverse_nilpotent_polar() -> None:
    from phigamma.coeffs import dual_numbers

    a = dual_numbers(3)
    eps = a.basis(1)
    f = LaurentSeries.make(a, -1, [eps, a.one])
    product = f * unit_inverse(f, 12)
    assert product.agrees(LaurentSeries.constant(a, a.one))
