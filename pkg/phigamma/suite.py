"""Randomized property suite over iterated extensions of characters."""

from __future__ import annotations

import logging

import numpy as np

from .coeffs import CoefficientAlgebra, finite_field
from .config import config
from .exceptions import MalformedInput, PgmError
from .herr import (
    cohomology_report,
    h0,
    h1_basis,
    is_perfect,
    pairing_matrix,
)
from .matrix import Vector, vec_add, vec_scale, zero_vector
from .pgmod import (
    PhiGammaModule,
    base_change,
    cartier_dual,
    extension_from_cocycle,
    hom_module,
    psi_bounds_hold,
)
from .rankone import CharacterLabel, from_character
from .schema import SuiteCaseData, SuiteData

log = logging.getLogger(__name__)


def field_degree(p: int, q: int) -> int:
    f, n = 0, 1
    while n < q:
        n, f = n * p, f + 1
    if n != q or f < 1:
        raise MalformedInput(f"q = {q} is not a power of p = {p}")
    return f


def random_label(
    rng: np.random.Generator, algebra: CoefficientAlgebra
) -> CharacterLabel:
    units = algebra.residue_units()
    a = units[int(rng.integers(len(units)))]
    return CharacterLabel(
        int(rng.integers(algebra.p - 1)), tuple(int(c) for c in a)
    )


def random_element(
    rng: np.random.Generator, algebra: CoefficientAlgebra
) -> np.ndarray:
    return algebra.element(rng.integers(algebra.p, size=algebra.r).tolist())


def random_module(
    rng: np.random.Generator, algebra: CoefficientAlgebra, rank: int
) -> PhiGammaModule:
    """Iterated extension: each step extends a new character by the
    module built so far, along a random class."""
    m = from_character(algebra, random_label(rng, algebra))
    for _ in range(rank - 1):
        chi = from_character(algebra, random_label(rng, algebra))
        h = hom_module(chi, m)
        a: Vector = zero_vector(algebra, h.rank)
        b: Vector = zero_vector(algebra, h.rank)
        for c in h1_basis(h):
            coeff = random_element(rng, algebra)
            a = vec_add(a, vec_scale(c.a, coeff))
            b = vec_add(b, vec_scale(c.b, coeff))
        m = extension_from_cocycle(chi, m, a, b)
    return m if m.validated else m.validate()


def run_case(
    index: int,
    seed: int,
    algebra: CoefficientAlgebra,
    d_max: int,
    pairing: bool = False,
    regress: bool = False,
) -> SuiteCaseData:
    rng = np.random.default_rng([seed, index])
    rank = int(rng.integers(1, d_max + 1))
    case = SuiteCaseData(
        index=index, seed=seed, p=algebra.p, q=algebra.q, rank=rank
    )
    try:
        m = random_module(rng, algebra, rank)
        case.valid = m.validated
        case.psi_bounds_ok = all(psi_bounds_hold(m, n) for n in (1, 2, 3))
        report = cohomology_report(m)
        case.h0, case.h1, case.h2 = report.h0, report.h1, report.h2
        case.euler_ok = report.euler_ok
        dual_m = cartier_dual(m)
        dual_basis = h1_basis(dual_m)
        case.duality_ok = (
            h0(dual_m) == report.h2
            and len(dual_basis) == report.h1
            and h0(cartier_dual(dual_m)) == report.h0
        )
        if algebra.q == algebra.p:
            big = base_change(m, finite_field(algebra.p, 2))
            case.base_change_ok = (h0(big), h0(cartier_dual(big))) == (
                report.h0,
                report.h2,
            )
        if pairing:
            case.pairing_ok = is_perfect(
                pairing_matrix(report.representatives, dual_basis), m
            )
        if regress:
            case.regress_ok = _regress(m, report.h0, report.h1, report.h2)
    except PgmError as e:
        log.debug("Suite case %d failed: %r", index, e)
        case.error = f"{type(e).__name__}: {e}"
        return case
    case.passed = bool(
        case.valid
        and case.psi_bounds_ok
        and case.euler_ok
        and case.duality_ok
    ) and all(
        flag is not False
        for flag in (case.base_change_ok, case.pairing_ok, case.regress_ok)
    )
    return case


def _regress(m: PhiGammaModule, *dims: int) -> bool:
    """Dimensions are unchanged when all windows double."""
    with config.working_precision(2 * config.precision):
        return (
            h0(m),
            len(h1_basis(m)),
            h0(cartier_dual(m)),
        ) == dims


def random_suite(
    seed: int,
    p: int,
    q: int,
    d_max: int,
    count: int,
    pairing: bool = False,
    regress: bool = False,
) -> SuiteData:
    if p not in (3, 5):
        raise MalformedInput(f"Suite supports p in (3, 5), got {p}")
    if not 1 <= d_max <= 3:
        raise MalformedInput(f"Suite supports d_max in 1..3, got {d_max}")
    algebra = finite_field(p, field_degree(p, q))
    suite = SuiteData(seed=seed, p=p, q=q, d_max=d_max, count=count)
    for index in range(count):
        case = run_case(index, seed, algebra, d_max, pairing, regress)
        suite.cases.append(case)
        if not case.passed:
            suite.failures.append(index)
    suite.passed = not suite.failures
    return suite
