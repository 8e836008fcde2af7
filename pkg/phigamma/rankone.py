"""Rank one modules and weights of two-dimensional extensions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .coeffs import CoefficientAlgebra, CyclotomicData
from .exceptions import MalformedInput, NoMatch, NotMaximallyNonsplit
from .herr import (
    Cocycle,
    class_of_extension,
    cup_pairing,
    h0,
    h0_basis,
    is_coboundary,
)
from .matrix import zero_vector
from .pgmod import (
    CharacterParams,
    PhiGammaModule,
    cartier_dual,
    character_module,
    dual,
    split_blocks,
    tensor,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CharacterLabel:
    """``omega^n`` times the unramified character sending geometric
    Frobenius to ``a``."""

    n: int
    a: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "a": list(self.a)}


@dataclass(frozen=True)
class SerreWeight2:
    k1: int
    k2: int

    def __post_init__(self) -> None:
        if not (0 <= self.k1 - self.k2 and 0 <= self.k2):
            raise MalformedInput(f"Invalid weight ({self.k1}, {self.k2})")

    def is_valid(self, p: int) -> bool:
        return (
            0 <= self.k1 - self.k2 <= p - 1
            and 0 <= self.k2 <= p - 1
            and (self.k1, self.k2) != (p - 1, p - 1)
        )

    def to_dict(self) -> dict[str, Any]:
        return {"k1": self.k1, "k2": self.k2}


def from_character(
    algebra: CoefficientAlgebra, label: CharacterLabel
) -> PhiGammaModule:
    p = algebra.p
    a = algebra.element(label.a)
    g_n = pow(CyclotomicData(p).generator, label.n % (p - 1), p)
    return character_module(
        algebra,
        CharacterParams(a, algebra.one, algebra.from_int(g_n)),
        name=f"chi({label.n % (p - 1)}, {list(label.a)})",
    )


def labels(algebra: CoefficientAlgebra) -> list[CharacterLabel]:
    return [
        CharacterLabel(n, tuple(int(c) for c in a))
        for n in range(algebra.p - 1)
        for a in algebra.residue_units()
    ]


def identify_rank1(m: PhiGammaModule) -> CharacterLabel:
    if m.rank != 1:
        raise MalformedInput(f"Expected a rank 1 module, got rank {m.rank}")
    for label in labels(m.algebra):
        if h0(tensor(m, dual(from_character(m.algebra, label)))):
            log.debug("Identified %s as %s", m.label, label)
            return label
    raise NoMatch(f"No character matches {m.label}")


def unramified_class(n: PhiGammaModule) -> Cocycle:
    """The class ``(u, 0)`` with ``u`` spanning ``H^0(n)``."""
    basis = h0_basis(n)
    if not basis:
        raise NoMatch(f"{n.label} has no invariants")
    return Cocycle(
        n, basis[0], zero_vector(n.algebra, n.rank), certified=True
    )


def is_tres_ramifiee(c: Cocycle) -> bool:
    """Whether ``c`` pairs nontrivially with the unramified line."""
    alpha = unramified_class(cartier_dual(c.module))
    return bool(np.any(cup_pairing(alpha, c)))


def weight_rank2(e: PhiGammaModule) -> SerreWeight2:
    """Weight of a nonsplit extension of the quotient by the sub."""
    p = e.p
    if e.rank != 2:
        raise MalformedInput(f"Expected rank 2, got rank {e.rank}")
    sub, quotient, _ = split_blocks(e, 1)
    c = class_of_extension(e, 1)
    if is_coboundary(c):
        raise NotMaximallyNonsplit("Extension class is a coboundary")
    chi1, chi2 = identify_rank1(sub), identify_rank1(quotient)
    k2 = (-chi1.n) % (p - 1)
    t = (chi1.n - chi2.n - 1) % (p - 1)
    if t == 0 and chi1.a == chi2.a and is_tres_ramifiee(c):
        t = p - 1
    weight = SerreWeight2(k2 + t, k2)
    log.debug("Weight of %s: %s", e.label, weight)
    return weight
