"""Windowed Laurent series over a coefficient algebra.

A series stores its coefficients for exponents ``valuation`` up to
``valuation + len(coeffs) - 1`` and is known exactly below its absolute
``precision``: coefficients between the stored block and the precision
are known to vanish. Polynomials carry the ``EXACT`` precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np

from .coeffs import CoefficientAlgebra, CyclotomicData, legendre_valuation
from .coeffs import padic_binomial as _padic_binomial
from .config import config
from .exceptions import (
    BadInnerValuation,
    EmptyWindow,
    InsufficientPadicPrecision,
    InsufficientPrecision,
    MalformedInput,
    NonUnitLeading,
)
from .fp import IntArray

EXACT = 1 << 60
_EXACT_LIMIT = EXACT >> 1


def _saturate(n: int) -> int:
    return EXACT if n >= _EXACT_LIMIT else n


def _convolve(
    algebra: CoefficientAlgebra, a: IntArray, b: IntArray
) -> IntArray:
    p, r = algebra.p, algebra.r
    if not len(a) or not len(b):
        return np.zeros((0, r), dtype=np.int64)
    if r == 1:
        return (np.convolve(a[:, 0], b[:, 0]) % p).reshape(-1, 1)
    pairs = np.stack(
        [np.convolve(a[:, i], b[:, j]) for i in range(r) for j in range(r)]
    )
    return np.asarray(
        np.einsum("ml,mk->lk", pairs, algebra.table.reshape(r * r, r)) % p,
        dtype=np.int64,
    )


@dataclass(eq=False, frozen=True)
class LaurentSeries:
    algebra: CoefficientAlgebra
    v: int
    coeffs: IntArray
    precision: int = EXACT

    @classmethod
    def make(
        cls,
        algebra: CoefficientAlgebra,
        v: int,
        coeffs: Any,
        precision: int = EXACT,
    ) -> LaurentSeries:
        arr = np.asarray(coeffs, dtype=np.int64).reshape(-1, algebra.r)
        arr = arr % algebra.p
        precision = _saturate(precision)
        if precision != EXACT:
            arr = arr[: max(0, min(len(arr), precision - v))]
        nonzero = np.nonzero(arr.any(axis=1))[0]
        if not len(nonzero):
            empty = np.zeros((0, algebra.r), dtype=np.int64)
            return cls(
                algebra, precision if precision != EXACT else 0, empty,
                precision,
            )
        first, last = int(nonzero[0]), int(nonzero[-1])
        return cls(algebra, v + first, arr[first : last + 1], precision)

    @classmethod
    def zero(
        cls, algebra: CoefficientAlgebra, precision: int = EXACT
    ) -> LaurentSeries:
        return cls.make(algebra, 0, [], precision)

    @classmethod
    def monomial(
        cls,
        algebra: CoefficientAlgebra,
        c: IntArray | int,
        e: int,
        precision: int = EXACT,
    ) -> LaurentSeries:
        if isinstance(c, int):
            c = algebra.from_int(c)
        return cls.make(algebra, e, [c], precision)

    @classmethod
    def constant(
        cls, algebra: CoefficientAlgebra, c: IntArray | int
    ) -> LaurentSeries:
        return cls.monomial(algebra, c, 0)

    @classmethod
    def from_ints(
        cls,
        algebra: CoefficientAlgebra,
        v: int,
        values: list[int],
        precision: int = EXACT,
    ) -> LaurentSeries:
        """Series with prime-field ``values`` starting at ``v``."""
        return cls.make(
            algebra, v, [algebra.from_int(c) for c in values], precision
        )

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def is_exact(self) -> bool:
        return self.precision == EXACT

    @property
    def is_zero(self) -> bool:
        return not len(self.coeffs)

    @property
    def valuation(self) -> int:
        return self.v if len(self.coeffs) else self.precision

    @property
    def end(self) -> int:
        return self.v + len(self.coeffs)

    @property
    def leading(self) -> IntArray:
        if self.is_zero:
            raise NonUnitLeading("Series has no known nonzero coefficient")
        return self.coeffs[0]

    def coeff(self, e: int) -> IntArray:
        if e >= self.precision:
            raise EmptyWindow(
                f"Coefficient of T^{e} unknown at precision {self.precision}"
            )
        if self.v <= e < self.end:
            return self.coeffs[e - self.v]
        return self.algebra.zero

    def window(self, lo: int, hi: int) -> IntArray:
        """Coefficients for exponents ``lo`` to ``hi - 1``."""
        if hi > self.precision:
            raise EmptyWindow(
                f"Window [{lo}, {hi}) exceeds precision {self.precision}"
            )
        out = np.zeros((max(0, hi - lo), self.algebra.r), dtype=np.int64)
        if not self.is_zero:
            a, b = max(lo, self.v), min(hi, self.end)
            if a < b:
                out[a - lo : b - lo] = self.coeffs[a - self.v : b - self.v]
        return out

    def truncate(self, precision: int) -> LaurentSeries:
        if precision >= self.precision:
            return self
        return LaurentSeries.make(
            self.algebra, self.v, self.coeffs, precision
        )

    def __add__(self, other: LaurentSeries) -> LaurentSeries:
        precision = min(self.precision, other.precision)
        if self.is_zero:
            return other.truncate(precision)
        if other.is_zero:
            return self.truncate(precision)
        lo = min(self.v, other.v)
        hi = max(self.end, other.end)
        if precision != EXACT:
            hi = min(hi, precision)
        if hi <= lo:
            return LaurentSeries.zero(self.algebra, precision)
        coeffs = self.window(lo, hi) + other.window(lo, hi)
        return LaurentSeries.make(self.algebra, lo, coeffs, precision)

    def __neg__(self) -> LaurentSeries:
        return LaurentSeries(
            self.algebra, self.v, (-self.coeffs) % self.p, self.precision
        )

    def __sub__(self, other: LaurentSeries) -> LaurentSeries:
        return self + (-other)

    def scale(self, c: IntArray) -> LaurentSeries:
        if self.is_zero:
            return self
        coeffs = np.einsum(
            "i,lj,ijk->lk", c % self.p, self.coeffs, self.algebra.table
        )
        return LaurentSeries.make(self.algebra, self.v, coeffs, self.precision)

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by ``T^k``."""
        precision = _saturate(self.precision + k)
        if self.is_zero:
            return LaurentSeries.zero(self.algebra, precision)
        return LaurentSeries(self.algebra, self.v + k, self.coeffs, precision)

    def __mul__(self, other: LaurentSeries) -> LaurentSeries:
        return mul(self, other)

    def power(self, n: int, cap: int | None = None) -> LaurentSeries:
        if n < 0:
            return invert(self, cap).power(-n)
        result = LaurentSeries.constant(self.algebra, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def agrees(self, other: LaurentSeries) -> bool:
        """Equality on the window where both are known."""
        return (self - other).is_zero

    def map_coeffs(
        self, matrix: IntArray, algebra: CoefficientAlgebra
    ) -> LaurentSeries:
        """Apply an F_p-linear coefficient map ``matrix`` (dst x src)."""
        coeffs = (self.coeffs @ matrix.T) % algebra.p
        return LaurentSeries.make(algebra, self.v, coeffs, self.precision)

    def phi(self) -> LaurentSeries:
        """Frobenius ``T -> T^p``, exact on coefficients mod p."""
        p = self.p
        precision = _saturate(self.precision * p) if self.precision > 0 else (
            self.precision * p
        )
        if self.is_zero:
            return LaurentSeries.zero(self.algebra, precision)
        coeffs = np.zeros(
            ((len(self.coeffs) - 1) * p + 1, self.algebra.r), dtype=np.int64
        )
        coeffs[::p] = self.coeffs
        return LaurentSeries(self.algebra, self.v * p, coeffs, precision)

    def residue(self) -> IntArray:
        """The functional ``f -> res(f dT / (1 + T))``."""
        if self.precision < 0:
            raise InsufficientPrecision(
                f"Residue needs precision >= 0, got {self.precision}"
            )
        if self.is_zero or self.v > -1:
            return self.algebra.zero
        block = self.window(self.v, 0)[::-1]
        signs = np.where(np.arange(len(block)) % 2 == 0, 1, -1)
        return np.asarray(
            (signs[:, None] * block).sum(axis=0) % self.p, dtype=np.int64
        )

    def __repr__(self) -> str:
        terms = [
            f"{c.tolist() if len(c) > 1 else int(c[0])}*T^{self.v + i}"
            for i, c in enumerate(self.coeffs)
            if np.any(c)
        ]
        tail = "" if self.is_exact else f" + O(T^{self.precision})"
        return (" + ".join(terms) or "0") + tail


def mul(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    """Product, exact on ``[v_f + v_g, min(N_f + v_g, N_g + v_f))``."""
    precision = _saturate(
        min(f.precision + g.valuation, g.precision + f.valuation)
    )
    if f.is_zero or g.is_zero:
        return LaurentSeries.zero(f.algebra, precision)
    v = f.v + g.v
    a, b = f.coeffs, g.coeffs
    if precision != EXACT:
        a = a[: max(0, precision - v)]
        b = b[: max(0, precision - v)]
    return LaurentSeries.make(
        f.algebra, v, _convolve(f.algebra, a, b), precision
    )


def _invert_unit_block(
    algebra: CoefficientAlgebra, u: IntArray, n: int
) -> IntArray:
    """First ``n`` coefficients of ``1 / u`` for a power series ``u``."""
    w = algebra.inv(u[0]).reshape(1, -1)
    two = (2 * algebra.one).reshape(1, -1)
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        uw = _convolve(algebra, u[:prec], w)[:prec]
        corr = np.zeros((prec, algebra.r), dtype=np.int64)
        corr[: len(uw)] = -uw
        corr[0] += two[0]
        w = _convolve(algebra, w, corr % algebra.p)[:prec]
    return w[:n]


def invert(f: LaurentSeries, cap: int | None = None) -> LaurentSeries:
    """Inverse of ``f``; relative precision is preserved.

    Inverses of polynomials that are not monomials are truncated to
    relative precision ``cap`` (the configured working precision).
    """
    if f.is_zero or not f.algebra.is_unit(f.leading):
        raise NonUnitLeading(f"Leading coefficient of {f!r} is not a unit")
    v = f.v
    if f.is_exact and len(f.coeffs) == 1:
        return LaurentSeries.monomial(f.algebra, f.algebra.inv(f.leading), -v)
    rel = (cap or config.precision) if f.is_exact else f.precision - v
    u = f.window(v, v + min(rel, len(f.coeffs)) if f.is_exact else v + rel)
    if len(u) < rel:
        u = np.concatenate(
            [u, np.zeros((rel - len(u), f.algebra.r), dtype=np.int64)]
        )
    w = _invert_unit_block(f.algebra, u, rel)
    return LaurentSeries.make(f.algebra, -v, w, -v + rel)


def substitute(
    f: LaurentSeries, g: LaurentSeries, cap: int | None = None
) -> LaurentSeries:
    """Composition ``f(g)`` for ``g`` of positive valuation.

    Unknown terms of ``f`` contribute from ``T^(N_f * v_g)`` on, and the
    truncation of ``g`` from ``T^(N_g + (v_f - 1) * v_g)`` on.
    """
    if g.is_zero or g.valuation < 1 or not g.algebra.is_unit(g.leading):
        raise BadInnerValuation(
            "Inner series must have positive valuation and unit leading"
            " coefficient"
        )
    vg = g.valuation
    f_bound = _saturate(f.precision * vg) if f.precision > 0 else (
        f.precision * vg
    )
    if f.is_zero:
        return LaurentSeries.zero(f.algebra, f_bound)
    target = min(f_bound, _saturate(g.precision + (f.v - 1) * vg))
    if target == EXACT and f.v < 0 and not (
        g.is_exact and len(g.coeffs) == 1
    ):
        target = f.v * vg + (cap or config.precision)
    power = g.power(f.v, cap=(target - f.v * vg) if target != EXACT else cap)
    power = power.truncate(target)
    acc = LaurentSeries.zero(f.algebra, target)
    for i, c in enumerate(f.coeffs):
        if np.any(c):
            acc = acc + power.scale(c)
        if i + 1 < len(f.coeffs):
            power = (power * g).truncate(target)
    return acc.truncate(target)


def psi_ring(f: LaurentSeries) -> LaurentSeries:
    """``psi(T^(pj + r)) = (-1)^r T^j`` for ``0 <= r < p``."""
    p = f.p
    precision = f.precision if f.is_exact else f.precision // p
    if f.is_zero:
        return LaurentSeries.zero(f.algebra, precision)
    lo = (f.v // p) * p
    hi = -((-f.end) // p) * p
    if not f.is_exact:
        hi = min(hi, precision * p)
    if hi <= lo:
        return LaurentSeries.zero(f.algebra, precision)
    block = f.window(lo, hi).reshape(-1, p, f.algebra.r)
    signs = np.where(np.arange(p) % 2 == 0, 1, -1)
    coeffs = np.einsum("jrk,r->jk", block, signs) % p
    return LaurentSeries.make(f.algebra, lo // p, coeffs, precision)


class ActionKind(str, Enum):
    desc: str

    def __new__(cls, value: str, desc: str) -> ActionKind:
        member = str.__new__(cls, value)
        member._value_ = value
        member.desc = desc
        return member

    PHI = "phi", "Frobenius T -> T^p"
    GAMMA = "gamma", "Pro-p generator, chi = 1 + p"
    DELTA = "delta", "Generator of the torsion subgroup"


@lru_cache(maxsize=512)
def _action_coeffs(p: int, kind: ActionKind, j: int, n: int) -> IntArray:
    """Coefficients of ``(1 + T)^c - 1`` for exponents ``0 .. n - 1``."""
    cyc = CyclotomicData(p)
    k = legendre_valuation(max(n - 1, 0), p) + 1
    modulus = p**k
    if kind == ActionKind.GAMMA:
        c = pow(cyc.chi_gamma, j, modulus)
    else:
        c = pow(cyc.chi_delta(k), j % (p - 1), modulus)
    out = np.array(
        [padic_binomial(c, e, p, k) if e else 0 for e in range(n)],
        dtype=np.int64,
    )
    out.setflags(write=False)
    return out


def padic_binomial(c: int, n: int, p: int, k: int) -> int:
    try:
        return _padic_binomial(c, n, p, k)
    except InsufficientPrecision as e:
        raise InsufficientPadicPrecision(str(e)) from e


@dataclass(frozen=True)
class RingAction:
    """One of ``phi``, ``gamma^j`` or ``delta^j`` acting on A((T))."""

    kind: ActionKind
    power: int = 1

    def image(
        self, algebra: CoefficientAlgebra, precision: int | None = None
    ) -> LaurentSeries:
        """The series ``sigma(T)``, exact for ``phi`` and ``gamma``."""
        p = algebra.p
        if self.kind == ActionKind.PHI:
            return LaurentSeries.monomial(algebra, 1, p)
        if self.kind == ActionKind.DELTA and self.power % (p - 1) == 0:
            return LaurentSeries.monomial(algebra, 1, 1)
        if self.kind == ActionKind.GAMMA and precision is None:
            degree = (1 + p) ** self.power
            values = _action_coeffs(p, self.kind, self.power, degree + 1)
            return LaurentSeries.from_ints(algebra, 0, values.tolist())
        n = precision or config.precision
        values = _action_coeffs(p, self.kind, self.power, n)
        return LaurentSeries.from_ints(algebra, 0, values.tolist(), n)

    def __call__(
        self, f: LaurentSeries, cap: int | None = None
    ) -> LaurentSeries:
        if self.kind == ActionKind.PHI:
            phi = f
            for _ in range(self.power):
                phi = phi.phi()
            return phi
        if f.is_zero:
            return f
        if f.is_exact:
            if len(f.coeffs) == 1 and f.v == 0:
                return f
            target = max(f.end, f.v + (cap or config.precision))
            if self.kind == ActionKind.GAMMA and f.v >= 0:
                return substitute(f, self.image(f.algebra), cap)
        else:
            target = f.precision
        image = self.image(f.algebra, max(target - f.v + 1, 2))
        return substitute(f, image, cap).truncate(
            target if not f.is_exact else EXACT
        )


PHI = RingAction(ActionKind.PHI)
GAMMA = RingAction(ActionKind.GAMMA)
DELTA = RingAction(ActionKind.DELTA)


def gamma_image(
    algebra: CoefficientAlgebra,
    action: RingAction,
    precision: int,
    padic_precision: int | None = None,
) -> LaurentSeries:
    """``(1 + T)^c - 1`` on ``[1, precision)`` with ``c = chi(action)``."""
    if action.kind == ActionKind.PHI:
        raise MalformedInput("gamma_image takes gamma or delta powers")
    need = legendre_valuation(max(precision - 1, 0), algebra.p) + 1
    if padic_precision is not None and padic_precision < need:
        raise InsufficientPadicPrecision(
            f"Series to T^{precision} needs p-adic precision {need},"
            f" got {padic_precision}"
        )
    return action.image(algebra, precision)


def unit_inverse(f: LaurentSeries, cap: int | None = None) -> LaurentSeries:
    """Inverse of any unit of A((T)), including nilpotent polar terms.

    ``f`` is a unit iff some known coefficient is a unit of A. Terms
    below the first unit coefficient are nilpotent and are inverted by a
    finite geometric series.
    """
    if f.is_zero:
        raise NonUnitLeading("Zero series is not invertible")
    algebra = f.algebra
    if algebra.is_unit(f.leading):
        return invert(f, cap)
    units = [i for i, c in enumerate(f.coeffs) if algebra.is_unit(c)]
    if not units:
        raise NonUnitLeading(f"{f!r} has no unit coefficient")
    polar = LaurentSeries.make(algebra, f.v, f.coeffs[: units[0]])
    main_inv = invert(f - polar, cap)
    x = polar * main_inv
    term = total = LaurentSeries.constant(algebra, 1)
    for _ in range(algebra.r):
        term = -(term * x)
        total = total + term
    return main_inv * total
