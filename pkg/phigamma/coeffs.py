from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np

from .exceptions import (
    InsufficientPrecision,
    MalformedInput,
    NonUnit,
    NotAssociative,
    NotCommutative,
    NotLocal,
    ZeroInput,
)
from .fp import (
    IntArray,
    NoSolution,
    nullspace_mod,
    rank_mod,
    row_basis,
    solve_mod,
)

log = logging.getLogger(__name__)


class AlgebraKind(str, Enum):
    desc: str

    def __new__(cls, value: str, desc: str) -> AlgebraKind:
        member = str.__new__(cls, value)
        member._value_ = value
        member.desc = desc
        return member

    FINITE_FIELD = "finite_field", "Finite field F_q"
    LOCAL_ALGEBRA = "local_algebra", "Finite local F_p-algebra"


def is_prime(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def check_odd_prime(p: int) -> int:
    if p == 2 or not is_prime(p):
        raise MalformedInput(f"{p} is not an odd prime")
    return p


@dataclass(eq=False)
class CoefficientAlgebra:
    """Commutative finite local F_p-algebra given by structure constants.

    ``table[i, j, k]`` is the coefficient of ``e_k`` in ``e_i * e_j``.
    Basis element 0 is the unit, and the maximal ideal is spanned by the
    basis elements listed in ``max_ideal``.
    """

    p: int
    table: IntArray
    max_ideal: tuple[int, ...] = ()
    kind: AlgebraKind = AlgebraKind.LOCAL_ALGEBRA
    modulus: tuple[int, ...] = field(default=())

    @property
    def r(self) -> int:
        return int(self.table.shape[0])

    @property
    def residue_degree(self) -> int:
        return self.r - len(self.max_ideal)

    @property
    def q(self) -> int:
        return int(self.p**self.residue_degree)

    @property
    def is_field(self) -> bool:
        return not self.max_ideal

    @cached_property
    def key(self) -> tuple[Any, ...]:
        return (self.p, self.table.tobytes(), self.table.shape, self.max_ideal)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoefficientAlgebra):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @cached_property
    def residue_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.r) if i not in self.max_ideal)

    @property
    def one(self) -> IntArray:
        x = np.zeros(self.r, dtype=np.int64)
        x[0] = 1
        return x

    @property
    def zero(self) -> IntArray:
        return np.zeros(self.r, dtype=np.int64)

    def from_int(self, c: int) -> IntArray:
        return (self.one * (c % self.p)) % self.p

    def element(self, coords: Sequence[int]) -> IntArray:
        if len(coords) != self.r:
            raise MalformedInput(
                f"Element {list(coords)} does not have {self.r} components"
            )
        return np.asarray(coords, dtype=np.int64) % self.p

    def mul(self, x: IntArray, y: IntArray) -> IntArray:
        return np.asarray(
            np.einsum("i,j,ijk->k", x, y, self.table) % self.p,
            dtype=np.int64,
        )

    def mult_matrix(self, x: IntArray) -> IntArray:
        """Matrix of ``y -> x * y`` acting on coordinate columns."""
        return np.asarray(
            np.einsum("i,ijk->kj", x, self.table) % self.p, dtype=np.int64
        )

    def residue(self, x: IntArray) -> IntArray:
        return x[list(self.residue_indices)] % self.p

    def is_zero(self, x: IntArray) -> bool:
        return not np.any(x % self.p)

    def is_unit(self, x: IntArray) -> bool:
        return bool(np.any(self.residue(x)))

    def inv(self, x: IntArray) -> IntArray:
        if not self.is_unit(x):
            raise NonUnit(f"{x.tolist()} is not a unit")
        try:
            return solve_mod(self.mult_matrix(x), self.one, self.p)
        except NoSolution as e:
            raise NonUnit(f"{x.tolist()} is not a unit") from e

    def pow(self, x: IntArray, n: int) -> IntArray:
        if n < 0:
            return self.pow(self.inv(x), -n)
        result, base = self.one, x % self.p
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def elements(self) -> Iterator[IntArray]:
        """All elements; exponential in ``r`` and meant for small algebras."""
        for coords in itertools.product(range(self.p), repeat=self.r):
            yield np.asarray(coords, dtype=np.int64)

    def residue_units(self) -> list[IntArray]:
        """Units whose components lie in the residue-field coordinates."""
        units = []
        idx = list(self.residue_indices)
        for coords in itertools.product(range(self.p), repeat=len(idx)):
            if not any(coords):
                continue
            x = self.zero
            x[idx] = coords
            units.append(x)
        return units

    def multiplicative_order(self, x: IntArray) -> int:
        y, n = x % self.p, 1
        while not np.array_equal(y, self.one):
            y = self.mul(y, x)
            n += 1
            if n > self.q**self.r:
                raise NonUnit(f"{x.tolist()} is not a unit")
        return n

    @cached_property
    def multiplicative_generator(self) -> IntArray:
        if not self.is_field:
            raise NonUnit("Only fields have a cyclic unit group here")
        for x in self.residue_units():
            if self.multiplicative_order(x) == self.q - 1:
                return x
        raise NonUnit("No multiplicative generator found")

    @cached_property
    def socle_dim(self) -> int:
        """F_p-dimension of the annihilator of the maximal ideal."""
        if self.is_field:
            return self.r
        rows = [self.mult_matrix(self.basis(i)) for i in self.max_ideal]
        return int(nullspace_mod(np.vstack(rows), self.p).shape[0])

    @property
    def is_gorenstein(self) -> bool:
        return self.socle_dim == self.residue_degree

    @cached_property
    def residue_field(self) -> CoefficientAlgebra:
        """``A / m`` on the residue coordinates."""
        if self.is_field:
            return self
        idx = list(self.residue_indices)
        return CoefficientAlgebra(
            p=self.p,
            table=self.table[np.ix_(idx, idx, idx)] % self.p,
            kind=AlgebraKind.FINITE_FIELD,
        )

    @property
    def residue_projection(self) -> IntArray:
        return np.eye(self.r, dtype=np.int64)[list(self.residue_indices)]

    @cached_property
    def filtration_dims(self) -> list[int]:
        """F_p-dimensions of ``m^i / m^(i+1)`` for ``i = 0, 1, ...``."""
        dims = [self.residue_degree]
        power = np.eye(self.r, dtype=np.int64)[list(self.max_ideal)]
        while len(power):
            products = [
                (self.mult_matrix(self.basis(i)) @ power.T).T % self.p
                for i in self.max_ideal
            ]
            following = row_basis(np.vstack(products), self.p)
            dims.append(len(power) - len(following))
            power = following
        return dims

    def basis(self, i: int) -> IntArray:
        x = self.zero
        x[i] = 1
        return x

    def validate(self) -> CoefficientAlgebra:
        p, t, r = self.p, self.table % self.p, self.r
        check_odd_prime(p)
        if t.shape != (r, r, r):
            raise MalformedInput(f"Multiplication table shape {t.shape}")
        if not np.array_equal(t, t.transpose(1, 0, 2)):
            raise NotCommutative("Multiplication table is not commutative")
        left = np.einsum("ijm,mkl->ijkl", t, t) % p
        right = np.einsum("jkm,iml->ijkl", t, t) % p
        if not np.array_equal(left, right):
            raise NotAssociative("Multiplication table is not associative")
        if not np.array_equal(t[0], np.eye(r, dtype=np.int64)):
            raise NotLocal("Basis element 0 is not the unit")
        self.check_local()
        return self

    def check_local(self) -> None:
        ideal = set(self.max_ideal)
        if 0 in ideal or not ideal <= set(range(self.r)):
            raise NotLocal(f"Bad maximal ideal indices {self.max_ideal}")
        outside = list(self.residue_indices)
        for m in ideal:
            if np.any(self.table[:, m][:, outside] % self.p):
                raise NotLocal("Maximal ideal span is not an ideal")
        power = [self.basis(m) for m in ideal]
        for _ in range(self.r + 1):
            if not power:
                break
            products = np.array(
                [self.mul(self.basis(m), v) for m in ideal for v in power]
            )
            basis = row_basis(products, self.p)
            if len(basis) >= len(power) and power:
                raise NotLocal("Maximal ideal is not nilpotent")
            power = list(basis)
        idx = outside
        for coords in itertools.product(range(self.p), repeat=len(idx)):
            if not any(coords):
                continue
            x = self.zero
            x[idx] = coords
            lx = self.mult_matrix(x)[np.ix_(idx, idx)]
            if rank_mod(lx, self.p) < len(idx):
                raise NotLocal("Quotient by the maximal ideal is not a field")

    def as_dict(self) -> dict[str, Any]:
        if self.kind == AlgebraKind.FINITE_FIELD:
            return {"kind": self.kind.value, "degree": self.r}
        return {
            "kind": self.kind.value,
            "dim": self.r,
            "mult_table": (self.table % self.p).tolist(),
            "max_ideal": list(self.max_ideal),
        }


def _poly_mod(a: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo monic ``g``; coefficients low degree first."""
    a = [c % p for c in a]
    n = len(g) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i]
        if c:
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * g[j]) % p
    return (a + [0] * n)[:n]


def irreducible_polynomial(p: int, f: int) -> list[int]:
    """First monic irreducible polynomial of degree ``f`` over F_p."""
    for tail in itertools.product(range(p), repeat=f):
        g = list(reversed(tail)) + [1]
        if g[0] == 0 and f > 1:
            continue
        if all(
            any(_poly_mod(g, list(h) + [1], p))
            for d in range(1, f // 2 + 1)
            for h in itertools.product(range(p), repeat=d)
        ):
            return g
    raise NotLocal(f"No irreducible polynomial of degree {f} mod {p}")


def finite_field(p: int, degree: int = 1) -> CoefficientAlgebra:
    check_odd_prime(p)
    if degree < 1:
        raise MalformedInput(f"Field degree must be positive, got {degree}")
    g = irreducible_polynomial(p, degree) if degree > 1 else [0, 1]
    table = np.zeros((degree, degree, degree), dtype=np.int64)
    for i in range(degree):
        for j in range(degree):
            mono = [0] * (i + j) + [1]
            table[i, j] = _poly_mod(mono, g, p) if degree > 1 else [1]
    return CoefficientAlgebra(
        p=p,
        table=table,
        kind=AlgebraKind.FINITE_FIELD,
        modulus=tuple(g),
    )


def make_coefficient_algebra(
    p: int, spec: dict[str, Any]
) -> CoefficientAlgebra:
    kind = spec.get("kind")
    if kind == AlgebraKind.FINITE_FIELD.value:
        return finite_field(p, int(spec.get("degree", 1)))
    if kind == AlgebraKind.LOCAL_ALGEBRA.value:
        try:
            r = int(spec["dim"])
            table = np.asarray(spec["mult_table"], dtype=np.int64)
            max_ideal = tuple(int(i) for i in spec.get("max_ideal", []))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Bad local algebra data: {e}") from e
        if table.shape != (r, r, r):
            raise MalformedInput(
                f"Multiplication table shape {table.shape} != {(r, r, r)}"
            )
        return CoefficientAlgebra(
            p=p, table=table % p, max_ideal=max_ideal
        ).validate()
    raise MalformedInput(f"Unknown coefficient kind {kind!r}")


def dual_numbers(p: int) -> CoefficientAlgebra:
    return square_zero_extension(finite_field(p), 1).algebra


@dataclass(eq=False)
class SquareZeroExtension:
    """``base[e_1..e_k]`` with all products ``e_i * e_j`` zero.

    Coordinates are the base block followed by one base block per
    ``e_i``.
    """

    base: CoefficientAlgebra
    k: int
    algebra: CoefficientAlgebra

    @property
    def r(self) -> int:
        return self.base.r

    def project(self, x: IntArray) -> IntArray:
        return x[..., : self.r] % self.base.p

    def embed(self, x: IntArray) -> IntArray:
        pad = [(0, 0)] * (x.ndim - 1) + [(0, self.r * self.k)]
        return np.pad(x % self.base.p, pad)

    def ideal_component(self, x: IntArray, i: int) -> IntArray:
        start = self.r * (i + 1)
        return x[..., start : start + self.r] % self.base.p

    def from_components(
        self, a: IntArray, parts: Sequence[IntArray]
    ) -> IntArray:
        return np.concatenate([a] + list(parts), axis=-1) % self.base.p

    def eps(self, i: int) -> IntArray:
        x = self.algebra.zero
        x[self.r * (i + 1)] = 1
        return x


def square_zero_extension(
    base: CoefficientAlgebra, k: int = 1
) -> SquareZeroExtension:
    r = base.r
    n = r * (k + 1)
    table = np.zeros((n, n, n), dtype=np.int64)
    table[:r, :r, :r] = base.table
    for i in range(k):
        s = slice(r * (i + 1), r * (i + 2))
        table[:r, s, s] = base.table
        table[s, :r, s] = base.table
    max_ideal = tuple(base.max_ideal) + tuple(range(r, n))
    algebra = CoefficientAlgebra(p=base.p, table=table, max_ideal=max_ideal)
    return SquareZeroExtension(base=base, k=k, algebra=algebra)


def embedding_matrix(
    src: CoefficientAlgebra, dst: CoefficientAlgebra
) -> IntArray:
    """Matrix sending ``src`` coordinates to ``dst`` coordinates.

    Supports the prime field into any algebra of the same characteristic
    and a base into its square-zero extensions.
    """
    if src.p != dst.p:
        raise MalformedInput("Characteristics differ")
    if src == dst:
        return np.eye(src.r, dtype=np.int64)
    if src.r == 1:
        m = np.zeros((dst.r, 1), dtype=np.int64)
        m[0, 0] = 1
        return m
    if dst.r % src.r == 0 and np.array_equal(
        dst.table[: src.r, : src.r, : src.r], src.table
    ):
        m = np.zeros((dst.r, src.r), dtype=np.int64)
        m[: src.r, : src.r] = np.eye(src.r, dtype=np.int64)
        return m
    raise MalformedInput("No supported embedding between these algebras")


def legendre_valuation(n: int, p: int) -> int:
    """``v_p(n!)``."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def teichmuller(a: int, p: int, k: int) -> int:
    """The (p-1)-st root of unity mod ``p**k`` congruent to ``a`` mod p."""
    if a % p == 0:
        raise ZeroInput(f"{a} has no Teichmüller lift mod {p}")
    if k < 1:
        raise InsufficientPrecision(f"Precision {k} < 1")
    modulus = p**k
    x = a % modulus
    while (y := pow(x, p, modulus)) != x:
        x = y
    return x


def padic_binomial(c: int, n: int, p: int, k: int) -> int:
    """``binom(c, n) mod p`` for ``c`` known modulo ``p**k``."""
    if n < 0:
        return 0
    if n and k <= legendre_valuation(n, p):
        raise InsufficientPrecision(
            f"binom(c, {n}) needs p-adic precision above"
            f" {legendre_valuation(n, p)}, got {k}"
        )
    c %= p**k
    result = 1
    while n:
        c_digit, n_digit = c % p, n % p
        if n_digit > c_digit:
            return 0
        result = result * _small_binomial(c_digit, n_digit) % p
        c //= p
        n //= p
    return result


def _small_binomial(c: int, n: int) -> int:
    out = 1
    for i in range(n):
        out = out * (c - i) // (i + 1)
    return out


def primitive_root(p: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class CyclotomicData:
    """Values of the cyclotomic character on the chosen generators.

    ``gamma`` is the pro-p generator with ``chi(gamma) = 1 + p`` and
    ``delta`` generates the torsion part, with ``chi(delta)`` the
    Teichmüller lift of the least primitive root mod p.
    """

    p: int

    @property
    def chi_gamma(self) -> int:
        return 1 + self.p

    @property
    def generator(self) -> int:
        return primitive_root(self.p)

    def chi_delta(self, k: int) -> int:
        return teichmuller(self.generator, self.p, k)

    def teichmuller_table(self, k: int) -> dict[int, int]:
        return {a: teichmuller(a, self.p, k) for a in range(1, self.p)}
