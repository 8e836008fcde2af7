"""Matrices and column vectors over A((T))."""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from .coeffs import CoefficientAlgebra
from .exceptions import NonUnitLeading, NotEtale
from .fp import IntArray
from .laurent import EXACT, LaurentSeries, RingAction, unit_inverse

Vector = list[LaurentSeries]


def zero_vector(algebra: CoefficientAlgebra, d: int) -> Vector:
    return [LaurentSeries.zero(algebra) for _ in range(d)]


def vec_add(x: Vector, y: Vector) -> Vector:
    return [a + b for a, b in zip(x, y)]


def vec_sub(x: Vector, y: Vector) -> Vector:
    return [a - b for a, b in zip(x, y)]


def vec_scale(x: Vector, c: IntArray) -> Vector:
    return [a.scale(c) for a in x]


def vec_truncate(x: Vector, precision: int) -> Vector:
    return [a.truncate(precision) for a in x]


def vec_valuation(x: Vector) -> int:
    return min((a.valuation for a in x), default=EXACT)


def vec_precision(x: Vector) -> int:
    return min((a.precision for a in x), default=EXACT)


def vec_is_zero(x: Vector) -> bool:
    return all(a.is_zero for a in x)


def vec_window(x: Vector, lo: int, hi: int) -> IntArray:
    """Flattened coefficients, index ``(i * (hi - lo) + e - lo) * r + k``."""
    return np.concatenate([a.window(lo, hi).reshape(-1) for a in x])


def vec_from_window(
    algebra: CoefficientAlgebra, d: int, lo: int, data: IntArray
) -> Vector:
    block = np.asarray(data, dtype=np.int64).reshape(d, -1, algebra.r)
    return [LaurentSeries.make(algebra, lo, block[i]) for i in range(d)]


@dataclass(eq=False)
class SeriesMatrix:
    algebra: CoefficientAlgebra
    rows: list[list[LaurentSeries]]

    @classmethod
    def identity(cls, algebra: CoefficientAlgebra, d: int) -> SeriesMatrix:
        return cls.from_constants(algebra, np.eye(d, dtype=np.int64))

    @classmethod
    def from_constants(
        cls, algebra: CoefficientAlgebra, values: IntArray | Sequence[Any]
    ) -> SeriesMatrix:
        """Constant matrix from prime-field ints or ``(d, d, r)`` arrays."""
        arr = np.asarray(values, dtype=np.int64)
        if arr.ndim == 2:
            arr = np.einsum("ij,k->ijk", arr, algebra.one)
        d = arr.shape[0]
        return cls(
            algebra,
            [
                [LaurentSeries.constant(algebra, arr[i, j]) for j in range(d)]
                for i in range(d)
            ],
        )

    @classmethod
    def build(
        cls,
        algebra: CoefficientAlgebra,
        d: int,
        entry: Callable[[int, int], LaurentSeries],
    ) -> SeriesMatrix:
        return cls(
            algebra, [[entry(i, j) for j in range(d)] for i in range(d)]
        )

    @property
    def d(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentSeries:
        return self.rows[ij[0]][ij[1]]

    def entries(self) -> Iterator[LaurentSeries]:
        for row in self.rows:
            yield from row

    def column(self, j: int) -> Vector:
        return [row[j] for row in self.rows]

    def map(
        self, fn: Callable[[LaurentSeries], LaurentSeries]
    ) -> SeriesMatrix:
        return SeriesMatrix(
            self.algebra, [[fn(a) for a in row] for row in self.rows]
        )

    def __add__(self, other: SeriesMatrix) -> SeriesMatrix:
        return SeriesMatrix.build(
            self.algebra, self.d, lambda i, j: self[i, j] + other[i, j]
        )

    def __sub__(self, other: SeriesMatrix) -> SeriesMatrix:
        return SeriesMatrix.build(
            self.algebra, self.d, lambda i, j: self[i, j] - other[i, j]
        )

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        d = self.d

        def _entry(i: int, j: int) -> LaurentSeries:
            acc = LaurentSeries.zero(self.algebra)
            for k in range(d):
                acc = acc + self[i, k] * other[k, j]
            return acc

        return SeriesMatrix.build(self.algebra, d, _entry)

    def apply(self, x: Vector) -> Vector:
        out = []
        for row in self.rows:
            acc = LaurentSeries.zero(self.algebra)
            for a, b in zip(row, x):
                acc = acc + a * b
            out.append(acc)
        return out

    def scale(self, c: IntArray) -> SeriesMatrix:
        return self.map(lambda a: a.scale(c))

    def act(self, action: RingAction, cap: int | None = None) -> SeriesMatrix:
        return self.map(lambda a: action(a, cap))

    def truncate(self, precision: int) -> SeriesMatrix:
        return self.map(lambda a: a.truncate(precision))

    def transpose(self) -> SeriesMatrix:
        return SeriesMatrix.build(
            self.algebra, self.d, lambda i, j: self[j, i]
        )

    def kron(self, other: SeriesMatrix) -> SeriesMatrix:
        """Kronecker product with index ``i * other.d + j``."""
        n = other.d
        return SeriesMatrix.build(
            self.algebra,
            self.d * n,
            lambda a, b: self[a // n, b // n] * other[a % n, b % n],
        )

    def shifted(
        self, row_shift: Sequence[int], col_shift: Sequence[int]
    ) -> SeriesMatrix:
        """Entries multiplied by ``T^(col_shift[j] - row_shift[i])``."""
        return SeriesMatrix.build(
            self.algebra,
            self.d,
            lambda i, j: self[i, j].shift(col_shift[j] - row_shift[i]),
        )

    def map_coeffs(
        self, matrix: IntArray, algebra: CoefficientAlgebra
    ) -> SeriesMatrix:
        return SeriesMatrix(
            algebra,
            [
                [a.map_coeffs(matrix, algebra) for a in row]
                for row in self.rows
            ],
        )

    @property
    def min_valuation(self) -> int:
        return min((a.valuation for a in self.entries()), default=EXACT)

    @property
    def precision(self) -> int:
        return min((a.precision for a in self.entries()), default=EXACT)

    def agrees(self, other: SeriesMatrix) -> bool:
        return all(
            self[i, j].agrees(other[i, j])
            for i in range(self.d)
            for j in range(self.d)
        )

    def is_zero(self) -> bool:
        return all(a.is_zero for a in self.entries())

    def constant_term(self) -> IntArray:
        """Coefficients at ``T^0`` as a ``(d, d, r)`` array."""
        return np.array(
            [[a.coeff(0) for a in row] for row in self.rows], dtype=np.int64
        ).reshape(self.d, self.d, self.algebra.r)

    def inverse(self, cap: int | None = None) -> SeriesMatrix:
        """Gauss-Jordan inverse over A((T)); raises NotEtale if singular."""
        d, algebra = self.d, self.algebra
        a = [list(row) for row in self.rows]
        inv = [list(row) for row in SeriesMatrix.identity(algebra, d).rows]
        for col in range(d):
            pivot = _choose_pivot(a, col)
            if pivot is None:
                raise NotEtale(f"Matrix is not invertible (column {col})")
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            scale = unit_inverse(a[col][col], cap)
            a[col] = [x * scale for x in a[col]]
            inv[col] = [x * scale for x in inv[col]]
            for row in range(d):
                if row == col or a[row][col].is_zero:
                    continue
                factor = a[row][col]
                a[row] = [x - factor * y for x, y in zip(a[row], a[col])]
                inv[row] = [x - factor * y for x, y in zip(inv[row], inv[col])]
        return SeriesMatrix(algebra, inv)


def _unit_exponent(f: LaurentSeries) -> int | None:
    for i, c in enumerate(f.coeffs):
        if f.algebra.is_unit(c):
            return f.v + i
    return None


def _choose_pivot(a: list[list[LaurentSeries]], col: int) -> int | None:
    best: tuple[int, int] | None = None
    for row in range(col, len(a)):
        e = _unit_exponent(a[row][col])
        if e is not None and (best is None or e < best[0]):
            best = (e, row)
    return None if best is None else best[1]


def check_unit(f: LaurentSeries) -> None:
    if _unit_exponent(f) is None:
        raise NonUnitLeading(f"{f!r} is not a unit")
