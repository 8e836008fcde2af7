"""JSON file formats for modules, cocycles and reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import dataclasses_json
import numpy as np

from .coeffs import (
    AlgebraKind,
    CoefficientAlgebra,
    check_odd_prime,
    make_coefficient_algebra,
)
from .exceptions import MalformedInput
from .herr import Cocycle
from .laurent import EXACT, LaurentSeries
from .matrix import SeriesMatrix, Vector
from .pgmod import PhiGammaModule, make_module
from .rankone import CharacterLabel, SerreWeight2

CHI_GAMMA_CONVENTION = "1+p"


def model_exclude(value: Any) -> bool:
    if isinstance(value, str):
        return value == ""
    return value is None


class Model(dataclasses_json.DataClassJsonMixin):
    dataclass_json_config = dataclasses_json.config(
        undefined=dataclasses_json.Undefined.EXCLUDE, exclude=model_exclude
    )["dataclasses_json"]

    @classmethod
    def load(cls, path: Path | str) -> Any:
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise MalformedInput(f"Unable to read {path}: {e}") from e


def dumps(data: dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


@dataclass
class CoeffData(Model):
    kind: str = AlgebraKind.FINITE_FIELD.value
    degree: int = 1
    dim: int | None = None
    mult_table: list[Any] | None = None
    max_ideal: list[int] = field(default_factory=list)

    def to_algebra(self, p: int) -> CoefficientAlgebra:
        check_odd_prime(p)
        return make_coefficient_algebra(p, self.to_dict())

    @classmethod
    def from_algebra(cls, algebra: CoefficientAlgebra) -> CoeffData:
        if algebra.is_field and algebra.kind == AlgebraKind.FINITE_FIELD:
            return cls(degree=algebra.r)
        return cls(
            kind=AlgebraKind.LOCAL_ALGEBRA.value,
            degree=algebra.residue_degree,
            dim=algebra.r,
            mult_table=algebra.table.tolist(),
            max_ideal=list(algebra.max_ideal),
        )


@dataclass
class SeriesData(Model):
    """Coefficients are ints (prime-field values) or coordinate lists."""

    valuation: int = 0
    coeffs: list[Any] = field(default_factory=list)
    precision: int | None = None

    def to_series(self, algebra: CoefficientAlgebra) -> LaurentSeries:
        rows = []
        for c in self.coeffs:
            if isinstance(c, int):
                rows.append(algebra.from_int(c))
            elif isinstance(c, list) and len(c) == algebra.r:
                rows.append(np.asarray(c, dtype=np.int64))
            else:
                raise MalformedInput(f"Bad series coefficient {c!r}")
        precision = EXACT if self.precision is None else self.precision
        return LaurentSeries.make(algebra, self.valuation, rows, precision)

    @classmethod
    def from_series(cls, f: LaurentSeries) -> SeriesData:
        coeffs: list[Any] = (
            [int(c[0]) for c in f.coeffs]
            if f.algebra.r == 1
            else f.coeffs.tolist()
        )
        return cls(
            valuation=0 if f.is_zero and f.is_exact else int(f.v),
            coeffs=coeffs,
            precision=None if f.is_exact else int(f.precision),
        )


def _matrix(
    rows: list[list[SeriesData]], algebra: CoefficientAlgebra, name: str
) -> SeriesMatrix:
    d = len(rows)
    if not d or any(len(row) != d for row in rows):
        raise MalformedInput(f"{name} matrix is not square")
    return SeriesMatrix(
        algebra, [[s.to_series(algebra) for s in row] for row in rows]
    )


def _rows(mat: SeriesMatrix) -> list[list[SeriesData]]:
    return [[SeriesData.from_series(a) for a in row] for row in mat.rows]


@dataclass
class MatricesData(Model):
    """Phi, Gamma and Delta matrices; lift files carry no Delta."""

    phi: list[list[SeriesData]]
    gamma: list[list[SeriesData]]
    delta: list[list[SeriesData]] | None = None

    def to_matrices(self, algebra: CoefficientAlgebra) -> list[SeriesMatrix]:
        named = [("phi", self.phi), ("gamma", self.gamma)]
        if self.delta is not None:
            named.append(("delta", self.delta))
        mats = [_matrix(rows, algebra, name) for name, rows in named]
        if len({mat.d for mat in mats}) != 1:
            raise MalformedInput("Matrix sizes differ")
        return mats

    @classmethod
    def from_module(cls, m: PhiGammaModule) -> MatricesData:
        return cls(
            phi=_rows(m.phi), gamma=_rows(m.gamma), delta=_rows(m.delta)
        )


@dataclass
class ModuleData(Model):
    p: int
    matrices: MatricesData
    coeff: CoeffData = field(default_factory=CoeffData)
    rank: int | None = None
    chi_gamma: str = CHI_GAMMA_CONVENTION
    name: str = ""

    def to_module(self) -> PhiGammaModule:
        if self.chi_gamma != CHI_GAMMA_CONVENTION:
            raise MalformedInput(
                f"Unsupported chi_gamma convention {self.chi_gamma!r},"
                f" expected {CHI_GAMMA_CONVENTION!r}"
            )
        if self.matrices.delta is None:
            raise MalformedInput("Module file has no delta matrix")
        algebra = self.coeff.to_algebra(self.p)
        phi, gamma, delta = self.matrices.to_matrices(algebra)
        if self.rank is not None and self.rank != phi.d:
            raise MalformedInput(
                f"Declared rank {self.rank} but matrices are"
                f" {phi.d} x {phi.d}"
            )
        return make_module(algebra, phi, gamma, delta, name=self.name)

    @classmethod
    def from_module(cls, m: PhiGammaModule) -> ModuleData:
        return cls(
            p=m.p,
            matrices=MatricesData.from_module(m),
            coeff=CoeffData.from_algebra(m.algebra),
            rank=m.rank,
            name=m.name,
        )


def _vector(data: list[SeriesData], algebra: CoefficientAlgebra) -> Vector:
    return [s.to_series(algebra) for s in data]


@dataclass
class CocycleData(Model):
    module: ModuleData
    a: list[SeriesData]
    b: list[SeriesData]
    window: list[int] = field(default_factory=lambda: [0, 1])
    certified: bool = False

    def to_cocycle(self) -> Cocycle:
        m = self.module.to_module()
        a, b = _vector(self.a, m.algebra), _vector(self.b, m.algebra)
        if len(a) != m.rank or len(b) != m.rank:
            raise MalformedInput("Cocycle length differs from module rank")
        lo, hi = self.window
        return Cocycle(m, a, b, window=(lo, hi), certified=self.certified)

    @classmethod
    def from_cocycle(cls, c: Cocycle) -> CocycleData:
        return cls(
            module=ModuleData.from_module(c.module),
            a=[SeriesData.from_series(s) for s in c.a],
            b=[SeriesData.from_series(s) for s in c.b],
            window=list(c.window),
            certified=c.certified,
        )


@dataclass
class LabelData(Model):
    n: int
    a: list[int]

    def to_label(self) -> CharacterLabel:
        return CharacterLabel(self.n, tuple(self.a))

    @classmethod
    def from_label(cls, label: CharacterLabel) -> LabelData:
        return cls(n=label.n, a=list(label.a))


@dataclass
class WeightData(Model):
    k1: int
    k2: int

    @classmethod
    def from_weight(cls, weight: SerreWeight2) -> WeightData:
        return cls(k1=weight.k1, k2=weight.k2)


@dataclass
class ReportData(Model):
    """Command report; the result keys sit at the top level."""

    command: str
    result: dict[str, Any] = field(default_factory=dict)
    chi_gamma_convention: str = CHI_GAMMA_CONVENTION

    def to_dict(self, encode_json: bool = False) -> dict[str, Any]:
        return {
            **self.result,
            "command": self.command,
            "chi_gamma_convention": self.chi_gamma_convention,
        }


@dataclass
class SuiteCaseData(Model):
    index: int
    seed: int
    p: int
    q: int
    rank: int
    passed: bool = False
    valid: bool | None = None
    psi_bounds_ok: bool | None = None
    h0: int | None = None
    h1: int | None = None
    h2: int | None = None
    euler_ok: bool | None = None
    duality_ok: bool | None = None
    base_change_ok: bool | None = None
    pairing_ok: bool | None = None
    regress_ok: bool | None = None
    error: str = ""


@dataclass
class SuiteData(Model):
    seed: int
    p: int
    q: int
    d_max: int
    count: int
    passed: bool = True
    cases: list[SuiteCaseData] = field(default_factory=list)
    failures: list[int] = field(default_factory=list)
    chi_gamma_convention: str = CHI_GAMMA_CONVENTION
