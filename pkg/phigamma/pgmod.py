"""Étale (phi, Gamma)-modules with an explicit torsion generator.

Coordinates are columns: ``sigma(m)`` has coordinates
``Sigma @ sigma(x)`` where ``Sigma`` is the matrix of ``sigma`` and
``sigma(x)`` acts entrywise on the coordinate series.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .coeffs import (
    CoefficientAlgebra,
    CyclotomicData,
    embedding_matrix,
    finite_field,
)
from .config import config, precision_cached
from .exceptions import (
    BoundExceeded,
    CommutationFailure,
    DeltaOrderFailure,
    NonUnit,
    NotACocycle,
    NotBlockTriangular,
    NotContinuous,
    NotEtale,
)
from .fp import IntArray, mod_p
from .laurent import (
    DELTA,
    EXACT,
    GAMMA,
    PHI,
    ActionKind,
    LaurentSeries,
    RingAction,
    invert,
    psi_ring,
)
from .matrix import (
    SeriesMatrix,
    Vector,
    vec_add,
    vec_is_zero,
    vec_sub,
    vec_valuation,
    zero_vector,
)

log = logging.getLogger(__name__)

HomMatrix = list[list[LaurentSeries]]


@dataclass(frozen=True)
class CharacterParams:
    a_phi: IntArray
    c_gamma: IntArray
    c_delta: IntArray


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice spanned by ``T^shifts[i] b_i`` with the derived bounds.

    ``b_i`` are the columns of ``basis``, or the given basis when it is
    ``None``.
    """

    shifts: tuple[int, ...]
    height: int
    kernel_bound: int
    psi_shift: int
    phi_stable: bool
    psi_stable: bool
    basis: SeriesMatrix | None = field(default=None, compare=False)

    @property
    def shift(self) -> int:
        return min(self.shifts, default=0)

    @property
    def height_bound(self) -> int:
        return self.height


@dataclass(frozen=True)
class ContinuityWitness:
    continuous: bool
    n: int
    s: int = 0


@dataclass(eq=False)
class PhiGammaModule:
    algebra: CoefficientAlgebra
    phi: SeriesMatrix
    gamma: SeriesMatrix
    delta: SeriesMatrix
    name: str = ""
    validated: bool = field(default=False, compare=False)

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def rank(self) -> int:
        return self.phi.d

    @precision_cached
    def phi_inv(self) -> SeriesMatrix:
        return self.phi.inverse()

    @precision_cached
    def lattice(self) -> LatticeSpec:
        return stabilize_lattice(self)

    @property
    def height(self) -> int:
        return self.lattice.height

    @precision_cached
    def stabilized(self) -> PhiGammaModule:
        """Isomorphic module whose standard lattice is stable."""
        return lattice_module(self, self.lattice)

    def matrix(self, action: RingAction) -> SeriesMatrix:
        return {
            ActionKind.PHI: self.phi,
            ActionKind.GAMMA: self.gamma,
            ActionKind.DELTA: self.delta,
        }[action.kind]

    def act(
        self, action: RingAction, x: Vector, cap: int | None = None
    ) -> Vector:
        """``sigma_M(x)`` for one application of ``sigma``."""
        return self.matrix(action).apply([action(a, cap) for a in x])

    def phi_vec(self, x: Vector) -> Vector:
        return self.act(PHI, x)

    def gamma_vec(self, x: Vector, cap: int | None = None) -> Vector:
        return self.act(GAMMA, x, cap)

    def delta_vec(self, x: Vector, cap: int | None = None) -> Vector:
        return self.act(DELTA, x, cap)

    def psi_vec(self, x: Vector) -> Vector:
        return psi_on_module(self, x)

    def e_delta(self, x: Vector, cap: int | None = None) -> Vector:
        """Projector ``-sum_j delta^j`` onto the Delta-invariants."""
        total, term = x, x
        for _ in range(self.p - 2):
            term = self.delta_vec(term, cap)
            total = vec_add(total, term)
        return [(-a) for a in total]

    def validate(self) -> PhiGammaModule:
        cap = config.precision
        for attempt in (cap, 2 * cap):
            self.check_commutation(attempt)
        witness = is_continuous(self)
        if not witness.continuous:
            raise NotContinuous(
                f"gamma - 1 is not topologically nilpotent on {self.label}"
            )
        self.validated = True
        log.debug(
            "Validated %s: height %d, shifts %s",
            self.label,
            self.height,
            self.lattice.shifts,
        )
        return self

    def check_commutation(self, cap: int) -> None:
        p = self.p
        phi, gamma, delta = self.phi, self.gamma, self.delta
        _ = self.phi_inv
        checks = (
            ("Phi phi(Gamma) = Gamma gamma(Phi)", phi, gamma, GAMMA),
            ("Phi phi(Delta) = Delta delta(Phi)", phi, delta, DELTA),
        )
        for identity, left, right, action in checks:
            lhs = left @ right.act(PHI)
            rhs = right @ left.act(action, cap)
            if not lhs.agrees(rhs):
                raise CommutationFailure(f"{identity} fails")
        lhs = gamma @ delta.act(GAMMA, cap)
        rhs = delta @ gamma.act(DELTA, cap)
        if not lhs.agrees(rhs):
            raise CommutationFailure(
                "Gamma gamma(Delta) = Delta delta(Gamma) fails"
            )
        prod = delta
        for j in range(1, p - 1):
            prod = prod @ delta.act(RingAction(ActionKind.DELTA, j), cap)
        if not prod.agrees(SeriesMatrix.identity(self.algebra, self.rank)):
            raise DeltaOrderFailure(
                "Delta delta(Delta) ... delta^(p-2)(Delta) is not the identity"
            )

    @property
    def label(self) -> str:
        return self.name or f"rank {self.rank} module"

    def to_original(self, x: Vector) -> Vector:
        """Coordinates in the stabilized basis to the given basis."""
        spec = self.lattice
        y = [a.shift(s) for a, s in zip(x, spec.shifts)]
        return y if spec.basis is None else spec.basis.apply(y)

    def from_original(self, x: Vector) -> Vector:
        spec = self.lattice
        if spec.basis is not None:
            x = spec.basis.inverse().apply(x)
        return [a.shift(-s) for a, s in zip(x, spec.shifts)]


def make_module(
    algebra: CoefficientAlgebra,
    phi: SeriesMatrix,
    gamma: SeriesMatrix,
    delta: SeriesMatrix,
    name: str = "",
) -> PhiGammaModule:
    return PhiGammaModule(algebra, phi, gamma, delta, name=name)


def scalar_matrix(algebra: CoefficientAlgebra, c: IntArray) -> SeriesMatrix:
    return SeriesMatrix(algebra, [[LaurentSeries.constant(algebra, c)]])


def character_module(
    algebra: CoefficientAlgebra, params: CharacterParams, name: str = ""
) -> PhiGammaModule:
    p = algebra.p
    for label, value in (
        ("a_phi", params.a_phi),
        ("c_gamma", params.c_gamma),
        ("c_delta", params.c_delta),
    ):
        if not algebra.is_unit(value):
            raise NonUnit(f"{label} = {value.tolist()} is not a unit")
    if algebra.is_unit((params.c_gamma - algebra.one) % p):
        raise NotContinuous("c_gamma - 1 must lie in the maximal ideal")
    if not np.array_equal(algebra.pow(params.c_delta, p - 1), algebra.one):
        raise DeltaOrderFailure("c_delta^(p-1) != 1")
    return PhiGammaModule(
        algebra,
        scalar_matrix(algebra, params.a_phi),
        scalar_matrix(algebra, params.c_gamma),
        scalar_matrix(algebra, params.c_delta),
        name=name,
    )


def trivial_module(algebra: CoefficientAlgebra) -> PhiGammaModule:
    one = algebra.one
    return character_module(
        algebra, CharacterParams(one, one, one), name="trivial"
    )


def tensor(m: PhiGammaModule, n: PhiGammaModule) -> PhiGammaModule:
    return PhiGammaModule(
        m.algebra,
        m.phi.kron(n.phi),
        m.gamma.kron(n.gamma),
        m.delta.kron(n.delta),
        name=f"({m.label}) x ({n.label})",
    )


def dual(m: PhiGammaModule) -> PhiGammaModule:
    return PhiGammaModule(
        m.algebra,
        m.phi_inv.transpose(),
        m.gamma.inverse().transpose(),
        m.delta.inverse().transpose(),
        name=f"dual({m.label})",
    )


def tate_twist(m: PhiGammaModule, n: int) -> PhiGammaModule:
    """Twist by the n-th power of the mod p cyclotomic character.

    ``chi(gamma) = 1 + p`` is trivial mod p, so only Delta changes.
    """
    cyc = CyclotomicData(m.p)
    g_n = m.algebra.from_int(pow(cyc.generator, n % (m.p - 1), m.p))
    return PhiGammaModule(
        m.algebra,
        m.phi,
        m.gamma,
        m.delta.scale(g_n),
        name=f"{m.label}({n})",
    )


def cartier_dual(m: PhiGammaModule) -> PhiGammaModule:
    return tate_twist(dual(m), 1)


def hom_module(m1: PhiGammaModule, m2: PhiGammaModule) -> PhiGammaModule:
    """``Hom(m1, m2)``; coordinate ``k * d2 + j`` is entry ``(j, k)``."""
    return tensor(dual(m1), m2)


def base_change(
    m: PhiGammaModule, algebra: CoefficientAlgebra
) -> PhiGammaModule:
    emb = embedding_matrix(m.algebra, algebra)
    return PhiGammaModule(
        algebra,
        m.phi.map_coeffs(emb, algebra),
        m.gamma.map_coeffs(emb, algebra),
        m.delta.map_coeffs(emb, algebra),
        name=m.name,
    )


def restrict_scalars(m: PhiGammaModule) -> PhiGammaModule:
    """``m`` as a module of rank ``d r`` over F_p((T)).

    Coordinate ``i * r + k`` is the k-th algebra coordinate of the i-th
    one; each entry becomes its regular representation.
    """
    algebra, d, r = m.algebra, m.rank, m.algebra.r
    prime = finite_field(m.p)

    def _restrict(mat: SeriesMatrix) -> SeriesMatrix:
        rows: list[list[LaurentSeries]] = [[] for _ in range(d * r)]
        for i in range(d):
            for j in range(d):
                f = mat[i, j]
                block = np.einsum("ei,ijk->ekj", f.coeffs, algebra.table)
                for k in range(r):
                    rows[i * r + k] += [
                        LaurentSeries.make(
                            prime, f.v, block[:, k, n], f.precision
                        )
                        for n in range(r)
                    ]
        return SeriesMatrix(prime, rows)

    return PhiGammaModule(
        prime,
        _restrict(m.phi),
        _restrict(m.gamma),
        _restrict(m.delta),
        name=f"{m.label} over F_p",
    )


def residue_module(m: PhiGammaModule) -> PhiGammaModule:
    """``M / m_A M`` over the residue field of A."""
    residue = m.algebra.residue_field
    proj = m.algebra.residue_projection
    return PhiGammaModule(
        residue,
        m.phi.map_coeffs(proj, residue),
        m.gamma.map_coeffs(proj, residue),
        m.delta.map_coeffs(proj, residue),
        name=f"{m.label} mod m_A",
    )


def psi_on_module(m: PhiGammaModule, x: Vector) -> Vector:
    """``psi_M = (psi x 1) o Phi^-1``."""
    return [psi_ring(a) for a in m.phi_inv.apply(x)]


def hom_matrix(v: Vector, d1: int, d2: int) -> HomMatrix:
    return [[v[k * d2 + j] for k in range(d1)] for j in range(d2)]


def hom_vector(f: HomMatrix) -> Vector:
    d2, d1 = len(f), len(f[0]) if f else 0
    return [f[j][k] for k in range(d1) for j in range(d2)]


def rect_mul(a: HomMatrix, b: HomMatrix) -> HomMatrix:
    algebra = a[0][0].algebra
    out = []
    for row in a:
        new_row = []
        for k in range(len(b[0])):
            acc = LaurentSeries.zero(algebra)
            for j, x in enumerate(row):
                acc = acc + x * b[j][k]
            new_row.append(acc)
        out.append(new_row)
    return out


def block_module(
    sub: PhiGammaModule,
    quotient: PhiGammaModule,
    x: HomMatrix,
    y: HomMatrix,
    z: HomMatrix | None = None,
    name: str = "",
) -> PhiGammaModule:
    """Upper block-triangular module with ``sub`` first."""
    algebra = sub.algebra
    d2, d1 = sub.rank, quotient.rank
    zero = LaurentSeries.zero(algebra)
    if z is None:
        z = [[zero] * d1 for _ in range(d2)]

    def _block(
        top: SeriesMatrix, corner: HomMatrix, bottom: SeriesMatrix
    ) -> SeriesMatrix:
        rows = [top.rows[i] + corner[i] for i in range(d2)]
        rows += [[zero] * d2 + bottom.rows[i] for i in range(d1)]
        return SeriesMatrix(algebra, rows)

    return PhiGammaModule(
        algebra,
        _block(sub.phi, x, quotient.phi),
        _block(sub.gamma, y, quotient.gamma),
        _block(sub.delta, z, quotient.delta),
        name=name or f"ext({quotient.label}, {sub.label})",
    )


def split_blocks(
    e: PhiGammaModule, sub_rank: int
) -> tuple[PhiGammaModule, PhiGammaModule, dict[str, HomMatrix]]:
    """Sub and quotient modules plus the top-right blocks of ``e``."""
    d = e.rank
    if not 0 < sub_rank < d:
        raise NotBlockTriangular(
            f"Sub-rank {sub_rank} out of range 1..{d - 1}"
        )
    corners: dict[str, HomMatrix] = {}
    parts: dict[str, tuple[SeriesMatrix, SeriesMatrix]] = {}
    for name, mat in (("phi", e.phi), ("gamma", e.gamma), ("delta", e.delta)):
        for i in range(sub_rank, d):
            for j in range(sub_rank):
                if not mat[i, j].is_zero:
                    raise NotBlockTriangular(
                        f"{name} entry ({i}, {j}) below the block diagonal"
                    )
        top = SeriesMatrix(
            e.algebra, [mat.rows[i][:sub_rank] for i in range(sub_rank)]
        )
        bottom = SeriesMatrix(
            e.algebra, [mat.rows[i][sub_rank:] for i in range(sub_rank, d)]
        )
        parts[name] = (top, bottom)
        corners[name] = [mat.rows[i][sub_rank:] for i in range(sub_rank)]
    sub = PhiGammaModule(
        e.algebra, parts["phi"][0], parts["gamma"][0], parts["delta"][0],
        name="sub",
    )
    quotient = PhiGammaModule(
        e.algebra, parts["phi"][1], parts["gamma"][1], parts["delta"][1],
        name="quotient",
    )
    return sub, quotient, corners


def cocycle_defect(
    m: PhiGammaModule, a: Vector, b: Vector, cap: int | None = None
) -> Vector:
    """``(gamma - 1) a - (phi - 1) b``; zero exactly for cocycles."""
    return vec_sub(
        vec_sub(m.gamma_vec(a, cap), a), vec_sub(m.phi_vec(b), b)
    )


def extension_from_cocycle(
    m1: PhiGammaModule,
    m2: PhiGammaModule,
    a: Vector,
    b: Vector,
    validate: bool = True,
) -> PhiGammaModule:
    """Extension of ``m1`` by ``m2`` from a cocycle of ``Hom(m1, m2)``.

    The blocks are ``a Phi_1`` and ``b Gamma_1`` after projecting the
    cocycle onto its Delta-invariant part, so the Delta block is zero.
    """
    h = hom_module(m1, m2)
    if not vec_is_zero(cocycle_defect(h, a, b)):
        raise NotACocycle("(gamma - 1) a != (phi - 1) b")
    a, b = h.e_delta(a), h.e_delta(b)
    d1, d2 = m1.rank, m2.rank
    x = rect_mul(hom_matrix(a, d1, d2), m1.phi.rows)
    y = rect_mul(hom_matrix(b, d1, d2), m1.gamma.rows)
    e = block_module(m2, m1, x, y)
    return e.validate() if validate else e


def change_basis(m: PhiGammaModule, basis: SeriesMatrix) -> PhiGammaModule:
    """The module in the basis given by the columns of ``basis``.

    With ``x = B y`` the matrix of ``sigma`` becomes
    ``B^-1 Sigma sigma(B)``.
    """
    inv = basis.inverse()
    return PhiGammaModule(
        m.algebra,
        inv @ m.phi @ basis.act(PHI),
        inv @ m.gamma @ basis.act(GAMMA),
        inv @ m.delta @ basis.act(DELTA),
        name=m.name,
    )


def lattice_basis(
    algebra: CoefficientAlgebra, d: int, generators: Sequence[Vector]
) -> SeriesMatrix:
    """Upper triangular basis of the A[[T]]-span of ``generators``.

    Rows are cleared from the bottom up, each with a pivot of least
    valuation; the span must be free of rank ``d``.
    """
    pool = [g for g in generators if not vec_is_zero(g)]
    columns: list[Vector] = [zero_vector(algebra, d) for _ in range(d)]
    for i in reversed(range(d)):
        live = [g for g in pool if not g[i].is_zero]
        if not live:
            raise NotEtale(f"Generators do not span coordinate {i}")
        v = min(g[i].valuation for g in live)
        pivots = [
            g for g in live
            if g[i].valuation == v and algebra.is_unit(g[i].leading)
        ]
        if not pivots:
            raise BoundExceeded(
                f"Span is not free over A[[T]] at coordinate {i}"
            )
        pivot = pivots[0]
        inv = invert(pivot[i])
        rest = []
        for g in pool:
            if g is pivot:
                continue
            if not g[i].is_zero:
                factor = g[i] * inv
                g = vec_sub(g, [factor * x for x in pivot])
            if not vec_is_zero(g):
                rest.append(g)
        pool = rest
        columns[i] = pivot
    return SeriesMatrix(
        algebra, [[columns[j][i] for j in range(d)] for i in range(d)]
    )


def saturate_lattice(m: PhiGammaModule) -> SeriesMatrix:
    """Basis of a Gamma- and Delta-stable lattice containing A[[T]]^d.

    The lattice ``L`` grows as ``L + gamma L + delta L`` until both
    matrices are integral in its basis.
    """
    d = m.rank
    basis = SeriesMatrix.identity(m.algebra, d)
    for rounds in range(config.lattice_rounds):
        conj = change_basis(m, basis)
        if conj.gamma.min_valuation >= 0 and conj.delta.min_valuation >= 0:
            log.debug("Saturated %s after %d rounds", m.label, rounds)
            return basis
        columns = [basis.column(j) for j in range(d)]
        generators = (
            columns
            + [m.gamma_vec(c) for c in columns]
            + [m.delta_vec(c) for c in columns]
        )
        basis = lattice_basis(m.algebra, d, generators)
    raise BoundExceeded(
        f"Lattice of {m.label} not saturated within"
        f" {config.lattice_rounds} rounds"
    )


def _valuations(mat: SeriesMatrix) -> list[list[int]]:
    return [[mat[i, j].valuation for j in range(mat.d)] for i in range(mat.d)]


def diagonal_shifts(m: PhiGammaModule) -> list[int] | None:
    """Shifts ``s`` with ``T^s_i e_i`` spanning a stable lattice, if any.

    Integrality of the rescaled matrices is the system
    ``s_i <= v(G_ij) + s_j``, ``s_i <= v(D_ij) + s_j`` and
    ``s_i <= v(Phi_ij) + p s_j``; the greatest solution below a uniform
    start is found by iterating, then lowered uniformly as far as
    integrality of Phi allows.
    """
    p, d = m.p, m.rank
    phi_v, gamma_v, delta_v = (
        _valuations(m.phi), _valuations(m.gamma), _valuations(m.delta)
    )
    if any(min(gamma_v[i][i], delta_v[i][i]) < 0 for i in range(d)):
        return None
    finite = [
        v for vals in (phi_v, gamma_v, delta_v) for row in vals for v in row
        if v < EXACT
    ]
    start = 1 + sum(max(0, -v) for v in finite)
    for _ in range(3):
        shifts = _greatest_solution(d, p, start, phi_v, gamma_v, delta_v)
        if shifts is not None:
            break
        start *= 4
    else:
        return None
    assert shifts is not None
    lower = min(
        [
            (phi_v[i][j] + p * shifts[j] - shifts[i]) // (p - 1)
            for i in range(d)
            for j in range(d)
            if phi_v[i][j] < EXACT
        ]
        or [0]
    )
    return [s - max(0, lower) for s in shifts]


def stabilize_lattice(m: PhiGammaModule) -> LatticeSpec:
    """A lattice stable under phi, gamma and delta, with its bounds.

    Diagonal rescalings of the given basis are tried first. Otherwise
    the lattice is saturated under gamma and delta and the diagonal
    search runs in the saturated basis, where it reduces to a uniform
    power of ``T``.
    """
    p, d = m.p, m.rank
    basis: SeriesMatrix | None = None
    target = m
    shifts = diagonal_shifts(m)
    if shifts is None:
        basis = saturate_lattice(m)
        target = change_basis(m, basis)
        shifts = diagonal_shifts(target)
    if shifts is None:
        raise BoundExceeded(f"No stable lattice found for {m.label}")
    inv = target.phi_inv
    height = max(
        [0]
        + [
            -(inv[i, j].valuation + shifts[j] - p * shifts[i])
            for i in range(d)
            for j in range(d)
            if not inv[i, j].is_zero
        ]
    )
    psi_shift = -(-height // (p - 1))
    stable = rescale(target, shifts)
    spec = LatticeSpec(
        shifts=tuple(shifts),
        height=height,
        kernel_bound=height // (p - 1) + 1,
        psi_shift=psi_shift,
        phi_stable=all(
            mat.min_valuation >= 0
            for mat in (stable.phi, stable.gamma, stable.delta)
        ),
        psi_stable=is_psi_stable(stable, psi_shift),
        basis=basis,
    )
    log.debug("Lattice for %s: %s", m.label, spec)
    return spec


def lattice_module(m: PhiGammaModule, spec: LatticeSpec) -> PhiGammaModule:
    """``m`` in the basis of the lattice described by ``spec``."""
    target = m if spec.basis is None else change_basis(m, spec.basis)
    return rescale(target, spec.shifts)


def unit_vector(algebra: CoefficientAlgebra, d: int, j: int, e: int) -> Vector:
    """``T^e`` times the j-th basis vector."""
    x = zero_vector(algebra, d)
    x[j] = LaurentSeries.monomial(algebra, 1, e)
    return x


def is_psi_stable(stable: PhiGammaModule, k: int) -> bool:
    """Whether ``psi(T^-k L) <= T^-k L`` for the standard lattice ``L``.

    ``T^-k L`` is spanned over ``phi(A[[T]])`` by ``T^(e - k) e_j`` for
    ``0 <= e < p``, and ``psi(phi(a) x) = a psi(x)``.
    """
    algebra, d, p = stable.algebra, stable.rank, stable.p
    return all(
        vec_valuation(psi_on_module(stable, unit_vector(algebra, d, j, e)))
        >= -k
        for j in range(d)
        for e in range(-k, p - k)
    )


def psi_bounds_hold(m: PhiGammaModule, n: int) -> bool:
    """``psi(T^(h + np) L) <= T^n L <= psi(T^(np) L)`` on the stable lattice.

    The right inclusion is witnessed by ``phi_M(T^n e_j)``, which lies in
    ``T^(np) L`` and maps back to ``T^n e_j`` under ``psi``.
    """
    stable, h = m.stabilized, m.height
    algebra, d, p = m.algebra, m.rank, m.p
    for j in range(d):
        for e in range(p):
            x = unit_vector(algebra, d, j, h + n * p + e)
            if vec_valuation(psi_on_module(stable, x)) < n:
                return False
        x = unit_vector(algebra, d, j, n)
        y = stable.phi_vec(x)
        if vec_valuation(y) < n * p:
            return False
        back = psi_on_module(stable, y)
        if not all(a.agrees(b) for a, b in zip(back, x)):
            return False
    return True


def rescale(m: PhiGammaModule, shifts: Sequence[int]) -> PhiGammaModule:
    """The module in the basis ``T^shifts[i] e_i``."""
    if not any(shifts):
        return m
    p = m.p
    phi = m.phi.shifted(shifts, [p * s for s in shifts])

    def _semilinear(mat: SeriesMatrix, action: RingAction) -> SeriesMatrix:
        powers = [
            action(LaurentSeries.monomial(m.algebra, 1, s)) for s in shifts
        ]
        return SeriesMatrix.build(
            m.algebra,
            m.rank,
            lambda i, j: (mat[i, j] * powers[j]).shift(-shifts[i]),
        )

    return PhiGammaModule(
        m.algebra,
        phi,
        _semilinear(m.gamma, GAMMA),
        _semilinear(m.delta, DELTA),
        name=m.name,
    )


def constant_operator(m: PhiGammaModule, mat: SeriesMatrix) -> IntArray:
    """F_p matrix of ``x -> mat(0) x`` on ``A^d``, index ``i * r + k``."""
    algebra, d, r = m.algebra, m.rank, m.algebra.r
    const = mat.constant_term()
    out = np.zeros((d * r, d * r), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            out[i * r : (i + 1) * r, j * r : (j + 1) * r] = (
                algebra.mult_matrix(const[i, j])
            )
    return out


def is_continuous(m: PhiGammaModule) -> ContinuityWitness:
    """Decide topological nilpotence of ``gamma - 1`` via ``M / T M``."""
    stable = m.stabilized
    p = m.p
    n_mat = mod_p(
        constant_operator(stable, stable.gamma)
        - np.eye(stable.rank * m.algebra.r, dtype=np.int64),
        p,
    )
    power = n_mat
    size = len(n_mat)
    for n in range(1, size + 2):
        if not power.any():
            if n > config.continuity_bound:
                raise BoundExceeded(
                    f"Nilpotency index {n} exceeds the configured bound"
                    f" {config.continuity_bound}"
                )
            return ContinuityWitness(continuous=True, n=n)
        power = mod_p(power @ n_mat, p)
    return ContinuityWitness(continuous=False, n=0)


def _greatest_solution(
    d: int,
    p: int,
    start: int,
    phi_v: list[list[int]],
    gamma_v: list[list[int]],
    delta_v: list[list[int]],
) -> list[int] | None:
    shifts = [start] * d
    for _ in range(config.lattice_rounds):
        new = [
            min(
                [shifts[i]]
                + [
                    min(
                        gamma_v[i][j] + shifts[j],
                        delta_v[i][j] + shifts[j],
                        phi_v[i][j] + p * shifts[j],
                    )
                    for j in range(d)
                ]
            )
            for i in range(d)
        ]
        if new == shifts:
            return shifts
        shifts = new
    return None
