"""Herr complex cohomology of étale (phi, Gamma)-modules.

All window computations happen in the stabilized basis, where the
standard lattice ``L`` is stable under phi, gamma and delta. A window
``[lo, hi)`` is the F_p-space of coordinate polynomials with exponents
``lo .. hi - 1``; the flattened index of component ``i``, exponent ``e``
and algebra coordinate ``k`` is ``(i * (hi - lo) + e - lo) * r + k``.

H^1 is assembled from the phi-kernel coinvariants and the invariants of
``H^1_phi = M / (phi - 1) M``; the latter is exhausted by the images of
``T^-k L`` as ``k`` grows, and the count is certified against the Euler
characteristic.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, TypeVar

import numpy as np

from .coeffs import SquareZeroExtension
from .config import config
from .exceptions import (
    CertificateFailure,
    InsufficientPrecision,
    NotACocycle,
    NotALift,
    StabilizationBudgetExceeded,
    UnsupportedCoefficients,
)
from .fp import (
    IntArray,
    NoSolution,
    nullspace_mod,
    rank_mod,
    row_basis,
    solve_mod,
)
from .laurent import DELTA, GAMMA, PHI, LaurentSeries, RingAction
from .matrix import (
    SeriesMatrix,
    Vector,
    vec_add,
    vec_from_window,
    vec_is_zero,
    vec_precision,
    vec_scale,
    vec_sub,
    vec_truncate,
    vec_window,
    zero_vector,
)
from .pgmod import (
    PhiGammaModule,
    cartier_dual,
    cocycle_defect,
    hom_matrix,
    hom_module,
    hom_vector,
    rect_mul,
    residue_module,
    restrict_scalars,
    split_blocks,
)

log = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(eq=False)
class Cocycle:
    """Degree-1 cochain ``(a, b)``: ``a`` pairs with phi, ``b`` with gamma."""

    module: PhiGammaModule
    a: Vector
    b: Vector
    window: tuple[int, int] = (0, 1)
    certified: bool = False
    degree: int = 1

    @property
    def precision(self) -> int:
        return min(vec_precision(self.a), vec_precision(self.b))

    def defect(self) -> Vector:
        return cocycle_defect(self.module, self.a, self.b)

    def certify(self) -> Cocycle:
        if not vec_is_zero(self.defect()):
            raise NotACocycle("(gamma - 1) a != (phi - 1) b")
        self.certified = True
        return self

    def scale(self, c: IntArray) -> Cocycle:
        return Cocycle(
            self.module,
            vec_scale(self.a, c),
            vec_scale(self.b, c),
            self.window,
            self.certified,
        )

    def __add__(self, other: Cocycle) -> Cocycle:
        return Cocycle(
            self.module,
            vec_add(self.a, other.a),
            vec_add(self.b, other.b),
            (
                min(self.window[0], other.window[0]),
                max(self.window[1], other.window[1]),
            ),
            self.certified and other.certified,
        )

    def __sub__(self, other: Cocycle) -> Cocycle:
        return self + other.scale(
            (-self.module.algebra.one) % self.module.p
        )


@dataclass
class ObstructionClass:
    """Coordinates of a class in ``H^2(ad M) x I``.

    ``coords[i][l]`` pairs the component along the i-th ideal generator
    with the l-th basis vector of ``H^0((ad M)*)``.
    """

    coords: list[list[list[int]]]
    h2_dim: int

    @property
    def lifts_exist(self) -> bool:
        return not any(any(c) for row in self.coords for c in row)

    @property
    def vanishes(self) -> bool:
        return self.lifts_exist


@dataclass
class CohomologyReport:
    h0: int
    h1: int
    h2: int
    rank: int
    euler_ok: bool
    duality_ok: bool
    over: str = "A"
    certificates: list[str] = field(default_factory=list)
    representatives: list[Cocycle] = field(default_factory=list)
    graded: list[list[int]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        data = {
            "h0": self.h0,
            "h1": self.h1,
            "h2": self.h2,
            "rank": self.rank,
            "euler_ok": self.euler_ok,
            "duality_ok": self.duality_ok,
            "over": self.over,
            "certificates": list(self.certificates),
        }
        if self.graded:
            data["graded"] = self.graded
        return data


@dataclass
class HomSpace:
    dim: int
    basis: list[list[list[LaurentSeries]]]


def contract(u: Vector, v: Vector) -> LaurentSeries:
    """The pairing ``M x M* -> A(1)`` in dual coordinates."""
    acc = LaurentSeries.zero(u[0].algebra)
    for x, y in zip(u, v):
        acc = acc + x * y
    return acc


class HerrComplex:
    def __init__(self, module: PhiGammaModule) -> None:
        self.module = module
        self._operators: dict[tuple[Any, ...], IntArray] = {}

    @cached_property
    def stable(self) -> PhiGammaModule:
        return self.module.stabilized

    @property
    def p(self) -> int:
        return self.module.p

    @property
    def d(self) -> int:
        return self.module.rank

    @property
    def r(self) -> int:
        return self.module.algebra.r

    @property
    def height(self) -> int:
        return self.module.lattice.height

    @property
    def kernel_bound(self) -> int:
        return self.module.lattice.kernel_bound

    # Differentials, in the given basis

    def d0(self, x: Vector) -> tuple[Vector, Vector]:
        m = self.module
        return vec_sub(m.phi_vec(x), x), vec_sub(m.gamma_vec(x), x)

    def d1(self, a: Vector, b: Vector) -> Vector:
        return cocycle_defect(self.module, a, b)

    def d0_psi(self, x: Vector) -> tuple[Vector, Vector]:
        m = self.module
        return vec_sub(m.psi_vec(x), x), vec_sub(m.gamma_vec(x), x)

    def d1_psi(self, a: Vector, b: Vector) -> Vector:
        m = self.module
        return vec_sub(vec_sub(m.gamma_vec(a), a), vec_sub(m.psi_vec(b), b))

    def to_psi_complex(
        self, degree: int, *parts: Vector
    ) -> tuple[Vector, ...]:
        """Comparison map ``identity, (-psi, 1), -psi`` by degree."""
        if degree == 0:
            return parts
        neg = [(-s) for s in self.module.psi_vec(parts[0])]
        if degree == 1:
            return neg, parts[1]
        return (neg,)

    # Window operators, in the stabilized basis

    def _index(self, i: int, e: int, lo: int, hi: int) -> int:
        return (i * (hi - lo) + e - lo) * self.r

    def operator(
        self,
        action: RingAction,
        lo: int,
        hi: int,
        out_lo: int,
        out_hi: int,
    ) -> IntArray:
        """F_p matrix of ``sigma_M`` from window ``[lo, hi)`` to the
        coefficients of exponents ``out_lo .. out_hi - 1`` of the image."""
        key = (action, lo, hi, out_lo, out_hi)
        if key not in self._operators:
            self._operators[key] = self._build_operator(*key)
        return self._operators[key]

    def _build_operator(
        self,
        action: RingAction,
        lo: int,
        hi: int,
        out_lo: int,
        out_hi: int,
    ) -> IntArray:
        m = self.stable
        algebra = m.algebra
        mat = m.matrix(action)
        n_in = self.d * (hi - lo) * self.r
        n_out = self.d * (out_hi - out_lo) * self.r
        out = np.zeros((n_out, n_in), dtype=np.int64)
        mults = [algebra.mult_matrix(algebra.basis(k)) for k in range(self.r)]
        for e in range(lo, hi):
            image = action(LaurentSeries.monomial(algebra, 1, e))
            for j in range(self.d):
                blocks = [
                    (mat[i, j] * image).window(out_lo, out_hi)
                    for i in range(self.d)
                ]
                for k, mk in enumerate(mults):
                    col = self._index(j, e, lo, hi) + k
                    out[:, col] = np.concatenate(
                        [(blk @ mk.T).reshape(-1) for blk in blocks]
                    )
        return out % self.p

    def inclusion(
        self, lo: int, hi: int, out_lo: int, out_hi: int
    ) -> IntArray:
        n_in = self.d * (hi - lo) * self.r
        n_out = self.d * (out_hi - out_lo) * self.r
        out = np.zeros((n_out, n_in), dtype=np.int64)
        for i in range(self.d):
            for e in range(max(lo, out_lo), min(hi, out_hi)):
                a = self._index(i, e, lo, hi)
                b = self._index(i, e, out_lo, out_hi)
                out[b : b + self.r, a : a + self.r] = np.eye(
                    self.r, dtype=np.int64
                )
        return out

    def phi_minus_one(self, j: int) -> IntArray:
        """``(phi - 1)`` from ``[-j, 1)`` to exponents ``-p j .. 0``."""
        lo, out_lo = -j, -self.p * j
        return (
            self.operator(PHI, lo, 1, out_lo, 1)
            - self.inclusion(lo, 1, out_lo, 1)
        ) % self.p

    def square_operator(self, action: RingAction, k: int) -> IntArray:
        """``sigma_M`` on ``T^-k L / T L``; stable since L is."""
        return self.operator(action, -k, 1, -k, 1)

    def algebra_action(self, vectors: IntArray) -> IntArray:
        """Multiples of window vectors by each basis element of A."""
        algebra = self.module.algebra
        blocks = vectors.reshape(len(vectors), -1, self.r)
        mults = [algebra.mult_matrix(algebra.basis(k)) for k in range(self.r)]
        return np.concatenate(
            [(blocks @ mk.T).reshape(len(vectors), -1) for mk in mults]
        ) % self.p

    # Exact elements

    def phi_series_sum(self, u: Vector, precision: int) -> Vector:
        """``sum_k phi_M^k(u)`` for ``u`` in ``T L``."""
        m = self.stable
        total = vec_truncate(u, precision)
        term = total
        while not vec_is_zero(term):
            term = vec_truncate(m.phi_vec(term), precision)
            total = vec_add(total, term)
        return total

    def lift_kernel_vector(self, x0: IntArray, j: int) -> Vector:
        """Exact element of ``ker(phi - 1)`` reducing to ``x0`` mod ``T L``."""
        m = self.stable
        x = vec_from_window(m.algebra, self.d, -j, x0)
        u = vec_sub(m.phi_vec(x), x)
        precision = config.precision
        if any(s.valuation < 1 for s in u if not s.is_zero):
            raise CertificateFailure("Window vector is not in the phi-kernel")
        return vec_add(x, self.phi_series_sum(u, precision))

    def solve_phi_minus_one(self, g: Vector, j: int) -> Vector:
        """Exact ``y`` with ``(phi - 1) y = g`` for ``g`` in ``T^-k L``."""
        m = self.stable
        p = self.p
        target = vec_window(g, -p * j, 1)
        try:
            y0 = solve_mod(self.phi_minus_one(j), target, p)
        except NoSolution as e:
            raise CertificateFailure(
                "Class is not in the image of phi - 1"
            ) from e
        y = vec_from_window(m.algebra, self.d, -j, y0)
        rho = vec_sub(g, vec_sub(m.phi_vec(y), y))
        tail = self.phi_series_sum(rho, config.precision)
        return vec_sub(y, tail)

    # H^0

    @cached_property
    def kernel_window(self) -> IntArray:
        """Rows spanning ``ker(phi - 1)`` reduced mod ``T L``."""
        return nullspace_mod(self.phi_minus_one(self.kernel_bound), self.p)

    def kernel_phi_minus_one(self) -> list[Vector]:
        """Exact basis of ``ker(phi - 1)``, in the given basis."""
        return [
            self.module.to_original(
                self.lift_kernel_vector(x0, self.kernel_bound)
            )
            for x0 in self.kernel_window
        ]

    @cached_property
    def h0_window(self) -> IntArray:
        j = self.kernel_bound
        n = self.d * (j + 1) * self.r
        eye = np.eye(n, dtype=np.int64)
        stacked = np.vstack(
            [
                self.phi_minus_one(j),
                self.square_operator(GAMMA, j) - eye,
                self.square_operator(DELTA, j) - eye,
            ]
        )
        return nullspace_mod(stacked % self.p, self.p)

    @property
    def h0_fp_dim(self) -> int:
        return len(self.h0_window)

    def h0_basis(self) -> list[Vector]:
        """A-basis of ``H^0`` as exact elements, in the given basis."""
        chosen = self._a_basis(
            np.zeros((0, self.h0_window.shape[1]), dtype=np.int64),
            self.h0_window,
        )
        return [
            self.module.to_original(
                self.lift_kernel_vector(x0, self.kernel_bound)
            )
            for x0 in chosen
        ]

    def _a_basis(
        self, base: IntArray, candidates: IntArray
    ) -> list[IntArray]:
        """Candidates whose A-multiples greedily extend ``base``."""
        span = base
        rank = rank_mod(span, self.p) if len(span) else 0
        chosen = []
        for v in candidates:
            orbit = self.algebra_action(v[None, :])
            trial = np.vstack([span, orbit]) if len(span) else orbit
            new_rank = rank_mod(trial, self.p)
            if new_rank > rank:
                chosen.append(v)
                span, rank = row_basis(trial, self.p), new_rank
        return chosen

    # H^1

    def _invariant_kernel(self) -> tuple[IntArray, IntArray]:
        """Delta-invariant phi-kernel and its (gamma - 1)-image."""
        j = self.kernel_bound
        n = self.d * (j + 1) * self.r
        eye = np.eye(n, dtype=np.int64)
        gamma = self.square_operator(GAMMA, j)
        delta = self.square_operator(DELTA, j)
        v = nullspace_mod(
            np.vstack([self.phi_minus_one(j), delta - eye]) % self.p, self.p
        )
        image = ((gamma - eye) @ v.T).T % self.p if len(v) else v
        return v, image

    def _level(self, k: int) -> tuple[IntArray, IntArray, int]:
        """Boundaries ``B_k`` and the Gamma/Delta-invariant lifts ``S_k``."""
        p, h = self.p, self.height
        j = max(self.kernel_bound, -(-(k + h) // p), 1)
        lphi = self.phi_minus_one(j)
        width = self.d * (p * j + 1) * self.r
        keep = np.zeros(width, dtype=bool)
        for i in range(self.d):
            a = self._index(i, -k, -p * j, 1)
            b = self._index(i, 1, -p * j, 1)
            keep[a:b] = True
        free = nullspace_mod(lphi[~keep], p)
        boundaries = (
            ((lphi @ free.T).T % p)[:, keep]
            if len(free)
            else np.zeros((0, int(keep.sum())), dtype=np.int64)
        )
        boundaries = row_basis(boundaries, p)
        n = self.d * (k + 1) * self.r
        eye = np.eye(n, dtype=np.int64)
        gamma = self.square_operator(GAMMA, k) - eye
        delta = self.square_operator(DELTA, k) - eye
        nb = len(boundaries)
        zeros = np.zeros((n, nb), dtype=np.int64)
        system = np.block(
            [
                [gamma, -boundaries.T, zeros],
                [delta, zeros, -boundaries.T],
            ]
        ) % p
        lifts = row_basis(nullspace_mod(system, p)[:, :n], p)
        return boundaries, lifts, j

    def h1_basis(self) -> list[Cocycle]:
        """A-basis of ``H^1`` certified by the Euler characteristic."""
        algebra = self.module.algebra
        if not algebra.is_field:
            raise UnsupportedCoefficients(
                "H^1 representatives need field coefficients"
            )
        target = h1_dim(self.module) * self.r
        kernel, kernel_image = self._invariant_kernel()
        part1 = self._a_basis(
            row_basis(kernel_image, self.p) if len(kernel_image) else
            kernel_image,
            kernel,
        )
        part1_dim = len(kernel) - rank_mod(kernel_image, self.p)
        k = max(1, self.kernel_bound)
        while True:
            boundaries, lifts, j = self._level(k)
            count = part1_dim + len(lifts) - len(boundaries)
            log.debug(
                "H^1 of %s at level %d: %d of %d", self.module.label, k,
                count, target,
            )
            if count == target:
                break
            if count > target:
                raise CertificateFailure(
                    f"H^1 count {count} exceeds Euler characteristic {target}"
                )
            k *= 2
            if k > config.h1_budget:
                raise StabilizationBudgetExceeded(
                    f"H^1 of {self.module.label} not stabilized at pole"
                    f" order {config.h1_budget} ({count} of {target})"
                )
        part2 = self._a_basis(boundaries, lifts)
        classes = [self._kernel_class(u0) for u0 in part1]
        classes += [self._phi_class(v, k, j) for v in part2]
        return classes

    def _kernel_class(self, u0: IntArray) -> Cocycle:
        m = self.module
        u = self.lift_kernel_vector(u0, self.kernel_bound)
        return Cocycle(
            m,
            zero_vector(m.algebra, self.d),
            m.to_original(u),
            window=(-self.kernel_bound, 1),
            certified=True,
        )

    def _phi_class(self, v: IntArray, k: int, j: int) -> Cocycle:
        m, stable = self.module, self.stable
        w = stable.e_delta(vec_from_window(m.algebra, self.d, -k, v))
        g = vec_sub(stable.gamma_vec(w), w)
        b = stable.e_delta(self.solve_phi_minus_one(g, j))
        return Cocycle(
            m,
            m.to_original(w),
            m.to_original(b),
            window=(-k, 1),
            certified=True,
        )


def with_precision_growth(
    fn: Callable[..., T], *args: Any, precision: int | None = None
) -> T:
    """Retry ``fn`` with doubled windows up to ``precision_max``.

    The working precision is scoped to the calling thread, so concurrent
    computations never see each other's windows.
    """
    precision = precision or config.precision
    while True:
        with config.working_precision(precision):
            try:
                return fn(*args)
            except InsufficientPrecision as e:
                if 2 * precision > config.precision_max:
                    raise
                log.debug("%s; doubling precision to %d", e, 2 * precision)
        precision *= 2


def kernel_phi_minus_one(m: PhiGammaModule) -> list[Vector]:
    return HerrComplex(m).kernel_phi_minus_one()


def h0(m: PhiGammaModule, precision: int | None = None) -> int:
    """Dimension of ``H^0`` over A (over F_p for non-field A)."""
    fp_dim = with_precision_growth(
        lambda: HerrComplex(m).h0_fp_dim, precision=precision
    )
    return fp_dim // m.algebra.r if m.algebra.is_field else fp_dim


def h0_basis(m: PhiGammaModule) -> list[Vector]:
    return HerrComplex(m).h0_basis()


def h2(m: PhiGammaModule) -> int:
    """Dimension of ``H^2`` by Tate duality.

    Non-field coefficients are restricted to F_p first, where duality
    holds for every finite A; the result is then an F_p-dimension.
    """
    if not m.algebra.is_field:
        m = restrict_scalars(m)
    return h0(cartier_dual(m))


def h1_dim(m: PhiGammaModule) -> int:
    rank = m.rank if m.algebra.is_field else m.rank * m.algebra.r
    return h0(m) + h2(m) + rank


def h1_basis(
    m: PhiGammaModule, precision: int | None = None
) -> list[Cocycle]:
    return with_precision_growth(
        lambda: HerrComplex(m).h1_basis(), precision=precision
    )


def cup_product(alpha: Cocycle, beta: Cocycle) -> LaurentSeries:
    """``y1 x gamma(x2) - x1 x phi(y2)`` contracted into ``A(1)``."""
    dual = beta.module
    first = contract(alpha.b, dual.gamma_vec(beta.a))
    second = contract(alpha.a, dual.phi_vec(beta.b))
    return first - second


def cup_pairing(alpha: Cocycle, beta: Cocycle) -> IntArray:
    """Value in A of the cup product for ``alpha`` in H^1(M), ``beta`` in
    H^1(M*), fixed up to a global unit by the residue functional."""
    if alpha.module.rank != beta.module.rank:
        raise CertificateFailure("Cup product needs M and its Cartier dual")
    try:
        return cup_product(alpha, beta).residue()
    except InsufficientPrecision as e:
        raise CertificateFailure(f"Cup product undetermined: {e}") from e


def pairing_matrix(
    basis: list[Cocycle], dual_basis: list[Cocycle]
) -> list[list[IntArray]]:
    return [[cup_pairing(a, b) for b in dual_basis] for a in basis]


def is_perfect(matrix: list[list[IntArray]], m: PhiGammaModule) -> bool:
    """Invertibility over A via the regular representation over F_p."""
    algebra = m.algebra
    n = len(matrix)
    if n != (len(matrix[0]) if matrix else 0):
        return False
    if not n:
        return True
    r = algebra.r
    big = np.zeros((n * r, n * r), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            big[i * r : (i + 1) * r, j * r : (j + 1) * r] = (
                algebra.mult_matrix(matrix[i][j])
            )
    return rank_mod(big, algebra.p) == n * r


def is_coboundary(c: Cocycle, dual_basis: list[Cocycle] | None = None) -> bool:
    """Zero class test through the perfect pairing with ``H^1(M*)``."""
    if dual_basis is None:
        dual_basis = h1_basis(cartier_dual(c.module))
    return all(
        not np.any(cup_pairing(c, beta)) for beta in dual_basis
    )


def class_of_extension(e: PhiGammaModule, sub_rank: int) -> Cocycle:
    """Cocycle of ``Hom(quotient, sub)`` read off the top-right blocks."""
    sub, quotient, corners = split_blocks(e, sub_rank)
    h = hom_module(quotient, sub)
    a = hom_vector(rect_mul(corners["phi"], quotient.phi_inv.rows))
    b = hom_vector(
        rect_mul(corners["gamma"], quotient.gamma.inverse().rows)
    )
    return Cocycle(h, h.e_delta(a), h.e_delta(b)).certify()


def ad_vector(matrix: SeriesMatrix) -> Vector:
    """Endomorphism matrix as a vector of ``ad M = Hom(M, M)``."""
    return hom_vector(matrix.rows)


def obstruction_class(
    m: PhiGammaModule,
    ext: SquareZeroExtension,
    phi_lift: SeriesMatrix,
    gamma_lift: SeriesMatrix,
) -> ObstructionClass:
    """Class of ``Phi~ phi(G~) - G~ gamma(Phi~)`` in ``H^2(ad M) x I``."""
    base = ext.base
    for name, lift, mat in (
        ("phi", phi_lift, m.phi),
        ("gamma", gamma_lift, m.gamma),
    ):
        reduced = lift.map(
            lambda s: LaurentSeries.make(
                base, s.v, ext.project(s.coeffs), s.precision
            )
        )
        if not SeriesMatrix(base, reduced.rows).agrees(mat):
            raise NotALift(f"{name} lift does not reduce to the module")
    defect = phi_lift @ gamma_lift.act(PHI) - gamma_lift @ phi_lift.act(GAMMA)
    c_inv = (m.gamma @ m.phi.act(GAMMA)).inverse()
    ad = hom_module(m, m)
    dual_basis = h0_basis(cartier_dual(ad))
    coords = []
    for i in range(ext.k):
        part = defect.map(
            lambda s: LaurentSeries.make(
                base, s.v, ext.ideal_component(s.coeffs, i), s.precision
            )
        )
        o = ad.e_delta(ad_vector(SeriesMatrix(base, part.rows) @ c_inv))
        coords.append(
            [contract(o, z).residue().tolist() for z in dual_basis]
        )
    return ObstructionClass(coords=coords, h2_dim=len(dual_basis))


def lift_space_dim(m: PhiGammaModule, f_dim: int) -> int:
    if f_dim == 0:
        return 0
    return h1_dim(hom_module(m, m)) * f_dim


def hom_space(m1: PhiGammaModule, m2: PhiGammaModule) -> HomSpace:
    basis = h0_basis(hom_module(m1, m2))
    return HomSpace(
        dim=len(basis),
        basis=[hom_matrix(v, m1.rank, m2.rank) for v in basis],
    )


def cohomology_report(
    m: PhiGammaModule,
    with_basis: bool = True,
    pairing: bool = False,
) -> CohomologyReport:
    if not m.algebra.is_field:
        return _restricted_report(m, with_basis, pairing)
    dual_m = cartier_dual(m)
    zero, two = h0(m), h0(dual_m)
    one = h1_dim(m)
    certificates = ["kernel-bound"]
    euler_ok = zero - one + two == -m.rank
    duality_ok = h0(cartier_dual(dual_m)) == zero
    representatives: list[Cocycle] = []
    if with_basis:
        representatives = h1_basis(m)
        euler_ok = euler_ok and len(representatives) == one
        certificates.append("euler")
        if pairing:
            dual_basis = h1_basis(dual_m)
            duality_ok = (
                duality_ok
                and len(dual_basis) == one
                and is_perfect(pairing_matrix(representatives, dual_basis), m)
            )
            certificates.append("pairing-perfect")
    certificates.append("duality-symmetry")
    if not euler_ok:
        raise CertificateFailure(
            f"Euler characteristic fails for {m.label}:"
            f" ({zero}, {one}, {two}), rank {m.rank}"
        )
    return CohomologyReport(
        h0=zero,
        h1=one,
        h2=two,
        rank=m.rank,
        euler_ok=euler_ok,
        duality_ok=duality_ok,
        certificates=certificates,
        representatives=representatives,
    )


def _restricted_report(
    m: PhiGammaModule, with_basis: bool, pairing: bool
) -> CohomologyReport:
    """F_p-dimensions of a module over a non-field A.

    The module restricted to F_p carries the same Herr complex, so its
    report is certified as usual. The graded pieces
    ``m^i M / m^(i+1) M`` are sums of copies of ``M / m M`` and bound
    each total from above. Gorenstein A also satisfy duality with the
    A-linear Cartier dual, which is checked on top.
    """
    report = cohomology_report(restrict_scalars(m), with_basis, pairing)
    report.rank = m.rank
    report.over = "F_p"
    report.certificates.append("restriction-of-scalars")
    report.representatives = []
    base = cohomology_report(residue_module(m), with_basis=False)
    report.graded = [
        [n * base.h0, n * base.h1, n * base.h2]
        for n in m.algebra.filtration_dims
    ]
    totals = (report.h0, report.h1, report.h2)
    bounds = [sum(piece[j] for piece in report.graded) for j in range(3)]
    if any(t > b for t, b in zip(totals, bounds)):
        raise CertificateFailure(
            f"Cohomology of {m.label} exceeds its graded pieces:"
            f" {totals} > {tuple(bounds)}"
        )
    report.certificates.append("graded-bound")
    if m.algebra.is_gorenstein:
        report.duality_ok = report.duality_ok and (
            h2(cartier_dual(m)) == report.h0
        )
        report.certificates.append("gorenstein-duality")
    return report
