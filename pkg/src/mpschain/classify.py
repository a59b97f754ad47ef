"""Reduction of constraint subspaces to canonical representatives.

Every subspace of the tau/sigma coefficient space falls, under the
unimodular action, onto one of fifteen catalogued normal forms.  The
decision data are invariant: the dimension p of the symmetric part, the
nullity structure of the induced (-,+,+) form, whether the pure
antisymmetric generator lies in the space, and the vector w expressing
the antisymmetric coefficient as u = w.v.  classify() walks that tree,
accumulating an explicit witness matrix whose action carries the input
onto the canonical basis.

One invariant combination (two-dimensional symmetric part with
non-degenerate induced form, together with the antisymmetric generator)
has no catalogued representative; it raises UncataloguedSpaceError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pauli import (CSpace, PauliQuartet, SL2, MINKOWSKI_METRIC,
                    minkowski_vec, quartet_from_array, sl2_act,
                    sl2_act_space, span_equal)

# Relative threshold for "is this invariant zero" decisions during
# classification.  Coarser than the rank tolerance: the inputs are floats
# that have already been pushed through a group action.
ZERO_TOL = 1e-8

# Tolerance of the final witness validation.
WITNESS_TOL = 1e-8


class ClassificationError(RuntimeError):
    """The reduction pipeline failed internal validation."""


class UncataloguedSpaceError(ClassificationError):
    """The input's invariants match no catalogued normal form."""


class CaseId(str, Enum):
    """The fifteen canonical constraint-space types."""

    EMPTY = "empty"
    ANTISYMMETRIC_LINE = "antisymmetric_line"
    NONNULL_LINE = "nonnull_line"
    NONNULL_LINE_SIGMA = "nonnull_line_sigma"
    NULL_LINE = "null_line"
    NULL_LINE_TILTED = "null_line_tilted"
    NULL_LINE_SIGMA = "null_line_sigma"
    REGULAR_PLANE = "regular_plane"
    REGULAR_PLANE_TILTED = "regular_plane_tilted"
    DEGENERATE_PLANE = "degenerate_plane"
    DEGENERATE_PLANE_TILTED = "degenerate_plane_tilted"
    DEGENERATE_PLANE_SIGMA = "degenerate_plane_sigma"
    FULL_SYMMETRIC = "full_symmetric"
    FULL_SYMMETRIC_TILTED = "full_symmetric_tilted"
    FULL_SPACE = "full_space"


# Cases carrying a continuous modulus mu (the coefficient coupling the
# antisymmetric generator to the tau2 direction).
MU_CASES = frozenset({CaseId.NONNULL_LINE, CaseId.REGULAR_PLANE,
                      CaseId.DEGENERATE_PLANE, CaseId.FULL_SYMMETRIC})


@dataclass(frozen=True)
class CanonicalForm:
    case_id: CaseId
    mu: complex | None = None

    def __post_init__(self):
        if self.case_id in MU_CASES:
            if self.mu is None:
                raise ValueError(f"{self.case_id.value} requires mu")
            object.__setattr__(self, "mu", complex(self.mu))
        elif self.mu is not None:
            raise ValueError(f"{self.case_id.value} takes no mu")


@dataclass(frozen=True)
class ClassificationResult:
    form: CanonicalForm
    gamma: SL2
    canonical: CSpace


@dataclass(frozen=True)
class SpaceSignature:
    """Orbit-invariant fingerprint used to cross-check classify()."""

    dim: int
    dim_plus: int
    gram_rank: int
    sigma_in: bool


_T0 = (1, 0, 0, 0)
_T1 = (0, 1, 0, 0)
_T2 = (0, 0, 1, 0)
_SG = (0, 0, 0, 1)

_CANONICAL_BASES = {
    CaseId.EMPTY: [],
    CaseId.ANTISYMMETRIC_LINE: [_SG],
    CaseId.NONNULL_LINE: ["t2+mu*s"],
    CaseId.NONNULL_LINE_SIGMA: [_T2, _SG],
    CaseId.NULL_LINE: [(1, 1, 0, 0)],
    CaseId.NULL_LINE_TILTED: [(1, 1, 0, 1)],
    CaseId.NULL_LINE_SIGMA: [(1, 1, 0, 0), _SG],
    CaseId.REGULAR_PLANE: [_T0, "t2+mu*s"],
    CaseId.REGULAR_PLANE_TILTED: [(1, 0, 0, 1), (0, 0, 1, 1)],
    CaseId.DEGENERATE_PLANE: [(1, 1, 0, 0), "t2+mu*s"],
    CaseId.DEGENERATE_PLANE_TILTED: [(1, 1, 0, 1), _T2],
    CaseId.DEGENERATE_PLANE_SIGMA: [(1, 1, 0, 0), _T2, _SG],
    CaseId.FULL_SYMMETRIC: [_T0, _T1, "t2+mu*s"],
    CaseId.FULL_SYMMETRIC_TILTED: [(1, 0, 0, 1), (0, 1, 0, 1), _T2],
    CaseId.FULL_SPACE: [_T0, _T1, _T2, _SG],
}


def canonical_space(form: CanonicalForm) -> CSpace:
    """The literal canonical basis for a form, mu substituted where used."""
    rows = []
    for entry in _CANONICAL_BASES[form.case_id]:
        if entry == "t2+mu*s":
            rows.append(PauliQuartet(0, 0, 1, form.mu))
        else:
            rows.append(quartet_from_array(np.array(entry, dtype=complex)))
    return CSpace(rows)


# ---------------------------------------------------------------------------
# witness building blocks

def _rotation(theta: float) -> SL2:
    c, s = math.cos(theta), math.sin(theta)
    return SL2(np.array([[c, s], [-s, c]], dtype=complex))


# tau1 <-> tau2 exchanges (fix tau0 and the antisymmetric part)
_R_T1_TO_T2 = _rotation(math.pi / 4.0)
_R_T2_TO_T1 = _rotation(-math.pi / 4.0)

# negates v1 and v2
_SWAP = _rotation(math.pi / 2.0)

# negates v0 and v2, fixes v1 and u
_FLIP = SL2(np.array([[0.0, 1.0j], [1.0j, 0.0]]))


def _scale(a: complex) -> SL2:
    """diag(a, 1/a): scales the two null rays v0 +/- v1 by a^{+/-2}."""
    a = complex(a)
    return SL2(np.array([[a, 0.0], [0.0, 1.0 / a]], dtype=complex))


def _shear(m: complex) -> SL2:
    """Lower-triangular unipotent: fixes tau0+tau1 exactly."""
    return SL2(np.array([[1.0, 0.0], [complex(m), 1.0]], dtype=complex))


def _boost(big_c: complex, big_s: complex) -> SL2:
    """Symmetric matrix [[c,s],[s,c]] acting on (v0, v2) as the hyperbolic
    rotation [[C, S], [S, C]] with C^2 - S^2 = 1.  Fixes tau1 and u."""
    small_c = np.sqrt((big_c + 1.0) / 2.0)
    if abs(small_c) < 1e-8:
        raise ValueError("boost parameter at the branch singularity")
    small_s = big_s / (2.0 * small_c)
    # unit_normalized soaks up rounding drift in C^2 - S^2 = 1
    return SL2.unit_normalized(
        np.array([[small_c, small_s], [small_s, small_c]]))


def _lorentz_steps(big_c: complex, big_s: complex) -> list[SL2]:
    """Realize the (v0, v2)-action [[C,S],[S,C]] robustly.

    Near C = -1 the boost formula degenerates; there the action factors as
    the well-conditioned boost of (-C, -S) followed by the flip (-identity
    on the (v0, v2) plane).
    """
    if big_c.real >= -0.5:
        return [_boost(big_c, big_s)]
    return [_boost(-big_c, -big_s), _FLIP]


# ---------------------------------------------------------------------------
# normal-form subroutines

def normalize_null(s: PauliQuartet, tol: float = ZERO_TOL) -> SL2:
    """Witness carrying a nonzero null symmetric tensor onto the
    tau0+tau1 ray.

    The recomposed 2x2 matrix of a null tensor is rank one and symmetric,
    M = c w w^T.  Completing w to a unimodular column basis N and acting
    with N^{-T} sends M to a multiple of e0 e0^T = (tau0+tau1)/2.
    """
    m = PauliQuartet(s.v0, s.v1, s.v2, 0.0).matrix()
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        raise ValueError("zero input")
    if abs(minkowski_vec(s.v_array(), s.v_array())) > tol * scale ** 2:
        raise ValueError("input is not null")
    i = 0 if abs(m[0, 0]) >= abs(m[1, 1]) else 1
    if abs(m[i, i]) <= 1e-14 * scale:
        # both diagonals vanish: det = -M01^2 would be nonzero
        raise ValueError("input is not a rank-one symmetric tensor")
    w = m[:, i] / np.sqrt(m[i, i])
    if abs(w[0]) >= abs(w[1]):
        z = np.array([0.0, 1.0 / w[0]], dtype=complex)
    else:
        z = np.array([-1.0 / w[1], 0.0], dtype=complex)
    # inverse-transpose of the det-1 column basis [w | z]
    gamma = np.array([[z[1], -w[1]], [-z[0], w[0]]], dtype=complex)
    return SL2(gamma)


def normalize_nonnull(s: PauliQuartet, tol: float = ZERO_TOL) -> SL2:
    """Witness carrying a non-null symmetric tensor onto the tau2 ray.

    The associated quadratic form x^T M x factors over C into two
    independent linear forms; the matrix of their zero directions,
    rescaled to unit determinant, has zero diagonal in the transformed
    tensor, i.e. the image is proportional to tau2.
    """
    m = PauliQuartet(s.v0, s.v1, s.v2, 0.0).matrix()
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        raise ValueError("zero input")
    if abs(minkowski_vec(s.v_array(), s.v_array())) <= tol * scale ** 2:
        raise ValueError("input is null")
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    if max(abs(a), abs(c)) <= 1e-14 * scale:
        return SL2.identity()  # already off-diagonal
    disc = np.sqrt(b * b - a * c)
    if abs(c) >= abs(a):
        # zero directions (1, t) of c t^2 + 2 b t + a
        u1 = -(b + disc) if abs(b + disc) >= abs(b - disc) else -(b - disc)
        t1 = u1 / c
        t2 = (a / c) / t1
        n1 = np.array([1.0, t1], dtype=complex)
        n2 = np.array([1.0, t2], dtype=complex)
    else:
        u1 = -(b + disc) if abs(b + disc) >= abs(b - disc) else -(b - disc)
        t1 = u1 / a
        t2 = (c / a) / t1
        n1 = np.array([t1, 1.0], dtype=complex)
        n2 = np.array([t2, 1.0], dtype=complex)
    raw = np.column_stack([n1, n2])
    return SL2.unit_normalized(raw)


def normal_complement(vplus_rows: np.ndarray) -> np.ndarray:
    """Direction normal (in the (-,+,+) sense) to a two-dimensional
    symmetric subspace, as a length-3 coefficient vector."""
    rows = np.asarray(vplus_rows, dtype=complex)
    if rows.shape != (2, 3):
        raise ValueError("expected two length-3 symmetric coefficient rows")
    a = rows @ MINKOWSKI_METRIC
    _, sv, vh = np.linalg.svd(a)
    if sv[-2] <= 1e-12 * sv[0]:
        raise ValueError("symmetric subspace is not two-dimensional")
    return np.conj(vh[-1])


def symmetric_rank_profile(space: CSpace, tol: float = ZERO_TOL):
    """(dim of symmetric part, sigma membership, w with u = w.v or None).

    w is reported only when the antisymmetric coefficient is a function of
    the symmetric part; it is the minimum-norm solution and is determined
    only up to directions normal to the symmetric part.
    """
    rows = space.coefficient_matrix()
    if rows.shape[0] == 0:
        return 0, False, None
    vpart = rows[:, :3]
    sv = np.linalg.svd(vpart, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(rows))))
    p = int(np.sum(sv > 1e-10 * scale))
    sigma_in = p < rows.shape[0]
    if sigma_in:
        return p, True, None
    w, *_ = np.linalg.lstsq(vpart @ MINKOWSKI_METRIC, rows[:, 3], rcond=None)
    resid = float(np.linalg.norm(vpart @ MINKOWSKI_METRIC @ w - rows[:, 3]))
    if resid > 1e-10 * scale:
        raise ClassificationError(
            f"antisymmetric part is not a consistent linear function of the "
            f"symmetric part (residual {resid:.3e})")
    return p, False, PauliQuartet(w[0], w[1], w[2], 0.0)


def invariant_signature(space: CSpace) -> SpaceSignature:
    """Orbit-invariant fingerprint (dimension, symmetric rank, rank of the
    induced bilinear form on the symmetric part, sigma membership)."""
    rows = space.coefficient_matrix()
    n = rows.shape[0]
    if n == 0:
        return SpaceSignature(0, 0, 0, False)
    vpart = rows[:, :3]
    u_mat, sv, vh = np.linalg.svd(vpart)
    scale = max(1.0, float(np.max(np.abs(rows))))
    p = int(np.sum(sv > 1e-10 * scale))
    sigma_in = p < n
    if p == 0:
        return SpaceSignature(n, 0, 0, sigma_in)
    basis = vh[:p]  # rows spanning the symmetric part
    gram = basis @ MINKOWSKI_METRIC @ basis.T
    gsv = np.linalg.svd(gram, compute_uv=False)
    grank = int(np.sum(gsv > ZERO_TOL * max(1.0, gsv[0])))
    return SpaceSignature(n, p, grank, sigma_in)


# ---------------------------------------------------------------------------
# the classifier

class _Pipeline:
    """Mutable state while reducing: coefficient rows plus the witness."""

    def __init__(self, space: CSpace):
        self.rows = space.coefficient_matrix().copy()
        self.gamma = SL2.identity()

    def apply(self, g: SL2) -> None:
        self.gamma = self.gamma @ g
        if self.rows.shape[0]:
            self.rows = np.array(
                [sl2_act(g, quartet_from_array(r)).as_array()
                 for r in self.rows])

    def apply_all(self, steps) -> None:
        for g in steps:
            self.apply(g)


def _needs_sign_flip(mu: complex) -> bool:
    """Canonical representative of the mu ~ -mu identification: right half
    plane, with the boundary resolved upward."""
    if mu.real > 1e-12:
        return False
    if mu.real < -1e-12:
        return True
    return mu.imag < -1e-12


def _solve_functional(rows: np.ndarray, v_targets: np.ndarray) -> np.ndarray:
    """Express basis rows as combinations whose symmetric parts are the
    given target vectors; return the antisymmetric coefficients u_i of
    those combinations."""
    n = rows.shape[0]
    coeff = np.array([[_component(rows[i, :3], v_targets[j])
                       for j in range(n)] for i in range(n)])
    sol = np.linalg.solve(coeff, rows)
    return sol[:, 3]


def _component(v: np.ndarray, target: np.ndarray) -> complex:
    """Coefficient of `target` in v, assuming v lies in the span of the
    target rows used by the caller (Euclidean projection)."""
    return complex(np.vdot(target, v) / np.vdot(target, target))


def classify(space: CSpace, *, tol: float = ZERO_TOL) -> ClassificationResult:
    """Reduce a constraint space to its canonical form.

    Returns the case label, the surviving modulus where the case has one,
    and a unit-determinant witness whose action maps the input onto the
    canonical basis (validated by span comparison before returning).
    """
    pipe = _Pipeline(space)
    n = pipe.rows.shape[0]

    if n == 0:
        form = CanonicalForm(CaseId.EMPTY)
        return _finish(space, pipe, form)

    vpart = pipe.rows[:, :3]
    sv = np.linalg.svd(vpart, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(pipe.rows))))
    p = int(np.sum(sv > 1e-10 * scale))
    sigma_in = p < n

    if p == 0:
        form = CanonicalForm(CaseId.ANTISYMMETRIC_LINE)
    elif p == 1:
        form = _classify_line(pipe, sigma_in, tol)
    elif p == 2:
        form = _classify_plane(pipe, sigma_in, tol)
    else:
        form = _classify_full(pipe, sigma_in, tol)
    return _finish(space, pipe, form)


def _v_direction(rows: np.ndarray) -> np.ndarray:
    """Unit vector spanning the (rank-one) symmetric row space."""
    _, _, vh = np.linalg.svd(rows[:, :3])
    return vh[0]


def _vplus_basis(rows: np.ndarray) -> np.ndarray:
    """Two rows spanning the (rank-two) symmetric row space."""
    _, _, vh = np.linalg.svd(rows[:, :3])
    return vh[:2]


def _classify_line(pipe: _Pipeline, sigma_in: bool, tol: float):
    s = _v_direction(pipe.rows)
    sq = quartet_from_array(np.concatenate([s, [0.0]]))
    is_null = abs(minkowski_vec(s, s)) <= tol * float(np.vdot(s, s).real)
    if is_null:
        pipe.apply(normalize_null(sq, tol))
        if sigma_in:
            return CanonicalForm(CaseId.NULL_LINE_SIGMA)
        row = pipe.rows[0]
        c = (row[0] + row[1]) / 2.0
        mu = row[3] / c
        if abs(mu) <= tol:
            return CanonicalForm(CaseId.NULL_LINE)
        pipe.apply(_scale(np.sqrt(mu)))
        return CanonicalForm(CaseId.NULL_LINE_TILTED)
    pipe.apply(normalize_nonnull(sq, tol))
    if sigma_in:
        return CanonicalForm(CaseId.NONNULL_LINE_SIGMA)
    row = pipe.rows[0]
    mu = row[3] / row[2]
    if _needs_sign_flip(mu):
        pipe.apply(_FLIP)
        mu = -mu
    return CanonicalForm(CaseId.NONNULL_LINE, mu)


def _classify_plane(pipe: _Pipeline, sigma_in: bool, tol: float):
    vp = _vplus_basis(pipe.rows)
    w_dir = normal_complement(vp)
    wq = quartet_from_array(np.concatenate([w_dir, [0.0]]))
    w_null = abs(minkowski_vec(w_dir, w_dir)) \
        <= tol * float(np.vdot(w_dir, w_dir).real)

    if not w_null:
        # symmetric part equivalent to span{tau0, tau2}
        pipe.apply(normalize_nonnull(wq, tol))
        pipe.apply(_R_T2_TO_T1)
        if sigma_in:
            raise UncataloguedSpaceError(
                "two-dimensional symmetric part with non-degenerate induced "
                "form plus the antisymmetric generator has no catalogued "
                "normal form")
        targets = np.array([[1, 0, 0], [0, 0, 1]], dtype=complex)
        u0, u1 = _solve_functional(pipe.rows, targets)
        if max(abs(u0), abs(u1)) <= tol:
            return CanonicalForm(CaseId.REGULAR_PLANE, 0.0)
        # w restricted to the plane: (w0, w2) = (-u0, u1)
        w0, w2 = -u0, u1
        rho2 = -w0 * w0 + w2 * w2
        if abs(rho2) <= tol * max(abs(w0), abs(w2)) ** 2:
            # null w: carry it onto the v2 - v0 direction
            if abs(w2 - w0) <= abs(w2 + w0):
                pipe.apply(_SWAP)
                w2 = -w2
            beta = (w0 - w2) / 2.0
            big_c = -(beta + 1.0 / beta) / 2.0
            big_s = (1.0 / beta - beta) / 2.0
            pipe.apply_all(_lorentz_steps(big_c, big_s))
            return CanonicalForm(CaseId.REGULAR_PLANE_TILTED)
        mu = np.sqrt(rho2)  # principal root lands in the canonical half plane
        pipe.apply_all(_lorentz_steps(w2 / mu, -w0 / mu))
        if _needs_sign_flip(mu):  # signed-zero edge of the principal branch
            pipe.apply(_FLIP)
            mu = -mu
        return CanonicalForm(CaseId.REGULAR_PLANE, mu)

    # null complement: symmetric part equivalent to span{tau0+tau1, tau2}
    pipe.apply(normalize_null(wq, tol))
    if sigma_in:
        return CanonicalForm(CaseId.DEGENERATE_PLANE_SIGMA)
    targets = np.array([[1, 1, 0], [0, 0, 1]], dtype=complex)
    u0, u1 = _solve_functional(pipe.rows, targets)
    beta, gamma_c = u0 / 2.0, u1
    if abs(beta) <= tol * max(1.0, abs(gamma_c)):
        # the modulus here admits no further reduction: the stabilizer of
        # the null ray is triangular and fixes the tau2 coefficient
        return CanonicalForm(CaseId.DEGENERATE_PLANE, gamma_c)
    pipe.apply(_shear(gamma_c / (2.0 * beta)))
    pipe.apply(_scale(np.sqrt(2.0 * beta)))
    return CanonicalForm(CaseId.DEGENERATE_PLANE_TILTED)


def _solve_w(rows: np.ndarray) -> np.ndarray:
    vpart = rows[:, :3]
    return np.linalg.solve(vpart @ MINKOWSKI_METRIC, rows[:, 3])


def _classify_full(pipe: _Pipeline, sigma_in: bool, tol: float):
    if sigma_in:
        return CanonicalForm(CaseId.FULL_SPACE)
    w = _solve_w(pipe.rows)
    wnorm = float(np.linalg.norm(w))
    if wnorm <= tol:
        return CanonicalForm(CaseId.FULL_SYMMETRIC, 0.0)
    wq = quartet_from_array(np.concatenate([w, [0.0]]))
    if abs(minkowski_vec(w, w)) <= tol * wnorm ** 2:
        pipe.apply(normalize_null(wq, tol))
        pipe.apply(_SWAP)
        w2 = _solve_w(pipe.rows)
        c = (w2[0] - w2[1]) / 2.0  # coefficient on the v0 - v1 ray
        pipe.apply(_scale(np.sqrt(-c)))
        return CanonicalForm(CaseId.FULL_SYMMETRIC_TILTED)
    pipe.apply(normalize_nonnull(wq, tol))
    mu = _solve_w(pipe.rows)[2]
    if _needs_sign_flip(mu):
        pipe.apply(_FLIP)
        mu = -mu
    return CanonicalForm(CaseId.FULL_SYMMETRIC, mu)


def _finish(space: CSpace, pipe: _Pipeline,
            form: CanonicalForm) -> ClassificationResult:
    canonical = canonical_space(form)
    image = sl2_act_space(pipe.gamma, space)
    if not span_equal(image, canonical, WITNESS_TOL):
        raise ClassificationError(
            f"witness validation failed for {form.case_id.value}")
    return ClassificationResult(form=form, gamma=pipe.gamma,
                                canonical=canonical)
