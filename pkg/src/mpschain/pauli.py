"""Arithmetic layer for 2x2 complex tensors in the basis {tau0, tau1, tau2, sigma}.

A rank-2 tensor C on C^2 x C^2 is stored as the coefficient quartet
(v0, v1, v2, u) with C = v0*tau0 + v1*tau1 + v2*tau2 + u*sigma.  The first
three basis matrices are symmetric, sigma is antisymmetric, and the change
of basis is rational, so it is done in closed form rather than by a solve.

The module also provides the unimodular group action Op_g C = g^T C g,
the signature (-,+,+) bilinear product on the symmetric coefficients, the
invariant trace pairing, and a canonicalized subspace container (CSpace)
used by the classifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Relative rank threshold for independence and row-reduction decisions.
DEFAULT_RANK_TOL = 1e-10

# Determinant slack accepted for unimodular matrices.
DET_TOL = 1e-12

TAU0 = np.eye(2, dtype=complex)
TAU1 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
TAU2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)

# Metric of the bilinear product on (v0, v1, v2).
MINKOWSKI_METRIC = np.diag([-1.0, 1.0, 1.0]).astype(complex)


class LinearDependenceError(ValueError):
    """The supplied basis vectors are linearly dependent at rank_tol."""


class AmbiguousRankError(ValueError):
    """Independence cannot be decided: the smallest singular value falls in
    the band (rank_tol, 10*rank_tol].  Classification is discontinuous, so
    such inputs are rejected instead of silently reduced."""


def _as_complex(z) -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError("non-finite complex value")
    return z


@dataclass(frozen=True)
class PauliQuartet:
    """Coefficients (v0, v1, v2, u) of a 2x2 tensor in the tau/sigma basis."""

    v0: complex
    v1: complex
    v2: complex
    u: complex

    def __post_init__(self):
        for name in ("v0", "v1", "v2", "u"):
            object.__setattr__(self, name, _as_complex(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        """Coefficients as a length-4 complex vector (v0, v1, v2, u)."""
        return np.array([self.v0, self.v1, self.v2, self.u], dtype=complex)

    def v_array(self) -> np.ndarray:
        """Symmetric part (v0, v1, v2) only."""
        return np.array([self.v0, self.v1, self.v2], dtype=complex)

    def matrix(self) -> np.ndarray:
        """Recompose the 2x2 matrix v^i tau_i + u sigma."""
        return (self.v0 * TAU0 + self.v1 * TAU1
                + self.v2 * TAU2 + self.u * SIGMA)

    def flat(self) -> np.ndarray:
        """Entries (C00, C01, C10, C11) as a covector on the pair basis."""
        m = self.matrix()
        return np.array([m[0, 0], m[0, 1], m[1, 0], m[1, 1]], dtype=complex)

    def __add__(self, other: "PauliQuartet") -> "PauliQuartet":
        return PauliQuartet(self.v0 + other.v0, self.v1 + other.v1,
                            self.v2 + other.v2, self.u + other.u)

    def __rmul__(self, c) -> "PauliQuartet":
        c = complex(c)
        return PauliQuartet(c * self.v0, c * self.v1, c * self.v2, c * self.u)


def quartet_from_matrix(m) -> PauliQuartet:
    """Decompose a 2x2 matrix into its (v0, v1, v2, u) coefficients.

    The inverse basis change is closed form:
    v0=(C00+C11)/2, v1=(C00-C11)/2, v2=(C01+C10)/2, u=(C01-C10)/2.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    return PauliQuartet((m[0, 0] + m[1, 1]) / 2.0,
                        (m[0, 0] - m[1, 1]) / 2.0,
                        (m[0, 1] + m[1, 0]) / 2.0,
                        (m[0, 1] - m[1, 0]) / 2.0)


def quartet_from_array(a) -> PauliQuartet:
    a = np.asarray(a, dtype=complex)
    if a.shape != (4,):
        raise ValueError("expected 4 coefficients")
    return PauliQuartet(a[0], a[1], a[2], a[3])


def permute(c: PauliQuartet) -> PauliQuartet:
    """Index transposition (PC)_{ab} = C_{ba}: fixes v, negates u."""
    return PauliQuartet(c.v0, c.v1, c.v2, -c.u)


def project(c: PauliQuartet, sign: str) -> PauliQuartet:
    """Projector onto the symmetric ('+') or antisymmetric ('-') part."""
    if sign == "+":
        return PauliQuartet(c.v0, c.v1, c.v2, 0.0)
    if sign == "-":
        return PauliQuartet(0.0, 0.0, 0.0, c.u)
    raise ValueError("sign must be '+' or '-'")


def minkowski(a: PauliQuartet, b: PauliQuartet) -> complex:
    """Bilinear product -v0*w0 + v1*w1 + v2*w2 on the symmetric parts.

    No complex conjugation: this is the invariant of the unimodular
    action, not a Hermitian inner product.
    """
    return -a.v0 * b.v0 + a.v1 * b.v1 + a.v2 * b.v2


def minkowski_vec(a, b) -> complex:
    """Same product on bare length-3 coefficient vectors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return complex(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def trace_form(a: PauliQuartet, b: PauliQuartet) -> complex:
    """Invariant pairing tr(C1 sigma^-1 C2^T sigma^-1) in closed form."""
    return 2.0 * (-a.u * b.u + minkowski(a, b))


def trace_form_matrix(a: PauliQuartet, b: PauliQuartet) -> complex:
    """Same pairing evaluated by direct matrix multiplication.

    Kept as an independent evaluation route for testing.
    """
    sig_inv = np.linalg.inv(SIGMA)
    return complex(np.trace(a.matrix() @ sig_inv @ b.matrix().T @ sig_inv))


@dataclass(frozen=True)
class SL2:
    """A 2x2 complex matrix with unit determinant."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite entries")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1.0) > DET_TOL:
            raise ValueError(f"determinant {det} is not 1 within {DET_TOL}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def identity() -> "SL2":
        return SL2(np.eye(2, dtype=complex))

    @staticmethod
    def unit_normalized(m) -> "SL2":
        """Rescale an invertible matrix by a principal-root factor so the
        determinant becomes exactly one."""
        m = np.asarray(m, dtype=complex)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < 1e-300:
            raise ValueError("matrix is singular")
        g = m / np.sqrt(det)
        # kill the residual rounding in the determinant
        d2 = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        return SL2(g / np.sqrt(d2))

    def inverse(self) -> "SL2":
        a, b, c, d = self.matrix.ravel()
        return SL2(np.array([[d, -b], [-c, a]], dtype=complex))

    def __matmul__(self, other: "SL2") -> "SL2":
        # Op_{g1 @ g2} = Op_{g2} after Op_{g1}: matrix product composes
        # actions in application order.
        return SL2(self.matrix @ other.matrix)


def sl2_act(g: SL2, c: PauliQuartet) -> PauliQuartet:
    """Push a tensor through the unimodular action: quartet of g^T C g.

    The u component is untouched (the antisymmetric part scales with the
    determinant, which is one).
    """
    out = quartet_from_matrix(g.matrix.T @ c.matrix() @ g.matrix)
    # restore exact invariance of u against rounding
    return PauliQuartet(out.v0, out.v1, out.v2, c.u)


class CSpace:
    """A subspace of the tau/sigma coefficient space, given by a basis.

    The basis is independence-checked and canonicalized on construction by
    row reduction (columns scanned left to right, partial pivoting on row
    magnitude), so that two equal spans produce the same stored basis up
    to rounding.
    """

    def __init__(self, basis: Iterable[PauliQuartet],
                 rank_tol: float = DEFAULT_RANK_TOL):
        rows = [q if isinstance(q, PauliQuartet) else quartet_from_array(q)
                for q in basis]
        self.rank_tol = float(rank_tol)
        if len(rows) > 4:
            raise LinearDependenceError("more than 4 basis vectors")
        if rows:
            coeff = np.array([r.as_array() for r in rows])
            self._check_independence(coeff)
            reduced = _row_reduce(coeff, self.rank_tol)
            if reduced.shape[0] != len(rows):
                # row reduction lost a vector the SVD band check let through
                raise LinearDependenceError("basis is not independent")
            self.basis = tuple(quartet_from_array(r) for r in reduced)
        else:
            self.basis = ()

    def _check_independence(self, coeff: np.ndarray) -> None:
        s = np.linalg.svd(coeff, compute_uv=False)
        if s[0] == 0.0:
            raise LinearDependenceError("zero basis vector")
        ratio = s[-1] / s[0]
        if ratio <= self.rank_tol:
            raise LinearDependenceError(
                f"smallest/largest singular value ratio {ratio:.3e} "
                f"below rank_tol {self.rank_tol:.1e}")
        if ratio <= 10.0 * self.rank_tol:
            raise AmbiguousRankError(
                f"singular value ratio {ratio:.3e} falls in the ambiguous "
                f"band (rank_tol, 10*rank_tol]; refusing to guess")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coefficient_matrix(self) -> np.ndarray:
        """Basis rows as an (dim x 4) complex array."""
        if not self.basis:
            return np.zeros((0, 4), dtype=complex)
        return np.array([q.as_array() for q in self.basis])

    def contains(self, q: PauliQuartet, tol: float = 1e-8) -> bool:
        vec = q.as_array()
        scale = max(1.0, float(np.linalg.norm(vec)))
        if self.dim == 0:
            return float(np.linalg.norm(vec)) <= tol * scale
        b = self.coefficient_matrix()
        coef, *_ = np.linalg.lstsq(b.T, vec, rcond=None)
        resid = np.linalg.norm(b.T @ coef - vec)
        return float(resid) <= tol * scale

    def __repr__(self):
        return f"CSpace(dim={self.dim})"


def _row_reduce(rows: np.ndarray, tol: float) -> np.ndarray:
    """Reduced row-echelon form over C; returns the nonzero rows."""
    m = np.array(rows, dtype=complex)
    if m.size == 0:
        return m
    scale = max(1.0, float(np.max(np.abs(m))))
    thresh = tol * scale
    r = 0
    for col in range(m.shape[1]):
        if r >= m.shape[0]:
            break
        piv = r + int(np.argmax(np.abs(m[r:, col])))
        if abs(m[piv, col]) <= thresh:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] / m[r, col]
        for i in range(m.shape[0]):
            if i != r:
                m[i] = m[i] - m[i, col] * m[r]
        r += 1
    return m[:r]


def sl2_act_space(g: SL2, space: CSpace) -> CSpace:
    """Image of a subspace under the action; re-checked and canonicalized."""
    return CSpace([sl2_act(g, q) for q in space.basis],
                  rank_tol=space.rank_tol)


def span_equal(a: CSpace, b: CSpace, tol: float = 1e-8) -> bool:
    """True iff the two spans agree: equal dimension and every basis vector
    of one lies within tol (relative) of the span of the other."""
    if a.dim != b.dim:
        return False
    return all(b.contains(q, tol) for q in a.basis) and \
        all(a.contains(q, tol) for q in b.basis)


def random_sl2(rng: np.random.Generator, max_cond: float | None = None) -> SL2:
    """Draw a unit-determinant matrix with complex normal entries.

    With max_cond set, rejection-sample until the condition number is at
    most that bound.
    """
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < 1e-3:
            continue
        g = SL2.unit_normalized(m)
        if max_cond is None:
            return g
        s = np.linalg.svd(g.matrix, compute_uv=False)
        if s[0] / s[-1] <= max_cond:
            return g
