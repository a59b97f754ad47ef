"""Chain states: explicit kernel vectors and bond-matrix constructions.

Conventions shared by everything here:

 - a chain state on N two-state sites is a vector of 2^N amplitudes in
   the product basis, site 1 most significant, so the basis index of a
   bit string is just its value as a binary number;
 - states are returned UNNORMALIZED (their components are exact small
   integers or powers of a ratio); call .normalized() when needed;
 - bond-matrix (MPS) states assign amplitude tr(A^{s1} ... A^{sN}) to
   the string s.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .classify import CanonicalForm, CaseId, canonical_space
from .hamiltonian import (FamilyId, FamilyParams, max_sites)
from .pauli import CSpace, PauliQuartet, SL2

# Site guard for explicit state vectors (2^N amplitudes), overridable
# through MPS_MAX_SITES.
DEFAULT_MAX_STATE_SITES = 24

# Tolerance on |ratio^M - 1| when a construction requires a root of unity.
ROOT_TOL = 1e-9

# Largest cyclic order searched for when turning a modulus into a
# finite-dimensional bond representation.
MAX_ROOT_ORDER = 24


class NoRepresentationError(RuntimeError):
    """The catalogue has no bond-matrix representation for this case."""


@dataclass(frozen=True)
class StateVector:
    """Unnormalized amplitudes over the 2^N product basis."""

    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if self.n_sites < 1:
            raise ValueError("n_sites must be at least 1")
        if amps.shape != (2 ** self.n_sites,):
            raise ValueError("amplitude count must be 2**n_sites")
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitudes")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_sites, self.amplitudes / n)


@dataclass(frozen=True)
class NamedState:
    label: str
    state: StateVector


def _check_sites(n_sites: int) -> None:
    limit = max_sites(DEFAULT_MAX_STATE_SITES)
    if not 1 <= n_sites <= limit:
        raise ValueError(
            f"n_sites must be between 1 and {limit} (got {n_sites})")


def product_state(symbol: str, n_sites: int) -> StateVector:
    """|sss...s> for s in {'0', '1'}."""
    _check_sites(n_sites)
    if symbol not in ("0", "1"):
        raise ValueError("symbol must be '0' or '1'")
    amps = np.zeros(2 ** n_sites, dtype=complex)
    amps[0 if symbol == "0" else 2 ** n_sites - 1] = 1.0
    return StateVector(n_sites, amps)


def zeta_weight(bits, ratio) -> complex:
    """ratio ** (sum of 1-based zero positions - Z(Z+1)/2).

    The exponent counts how far the pattern of Z zeros sits to the right
    of the fully left-packed configuration, so the weight is 1 when all
    zeros are leading.
    """
    positions = [i + 1 for i, b in enumerate(str(bits)) if b == "0"]
    z = len(positions)
    exponent = sum(positions) - z * (z + 1) // 2
    return complex(ratio) ** exponent


def order_of_unit_root(z, max_order: int = MAX_ROOT_ORDER,
                       tol: float = ROOT_TOL):
    """Smallest M <= max_order with z^M = 1, or None."""
    z = complex(z)
    if abs(abs(z) - 1.0) > tol:
        return None
    w = 1.0 + 0.0j
    for m in range(1, max_order + 1):
        w *= z
        if abs(w - 1.0) <= tol:
            return m
    return None


def _strings_with_zeros(n_sites: int, n_zeros: int):
    """Yield (index, bits) over strings with exactly n_zeros zeros."""
    for zero_positions in itertools.combinations(range(n_sites), n_zeros):
        bits = ["1"] * n_sites
        for p in zero_positions:
            bits[p] = "0"
        s = "".join(bits)
        yield int(s, 2), s


def psi_k(n_sites: int, m_period: int, k: int, ratio) -> StateVector:
    """Weighted sum over all strings with exactly k*m_period zeros.

    The weight of a string is zeta_weight(string, ratio), and ratio must
    be a primitive root of unity of order exactly m_period.
    """
    _check_sites(n_sites)
    if m_period < 1:
        raise ValueError("m_period must be at least 1")
    if n_sites % m_period != 0:
        raise ValueError("n_sites must be a multiple of m_period")
    if not 0 <= k * m_period <= n_sites:
        raise ValueError("k*m_period must lie between 0 and n_sites")
    if order_of_unit_root(ratio, max_order=max(m_period, 1)) != m_period:
        raise ValueError(
            f"ratio must be a primitive root of unity of order {m_period}")
    amps = np.zeros(2 ** n_sites, dtype=complex)
    for idx, bits in _strings_with_zeros(n_sites, k * m_period):
        amps[idx] = zeta_weight(bits, ratio)
    return StateVector(n_sites, amps)


def psi_prime(n_sites: int, ratio=-1.0) -> StateVector:
    """Alternating-sign sum over even-zero-count strings, weight
    zeta_weight * (-1)^(half the zero count).  Defined for even chains
    and ratio -1."""
    _check_sites(n_sites)
    if n_sites % 2 != 0:
        raise ValueError("n_sites must be even")
    if abs(complex(ratio) + 1.0) > ROOT_TOL:
        raise ValueError("ratio must be -1")
    amps = np.zeros(2 ** n_sites, dtype=complex)
    for k in range(n_sites // 2 + 1):
        for idx, bits in _strings_with_zeros(n_sites, 2 * k):
            amps[idx] = (-1.0) ** k * zeta_weight(bits, ratio)
    return StateVector(n_sites, amps)


def psi_parity(n_sites: int, parity: str,
               literal_bounds: bool = True) -> StateVector:
    """Alternating-sign sums over fixed-parity zero counts.

    parity 'even': amplitude (-1)^k on strings with 2k zeros, k from 0.
    parity 'odd':  amplitude (-1)^k on strings with 2k+1 zeros.  With
    literal_bounds the odd sum starts at k = 1, which leaves single-zero
    strings with amplitude zero (and produces the zero vector on two
    sites); with literal_bounds=False it starts at k = 0.
    """
    _check_sites(n_sites)
    amps = np.zeros(2 ** n_sites, dtype=complex)
    if parity == "even":
        for k in range(n_sites // 2 + 1):
            for idx, _ in _strings_with_zeros(n_sites, 2 * k):
                amps[idx] = (-1.0) ** k
    elif parity == "odd":
        start = 1 if literal_bounds else 0
        for k in range(start, (n_sites + 1) // 2):
            if 2 * k + 1 > n_sites:
                break
            for idx, _ in _strings_with_zeros(n_sites, 2 * k + 1):
                amps[idx] = (-1.0) ** k
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    return StateVector(n_sites, amps)


def hardcore_strings(n_sites: int) -> list:
    """Bit strings with no two adjacent zeros, lexicographically sorted."""
    _check_sites(n_sites)
    out = []

    def grow(prefix: str):
        if len(prefix) == n_sites:
            out.append(prefix)
            return
        if not prefix.endswith("0"):
            grow(prefix + "0")
        grow(prefix + "1")

    grow("")
    return sorted(out)


def hardcore_states(n_sites: int) -> list:
    """The no-adjacent-zeros product basis states, lex order by string."""
    states = []
    for s in hardcore_strings(n_sites):
        amps = np.zeros(2 ** n_sites, dtype=complex)
        amps[int(s, 2)] = 1.0
        states.append(NamedState(s, StateVector(n_sites, amps)))
    return states


# ---------------------------------------------------------------------------
# bond-matrix states

@dataclass(frozen=True)
class MPSSpec:
    """A pair of square bond matrices (a0 for symbol 0, a1 for symbol 1)."""

    a0: np.ndarray
    a1: np.ndarray

    def __post_init__(self):
        a0 = np.atleast_2d(np.array(self.a0, dtype=complex))
        a1 = np.atleast_2d(np.array(self.a1, dtype=complex))
        if a0.shape != a1.shape or a0.ndim != 2 or a0.shape[0] != a0.shape[1]:
            raise ValueError("bond matrices must be square and equal sized")
        if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(a1))):
            raise ValueError("non-finite bond matrices")
        a0.flags.writeable = False
        a1.flags.writeable = False
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)

    @property
    def bond_dim(self) -> int:
        return self.a0.shape[0]


@dataclass(frozen=True)
class MPSResult:
    """Raw trace amplitudes, their squared sum z, and a zero-state flag.

    normalized is None exactly when is_zero: a bond representation can
    produce the zero vector (nilpotent matrices), which still satisfies
    every constraint but spans nothing.
    """

    state: StateVector
    z: float
    is_zero: bool
    normalized: StateVector | None


def transfer_matrix(spec: MPSSpec) -> np.ndarray:
    """kron(conj(a0), a0) + kron(conj(a1), a1); its N-th power traces to
    the squared norm of the N-site state."""
    return (np.kron(np.conj(spec.a0), spec.a0)
            + np.kron(np.conj(spec.a1), spec.a1))


def _half_products(spec: MPSSpec, n_bits: int, prepend: bool) -> np.ndarray:
    """All 2^n_bits ordered products of bond matrices, bits most
    significant first.  With prepend=False bit b extends products on the
    right (prefixes); with prepend=True on the left (suffixes)."""
    d = spec.bond_dim
    out = np.broadcast_to(np.eye(d, dtype=complex), (1, d, d)).copy()
    for _ in range(n_bits):
        nxt = np.empty((2 * out.shape[0], d, d), dtype=complex)
        if prepend:
            nxt[:out.shape[0]] = spec.a0 @ out
            nxt[out.shape[0]:] = spec.a1 @ out
        else:
            nxt[0::2] = out @ spec.a0
            nxt[1::2] = out @ spec.a1
        out = nxt
    return out


def mps_contract(spec: MPSSpec, n_sites: int,
                 zero_tol: float = 1e-24) -> MPSResult:
    """Evaluate all trace amplitudes of the N-site bond-matrix state.

    Meets in the middle: amplitudes factor as tr(P S) over prefix and
    suffix products, which is a single flat matrix product.
    """
    _check_sites(n_sites)
    d = spec.bond_dim
    m1 = n_sites // 2
    m2 = n_sites - m1
    pref = _half_products(spec, m1, prepend=False).reshape(2 ** m1, d * d)
    suff = _half_products(spec, m2, prepend=True)
    suff = suff.transpose(0, 2, 1).reshape(2 ** m2, d * d)
    amps = (pref @ suff.T).ravel()
    state = StateVector(n_sites, amps)

    t = transfer_matrix(spec)
    z = float(np.real(np.trace(np.linalg.matrix_power(t, n_sites))))
    # scale bound: z can never exceed (|a0|_F^2 + |a1|_F^2)^N; compare in
    # logs so huge N or huge entries cannot overflow
    s = np.linalg.norm(spec.a0) ** 2 + np.linalg.norm(spec.a1) ** 2
    if s == 0.0 or z <= 0.0:
        is_zero = True
    else:
        is_zero = np.log(z) < n_sites * np.log(s) + np.log(zero_tol)
    normalized = None if is_zero else state.normalized()
    return MPSResult(state=state, z=max(z, 0.0), is_zero=is_zero,
                     normalized=normalized)


# ---------------------------------------------------------------------------
# catalogued bond representations per canonical case

@dataclass(frozen=True)
class CaseRepresentation:
    """Bond matrices plus the constraint space they annihilate."""

    spec: MPSSpec
    space: CSpace


def constraint_residual(space: CSpace, spec: MPSSpec) -> float:
    """max over basis constraints of |C00 A0A0 + C01 A0A1 + C10 A1A0 +
    C11 A1A1|_F, relative to the bond matrix scale."""
    a = (spec.a0, spec.a1)
    scale = max(1.0, float(np.linalg.norm(a[0]) * np.linalg.norm(a[1])))
    worst = 0.0
    for q in space.basis:
        c = q.matrix()
        acc = np.zeros_like(a[0])
        for i in (0, 1):
            for j in (0, 1):
                acc = acc + c[i, j] * (a[i] @ a[j])
        worst = max(worst, float(np.linalg.norm(acc)) / scale)
    return worst


def _shift_matrix(m: int) -> np.ndarray:
    v = np.zeros((m, m), dtype=complex)
    for j in range(m):
        v[(j + 1) % m, j] = 1.0
    return v


_E01_2 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def representation_for_case(form: CanonicalForm,
                            params: dict | None = None) -> CaseRepresentation:
    """Catalogued bond matrices annihilating the canonical space of a case.

    Raises NoRepresentationError where the catalogue has none: the
    tilted regular plane, both full-symmetric cases, the full space, a
    non-null line whose modulus is not matched to a root of unity, and
    the regular plane away from modulus zero.
    """
    params = params or {}
    case = form.case_id

    if case is CaseId.EMPTY:
        return CaseRepresentation(
            MPSSpec(np.eye(1), np.eye(1)), canonical_space(form))
    if case is CaseId.ANTISYMMETRIC_LINE:
        return CaseRepresentation(
            MPSSpec(np.diag([1.0, 2.0]), np.diag([3.0, 1.0])),
            canonical_space(form))
    if case is CaseId.NONNULL_LINE:
        mu = complex(form.mu)
        if abs(mu - 1.0) <= ROOT_TOL:
            raise NoRepresentationError(
                "modulus 1 collapses the commutation factor")
        omega = (1.0 + mu) / (mu - 1.0)
        m = order_of_unit_root(omega)
        if m is None:
            raise NoRepresentationError(
                f"commutation factor {omega} is not a root of unity of "
                f"order at most {MAX_ROOT_ORDER}")
        clock = np.diag(omega ** np.arange(m)).astype(complex)
        return CaseRepresentation(
            MPSSpec(_shift_matrix(m), clock), canonical_space(form))
    if case is CaseId.NONNULL_LINE_SIGMA:
        return CaseRepresentation(
            MPSSpec(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])),
            canonical_space(form))
    if case in (CaseId.NULL_LINE, CaseId.NULL_LINE_TILTED,
                CaseId.NULL_LINE_SIGMA):
        return CaseRepresentation(
            MPSSpec(_E01_2, np.eye(2)), canonical_space(form))
    if case is CaseId.REGULAR_PLANE:
        if params.get("branch") == "commuting":
            # scalar pair with a0^2 + a1^2 = 0 and [a0, a1] = 0: it
            # annihilates span{tau0, sigma}, the plane this branch of the
            # parameter space actually degenerates to
            return CaseRepresentation(
                MPSSpec(np.eye(1), 1j * np.eye(1)),
                CSpace([PauliQuartet(1, 0, 0, 0), PauliQuartet(0, 0, 0, 1)]))
        if abs(complex(form.mu)) > ROOT_TOL:
            raise NoRepresentationError(
                "regular plane has a representation only at modulus zero")
        return CaseRepresentation(
            MPSSpec(np.diag([1.0, -1.0]),
                    np.array([[0.0, 1.0j], [1.0j, 0.0]])),
            canonical_space(form))
    if case is CaseId.DEGENERATE_PLANE:
        mu = complex(form.mu)
        diag = np.diag([1.0 + mu, mu - 1.0, 1.0]).astype(complex)
        e01 = np.zeros((3, 3), dtype=complex)
        e01[0, 1] = 1.0
        return CaseRepresentation(MPSSpec(e01, diag), canonical_space(form))
    if case is CaseId.DEGENERATE_PLANE_TILTED:
        e01 = np.zeros((3, 3), dtype=complex)
        e01[0, 1] = 1.0
        a1 = -e01.copy()
        a1[2, 2] = 1.0
        return CaseRepresentation(MPSSpec(e01, a1), canonical_space(form))
    if case is CaseId.DEGENERATE_PLANE_SIGMA:
        e01 = np.zeros((3, 3), dtype=complex)
        e01[0, 1] = 1.0
        e22 = np.zeros((3, 3), dtype=complex)
        e22[2, 2] = 1.0
        return CaseRepresentation(MPSSpec(e01, e22), canonical_space(form))
    raise NoRepresentationError(
        f"no catalogued bond representation for {case.value}")


def transform_state(state: StateVector, g: SL2) -> StateVector:
    """Push a chain state through the inverse one-site action on every
    site: the companion of the pair-energy congruence transform."""
    m = g.inverse().matrix
    t = state.amplitudes.reshape((2,) * state.n_sites)
    for axis in range(state.n_sites):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
    return StateVector(state.n_sites, t.ravel())


# ---------------------------------------------------------------------------
# which states go with which family

def ground_state_catalogue(params: FamilyParams,
                           n_sites: int) -> list:
    """The catalogued zero-energy states of a family on n_sites sites.

    Returns NamedState entries, unnormalized.  The list is exactly what
    the catalogue pairs with the family; it is not always a full kernel
    basis, and for the pair-sum exchange family away from nu_prime =
    +/- nu it is empty.
    """
    _check_sites(n_sites)
    if n_sites < 2:
        raise ValueError("a chain needs at least 2 sites")
    fam = params.family
    psi0 = NamedState("psi0", product_state("0", n_sites))
    psi1 = NamedState("psi1", product_state("1", n_sites))

    if fam is FamilyId.EXCHANGE:
        out = [psi0, psi1]
        if params.nu != 0:
            ratio = params.nu_prime / params.nu
            m = order_of_unit_root(ratio)
            if m is not None and n_sites % m == 0:
                for k in range(1, n_sites // m):
                    out.append(NamedState(
                        f"psi_k{k}", psi_k(n_sites, m, k, ratio)))
        return out
    if fam is FamilyId.HARDCORE:
        return hardcore_states(n_sites)
    if fam is FamilyId.ANTIALIGNED:
        return [psi0, psi1]
    if fam in (FamilyId.HARDCORE_MIXED, FamilyId.HARDCORE_SINGLET,
               FamilyId.HARDCORE_EXCHANGE, FamilyId.MIXED_SINGLET,
               FamilyId.PINNED):
        return [psi1]
    if fam is FamilyId.PAIRSUM_EXCHANGE:
        scale = max(abs(params.nu), abs(params.nu_prime))
        if abs(params.nu_prime + params.nu) <= 1e-12 * scale:
            if n_sites % 2 != 0:
                return []
            return [NamedState("psi_prime", psi_prime(n_sites))]
        if abs(params.nu_prime - params.nu) <= 1e-12 * scale:
            return [NamedState("psi_parity_odd",
                               psi_parity(n_sites, "odd",
                                          literal_bounds=False)),
                    NamedState("psi_parity_even",
                               psi_parity(n_sites, "even"))]
        return []
    raise ValueError(f"unknown family {fam!r}")
