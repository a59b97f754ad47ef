"""Local pair Hamiltonians h = R* Lambda R and their open-chain sums.

A constraint functional E acts on a pair of neighbouring two-state sites
through its coefficient row (E00, E01, E10, E11) in the product basis
(|00>, |01>, |10>, |11>), first site most significant.  Stacking the rows
of the chosen functionals into R and weighting with a Hermitian
positive-semidefinite Lambda gives the positive pair energy

    h = R^dagger Lambda R,

whose kernel is exactly the joint kernel of the functionals.  The module
provides that generic constructor, a catalogue of nine named families
with validated parameters, an independent spin-operator construction for
every family (kept deliberately separate from the R^dagger Lambda R
route so the two can be compared), and the open-chain embedding
H = sum_i h_{i,i+1}.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pauli import CSpace, quartet_from_matrix

# Relative tolerance for Hermiticity of inputs and outputs.
HERMITICITY_TOL = 1e-12

# Relative slack when checking positive semidefiniteness.
PSD_TOL = 1e-10

# Dense chain matrices above this site count are refused unless the
# MPS_MAX_SITES environment variable raises the bound.
DEFAULT_MAX_SITES = 14


class ParameterError(ValueError):
    """A family parameter set is incomplete or out of range."""


class ChainSizeError(ValueError):
    """The requested chain length is outside the dense-matrix guard."""


class FamilyId(str, Enum):
    """Named pair-energy families."""

    EXCHANGE = "exchange"
    HARDCORE = "hardcore"
    HARDCORE_MIXED = "hardcore-mixed"
    ANTIALIGNED = "antialigned"
    HARDCORE_SINGLET = "hardcore-singlet"
    PAIRSUM_EXCHANGE = "pairsum-exchange"
    HARDCORE_EXCHANGE = "hardcore-exchange"
    MIXED_SINGLET = "mixed-singlet"
    PINNED = "pinned"


# parameter fields each family requires
REQUIRED_PARAMS = {
    FamilyId.EXCHANGE: ("g", "nu", "nu_prime"),
    FamilyId.HARDCORE: ("g",),
    FamilyId.HARDCORE_MIXED: ("g",),
    FamilyId.ANTIALIGNED: ("g1", "g2", "g3"),
    FamilyId.HARDCORE_SINGLET: ("g1", "g2", "g3"),
    FamilyId.PAIRSUM_EXCHANGE: ("g1", "g2", "g3", "nu", "nu_prime"),
    FamilyId.HARDCORE_EXCHANGE: ("g1", "g2", "g3", "nu", "nu_prime"),
    FamilyId.MIXED_SINGLET: ("g1", "g2", "g3"),
    FamilyId.PINNED: ("lambda3",),
}


def max_sites(default: int = DEFAULT_MAX_SITES) -> int:
    """Site guard, overridable through MPS_MAX_SITES."""
    env = os.environ.get("MPS_MAX_SITES")
    if env is None:
        return default
    try:
        return int(env)
    except ValueError as exc:
        raise ChainSizeError(f"MPS_MAX_SITES={env!r} is not an integer") \
            from exc


@dataclass(frozen=True)
class FamilyParams:
    """Validated coupling constants for one family.

    Unused fields stay None; which ones are required depends on the
    family (see REQUIRED_PARAMS).
    """

    family: FamilyId
    g: float | None = None
    g1: float | None = None
    g2: float | None = None
    g3: complex | None = None
    nu: complex | None = None
    nu_prime: complex | None = None
    lambda3: np.ndarray | None = None

    def _real(self, name: str) -> float:
        c = complex(getattr(self, name))
        if c.imag != 0.0:
            raise ParameterError(f"{name} must be real")
        return float(c.real)

    def __post_init__(self):
        fam = FamilyId(self.family)
        object.__setattr__(self, "family", fam)
        required = REQUIRED_PARAMS[fam]
        for name in required:
            if getattr(self, name) is None:
                raise ParameterError(f"{fam.value} requires parameter {name}")
        for name in ("g", "g1", "g2", "g3", "nu", "nu_prime", "lambda3"):
            if name not in required and getattr(self, name) is not None:
                raise ParameterError(
                    f"{fam.value} does not take parameter {name}")
        if "g" in required:
            g = self._real("g")
            if g <= 0.0:
                raise ParameterError("g must be positive")
            object.__setattr__(self, "g", g)
        if "g1" in required:
            g1, g2 = self._real("g1"), self._real("g2")
            g3 = complex(self.g3)
            if g1 < 0.0 or g2 < 0.0:
                raise ParameterError("g1 and g2 must be nonnegative")
            det = g1 * g2 - abs(g3) ** 2
            if det < -PSD_TOL * max(1.0, g1 * g2, abs(g3) ** 2):
                raise ParameterError(
                    "weight matrix [[g1, g3], [conj(g3), g2]] is not "
                    "positive semidefinite")
            object.__setattr__(self, "g1", g1)
            object.__setattr__(self, "g2", g2)
            object.__setattr__(self, "g3", g3)
        if "nu" in required:
            nu, nup = complex(self.nu), complex(self.nu_prime)
            if max(abs(nu), abs(nup)) == 0.0:
                raise ParameterError("nu and nu_prime cannot both vanish")
            object.__setattr__(self, "nu", nu)
            object.__setattr__(self, "nu_prime", nup)
        if "lambda3" in required:
            lam = np.array(self.lambda3, dtype=complex)
            if lam.shape != (3, 3):
                raise ParameterError("lambda3 must be a 3x3 matrix")
            _check_weight_matrix(lam)
            lam.flags.writeable = False
            object.__setattr__(self, "lambda3", lam)


def params_from_mapping(family, mapping) -> FamilyParams:
    """Build FamilyParams from a plain dict (CLI/JSON friendly)."""
    fam = FamilyId(family)
    known = {"g", "g1", "g2", "g3", "nu", "nu_prime", "lambda3"}
    extra = set(mapping) - known
    if extra:
        raise ParameterError(f"unknown parameters: {sorted(extra)}")
    return FamilyParams(family=fam, **dict(mapping))


def _check_weight_matrix(lam: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.max(np.abs(lam - lam.conj().T)) > HERMITICITY_TOL * scale:
        raise ParameterError("weight matrix is not Hermitian")
    evals = np.linalg.eigvalsh(lam)
    if evals[0] < -PSD_TOL * max(1.0, evals[-1]):
        raise ParameterError("weight matrix is not positive semidefinite")


@dataclass(frozen=True)
class LocalHamiltonian:
    """A 4x4 Hermitian positive-semidefinite pair energy."""

    matrix: np.ndarray
    family: FamilyId | None = None
    params: FamilyParams | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("expected a 4x4 matrix")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL * scale:
            raise ValueError("pair energy is not Hermitian")
        evals = np.linalg.eigvalsh(m)
        if evals[0] < -PSD_TOL * max(1.0, evals[-1]):
            raise ValueError("pair energy is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def kernel_dimension(self, tol: float = 1e-9) -> int:
        evals = np.linalg.eigvalsh(self.matrix)
        return int(np.sum(evals <= tol * max(1.0, evals[-1])))


@dataclass(frozen=True)
class FullHamiltonian:
    """Open-chain sum of one pair energy over all nearest neighbours."""

    n_sites: int
    matrix: np.ndarray


# ---------------------------------------------------------------------------
# generic route: h = R^dagger Lambda R

def local_from_espace(rows, lam, family=None, params=None) -> LocalHamiltonian:
    """Pair energy from constraint rows and a Hermitian PSD weight.

    rows: (k, 4) coefficient rows in the (|00>, |01>, |10>, |11>) basis.
    lam:  (k, k) Hermitian positive-semidefinite weight matrix.
    """
    r = np.atleast_2d(np.asarray(rows, dtype=complex))
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    k = r.shape[0]
    if r.shape != (k, 4):
        raise ValueError("constraint rows must have four components")
    if lam.shape != (k, k):
        raise ValueError("weight matrix shape does not match the row count")
    _check_weight_matrix(lam)
    h = r.conj().T @ lam @ r
    h = (h + h.conj().T) / 2.0  # symmetrize away rounding
    return LocalHamiltonian(h, family=family, params=params)


def family_espace(params: FamilyParams):
    """Constraint rows and weight matrix of a named family."""
    p = params
    fam = p.family
    if fam is FamilyId.EXCHANGE:
        return (np.array([[0.0, p.nu_prime, -p.nu, 0.0]], dtype=complex),
                np.array([[p.g]], dtype=complex))
    if fam is FamilyId.HARDCORE:
        return (np.array([[2.0, 0.0, 0.0, 0.0]], dtype=complex),
                np.array([[p.g]], dtype=complex))
    if fam is FamilyId.HARDCORE_MIXED:
        return (np.array([[2.0, 1.0, -1.0, 0.0]], dtype=complex),
                np.array([[p.g]], dtype=complex))
    lam2 = np.array([[p.g1, p.g3], [np.conj(p.g3), p.g2]], dtype=complex) \
        if p.g1 is not None else None
    if fam is FamilyId.ANTIALIGNED:
        return (np.array([[0, 1, 0, 0], [0, 0, 1, 0]], dtype=complex), lam2)
    if fam is FamilyId.HARDCORE_SINGLET:
        return (np.array([[1, 0, 0, 0], [0, 1, -1, 0]], dtype=complex), lam2)
    if fam is FamilyId.PAIRSUM_EXCHANGE:
        return (np.array([[1, 0, 0, 1],
                          [0, p.nu_prime, -p.nu, 0]], dtype=complex), lam2)
    if fam is FamilyId.HARDCORE_EXCHANGE:
        return (np.array([[1, 0, 0, 0],
                          [0, p.nu_prime, -p.nu, 0]], dtype=complex), lam2)
    if fam is FamilyId.MIXED_SINGLET:
        return (np.array([[2, 1, 1, 0], [0, 1, -1, 0]], dtype=complex), lam2)
    if fam is FamilyId.PINNED:
        rows = np.zeros((3, 4), dtype=complex)
        rows[0, 0] = rows[1, 1] = rows[2, 2] = 1.0
        return rows, np.array(p.lambda3, dtype=complex)
    raise ParameterError(f"unknown family {fam!r}")


def family_space(params: FamilyParams) -> CSpace:
    """The constraint subspace of a family, in quartet coordinates."""
    rows, _ = family_espace(params)
    return CSpace([quartet_from_matrix(r.reshape(2, 2)) for r in rows])


# ---------------------------------------------------------------------------
# independent route: explicit spin-operator sums

_I2 = np.eye(2, dtype=complex)
_S3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_SP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SM = _SP.T.copy()
_S1 = _SP + _SM


def _k(a, b):
    return np.kron(a, b)


def _pauli_exchange(g, nu, nup):
    s = abs(nu) ** 2 + abs(nup) ** 2
    return g * (s / 4.0 * (_k(_I2, _I2) - _k(_S3, _S3))
                + (abs(nup) ** 2 - abs(nu) ** 2) / 4.0
                * (_k(_S3, _I2) - _k(_I2, _S3))
                - np.conj(nup) * nu * _k(_SP, _SM)
                - nup * np.conj(nu) * _k(_SM, _SP))


def _pauli_hardcore(g):
    return g * _k(_I2 + _S3, _I2 + _S3)


def _pauli_hardcore_mixed(g):
    return g * (1.5 * _k(_I2, _I2) + _k(_I2, _S3) + _k(_S3, _I2)
                + 0.5 * _k(_S3, _S3)
                + _k(_I2 + _S3, _S1) - _k(_S1, _I2 + _S3)
                - _k(_SM, _SP) - _k(_SP, _SM))


def _pauli_antialigned(g1, g2, g3):
    return ((g1 + g2) / 4.0 * (_k(_I2, _I2) - _k(_S3, _S3))
            + (g1 - g2) / 4.0 * (_k(_S3, _I2) - _k(_I2, _S3))
            + g3 * _k(_SP, _SM) + np.conj(g3) * _k(_SM, _SP))


def _pauli_hardcore_singlet(g1, g2, g3):
    x = g3 * _SP + np.conj(g3) * _SM
    return ((g1 + 2.0 * g2) / 4.0 * _k(_I2, _I2)
            + g1 / 4.0 * (_k(_S3, _I2) + _k(_I2, _S3))
            + (g1 - 2.0 * g2) / 4.0 * _k(_S3, _S3)
            - g2 * (_k(_SP, _SM) + _k(_SM, _SP))
            + _k((_I2 + _S3) / 2.0, x) - _k(x, (_I2 + _S3) / 2.0))


def _pauli_pairsum_exchange(g1, g2, g3, nu, nup):
    s = abs(nu) ** 2 + abs(nup) ** 2
    cnu, cnup, cg3 = np.conj(nu), np.conj(nup), np.conj(g3)
    h = ((2.0 * g1 + g2 * s) / 4.0 * _k(_I2, _I2)
         + (2.0 * g1 - g2 * s) / 4.0 * _k(_S3, _S3)
         + g1 * (_k(_SP, _SP) + _k(_SM, _SM))
         - g2 * cnup * nu * _k(_SP, _SM)
         - g2 * nup * cnu * _k(_SM, _SP)
         + g2 * (abs(nup) ** 2 - abs(nu) ** 2) / 4.0
         * (_k(_S3, _I2) - _k(_I2, _S3)))
    h += g3 / 2.0 * (_k(_I2, nup * _SP - nu * _SM)
                     + _k(nup * _SM - nu * _SP, _I2)
                     + _k(_S3, nup * _SP + nu * _SM)
                     - _k(nup * _SM + nu * _SP, _S3))
    h += cg3 / 2.0 * (_k(_I2, cnup * _SM - cnu * _SP)
                      + _k(cnup * _SP - cnu * _SM, _I2)
                      + _k(_S3, cnup * _SM + cnu * _SP)
                      - _k(cnup * _SP + cnu * _SM, _S3))
    return h


def _pauli_hardcore_exchange(g1, g2, g3, nu, nup):
    s = abs(nu) ** 2 + abs(nup) ** 2
    cnu, cnup, cg3 = np.conj(nu), np.conj(nup), np.conj(g3)
    h = ((g1 + g2 * s) / 4.0 * _k(_I2, _I2)
         + (g1 - g2 * s) / 4.0 * _k(_S3, _S3)
         + g1 / 4.0 * (_k(_S3, _I2) + _k(_I2, _S3))
         - g2 * (cnup * nu * _k(_SP, _SM) + nup * cnu * _k(_SM, _SP))
         + g2 * (abs(nup) ** 2 - abs(nu) ** 2) / 4.0
         * (_k(_S3, _I2) - _k(_I2, _S3)))
    h += g3 / 2.0 * (nup * _k(_I2, _SP) - nu * _k(_SP, _I2)
                     + nup * _k(_S3, _SP) - nu * _k(_SP, _S3))
    h += cg3 / 2.0 * (cnup * _k(_I2, _SM) - cnu * _k(_SM, _I2)
                      + cnup * _k(_S3, _SM) - cnu * _k(_SM, _S3))
    return h


def _pauli_mixed_singlet(g1, g2, g3):
    cg3 = np.conj(g3)
    x = g3 * _SP + cg3 * _SM
    return ((3.0 * g1 + g2) / 2.0 * _k(_I2, _I2)
            + (g1 - g2) / 2.0 * _k(_S3, _S3)
            + (g1 - g2) * (_k(_SP, _SM) + _k(_SM, _SP))
            + g1 * (_k(_S3, _S1) + _k(_S1, _S3))
            + g1 * (_k(_S3 + _S1, _I2) + _k(_I2, _S3 + _S1))
            + _k(_I2 + _S3, x) - _k(x, _I2 + _S3)
            + (g3 + cg3) / 2.0 * (_k(_S3, _I2) - _k(_I2, _S3))
            + (cg3 - g3) * (_k(_SP, _SM) - _k(_SM, _SP)))


# single-site matrix units for the pinned sum
_UNIT = {(0, 0): (_I2 + _S3) / 2.0, (0, 1): _SP,
         (1, 0): _SM, (1, 1): (_I2 - _S3) / 2.0}


def _pauli_pinned(lam3):
    pairs = [(0, 0), (0, 1), (1, 0)]  # |00>, |01>, |10>
    h = np.zeros((4, 4), dtype=complex)
    for a, pa in enumerate(pairs):
        for b, pb in enumerate(pairs):
            h += lam3[a, b] * _k(_UNIT[pa[0], pb[0]], _UNIT[pa[1], pb[1]])
    return h


def build_family(params: FamilyParams) -> LocalHamiltonian:
    """Pair energy of a named family via explicit operator sums.

    Independent of local_from_espace; the two must agree to rounding.
    """
    p = params
    fam = p.family
    if fam is FamilyId.EXCHANGE:
        h = _pauli_exchange(p.g, p.nu, p.nu_prime)
    elif fam is FamilyId.HARDCORE:
        h = _pauli_hardcore(p.g)
    elif fam is FamilyId.HARDCORE_MIXED:
        h = _pauli_hardcore_mixed(p.g)
    elif fam is FamilyId.ANTIALIGNED:
        h = _pauli_antialigned(p.g1, p.g2, p.g3)
    elif fam is FamilyId.HARDCORE_SINGLET:
        h = _pauli_hardcore_singlet(p.g1, p.g2, p.g3)
    elif fam is FamilyId.PAIRSUM_EXCHANGE:
        h = _pauli_pairsum_exchange(p.g1, p.g2, p.g3, p.nu, p.nu_prime)
    elif fam is FamilyId.HARDCORE_EXCHANGE:
        h = _pauli_hardcore_exchange(p.g1, p.g2, p.g3, p.nu, p.nu_prime)
    elif fam is FamilyId.MIXED_SINGLET:
        h = _pauli_mixed_singlet(p.g1, p.g2, p.g3)
    elif fam is FamilyId.PINNED:
        h = _pauli_pinned(p.lambda3)
    else:
        raise ParameterError(f"unknown family {fam!r}")
    h = (h + h.conj().T) / 2.0
    return LocalHamiltonian(h, family=fam, params=p)


# ---------------------------------------------------------------------------
# chain embedding

def full_chain(local: LocalHamiltonian, n_sites: int) -> FullHamiltonian:
    """H = sum_i 1 x ... x h_{i,i+1} x ... x 1 on the open chain."""
    limit = max_sites()
    if not 2 <= n_sites <= limit:
        raise ChainSizeError(
            f"n_sites must be between 2 and {limit} (got {n_sites})")
    dim = 2 ** n_sites
    h = local.matrix
    total = np.zeros((dim, dim), dtype=complex)
    for i in range(n_sites - 1):
        left = np.eye(2 ** i, dtype=complex)
        right = np.eye(2 ** (n_sites - 2 - i), dtype=complex)
        total += np.kron(np.kron(left, h), right)
    return FullHamiltonian(n_sites=n_sites, matrix=total)


def conjugate_local(local: LocalHamiltonian, g) -> LocalHamiltonian:
    """Congruence transform (g x g)^dagger h (g x g).

    This is how a pair energy responds when every constraint row is pushed
    through the unimodular action; positivity and the kernel dimension
    survive, the spectrum only for unitary g.
    """
    gg = np.kron(g.matrix, g.matrix)
    h = gg.conj().T @ local.matrix @ gg
    h = (h + h.conj().T) / 2.0
    return LocalHamiltonian(h)
