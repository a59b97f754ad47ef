"""Exact-diagonalization checks of every zero-energy claim at small size.

All checks reduce to dense Hermitian eigensolves and residual norms, so
they are slow but unambiguous: a state either sits in the numerical
kernel of the assembled chain or it does not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .classify import CanonicalForm, CaseId, canonical_space
from .hamiltonian import (FullHamiltonian, LocalHamiltonian, FamilyParams,
                          build_family, conjugate_local, full_chain,
                          local_from_espace)
from .pauli import SL2
from .states import StateVector, ground_state_catalogue, transform_state

# Eigenvalues at or below KERNEL_TOL times the spectral scale count as
# kernel members.
KERNEL_TOL = 1e-9

# A clean kernel needs the first excluded eigenvalue to clear the
# threshold by this factor; otherwise the report carries a warning.
GAP_FACTOR = 1e3

# Default pass tolerance for zero-membership residuals.
MEMBER_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumReport:
    """Lowest eigenvalues of one chain plus per-state membership residuals."""

    n_sites: int
    ground_energy: float
    kernel_dim: int
    lowest_k_eigenvalues: tuple
    residuals: dict
    warning: str | None = None

    def all_pass(self, tol: float = MEMBER_TOL) -> bool:
        return all(r <= tol for r in self.residuals.values())


def spectrum(chain: FullHamiltonian, k: int = 8,
             kernel_tol: float = KERNEL_TOL) -> SpectrumReport:
    """Lowest k eigenvalues (ascending) and the kernel count.

    The kernel count uses a relative threshold; when the first excluded
    eigenvalue sits within GAP_FACTOR of that threshold the separation
    is ambiguous and the report says so instead of pretending.
    """
    evals = np.linalg.eigvalsh(chain.matrix)
    scale = max(1.0, float(np.max(np.abs(evals))))
    cut = kernel_tol * scale
    kernel_dim = int(np.sum(evals <= cut))
    warning = None
    if 0 < kernel_dim < evals.shape[0]:
        first_excluded = float(evals[kernel_dim])
        if first_excluded <= GAP_FACTOR * cut:
            warning = (f"first eigenvalue above the kernel cut "
                       f"({first_excluded:.3e}) is within {GAP_FACTOR:g}x "
                       f"of the threshold; kernel count may be unreliable")
    return SpectrumReport(
        n_sites=chain.n_sites,
        ground_energy=float(evals[0]),
        kernel_dim=kernel_dim,
        lowest_k_eigenvalues=tuple(float(v) for v in evals[:k]),
        residuals={},
        warning=warning,
    )


def check_zero_member(chain: FullHamiltonian, psi: StateVector,
                      tol: float = MEMBER_TOL) -> float:
    """Relative residual |H psi| / (|psi| max(1, |H|_F)).

    The caller decides pass/fail against tol; the value is returned so
    reports can show margins.  Zero input vectors are an error, not a
    trivial pass.
    """
    if psi.amplitudes.shape[0] != chain.matrix.shape[0]:
        raise ValueError("state and chain dimensions differ")
    norm = psi.norm()
    if norm == 0.0:
        raise ValueError("zero vector cannot witness a ground state")
    hnorm = max(1.0, float(np.linalg.norm(chain.matrix)))
    return float(np.linalg.norm(chain.matrix @ psi.amplitudes)
                 / (norm * hnorm))


def covariance_check(local: LocalHamiltonian, psi: StateVector, g: SL2,
                     n_sites: int) -> float:
    """Residual of the transformed state against the conjugated chain.

    If psi annihilates every bond term of the original chain, the
    site-wise inverse action of g must annihilate every bond term of the
    congruence-transformed chain, unitary or not.
    """
    moved = full_chain(conjugate_local(local, g), n_sites)
    return check_zero_member(moved, transform_state(psi, g))


def family_report(params: FamilyParams, n_sites: int, k: int = 8,
                  kernel_tol: float = KERNEL_TOL) -> SpectrumReport:
    """Spectrum of one family chain plus residuals of its catalogued
    zero-energy states."""
    chain = full_chain(build_family(params), n_sites)
    report = spectrum(chain, k=k, kernel_tol=kernel_tol)
    residuals = {ns.label: check_zero_member(chain, ns.state)
                 for ns in ground_state_catalogue(params, n_sites)}
    return replace(report, residuals=residuals)


def stacked_state_rank(states, tol: float = 1e-8) -> int:
    """Rank of the stacked (normalized) state matrix: how many of the
    catalogued states are actually independent."""
    if not states:
        return 0
    rows = np.array([s.normalized().amplitudes for s in states])
    sv = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


def no_mps_case_report(form: CanonicalForm, n_sites: int,
                       lam=None, k: int = 8) -> SpectrumReport:
    """Informational spectrum for a canonical space with no catalogued
    bond representation: constraint rows are the canonical basis itself,
    weighted by lam (identity when omitted).

    Reports what the ground energy and kernel look like; asserts nothing.
    """
    if not 2 <= n_sites <= 10:
        raise ValueError("informational reports are capped at 10 sites")
    space = canonical_space(form)
    if not space.basis:
        raise ValueError("the empty space has no constraints to report on")
    rows = np.array([q.flat() for q in space.basis])
    if lam is None:
        lam = np.eye(rows.shape[0])
    local = local_from_espace(rows, lam)
    return spectrum(full_chain(local, n_sites), k=k)
