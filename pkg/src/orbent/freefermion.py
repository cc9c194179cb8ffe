"""Free-fermion machinery: one-body diagonalization, Slater 1RDMs, the
correlation-matrix block entropy, and the Wick construction of two-orbital
reduced states.

Spinful systems are handled per spin channel: a single d x d matrix gamma
describes both channels of a spin-symmetric Slater determinant, with
gamma[j, i] = <f_i^dag f_j> and trace N per channel.
"""

from __future__ import annotations

import numpy as np

from .entanglement import SymmetricTwoOrbitalState, decompose_symmetric
from .fock import (
    DensityMatrix,
    FockSpace,
    ManyBodyState,
    apply_create,
    vacuum_state,
)

_HERM_TOL = 1e-12


class DegenerateFermiLevel(ValueError):
    """The requested filling cuts through a degenerate one-body level."""


def diagonalize_one_body(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and the unitary U with U h U^dag diagonal."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("one-body matrix must be square")
    if np.max(np.abs(h - h.conj().T)) > _HERM_TOL:
        raise ValueError("one-body matrix must be Hermitian")
    energies, v = np.linalg.eigh(h)
    return energies, v.conj().T


def slater_1rdm(h, n_occ: int, *, degeneracy_tol: float = 1e-10) -> np.ndarray:
    """1RDM of the n_occ-fermion ground state of a one-body Hamiltonian.

    The result is idempotent with trace n_occ (one spin channel).  A Fermi
    level degenerate within ``degeneracy_tol`` is rejected because the
    ground state, and hence the 1RDM, is then not unique.
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    if not 0 <= n_occ <= d:
        raise ValueError(f"occupation {n_occ} outside [0, {d}]")
    energies, u = diagonalize_one_body(h)
    if 0 < n_occ < d and energies[n_occ] - energies[n_occ - 1] < degeneracy_tol:
        raise DegenerateFermiLevel(
            f"levels {n_occ - 1} and {n_occ} coincide "
            f"({energies[n_occ - 1]!r} vs {energies[n_occ]!r})")
    v_occ = u.conj().T[:, :n_occ]
    gamma = v_occ.conj() @ v_occ.T
    return 0.5 * (gamma + gamma.conj().T)


def slater_fock_state(h, n_per_spin: int, *, degeneracy_tol: float = 1e-10) -> ManyBodyState:
    """Explicit Fock-space Slater determinant with both spin channels filled.

    Brute-force companion to the Wick route: applies the occupied
    eigenmode creation operators to the vacuum, one spin channel at a time.
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    energies, u = diagonalize_one_body(h)
    if 0 < n_per_spin < d and energies[n_per_spin] - energies[n_per_spin - 1] < degeneracy_tol:
        raise DegenerateFermiLevel("degenerate Fermi level: many-body ground state not unique")
    space = FockSpace(d)
    state = vacuum_state(space)
    for spin in (0, 1):
        for k in range(n_per_spin):
            coeffs = u[k]  # c_k^dag = sum_j U_kj f_j^dag, same orbitals as slater_1rdm
            acc = np.zeros(space.dim, dtype=complex)
            for j in range(d):
                if abs(coeffs[j]) < 1e-300:
                    continue
                acc += coeffs[j] * apply_create(state, space.mode(j, spin)).amps
            state = ManyBodyState(space, acc)
    norm = state.norm
    if abs(norm - 1.0) > 1e-9:
        raise RuntimeError(f"Slater construction lost normalization ({norm!r})")
    return ManyBodyState(space, state.amps / norm)


def peschel_block_entropy(gamma, orbitals, *, spin_channels: int = 2) -> float:
    """Block entropy from the restricted 1RDM spectrum.

    The reduced state of a Slater determinant is Gaussian, so its entropy
    is the binary-mixing entropy of the restricted 1RDM eigenvalues,
    multiplied by the number of identical spin channels.
    """
    orbitals = list(orbitals)
    if not orbitals:
        raise ValueError("orbital subset must be nonempty")
    gamma = np.asarray(gamma, dtype=complex)
    block = gamma[np.ix_(orbitals, orbitals)]
    nu = np.clip(np.linalg.eigvalsh(block).real, 0.0, 1.0)
    terms = np.zeros_like(nu)
    pos = nu > 0
    terms[pos] -= nu[pos] * np.log(nu[pos])
    hole = nu < 1
    terms[hole] -= (1 - nu[hole]) * np.log(1 - nu[hole])
    return float(spin_channels * np.sum(terms))


def _two_mode_gaussian(occ_l: float, occ_lp: float, coh: complex) -> np.ndarray:
    """Single-spin two-mode Gaussian state in the basis |00>, |10>, |01>, |11>.

    Determined by Wick's theorem from the 2 x 2 correlation block: the double
    occupancy is occ_l * occ_lp - |coh|^2 and the one-particle coherence is
    the off-diagonal 1RDM element itself.
    """
    pair = occ_l * occ_lp - abs(coh) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - occ_l - occ_lp + pair
    rho[1, 1] = occ_l - pair
    rho[2, 2] = occ_lp - pair
    rho[3, 3] = pair
    rho[1, 2] = np.conj(coh)  # <|10><01|> = <f_lp^dag f_l>
    rho[2, 1] = coh
    return rho


def two_orbital_state_from_block(occ_l: float, occ_lp: float, coh: complex,
                                 decompose: bool = True):
    """Two-orbital reduced state of a spin-symmetric Slater determinant.

    Input is the per-spin correlation data of the pair: diagonal occupations
    and the off-diagonal element coh = <f_l^dag f_lp>.  The spinful state is
    the graded product of the two identical spin-channel Gaussian states;
    regrouping modes from (l up, lp up, l down, lp down) to site-major order
    contributes the fermionic sign (-1)^(n_lp_up * n_l_down) per basis ket.

    Returns the 16 x 16 density matrix and its sector decomposition (None
    with ``decompose=False``, the only option for pairs without orbital
    exchange symmetry, i.e. occ_l != occ_lp or complex coh).
    """
    rho_spin = _two_mode_gaussian(occ_l, occ_lp, coh)
    rho = np.zeros((16, 16), dtype=complex)
    for x in range(16):
        n = [(x >> k) & 1 for k in (3, 2, 1, 0)]  # n_l_up, n_l_dn, n_lp_up, n_lp_dn
        xu, xd = 2 * n[0] + n[2], 2 * n[1] + n[3]  # per-spin (n_l, n_lp) as basis index
        sx = -1.0 if n[2] & n[1] else 1.0
        xi = 4 * (n[0] + 2 * n[1]) + (n[2] + 2 * n[3])
        for y in range(16):
            m = [(y >> k) & 1 for k in (3, 2, 1, 0)]
            yu, yd = 2 * m[0] + m[2], 2 * m[1] + m[3]
            sy = -1.0 if m[2] & m[1] else 1.0
            yi = 4 * (m[0] + 2 * m[1]) + (m[2] + 2 * m[3])
            rho[xi, yi] = sx * sy * rho_spin[_PAIR_INDEX[xu], _PAIR_INDEX[yu]] \
                * rho_spin[_PAIR_INDEX[xd], _PAIR_INDEX[yd]]
    dm = DensityMatrix(rho, (4, 4))
    if not decompose:
        return dm, None
    return dm, decompose_symmetric(dm, tol=1e-8)


# per-spin pair occupations (n_l, n_lp) encoded as 2*n_l + n_lp, mapped to the
# |00>, |10>, |01>, |11> ordering of _two_mode_gaussian
_PAIR_INDEX = np.array([0, 2, 1, 3])


def wick_two_orbital_rdm(gamma, l: int, lp: int, gamma_down=None,
                         decompose: bool = True):
    """Two-orbital reduced state of the Slater state with per-spin 1RDM gamma.

    Requires identical spin channels; pass ``gamma_down`` only to assert
    that, a differing channel is an error.  Returns (DensityMatrix,
    SymmetricTwoOrbitalState).
    """
    gamma = np.asarray(gamma, dtype=complex)
    if l == lp:
        raise ValueError("orbital indices must differ")
    if gamma_down is not None:
        gamma_down = np.asarray(gamma_down, dtype=complex)
        if gamma.shape != gamma_down.shape or np.max(np.abs(gamma - gamma_down)) > 1e-12:
            raise ValueError("spin channels differ: the spin-symmetric Wick "
                             "factorization does not apply")
    occ_l = float(gamma[l, l].real)
    occ_lp = float(gamma[lp, lp].real)
    # gamma[j, i] = <f_i^dag f_j>, so <f_l^dag f_lp> sits at [lp, l]
    coh = complex(gamma[lp, l])
    return two_orbital_state_from_block(occ_l, occ_lp, coh, decompose=decompose)
