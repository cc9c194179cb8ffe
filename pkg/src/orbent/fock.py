"""Occupation-number Fock space for d spinful orbitals.

Conventions, fixed globally and referenced by every sign computation:

* Spin-orbital modes are interleaved site-major with up before down, so
  mode p = 2*site + spin with spin 0 = up, 1 = down (sites are 0-based).
* A basis configuration is the integer whose bit p holds the occupation
  of mode p.  The corresponding ket is the ordered creation string

      |n> = (f_0^dag)^{n_0} (f_1^dag)^{n_1} ... |vac>,

  so acting with f_p^(dag) picks up the sign (-1)^(occupied modes below p).
* Density matrices over tensor factors use numpy's kron/reshape order:
  the first factor is the most significant "digit" of the flat index.
  The local basis of one spinful orbital is |0>, |up>, |down>, |updown>,
  i.e. local index alpha = n_up + 2*n_down.
"""

from __future__ import annotations

import logging

import numpy as np

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10

UP, DOWN = 0, 1


def popcount(x):
    """Number of set bits, elementwise."""
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


class FockSpace:
    """Basis bookkeeping for ``n_spatial`` spinful orbitals (dimension 4**d)."""

    def __init__(self, n_spatial: int):
        if not 1 <= n_spatial <= 16:
            raise ValueError(f"n_spatial must be in [1, 16], got {n_spatial}")
        self.n_spatial = n_spatial
        self.n_modes = 2 * n_spatial
        self.dim = 4**n_spatial

    def mode(self, site: int, spin: int) -> int:
        """Spin-orbital index of (site, spin); spin 0 = up, 1 = down."""
        if not 0 <= site < self.n_spatial:
            raise ValueError(f"site {site} out of range for d={self.n_spatial}")
        if spin not in (0, 1):
            raise ValueError("spin must be 0 (up) or 1 (down)")
        return 2 * site + spin

    def configs(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.int64)

    def config_n(self) -> np.ndarray:
        """Total particle number of every configuration."""
        return popcount(self.configs())

    def config_sz2(self) -> np.ndarray:
        """Twice the magnetization (n_up - n_down) of every configuration."""
        up_mask = sum(1 << (2 * s) for s in range(self.n_spatial))
        idx = self.configs()
        return popcount(idx & up_mask) - popcount(idx & (up_mask << 1))

    def __eq__(self, other):
        return isinstance(other, FockSpace) and other.n_spatial == self.n_spatial

    def __repr__(self):
        return f"FockSpace(n_spatial={self.n_spatial})"


class ManyBodyState:
    """Complex amplitude vector over the occupation-number basis.

    Operator images are allowed to be unnormalized (or zero); consumers
    that require a unit state check ``norm`` explicitly.
    """

    def __init__(self, space: FockSpace, amps):
        amps = np.asarray(amps, dtype=complex)
        if amps.shape != (space.dim,):
            raise ValueError(f"amplitude vector must have shape ({space.dim},)")
        self.space = space
        self.amps = amps

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "ManyBodyState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return ManyBodyState(self.space, self.amps / n)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.norm <= tol

    def overlap(self, other: "ManyBodyState") -> complex:
        return complex(np.vdot(self.amps, other.amps))


def vacuum_state(space: FockSpace) -> ManyBodyState:
    amps = np.zeros(space.dim, dtype=complex)
    amps[0] = 1.0
    return ManyBodyState(space, amps)


def basis_state(space: FockSpace, config: int) -> ManyBodyState:
    amps = np.zeros(space.dim, dtype=complex)
    amps[config] = 1.0
    return ManyBodyState(space, amps)


def _jw_sign(idx: np.ndarray, p: int) -> np.ndarray:
    below = popcount(idx & ((1 << p) - 1))
    return 1.0 - 2.0 * (below & 1)


def apply_create(state: ManyBodyState, p: int) -> ManyBodyState:
    """f_p^dag acting on ``state`` (unnormalized image; zero if p occupied)."""
    space = state.space
    if not 0 <= p < space.n_modes:
        raise ValueError(f"mode index {p} out of range (n_modes={space.n_modes})")
    idx = space.configs()
    empty = ((idx >> p) & 1) == 0
    out = np.zeros(space.dim, dtype=complex)
    src = idx[empty]
    out[src | (1 << p)] = _jw_sign(src, p) * state.amps[src]
    return ManyBodyState(space, out)


def apply_annihilate(state: ManyBodyState, p: int) -> ManyBodyState:
    """f_p acting on ``state`` (unnormalized image; zero if p empty)."""
    space = state.space
    if not 0 <= p < space.n_modes:
        raise ValueError(f"mode index {p} out of range (n_modes={space.n_modes})")
    idx = space.configs()
    occ = ((idx >> p) & 1) == 1
    out = np.zeros(space.dim, dtype=complex)
    src = idx[occ]
    out[src & ~(1 << p)] = _jw_sign(src, p) * state.amps[src]
    return ManyBodyState(space, out)


def apply_operator_string(ops, state: ManyBodyState) -> ManyBodyState:
    """Apply a product of creation/annihilation operators.

    ``ops`` lists the operators left to right in operator order, e.g.
    ``[("create", 2), ("create", 0)]`` means f_2^dag f_0^dag, so the last
    entry acts on the state first.  Returns the unnormalized image.
    """
    out = state
    for kind, p in reversed(list(ops)):
        if kind in ("create", "+"):
            out = apply_create(out, p)
        elif kind in ("annihilate", "-"):
            out = apply_annihilate(out, p)
        else:
            raise ValueError(f"unknown operator kind {kind!r}")
    return out


# ---------------------------------------------------------------------------
# density matrices


class DensityMatrix:
    """Hermitian, PSD, unit-trace operator over a declared factor structure.

    ``dims`` lists the local dimensions in kron order (first factor most
    significant).  Eigenvalues slightly below zero but above the PSD floor
    are clipped to zero and the state renormalized (logged at debug level);
    anything below the floor is rejected.
    """

    def __init__(self, mat, dims, *, validate: bool = True):
        mat = np.asarray(mat, dtype=complex)
        dims = tuple(int(d) for d in dims)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        if int(np.prod(dims)) != mat.shape[0]:
            raise ValueError(f"dims {dims} inconsistent with matrix size {mat.shape[0]}")
        if validate:
            herm = np.max(np.abs(mat - mat.conj().T))
            if herm > HERMITICITY_TOL:
                raise ValueError(f"matrix not Hermitian (deviation {herm:.2e})")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace must be 1, got {tr!r}")
            evals = np.linalg.eigvalsh(mat)
            if evals[0] < PSD_FLOOR:
                raise ValueError(f"negative eigenvalue {evals[0]:.2e} below PSD floor")
            if evals[0] < -5e-16:
                logger.debug("clipping eigenvalues >= %.2e to zero and renormalizing", evals[0])
                w, v = np.linalg.eigh(mat)
                w = np.clip(w, 0.0, None)
                mat = (v * w) @ v.conj().T
                mat /= np.trace(mat).real
        self.mat = mat
        self.dims = dims

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def partial_trace(self, keep) -> "DensityMatrix":
        """Trace out every factor not listed in ``keep`` (order preserved)."""
        keep = tuple(keep)
        n = len(self.dims)
        tensor = self.mat.reshape(self.dims + self.dims)
        traced = sorted(set(range(n)) - set(keep), reverse=True)
        for ax in traced:
            tensor = np.trace(tensor, axis1=ax, axis2=ax + tensor.ndim // 2)
        kept_dims = tuple(self.dims[i] for i in sorted(keep))
        d = int(np.prod(kept_dims))
        mat = tensor.reshape(d, d)
        if tuple(sorted(keep)) != keep:
            # factor currently at slot i (the i-th smallest index) belongs at
            # the slot where it appears in ``keep``
            perm = tuple(np.argsort(keep))
            mat = _permute_factors(mat, kept_dims, perm)
            kept_dims = tuple(self.dims[i] for i in keep)
        return DensityMatrix(mat, kept_dims)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, dims={self.dims})"


def _permute_factors(mat: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder tensor factors of a square matrix; perm[i] = new position of factor i."""
    n = len(dims)
    tensor = mat.reshape(tuple(dims) + tuple(dims))
    dest = list(perm) + [p + n for p in perm]
    tensor = np.moveaxis(tensor, list(range(2 * n)), dest)
    d = int(np.prod(dims))
    return tensor.reshape(d, d)


def pure_state_dm(vec, dims) -> DensityMatrix:
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(np.outer(vec, vec.conj()), dims)


# ---------------------------------------------------------------------------
# sector projection


def sector_project(obj, n: int, sz2=None, *, tol: float = 1e-14):
    """Project onto total particle number ``n`` (and 2*Sz = ``sz2`` if given).

    Returns ``(projected, weight)``.  The projected object is renormalized;
    a zero ``weight`` flags an empty sector and the returned object is the
    zero state (states) or None (density matrices).
    """
    if isinstance(obj, ManyBodyState):
        space = obj.space
        if n > space.n_modes:
            raise ValueError(f"particle number {n} exceeds mode count {space.n_modes}")
        mask = space.config_n() == n
        if sz2 is not None:
            mask &= space.config_sz2() == sz2
        amps = np.where(mask, obj.amps, 0.0)
        weight = float(np.sum(np.abs(amps) ** 2))
        if weight <= tol:
            return ManyBodyState(space, np.zeros_like(amps)), 0.0
        return ManyBodyState(space, amps / np.sqrt(weight)), weight
    if isinstance(obj, DensityMatrix):
        labels_n, labels_sz2 = _factor_labels(obj.dims)
        mask = labels_n == n
        if sz2 is not None:
            mask &= labels_sz2 == sz2
        mat = obj.mat * np.outer(mask, mask)
        weight = float(np.trace(mat).real)
        if weight <= tol:
            return None, 0.0
        return DensityMatrix(mat / weight, obj.dims), weight
    raise TypeError(f"cannot sector-project a {type(obj).__name__}")


_LOCAL_N = {2: np.array([0, 1]), 4: np.array([0, 1, 1, 2])}
_LOCAL_SZ2 = {2: np.array([0, 0]), 4: np.array([0, 1, -1, 0])}


def _factor_labels(dims):
    """Total (N, 2*Sz) labels of the flat kron index for 2/4-dim Fock factors."""
    n = np.zeros(1, dtype=np.int64)
    sz2 = np.zeros(1, dtype=np.int64)
    for d in dims:
        if d not in _LOCAL_N:
            raise ValueError(f"no occupation labels for local dimension {d}")
        n = (n[:, None] + _LOCAL_N[d][None, :]).ravel()
        sz2 = (sz2[:, None] + _LOCAL_SZ2[d][None, :]).ravel()
    return n, sz2


# ---------------------------------------------------------------------------
# two-orbital reduced density matrix


def two_orbital_rdm(state: ManyBodyState, l: int, lp: int) -> DensityMatrix:
    """Reduced state of orbitals (l, lp) as a 16 x 16 density matrix.

    The two-orbital basis is |alpha>_l (x) |beta>_lp with alpha, beta in
    {0, up, down, updown}.  Entries are the expectation values of the
    subsystem transition operators after moving the four subsystem modes
    to the front of the ordered creation string (fermionic reordering
    signs included).  Coherences between even and odd total subsystem
    parity are not fixed by parity-even observables and are set to zero.
    """
    space = state.space
    if l == lp:
        raise ValueError("orbital indices must differ")
    for x in (l, lp):
        if not 0 <= x < space.n_spatial:
            raise ValueError(f"orbital {x} out of range for d={space.n_spatial}")
    if abs(state.norm - 1.0) > 1e-10:
        raise ValueError("state must be normalized")

    sub_modes = [space.mode(l, UP), space.mode(l, DOWN),
                 space.mode(lp, UP), space.mode(lp, DOWN)]
    env_modes = [p for p in range(space.n_modes) if p not in sub_modes]

    idx = space.configs()
    bits = [(idx >> p) & 1 for p in sub_modes]

    # local index alpha = n_up + 2*n_down per orbital, flat = 4*alpha_l + alpha_lp
    sub_idx = 4 * (bits[0] + 2 * bits[1]) + (bits[2] + 2 * bits[3])

    env_idx = np.zeros(space.dim, dtype=np.int64)
    for pos, p in enumerate(env_modes):
        env_idx |= ((idx >> p) & 1) << pos

    # permutation sign: pull each occupied subsystem mode to the front in turn
    exponent = np.zeros(space.dim, dtype=np.int64)
    pulled = 0
    for p in sub_modes:
        below = idx & ((1 << p) - 1) & ~pulled
        exponent += bits[sub_modes.index(p)] * popcount(below)
        pulled |= 1 << p
    sign = 1.0 - 2.0 * (exponent & 1)

    psi = np.zeros((16, 1 << len(env_modes)), dtype=complex)
    psi[sub_idx, env_idx] = sign * state.amps
    rho = psi @ psi.conj().T

    parity = _factor_labels((4, 4))[0] % 2
    rho *= np.equal.outer(parity, parity)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, (4, 4))
