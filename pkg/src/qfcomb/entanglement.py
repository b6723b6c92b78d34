"""Density matrices and entanglement / quality measures for two-party states."""

from dataclasses import dataclass
import math

import numpy as np

from .comb import qudit_amplitudes
from .numerics import (
    EIG_CLIP,
    clip_eigenvalues,
    hermitian_eigensystem,
    psd_sqrt,
    trace_norm,
)

DM_TOL = 1e-10


class EntanglementError(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over signal (x) idler, signal index major.

    Both arms use the qudit labeling of :func:`qfcomb.comb.qudit_amplitudes`.
    """

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        ds, di = (int(x) for x in self.dims)
        object.__setattr__(self, "dims", (ds, di))
        if m.shape != (ds * di, ds * di):
            raise EntanglementError(f"matrix shape {m.shape} does not match dims {self.dims}")
        if np.max(np.abs(m - m.conj().T)) > DM_TOL:
            raise EntanglementError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > DM_TOL:
            raise EntanglementError(f"density matrix trace is {tr!r}, expected 1")
        w = hermitian_eigensystem(m, tol=DM_TOL)[0]
        if w[0] < -DM_TOL:
            raise EntanglementError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.dims[0] * self.dims[1]

    @classmethod
    def _from_psd(cls, matrix, dims):
        """Skip the eigenvalue check for matrices that are PSD by construction
        (outer products, convex mixtures of density matrices)."""
        m = np.array(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        obj = object.__new__(cls)
        object.__setattr__(obj, "matrix", m)
        object.__setattr__(obj, "dims", (int(dims[0]), int(dims[1])))
        return obj


@dataclass(frozen=True)
class EntropyReport:
    eigenvalues: np.ndarray  # descending
    absolute: float  # bits
    normalized: float
    log_base: int
    rank: int


def density_from_pure(state):
    """``|psi><psi|`` in qudit labeling."""
    a = qudit_amplitudes(state)
    vec = a.reshape(-1)
    return DensityMatrix._from_psd(np.outer(vec, vec.conj()), a.shape)


def density_from_vector(vec, dims):
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    if vec.shape != (dims[0] * dims[1],):
        raise EntanglementError(f"vector of length {vec.size} does not match dims {dims}")
    return DensityMatrix._from_psd(np.outer(vec, vec.conj()), dims)


def maximally_mixed(dims):
    n = dims[0] * dims[1]
    return DensityMatrix(np.eye(n) / n, dims)


def depolarize(rho, p):
    """``p rho + (1 - p) I / d^2``."""
    if not 0.0 <= p <= 1.0:
        raise EntanglementError(f"mixing weight p must be in [0, 1], got {p}")
    n = rho.dim
    return DensityMatrix._from_psd(p * rho.matrix + (1.0 - p) * np.eye(n) / n, rho.dims)


def partial_trace(rho, keep="signal"):
    ds, di = rho.dims
    t = rho.matrix.reshape(ds, di, ds, di)
    if keep == "signal":
        red = np.einsum("ajbj->ab", t)
    elif keep == "idler":
        red = np.einsum("jajb->ab", t)
    else:
        raise EntanglementError(f"keep must be 'signal' or 'idler', got {keep!r}")
    return 0.5 * (red + red.conj().T)


def entropy_report(reduced, base_dim=None, rank_mode="dimension"):
    """Von Neumann entropy in bits plus its normalized version.

    The normalizing log base is ``base_dim`` (default: the matrix size). With
    ``rank_mode="numerical"`` the base becomes the count of eigenvalues above
    ``1e-10 * max``, floored at 2.
    """
    reduced = np.asarray(reduced, dtype=complex)
    w = hermitian_eigensystem(reduced, tol=DM_TOL)[0][::-1]
    rank = int(np.sum(w > 1e-10 * max(w[0], EIG_CLIP)))
    if rank_mode == "numerical":
        base = max(rank, 2)
    elif rank_mode == "dimension":
        base = reduced.shape[0] if base_dim is None else int(base_dim)
    else:
        raise EntanglementError(f"unknown rank_mode {rank_mode!r}")
    if base < 2:
        raise EntanglementError(f"log base must be >= 2, got {base}")
    lam = clip_eigenvalues(w)
    nz = lam[lam > 0]
    s_a = float(-np.sum(nz * np.log2(nz)))
    s_a = max(s_a, 0.0)
    return EntropyReport(w, s_a, s_a / math.log2(base), base, rank)


def entropies(rho, **kwargs):
    """Entropy reports for the signal and idler reductions (never averaged)."""
    return (
        entropy_report(partial_trace(rho, "signal"), **kwargs),
        entropy_report(partial_trace(rho, "idler"), **kwargs),
    )


def _matrix(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def fidelity(rho1, rho2):
    """Uhlmann fidelity ``(tr sqrt(sqrt(r1) r2 sqrt(r1)))^2``."""
    m1, m2 = _matrix(rho1), _matrix(rho2)
    if m1.shape != m2.shape:
        raise EntanglementError(f"dimension mismatch {m1.shape} vs {m2.shape}")
    s1 = psd_sqrt(m1)
    inner = s1 @ m2 @ s1
    inner = 0.5 * (inner + inner.conj().T)
    w = clip_eigenvalues(hermitian_eigensystem(inner, tol=1e-9)[0])
    f = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(f, 0.0), 1.0)


def purity(rho):
    m = _matrix(rho)
    return float(np.real(np.trace(m @ m)))


_SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def concurrence_and_eof(rho):
    """Two-qubit concurrence and entanglement of formation (bits)."""
    if tuple(rho.dims) != (2, 2):
        raise EntanglementError(f"concurrence is only defined here for 2x2 systems, got {rho.dims}")
    m = rho.matrix
    yy = np.kron(_SIGMA_Y, _SIGMA_Y)
    flipped = yy @ m.conj() @ yy
    s = psd_sqrt(m)
    r2 = s @ flipped @ s
    r2 = 0.5 * (r2 + r2.conj().T)
    lam = np.sqrt(clip_eigenvalues(hermitian_eigensystem(r2, tol=1e-9)[0]))[::-1]
    c = max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
    c = min(c, 1.0)
    x = 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c)))
    return c, _binary_entropy(x)


def _binary_entropy(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def partial_transpose(rho, arm="signal"):
    ds, di = rho.dims
    t = rho.matrix.reshape(ds, di, ds, di)
    if arm == "signal":
        t = t.transpose(2, 1, 0, 3)
    elif arm == "idler":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise EntanglementError(f"arm must be 'signal' or 'idler', got {arm!r}")
    return t.reshape(ds * di, ds * di)


def log_negativity(rho, arm="signal"):
    return max(0.0, math.log2(trace_norm(partial_transpose(rho, arm))))
