"""Simulated two-qudit frequency-bin tomography.

Projector quorums for qubits and qutrits, expected / Poisson coincidence
counts, linear inversion through the B-matrix and a maximum-likelihood fit
that always returns a physical density matrix.
"""

from dataclasses import dataclass
import csv
import io
import itertools
import math

import numpy as np
from scipy.optimize import minimize

from .entanglement import DensityMatrix
from .numerics import hermitian_eigensystem

COUNT_FLOOR = 1.0
MAX_ITER = 100_000
CSV_HEADER = ("label", "count", "correction")


class TomographyError(ValueError):
    pass


class QuorumError(TomographyError):
    """The projector set does not determine the density matrix."""


class IncompleteDataError(TomographyError):
    pass


class ConvergenceError(TomographyError):
    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ProjectorSet:
    d: int
    labels: tuple
    signal: np.ndarray  # (n, d) single-arm states
    idler: np.ndarray
    corrections: np.ndarray

    def __len__(self):
        return len(self.labels)

    @property
    def joint(self):
        """Two-party projector states, one row per projector."""
        return np.einsum("ka,kb->kab", self.signal, self.idler).reshape(len(self), -1)


@dataclass(frozen=True)
class CountRecord:
    label: str
    count: float
    correction: int = 1
    scale: float = None
    noise: str = "exact"
    seed: int = None

    def __post_init__(self):
        if not (math.isfinite(self.count) and self.count >= 0):
            raise TomographyError(f"count for {self.label!r} must be finite and >= 0")


_S2 = 1.0 / math.sqrt(2.0)
_QUBIT_STATES = {
    "1": (np.array([1.0, 0.0]), True),
    "2": (np.array([0.0, 1.0]), True),
    "D": (np.array([_S2, _S2]), False),
    "R": (np.array([_S2, 1j * _S2]), False),
}


def _qutrit_states():
    w = np.exp(2j * math.pi / 3)
    out = {}
    for j, k in ((1, 2), (1, 3), (2, 3)):
        for tag, (pj, pk) in (("0", (1.0, 1.0)), ("+", (w, w.conjugate())), ("-", (w.conjugate(), w))):
            v = np.zeros(3, dtype=complex)
            v[j - 1] = _S2 * pj
            v[k - 1] = _S2 * pk
            out[f"{j}{k}{tag}"] = v
    return out


def projector_set(d):
    """Quorum of product projectors for ``d`` in (2, 3).

    Qubits use {|1>, |2>, (|1>+|2>)/sqrt2, (|1>+i|2>)/sqrt2} per arm; counts
    through a single-mode projector lose half the light per such arm, hence
    correction factors 2 and 4. Qutrits use nine two-mode superpositions per
    arm and need no correction.
    """
    if d == 2:
        single = {k: v for k, v in _QUBIT_STATES.items()}
        labels, sig, idl, corr = [], [], [], []
        for a, b in itertools.product(single, repeat=2):
            (va, ma), (vb, mb) = single[a], single[b]
            labels.append(f"{a}{b}")
            sig.append(va)
            idl.append(vb)
            corr.append(2 ** (int(ma) + int(mb)))
    elif d == 3:
        single = _qutrit_states()
        labels, sig, idl, corr = [], [], [], []
        for a, b in itertools.product(single, repeat=2):
            labels.append(f"{a}|{b}")
            sig.append(single[a])
            idl.append(single[b])
            corr.append(1)
    else:
        raise TomographyError(f"quorums exist only for d in (2, 3), got {d}")
    return ProjectorSet(d, tuple(labels), np.array(sig, dtype=complex), np.array(idl, dtype=complex), np.array(corr))


def single_arm_basis(d):
    """Identity followed by the generalized Gell-Mann matrices."""
    mats = [np.eye(d, dtype=complex)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            mats.extend([sym, anti])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(math.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    return np.array(mats)


def gamma_basis(d):
    """``d^4`` trace-orthogonal Hermitian matrices on the two-party space."""
    if d not in (2, 3):
        raise TomographyError(f"basis supported for d in (2, 3), got {d}")
    single = single_arm_basis(d)
    return np.array([np.kron(a, b) for a, b in itertools.product(single, repeat=2)])


def b_matrix(projs, basis):
    """``B[x, y] = <psi_x| Gamma_y |psi_x>``; raises if the quorum is incomplete."""
    psi = projs.joint
    if basis.shape[0] != psi.shape[0] or basis.shape[1] != psi.shape[1]:
        raise TomographyError("projector set and basis dimensions differ")
    b = np.einsum("xi,yij,xj->xy", psi.conj(), basis, psi).real
    sv = np.linalg.svd(b, compute_uv=False)
    if sv[-1] <= 1e-8 * sv[0]:
        raise QuorumError(f"B-matrix is singular (sigma_min/sigma_max = {sv[-1] / sv[0]:.3e})")
    return b


def expected_probabilities(rho, projs):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    psi = projs.joint
    return np.einsum("ki,ij,kj->k", psi.conj(), m, psi).real


def simulate_counts(rho, projs, scale, noise="exact", seed=None):
    """Coincidence counts ``C <psi|rho|psi> / correction`` per projector."""
    if not scale > 0:
        raise TomographyError(f"count scale must be > 0, got {scale}")
    mean = scale * np.clip(expected_probabilities(rho, projs), 0.0, None) / projs.corrections
    if noise == "exact":
        counts = mean
    elif noise == "poisson":
        if seed is None:
            raise TomographyError("Poisson counts require an explicit seed")
        counts = np.random.default_rng(seed).poisson(mean).astype(float)
    else:
        raise TomographyError(f"unknown noise model {noise!r}")
    return [
        CountRecord(lab, float(n), int(f), float(scale), noise, seed)
        for lab, n, f in zip(projs.labels, counts, projs.corrections)
    ]


def _ordered_counts(counts, projs):
    by_label = {c.label: c for c in counts}
    missing = [lab for lab in projs.labels if lab not in by_label]
    if missing:
        raise IncompleteDataError(f"missing counts for projectors {missing[:5]}{'...' if len(missing) > 5 else ''}")
    return np.array([by_label[lab].count for lab in projs.labels], dtype=float)


def linear_reconstruct(counts, projs, basis=None):
    """Linear-inversion estimate ``rho = C^-1 sum_v M_v n_v`` (Hermitian, maybe not PSD).

    Counts are multiplied back by their correction factors first. The overall
    constant is ``C = sum_v tr(M_v) n_v`` so the output has unit trace.
    """
    if basis is None:
        basis = gamma_basis(projs.d)
    n = _ordered_counts(counts, projs) * projs.corrections
    b_inv = np.linalg.inv(b_matrix(projs, basis))
    m_ops = np.einsum("xij,xv->vij", basis, b_inv)
    traces = np.einsum("vii->v", m_ops).real
    total = float(traces @ n)
    if not total > 0:
        raise TomographyError("counts carry no signal (normalization constant <= 0)")
    rho = np.einsum("vij,v->ij", m_ops, n) / total
    return 0.5 * (rho + rho.conj().T)


def psd_projection(h):
    """Closest unit-trace PSD matrix (eigenvalue clipping and renormalization)."""
    w, v = hermitian_eigensystem(0.5 * (h + h.conj().T), tol=1e-9)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(len(w)) / len(w)
    rho = (v * (w / w.sum())) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


# --- maximum likelihood -------------------------------------------------

def _tril_indices(n):
    return np.tril_indices(n, -1)


def params_to_t(x, n):
    t = np.zeros((n, n), dtype=complex)
    t[np.diag_indices(n)] = x[:n]
    lo = _tril_indices(n)
    m = len(lo[0])
    t[lo] = x[n : n + m] + 1j * x[n + m :]
    return t


def t_to_params(t):
    n = t.shape[0]
    lo = _tril_indices(n)
    return np.concatenate([np.diag(t).real, t[lo].real, t[lo].imag])


def t_from_density(rho, eps=1e-6):
    """Lower-triangular ``T`` with ``T^H T`` proportional to ``rho + eps I``."""
    n = rho.shape[0]
    j = np.eye(n)[::-1]
    l = np.linalg.cholesky(j @ (rho + eps * np.eye(n)) @ j)
    return j @ l.conj().T @ j


def density_from_t(t):
    r = t.conj().T @ t
    return r / np.trace(r).real


class _Objective:
    """Gaussian-approximated Poisson misfit with the scale refit per call."""

    def __init__(self, counts, projs):
        self.n = counts
        self.total = counts.sum()
        self.psi = projs.joint
        self.f = projs.corrections.astype(float)
        self.dim = self.psi.shape[1]

    def evaluate(self, x):
        t = params_to_t(x, self.dim)
        r = t.conj().T @ t
        tr = np.trace(r).real
        rho = r / tr
        p = np.einsum("ki,ij,kj->k", self.psi.conj(), rho, self.psi).real
        s = float(np.sum(p / self.f))
        c = self.total / s
        mu = c * p / self.f
        floor = mu < COUNT_FLOOR
        den = np.where(floor, COUNT_FLOOR, mu)
        resid = mu - self.n
        val = float(np.sum(resid**2 / (2.0 * den)))
        g = np.where(floor, resid / COUNT_FLOOR, (mu**2 - self.n**2) / (2.0 * mu**2 + 1e-300))
        # d/dp_k including the refit of c
        dp = (c / self.f) * (g - float(g @ mu) / self.total)
        big_g = (self.psi.T * dp) @ self.psi.conj()
        gp = (big_g - float(np.real(np.sum(big_g * rho.T))) * np.eye(self.dim)) / tr
        w = gp @ t.conj().T
        n = self.dim
        lo = _tril_indices(n)
        grad = np.concatenate([2.0 * np.diag(w).real, 2.0 * w.T[lo].real, -2.0 * w.T[lo].imag])
        scale = self.total
        return val / scale, grad / scale

    def __call__(self, x):
        return self.evaluate(x)


def mle_reconstruct(counts, projs, init=None, tol=1e-10, max_iter=MAX_ITER):
    """Maximum-likelihood density matrix, parameterized as ``T^H T / tr``.

    Starts from the PSD-projected linear estimate unless ``init`` is given.
    Raises :class:`ConvergenceError` (carrying the best iterate) when the
    iteration cap is hit before the relative objective decrease drops below
    ``tol``.
    """
    n = _ordered_counts(counts, projs)
    if init is None:
        init = psd_projection(linear_reconstruct(counts, projs))
    init = init.matrix if isinstance(init, DensityMatrix) else np.asarray(init, dtype=complex)
    obj = _Objective(n, projs)
    x0 = t_to_params(t_from_density(init))

    best = {"f": math.inf, "x": x0}

    def fun(x):
        val, grad = obj(x)
        if val < best["f"]:
            best["f"], best["x"] = val, x.copy()
        return val, grad

    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "maxfun": 10 * max_iter, "ftol": tol * 1e-3, "gtol": 1e-14, "maxcor": 30},
    )
    x = best["x"]
    rho = density_from_t(params_to_t(x, obj.dim))
    d = projs.d
    out = DensityMatrix(rho, (d, d))
    # status 2: line search could not improve further, i.e. converged to working precision
    if not (res.success or res.status == 2):
        raise ConvergenceError(f"MLE did not converge: {res.message}", out)
    return out


# --- count-record files ---------------------------------------------------

def write_counts_csv(records):
    """Serialize to the ``label,count,correction`` CSV format (LF endings)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow((r.label, repr(float(r.count)), int(r.correction)))
    return buf.getvalue()


def read_counts_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
        raise TomographyError(f"count file must start with header {','.join(CSV_HEADER)}")
    out = []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != 3:
            raise TomographyError(f"malformed count row {row!r}")
        out.append(CountRecord(row[0], float(row[1]), int(row[2])))
    return out
