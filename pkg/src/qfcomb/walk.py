"""Frequency-lattice quantum walk driven by an electro-optic phase modulator.

Both photons pass the same modulator, so a two-photon amplitude matrix
evolves as ``A' = U A U^T``. The modulation depth ``delta`` doubles as the
dimensionless walk time of the nearest-neighbour hopping Hamiltonian with
unit hopping rate (``|g1| = 1/2``), and the RF phase enters through the
coupling ``g1 = |g1| exp(i phi_rf)``. Under that identification the
single-photon propagator is

    U[m + n, m] = J_n(delta) * exp(i n (phi_rf - pi/2))

which is exactly ``exp(-i delta (g1 chi + g1^* chi^H))``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .comb import BiphotonAmplitude, apply_phase_mask
from .numerics import bessel_j

UNITARITY_TOL = 1e-10
LEAKAGE_TOL = 1e-9
MIN_GUARD = 8
#: |g1| implied by treating delta as time with unit hopping rate.
CALIBRATED_G1 = 0.5


class WalkConfigError(ValueError):
    """Lattice / guard configuration cannot support the requested walk."""


def default_guard(delta):
    return max(MIN_GUARD, math.ceil(delta) + MIN_GUARD)


@dataclass(frozen=True)
class EOMConfig:
    delta: float
    phi_rf: float = math.pi / 2
    lattice: tuple = (-8, 8)
    guard: int = None

    def __post_init__(self):
        if not self.delta >= 0:
            raise WalkConfigError(f"modulation depth must be >= 0, got {self.delta}")
        lo, hi = (int(x) for x in self.lattice)
        if lo > hi:
            raise WalkConfigError(f"empty lattice {self.lattice}")
        object.__setattr__(self, "lattice", (lo, hi))
        need = default_guard(self.delta)
        if self.guard is None:
            object.__setattr__(self, "guard", need)
        elif self.guard < need:
            raise WalkConfigError(f"guard {self.guard} too small for delta={self.delta} (need >= {need})")

    @property
    def modes(self):
        """Full lattice including guard bands."""
        lo, hi = self.lattice
        return tuple(range(lo - self.guard, hi + self.guard + 1))

    @property
    def interior(self):
        """Slice of :attr:`modes` holding the non-guard block."""
        return slice(self.guard, self.guard + self.lattice[1] - self.lattice[0] + 1)


@dataclass(frozen=True)
class EnergyScale:
    omega_ceo: float = 0.0
    omega_fsr: float = 1.0
    g1_abs: float = CALIBRATED_G1
    phi_rf: float = math.pi / 2

    def __post_init__(self):
        if not self.omega_fsr > 0:
            raise ValueError(f"omega_fsr must be > 0, got {self.omega_fsr}")
        if self.g1_abs < 0:
            raise ValueError(f"|g1| must be >= 0, got {self.g1_abs}")

    @property
    def g1(self):
        return self.g1_abs * complex(math.cos(self.phi_rf), math.sin(self.phi_rf))

    def with_phase(self, phi_rf):
        return EnergyScale(self.omega_ceo, self.omega_fsr, self.g1_abs, phi_rf)


@dataclass(frozen=True)
class SweepResult:
    deltas: np.ndarray
    mean_energy: np.ndarray  # relative to the delta = 0 mean, units of Omega_FSR
    energy_levels: np.ndarray  # total mode index s + i for each distribution column
    distributions: np.ndarray  # shape (len(deltas), len(energy_levels))
    slope: float
    intercept: float
    residual: float  # rms of the linear-fit residuals


def eom_unitary(cfg):
    """Truncated single-photon EOM propagator over ``cfg.modes``."""
    n_modes = len(cfg.modes)
    orders = np.arange(-(n_modes - 1), n_modes)
    shift = cfg.phi_rf - math.pi / 2
    coeff = {int(n): bessel_j(n, cfg.delta) * complex(math.cos(n * shift), math.sin(n * shift)) for n in orders}
    idx = np.arange(n_modes)
    diff = idx[:, None] - idx[None, :]
    u = np.vectorize(coeff.__getitem__, otypes=[complex])(diff)
    err = interior_unitarity_error(u, cfg)
    if err > UNITARITY_TOL:
        raise WalkConfigError(f"interior unitarity error {err:.3e} exceeds {UNITARITY_TOL} (increase guard)")
    return u


def interior_unitarity_error(u, cfg):
    cols = u[:, cfg.interior]
    gram = cols.conj().T @ cols
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def embed(state, modes):
    """Place ``state`` on a common lattice for both arms."""
    pos = {m: k for k, m in enumerate(modes)}
    try:
        rows = [pos[m] for m in state.signal_modes]
        cols = [pos[m] for m in state.idler_modes]
    except KeyError as exc:
        raise WalkConfigError(f"state mode {exc.args[0]} lies outside the lattice") from None
    a = np.zeros((len(modes), len(modes)), dtype=complex)
    a[np.ix_(rows, cols)] = state.amplitudes
    return a


def lattice_for(state, delta, guard=None, phi_rf=math.pi / 2):
    modes = state.signal_modes + state.idler_modes
    return EOMConfig(delta, phi_rf, (min(modes), max(modes)), guard)


def evolve(state, cfg):
    lo, hi = cfg.lattice
    occupied = state.nonzero_cells()
    for s, i in occupied:
        if not (lo <= s <= hi and lo <= i <= hi):
            raise WalkConfigError(f"occupied cell ({s}, {i}) outside lattice interior {cfg.lattice}")
    u = eom_unitary(cfg)
    a = embed(state, cfg.modes)
    out = u @ a @ u.T
    prob = np.abs(out) ** 2
    edge = np.r_[0:2, len(cfg.modes) - 2 : len(cfg.modes)]
    leak = max(prob[edge, :].sum(), prob[:, edge].sum())
    if leak > LEAKAGE_TOL:
        raise WalkConfigError(f"probability {leak:.3e} reached the outer guard modes")
    total = prob.sum()
    if abs(total - 1.0) > LEAKAGE_TOL:
        raise WalkConfigError(f"norm drifted to {total!r} during evolution")
    return BiphotonAmplitude(out, cfg.modes, cfg.modes)


def mean_total_energy(state):
    """``sum (s + i) |A[s, i]|^2`` in units of the mode spacing."""
    s = np.array(state.signal_modes, dtype=float)
    i = np.array(state.idler_modes, dtype=float)
    prob = np.abs(state.amplitudes) ** 2
    return float(np.sum((s[:, None] + i[None, :]) * prob))


def energy_distribution(state):
    """Marginal distribution of the total mode index ``s + i``.

    Returns ``(levels, probabilities)`` with consecutive integer levels.
    """
    s = np.array(state.signal_modes)
    i = np.array(state.idler_modes)
    total = (s[:, None] + i[None, :]).ravel()
    prob = (np.abs(state.amplitudes) ** 2).ravel()
    lo, hi = int(total.min()), int(total.max())
    dist = np.bincount(total - lo, weights=prob, minlength=hi - lo + 1)
    return np.arange(lo, hi + 1), dist


def chi_expectation(state):
    """``<psi| sum_a b^H_{a+1} b_a |psi>`` summed over both photons."""
    a = state.amplitudes
    total = 0j
    srow = {m: k for k, m in enumerate(state.signal_modes)}
    for r, s in enumerate(state.signal_modes):
        r2 = srow.get(s + 1)
        if r2 is not None:
            total += np.vdot(a[r2, :], a[r, :])
    icol = {m: k for k, m in enumerate(state.idler_modes)}
    for c, i in enumerate(state.idler_modes):
        c2 = icol.get(i + 1)
        if c2 is not None:
            total += np.vdot(a[:, c2], a[:, c])
    return complex(total)


def energy_transfer_rate(state, scale):
    """``tr(dH_QFC/dt rho) = 2 Omega_FSR Im(g1 <chi>)`` (hbar = 1)."""
    return 2.0 * scale.omega_fsr * (scale.g1 * chi_expectation(state)).imag


def desync_average(state, scale, grid=360):
    """Energy-transfer rate averaged over ``grid`` equally spaced RF phases."""
    if grid < 4:
        raise ValueError(f"phase grid needs at least 4 points, got {grid}")
    chi = chi_expectation(state)
    rates = []
    for k in range(grid):
        g1 = scale.with_phase(2.0 * math.pi * k / grid).g1
        rates.append(2.0 * scale.omega_fsr * (g1 * chi).imag)
    return math.fsum(rates) / grid


def sweep_and_slope(state, mask, deltas, phi_rf=math.pi / 2, guard=None, mask_idler=None):
    """Apply ``mask``, walk for every depth in ``deltas`` and fit the energy slope.

    ``deltas`` must be ascending and start at 0. A single lattice (sized for
    the largest depth) is shared by every point so the distributions line up.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.ndim != 1 or len(deltas) < 2:
        raise ValueError("need at least two modulation depths")
    if deltas[0] != 0.0 or np.any(np.diff(deltas) <= 0):
        raise ValueError("deltas must be strictly ascending and start at 0")
    masked = apply_phase_mask(state, mask, mask_idler)
    top = lattice_for(masked, deltas[-1], guard, phi_rf)
    base = mean_total_energy(masked)
    levels = None
    dists, means = [], []
    for delta in deltas:
        cfg = EOMConfig(float(delta), phi_rf, top.lattice, top.guard)
        out = evolve(masked, cfg)
        lv, dist = energy_distribution(out)
        if levels is None:
            levels = lv
        dists.append(dist)
        means.append(mean_total_energy(out) - base)
    means = np.array(means)
    design = np.vstack([deltas, np.ones_like(deltas)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, means, rcond=None)
    resid = means - (slope * deltas + intercept)
    return SweepResult(
        deltas=deltas,
        mean_energy=means,
        energy_levels=levels,
        distributions=np.array(dists),
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def pes_example(phi=0.0):
    """Four-ket partially entangled state with relative phase ``phi`` on the
    cross terms |1,-2> and |2,-1>."""
    ph = complex(math.cos(phi), math.sin(phi))
    a = 0.5 * np.array([[ph, 1.0], [1.0, ph]])  # rows s=1,2; cols i=-2,-1
    return BiphotonAmplitude(a, (1, 2), (-2, -1))
