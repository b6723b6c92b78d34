"""Biphoton frequency-comb states on a discrete signal/idler mode lattice.

Signal photons live on positive lattice indices ``k`` and idler photons on
``-k``; the ``q``-th anti-diagonal of the joint spectrum collects the cells
with ``s + i = q``. All public interfaces use physical lattice indices.
"""

from dataclasses import dataclass, field
import math

import numpy as np

NORM_TOL = 1e-9


class CombError(ValueError):
    """Invalid comb construction request."""


class PostSelectionError(CombError):
    """Post-selected subspace carries no amplitude."""


@dataclass(frozen=True)
class ModeConvention:
    total_modes: int = 17
    include_degenerate: bool = False

    def __post_init__(self):
        n = self.total_modes
        if n < 3 or n % 2 == 0:
            raise CombError(f"total_modes must be odd and >= 3, got {n}")

    @property
    def dimension(self):
        """Number of signal (or idler) modes with the degenerate bin removed."""
        return (self.total_modes - 1) // 2

    @property
    def signal_modes(self):
        start = 0 if self.include_degenerate else 1
        return tuple(range(start, self.dimension + 1))

    @property
    def idler_modes(self):
        stop = 1 if self.include_degenerate else 0
        return tuple(range(-self.dimension, stop))

    @property
    def max_order(self):
        """Largest |q| whose anti-diagonal still fits in the lattice."""
        return self.dimension if self.include_degenerate else self.dimension - 1


@dataclass(frozen=True)
class WeightSpec:
    """Per-diagonal complex weights, given explicitly or by a Gaussian.

    ``convention="sigma"``:       a_q = a0 * exp(-((|q| - mu) / sigma)^2)
    ``convention="sigma_prime"``: a_q = a0 * exp(-q^2 / (2 sigma^2)), i.e. the
    first form with ``sigma -> sqrt(2) * sigma`` and ``mu = 0``.
    """

    weights: dict = None
    a0: complex = 1.0
    mu: float = 0.0
    sigma: float = 1.0
    p: int = 0
    convention: str = "sigma"

    def __post_init__(self):
        if self.weights is not None:
            if not self.weights or all(w == 0 for w in self.weights.values()):
                raise CombError("at least one diagonal weight must be nonzero")
            object.__setattr__(self, "weights", {int(q): complex(w) for q, w in self.weights.items()})
            return
        if self.p < 0:
            raise CombError(f"p must be >= 0, got {self.p}")
        if self.convention not in ("sigma", "sigma_prime"):
            raise CombError(f"unknown Gaussian convention {self.convention!r}")

    @classmethod
    def explicit(cls, weights):
        return cls(weights=dict(weights))

    @classmethod
    def gaussian(cls, sigma, p, a0=1.0, mu=0.0, convention="sigma"):
        return cls(a0=a0, mu=mu, sigma=sigma, p=p, convention=convention)

    @classmethod
    def equal(cls, p):
        """``D = 2p + 1`` equiprobable diagonals."""
        return cls(weights={q: 1.0 for q in range(-p, p + 1)})

    @property
    def is_gaussian(self):
        return self.weights is None

    @property
    def diagonal_count(self):
        if self.is_gaussian:
            return 2 * self.p + 1
        return len(self.weights)


@dataclass(frozen=True)
class BiphotonAmplitude:
    """Pure two-photon state ``sum A[s, i] |s>_s |i>_i``.

    Rows follow ``signal_modes`` and columns ``idler_modes``; both are
    strictly increasing lattice indices.
    """

    amplitudes: np.ndarray
    signal_modes: tuple
    idler_modes: tuple
    convention: ModeConvention = None

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "signal_modes", tuple(int(m) for m in self.signal_modes))
        object.__setattr__(self, "idler_modes", tuple(int(m) for m in self.idler_modes))
        if a.shape != (len(self.signal_modes), len(self.idler_modes)):
            raise CombError(f"amplitude shape {a.shape} does not match mode maps")
        for modes in (self.signal_modes, self.idler_modes):
            if any(b <= a_ for a_, b in zip(modes, modes[1:])):
                raise CombError("mode maps must be strictly increasing")
        if not np.all(np.isfinite(a)):
            raise CombError("amplitudes must be finite")
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise CombError(f"state is not normalized (sum |A|^2 = {norm!r})")

    @property
    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, s, i):
        try:
            return self.amplitudes[self.signal_modes.index(s), self.idler_modes.index(i)]
        except ValueError:
            return 0j

    def nonzero_cells(self, tol=0.0):
        """``{(s, i): amplitude}`` for every occupied cell."""
        out = {}
        for r, s in enumerate(self.signal_modes):
            for c, i in enumerate(self.idler_modes):
                if abs(self.amplitudes[r, c]) > tol:
                    out[(s, i)] = self.amplitudes[r, c]
        return out

    def inner(self, other):
        """``<self|other>`` over the union of both mode maps."""
        total = 0j
        for (s, i), amp in other.nonzero_cells().items():
            total += np.conj(self.amplitude(s, i)) * amp
        return complex(total)


def from_cells(cells, signal_modes=None, idler_modes=None, normalize=True):
    """Build a state from ``{(s, i): amplitude}``."""
    if signal_modes is None:
        signal_modes = sorted({s for s, _ in cells})
    if idler_modes is None:
        idler_modes = sorted({i for _, i in cells})
    a = np.zeros((len(signal_modes), len(idler_modes)), dtype=complex)
    srow = {m: k for k, m in enumerate(signal_modes)}
    icol = {m: k for k, m in enumerate(idler_modes)}
    for (s, i), amp in cells.items():
        a[srow[s], icol[i]] += amp
    if normalize:
        norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
        if norm == 0.0:
            raise CombError("state has zero norm")
        a = a / norm
    return BiphotonAmplitude(a, tuple(signal_modes), tuple(idler_modes))


def diagonal_cells(convention, q):
    """Lattice cells ``(s, i)`` of the q-th anti-diagonal, signal ascending."""
    q = int(q)
    if abs(q) > convention.max_order:
        raise CombError(
            f"diagonal q={q} does not fit in N={convention.total_modes} "
            f"(|q| <= {convention.max_order})"
        )
    d = convention.dimension
    first = abs(q) if convention.include_degenerate else abs(q) + 1
    cells = []
    for k in range(first, d + 1):
        if q < 0:
            cells.append((k + q, -k))
        elif q == 0:
            cells.append((k, -k))
        else:
            cells.append((k, -(k - q)))
    return sorted(cells)


def diagonal_component(convention, q):
    """Normalized equal-amplitude state on the q-th anti-diagonal."""
    cells = diagonal_cells(convention, q)
    amp = 1.0 / math.sqrt(len(cells))
    a = np.zeros((len(convention.signal_modes), len(convention.idler_modes)), dtype=complex)
    for s, i in cells:
        a[convention.signal_modes.index(s), convention.idler_modes.index(i)] = amp
    return BiphotonAmplitude(a, convention.signal_modes, convention.idler_modes, convention)


def gaussian_weights(spec):
    if spec.weights is not None:
        return dict(spec.weights)
    if not spec.sigma > 0:
        raise CombError(f"sigma must be > 0, got {spec.sigma}")
    if spec.convention == "sigma_prime":
        sigma, mu = math.sqrt(2.0) * spec.sigma, 0.0
    else:
        sigma, mu = spec.sigma, spec.mu
    out = {}
    for q in range(-spec.p, spec.p + 1):
        out[q] = complex(spec.a0) * math.exp(-(((abs(q) - mu) / sigma) ** 2))
    return out


def synthesize(convention, weights):
    """Normalized weighted sum of normalized anti-diagonal components.

    Diagonals that do not fit in the lattice are dropped.
    """
    coeffs = gaussian_weights(weights)
    a = np.zeros((len(convention.signal_modes), len(convention.idler_modes)), dtype=complex)
    used = False
    for q, w in sorted(coeffs.items()):
        if abs(q) > convention.max_order or w == 0:
            continue
        a += w * diagonal_component(convention, q).amplitudes
        used = True
    if not used:
        raise CombError("no nonzero diagonal fits in the mode range")
    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if norm == 0.0:
        raise CombError("synthesized state has zero norm")
    return BiphotonAmplitude(a / norm, convention.signal_modes, convention.idler_modes, convention)


def maximally_entangled(d):
    """``(1/sqrt(d)) sum_k |k>_s |-k>_i`` for k = 1..d."""
    return synthesize(ModeConvention(2 * d + 1), WeightSpec.explicit({0: 1.0}))


def qudit_target_state(d, c1, c2=0.0, phase1=0.0, phase2=0.0):
    """Bell state plus weighted first/second upper anti-diagonals.

    Every cell on the first upper line carries ``c1 * exp(i phase1)`` and the
    second ``c2 * exp(i phase2)``, relative to the ``1/sqrt(d)`` Bell terms
    before overall normalization. Phases are in radians.
    """
    if d not in (2, 3):
        raise CombError(f"qudit target states are defined for d in (2, 3), got {d}")
    conv = ModeConvention(2 * d + 1)
    weights = {0: 1.0, 1: c1 * np.exp(1j * phase1) * math.sqrt(d - 1)}
    if d == 3:
        weights[2] = c2 * np.exp(1j * phase2)
    return synthesize(conv, WeightSpec.explicit(weights))


@dataclass(frozen=True)
class PhaseMask:
    """Per-mode phases in radians: an explicit ``{mode: phase}`` map or an
    odd/even parity pattern covering every lattice mode."""

    phases: dict = field(default=None)
    odd: float = None
    even: float = None

    def __post_init__(self):
        if self.phases is None and (self.odd is None or self.even is None):
            raise CombError("PhaseMask needs explicit phases or both odd and even")
        if self.phases is not None:
            ph = {int(m): float(v) for m, v in self.phases.items()}
            if not all(math.isfinite(v) for v in ph.values()):
                raise CombError("mask phases must be finite")
            object.__setattr__(self, "phases", ph)

    @classmethod
    def pattern(cls, odd=0.0, even=0.0):
        return cls(odd=float(odd), even=float(even))

    @classmethod
    def zeros(cls):
        return cls.pattern(0.0, 0.0)

    def covers(self, mode):
        return self.phases is None or mode in self.phases

    def phase(self, mode):
        if self.phases is not None:
            if mode not in self.phases:
                raise CombError(f"mask does not cover mode {mode}")
            return self.phases[mode]
        return self.odd if mode % 2 else self.even


def apply_phase_mask(state, mask_signal, mask_idler=None):
    """``A'[s, i] = exp(i (phi_s + phi_i)) A[s, i]``."""
    if mask_idler is None:
        mask_idler = mask_signal
    a = state.amplitudes
    occupied = np.abs(a) > 0
    for r, s in enumerate(state.signal_modes):
        if occupied[r].any() and not mask_signal.covers(s):
            raise CombError(f"signal mask does not cover occupied mode {s}")
    for c, i in enumerate(state.idler_modes):
        if occupied[:, c].any() and not mask_idler.covers(i):
            raise CombError(f"idler mask does not cover occupied mode {i}")
    ps = np.array([mask_signal.phase(s) if mask_signal.covers(s) else 0.0 for s in state.signal_modes])
    pi = np.array([mask_idler.phase(i) if mask_idler.covers(i) else 0.0 for i in state.idler_modes])
    phase = np.exp(1j * (ps[:, None] + pi[None, :]))
    return BiphotonAmplitude(a * phase, state.signal_modes, state.idler_modes, state.convention)


def jsi(state):
    return np.abs(state.amplitudes) ** 2


def subspace_postselect(state, signal_modes, idler_modes):
    """Restrict to the given modes (each list sorted ascending) and renormalize."""
    signal_modes = sorted(int(m) for m in signal_modes)
    idler_modes = sorted(int(m) for m in idler_modes)
    missing = [m for m in signal_modes if m not in state.signal_modes]
    missing += [m for m in idler_modes if m not in state.idler_modes]
    if missing:
        raise CombError(f"modes {missing} are not part of the state")
    rows = [state.signal_modes.index(m) for m in signal_modes]
    cols = [state.idler_modes.index(m) for m in idler_modes]
    a = state.amplitudes[np.ix_(rows, cols)]
    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if norm < 1e-15:
        raise PostSelectionError("post-selected subspace has zero amplitude")
    return BiphotonAmplitude(a / norm, tuple(signal_modes), tuple(idler_modes))


def qudit_amplitudes(state):
    """Amplitude matrix with both arms ordered by increasing |mode|.

    This is the ``|k>_s |k>_i`` qudit labeling (signal ``k``, idler ``-k``)
    used by the density-matrix and tomography code.
    """
    s_order = np.argsort([abs(m) for m in state.signal_modes], kind="stable")
    i_order = np.argsort([abs(m) for m in state.idler_modes], kind="stable")
    return state.amplitudes[np.ix_(s_order, i_order)]
