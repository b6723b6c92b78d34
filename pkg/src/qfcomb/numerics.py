"""Small dense numerical kernels: Bessel functions of the first kind, a
cyclic Jacobi Hermitian eigensolver and the trace norm.

Matrices are plain ``numpy`` complex arrays; nothing here keeps state.
"""

import math

import numpy as np

BESSEL_MAX_ARG = 50.0
SERIES_MAX_ARG = 12.0
EIG_CLIP = 1e-12
HERMITIAN_TOL = 1e-12
MAX_EIG_SIZE = 512


class NumericsError(ValueError):
    """Raised when an input violates a kernel's contract."""


def _bessel_series(n, x):
    # n >= 0, |x| <= SERIES_MAX_ARG
    half = 0.5 * x
    if half == 0.0:
        return 1.0 if n == 0 else 0.0
    log_first = n * math.log(abs(half)) - math.lgamma(n + 1)
    if log_first < -745.0:
        return 0.0
    term = math.exp(log_first)
    if half < 0 and n % 2:
        term = -term
    q = -half * half
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) or k > 500:
            break
    return total


def _bessel_miller(nmax, x):
    """J_0..J_nmax at x > 0 by normalized backward recurrence."""
    top = max(nmax, int(x)) + 1
    start = 2 * ((top + int(math.sqrt(60.0 * top)) + 30) // 2)
    vals = np.zeros(nmax + 1)
    j_next, j_cur = 0.0, 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            vals *= 1e-250
            norm *= 1e-250
        # j_cur now holds J_{k-1}
        if k - 1 <= nmax:
            vals[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return vals / norm


def bessel_j(order, x):
    """Bessel function of the first kind ``J_order(x)`` for integer order.

    Validated for ``|x| <= 50`` with absolute error below 1e-12.
    """
    order = int(order)
    x = float(x)
    if not math.isfinite(x) or abs(x) > BESSEL_MAX_ARG:
        raise NumericsError(f"bessel_j argument {x} outside [-{BESSEL_MAX_ARG}, {BESSEL_MAX_ARG}]")
    sign = 1.0
    n = order
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0:
        x = -x
        if n % 2:
            sign = -sign
    if x <= SERIES_MAX_ARG:
        return sign * _bessel_series(n, x)
    return sign * float(_bessel_miller(n, x)[n])


def bessel_j_range(nmax, x):
    """Array of ``J_n(x)`` for ``n = -nmax..nmax``, index ``n + nmax``."""
    nmax = int(nmax)
    return np.array([bessel_j(n, x) for n in range(-nmax, nmax + 1)])


def _check_square(m, what):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NumericsError(f"{what} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericsError(f"{what} has non-finite entries")
    return m


def hermitian_eigensystem(h, tol=HERMITIAN_TOL, max_sweeps=100):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ``w`` ascending and ``v`` unitary such that
    ``h = v @ diag(w) @ v^H``. Columns belonging to a degenerate eigenvalue
    are only defined up to a rotation within that eigenspace.
    """
    a = _check_square(h, "H").astype(complex)
    n = a.shape[0]
    if n > MAX_EIG_SIZE:
        raise NumericsError(f"matrix size {n} exceeds {MAX_EIG_SIZE}")
    herm_err = np.max(np.abs(a - a.conj().T))
    if herm_err > tol:
        raise NumericsError(f"matrix is not Hermitian (max |H - H^H| = {herm_err:.3e})")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    fro = np.linalg.norm(a)
    target = 1e-14 * fro

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag <= 1e-300 or mag < 1e-18 * fro:
                    continue
                phase = b / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # g = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ g
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = g.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vc = v[:, [p, q]] @ g
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    else:
        raise NumericsError("Jacobi eigensolver did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(h):
    return hermitian_eigensystem(h)[0]


def clip_eigenvalues(w, threshold=EIG_CLIP):
    """Zero out eigenvalues below ``threshold`` (roundoff negatives included)."""
    w = np.array(w, dtype=float)
    w[w < threshold] = 0.0
    return w


def psd_sqrt(h):
    """Square root of a positive semi-definite Hermitian matrix."""
    w, v = hermitian_eigensystem(h)
    return (v * np.sqrt(clip_eigenvalues(w))) @ v.conj().T


def trace_norm(m):
    """Sum of singular values of a square matrix.

    Hermitian input is handled through ``sum |eigenvalues|``, which keeps
    exact zeros exact; otherwise the singular values come from the
    eigenvalues of ``M^H M``.
    """
    m = _check_square(m, "M").astype(complex)
    if np.max(np.abs(m - m.conj().T)) <= HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        w = hermitian_eigensystem(0.5 * (m + m.conj().T))[0]
        return float(np.sum(np.abs(w)))
    gram = m.conj().T @ m
    gram = 0.5 * (gram + gram.conj().T)
    w = clip_eigenvalues(hermitian_eigensystem(gram)[0])
    return float(np.sum(np.sqrt(w)))
