"""Parallel transport as an iterated-integral series, plus perturbed holonomy.

picard_transport solves dR/dt = sign * A(t) R, R(0) = I, by the Picard
iteration: R = sum of T_k with T_0 = I and T_k(t) = int_0^t A T_{k-1},
so the kth term is the k-fold time-ordered integral with the largest time
leftmost.  Composite trapezoid on a shared grid evaluates every level;
declared breakpoints are merged into the grid and cell-end samples back
off into the owning cell, which keeps piecewise-constant integrands exact
per cell.  The tail of the series is certified by |T_k| <= Rhat^k / k!
with Rhat = int |A(t)|_2 dt, and remainder_bound sums that tail stably.

Perturbed holonomy of a word: each letter's arc carries a constant
algebra-valued perturbation (inverse letters traverse it backwards), the
current-frame equation is P' = -m B_j P with a crossing jump rho(x_j) at
each arc end, and the substitution P = psi R with psi the unperturbed
prefix holonomy turns it into a transport problem for the piecewise
constant path Atilde = -m psi^-1 B_j psi.  The perturbed holonomy is
hol(w) R(1), it is multiplicative for concatenation, and the exposed
series terms V_k = hol R_k hol^-1 satisfy the concatenation rule tested
in the suites.  An arc-by-arc RK4 integrator in the current frame is the
independent second route.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import surface as S


@dataclass
class MatrixPath:
    """Time-dependent square matrix A(t) on [0, 1].

    breakpoints lists interior discontinuity times; samplers built here
    are right-continuous at them.
    """

    fn: callable
    dim: int
    breakpoints: tuple[float, ...] = ()

    def __call__(self, t: float) -> np.ndarray:
        return self.fn(t)

    @classmethod
    def piecewise_constant(cls, values) -> "MatrixPath":
        values = [np.asarray(v, dtype=complex) for v in values]
        m = len(values)
        bounds = np.arange(1, m) / m

        def fn(t):
            i = min(int(np.searchsorted(bounds, t, side="right")), m - 1)
            return values[i]

        return cls(fn, values[0].shape[0], tuple(bounds))

    @classmethod
    def concat(cls, first: "MatrixPath", second: "MatrixPath") -> "MatrixPath":
        """Path running first on [0, 1/2], then second, clocks doubled."""

        def fn(t):
            if t < 0.5:
                return 2.0 * first.fn(2.0 * t)
            return 2.0 * second.fn(2.0 * t - 1.0)

        breaks = tuple(b / 2 for b in first.breakpoints) + (0.5,) + \
            tuple(0.5 + b / 2 for b in second.breakpoints)
        return cls(fn, first.dim, breaks)


def _grid(path: MatrixPath, n_steps: int) -> np.ndarray:
    base = np.linspace(0.0, 1.0, n_steps + 1)
    if path.breakpoints:
        base = np.union1d(base, np.asarray(path.breakpoints))
    return base


def _cell_samples(path: MatrixPath, grid: np.ndarray, sign: int):
    """A at each cell's left edge and just inside its right edge."""
    nudge = bool(path.breakpoints)
    left, right = [], []
    for i in range(len(grid) - 1):
        h = grid[i + 1] - grid[i]
        left.append(sign * path.fn(grid[i]))
        tr = grid[i + 1] - 1e-6 * h if nudge else grid[i + 1]
        right.append(sign * path.fn(tr))
    return left, right


def series_tail_bound(r_hat: float, n_max: int) -> float:
    """sum_{k > n_max} r^k / k!, summed from the small end for stability."""
    term = r_hat ** (n_max + 1) / factorial(n_max + 1)
    total, k = 0.0, n_max + 1
    while term > 1e-300 and k < n_max + 400:
        total += term
        k += 1
        term *= r_hat / k
    return total


@dataclass
class TransportResult:
    terms: list[np.ndarray]        # T_0 .. T_n_max at t = 1
    transport: np.ndarray          # their sum
    r_hat: float
    remainder_bound: float


def picard_transport(path: MatrixPath, n_max: int = 12, n_steps: int = 2000,
                     sign: int = 1) -> TransportResult:
    """Truncated time-ordered exponential of sign * A along the path."""
    grid = _grid(path, n_steps)
    al, ar = _cell_samples(path, grid, sign)
    al = np.stack(al)
    ar = np.stack(ar)
    h = np.diff(grid)[:, None, None]
    d = path.dim
    npts = len(grid)
    eye = np.eye(d, dtype=complex)
    r_hat = float(sum(hi / 2 * (np.linalg.norm(a, 2) + np.linalg.norm(b, 2))
                      for hi, a, b in zip(np.diff(grid), al, ar)))
    prev = np.broadcast_to(eye, (npts, d, d)).copy()
    terms = [eye.copy()]
    total = eye.copy()
    for _ in range(n_max):
        inc = (h / 2) * (al @ prev[:-1] + ar @ prev[1:])
        cur = np.zeros_like(prev)
        np.cumsum(inc, axis=0, out=cur[1:])
        terms.append(cur[-1].copy())
        total = total + cur[-1]
        prev = cur
    return TransportResult(terms, total, r_hat, series_tail_bound(r_hat, n_max))


def rk4_transport(path: MatrixPath, n_steps: int = 2000, sign: int = 1) -> np.ndarray:
    """Classical RK4 for dR/dt = sign * A(t) R on the same aligned grid."""
    grid = _grid(path, n_steps)
    nudge = bool(path.breakpoints)
    r = np.eye(path.dim, dtype=complex)
    for i in range(len(grid) - 1):
        t0, t1 = grid[i], grid[i + 1]
        h = t1 - t0
        a0 = sign * path.fn(t0)
        am = sign * path.fn(t0 + h / 2)
        a1 = sign * path.fn(t1 - 1e-6 * h if nudge else t1)
        k1 = a0 @ r
        k2 = am @ (r + h / 2 * k1)
        k3 = am @ (r + h / 2 * k2)
        k4 = a1 @ (r + h * k3)
        r = r + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return r


def word_perturbation_path(rep: S.Representation, pert: dict, word) -> MatrixPath:
    """Start-frame path Atilde for the perturbed-holonomy equation.

    pert maps generator index k to a constant algebra element B_k; the
    arc of an inverse letter carries -B_k.  Arc j contributes the
    constant -m psi_j^-1 B_j psi_j, psi_j the prefix holonomy.
    """
    w = list(word)
    if not w:
        return MatrixPath.piecewise_constant(
            [np.zeros((rep.spec.matrix_dim, rep.spec.matrix_dim), dtype=complex)])
    m = len(w)
    values = []
    psi = np.eye(rep.spec.matrix_dim, dtype=complex)
    for x in w:
        b = np.asarray(pert[abs(x)], dtype=complex)
        if x < 0:
            b = -b
        psi_inv = np.linalg.inv(psi)
        values.append(-m * psi_inv @ b @ psi)
        psi = rep.image(x) @ psi
    return MatrixPath.piecewise_constant(values)


@dataclass
class PerturbedHolonomy:
    hol: np.ndarray                # unperturbed holonomy
    value: np.ndarray              # perturbed holonomy hol @ R(1)
    series: list[np.ndarray]       # exposed terms V_k = hol T_k hol^-1
    r_hat: float
    remainder_bound: float


def perturbed_holonomy(rep: S.Representation, pert: dict, word,
                       n_max: int = 12, n_steps: int = 2000) -> PerturbedHolonomy:
    path = word_perturbation_path(rep, pert, word)
    res = picard_transport(path, n_max=n_max, n_steps=n_steps)
    hol = S.holonomy(rep, word)
    hol_inv = np.linalg.inv(hol)
    series = [hol @ t @ hol_inv for t in res.terms]
    return PerturbedHolonomy(hol, hol @ res.transport, series,
                             res.r_hat, res.remainder_bound)


def rk4_perturbed_holonomy(rep: S.Representation, pert: dict, word,
                           n_steps: int = 2000) -> np.ndarray:
    """Current-frame route: integrate each arc, then apply the crossing."""
    w = list(word)
    d = rep.spec.matrix_dim
    p = np.eye(d, dtype=complex)
    if not w:
        return p
    m = len(w)
    steps = max(1, n_steps // m)
    h = 1.0 / (m * steps)
    for x in w:
        b = np.asarray(pert[abs(x)], dtype=complex)
        if x < 0:
            b = -b
        c = -m * b
        for _ in range(steps):
            k1 = c @ p
            k2 = c @ (p + h / 2 * k1)
            k3 = c @ (p + h / 2 * k2)
            k4 = c @ (p + h * k3)
            p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        p = rep.image(x) @ p
    return p


def expm_perturbed_holonomy(rep: S.Representation, pert: dict, word) -> np.ndarray:
    """Closed form: each arc has a constant coefficient, so it contributes
    exp(-B_j) in the current frame, giving prod_j rho(x_j) exp(-B_j) with
    the last letter's factors leftmost."""
    from scipy.linalg import expm

    d = rep.spec.matrix_dim
    p = np.eye(d, dtype=complex)
    for x in word:
        b = np.asarray(pert[abs(x)], dtype=complex)
        if x < 0:
            b = -b
        p = rep.image(x) @ expm(-b) @ p
    return p
