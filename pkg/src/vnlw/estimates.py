"""Closed-form quantities of the analysis.

This module has no quadrature anywhere: every integral is evaluated through
the antiderivative of ``exp(a t) cos(b t + c)``, so it serves as the exact
oracle against which the quadrature pipeline is checked.

Contents:

* regularity thresholds of the equation (scaling-critical, viscous),
* the piecewise box-mass function ``g_s``,
* phase functionals of frequency tuples and the epsilon-sum of the
  stationary integral term,
* the closed-form Fourier coefficients of the first Picard iterate for
  indicator-box data,
* lower-bound prediction formulas and upper-bound constant fitting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DEFAULT, RunConfig
from .data import AdversarialData, box_points
from .errors import ConfigurationError
from .spectral import ROOT3_HALF, FrequencyLattice, SpectralField

PI_SIXTH = math.pi / 6.0


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    """Regularity thresholds as exact rationals."""

    s_scal: Fraction
    s_vis: Fraction
    s_M: Fraction

    def as_floats(self) -> dict:
        return {
            "s_scal": float(self.s_scal),
            "s_vis": float(self.s_vis),
            "s_M": float(self.s_M),
        }


def thresholds(d: int, k: int) -> Thresholds:
    """Scaling-critical exponent d/2 - 2/(k-1), viscous threshold
    d(1/2 - 1/k) - 1/k, and their inflation envelope max(s_scal, -1/k)."""
    if d < 1 or k < 2:
        raise ValueError(f"need d >= 1 and k >= 2, got d={d}, k={k}")
    s_scal = Fraction(d, 2) - Fraction(2, k - 1)
    s_vis = d * (Fraction(1, 2) - Fraction(1, k)) - Fraction(1, k)
    return Thresholds(s_scal=s_scal, s_vis=s_vis, s_M=max(s_scal, Fraction(-1, k)))


# ---------------------------------------------------------------------------
# the box-mass function g_s
# ---------------------------------------------------------------------------

def g_s(s: float, d: int, A: float) -> float:
    """Weighted mass scale of a width-A box at regularity s.

    Piecewise: 1 below s = -d/2, sqrt(log <A>) at the threshold,
    A^{d/2+s} above it.
    """
    if A < 1:
        raise ValueError(f"g_s needs A >= 1, got {A}")
    half_d = d / 2.0
    if s < -half_d:
        return 1.0
    if s == -half_d:
        bracket = math.sqrt(1.0 + A * A)
        return math.sqrt(math.log(bracket))
    return A ** (half_d + s)


def lattice_gs(s: float, d: int, A: float) -> float:
    """Exact lattice analogue of g_s: l^2 mass of <xi>^s over Q_A points."""
    if A < 1:
        raise ValueError(f"lattice_gs needs A >= 1, got {A}")
    total = 0.0
    for point in box_points(A, d):
        jap2 = 1.0 + sum(c * c for c in point)
        total += jap2 ** s
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# exact oscillatory time integrals
# ---------------------------------------------------------------------------

def _exp_cos_core(z: np.ndarray, t: float) -> np.ndarray:
    """(exp(z t) - 1)/z, with a series branch for small |z t|."""
    zt = z * t
    small = np.abs(zt) < 1e-4
    safe = np.where(z == 0.0, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        main = (np.exp(zt) - 1.0) / safe
    acc = np.zeros_like(z)
    power = np.ones_like(z)
    for n in range(9):
        acc = acc + power / math.factorial(n + 1)
        power = power * zt
    return np.where(small, t * acc, main)


def _exp_cos_moment_core(z: np.ndarray, t: float) -> np.ndarray:
    """(exp(z t)(z t - 1) + 1)/z^2, with a series branch for small |z t|."""
    zt = z * t
    small = np.abs(zt) < 1e-4
    safe = np.where(z == 0.0, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        main = (np.exp(zt) * (zt - 1.0) + 1.0) / (safe * safe)
    acc = np.zeros_like(z)
    power = np.ones_like(z)
    for n in range(9):
        acc = acc + (n + 1) * power / math.factorial(n + 2)
        power = power * zt
    return np.where(small, t * t * acc, main)


def _exp_cos_integral(a, b, c, t: float) -> np.ndarray:
    """Integral over [0, t] of exp(a u) cos(b u + c), vectorized."""
    z = np.asarray(a, dtype=float) + 1j * np.asarray(b, dtype=float)
    phase = np.exp(1j * np.asarray(c, dtype=float))
    return np.real(phase * _exp_cos_core(z, t))


def _exp_cos_first_moment(a, b, c, t: float) -> np.ndarray:
    """Integral over [0, t] of u exp(a u) cos(b u + c), vectorized."""
    z = np.asarray(a, dtype=float) + 1j * np.asarray(b, dtype=float)
    phase = np.exp(1j * np.asarray(c, dtype=float))
    return np.real(phase * _exp_cos_moment_core(z, t))


def exact_time_integral(a: float, b: float, c: float, t: float) -> float:
    """Definite integral of exp(a u) cos(b u + c) over [0, t].

    Uses the antiderivative exp(a u)(a cos(b u + c) + b sin(b u + c))
    / (a^2 + b^2), in complex form.  Degenerate a = b = 0 returns t cos(c).
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return float(_exp_cos_integral(a, b, c, t))


# ---------------------------------------------------------------------------
# phase functionals and the epsilon sum
# ---------------------------------------------------------------------------

def _tuple_array(xi_bar) -> np.ndarray:
    """Normalize a frequency tuple list to an (k, d) integer array."""
    arr = np.asarray(xi_bar, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("expected a sequence of k frequency vectors")
    return arr


def phase_deficit(xi_bar) -> float:
    """|sum xi_j| - sum |xi_j|; nonpositive by the triangle inequality."""
    arr = _tuple_array(xi_bar)
    norms = np.sqrt((arr * arr).sum(axis=1))
    total = arr.sum(axis=0)
    return float(math.sqrt(float((total * total).sum())) - norms.sum())


def signed_phase(xi_bar, eps) -> float:
    """sum eps_j |xi_j| for a sign pattern eps."""
    arr = _tuple_array(xi_bar)
    norms = np.sqrt((arr * arr).sum(axis=1))
    return float(np.dot(norms, np.asarray(eps, dtype=float)))


def sign_total(eps) -> int:
    return int(sum(eps))


def big_i(xi_bar, eps) -> float:
    """Stationary part of the oscillatory time integral for one sign pattern.

    Equals -(2 Phi cos(S pi/6) - 2 sqrt(3) Psi sin(S pi/6)) / (Phi^2 + 3 Psi^2)
    with Phi the phase deficit, Psi the signed phase and S the sign total.
    """
    phi = phase_deficit(xi_bar)
    psi = signed_phase(xi_bar, eps)
    s_tot = sign_total(eps)
    denom = phi * phi + 3.0 * psi * psi
    if denom == 0.0:
        raise ValueError("degenerate tuple: phase deficit and signed phase both vanish")
    numer = 2.0 * phi * math.cos(s_tot * PI_SIXTH) - 2.0 * math.sqrt(3.0) * psi * math.sin(
        s_tot * PI_SIXTH
    )
    return -numer / denom


def big_i_sum(xi_bar) -> float:
    """Sum of :func:`big_i` over all 2^k sign patterns.

    Scales like 1/N when the tuple components sit near the +-N, +-2N
    carriers; the product N * sum is the bracketed quantity the tests pin.
    """
    arr = _tuple_array(xi_bar)
    k = arr.shape[0]
    return float(
        sum(big_i(xi_bar, eps) for eps in itertools.product((1, -1), repeat=k))
    )


# ---------------------------------------------------------------------------
# lattice convolution of indicator boxes
# ---------------------------------------------------------------------------

def conv_box_oracle(a, b, A: float, xi) -> int:
    """Exact lattice value of (1_{a+Q_A} * 1_{b+Q_A})(xi).

    Counts integer pairs (m, xi - m) landing in the two translated boxes;
    the count factorizes across axes.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if not (a.shape == b.shape == xi.shape):
        raise ValueError("a, b, xi must share one dimension")
    radius = A / 8.0
    count = 1
    for ai, bi, xii in zip(a, b, xi):
        lo = max(math.ceil(ai - radius), math.ceil(xii - bi - radius))
        hi = min(math.floor(ai + radius), math.floor(xii - bi + radius))
        count *= max(0, hi - lo + 1)
        if count == 0:
            return 0
    return count


# ---------------------------------------------------------------------------
# closed-form first Picard iterate for indicator-box data
# ---------------------------------------------------------------------------

def _tuple_chunks(n_support: int, k: int, chunk: int):
    total = n_support ** k
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((stop - start, k), dtype=np.int64)
        for j in range(k - 1, -1, -1):
            digits[:, j] = flat % n_support
            flat //= n_support
        yield digits


def _xi1_contributions(points: np.ndarray, t: float, k: int) -> np.ndarray:
    """Per-tuple integral values for a (B, k, d) batch of frequency tuples.

    Returns exp(-|xi| t / 2) * 3^{-k/2} * sum over sign patterns of the
    exact time integral; the amplitude and overall minus sign are applied
    by the caller.
    """
    abs_j = np.sqrt((points * points).sum(axis=2))  # (B, k)
    out = points.sum(axis=1)  # (B, d)
    abs_out = np.sqrt((out * out).sum(axis=1))  # (B,)
    a = 0.5 * (abs_out - abs_j.sum(axis=1))  # Phi / 2
    omega = ROOT3_HALF * abs_out
    nonzero = abs_out > 0.0
    zero = ~nonzero
    accum = np.zeros(points.shape[0])
    omega_nz = omega[nonzero]
    a_nz = a[nonzero]
    a_z = a[zero]
    for eps in itertools.product((1.0, -1.0), repeat=k):
        eps_arr = np.asarray(eps)
        psi = abs_j @ eps_arr
        beta = ROOT3_HALF * psi
        gamma = sum(eps) * PI_SIXTH
        if omega_nz.size:
            b_nz = beta[nonzero]
            half = _exp_cos_integral(
                a_nz, b_nz - omega_nz, omega_nz * t - gamma - 0.5 * math.pi, t
            ) + _exp_cos_integral(
                a_nz, -(omega_nz + b_nz), omega_nz * t + gamma - 0.5 * math.pi, t
            )
            accum[nonzero] += half / (2.0 * omega_nz)
        if a_z.size:
            b_z = beta[zero]
            accum[zero] += t * _exp_cos_integral(a_z, b_z, -gamma, t) - _exp_cos_first_moment(
                a_z, b_z, -gamma, t
            )
    return np.exp(-0.5 * abs_out * t) * (3.0 ** (-k / 2.0)) * accum


def xi1_field(
    data: AdversarialData,
    t: float,
    lattice: FrequencyLattice | None = None,
    config: RunConfig = DEFAULT,
) -> SpectralField:
    """First Picard iterate of indicator-box data, by direct lattice summation.

    Every Fourier coefficient is the sum over frequency tuples drawn from
    the data support (constrained to the output frequency) of an exactly
    integrated damped oscillation; no quadrature is involved.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    k = data.spec.k
    support = np.asarray(data.support, dtype=float)
    n_support = support.shape[0]
    total = n_support ** k
    if total > config.tuple_cap:
        raise ConfigurationError(
            f"support of {n_support} points gives {total} tuples, above the cap "
            f"{config.tuple_cap}; use a smaller box width A"
        )
    d = data.spec.d
    max_out = int(k * np.max(np.abs(support)))
    if lattice is None:
        lattice = FrequencyLattice(d, max(max_out, 1))
    elif lattice.cutoff < max_out:
        raise ConfigurationError(
            f"output lattice cutoff {lattice.cutoff} cannot hold k-fold sums up to {max_out}"
        )
    out = np.zeros(lattice.shape, dtype=np.complex128)
    if t == 0.0 or data.R == 0.0 or n_support == 0:
        return SpectralField(lattice, out, copy=False)
    flat = out.ravel()
    amplitude = -(data.R ** k)
    for digits in _tuple_chunks(n_support, k, chunk=max(1, 200_000 // (2 ** k))):
        points = support[digits]  # (B, k, d)
        values = amplitude * _xi1_contributions(points, t, k)
        idx = (points.sum(axis=1) + lattice.cutoff).astype(np.int64)  # (B, d)
        flat_idx = np.ravel_multi_index(tuple(idx.T), lattice.shape)
        np.add.at(flat, flat_idx, values)
    return SpectralField(lattice, out, copy=False)


def xi1_closed_form(
    data: AdversarialData,
    t: float,
    xi,
    config: RunConfig = DEFAULT,
) -> complex:
    """Single Fourier coefficient of the first Picard iterate.

    Sums only the tuples from the data support whose frequencies add up to
    ``xi``; exact in time via the antiderivative, so this is the oracle
    route for the quadrature integrator.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    k = data.spec.k
    d = data.spec.d
    if np.isscalar(xi):
        xi = (int(xi),) + (0,) * (d - 1)
    target = np.asarray(xi, dtype=float)
    support = np.asarray(data.support, dtype=float)
    n_support = support.shape[0]
    total = n_support ** k
    if total > config.tuple_cap:
        raise ConfigurationError(
            f"support of {n_support} points gives {total} tuples, above the cap "
            f"{config.tuple_cap}; use a smaller box width A"
        )
    if t == 0.0 or data.R == 0.0 or n_support == 0:
        return 0.0 + 0.0j
    amplitude = -(data.R ** k)
    value = 0.0
    for digits in _tuple_chunks(n_support, k, chunk=max(1, 200_000 // (2 ** k))):
        points = support[digits]
        hit = np.all(points.sum(axis=1) == target[None, :], axis=1)
        if not np.any(hit):
            continue
        value += float(np.sum(_xi1_contributions(points[hit], t, k)))
    return complex(amplitude * value)


# ---------------------------------------------------------------------------
# lower-bound predictions and upper-bound constant fits
# ---------------------------------------------------------------------------

def lower_bound_prediction(
    *,
    d: int,
    k: int,
    s: float,
    N: int,
    R: float,
    A: float,
    t: float,
    regime: str,
    box_count: int | None = None,
    lattice_g: bool = False,
) -> float:
    """Formula value (constant 1) of the first-iterate lower bound.

    ``regime='short'``: R^k t^2 A^{d(k-1)} g_s(A), valid for t well below 1/N.
    ``regime='long'``:  R^k (t/N) A^{d(k-1)} min(g_s(A), g_s(1/t)), valid for
    t well above 1/N and at most order one.

    With ``box_count`` given, the continuum box mass A^d is replaced by the
    lattice point count; with ``lattice_g`` the weight-mass factor becomes
    the exact lattice sum over the convolution support (width 2A, capped by
    the damping window ~1/t in the long regime).  Both switches remove
    discretization and constant drift from dyadic sweeps, leaving the pure
    power law for exponent fits.
    """
    mass = float(box_count) if box_count is not None else A ** d
    factor = R ** k * mass ** (k - 1)
    if regime == "short":
        g_part = lattice_gs(s, d, 2.0 * A) if lattice_g else g_s(s, d, A)
        return factor * t * t * g_part
    if regime == "long":
        if lattice_g:
            g_part = lattice_gs(s, d, max(1.0, min(2.0 * A, 8.0 / t)))
        else:
            g_part = min(g_s(s, d, A), g_s(s, d, max(1.0, 1.0 / t)))
        return factor * (t / N) * g_part
    raise ValueError(f"unknown regime {regime!r}; expected 'short' or 'long'")


def fit_min_constants(level_norms: dict, bound) -> dict:
    """Per-level minimal constants C_j so that norm <= C_j * bound(j, t).

    ``level_norms`` maps level j to a list of (t, measured_norm) samples;
    ``bound`` is a callable (j, t) -> formula value at constant one.
    """
    constants = {}
    for j, samples in sorted(level_norms.items()):
        worst = 0.0
        for t, norm in samples:
            base = bound(j, t)
            if base > 0:
                worst = max(worst, norm / base)
        constants[j] = worst
    return constants


def short_regime_bound(*, d: int, k: int, s: float, R: float, A: float):
    """Iterate bound of the short-time regime: t^{2j} (R A^d)^{(k-1)j} (1 + R g_s(A))."""
    tail = 1.0 + R * g_s(s, d, A)

    def bound(j: int, t: float) -> float:
        return t ** (2 * j) * (R * A ** d) ** ((k - 1) * j) * tail

    return bound


def long_regime_bound(*, d: int, k: int, s: float, N: int, R: float, A: float):
    """Iterate bounds of the long-time regime, by level.

    Levels 0..2 use the sharp three-term forms; higher levels use the
    general geometric form with the (t N)^{-m/k} gain.
    """
    Ad = A ** d

    def bound(j: int, t: float) -> float:
        if j == 0:
            return R * N ** s * A ** (d / 2.0) + 1.0
        if j == 1:
            return (t / N) * sum(R ** m * Ad ** m for m in range(1, k + 1)) + t * t
        if j == 2:
            high = sum(R ** m * Ad ** m for m in range(k + 1, 2 * k))
            low = sum(R ** m * Ad ** m for m in range(1, k + 1))
            return (t / N) ** 2 * high + (t ** 3 / N) * low + t ** 4
        total = sum(R ** m * Ad ** m * (t * N) ** (-m / k) for m in range(1, (k - 1) * j + 2))
        return t ** (2 * j) * (total + 1.0)

    return bound


def tail_ratio_formula(*, k: int, N: int, R: float, t: float) -> float:
    """Geometric level-ratio scale of the long-regime series tail."""
    return R ** (k - 1) * t * t * (t * N) ** (-(k - 1) / k)
