"""Truncated-lattice Fourier fields on the d-torus and the exact linear flow.

Conventions
-----------
The torus is R^d / Z^d and fields are represented by their Fourier
coefficients on the integer lattice truncated to ``max-norm(xi) <= cutoff``:

    u(x) = sum_xi  c(xi) exp(2 pi i xi . x).

The series is unit-normalized (no 2*pi or volume factors in the
coefficients) and lattice sums use the counting measure.  All Fourier
multipliers below take the *Euclidean* magnitude ``|xi|`` of the integer
frequency as written, with no extra 2*pi factor.

The linear flow of the damped wave operator splits into the scalar symbols

    P(t, xi)  = exp(-|xi| t / 2)                              (damping)
    V0(t, xi) = cos(w t) + sin(w t)/sqrt(3),  w = sqrt(3)/2 |xi|
    V1(t, xi) = sin(w t) / w          (limit t at xi = 0)
    W(t, xi)  = P(t, xi) V1(t, xi)

and the propagator applied to initial data (u0, u1) is
``P(t) (V0(t) u0 + V1(t) u1)`` frequency-wise.

Coefficient arrays are indexed so that axis index ``i`` corresponds to
frequency ``i - cutoff``; the array shape is ``(2*cutoff+1,) * d``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as _fft

from .errors import ConfigurationError

ROOT3_HALF = math.sqrt(3.0) / 2.0

_MAGIC = b"VNLWF1\x00\x00"


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _abs_xi_grid(d: int, cutoff: int) -> np.ndarray:
    axes = [np.arange(-cutoff, cutoff + 1, dtype=float) for _ in range(d)]
    grids = np.meshgrid(*axes, indexing="ij")
    out = np.sqrt(sum(g * g for g in grids))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FrequencyLattice:
    """Frequencies ``{xi in Z^d : max-norm(xi) <= cutoff}``."""

    d: int
    cutoff: int

    def __post_init__(self):
        if not 1 <= self.d <= 3:
            raise ValueError(f"dimension must be 1..3, got {self.d}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (2 * self.cutoff + 1,) * self.d

    @property
    def size(self) -> int:
        return (2 * self.cutoff + 1) ** self.d

    @property
    def abs_xi(self) -> np.ndarray:
        """Euclidean |xi| on the lattice, read-only array."""
        return _abs_xi_grid(self.d, self.cutoff)

    @property
    def japanese_sq(self) -> np.ndarray:
        """<xi>^2 = 1 + |xi|^2 on the lattice."""
        g = self.abs_xi
        return 1.0 + g * g

    def contains(self, xi) -> bool:
        return len(xi) == self.d and all(abs(int(c)) <= self.cutoff for c in xi)

    def index(self, xi) -> tuple[int, ...]:
        if not self.contains(xi):
            raise ValueError(f"frequency {xi} outside lattice cutoff {self.cutoff}")
        return tuple(int(c) + self.cutoff for c in xi)


def as_xi(xi, d: int) -> tuple[int, ...]:
    """Normalize a frequency given as int or sequence to a length-d tuple."""
    if np.isscalar(xi):
        if d != 1:
            raise ValueError("scalar frequency only valid in dimension 1")
        return (int(xi),)
    xi = tuple(int(c) for c in xi)
    if len(xi) != d:
        raise ValueError(f"frequency {xi} has wrong dimension (expected {d})")
    return xi


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class SpectralField:
    """Complex Fourier coefficients on a frequency lattice.

    Treated as an immutable value: operations return new fields.
    """

    __slots__ = ("lattice", "coeffs")

    def __init__(self, lattice: FrequencyLattice, coeffs: np.ndarray, *, copy: bool = True):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != lattice.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} != lattice shape {lattice.shape}")
        self.lattice = lattice
        self.coeffs = coeffs.copy() if copy else coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, lattice: FrequencyLattice) -> "SpectralField":
        return cls(lattice, np.zeros(lattice.shape, dtype=np.complex128), copy=False)

    @classmethod
    def from_modes(cls, lattice: FrequencyLattice, modes: dict) -> "SpectralField":
        out = np.zeros(lattice.shape, dtype=np.complex128)
        for xi, value in modes.items():
            out[lattice.index(as_xi(xi, lattice.d))] = value
        return cls(lattice, out, copy=False)

    # -- accessors ---------------------------------------------------------

    def coefficient(self, xi) -> complex:
        return complex(self.coeffs[self.lattice.index(as_xi(xi, self.lattice.d))])

    def conj_symmetry_error(self) -> float:
        """max |c(-xi) - conj(c(xi))|; zero for real-valued fields."""
        rev = self.coeffs[(slice(None, None, -1),) * self.lattice.d]
        return float(np.max(np.abs(rev - np.conj(self.coeffs))))

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        return self.conj_symmetry_error() <= tol * scale

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "SpectralField"):
        if other.lattice != self.lattice:
            raise ValueError("lattice mismatch")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs, copy=False)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs, copy=False)

    def scaled(self, factor: complex) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs * factor, copy=False)

    def copy(self) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs, copy=True)


@dataclass(frozen=True)
class FieldPair:
    """Initial-data pair (position, velocity) on a shared lattice."""

    u0: SpectralField
    u1: SpectralField

    def __post_init__(self):
        if self.u0.lattice != self.u1.lattice:
            raise ValueError("lattice mismatch between pair components")

    @property
    def lattice(self) -> FrequencyLattice:
        return self.u0.lattice

    def scaled(self, factor: complex) -> "FieldPair":
        return FieldPair(self.u0.scaled(factor), self.u1.scaled(factor))

    def __add__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.u0 + other.u0, self.u1 + other.u1)

    @classmethod
    def zeros(cls, lattice: FrequencyLattice) -> "FieldPair":
        return cls(SpectralField.zeros(lattice), SpectralField.zeros(lattice))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def hs_norm(field: SpectralField, s: float, *, homogeneous: bool = False) -> float:
    """Sobolev norm ``( sum <xi>^{2s} |c|^2 )^{1/2}`` (counting measure).

    With ``homogeneous=True`` the weight is ``|xi|^{2s}``; for s < 0 the
    mean mode must then vanish (the weight is singular at xi = 0).
    """
    lattice = field.lattice
    mag2 = np.abs(field.coeffs) ** 2
    if not homogeneous:
        weights = lattice.japanese_sq ** s
        return float(math.sqrt(np.sum(weights * mag2)))
    absxi = lattice.abs_xi
    origin = (lattice.cutoff,) * lattice.d
    if s < 0:
        scale = max(1.0, float(np.max(np.abs(field.coeffs))))
        if abs(field.coeffs[origin]) > 1e-13 * scale:
            raise ValueError("homogeneous norm with s < 0 requires zero mean")
    weights = np.zeros(lattice.shape)
    nonzero = absxi > 0
    weights[nonzero] = absxi[nonzero] ** (2.0 * s)
    if s == 0:
        weights[origin] = 1.0
    return float(math.sqrt(np.sum(weights * mag2)))


def fl_norm(field: SpectralField, s: float, p: float) -> float:
    """Fourier-Lebesgue norm: the l^p lattice norm of ``<xi>^s c(xi)``."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    weighted = field.lattice.japanese_sq ** (s / 2.0) * np.abs(field.coeffs)
    if math.isinf(p):
        return float(np.max(weighted))
    return float(np.sum(weighted ** p) ** (1.0 / p))


def pair_sobolev_norm(pair: FieldPair, s: float) -> float:
    """Product-space Sobolev norm: l^2 combination of H^s and H^{s-1} parts."""
    return math.hypot(hs_norm(pair.u0, s), hs_norm(pair.u1, s - 1.0))


def pair_fl1_norm(pair: FieldPair) -> float:
    """Wiener-algebra pair norm: FL^{0,1} of u0 plus FL^{-1,1} of u1."""
    return fl_norm(pair.u0, 0.0, 1.0) + fl_norm(pair.u1, -1.0, 1.0)


# ---------------------------------------------------------------------------
# linear-flow multipliers
# ---------------------------------------------------------------------------

_KINDS = ("P", "V0", "V1", "W")


def _profiles(kind: str, t: float, absxi: np.ndarray):
    w = ROOT3_HALF * absxi
    if kind == "P":
        return np.exp(-0.5 * absxi * t)
    if kind == "V0":
        return np.cos(w * t) + np.sin(w * t) / math.sqrt(3.0)
    if kind == "V1":
        safe = np.where(w == 0.0, 1.0, w)
        return np.where(w == 0.0, t, np.sin(w * t) / safe)
    if kind == "W":
        return _profiles("P", t, absxi) * _profiles("V1", t, absxi)
    raise ValueError(f"unknown multiplier kind {kind!r}; expected one of {_KINDS}")


def multiplier_profile(kind: str, t: float, lattice: FrequencyLattice) -> np.ndarray:
    """Symbol values of one propagator factor over the whole lattice."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return _profiles(kind, float(t), lattice.abs_xi)


def multiplier_value(kind: str, t: float, xi) -> float:
    """Scalar symbol value at one frequency (xi may be scalar in d = 1)."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if np.isscalar(xi):
        absxi = abs(float(xi))
    else:
        absxi = math.sqrt(sum(float(c) ** 2 for c in xi))
    return float(_profiles(kind, float(t), np.asarray(absxi)))


def apply_linear_flow(t: float, pair: FieldPair) -> SpectralField:
    """Solution of the linear equation at time t: P(t)(V0(t) u0 + V1(t) u1)."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    lattice = pair.lattice
    absxi = lattice.abs_xi
    coeffs = _profiles("P", t, absxi) * (
        _profiles("V0", t, absxi) * pair.u0.coeffs
        + _profiles("V1", t, absxi) * pair.u1.coeffs
    )
    return SpectralField(lattice, coeffs, copy=False)


# ---------------------------------------------------------------------------
# dealiased products
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _pad_indices(cutoff: int, grid: int) -> np.ndarray:
    return np.arange(-cutoff, cutoff + 1) % grid


def _padded_grid(lattice: FrequencyLattice, k: int, max_points: int) -> int:
    # full zero padding: grid >= 2*k*cutoff + 1 makes the circular convolution
    # of k factors exact on the retained lattice
    need = 2 * k * lattice.cutoff + 1
    grid = _fft.next_fast_len(need)
    if grid ** lattice.d > max_points:
        raise ConfigurationError(
            f"padded grid {grid}^{lattice.d} exceeds the configured cap {max_points}"
        )
    return grid


def _to_physical(field: SpectralField, grid: int) -> np.ndarray:
    lat = field.lattice
    idx = _pad_indices(lat.cutoff, grid)
    embedded = np.zeros((grid,) * lat.d, dtype=np.complex128)
    embedded[np.ix_(*([idx] * lat.d))] = field.coeffs
    return _fft.ifftn(embedded) * (grid ** lat.d)


def _to_coeffs(values: np.ndarray, lattice: FrequencyLattice, grid: int) -> np.ndarray:
    hat = _fft.fftn(values) / (grid ** lattice.d)
    idx = _pad_indices(lattice.cutoff, grid)
    return hat[np.ix_(*([idx] * lattice.d))]


def pointwise_power(field: SpectralField, k: int, *, max_points: int = 2**24) -> SpectralField:
    """Fourier coefficients of u^k, dealiased by full zero padding.

    Equals the k-fold discrete self-convolution of the coefficients,
    restricted back to the lattice.
    """
    if k < 2:
        raise ValueError(f"power must be >= 2, got {k}")
    grid = _padded_grid(field.lattice, k, max_points)
    values = _to_physical(field, grid) ** k
    return SpectralField(field.lattice, _to_coeffs(values, field.lattice, grid), copy=False)


def pointwise_product(fields, *, max_points: int = 2**24) -> SpectralField:
    """Dealiased product of several fields on a shared lattice."""
    fields = list(fields)
    if len(fields) < 2:
        raise ValueError("need at least two factors")
    lattice = fields[0].lattice
    for f in fields[1:]:
        if f.lattice != lattice:
            raise ValueError("lattice mismatch between product factors")
    grid = _padded_grid(lattice, len(fields), max_points)
    # identical factor objects share one transform
    physical = {}
    values = None
    for f in fields:
        key = id(f)
        if key not in physical:
            physical[key] = _to_physical(f, grid)
        values = physical[key] if values is None else values * physical[key]
    return SpectralField(lattice, _to_coeffs(values, lattice, grid), copy=False)


def physical_values(field: SpectralField, *, oversample: int = 4) -> np.ndarray:
    """Field values on an equispaced grid of the torus (oversampled)."""
    grid = _fft.next_fast_len(oversample * (2 * field.lattice.cutoff + 1))
    return _to_physical(field, grid)


def lp_norm(field: SpectralField, p: float, *, oversample: int = 4) -> float:
    """Lebesgue norm on the unit-volume torus, by oversampled grid quadrature.

    Exact for p = 2 (Parseval); a Riemann approximation otherwise, accurate
    for band-limited fields once the grid oversamples the bandwidth.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 2:
        return float(math.sqrt(np.sum(np.abs(field.coeffs) ** 2)))
    values = np.abs(physical_values(field, oversample=oversample))
    if math.isinf(p):
        return float(values.max())
    return float((values ** p).mean() ** (1.0 / p))


# ---------------------------------------------------------------------------
# space-time norms
# ---------------------------------------------------------------------------

def xt_norm(samples, T: float, s: float, k: int) -> tuple[float, float]:
    """Sup-in-time norms of a sampled trajectory on (0, T].

    Returns ``(c_norm, y_norm)`` where ``c_norm`` is the sup of the H^s
    norm and ``y_norm`` the sup of ``t^{-s + d(1/2 - 1/k)}`` times the
    homogeneous Sobolev norm of order ``d(1/2 - 1/k)``.  Samples at t = 0
    contribute to the first norm only.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("empty trajectory")
    d = samples[0][1].lattice.d
    exponent = d * (0.5 - 1.0 / k)
    c_norm = 0.0
    y_norm = 0.0
    for t, field in samples:
        if t < 0 or t > T * (1 + 1e-12):
            raise ValueError(f"sample time {t} outside [0, {T}]")
        c_norm = max(c_norm, hs_norm(field, s))
        if t > 0:
            weight = t ** (-s + exponent)
            y_norm = max(y_norm, weight * hs_norm(field, exponent, homogeneous=True))
    return c_norm, y_norm


def x_norm(samples, T: float, s: float, k: int) -> float:
    """X(T) norm: sum of the two components of :func:`xt_norm`."""
    c, y = xt_norm(samples, T, s, k)
    return c + y


# ---------------------------------------------------------------------------
# snapshot serialization
# ---------------------------------------------------------------------------
# Binary layout: 8-byte magic, then '<BI' (dimension, cutoff), then the
# coefficient array in row-major order as interleaved little-endian float64
# (re, im) pairs.

def field_to_bytes(field: SpectralField) -> bytes:
    header = _MAGIC + struct.pack("<BI", field.lattice.d, field.lattice.cutoff)
    flat = np.ascontiguousarray(field.coeffs).view(np.float64).astype("<f8")
    return header + flat.tobytes()


def field_from_bytes(blob: bytes) -> SpectralField:
    if blob[: len(_MAGIC)] != _MAGIC:
        raise ValueError("not a field snapshot (bad magic)")
    d, cutoff = struct.unpack_from("<BI", blob, len(_MAGIC))
    lattice = FrequencyLattice(d, cutoff)
    offset = len(_MAGIC) + struct.calcsize("<BI")
    flat = np.frombuffer(blob, dtype="<f8", offset=offset)
    if flat.size != 2 * lattice.size:
        raise ValueError("snapshot length does not match lattice size")
    coeffs = flat[0::2] + 1j * flat[1::2]
    return SpectralField(lattice, coeffs.reshape(lattice.shape))


def field_to_json(field: SpectralField) -> str:
    flat = np.ascontiguousarray(field.coeffs).view(np.float64)
    return json.dumps(
        {
            "d": field.lattice.d,
            "cutoff": field.lattice.cutoff,
            "coeffs": [float(v) for v in flat],
        },
        sort_keys=True,
    )


def field_from_json(text: str) -> SpectralField:
    payload = json.loads(text)
    lattice = FrequencyLattice(int(payload["d"]), int(payload["cutoff"]))
    flat = np.asarray(payload["coeffs"], dtype=float)
    if flat.size != 2 * lattice.size:
        raise ValueError("snapshot length does not match lattice size")
    coeffs = flat[0::2] + 1j * flat[1::2]
    return SpectralField(lattice, coeffs.reshape(lattice.shape))
