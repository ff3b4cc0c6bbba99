"""Adversarial indicator-box initial data and the smooth background pair.

The adversarial family places boxes ``Q_A = [-A/8, A/8]^d`` around carrier
frequencies ``+-N e1`` (and ``+-2N e1``), with a flat amplitude R on the
lattice points inside, zero velocity component.  Two carrier-set variants
exist:

* ``four_point``: always the four carriers ``{-2N, -N, N, 2N} e1``,
* ``parity``: ``{+-N e1}`` for even nonlinearity power k, the four-point
  set for odd k.

Boxes must stay well separated (``A <= N/8``) so the union is disjoint.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .spectral import (
    FieldPair,
    FrequencyLattice,
    SpectralField,
    fl_norm,
    hs_norm,
    pair_fl1_norm,
    pair_sobolev_norm,
)

VARIANTS = ("four_point", "parity")


def _e1(value: int, d: int) -> tuple[int, ...]:
    return (value,) + (0,) * (d - 1)


def build_sigma(k: int, N: int, variant: str, d: int) -> tuple[tuple[int, ...], ...]:
    """Carrier frequency set for the given variant, sorted."""
    if N < 1:
        raise ValueError(f"carrier frequency N must be >= 1, got {N}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant == "parity" and k % 2 == 0:
        values = (-N, N)
    else:
        values = (-2 * N, -N, N, 2 * N)
    return tuple(sorted(_e1(v, d) for v in values))


def box_points(A: float, d: int) -> tuple[tuple[int, ...], ...]:
    """Integer lattice points of the centered box Q_A = [-A/8, A/8]^d."""
    m = math.floor(A / 8.0)
    axis = range(-m, m + 1)
    return tuple(itertools.product(axis, repeat=d))


@dataclass(frozen=True)
class BoxSpec:
    """Geometry of one adversarial datum: carriers plus box width."""

    N: int
    A: float
    variant: str
    k: int
    d: int

    def __post_init__(self):
        if self.A < 1:
            raise ValueError(f"box width A must be >= 1, got {self.A}")
        # carriers are spaced N apart and each box has radius A/8, so A <= 2N
        # keeps the union disjoint with a gap of at least N/2
        if self.A > 2 * self.N:
            raise ValueError(
                f"A = {self.A} makes the translated boxes overlap (need A <= 2N = {2 * self.N})"
            )
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.k < 2:
            raise ValueError(f"nonlinearity power k must be >= 2, got {self.k}")

    @property
    def well_separated(self) -> bool:
        """Strong separation A <= N/8 assumed by the short-time analysis."""
        return self.A <= self.N / 8.0

    @property
    def sigma(self) -> tuple[tuple[int, ...], ...]:
        return build_sigma(self.k, self.N, self.variant, self.d)

    def support(self) -> tuple[tuple[int, ...], ...]:
        """All lattice points of the disjoint union of translated boxes."""
        points = []
        for eta in self.sigma:
            for q in box_points(self.A, self.d):
                points.append(tuple(e + c for e, c in zip(eta, q)))
        return tuple(sorted(points))

    @property
    def max_frequency(self) -> int:
        return 2 * self.N + math.floor(self.A / 8.0) if len(self.sigma) == 4 else self.N + math.floor(self.A / 8.0)


@dataclass(frozen=True)
class AdversarialData:
    """Indicator-box data: position coefficients ``R`` on the support, zero velocity."""

    spec: BoxSpec
    R: float
    pair: FieldPair
    support: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def lattice(self) -> FrequencyLattice:
        return self.pair.lattice

    @property
    def support_count(self) -> int:
        return len(self.support)

    def fl01_norm(self) -> float:
        return fl_norm(self.pair.u0, 0.0, 1.0)

    def hs_pair_norm(self, s: float) -> float:
        return pair_sobolev_norm(self.pair, s)


def build_adversarial(spec: BoxSpec, R: float, lattice: FrequencyLattice) -> AdversarialData:
    if lattice.d != spec.d:
        raise ValueError("lattice dimension does not match the box spec")
    if R < 0:
        raise ValueError(f"amplitude R must be >= 0, got {R}")
    needed = spec.max_frequency
    if lattice.cutoff < needed:
        raise ConfigurationError(
            f"lattice cutoff {lattice.cutoff} too small for support reaching |xi| = {needed}"
        )
    support = spec.support()
    u0 = np.zeros(lattice.shape, dtype=np.complex128)
    for xi in support:
        u0[lattice.index(xi)] = R
    pair = FieldPair(SpectralField(lattice, u0, copy=False), SpectralField.zeros(lattice))
    return AdversarialData(spec=spec, R=float(R), pair=pair, support=support)


def perturbation_distance(data: AdversarialData, s: float) -> tuple[float, float]:
    """Exact product-Sobolev size of the datum and its predicted scale.

    The prediction is ``R N^s A^{d/2}``; the ratio exact/predicted stays
    within a fixed bracket as N grows (measured, not proven here).
    Requires s < 0: the family is designed to be small in negative norms.
    """
    if s >= 0:
        raise ValueError(f"perturbation distance is measured at s < 0, got s = {s}")
    exact = data.hs_pair_norm(s)
    spec = data.spec
    predicted = data.R * spec.N ** s * spec.A ** (spec.d / 2.0)
    return exact, predicted


def zero_sum_tuple_count(sigma, k: int) -> int:
    """Number of k-tuples of carriers summing to zero.

    Diagnostic for whether a carrier set can feed energy to the lowest
    frequencies through the degree-k product.
    """
    count = 0
    for combo in itertools.product(sigma, repeat=k):
        total = tuple(sum(c[i] for c in combo) for i in range(len(combo[0])))
        if all(v == 0 for v in total):
            count += 1
    return count


_BACKGROUND_BAND = 4


def background_data(seed: int, lattice: FrequencyLattice, amplitude: float = 1.0) -> FieldPair:
    """Deterministic band-limited real pair with both pair norms in [1/2, 2].

    The raw draw (scaled by ``amplitude``) is rescaled by the geometric
    mean of its product-Sobolev and Wiener norms, so the result does not
    depend on ``amplitude``; the argument only guards against a degenerate
    zero request.
    """
    if amplitude <= 0:
        raise ValueError("amplitude must be positive: the pair is normalized to unit size")
    band = min(_BACKGROUND_BAND, lattice.cutoff)
    for attempt in range(16):
        rng = np.random.default_rng(seed + 1_000_003 * attempt)
        components = []
        for _ in range(2):
            coeffs = np.zeros(lattice.shape, dtype=np.complex128)
            for xi in itertools.product(range(-band, band + 1), repeat=lattice.d):
                if any(c > 0 for c in xi) or (all(c == 0 for c in xi)):
                    mag = amplitude * rng.uniform(0.5, 1.0)
                    phase = rng.uniform(0.0, 2.0 * math.pi)
                    value = mag * complex(math.cos(phase), math.sin(phase))
                    if all(c == 0 for c in xi):
                        value = complex(value.real, 0.0)
                    coeffs[lattice.index(xi)] = value
                    neg = tuple(-c for c in xi)
                    coeffs[lattice.index(neg)] = value.conjugate()
            components.append(SpectralField(lattice, coeffs, copy=False))
        pair = FieldPair(components[0], components[1])
        h = pair_sobolev_norm(pair, 0.0)
        f = pair_fl1_norm(pair)
        pair = pair.scaled(1.0 / math.sqrt(h * f))
        h = pair_sobolev_norm(pair, 0.0)
        f = pair_fl1_norm(pair)
        if 0.5 <= h <= 2.0 and 0.5 <= f <= 2.0:
            return pair
    raise RuntimeError("could not normalize background data into [1/2, 2]")
