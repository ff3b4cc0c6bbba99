"""Parameter planners for the inflation regimes.

Each planner decides exponents symbolically (exact rational arithmetic),
instantiates them at the caller's N, and records every one-sided
"much less than" requirement as a ledger entry (name, lhs, rhs).  A plan
is *feasible* when the exponent windows are nonempty — an exact statement
independent of N — while the ledger records how comfortably the concrete
instantiation satisfies each requirement (margin = rhs/lhs), so threshold
scans are sharp and desk-scale margins are auditable separately.

Three planners:

* ``plan_short_time``   — the short-horizon regime with its three parameter
  cases (power-law R, log-law R at the boundary regularity, and the
  near-critical case),
* ``plan_long_time``    — the long-horizon regime behind inflation with
  infinite loss of regularity (unit box width, power-law R, six
  requirements),
* ``plan_ck_failure``   — data of unit size whose first iterate grows like
  a positive power of N, breaking k-fold differentiability of the flow map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .config import DEFAULT, RunConfig
from .errors import RegimeError
from .estimates import g_s, thresholds


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**9)


@dataclass(frozen=True)
class LedgerEntry:
    """One dominance requirement evaluated at concrete parameters."""

    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        if self.lhs <= 0:
            return math.inf
        return self.rhs / self.lhs

    def passes(self, margin: float) -> bool:
        return self.lhs * margin <= self.rhs


@dataclass
class RegimePlan:
    planner: str
    inputs: dict
    case: str | None
    exponents: dict
    N: int
    R: float
    A: float
    T: float | None
    t_window: tuple[float, float] | None
    feasible: bool
    binding: str | None
    ledger: list[LedgerEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    predicted_exponent: float | None = None
    t_eval: float | None = None

    def ledger_passes(self, margin: float) -> bool:
        return self.feasible and all(entry.passes(margin) for entry in self.ledger)

    def worst_entry(self, margin: float) -> LedgerEntry | None:
        failing = [e for e in self.ledger if not e.passes(margin)]
        if not failing:
            return None
        return min(failing, key=lambda e: e.margin)

    def as_dict(self) -> dict:
        return {
            "planner": self.planner,
            "inputs": self.inputs,
            "case": self.case,
            "exponents": {k: str(v) for k, v in self.exponents.items()},
            "N": self.N,
            "R": self.R,
            "A": self.A,
            "T": self.T,
            "t_window": list(self.t_window) if self.t_window else None,
            "t_eval": self.t_eval,
            "feasible": self.feasible,
            "binding": self.binding,
            "predicted_exponent": self.predicted_exponent,
            "ledger": [
                {"name": e.name, "lhs": e.lhs, "rhs": e.rhs, "margin": e.margin}
                for e in self.ledger
            ],
            "notes": self.notes,
        }


@dataclass(frozen=True)
class LedgerReport:
    margin: float
    passed: bool
    entries: list
    binding: str | None


def check_ledger(plan: RegimePlan, margin: float) -> LedgerReport:
    """Evaluate every ledger entry at the requested safety margin."""
    entries = [
        {"name": e.name, "lhs": e.lhs, "rhs": e.rhs, "margin": e.margin, "pass": e.passes(margin)}
        for e in plan.ledger
    ]
    worst = plan.worst_entry(margin)
    return LedgerReport(
        margin=margin,
        passed=plan.feasible and all(row["pass"] for row in entries),
        entries=entries,
        binding=None if worst is None else worst.name,
    )


# ---------------------------------------------------------------------------
# short-horizon planner
# ---------------------------------------------------------------------------

def plan_short_time(
    d: int,
    k: int,
    s,
    n: int,
    N: int,
    config: RunConfig = DEFAULT,
) -> RegimePlan:
    """Choose (R, A, T) for the short-horizon inflation regime.

    Covered inputs: either ``-d/2 < s < min(s_scal, 0)`` with ``k > 1 + 2/d``,
    or ``s <= -d/2`` with ``k >= 5``.  Outside that set the planner refuses
    and points at the long-horizon planner.
    """
    s = _frac(s)
    if n < 1 or N < 2:
        raise ValueError("need n >= 1 and N >= 2")
    th = thresholds(d, k)
    half_d = Fraction(-d, 2)
    near_critical = half_d < s < min(th.s_scal, Fraction(0)) and Fraction(k) > 1 + Fraction(2, d)
    deep = s <= half_d and k >= 5
    if not (near_critical or deep):
        raise RegimeError(
            f"(d={d}, k={k}, s={s}) not covered by the short-horizon cases; "
            "try the long-horizon planner (plan_long_time)"
        )
    logN = math.log(N)
    inputs = {"d": d, "k": k, "s": float(s), "n": n, "N": N}
    exponents: dict = {}
    notes: list[str] = []

    if deep and s < half_d:
        case = "power-law"
        delta_hi = min(Fraction(2), Fraction(-4, 3) * (Fraction(1, 2) + s))
        delta = delta_hi / 2
        exponents["delta"] = delta
        exponents["rho"] = delta
        alpha = Fraction(1, d) * (1 - delta / 2)
        exponents["alpha"] = alpha
        R = float(N) ** float(delta)
        A = float(N) ** float(alpha)
        lo_exp = -Fraction(k - 1, 2) - Fraction(k + 1, 4) * delta
        hi_exp = min(Fraction(-1), -Fraction(k - 1, 2) - Fraction(k - 1, 4) * delta)
        exponents["tau_window"] = (lo_exp, hi_exp)
        t_lo = float(N) ** float(lo_exp)
        t_hi = float(N) ** float(hi_exp)
        feasible = delta_hi > 0
    elif deep:
        case = "log-law"
        delta = Fraction(1, 32 * (k - 1))  # midpoint of (0, 1/(16(k-1)))
        exponents["delta"] = delta
        R = logN ** float(delta)
        A = float(N) ** (1.0 / d) * logN ** (-1.0 / (8 * (k - 1) * d))
        t_lo = float(N) ** (-(k - 1) / 2.0) * logN ** (-k * float(delta) / 2.0 - 3.0 / 16.0)
        t_hi = min(
            1.0 / N,
            float(N) ** (-(k - 1) / 2.0) * logN ** (-(k - 1) * float(delta) / 2.0 + 1.0 / 16.0),
        )
        feasible = True
        notes.append("log-form constraints instantiated numerically; ledger shows raw values")
    else:
        case = "near-critical"
        denom = s + Fraction(d, 2) * (k - 1)
        theta_lo = max((k * s + 2) / denom, Fraction(0))
        theta_hi = min(Fraction(k), Fraction(1))
        feasible = theta_lo < theta_hi
        theta = (theta_lo + theta_hi) / 2
        exponents["theta"] = theta
        exponents["theta_window"] = (theta_lo, theta_hi)
        A = float(N) ** float(theta)
        R = float(N) ** float(-s) * A ** (-d / 2.0) / logN
        t_lo = (
            float(N) ** float(k * s / 2 - denom * theta / 2) * logN ** (k / 2.0)
        )
        t_hi = min(
            1.0 / N,
            float(N) ** float(s * Fraction(k - 1, 2) - Fraction(d * (k - 1), 4) * theta)
            * logN ** ((k - 1) / 2.0),
        )

    T = math.sqrt(t_lo * t_hi) if t_lo < t_hi else t_lo
    Ad = A ** d
    gsA = g_s(float(s), d, A)
    ledger = [
        LedgerEntry("(i-a) horizon below 1/N", T, 1.0 / N),
        LedgerEntry("(i-b) horizon in the series window", T, (R * Ad) ** (-(k - 1) / 2.0)),
        LedgerEntry("(ii-a) box width at least one", 1.0, A),
        LedgerEntry("(ii-b) box width well below N", A, float(N)),
        LedgerEntry("(iii-a) amplitude beats the box mass", 1.0, R * gsA),
        LedgerEntry("(iii-b) Wiener size of the datum large", 1.0, R * Ad),
        LedgerEntry("(iv) datum small in H^s", R * float(N) ** float(s) * A ** (d / 2.0), 1.0 / n),
        LedgerEntry("(v) first-iterate growth beats n", float(n), T * T * R ** k * Ad ** (k - 1) * gsA),
    ]
    return RegimePlan(
        planner="short_time",
        inputs=inputs,
        case=case,
        exponents=exponents,
        N=N,
        R=R,
        A=A,
        T=T,
        t_window=(t_lo, t_hi),
        feasible=bool(feasible),
        binding=None,
        ledger=ledger,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# long-horizon planner
# ---------------------------------------------------------------------------

def _long_time_windows(k: int, rho: Fraction) -> tuple[Fraction, Fraction]:
    """Exponent window of the horizon T = N^tau for given R = N^rho (n, margins aside)."""
    lo = max(-k * rho + 1, Fraction(-1))
    hi = min(
        -(k - 1) * rho + 1,
        Fraction(k, 3) * rho - Fraction(1, 3),
        -Fraction(k * (k - 1), k + 1) * rho + Fraction(k - 1, k + 1),
        k * rho - 1,
        Fraction(0),
    )
    return lo, hi


def plan_long_time(
    d: int,
    k: int,
    s,
    sigma,
    n: int,
    N: int,
    config: RunConfig = DEFAULT,
) -> RegimePlan:
    """Choose (R, T) with unit box width for the long-horizon regime.

    The amplitude exponent rho must fit inside (1/k, min(2/(k-1), -s));
    that window is nonempty exactly when s < -1/k, which is why the
    regularity threshold of the inflation-with-loss result sits there.
    The horizon window then follows from the six dominance requirements.
    """
    s = _frac(s)
    sigma = _frac(sigma)
    if not 2 <= k <= 5:
        raise RegimeError(f"long-horizon planner requires 2 <= k <= 5, got k={k}")
    if not sigma <= s < 0:
        raise RegimeError(f"need sigma <= s < 0, got sigma={sigma}, s={s}")
    if n < 1 or N < 2:
        raise ValueError("need n >= 1 and N >= 2")
    inputs = {"d": d, "k": k, "s": float(s), "sigma": float(sigma), "n": n, "N": N}
    rho_lo = Fraction(1, k)
    rho_hi = min(Fraction(2, k - 1), -s)
    feasible = rho_lo < rho_hi
    exponents = {"rho_window": (rho_lo, rho_hi)}
    notes = ["unit box width A = 1 throughout this regime"]
    if not feasible:
        binding = (
            "(i) smallness of the datum (rho < -s) conflicts with the series window "
            "N^{1/k} << R: requires s < -1/k"
        )
        return RegimePlan(
            planner="long_time",
            inputs=inputs,
            case=None,
            exponents=exponents,
            N=N,
            R=float("nan"),
            A=1.0,
            T=None,
            t_window=None,
            feasible=False,
            binding=binding,
            ledger=[],
            notes=notes,
        )
    rho = (rho_lo + rho_hi) / 2
    exponents["rho"] = rho
    R = float(N) ** float(rho)
    t_lo = max(R ** (-k) * N * n, 1.0 / N)
    t_hi = min(
        R ** (-(k - 1)) * N,
        R ** (k / 3.0) * float(N) ** (-1.0 / 3.0),
        R ** (-k * (k - 1) / (k + 1.0)) * float(N) ** ((k - 1) / (k + 1.0)),
        R ** k / N,
        1.0,
    )
    T = math.sqrt(t_lo * t_hi) if t_lo < t_hi else t_lo
    ledger = [
        LedgerEntry("(i) datum small in H^s", R * float(N) ** float(s), 1.0 / n),
        LedgerEntry("(ii) first-iterate growth beats n", R ** (-k) * N * n, T),
        LedgerEntry("(iii) first iterate beats level two", T, R ** (-(k - 1)) * N),
        LedgerEntry("(iv) first iterate beats the data tail", T, R ** (k / 3.0) * float(N) ** (-1.0 / 3.0)),
        LedgerEntry(
            "(v-a) series tail contracts",
            T,
            R ** (-k * (k - 1) / (k + 1.0)) * float(N) ** ((k - 1) / (k + 1.0)),
        ),
        LedgerEntry("(v-b) first iterate dominates its own error", T, R ** k / N),
        LedgerEntry("(vi-a) horizon above 1/N", 1.0 / N, T),
        LedgerEntry("(vi-b) horizon below one", T, 1.0),
    ]
    return RegimePlan(
        planner="long_time",
        inputs=inputs,
        case="power-law",
        exponents=exponents,
        N=N,
        R=R,
        A=1.0,
        T=T,
        t_window=(t_lo, t_hi),
        feasible=True,
        binding=None,
        ledger=ledger,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# k-fold differentiability failure planner
# ---------------------------------------------------------------------------

def plan_ck_failure(
    d: int,
    k: int,
    s,
    N: int,
    config: RunConfig = DEFAULT,
) -> RegimePlan:
    """Unit-size data whose first iterate grows like N^{-ks-1+(k/2-1)d}.

    Feasible exactly when that exponent is positive, i.e. s below the
    viscous threshold.  Box width is N/log N and the evaluation time
    1/log N, so the power law carries known logarithmic corrections.
    """
    s = _frac(s)
    if not 2 <= k <= 5:
        raise RegimeError(f"differentiability-failure planner requires 2 <= k <= 5, got k={k}")
    if N < 8:
        raise ValueError("need N >= 8")
    th = thresholds(d, k)
    growth = -k * s - 1 + (Fraction(k, 2) - 1) * d
    feasible = growth > 0
    logN = math.log(N)
    A = max(1.0, N / logN)
    t_eval = 1.0 / logN
    R = float(N) ** float(-s) * A ** (-d / 2.0)
    inputs = {"d": d, "k": k, "s": float(s), "N": N}
    ledger = [
        LedgerEntry("box width at least one", 1.0, A),
        LedgerEntry("box width well below N", A, float(N)),
        LedgerEntry("time above the box scale", 1.0 / A, t_eval),
        LedgerEntry("time at most order one", t_eval, 1.0),
        LedgerEntry("growth factor exceeds one", 1.0, float(N) ** float(growth)),
    ]
    notes = []
    if not feasible:
        notes.append(
            f"growth exponent {float(growth):.4f} <= 0 for s = {float(s)} >= s_vis = {float(th.s_vis)}"
        )
    return RegimePlan(
        planner="ck_failure",
        inputs=inputs,
        case=None,
        exponents={"growth": growth},
        N=N,
        R=R,
        A=A,
        T=None,
        t_window=None,
        feasible=bool(feasible),
        binding=None if feasible else "growth exponent positive requires s < s_vis",
        ledger=ledger,
        notes=notes,
        predicted_exponent=float(growth),
        t_eval=t_eval,
    )


def minimum_admissible_N(
    planner,
    *,
    margin: float,
    start: int = 16,
    cap: int = 1 << 26,
    extra_check=None,
) -> tuple[int, RegimePlan]:
    """Smallest dyadic N at which the plan's ledger passes with the margin.

    ``planner`` maps N to a RegimePlan; ``extra_check`` optionally vets the
    plan further (e.g. measured datum size).  Raises RegimeError if the cap
    is reached.
    """
    N = start
    while N <= cap:
        plan = planner(N)
        if plan.ledger_passes(margin) and (extra_check is None or extra_check(plan)):
            return N, plan
        N *= 2
    raise RegimeError(f"no admissible N up to {cap} at margin {margin}")
