"""Asymptotic laws and convergence measurement.

Each law is an amplitude A (kept symbolic as rational * sqrt(3)^a *
sqrt(pi)^b), an exponential growth (27/4)^n switched by ``rho_power``,
and a polynomial exponent alpha; evaluation happens only when a ratio is
formed, so no precision is lost to premature rounding.  Exact observed
values are rescaled by (4/27)^n as exact rationals before any float
conversion, which keeps ratios finite at orders where the raw counts
have thousands of digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .series import PowerSeries

RHO = Fraction(4, 27)


class InsufficientSamplesError(ValueError):
    """Monte Carlo resolution asked with fewer samples than required."""


@dataclass(frozen=True)
class AsymptoticLaw:
    """A coefficient law observed ~ A * (27/4)^(rho_power*n) * n^alpha."""

    law_id: str
    quantity: str  # what the observed value is normalised against
    rational: Fraction
    sqrt3_power: int = 0
    sqrtpi_power: int = 0
    poly_exponent: Fraction = Fraction(0)
    rho_power: int = 0
    exclusive_group: str | None = None

    def amplitude(self) -> float:
        return (
            float(self.rational)
            * 3.0 ** (self.sqrt3_power / 2)
            * math.pi ** (self.sqrtpi_power / 2)
        )

    def amplitude_str(self, digits: int = 12) -> str:
        return f"{self.amplitude():.{digits}g}"

    def scaled_observed(self, n: int, observed) -> float:
        """Observed value with the exponential growth divided out, exactly."""
        scaled = Fraction(observed)
        if self.rho_power:
            scaled *= RHO ** (n * self.rho_power)
        return float(scaled)

    def scaled_predicted(self, n: int) -> float:
        return self.amplitude() * float(n) ** float(self.poly_exponent)

    def ratio(self, n: int, observed) -> float:
        return self.scaled_observed(n, observed) / self.scaled_predicted(n)


def law_catalog() -> list[AsymptoticLaw]:
    """Every coefficient law under test.

    The two mean-pairwise candidates are mutually exclusive readings of
    the same quantity (they differ by a factor of four); the Monte Carlo
    resolution decides between them rather than presuming either.
    """
    return [
        AsymptoticLaw("tree_count", "T_n", Fraction(1, 4), 1, -1, Fraction(-3, 2), 1),
        AsymptoticLaw("tree_count_derivative", "(n+1) T_{n+1}",
                      Fraction(27, 16), 1, -1, Fraction(-1, 2), 1),
        AsymptoticLaw("mean_distance_from_corner", "corner distance sum / (n T_n)",
                      Fraction(1, 11), 1, 1, Fraction(1, 2)),
        AsymptoticLaw("intra_total_per_structure", "intra total / T_n",
                      Fraction(1, 44), 0, 0, Fraction(2)),
        AsymptoticLaw("inter_total_per_structure", "inter lower bound / T_n",
                      Fraction(1, 11), 1, 1, Fraction(5, 2)),
        AsymptoticLaw("fedge_total_per_structure", "frontier-edge count / T_n",
                      Fraction(9, 242), 0, 1, Fraction(2)),
        AsymptoticLaw("equidistant_per_structure", "equidistant count / T_n",
                      Fraction(5, 11), 0, 0, Fraction(1)),
        AsymptoticLaw("mean_pairwise_low", "mean pairwise distance",
                      Fraction(1, 22), 1, 1, Fraction(1, 2),
                      exclusive_group="mean_pairwise"),
        AsymptoticLaw("mean_pairwise_high", "mean pairwise distance",
                      Fraction(2, 11), 1, 1, Fraction(1, 2),
                      exclusive_group="mean_pairwise"),
        AsymptoticLaw("degree_tail_beta", "successive degree-tail ratio",
                      Fraction(8, 9)),
    ]


def law_by_id(law_id: str) -> AsymptoticLaw:
    for law in law_catalog():
        if law.law_id == law_id:
            return law
    raise KeyError(law_id)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    observed: float  # growth-scaled
    predicted: float
    ratio: float


@dataclass(frozen=True)
class ConvergenceReport:
    law_id: str
    rows: tuple[ConvergenceRow, ...]
    band: float
    final_ratio: float
    converged: bool  # every ratio in the trailing window is within the band
    drifting_toward_one: bool

    def csv_rows(self) -> list[tuple]:
        return [(self.law_id, r.n, r.observed, r.predicted, r.ratio) for r in self.rows]


def convergence_report(law: AsymptoticLaw, observations: Iterable[tuple[int, object]],
                       band: float = 0.05) -> ConvergenceReport:
    """Ratio table for exact observations against a law.

    ``observations`` are (n, exact value) pairs at increasing n.  The
    report flags non-convergence when any ratio in the trailing window
    (top half of the n range) strays from 1 by more than ``band``, and
    summarises whether |ratio - 1| still shrinks across the table.
    """
    obs = sorted(observations)
    if not obs:
        raise ValueError("no observations supplied")
    rows = tuple(
        ConvergenceRow(n, law.scaled_observed(n, v), law.scaled_predicted(n),
                       law.ratio(n, v))
        for n, v in obs
    )
    n_max = rows[-1].n
    window = [r for r in rows if r.n * 2 >= n_max]
    converged = all(abs(r.ratio - 1) <= band for r in window)
    drifting = abs(rows[-1].ratio - 1) <= abs(rows[0].ratio - 1) + 1e-12
    return ConvergenceReport(law.law_id, rows, band, rows[-1].ratio, converged, drifting)


@dataclass(frozen=True)
class MeanConstantVerdict:
    c_hat: float
    per_order_means: dict[int, float]
    candidates: dict[str, tuple[float, float, bool]]  # id -> (value, rel_err, matched)
    chosen: str | None
    tolerance: float

    def summary(self) -> str:
        if self.chosen:
            value, err, _ = self.candidates[self.chosen]
            return (f"fitted sqrt(n) coefficient {self.c_hat:.5f} matches "
                    f"{self.chosen} = {value:.5f} (relative error {err:.1%})")
        errs = ", ".join(f"{k}: {v[1]:+.1%}" for k, v in self.candidates.items())
        return (f"fitted sqrt(n) coefficient {self.c_hat:.5f} matches neither "
                f"candidate within {self.tolerance:.0%} ({errs})")


def resolve_mean_constant(samples: dict[int, Sequence[float]],
                          tolerance: float = 0.15,
                          min_samples: int = 30) -> MeanConstantVerdict:
    """Fit mean pairwise distance = C * sqrt(n) and pick the candidate it matches.

    ``samples`` maps order n to per-instance mean distances.  The fit is
    least squares through the origin in sqrt(n); the verdict names the
    candidate within ``tolerance`` relative error, or none.  The two
    candidate bands cannot overlap (the constants differ by a factor of
    four), so at most one can match.
    """
    if not samples:
        raise InsufficientSamplesError("no sample orders supplied")
    for n, vals in samples.items():
        if len(vals) < min_samples:
            raise InsufficientSamplesError(
                f"order {n} has {len(vals)} samples; need at least {min_samples}"
            )
    num = den = 0.0
    per_order = {}
    for n, vals in sorted(samples.items()):
        x = math.sqrt(n)
        per_order[n] = sum(vals) / len(vals)
        for y in vals:
            num += x * y
            den += x * x
    c_hat = num / den
    candidates = {}
    matched = []
    for law in law_catalog():
        if law.exclusive_group != "mean_pairwise":
            continue
        value = law.amplitude()
        err = (c_hat - value) / value
        ok = abs(err) <= tolerance
        candidates[law.law_id] = (value, err, ok)
        if ok:
            matched.append(law.law_id)
    chosen = matched[0] if len(matched) == 1 else None
    return MeanConstantVerdict(c_hat, per_order, candidates, chosen, tolerance)


@dataclass(frozen=True)
class DegreeTailFit:
    r_hat: float
    target: float
    rel_err: float
    k_lo: int
    k_hi: int
    shrunk: bool
    per_k_ratios: tuple[tuple[int, float], ...]

    @property
    def within(self) -> bool:
        return abs(self.rel_err) <= 0.10


def degree_tail_check(histogram: dict[int, object], k_lo: int = 10,
                      k_hi: int = 40) -> DegreeTailFit:
    """Estimate the geometric decay of Pr(degree = k) * k^(3/2).

    ``histogram`` maps degree to a count or probability mass.  The
    estimate is the geometric mean of successive ratios over [k_lo, k_hi],
    i.e. (y(k_hi)/y(k_lo))^(1/(k_hi-k_lo)); empty bins shrink the range,
    which is reported.
    """
    total = sum(Fraction(v) for v in histogram.values())
    if total <= 0:
        raise ValueError("empty histogram")
    present = sorted(k for k, v in histogram.items() if Fraction(v) > 0)
    lo = min((k for k in present if k >= k_lo), default=None)
    hi = max((k for k in present if k <= k_hi), default=None)
    shrunk = lo != k_lo or hi != k_hi
    if lo is None or hi is None or hi <= lo:
        raise ValueError(f"no usable degree bins in [{k_lo}, {k_hi}]")
    missing = [k for k in range(lo, hi + 1) if Fraction(histogram.get(k, 0)) <= 0]
    if missing:
        hi = min(missing) - 1
        shrunk = True
        if hi <= lo:
            raise ValueError(f"degree bins too sparse in [{k_lo}, {k_hi}]")

    def y(k: int) -> float:
        return float(Fraction(histogram[k]) / total) * k ** 1.5

    per_k = tuple((k, y(k + 1) / y(k)) for k in range(lo, hi))
    r_hat = (y(hi) / y(lo)) ** (1.0 / (hi - lo))
    target = 8.0 / 9.0
    return DegreeTailFit(r_hat, target, (r_hat - target) / target, lo, hi, shrunk, per_k)


def pole_amplitude(series: PowerSeries, eps: Fraction, trunc: int | None = None) -> Fraction:
    """(1 - z/rho) * series evaluated at z = rho (1 - eps), exactly.

    For a simple pole at rho this approaches the residue amplitude as
    eps -> 0, provided the truncation covers the pole mass: the truncated
    tail scales like (1 - eps)^trunc, so trunc * eps should be at least
    about 2 for a trustworthy reading.
    """
    eps = Fraction(eps)
    s = series if trunc is None else series.cut(trunc)
    return eps * s.evaluate(RHO * (1 - eps))


def singular_point(eps: Fraction) -> Fraction:
    return RHO * (1 - Fraction(eps))
