"""Oracle-equivalence driver: every series against the brute-force census.

The master property of the package: for each counting series with a
combinatorial meaning, the coefficients at orders 0..max_order must equal
the totals obtained by exhaustively enumerating every structure and
measuring it with breadth-first search.  Zero tolerance; any mismatch is
reported with the first offending order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import gfs, graph


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    description: str
    max_order: int
    ok: bool
    first_mismatch: tuple | None = None  # (where, series_value, census_value)

    def verdict_line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        line = f"{status}  {self.name} (orders 0..{self.max_order}): {self.description}"
        if self.first_mismatch is not None:
            where, got, want = self.first_mismatch
            line += f" — first mismatch at {where}: series {got} vs census {want}"
        return line


def _compare_prefix(name: str, description: str, max_order: int, series_values: Sequence,
                    census_values: Sequence, corrupt: bool) -> IdentityCheck:
    series_values = list(series_values)
    if corrupt:
        series_values[-1] += 1
    for n, (got, want) in enumerate(zip(series_values, census_values)):
        if Fraction(got) != Fraction(want):
            return IdentityCheck(name, description, max_order, False, (n, got, want))
    return IdentityCheck(name, description, max_order, True)


def verify_identities(max_order: int = 6, corrupt: str | None = None,
                      cap: int = 16) -> list[IdentityCheck]:
    """Run every oracle-vs-series identity up to ``max_order``.

    ``corrupt`` names one identity whose series side gets its last value
    bumped by one; it exists so the failure path stays exercised.
    """
    cen = graph.exhaustive_census(max_order, cap=cap)
    eq_prefix = graph.equidistant_census(max(max_order, 8), cap=cap)
    N = max_order
    orders = range(max_order + 1)
    checks: list[IdentityCheck] = []

    def add(name: str, description: str, series_values: Sequence, census_values: Sequence,
            upto: int = max_order):
        checks.append(_compare_prefix(name, description, upto, series_values,
                                      census_values, corrupt == name))

    t = gfs.tree_count_series(N)
    add("tree_count", "structures per order",
        t.int_prefix(N + 1), [cen.tree_count[n] for n in orders])

    for i in (1, 2, 3):
        d = gfs.distance_count_series(i, N)
        add(f"dist_count_{i}", f"vertices at distance {i} from corner 0",
            d.int_prefix(N + 1), [cen.dist_counts[i].get(n, 0) for n in orders])

    for k in (1, 2, 3):
        s = gfs.corner_distance_sum_series(k, N)
        add(f"corner_sum_{k}", f"cumulated distance to {k} corner(s)",
            s.int_prefix(N + 1), [cen.corner_sums[k][n] for n in orders])

    e = gfs.equidistant_series(N, eq_prefix).series
    add("equidistant", "vertices equidistant from two corners",
        e.int_prefix(N + 1), [cen.equidistant[n] for n in orders])

    add("intra_total", "intra-pair total distance",
        gfs.intra_distance_series(N).intra.int_prefix(N + 1),
        [cen.intra[n] for n in orders])

    add("inter_lower_bound", "inter-pair frontier lower bound",
        gfs.inter_distance_bound_series(N).inter_lower.int_prefix(N + 1),
        [cen.inter_lower_bound[n] for n in orders])

    add("fedge_count", "frontier-edge pairs",
        gfs.frontier_edge_series(N, eq_prefix).fedge.int_prefix(N + 1),
        [cen.fedge[n] for n in orders])

    add("grand_total", "total distance over all admissible pairs",
        gfs.total_distance_series(N, eq_prefix).int_prefix(N + 1),
        [cen.grand[n] for n in orders])

    # centre-degree histogram, flattened to sorted (n, k, count) triples
    _, dg = gfs.degree_marked_series(N)
    series_hist = []
    census_hist = []
    for n in orders:
        row = {k[0]: v for k, v in dg.coeffs[n].items()}
        keys = sorted(set(row) | set(cen.center_degree[n]))
        series_hist.extend(row.get(k, 0) for k in keys)
        census_hist.extend(cen.center_degree[n].get(k, 0) for k in keys)
    add("center_degree", "centre-degree histogram",
        series_hist, census_hist)

    # joint distance profile (k1,k2,k3) via the three-variable marked series
    td = gfs.distance_marked_series(3, min(N, gfs.MARKED_DISTANCE_CAP))
    series_prof = []
    census_prof = []
    for n in range(min(N, td.trunc) + 1):
        row = dict(td.coeffs[n])
        want = cen.profile_triples[n]
        keys = sorted(set(row) | set(want))
        series_prof.extend(row.get(k, 0) for k in keys)
        census_prof.extend(want.get(k, 0) for k in keys)
    add("distance_profile_marked", "joint (distance 1,2,3) profile counts",
        series_prof, census_prof, upto=min(N, td.trunc))

    # corner-distance sum triples via the substitution-and-rotate series
    trip = gfs.corner_sum_triple_series(min(N, gfs.TRIPLE_SERIES_CAP))
    series_trip = []
    census_trip = []
    for n in range(trip.trunc + 1):
        row = dict(trip.coeffs[n])
        want = cen.corner_sum_triples[n]
        keys = sorted(set(row) | set(want))
        series_trip.extend(row.get(k, 0) for k in keys)
        census_trip.extend(want.get(k, 0) for k in keys)
    add("corner_sum_triples", "joint corner-distance-sum counts",
        series_trip, census_trip, upto=trip.trunc)

    return checks


def render_report(checks: Sequence[IdentityCheck]) -> str:
    lines = [c.verdict_line() for c in checks]
    failed = sum(not c.ok for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} identities passed")
    return "\n".join(lines)


def all_passed(checks: Sequence[IdentityCheck]) -> bool:
    return all(c.ok for c in checks)
