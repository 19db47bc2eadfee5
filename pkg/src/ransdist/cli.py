"""Command-line front door: sample, profile, verify, asympt.

Every run is deterministic given its flags and seed; reports embed the
producing configuration (as a JSON comment line in CSV files, as a
``config`` key in JSON files).  The report-producing commands render
matplotlib figures next to the delimited output.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import asympt, gfs, graph, trees, verify

DEFAULT_MC_ORDERS = (1000, 4000, 10000)
DEFAULT_PROFILE_ORDERS = tuple(range(1000, 1401, 100))


@dataclass
class RunConfig:
    command: str
    orders: tuple[int, ...] = ()
    samples: int = 0
    seed: int = 0
    trunc: int = 0
    out: str = ""
    format: str = "csv"
    cap: int = trees.DEFAULT_ENUMERATION_CAP
    tolerances: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _parse_orders(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            pieces = [int(x) for x in part.split(":")]
            start, stop = pieces[0], pieces[1]
            step = pieces[2] if len(pieces) > 2 else 1
            out.extend(range(start, stop + 1, step))
        elif part:
            out.append(int(part))
    if not out or any(n < 0 for n in out):
        raise argparse.ArgumentTypeError(f"bad order list: {text!r}")
    return tuple(out)


def _parse_tolerance(pairs: list[str]) -> dict[str, float]:
    out = {}
    for pair in pairs or ():
        key, _, value = pair.partition("=")
        if not value:
            raise argparse.ArgumentTypeError(f"--tolerance wants KEY=VAL, got {pair!r}")
        out[key] = float(value)
    return out


def _write_csv(path: Path, config: RunConfig, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {config.to_json()}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, config: RunConfig, payload: dict) -> None:
    payload = {"config": json.loads(config.to_json()), **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- sample -------------------------------------------------------------------


def cmd_sample(config: RunConfig, strategy: str) -> int:
    rng = random.Random(config.seed)
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for _ in range(config.samples):
        tree = trees.sample_tree(config.orders[0], rng, strategy=strategy)
        if config.format == "json":
            lines.append(graph.build_rans(tree).to_json())
        else:
            lines.append(trees.encode_tree(tree))
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {config.samples} sampled structure(s) of order {config.orders[0]} to {out}")
    return 0


# -- profile ------------------------------------------------------------------


def _render_profile_figure(points, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter([p[0] for p in points], [p[1] for p in points], s=6, alpha=0.4)
    ax.set_xlabel(r"$i/\sqrt{n}$")
    ax.set_ylabel(r"$\sqrt{n}\,\cdot\,$proportion at distance $i$")
    ax.set_title("Distance profile from a corner vertex")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_profile(config: RunConfig) -> int:
    if any(n < 1 for n in config.orders):
        raise ValueError("profile needs orders >= 1 (the empty structure has no profile)")
    rng = random.Random(config.seed)
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    raw_rows = []
    norm_rows = []
    points = []
    for n in config.orders:
        for _ in range(config.samples):
            g = graph.build_rans(trees.sample_tree(n, rng, strategy="ballot"))
            prof = graph.distance_profile(g, 0)
            for i, c in enumerate(prof.counts):
                if i == 0:
                    continue
                raw_rows.append((n, "outermost", i, c))
                norm_rows.append((n, i, c / n, i / math.sqrt(n), c * math.sqrt(n) / n))
                points.append((i / math.sqrt(n), c * math.sqrt(n) / n))
    _write_csv(outdir / "profile.csv", config,
               ["order", "source_role", "distance", "count"], raw_rows)
    _write_csv(outdir / "profile_normalized.csv", config,
               ["order", "distance", "proportion", "scaled_distance", "scaled_proportion"],
               norm_rows)
    _render_profile_figure(points, outdir / "profile.png")
    print(f"wrote profile.csv, profile_normalized.csv, profile.png to {outdir}")
    return 0


# -- verify -------------------------------------------------------------------


def cmd_verify(config: RunConfig, corrupt: str | None) -> int:
    if config.orders[0] > config.cap:
        print(f"error: max order {config.orders[0]} exceeds enumeration cap {config.cap}",
              file=sys.stderr)
        return 2
    checks = verify.verify_identities(config.orders[0], corrupt=corrupt, cap=config.cap)
    report = verify.render_report(checks)
    print(report)

    eq_prefix = graph.equidistant_census(max(config.orders[0], 8), cap=max(config.cap, 8))
    resolution = gfs.equidistant_series(max(config.orders[0], 8), eq_prefix)
    print(f"equidistant series source: {resolution.source}")
    for label, prefix in sorted(resolution.candidates.items()):
        mark = "matched" if label == resolution.matched_label else "rejected"
        print(f"  closed-form reading {label}: {mark}; prefix {prefix}")

    if config.out:
        out = Path(config.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if config.format == "json":
            _write_json(out, config, {
                "identities": [
                    {"name": c.name, "description": c.description, "ok": c.ok,
                     "max_order": c.max_order,
                     "first_mismatch": list(c.first_mismatch) if c.first_mismatch else None}
                    for c in checks
                ],
                "equidistant_source": resolution.source,
            })
        else:
            _write_csv(out, config, ["identity", "max_order", "status", "first_mismatch"],
                       [(c.name, c.max_order, "pass" if c.ok else "fail",
                         "" if c.first_mismatch is None else repr(c.first_mismatch))
                        for c in checks])
    return 0 if verify.all_passed(checks) else 1


# -- asympt -------------------------------------------------------------------


def _coefficient_observations(trunc: int, eq_prefix) -> dict[str, list[tuple[int, Fraction]]]:
    """Exact observation streams for every coefficient law."""
    t = gfs.tree_count_series(trunc + 1)
    s1 = gfs.corner_distance_sum_series(1, trunc)
    intra = gfs.intra_distance_series(trunc).intra
    inter = gfs.inter_distance_bound_series(trunc).inter_lower
    fed = gfs.frontier_edge_series(trunc, eq_prefix).fedge
    equi = gfs.equidistant_series(trunc, eq_prefix).series
    ns = [n for n in sorted({*range(10, trunc + 1, max(1, trunc // 40)), trunc}) if n >= 10]
    obs: dict[str, list[tuple[int, Fraction]]] = {
        "tree_count": [(n, t.coeff(n)) for n in ns],
        "tree_count_derivative": [(n, (n + 1) * t.coeff(n + 1)) for n in ns],
        "mean_distance_from_corner": [(n, s1.coeff(n) / (n * t.coeff(n))) for n in ns],
        "intra_total_per_structure": [(n, intra.coeff(n) / t.coeff(n)) for n in ns],
        "inter_total_per_structure": [(n, inter.coeff(n) / t.coeff(n)) for n in ns],
        "fedge_total_per_structure": [(n, fed.coeff(n) / t.coeff(n)) for n in ns],
        "equidistant_per_structure": [(n, equi.coeff(n) / t.coeff(n)) for n in ns],
    }
    return obs


def _render_convergence_figure(reports, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for rep in reports:
        ax.plot([r.n for r in rep.rows], [r.ratio for r in rep.rows],
                marker="o", ms=3, lw=1, label=rep.law_id)
    ax.axhline(1.0, color="black", lw=0.8, ls="--")
    ax.set_xlabel("order n")
    ax.set_ylabel("observed / predicted")
    ax.set_title("Convergence of exact coefficients to the stated laws")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_asympt(config: RunConfig, skip_montecarlo: bool) -> int:
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    band = config.tolerances.get("convergence", 0.05)
    eq_prefix = graph.equidistant_census(8)

    reports = []
    obs = _coefficient_observations(config.trunc, eq_prefix)
    for law_id, rows in obs.items():
        reports.append(asympt.convergence_report(asympt.law_by_id(law_id), rows, band=band))

    csv_rows = []
    for rep in reports:
        csv_rows.extend(rep.csv_rows())
    _write_csv(outdir / "asympt_convergence.csv", config,
               ["law_id", "n", "observed", "predicted", "ratio"], csv_rows)
    _render_convergence_figure(reports, outdir / "asympt_convergence.png")

    # pole amplitude of the corner-distance sums near the singularity
    eps = Fraction(1, 1000)
    pole_trunc = max(config.trunc, 2400)
    pole = {}
    for k in (1, 2, 3):
        s = gfs.corner_distance_sum_series(k, pole_trunc)
        value = float(asympt.pole_amplitude(s, eps))
        pole[f"corner_sum_{k}"] = {"value": value, "target": 3 / 44,
                                   "ratio": value / (3 / 44)}

    # degree tail from exact coefficients at order 60
    _, dg = gfs.degree_marked_series(60)
    hist = {k[0]: v for k, v in dg.coeffs[60].items()}
    tail = asympt.degree_tail_check(hist)

    summary: dict = {
        "convergence": {
            rep.law_id: {
                "final_ratio": rep.final_ratio,
                "converged": rep.converged,
                "drifting_toward_one": rep.drifting_toward_one,
                "stated_amplitude": asympt.law_by_id(rep.law_id).amplitude(),
                # the constant the coefficients actually point at, in the
                # law's own units (equals stated_amplitude when converged)
                "apparent_amplitude": rep.final_ratio
                * asympt.law_by_id(rep.law_id).amplitude(),
            }
            for rep in reports
        },
        "equidistant_series_source": gfs.equidistant_series(8, eq_prefix).source,
        "pole_amplitude": pole,
        "degree_tail": {"r_hat": tail.r_hat, "target": tail.target,
                        "rel_err": tail.rel_err, "within_10pct": tail.within,
                        "k_range": [tail.k_lo, tail.k_hi]},
    }

    ok = tail.within and all(abs(p["ratio"] - 1) <= 0.10 for p in pole.values())

    if not skip_montecarlo:
        mc_tol = config.tolerances.get("mean_pairwise", 0.15)
        samples = graph.sample_mean_distances(config.orders, config.samples, config.seed)
        verdict = asympt.resolve_mean_constant(samples, tolerance=mc_tol,
                                               min_samples=min(config.samples, 30))
        _write_csv(outdir / "asympt_mean_distance.csv", config,
                   ["order", "sample_index", "mean_distance"],
                   [(n, i, m) for n, ms in sorted(samples.items()) for i, m in enumerate(ms)])
        summary["mean_pairwise"] = {
            "c_hat": verdict.c_hat,
            "per_order_means": verdict.per_order_means,
            "candidates": {k: {"value": v[0], "rel_err": v[1], "matched": v[2]}
                           for k, v in verdict.candidates.items()},
            "chosen": verdict.chosen,
            "summary": verdict.summary(),
        }
        print(verdict.summary())
        ok = ok and verdict.chosen is not None

    _write_json(outdir / "asympt_summary.json", config, summary)
    for rep in reports:
        flag = "ok" if rep.converged else "drifting" if rep.drifting_toward_one else "OFF"
        print(f"{rep.law_id}: final ratio {rep.final_ratio:.4f} [{flag}]")
    print(f"degree tail: r_hat {tail.r_hat:.5f} vs 8/9 ({tail.rel_err:+.2%})")
    for name, p in pole.items():
        print(f"pole amplitude {name}: ratio {p['ratio']:.4f}")
    print(f"wrote asympt_convergence.csv/.png, asympt_summary.json to {outdir}")
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ransdist",
        description="Distance statistics of random Apollonian network structures: "
                    "sampling, brute-force verification, exact series, asymptotics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample structures to a file")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=("auto", "counts", "ballot"), default="auto")
    p.add_argument("--format", choices=("words", "json"), default="words")
    p.add_argument("--out", required=True)

    p = sub.add_parser("profile", help="distance profiles of sampled structures")
    p.add_argument("--orders", type=_parse_orders,
                   default=DEFAULT_PROFILE_ORDERS,
                   help="comma list and start:stop[:step] ranges (default 1000:1400:100)")
    p.add_argument("--samples", type=int, default=10, help="samples per order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("verify", help="oracle-vs-series identities, exact")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--cap", type=int, default=trees.DEFAULT_ENUMERATION_CAP,
                   help="enumeration cap")
    p.add_argument("--out", default="")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--corrupt", default=None, metavar="IDENTITY",
                   help="test hook: corrupt one identity's series side")

    p = sub.add_parser("asympt", help="convergence tables and verdict report")
    p.add_argument("--trunc", type=int, default=400)
    p.add_argument("--orders", type=_parse_orders, default=DEFAULT_MC_ORDERS,
                   help="Monte Carlo orders")
    p.add_argument("--samples", type=int, default=30, help="sampled structures per order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-montecarlo", action="store_true")
    p.add_argument("--tolerance", action="append", default=[], metavar="KEY=VAL",
                   help="override a tolerance (convergence, mean_pairwise)")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            config = RunConfig("sample", (args.order,), args.samples, args.seed,
                               0, args.out, args.format)
            return cmd_sample(config, args.strategy)
        if args.command == "profile":
            config = RunConfig("profile", args.orders, args.samples, args.seed,
                               0, args.out)
            return cmd_profile(config)
        if args.command == "verify":
            config = RunConfig("verify", (args.max_order,), 0, 0, args.max_order,
                               args.out, args.format, cap=args.cap)
            return cmd_verify(config, args.corrupt)
        if args.command == "asympt":
            config = RunConfig("asympt", args.orders, args.samples, args.seed,
                               args.trunc, args.out,
                               tolerances=_parse_tolerance(args.tolerance))
            return cmd_asympt(config, args.skip_montecarlo)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))  # exits with status 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
