"""Command-line interface.

Subcommands::

    infer          decide the direction of one pair file
    benchmark      run methods over a corpus and write JSON/CSV reports + figures
    generate       write a synthetic labeled corpus with a manifest
    curve          recompute decision-rate curves from an existing report
    verify-theory  Monte Carlo + quadrature checks of the variance-ratio identity

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import asymmetry, bench, plots, simulate
from .errors import DataError, NumericalError, ReciError
from .infer import Aggregation, InferenceConfig, reci_aggregate
from .pairs import load_dataset, load_pair
from .preprocess import ScalingKind
from .regress import SplitConfig, parse_model_spec


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors must exit 1
        raise UsageError(message)


def _parse_grid(text: str) -> list[float]:
    """Parse 'start:step:stop' or a comma-separated list of floats."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise UsageError("grid step must be > 0")
        values = []
        v = start
        while v <= stop + 1e-12:
            values.append(round(v, 10))
            v += step
        return values
    return [float(p) for p in text.split(",") if p.strip()]


def _scaling(text: str) -> ScalingKind:
    try:
        return ScalingKind(text)
    except ValueError:
        raise UsageError(f"scaling must be 'normalize' or 'standardize', got {text!r}")


def _preprocess_threshold(text: str) -> float | None:
    if text == "none":
        return None
    if text.startswith("kde"):
        return float(text[3:])
    raise UsageError(f"preprocess must be 'none' or 'kde<threshold>', got {text!r}")


def _aggregation(text: str) -> Aggregation:
    try:
        return Aggregation(text)
    except ValueError:
        raise UsageError(f"aggregation must be 'averaged-mse' or 'per-run', got {text!r}")


def build_parser() -> _Parser:
    parser = _Parser(prog="reci", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="decide the direction of one pair file")
    p.add_argument("pairfile")
    p.add_argument("--model", default="log", help="log | mon<N> | poly<K> | svr | nn<H>[-H2]")
    p.add_argument("--scaling", default="normalize")
    p.add_argument("--split", type=float, default=0.7, help="train fraction (0.3/0.5/0.7)")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--aggregation", default="averaged-mse")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="print the decision as JSON")

    p = sub.add_parser("benchmark", help="run methods over a corpus")
    p.add_argument("--corpus", required=True, help="directory of pair files")
    p.add_argument("--meta", default=None, help="meta file (id, column ranges, weight)")
    p.add_argument("--methods", default="reci:log", help="comma list, e.g. reci:log,igci:u-slope")
    p.add_argument("--preprocess", default="none", help="none | kde<threshold>")
    p.add_argument("--subsample", type=int, default=0, help="subsample pairs larger than N (0 = off)")
    p.add_argument("--scaling", default="normalize")
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--aggregation", default="averaged-mse")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rates", default="0.1:0.1:1.0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="report.json")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--figure-format", default="png", choices=("png", "svg"))

    p = sub.add_parser("generate", help="write a synthetic labeled corpus")
    p.add_argument("--kind", required=True, choices=simulate.KINDS)
    p.add_argument("--alpha-grid", default=None, help="start:step:stop or comma list")
    p.add_argument("--pairs", type=int, default=simulate.DEFAULT_PAIRS_PER_ALPHA)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("curve", help="decision-rate curves from an existing report")
    p.add_argument("--report", required=True)
    p.add_argument("--rates", default="0.1:0.1:1.0")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--figure", default=None, help="figure output path")

    p = sub.add_parser("verify-theory", help="variance-ratio identity checks")
    p.add_argument("--models", type=int, default=20)
    p.add_argument("--alphas", default="0.01,0.05,0.1")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", default="binning", choices=("binning", "knn"))
    p.add_argument("--noise", default="beta", choices=("beta", "uniform"))
    p.add_argument("--blend", type=float, default=0.05,
                   help="linear blend keeping the quadrature limit finite")
    p.add_argument("--out", default=None, help="JSON output path")
    p.add_argument("--csv", default=None, help="CSV output path")
    p.add_argument("--figure", default=None, help="figure output path")
    return parser


def _cmd_infer(args) -> int:
    pair = load_pair(args.pairfile)
    cfg = InferenceConfig(
        spec=parse_model_spec(args.model),
        scaling=_scaling(args.scaling),
        split=SplitConfig(args.split, args.seed),
        runs=args.runs,
        aggregation=_aggregation(args.aggregation),
        threshold=args.threshold,
    )
    decision = reci_aggregate(pair, cfg)
    if args.json:
        print(
            json.dumps(
                {
                    "pair": pair.id,
                    "direction": decision.direction.value if decision.direction else None,
                    "mse_y_given_x": decision.mse_y_given_x,
                    "mse_x_given_y": decision.mse_x_given_y,
                    "confidence": decision.confidence,
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        verdict = decision.direction.value if decision.direction else "no decision"
        print(f"{pair.id}: {verdict}")
        print(f"  mse y|x = {decision.mse_y_given_x:.6g}")
        print(f"  mse x|y = {decision.mse_x_given_y:.6g}")
        print(f"  confidence = {decision.confidence:.4f}")
    return 0


def _load_corpus(args) -> tuple[list, list[str], dict[str, float]]:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise DataError(f"corpus directory not found: {corpus}")
    alpha_by_id: dict[str, float] = {}
    if args.meta is not None:
        pairs, skipped = load_dataset(corpus, args.meta)
    elif (corpus / "manifest.json").is_file():
        pairs, manifest = simulate.load_manifest_corpus(corpus)
        skipped = []
        alpha_by_id = {e["id"]: float(e["alpha"]) for e in manifest["pairs"]}
    else:
        files = sorted(corpus.glob("*.txt"))
        if not files:
            raise DataError(f"no pair files in {corpus}")
        pairs = [load_pair(f) for f in files]
        skipped = []
        print(
            "note: no meta file or manifest; pairs are unlabeled, accuracy is undefined",
            file=sys.stderr,
        )
    return pairs, skipped, alpha_by_id


def _cmd_benchmark(args) -> int:
    pairs, skipped, alpha_by_id = _load_corpus(args)
    config = bench.BenchmarkConfig(
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        scaling=_scaling(args.scaling),
        train_fraction=args.split,
        runs=args.runs,
        aggregation=_aggregation(args.aggregation),
        threshold=args.threshold,
        preprocess_threshold=_preprocess_threshold(args.preprocess),
        subsample_to=args.subsample or None,
        master_seed=args.seed,
        rates=tuple(_parse_grid(args.rates)),
        workers=args.workers,
    )
    report = bench.run_benchmark(pairs, config, skipped)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json(), encoding="utf-8")
    csv_path = out.with_suffix(".csv")
    bench.write_records_csv(report, csv_path)
    written = [str(out), str(csv_path)]
    if not args.no_figures:
        if report.curves:
            fig = out.with_name(out.stem + "_decision_rate." + args.figure_format)
            plots.plot_decision_rate_curves(report.curves, fig)
            written.append(str(fig))
        if alpha_by_id:
            table = bench.accuracy_by_group(report.records, alpha_by_id)
            fig = out.with_name(out.stem + "_accuracy_vs_alpha." + args.figure_format)
            plots.plot_accuracy_by_alpha(table, fig)
            written.append(str(fig))
    for method, acc in sorted(report.accuracy_by_method.items()):
        print(f"{method}: accuracy {acc:.4f}")
    if skipped:
        print(f"skipped multivariate pairs: {', '.join(skipped)}")
    print("wrote " + ", ".join(written))
    return 0


def _cmd_generate(args) -> int:
    alphas = (
        _parse_grid(args.alpha_grid)
        if args.alpha_grid is not None
        else simulate.default_alpha_grid(args.kind)
    )
    manifest = simulate.generate_corpus(
        kind=args.kind,
        alphas=alphas,
        pairs_per_alpha=args.pairs,
        n_samples=args.samples,
        seed=args.seed,
        out_dir=args.out,
    )
    print(f"wrote {len(manifest['pairs'])} pairs to {args.out} (manifest.json included)")
    return 0


def _cmd_curve(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    records = [bench.record_from_dict(d) for d in data["records"]]
    rates = _parse_grid(args.rates)
    methods = sorted({r.method for r in records})
    curves = {
        m: bench.decision_rate_curve([r for r in records if r.method == m], rates)
        for m in methods
    }
    for method in methods:
        for rate, acc in curves[method]:
            print(f"{method} rate={rate:.2f} accuracy={acc:.4f}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "rate", "accuracy"])
            for method in methods:
                for rate, acc in curves[method]:
                    writer.writerow([method, rate, acc])
    if args.figure:
        plots.plot_decision_rate_curves(curves, args.figure)
    return 0


def _cmd_verify_theory(args) -> int:
    models = asymmetry.random_mixture_models(
        args.models, seed=args.seed, linear_blend=args.blend
    )
    noise = asymmetry.beta_noise() if args.noise == "beta" else asymmetry.uniform_noise()
    report = asymmetry.verify_theorem(
        models,
        alphas=_parse_grid(args.alphas),
        noise=noise,
        n_samples=args.samples,
        estimator=args.estimator,
        seed=args.seed,
    )
    for row in report.rows:
        limit = f"{row.limit:.4f}" if row.limit is not None else "n/a"
        print(
            f"{row.model} alpha={row.alpha:g} mc_ratio={row.mc_ratio:.4f} "
            f"limit={limit} cov={row.covariance:.2e}"
        )
    if report.violations:
        print("violations:")
        for v in report.violations:
            print(f"  {v}")
    else:
        print(f"no violations (ratio >= {1 - report.tol} at the smallest alpha)")
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["model", "alpha", "mc_ratio", "limit", "covariance", "weighted_integral"]
            )
            for row in report.rows:
                writer.writerow(
                    [row.model, row.alpha, row.mc_ratio,
                     "" if row.limit is None else row.limit,
                     row.covariance, row.weighted_integral]
                )
    if args.figure:
        plots.plot_variance_ratios(report.rows, args.figure)
    return 0


_COMMANDS = {
    "infer": _cmd_infer,
    "benchmark": _cmd_benchmark,
    "generate": _cmd_generate,
    "curve": _cmd_curve,
    "verify-theory": _cmd_verify_theory,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError,) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ReciError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
