"""Benchmark harness: run methods over a corpus, score, and report.

Method strings name what to run per pair: ``reci:<spec>`` (for example
``reci:log``, ``reci:mon2``, ``reci:poly3``) or ``igci:<u|g>-<slope|entropy>``.
Per-pair work is seeded from the master seed and the pair id, so re-running
with the same seed reproduces every decision bit for bit; wall-clock fields
are the only nondeterministic part of a report and can be excluded from its
canonical JSON form.

Weighted accuracy counts an absent decision as incorrect. The decision-rate
curve re-scores only the records with the highest confidence: at rate r, the
ceil(r * M) records with the largest confidence (ties broken by pair id) are
kept.
"""

from __future__ import annotations

import csv
import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ReciError, ZeroWeight
from .igci import IgciConfig, igci_decide
from .infer import Aggregation, InferenceConfig, reci_aggregate
from .pairs import CauseEffectPair, Decision, Direction
from .preprocess import BandwidthRule, ScalingKind, remove_low_density
from .pairs import subsample
from .regress import SplitConfig, parse_model_spec

DEFAULT_RATES = tuple(round(0.1 * i, 10) for i in range(1, 11))


@dataclass(frozen=True)
class PairRecord:
    pair_id: str
    method: str
    decision: Decision | None
    truth: Direction | None
    weight: float
    wall_time_s: float
    error: str | None = None

    @property
    def correct(self) -> bool:
        return (
            self.decision is not None
            and self.truth is not None
            and self.decision.direction == self.truth
        )

    @property
    def confidence(self) -> float:
        return self.decision.confidence if self.decision is not None else -1.0


@dataclass(frozen=True)
class BenchmarkConfig:
    methods: tuple[str, ...] = ("reci:log",)
    scaling: ScalingKind = ScalingKind.NORMALIZE
    train_fraction: float = 0.7
    runs: int = 1
    aggregation: Aggregation = Aggregation.AVERAGED_MSE
    threshold: float = 0.0
    preprocess_threshold: float | None = None  # kde filter; None disables
    subsample_to: int | None = None
    master_seed: int = 0
    rates: tuple[float, ...] = DEFAULT_RATES
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "scaling": self.scaling.value,
            "train_fraction": self.train_fraction,
            "runs": self.runs,
            "aggregation": self.aggregation.value,
            "threshold": self.threshold,
            "preprocess_threshold": self.preprocess_threshold,
            "subsample_to": self.subsample_to,
            "master_seed": self.master_seed,
            "rates": list(self.rates),
            "workers": self.workers,
        }


def accuracy(records: Sequence[PairRecord]) -> float:
    """Weighted fraction of correct decisions; no decision counts as wrong."""
    scored = [r for r in records if r.truth is not None]
    total = sum(r.weight for r in scored)
    if total <= 0.0:
        raise ZeroWeight("total record weight is zero")
    hit = sum(r.weight for r in scored if r.correct)
    return hit / total


def decision_rate_curve(
    records: Sequence[PairRecord], rates: Sequence[float]
) -> list[tuple[float, float]]:
    """Accuracy over the top-confidence subset at each decision rate."""
    rates = list(rates)
    if any(not (0.0 < r <= 1.0) for r in rates):
        raise ValueError("rates must lie in (0, 1]")
    if any(b <= a for a, b in zip(rates, rates[1:])):
        raise ValueError("rates must be strictly increasing")
    ranked = sorted(records, key=lambda r: (-r.confidence, r.pair_id, r.method))
    out = []
    for rate in rates:
        k = math.ceil(rate * len(ranked))
        out.append((rate, accuracy(ranked[:k])))
    return out


def pair_seed(master_seed: int, pair_id: str) -> int:
    """Stable per-pair seed: master seed mixed with a CRC of the pair id."""
    crc = zlib.crc32(pair_id.encode("utf-8"))
    return int(np.random.SeedSequence((int(master_seed) & 0xFFFFFFFF, crc)).generate_state(1)[0])


def make_method(method: str, config: BenchmarkConfig) -> Callable[[CauseEffectPair, int], Decision]:
    """Resolve a method string into a ``(pair, seed) -> Decision`` callable."""
    family, _, detail = method.partition(":")
    if family == "reci":
        spec = parse_model_spec(detail)

        def run_reci(pair: CauseEffectPair, seed: int) -> Decision:
            cfg = InferenceConfig(
                spec=spec,
                scaling=config.scaling,
                split=SplitConfig(config.train_fraction, seed),
                runs=config.runs,
                aggregation=config.aggregation,
                threshold=config.threshold,
            )
            return reci_aggregate(pair, cfg)

        return run_reci
    if family == "igci":
        ref, _, est = detail.partition("-")
        reference = {"u": "uniform", "g": "gaussian"}.get(ref)
        if reference is None or est not in ("slope", "entropy"):
            raise ValueError(f"unknown igci variant {detail!r}")
        cfg = IgciConfig(reference=reference, estimator=est)

        def run_igci(pair: CauseEffectPair, seed: int) -> Decision:
            return igci_decide(pair, cfg)

        return run_igci
    raise ValueError(f"unknown method {method!r} (expected reci:... or igci:...)")


@dataclass
class BenchmarkReport:
    config: dict
    records: list[PairRecord]
    accuracy_by_method: dict[str, float]
    curves: dict[str, list[tuple[float, float]]]
    timing: dict[str, dict[str, float]]
    skipped: list[str] = field(default_factory=list)

    def to_dict(self, include_timing: bool = True) -> dict:
        recs = []
        for r in sorted(self.records, key=lambda r: (r.pair_id, r.method)):
            d = {
                "pair_id": r.pair_id,
                "method": r.method,
                "truth": r.truth.value if r.truth else None,
                "weight": r.weight,
                "direction": r.decision.direction.value
                if r.decision and r.decision.direction
                else None,
                "mse_y_given_x": r.decision.mse_y_given_x if r.decision else None,
                "mse_x_given_y": r.decision.mse_x_given_y if r.decision else None,
                "confidence": r.decision.confidence if r.decision else None,
                "error": r.error,
            }
            if include_timing:
                d["wall_time_s"] = r.wall_time_s
            recs.append(d)
        out = {
            "config": self.config,
            "accuracy": self.accuracy_by_method,
            "decision_rate_curve": {
                m: [[rate, acc] for rate, acc in curve] for m, curve in self.curves.items()
            },
            "records": recs,
            "skipped": list(self.skipped),
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


def _run_one(
    pair: CauseEffectPair,
    method: str,
    fn: Callable[[CauseEffectPair, int], Decision],
    config: BenchmarkConfig,
) -> PairRecord:
    seed = pair_seed(config.master_seed, pair.id)
    start = time.perf_counter()
    decision = None
    error = None
    try:
        work = pair
        if config.subsample_to is not None and len(work) > config.subsample_to:
            work = subsample(work, config.subsample_to, seed)
        if config.preprocess_threshold is not None:
            work = remove_low_density(
                work, config.preprocess_threshold, BandwidthRule.silverman()
            )
        decision = fn(work, seed)
    except ReciError as exc:
        error = f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - start
    return PairRecord(pair.id, method, decision, pair.truth, pair.weight, wall, error)


def run_benchmark(
    pairs: Sequence[CauseEffectPair],
    config: BenchmarkConfig = BenchmarkConfig(),
    skipped: Sequence[str] = (),
) -> BenchmarkReport:
    """Run every configured method over every pair and assemble a report.

    Per-pair failures are recorded (and count as incorrect), not fatal.
    Decisions are deterministic given the master seed; wall-clock timings are
    not and can be excluded from the canonical JSON via ``to_json``.
    """
    if not pairs:
        raise ReciError("empty corpus")
    methods = {m: make_method(m, config) for m in config.methods}
    tasks = [
        (pair, name) for pair in sorted(pairs, key=lambda p: p.id) for name in methods
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(
                pool.map(lambda t: _run_one(t[0], t[1], methods[t[1]], config), tasks)
            )
    else:
        records = [_run_one(pair, name, methods[name], config) for pair, name in tasks]
    records.sort(key=lambda r: (r.pair_id, r.method))

    acc: dict[str, float] = {}
    curves: dict[str, list[tuple[float, float]]] = {}
    timing: dict[str, dict[str, float]] = {}
    for name in config.methods:
        sub = [r for r in records if r.method == name]
        scored = [r for r in sub if r.truth is not None]
        if scored and sum(r.weight for r in scored) > 0:
            acc[name] = accuracy(sub)
            curves[name] = decision_rate_curve(sub, config.rates)
        times = np.array([r.wall_time_s for r in sub])
        timing[name] = {
            "mean_s": float(times.mean()),
            "std_s": float(times.std(ddof=1)) if len(times) > 1 else 0.0,
            "total_s": float(times.sum()),
        }
    return BenchmarkReport(
        config=config.to_dict(),
        records=records,
        accuracy_by_method=acc,
        curves=curves,
        timing=timing,
        skipped=list(skipped),
    )


def accuracy_by_group(
    records: Sequence[PairRecord], group_of: dict[str, float]
) -> dict[str, list[tuple[float, float]]]:
    """Per-method accuracy grouped by a per-pair key (for example the noise level)."""
    out: dict[str, list[tuple[float, float]]] = {}
    methods = sorted({r.method for r in records})
    groups = sorted({g for g in group_of.values()})
    for method in methods:
        rows = []
        for g in groups:
            sub = [
                r
                for r in records
                if r.method == method and group_of.get(r.pair_id) == g
            ]
            if sub:
                rows.append((g, accuracy(sub)))
        out[method] = rows
    return out


def write_records_csv(report: BenchmarkReport, path: str | Path) -> None:
    """Per-record table as CSV (one row per pair and method)."""
    fields = [
        "pair_id",
        "method",
        "truth",
        "weight",
        "direction",
        "mse_y_given_x",
        "mse_x_given_y",
        "confidence",
        "correct",
        "wall_time_s",
        "error",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for r in sorted(report.records, key=lambda r: (r.pair_id, r.method)):
            writer.writerow(
                {
                    "pair_id": r.pair_id,
                    "method": r.method,
                    "truth": r.truth.value if r.truth else "",
                    "weight": r.weight,
                    "direction": r.decision.direction.value
                    if r.decision and r.decision.direction
                    else "",
                    "mse_y_given_x": r.decision.mse_y_given_x if r.decision else "",
                    "mse_x_given_y": r.decision.mse_x_given_y if r.decision else "",
                    "confidence": r.decision.confidence if r.decision else "",
                    "correct": int(r.correct),
                    "wall_time_s": r.wall_time_s,
                    "error": r.error or "",
                }
            )


def record_from_dict(d: dict) -> PairRecord:
    """Rebuild a record from its report-JSON form (for the curve tool)."""
    decision = None
    if d.get("mse_y_given_x") is not None:
        direction = Direction(d["direction"]) if d.get("direction") else None
        decision = Decision(
            direction,
            float(d["mse_y_given_x"]),
            float(d["mse_x_given_y"]),
            float(d["confidence"]),
        )
    truth = Direction(d["truth"]) if d.get("truth") else None
    return PairRecord(
        pair_id=d["pair_id"],
        method=d["method"],
        decision=decision,
        truth=truth,
        weight=float(d.get("weight", 1.0)),
        wall_time_s=float(d.get("wall_time_s", 0.0)),
        error=d.get("error"),
    )
