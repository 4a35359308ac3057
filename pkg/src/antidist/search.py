"""Seeded Haar-random search for sets that satisfy the overlap bound yet are
not antidistinguishable.

Trial ``k`` of a run uses seed ``base_seed + k``; every trial draws from its
own counter-based stream, so results do not depend on worker count or
execution order and any record can be replayed from its seed alone.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .certificate import Certificate, HardeningError, harden_certificate, verify_certificate
from .hermitian import NotPositiveDefiniteError
from .sdp import AntidistInstance, ConvergenceError, SolverConfig, solve
from .states import RNG_NAME, StateSet, gram_report, haar_random_set, state_set_from_dict, state_set_to_dict, trial_rng

WORKERS_ENV = "ANTIDIST_WORKERS"


@dataclass(frozen=True)
class SearchConfig:
    dim: int
    trials: int
    base_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    alpha_record_threshold: float = 1e-7
    require_hypothesis: bool = True
    output_path: str | None = None
    first_trial: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.first_trial < 0:
            raise ValueError("first_trial must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rng"] = RNG_NAME
        return d


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    max_offdiag: float
    hypothesis_satisfied: bool
    status: str  # "gated" | "solved" | "inconclusive"
    alpha: float | None = None
    beta: float | None = None
    is_counterexample: bool = False
    state_set: StateSet | None = None
    certificate: Certificate | None = None
    diagnostics: str | None = None

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "seed": self.seed,
            "rng": RNG_NAME,
            "max_offdiag": self.max_offdiag,
            "hypothesis_satisfied": self.hypothesis_satisfied,
            "status": self.status,
            "alpha": self.alpha,
            "beta": self.beta,
            "is_counterexample": self.is_counterexample,
            "state_set": state_set_to_dict(self.state_set) if self.state_set else None,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> TrialRecord:
        return cls(
            trial_index=doc["trial_index"],
            seed=doc["seed"],
            max_offdiag=doc["max_offdiag"],
            hypothesis_satisfied=doc["hypothesis_satisfied"],
            status=doc["status"],
            alpha=doc["alpha"],
            beta=doc["beta"],
            is_counterexample=doc["is_counterexample"],
            state_set=state_set_from_dict(doc["state_set"]) if doc.get("state_set") else None,
            certificate=Certificate.from_dict(doc["certificate"]) if doc.get("certificate") else None,
            diagnostics=doc.get("diagnostics"),
        )

    def same_outcome(self, other: TrialRecord) -> bool:
        return self.to_dict() == other.to_dict()


@dataclass
class SearchSummary:
    config: SearchConfig
    trials_run: int
    gated: int
    solved: int
    inconclusive: int
    certified_not_antidistinguishable: int
    counterexamples: int
    best: dict | None  # trial_index, seed, beta of the top-ranked counterexample
    elapsed_s: float = field(default=0.0, compare=False)

    @property
    def throughput(self) -> float:
        return self.trials_run / self.elapsed_s if self.elapsed_s > 0 else float("nan")

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "trials_run": self.trials_run,
            "gated": self.gated,
            "solved": self.solved,
            "inconclusive": self.inconclusive,
            "certified_not_antidistinguishable": self.certified_not_antidistinguishable,
            "counterexamples": self.counterexamples,
            "best": self.best,
            "elapsed_s": self.elapsed_s,
            "trials_per_s": self.throughput,
        }


def run_trial(dim: int, seed: int, config: SearchConfig, trial_index: int = 0) -> TrialRecord:
    states = haar_random_set(dim, dim, trial_rng(seed))
    return evaluate_state_set(states, config, trial_index=trial_index, seed=seed)


def evaluate_state_set(
    states: StateSet, config: SearchConfig, trial_index: int = 0, seed: int | None = None
) -> TrialRecord:
    """Gate, solve and certify one state set; solver failures become
    ``inconclusive`` records rather than exceptions."""
    report = gram_report(states)
    record = TrialRecord(
        trial_index=trial_index,
        seed=seed,
        max_offdiag=report.max_offdiag,
        hypothesis_satisfied=report.hypothesis_satisfied,
        status="gated",
    )
    if config.require_hypothesis and not report.hypothesis_satisfied:
        return record

    instance = AntidistInstance.from_states(states)
    try:
        result = solve(instance, config.solver)
    except (ConvergenceError, NotPositiveDefiniteError) as exc:
        record.status = "inconclusive"
        record.diagnostics = str(exc)
        return record
    record.status = "solved"
    record.alpha, record.beta = result.alpha, result.beta
    if result.alpha <= config.alpha_record_threshold:
        return record
    try:
        cert = harden_certificate(result.y, instance)
    except HardeningError as exc:
        record.diagnostics = str(exc)
        return record
    if not verify_certificate(cert.y, instance, psd_tol=0.0).valid:
        record.diagnostics = "hardened certificate failed verification"
        return record
    record.certificate = cert
    record.is_counterexample = report.hypothesis_satisfied
    if record.is_counterexample:
        record.state_set = states
    return record


def rank_records(records) -> list[TrialRecord]:
    """Counterexamples first by descending beta, then everything else; ties by index."""
    def key(r: TrialRecord):
        if r.is_counterexample:
            return (0, -(r.beta if r.beta is not None else float("-inf")), r.trial_index)
        return (1, 0.0, r.trial_index)

    return sorted(records, key=key)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _trial_task(args) -> TrialRecord:
    index, config = args
    return run_trial(config.dim, config.base_seed + index, config, trial_index=index)


def summary_path(output_path) -> Path:
    p = Path(output_path)
    return p.with_name(p.name + ".summary.json")


def run_search(config: SearchConfig, workers: int | None = None, on_record=None) -> SearchSummary:
    """Run ``config.trials`` trials; counterexamples are appended to
    ``config.output_path`` as JSON lines in trial order.

    ``on_record`` is called with every record (counterexample or not), in
    trial order.
    """
    workers = workers or default_workers()
    out = None
    if config.output_path is not None:
        # Fail before any trial runs if the destination is unwritable.
        out = open(config.output_path, "w")
    start = time.perf_counter()
    counts = dict(gated=0, solved=0, inconclusive=0, certified=0, counterexamples=0)
    best: TrialRecord | None = None
    indices = range(config.first_trial, config.first_trial + config.trials)
    try:
        if workers == 1:
            records = (_trial_task((i, config)) for i in indices)
            executor = None
        else:
            executor = ProcessPoolExecutor(max_workers=workers)
            chunk = max(1, min(64, config.trials // (4 * workers)))
            records = executor.map(_trial_task, [(i, config) for i in indices], chunksize=chunk)
        for rec in records:
            counts[rec.status] += 1
            if rec.certificate is not None:
                counts["certified"] += 1
            if rec.is_counterexample:
                counts["counterexamples"] += 1
                if best is None or rank_records([rec, best])[0] is rec:
                    best = rec
                if out is not None:
                    out.write(json.dumps(rec.to_dict()) + "\n")
                    out.flush()
            if on_record is not None:
                on_record(rec)
        if executor is not None:
            executor.shutdown()
    finally:
        if out is not None:
            out.close()
    summary = SearchSummary(
        config=config,
        trials_run=config.trials,
        gated=counts["gated"],
        solved=counts["solved"],
        inconclusive=counts["inconclusive"],
        certified_not_antidistinguishable=counts["certified"],
        counterexamples=counts["counterexamples"],
        best=(
            {"trial_index": best.trial_index, "seed": best.seed, "beta": best.beta}
            if best
            else None
        ),
        elapsed_s=time.perf_counter() - start,
    )
    if config.output_path is not None:
        summary_path(config.output_path).write_text(json.dumps(summary.to_dict(), indent=1) + "\n")
    return summary


def load_records(path) -> list[TrialRecord]:
    with open(path) as fh:
        return [TrialRecord.from_dict(json.loads(line)) for line in fh if line.strip()]
