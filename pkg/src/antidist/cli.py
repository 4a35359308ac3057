"""Command-line interface.

Exit codes: 0 success or decision reached, 1 a check failed, 2 usage or
input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import counterexample
from .certificate import HardeningError, harden_certificate, load_certificate, verify_certificate
from .sdp import AntidistInstance, SolverConfig, Verdict, decide_antidistinguishability
from .search import SearchConfig, default_workers, run_search
from .states import StateFileError, gram_report, load_state_set, matrix_to_json

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(doc))
    else:
        print("\n".join(lines))


def _load_states(path):
    try:
        return load_state_set(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except StateFileError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _load_cert(path):
    try:
        return load_certificate(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except StateFileError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_reproduce(args) -> int:
    states = _load_states(args.states or counterexample.states_path())
    cert = _load_cert(args.cert or counterexample.certificate_path())
    if cert.y.shape[0] != states.dim:
        raise UsageError("certificate and state dimensions differ")
    checks = counterexample.reproduce_checks(states, cert.y)
    ok = all(c.passed for c in checks)
    lines = [f"{'check':<36} {'value':>22} {'expected':>22} {'delta':>10}  result"]
    for c in checks:
        lines.append(
            f"{c.name:<36} {c.value:>22.15g} {c.expected:>22.15g} {c.delta:>10.2e}  "
            f"{'PASS' if c.passed else 'FAIL'} {c.detail}"
        )
    lines.append("all checks passed" if ok else "REPRODUCTION FAILED")
    _emit(args, {"passed": ok, "checks": [c.to_dict() for c in checks]}, lines)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_solve(args) -> int:
    states = _load_states(args.file)
    instance = AntidistInstance.from_states(states)
    decision = decide_antidistinguishability(instance, SolverConfig(gap_tol=args.gap_tol))
    r = decision.result
    if r is None:
        _emit(args, {"decision": decision.verdict.value, "error": decision.diagnostics},
              [f"solver failure: {decision.diagnostics}"])
        return EXIT_SOLVER
    doc = {
        "alpha": r.alpha,
        "beta": r.beta,
        "gap": r.gap,
        "primal_residual": r.primal_residual,
        "dual_min_slack_eig": r.dual_min_slack_eig,
        "decision": decision.verdict.value,
        "diagnostics": decision.diagnostics,
    }
    if args.out:
        out = {
            "dim": instance.dim,
            "y": matrix_to_json(r.y),
            "trace": r.beta,
            "min_slack_eig": r.dual_min_slack_eig,
            "shift_applied": 0.0,
            "alpha": r.alpha,
            "beta": r.beta,
            "gap": r.gap,
            "povm": [matrix_to_json(e) for e in r.povm.elements],
        }
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=1)
            fh.write("\n")
    _emit(args, doc, [
        f"alpha (primal)   {r.alpha:.15g}",
        f"beta  (dual)     {r.beta:.15g}",
        f"gap              {r.gap:.3e}",
        f"POVM residual    {r.primal_residual:.3e}",
        f"min slack eig    {r.dual_min_slack_eig:.3e}",
        f"decision         {decision.verdict.value}"
        + (f" ({decision.diagnostics})" if decision.diagnostics else ""),
    ])
    return EXIT_SOLVER if decision.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def cmd_certify(args) -> int:
    states = _load_states(args.states)
    cert = _load_cert(args.cert)
    if cert.y.shape[0] != states.dim:
        raise UsageError(f"certificate dimension {cert.y.shape[0]} != state dimension {states.dim}")
    instance = AntidistInstance.from_states(states)
    y, shift = cert.y, 0.0
    if args.harden:
        try:
            hardened = harden_certificate(y, instance)
            y, shift = hardened.y, hardened.shift_applied
        except HardeningError as exc:
            _emit(args, {"valid": False, "failure_reason": str(exc)}, [f"INVALID: {exc}"])
            return EXIT_CHECK_FAILED
    report = verify_certificate(y, instance, psd_tol=0.0)
    lines = [f"Tr(Y) = {report.trace_value:.15g}"]
    lines += [f"min eig(rho_{i + 1} - Y) = {m:.6e}" for i, m in enumerate(report.per_state_min_eig)]
    if shift:
        lines.append(f"hardening shift {shift:.3e}")
    lines.append("VALID: the states are not antidistinguishable" if report.valid
                 else f"INVALID: {report.failure_reason}")
    _emit(args, {**report.to_dict(), "shift_applied": shift}, lines)
    return EXIT_OK if report.valid else EXIT_CHECK_FAILED


def cmd_gram(args) -> int:
    states = _load_states(args.file)
    if states.n < 2:
        raise UsageError("need at least two states")
    rep = gram_report(states)
    lines = ["|<psi_i|psi_j>|:"]
    lines += ["  " + " ".join(f"{x:.8f}" for x in row) for row in rep.overlaps]
    lines += [
        f"max off-diagonal  {rep.max_offdiag:.8f}",
        f"bound (d-2)/(d-1) {rep.bound:.8f}",
        f"hypothesis satisfied: {rep.hypothesis_satisfied}",
    ]
    if rep.note:
        lines.append(f"note: {rep.note}")
    _emit(args, rep.to_dict(), lines)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be at least 1")
    config = SearchConfig(
        dim=args.dim,
        trials=args.trials,
        base_seed=args.seed,
        require_hypothesis=not args.no_gate,
        output_path=args.out,
        first_trial=args.start,
    )
    try:
        summary = run_search(config, workers=args.workers or default_workers())
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    s = summary.to_dict()
    lines = [
        f"dim={args.dim} trials={summary.trials_run} seeds {args.seed + args.start}.."
        f"{args.seed + args.start + args.trials - 1}",
        f"gated (overlap bound failed) {summary.gated}",
        f"solved                       {summary.solved}",
        f"inconclusive                 {summary.inconclusive}",
        f"certified non-antidist.      {summary.certified_not_antidistinguishable}",
        f"counterexamples              {summary.counterexamples}",
        f"best                         {summary.best}",
        f"throughput                   {summary.throughput:.1f} trials/s",
    ]
    _emit(args, s, lines)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="antidist", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reproduce", parents=[common], help="re-check the embedded d=4 counterexample")
    r.add_argument("--states", help=argparse.SUPPRESS)
    r.add_argument("--cert", help=argparse.SUPPRESS)
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("solve", parents=[common], help="solve the SDP pair for a state-set file")
    s.add_argument("file")
    s.add_argument("--out", help="write Y and the POVM as JSON")
    s.add_argument("--gap-tol", type=float, default=SolverConfig.gap_tol)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", parents=[common], help="verify a certificate Y")
    c.add_argument("states")
    c.add_argument("cert")
    c.add_argument("--harden", action="store_true", help="shift Y into strict feasibility first")
    c.set_defaults(func=cmd_certify)

    g = sub.add_parser("gram", parents=[common], help="pairwise overlaps and the conjecture bound")
    g.add_argument("file")
    g.set_defaults(func=cmd_gram)

    h = sub.add_parser("search", parents=[common], help="seeded Haar-random counterexample search")
    h.add_argument("--dim", type=int, required=True)
    h.add_argument("--trials", type=int, required=True)
    h.add_argument("--seed", type=int, required=True)
    h.add_argument("--out", required=True)
    h.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $ANTIDIST_WORKERS or CPU count)")
    h.add_argument("--no-gate", action="store_true", help="solve even when the overlap bound fails")
    h.add_argument("--start", type=int, default=0, help="first trial index (for resuming)")
    h.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
