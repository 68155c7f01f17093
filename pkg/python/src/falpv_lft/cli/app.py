import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from falpv_lft.analysis.equivalence import formal_equivalence, structured_markov_check
from falpv_lft.analysis.expression import PsiEvaluator, expression_evaluator
from falpv_lft.analysis.isomorphism import find_structured_isomorphism
from falpv_lft.analysis.sampling import random_signals
from falpv_lft.analysis.simulation import realization_evaluator, simulate_falpv, simulate_lft_loop
from falpv_lft.cli.errors import exit_code, format_error
from falpv_lft.cli.files import load_as, save_file
from falpv_lft.cli.reports import emit_report
from falpv_lft.logging import configure_logger, logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    CompareReport,
    ErrorCode,
    FalpvDims,
    FalpvFile,
    LftError,
    LftFile,
    MinimizeReport,
    PsiRealization,
    PsiRealizationFile,
    PsiTaylor,
    PsiTaylorFile,
    SignalsFile,
    SimulationReport,
    StabilityReport,
    TrajectoryFile,
    TruncatedSeries,
    VerifyReport,
)
from falpv_lft.realization.minimization import is_minimal, minimize_lft
from falpv_lft.realization.stability import check_stability
from falpv_lft.transform.pipeline import SERIES_CHECK_DEPTH, prepare_psi, psi_series, realize_psi, transform
from falpv_lft.version import __version__

DEFAULT_HORIZON = 50
DEFAULT_TRIALS = 10

Command = Callable[[argparse.Namespace], bool]


class TrialAdapter(logging.LoggerAdapter):
    def process(self, msg: str, kwargs: dict) -> tuple[str, dict]:
        return f"[trial {self.extra['trial']}] {msg}", kwargs


def _psi_file(path: Path) -> PsiRealizationFile | PsiTaylorFile:
    return load_as(path, PsiRealizationFile, PsiTaylorFile)


def _psi_source(psi_file: PsiRealizationFile | PsiTaylorFile) -> PsiRealization | PsiTaylor:
    return psi_file.realization if isinstance(psi_file, PsiRealizationFile) else psi_file.taylor


def _lft_file(path: Path) -> LftFile:
    return load_as(path, LftFile)


def _check_psi_fits(psi_file: PsiRealizationFile | PsiTaylorFile, dims: FalpvDims) -> None:
    if (psi_file.n_psi, psi_file.n_p) != (dims.n_psi, dims.n_p):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"psi maps {psi_file.n_p} scheduling variables to {psi_file.n_psi} values, "
            f"the FALPV expects {dims.n_p} and {dims.n_psi}",
        )


def _check_signals_fit(signals_file: SignalsFile, dims: FalpvDims) -> None:
    if (signals_file.n_u, signals_file.n_p) != (dims.n_u, dims.n_p):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Signals carry {signals_file.n_u} inputs and {signals_file.n_p} scheduling variables, "
            f"the model expects {dims.n_u} and {dims.n_p}",
        )


def realize_psi_command(args: argparse.Namespace) -> bool:
    psi_file = load_as(args.psi, PsiTaylorFile)
    taylor = psi_file.taylor
    if args.order_bound is not None:
        taylor = PsiTaylor(series=taylor.series, order_bound=args.order_bound)
    prepared = realize_psi(taylor)
    realization = prepared.realization
    save_file(
        args.out,
        PsiRealizationFile(
            n_psi=realization.n_psi,
            n_p=realization.n_p,
            blocks=realization.lft.blocks.dims,
            realization=realization,
            expressions=psi_file.expressions,
        ),
    )
    emit_report("psi realization", prepared.report, args.report)
    return True


def transform_command(args: argparse.Namespace) -> bool:
    system = load_as(args.falpv, FalpvFile).system
    psi_file = _psi_file(args.psi)
    result = transform(
        system,
        _psi_source(psi_file),
        expressions=psi_file.expressions,
        fast_path=args.fast_path,
        depth=args.depth,
        seed=args.seed,
    )
    save_file(args.out, LftFile.of(result.assembled.lft, result.assembled))
    emit_report("transform", result.report, args.report)
    return result.report.verification.passed


def _verification_psi(
    psi_file: PsiRealizationFile | PsiTaylorFile, depth: int
) -> tuple[PsiEvaluator, TruncatedSeries]:
    if isinstance(psi_file, PsiTaylorFile):
        psi = realize_psi(psi_file.taylor).realization
        series = psi_file.taylor.series
    else:
        psi = psi_file.realization
        series = psi_series(psi, depth)
    if psi_file.expressions:
        return expression_evaluator(psi_file.expressions, psi.n_p), series
    return realization_evaluator(psi), series


def verify_command(args: argparse.Namespace) -> bool:
    system = load_as(args.falpv, FalpvFile).system
    lft_file = _lft_file(args.lft)
    if lft_file.provenance is None:
        raise LftError.of(ErrorCode.INVALID_INPUT, f"{args.lft} was not produced by transform (no provenance)")
    assembled = lft_file.assembled()
    if assembled.provenance != system.dims:
        raise LftError.of(ErrorCode.CONTRACT, f"{args.lft} was assembled from {assembled.provenance}, not {system.dims}")
    psi_file = _psi_file(args.psi)
    _check_psi_fits(psi_file, system.dims)
    depth = SERIES_CHECK_DEPTH if args.depth is None else args.depth
    evaluate, series = _verification_psi(psi_file, depth)
    depth = min(depth, series.depth)

    rng = np.random.default_rng(args.seed)
    trajectory_error, state_error = 0.0, 0.0
    for trial in range(args.trials):
        trial_logger = TrialAdapter(logger, {"trial": trial})
        signals = random_signals(rng, args.horizon, system.n_u, system.n_p, seed=args.seed)
        expected = simulate_falpv(system, evaluate, signals.u, signals.p)
        actual, _ = simulate_lft_loop(assembled, signals.u, signals.p)
        scale = max(1.0, float(np.max(np.abs(expected.y), initial=0.0)))
        error = float(np.max(np.abs(expected.y - actual.y), initial=0.0)) / scale
        state = float(np.max(np.abs(expected.x - actual.x), initial=0.0))
        state /= max(1.0, float(np.max(np.abs(expected.x), initial=0.0)))
        trial_logger.debug(f"output error {error:.3e}, state error {state:.3e}")
        trajectory_error, state_error = max(trajectory_error, error), max(state_error, state)

    markov = structured_markov_check(system, assembled, series, depth)
    tolerance = DEFAULT_TOLERANCES.trajectory
    passed = markov.equivalent and max(trajectory_error, state_error) <= tolerance
    emit_report(
        "verify",
        VerifyReport(
            horizon=args.horizon,
            trials=args.trials,
            seed=args.seed,
            tolerance=tolerance,
            max_trajectory_error=trajectory_error,
            max_state_error=state_error,
            words_checked=markov.checked,
            first_failing_word=list(markov.word) if markov.word is not None else None,
            passed=passed,
        ),
        args.report,
    )
    return passed


def compare_command(args: argparse.Namespace) -> bool:
    first, second = _lft_file(args.first).lft, _lft_file(args.second).lft
    depth = first.dim + second.dim if args.depth is None else args.depth
    equivalence = formal_equivalence(first, second, depth)
    both_minimal = is_minimal(first).minimal and is_minimal(second).minimal
    similarity = None
    if equivalence.equivalent and both_minimal:
        similarity = find_structured_isomorphism(first, second)
    emit_report(
        "compare",
        CompareReport(
            depth=depth,
            equivalent=equivalence.equivalent,
            separating_word=list(equivalence.word) if equivalence.word is not None else None,
            both_minimal=both_minimal,
            similarity=similarity,
        ),
        args.report,
    )
    return equivalence.equivalent


def simulate_command(args: argparse.Namespace) -> bool:
    model = load_as(args.model, FalpvFile, LftFile)
    if isinstance(model, FalpvFile):
        dims = model.system.dims
    elif model.provenance is not None:
        dims = model.provenance
    else:
        raise LftError.of(ErrorCode.INVALID_INPUT, f"{args.model} was not produced by transform (no provenance)")

    if args.signals is not None:
        signals_file = load_as(args.signals, SignalsFile)
        _check_signals_fit(signals_file, dims)
        signals = signals_file.signals
    else:
        horizon = DEFAULT_HORIZON if args.horizon is None else args.horizon
        signals = random_signals(np.random.default_rng(args.seed), horizon, dims.n_u, dims.n_p, seed=args.seed)

    z = None
    if isinstance(model, FalpvFile):
        if args.psi is None:
            raise LftError.of(ErrorCode.INVALID_INPUT, "Simulating an FALPV needs --psi")
        psi_file = _psi_file(args.psi)
        _check_psi_fits(psi_file, model.system.dims)
        evaluate, _ = _verification_psi(psi_file, 0)
        trajectory = simulate_falpv(model.system, evaluate, signals.u, signals.p, args.horizon)
        source = "falpv"
    else:
        trajectory, z = simulate_lft_loop(model.assembled(), signals.u, signals.p, args.horizon)
        source = "lft"

    save_file(args.out, TrajectoryFile(source=source, trajectory=trajectory, z=z))
    emit_report(
        "simulate",
        SimulationReport(
            source=source,
            horizon=trajectory.horizon,
            seed=signals.seed,
            max_abs_output=float(np.max(np.abs(trajectory.y), initial=0.0)),
        ),
        args.report,
    )
    return True


def minimize_command(args: argparse.Namespace) -> bool:
    lft = _lft_file(args.lft).lft
    reduced = minimize_lft(lft).lft
    depth = lft.dim + reduced.dim if args.depth is None else args.depth
    equivalence = formal_equivalence(lft, reduced, depth)
    save_file(args.out, LftFile.of(reduced))
    emit_report(
        "minimize",
        MinimizeReport(
            blocks_before=lft.blocks.dims,
            blocks_after=reduced.blocks.dims,
            minimality=is_minimal(reduced),
            equivalence_depth=depth,
            equivalent=equivalence.equivalent,
        ),
        args.report,
    )
    return equivalence.equivalent


def check_stability_command(args: argparse.Namespace) -> bool:
    model = load_as(args.model, LftFile, PsiRealizationFile)
    if isinstance(model, PsiRealizationFile):
        lft = prepare_psi(model.realization).realization.lft if args.scale else model.realization.lft
    else:
        lft = model.lft
    certificate = check_stability(lft)
    emit_report(
        "check-stability",
        StabilityReport(
            blocks=lft.blocks.dims,
            certified=certificate is not None,
            margin=certificate.margin if certificate else None,
            method=certificate.method if certificate else None,
            P=list(certificate.P) if certificate else None,
        ),
        args.report,
    )
    return certificate is not None


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="falpv-lft", description="Transform FALPV models into LFTs and verify them.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Command, help: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(name, help=help)
        subparser.set_defaults(handler=handler)
        subparser.add_argument("--report", type=Path, help="write the JSON report to this path")
        return subparser

    realize = command("realize-psi", realize_psi_command, "realize psi from its Taylor coefficients")
    realize.add_argument("psi", type=Path)
    realize.add_argument("--order-bound", type=int, help="override the order bound of the file")
    realize.add_argument("--out", type=Path, required=True)

    transform_ = command("transform", transform_command, "build the LFT associated with an FALPV")
    transform_.add_argument("falpv", type=Path)
    transform_.add_argument("psi", type=Path)
    transform_.add_argument("--fast-path", action="store_true", help="cross-check the factored construction")
    transform_.add_argument("--depth", type=int)
    transform_.add_argument("--seed", type=int, default=0)
    transform_.add_argument("--out", type=Path, required=True)

    verify = command("verify", verify_command, "compare an FALPV and its LFT on random trajectories")
    verify.add_argument("falpv", type=Path)
    verify.add_argument("lft", type=Path)
    verify.add_argument("psi", type=Path)
    verify.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--depth", type=int)

    compare = command("compare", compare_command, "decide formal input-output equivalence of two LFTs")
    compare.add_argument("first", type=Path)
    compare.add_argument("second", type=Path)
    compare.add_argument("--depth", type=int)

    simulate = command("simulate", simulate_command, "simulate an FALPV or an assembled LFT")
    simulate.add_argument("model", type=Path)
    simulate.add_argument("--psi", type=Path)
    simulate.add_argument("--signals", type=Path)
    simulate.add_argument("--horizon", type=int, help=f"defaults to the signal length or {DEFAULT_HORIZON}")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", type=Path, required=True)

    minimize = command("minimize", minimize_command, "minimize an LFT")
    minimize.add_argument("lft", type=Path)
    minimize.add_argument("--depth", type=int)
    minimize.add_argument("--out", type=Path, required=True)

    stability = command("check-stability", check_stability_command, "search a block-diagonal stability certificate")
    stability.add_argument("model", type=Path)
    stability.add_argument("--scale", action="store_true", help="scale a psi realization until it is certified")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    configure_logger(logging.DEBUG if args.verbose else logging.WARNING)
    try:
        outcome: bool | LftError = args.handler(args)
    except LftError as e:
        outcome = e
    except ValueError as e:
        # Model construction failures (pydantic included) on user data.
        outcome = LftError.of(ErrorCode.INVALID_INPUT, str(e))
    if isinstance(outcome, LftError):
        print(format_error(outcome, grouped=args.command == "transform"), file=sys.stderr)
    return exit_code(outcome)


if __name__ == "__main__":
    sys.exit(main())
