from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.linalg import svd

from falpv_lft.analysis.equivalence import formal_equivalence, structured_markov_check
from falpv_lft.analysis.expression import PsiEvaluator, expression_evaluator
from falpv_lft.analysis.simulation import realization_evaluator
from falpv_lft.core.lft import delta_of_point, formal_io_map, io_series, star_product
from falpv_lft.core.words import format_word, iter_words, validate_word
from falpv_lft.instrumentation import get_tracer
from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    AssembledLft,
    BlockStructure,
    ErrorCode,
    FalpvModel,
    FastPathReport,
    LftError,
    LftModel,
    PsiRealization,
    PsiTaylor,
    RealizationReport,
    SigmaPsiLft,
    StabilityCertificate,
    Tolerances,
    TransformReport,
    TruncatedSeries,
    VerificationSummary,
    Word,
)
from falpv_lft.realization.hankel import hankel_realize, representation_to_lft
from falpv_lft.realization.minimization import is_minimal, minimize_lft
from falpv_lft.realization.stability import check_stability, lift_certificate, stabilize_scale, verify_certificate
from falpv_lft.realization.subspaces import numerical_rank, rank_threshold

SERIES_CHECK_DEPTH = 5
RANDOM_POINTS = 20


class PreparedPsi(NamedTuple):
    realization: PsiRealization
    certificate: StabilityCertificate
    report: RealizationReport


class TransformResult(NamedTuple):
    assembled: AssembledLft
    psi: PsiRealization
    report: TransformReport


def _check_compatible(system: FalpvModel, psi: PsiRealization) -> None:
    if (psi.n_psi, psi.n_p) != (system.n_psi, system.n_p):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"psi realization maps {psi.n_p} scheduling variables to {psi.n_psi} values, "
            f"the FALPV expects {system.n_p} and {system.n_psi}",
        )


def tilde_series(system: FalpvModel, series: TruncatedSeries, word: Sequence[int]) -> np.ndarray:
    """``sum_l [[A_l, B_l], [C_l, D_l]] S^l(word)`` for ``l = 1..n_psi``."""
    if series.shape != (system.n_psi, 1) or series.alphabet != system.n_p:
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Series of shape {series.shape} over {series.alphabet} letters does not fit {system.dims}",
        )
    word = validate_word(word, system.n_p)
    if len(word) > series.depth:
        raise LftError.of(
            ErrorCode.TRUNCATION,
            f"Word {format_word(word)} is deeper than the series (depth {series.depth})",
            depth=series.depth,
        )
    weights = series.coefficient(word)[:, 0]
    blocks = np.stack([system.coefficient_block(l) for l in range(1, system.n_psi + 1)])
    return np.tensordot(weights, blocks, axes=1)


def psi_series(psi: PsiRealization, depth: int) -> TruncatedSeries:
    """Taylor coefficients of the unscaled ``psi`` recovered from its realization."""
    scaled = io_series(psi.lft, depth)
    lam = psi.scheduling_scale
    return TruncatedSeries(
        alphabet=scaled.alphabet,
        depth=depth,
        shape=scaled.shape,
        coeffs={word: value / lam ** len(word) for word, value in scaled.coeffs.items()},
    )


def lift_kron(system: FalpvModel, psi: PsiRealization) -> LftModel:
    """``F (x) I_m``, ``G (x) I_m`` and ``sum_l H_l (x) [[A_l, B_l], [C_l, D_l]]`` with ``m = n_x + n_u``."""
    _check_compatible(system, psi)
    m = system.n_x + system.n_u
    identity = np.eye(m)
    H = sum(
        (np.kron(psi.H[l - 1 : l], system.coefficient_block(l)) for l in range(1, system.n_psi + 1)),
        start=np.zeros((system.n_x + system.n_y, psi.lft.dim * m)),
    )
    return LftModel(
        blocks=psi.lft.blocks.kron(m),
        A=np.kron(psi.F, identity),
        B=np.kron(psi.G, identity),
        C=H,
        D=np.zeros((system.n_x + system.n_y, m)),
    )


def minimal_sigma_psi(
    system: FalpvModel, psi: PsiRealization, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> SigmaPsiLft:
    reduced = minimize_lft(lift_kron(system, psi), tolerances=tolerances)
    return SigmaPsiLft(lft=reduced.lft, n_x=system.n_x, n_u=system.n_u, n_y=system.n_y)


def factor_coefficient_block(
    system: FalpvModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[np.ndarray, np.ndarray]:
    """Rank-revealing ``[[A_1, B_1], [C_1, D_1]] = L R`` with ``L`` of full column rank."""
    if system.n_psi != 1:
        raise LftError.of(ErrorCode.CONTRACT, f"Factoring needs n_psi = 1, got {system.n_psi}")
    block = system.coefficient_block(1)
    U, s, Vt = svd(block, full_matrices=False)
    rank = int(np.sum(s > rank_threshold(block, s, scale=1.0, rank=tolerances.rank)))
    return U[:, :rank] * s[:rank], Vt[:rank]


def fast_path_factor(
    system: FalpvModel,
    psi: PsiRealization,
    L: np.ndarray,
    R: np.ndarray,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SigmaPsiLft:
    """``F (x) I_r``, ``G (x) R`` and ``H (x) L`` for a factorization of the single coefficient block."""
    _check_compatible(system, psi)
    if system.n_psi != 1:
        raise LftError.of(ErrorCode.CONTRACT, f"The factored construction needs n_psi = 1, got {system.n_psi}")
    L, R = np.asarray(L, dtype=float), np.asarray(R, dtype=float)
    block = system.coefficient_block(1)
    if L.ndim != 2 or R.ndim != 2 or L.shape[0] != block.shape[0] or R.shape != (L.shape[1], block.shape[1]):
        raise LftError.of(
            ErrorCode.INVALID_FACTOR,
            f"Factors of shapes {L.shape} and {R.shape} cannot multiply to {block.shape}",
        )
    residual = float(np.max(np.abs(block - L @ R), initial=0.0))
    if residual > tolerances.factor * max(1.0, float(np.max(np.abs(block), initial=0.0))):
        raise LftError.of(
            ErrorCode.INVALID_FACTOR, f"L R misses the coefficient block by {residual:.3e}", residual=residual
        )
    r = L.shape[1]
    if numerical_rank(L, tolerances=tolerances) != r:
        raise LftError.of(ErrorCode.INVALID_FACTOR, f"L does not have full column rank {r}")

    lft = LftModel(
        blocks=psi.lft.blocks.kron(r),
        A=np.kron(psi.F, np.eye(r)),
        B=np.kron(psi.G, R),
        C=np.kron(psi.H, L),
        D=np.zeros(block.shape),
    )
    return SigmaPsiLft(lft=lft, n_x=system.n_x, n_u=system.n_u, n_y=system.n_y)


def assemble(system: FalpvModel, sp: SigmaPsiLft, scheduling_scale: float = 1.0) -> AssembledLft:
    """``A = [[A_0, Hx], [Gx, F]]``, ``B = [B_0; Gu]``, ``C = [C_0, Hy]``, ``D = D_0``."""
    if (sp.n_x, sp.n_u, sp.n_y, sp.lft.d) != (system.n_x, system.n_u, system.n_y, system.n_p):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Sigma-psi LFT with (n_x, n_u, n_y, d) = {(sp.n_x, sp.n_u, sp.n_y, sp.lft.d)} does not fit {system.dims}",
        )
    lft = LftModel(
        blocks=BlockStructure(dims=(system.n_x, *sp.lft.blocks.dims)),
        A=np.block([[system.A[0], sp.Hx], [sp.Gx, sp.F]]),
        B=np.vstack([system.B[0], sp.Gu]),
        C=np.hstack([system.C[0], sp.Hy]),
        D=system.D[0],
    )
    return AssembledLft(lft=lft, provenance=system.dims, scheduling_scale=scheduling_scale)


def prepare_psi(psi: PsiRealization, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PreparedPsi:
    """Minimize ``psi`` if needed and certify its stability, scaling the scheduling argument when required."""
    verdict = is_minimal(psi.lft, tolerances=tolerances)
    if not verdict.minimal:
        logger.warning(f"psi realization with blocks {psi.lft.blocks.dims} is not minimal; minimizing it")
        minimal = minimize_lft(psi.lft, tolerances=tolerances).lft
        psi = PsiRealization(lft=minimal, scheduling_scale=psi.scheduling_scale)

    certificate = check_stability(psi.lft, tolerances=tolerances)
    if certificate is None:
        psi, _ = stabilize_scale(psi, tolerances=tolerances)
        certificate = check_stability(psi.lft, tolerances=tolerances)
    if certificate is None:
        raise LftError.of(ErrorCode.RECOGNIZABILITY, "No stable realization of psi found, even after scaling")

    report = RealizationReport(
        n_psi=psi.n_psi,
        n_p=psi.n_p,
        blocks=psi.lft.blocks.dims,
        minimality=is_minimal(psi.lft, tolerances=tolerances),
        scheduling_scale=psi.scheduling_scale,
        margin=certificate.margin,
        certificate_method=certificate.method,
    )
    return PreparedPsi(realization=psi, certificate=certificate, report=report)


def realize_psi(taylor: PsiTaylor, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PreparedPsi:
    """Minimal stable realization of ``psi`` from its Taylor coefficients."""
    series = taylor.series
    if not np.allclose(series.constant, 0.0, rtol=0.0, atol=tolerances.equivalence):
        raise LftError.of(
            ErrorCode.RECOGNIZABILITY,
            "psi(0) must be zero: the series has a non-zero constant term",
            constant=series.constant[:, 0].tolist(),
        )
    representation = hankel_realize(series, taylor.order_bound, tolerances=tolerances)
    lft = representation_to_lft(representation, series.alphabet)
    minimal = minimize_lft(lft, tolerances=tolerances).lft
    prepared = prepare_psi(PsiRealization(lft=minimal), tolerances=tolerances)
    report = prepared.report.model_copy(
        update={"order_bound": taylor.order_bound, "depth": series.depth, "hankel_rank": representation.state_dim}
    )
    return prepared._replace(report=report)


def _series_error(
    system: FalpvModel, sp: SigmaPsiLft, series: TruncatedSeries, depth: int, lam: float
) -> tuple[float, Word | None]:
    worst, worst_word = 0.0, None
    for word in iter_words(system.n_p, depth):
        expected = lam ** len(word) * tilde_series(system, series, word)
        error = float(np.max(np.abs(formal_io_map(sp.lft, word) - expected), initial=0.0))
        error /= max(1.0, float(np.max(np.abs(expected), initial=0.0)))
        if error > worst:
            worst, worst_word = error, word
    return worst, worst_word


def _point_error(
    system: FalpvModel,
    sp: SigmaPsiLft,
    evaluate: PsiEvaluator,
    lam: float,
    rng: np.random.Generator,
    points: int,
    tolerances: Tolerances,
) -> float:
    blocks = np.stack([system.coefficient_block(l) for l in range(1, system.n_psi + 1)])
    # The realization is certified on |p / lam| <= 1 only.
    radius = min(1.0, lam)
    worst = 0.0
    for _ in range(points):
        p = rng.uniform(-radius, radius, size=system.n_p)
        expected = np.tensordot(evaluate(p), blocks, axes=1)
        actual = star_product(sp.lft, delta_of_point(p / lam, sp.lft.blocks), tolerances=tolerances)
        error = float(np.max(np.abs(actual - expected), initial=0.0))
        worst = max(worst, error / max(1.0, float(np.max(np.abs(expected), initial=0.0))))
    return worst


def _fast_path(
    system: FalpvModel, psi: PsiRealization, sp: SigmaPsiLft, tolerances: Tolerances
) -> FastPathReport | None:
    if system.n_psi != 1:
        logger.warning(f"Fast path needs n_psi = 1, got {system.n_psi}; skipping it")
        return None
    L, R = factor_coefficient_block(system, tolerances=tolerances)
    fast = fast_path_factor(system, psi, L, R, tolerances=tolerances)
    equivalence = formal_equivalence(fast.lft, sp.lft, tolerances=tolerances)
    if not equivalence.equivalent:
        logger.warning(f"Fast path disagrees with the minimized construction on word {equivalence.word}")
    return FastPathReport(
        rank=L.shape[1],
        blocks=fast.lft.blocks.dims,
        agrees=equivalence.equivalent,
        separating_word=list(equivalence.word) if equivalence.word is not None else None,
        minimality=is_minimal(fast.lft, tolerances=tolerances),
    )


def transform(
    system: FalpvModel,
    source: PsiRealization | PsiTaylor,
    *,
    expressions: Sequence[str] | None = None,
    fast_path: bool = False,
    depth: int | None = None,
    seed: int | None = None,
    points: int = RANDOM_POINTS,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> TransformResult:
    """Build the LFT associated with ``system``.

    Realizes ``psi`` when Taylor data is given, lifts the pair with Kronecker products, minimizes
    the lifting and assembles it around the LTI part. The result carries a report of every
    intermediate stage and of the verification: series identities up to ``depth`` (default
    ``min(5, dim(lifted) + dim(minimal))``) and ``points`` random scheduling points.
    """
    with get_tracer().start_as_current_span("transform") as span:
        span.set_attributes({"falpv.n_x": system.n_x, "falpv.n_p": system.n_p, "falpv.n_psi": system.n_psi})
        if isinstance(source, PsiTaylor):
            if (source.n_psi, source.n_p) != (system.n_psi, system.n_p):
                raise LftError.of(
                    ErrorCode.CONTRACT,
                    f"Taylor data for {source.n_p} -> {source.n_psi} does not fit {system.dims}",
                )
            prepared = realize_psi(source, tolerances=tolerances)
            psi_source = "taylor"
        else:
            _check_compatible(system, source)
            prepared = prepare_psi(source, tolerances=tolerances)
            psi_source = "realization"
        psi, certificate = prepared.realization, prepared.certificate
        lam = psi.scheduling_scale
        _check_compatible(system, psi)

        lifted = lift_kron(system, psi)
        m = system.n_x + system.n_u
        lifted_certificate = lift_certificate(certificate, m)
        if not verify_certificate(lifted, lifted_certificate, tolerances=tolerances):
            logger.warning("The lifted certificate does not verify on the Kronecker lifting")
        sp = minimal_sigma_psi(system, psi, tolerances=tolerances)
        minimal_certificate = check_stability(sp.lft, tolerances=tolerances)
        assembled = assemble(system, sp, scheduling_scale=lam)
        span.set_attributes(
            {"lft.lifted_dims": list(lifted.blocks.dims), "lft.minimal_dims": list(sp.lft.blocks.dims)}
        )
        logger.debug(f"Lifted blocks {lifted.blocks.dims}, minimal {sp.lft.blocks.dims}")

        lifted_minimality = is_minimal(lifted, tolerances=tolerances)
        full_column_rank = None
        if system.n_psi == 1:
            full_column_rank = numerical_rank(system.coefficient_block(1), tolerances=tolerances) == m
            if full_column_rank and not lifted_minimality.minimal:
                logger.warning("Coefficient block has full column rank but the lifting is not minimal")

        series_depth = min(SERIES_CHECK_DEPTH, lifted.dim + sp.lft.dim) if depth is None else depth
        if isinstance(source, PsiTaylor):
            series = source.series
            series_depth = min(series_depth, series.depth)
        else:
            series = psi_series(psi, series_depth)
        series_error, worst_word = _series_error(system, sp, series, series_depth, lam)
        markov = structured_markov_check(system, assembled, series, series_depth, tolerances=tolerances)

        evaluate = expression_evaluator(expressions, system.n_p) if expressions else realization_evaluator(psi)
        point_error = _point_error(system, sp, evaluate, lam, np.random.default_rng(seed), points, tolerances)
        passed = markov.equivalent and max(series_error, point_error) <= tolerances.equivalence
        if not passed:
            logger.warning(
                f"Verification failed: series error {series_error:.3e} (word {worst_word}), "
                f"point error {point_error:.3e}, word products {'agree' if markov.equivalent else markov.word}"
            )

        report = TransformReport(
            dims=system.dims,
            psi_source=psi_source,
            psi=prepared.report,
            lifted_blocks=lifted.blocks.dims,
            minimal_blocks=sp.lft.blocks.dims,
            assembled_blocks=assembled.lft.blocks.dims,
            lifted_minimality=lifted_minimality,
            minimal_minimality=is_minimal(sp.lft, tolerances=tolerances),
            assembled_minimality=is_minimal(assembled.lft, tolerances=tolerances),
            coefficient_full_column_rank=full_column_rank,
            lifted_margin=lifted_certificate.margin,
            minimal_margin=minimal_certificate.margin if minimal_certificate else None,
            fast_path=_fast_path(system, psi, sp, tolerances) if fast_path else None,
            verification=VerificationSummary(
                series_depth=series_depth,
                series_max_error=series_error,
                points=points,
                point_max_error=point_error,
                point_radius=min(1.0, lam),
                seed=seed,
                passed=passed,
            ),
        )
        span.set_attribute("transform.verified", passed)
        return TransformResult(assembled=assembled, psi=psi, report=report)
