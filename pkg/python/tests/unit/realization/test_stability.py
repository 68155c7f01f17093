import numpy as np
import pytest
from falpv_lft.core.lft import delta_of_point, star_product
from falpv_lft.models import BlockStructure, LftModel, PsiRealization
from falpv_lft.realization.stability import (
    certificate_margin,
    check_stability,
    lift_certificate,
    stabilize_scale,
    verify_certificate,
)


def test_geometric_psi_is_certified_by_identity(example2_psi: PsiRealization) -> None:
    certificate = check_stability(example2_psi.lft)
    assert certificate is not None
    assert certificate.method == "identity"
    assert certificate.margin == pytest.approx(0.75)
    assert verify_certificate(example2_psi.lft, certificate)


def test_nilpotent_psi_needs_lyapunov(example1_psi: PsiRealization) -> None:
    certificate = check_stability(example1_psi.lft)
    assert certificate is not None
    assert certificate.method == "lyapunov"
    np.testing.assert_allclose(certificate.matrix, np.diag([2.0, 1.0]), atol=1e-10)
    assert certificate.margin == pytest.approx(1.0)


def test_unstable_lft_has_no_certificate() -> None:
    assert check_stability(PsiRealization.from_matrices([[2.0]], [1.0], [1.0], (1,)).lft) is None


def test_empty_lft_is_trivially_stable() -> None:
    M = LftModel(
        blocks=BlockStructure(dims=(0, 0)), A=np.zeros((0, 0)), B=np.zeros((0, 1)), C=np.zeros((1, 0)), D=[[0.0]]
    )
    certificate = check_stability(M)
    assert certificate is not None
    assert certificate.margin == 1.0


def test_two_block_certificate() -> None:
    M = LftModel(
        blocks=BlockStructure(dims=(1, 1)),
        A=[[0.0, 3.0], [0.1, 0.0]],
        B=[[1.0], [0.0]],
        C=[[1.0, 0.0]],
        D=[[0.0]],
    )
    certificate = check_stability(M)
    assert certificate is not None
    assert certificate.method != "identity"
    assert certificate_margin(M.A, certificate.matrix) > 0
    assert verify_certificate(M, certificate)


def test_lifted_certificate_keeps_the_margin(example2_psi: PsiRealization) -> None:
    certificate = check_stability(example2_psi.lft)
    lifted = lift_certificate(certificate, 3)
    assert lifted.blocks.dims == (3,)
    np.testing.assert_array_equal(lifted.matrix, np.eye(3))
    assert lifted.margin == certificate.margin


def test_stabilize_scale() -> None:
    psi = PsiRealization.from_matrices([[1.5]], [1.0], [1.0], (1,))
    scaled, scale = stabilize_scale(psi)
    assert 0 < scale < 1 / 1.5
    assert scaled.scheduling_scale == scale
    assert check_stability(scaled.lft) is not None

    p = 0.3
    value = star_product(scaled.lft, delta_of_point([p / scale], scaled.lft.blocks))[0, 0]
    assert value == pytest.approx(p / (1 - 1.5 * p))


def test_stable_realization_is_not_scaled(example2_psi: PsiRealization) -> None:
    scaled, scale = stabilize_scale(example2_psi)
    assert scale == 1.0
    assert scaled is example2_psi
