from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator
from scipy.linalg import block_diag

from falpv_lft.models.types import Matrix, Word


class ValueModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Tolerances(ValueModel):
    """Numerical thresholds shared by every operation."""

    rank: float = 1e-10
    rcond: float = 1e-10
    equivalence: float = 1e-9
    factor: float = 1e-10
    certificate: float = 1e-12
    margin: float = 1e-6
    symmetry: float = 1e-10
    isomorphism: float = 1e-8
    trajectory: float = 1e-9
    conditioning: float = 1e8


DEFAULT_TOLERANCES = Tolerances()


class BlockStructure(ValueModel):
    dims: tuple[int, ...]

    def model_post_init(self, __context: Any) -> None:
        if len(self.dims) < 1:
            raise ValueError("A block structure needs at least one block")
        if any(n < 0 for n in self.dims):
            raise ValueError(f"Block sizes must be non-negative, got {self.dims}")

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(offset) for offset in np.concatenate(([0], np.cumsum(self.dims, dtype=int))))

    def slice(self, letter: int) -> slice:
        """Index range of block ``letter`` (1-based, like the letters of a word)."""
        if not 1 <= letter <= self.d:
            raise IndexError(f"Block {letter} outside 1..{self.d}")
        offsets = self.offsets
        return slice(offsets[letter - 1], offsets[letter])

    def kron(self, factor: int) -> "BlockStructure":
        return BlockStructure(dims=tuple(n * factor for n in self.dims))


class FalpvDims(ValueModel):
    n_x: int
    n_u: int
    n_y: int
    n_p: int
    n_psi: int


class FalpvModel(ValueModel):
    """Discrete-time LPV model whose matrices are affine in ψ(p).

    ``A[l]``, ``B[l]``, ``C[l]``, ``D[l]`` for ``l = 0..n_psi`` are the coefficients of
    ``X(p) = X_0 + sum_l X_l psi_l(p)``. The scheduling domain is ``[-1, 1]^n_p``.

    ``n_x = 0`` is allowed: it is the static gain ``y = D(p) u`` that minimization returns when no
    state is both reachable and observable.
    """

    n_p: int
    A: tuple[Matrix, ...]
    B: tuple[Matrix, ...]
    C: tuple[Matrix, ...]
    D: tuple[Matrix, ...]
    description: str | None = None

    def model_post_init(self, __context: Any) -> None:
        if self.n_p < 1:
            raise ValueError("n_p must be positive")
        counts = {len(self.A), len(self.B), len(self.C), len(self.D)}
        if len(counts) != 1 or len(self.A) < 2:
            raise ValueError("A, B, C and D need the same number (n_psi + 1 >= 2) of coefficients")
        n_x, n_u, n_y = self.A[0].shape[0], self.B[0].shape[1], self.C[0].shape[0]
        if min(n_u, n_y) < 1:
            raise ValueError("n_u and n_y must be positive")
        expected = {"A": (n_x, n_x), "B": (n_x, n_u), "C": (n_y, n_x), "D": (n_y, n_u)}
        for name, shape in expected.items():
            for index, matrix in enumerate(getattr(self, name)):
                if matrix.shape != shape:
                    raise ValueError(f"{name}[{index}] has shape {matrix.shape}, expected {shape}")

    @property
    def n_x(self) -> int:
        return self.A[0].shape[0]

    @property
    def n_u(self) -> int:
        return self.B[0].shape[1]

    @property
    def n_y(self) -> int:
        return self.C[0].shape[0]

    @property
    def n_psi(self) -> int:
        return len(self.A) - 1

    @property
    def dims(self) -> FalpvDims:
        return FalpvDims(n_x=self.n_x, n_u=self.n_u, n_y=self.n_y, n_p=self.n_p, n_psi=self.n_psi)

    def coefficient_block(self, index: int) -> np.ndarray:
        """The stacked ``[[A_l, B_l], [C_l, D_l]]`` matrix."""
        return np.block([[self.A[index], self.B[index]], [self.C[index], self.D[index]]])


class LftModel(ValueModel):
    """Constant LTI part ``(A, B, C, D)`` closed over a block-diagonal uncertainty with ``blocks``."""

    blocks: BlockStructure
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix

    def model_post_init(self, __context: Any) -> None:
        n = self.blocks.total
        p, m = self.D.shape
        expected = {"A": (n, n), "B": (n, m), "C": (p, n)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def p_out(self) -> int:
        return self.D.shape[0]

    @property
    def m_in(self) -> int:
        return self.D.shape[1]

    @property
    def d(self) -> int:
        return self.blocks.d

    @property
    def dim(self) -> int:
        return self.blocks.total

    def A_cell(self, i: int, j: int) -> np.ndarray:
        return self.A[self.blocks.slice(i), self.blocks.slice(j)]

    def B_cell(self, j: int) -> np.ndarray:
        return self.B[self.blocks.slice(j)]

    def C_cell(self, i: int) -> np.ndarray:
        return self.C[:, self.blocks.slice(i)]

    def transpose(self) -> "LftModel":
        """The dual LFT ``(A^T, C^T, B^T, D^T)``; its reachability is the observability of ``self``."""
        return LftModel(blocks=self.blocks, A=self.A.T, B=self.C.T, C=self.B.T, D=self.D.T)


class LftCells(ValueModel):
    """Canonical partition of an LFT; ``A[i][j]``, ``B[j]`` and ``C[i]`` are 0-based here."""

    A: tuple[tuple[Matrix, ...], ...]
    B: tuple[Matrix, ...]
    C: tuple[Matrix, ...]


class LftReduction(ValueModel):
    """A reduced LFT with the per-block maps relating its state to the original one.

    ``projections[i]`` maps block ``i + 1`` of the original state onto the reduced block and
    ``embeddings[i]`` maps it back; their product is the identity on the reduced block.
    """

    lft: LftModel
    projections: tuple[Matrix, ...]
    embeddings: tuple[Matrix, ...]


class MinimalityVerdict(ValueModel):
    minimal: bool
    reachable: tuple[int, ...]
    observable: tuple[int, ...]


class PsiRealization(ValueModel):
    """LFT realization ``psi(p) = H Delta_p (I - F Delta_p)^-1 G`` of the scheduling map.

    ``scheduling_scale`` is the factor ``lam`` such that the realization reproduces ``psi(lam * p)``.
    """

    lft: LftModel
    scheduling_scale: float = 1.0

    def model_post_init(self, __context: Any) -> None:
        if self.lft.m_in != 1:
            raise ValueError("A psi realization has a single input column")
        if np.any(self.lft.D != 0):
            raise ValueError("A psi realization has a zero feedthrough")
        if not 0 < self.scheduling_scale <= 1:
            raise ValueError("scheduling_scale must lie in (0, 1]")

    @classmethod
    def from_matrices(cls, F: Any, G: Any, H: Any, dims: tuple[int, ...]) -> "PsiRealization":
        n = sum(dims)
        H = np.asarray(H, dtype=float)
        H = H.reshape(H.shape[0] if H.ndim == 2 else 1, n)
        return cls(
            lft=LftModel(
                blocks=BlockStructure(dims=dims),
                A=np.asarray(F, dtype=float).reshape(n, n),
                B=np.asarray(G, dtype=float).reshape(n, 1),
                C=H,
                D=np.zeros((H.shape[0], 1)),
            )
        )

    @property
    def F(self) -> np.ndarray:
        return self.lft.A

    @property
    def G(self) -> np.ndarray:
        return self.lft.B

    @property
    def H(self) -> np.ndarray:
        return self.lft.C

    @property
    def n_psi(self) -> int:
        return self.lft.p_out

    @property
    def n_p(self) -> int:
        return self.lft.d


class TruncatedSeries(ValueModel):
    """Word-indexed matrices up to ``depth``; absent words are zero."""

    alphabet: int
    depth: int
    shape: tuple[int, int]
    coeffs: dict[Word, Matrix] = Field(default_factory=dict)

    @field_validator("coeffs", mode="before")
    @classmethod
    def _entries_to_dict(cls, value: Any) -> Any:
        if isinstance(value, list):
            return {tuple(entry["word"]): entry["value"] for entry in value}
        return value

    @field_serializer("coeffs")
    def _dict_to_entries(self, coeffs: dict[Word, np.ndarray]) -> list[dict[str, Any]]:
        return [{"word": list(word), "value": value.tolist()} for word, value in sorted(coeffs.items())]

    def model_post_init(self, __context: Any) -> None:
        if self.alphabet < 1 or self.depth < 0:
            raise ValueError("alphabet must be positive and depth non-negative")
        for word, value in self.coeffs.items():
            if len(word) > self.depth:
                raise ValueError(f"Word {word} is longer than depth {self.depth}")
            if any(not 1 <= letter <= self.alphabet for letter in word):
                raise ValueError(f"Word {word} has letters outside 1..{self.alphabet}")
            if value.shape != self.shape:
                raise ValueError(f"Coefficient of {word} has shape {value.shape}, expected {self.shape}")

    def coefficient(self, word: Word) -> np.ndarray:
        value = self.coeffs.get(tuple(word))
        return value if value is not None else np.zeros(self.shape)

    @property
    def constant(self) -> np.ndarray:
        return self.coefficient(())

    def is_zero(self, *, atol: float = 0.0) -> bool:
        return all(np.all(np.abs(value) <= atol) for value in self.coeffs.values())


class PsiTaylor(ValueModel):
    """Taylor coefficients of ``psi`` together with the order bound used to realize them."""

    series: TruncatedSeries
    order_bound: int

    def model_post_init(self, __context: Any) -> None:
        if self.series.shape[1] != 1:
            raise ValueError("Taylor data of psi has a single column")
        if self.order_bound < 1:
            raise ValueError("order_bound must be positive")

    @property
    def n_psi(self) -> int:
        return self.series.shape[0]

    @property
    def n_p(self) -> int:
        return self.series.alphabet


class LinearRepresentation(ValueModel):
    """Shared-state representation ``coeff(s_1...s_k) = C A_{s_k} ... A_{s_2} B_{s_1}``."""

    C: Matrix
    A: tuple[Matrix, ...]
    B: tuple[Matrix, ...]

    def model_post_init(self, __context: Any) -> None:
        n = self.C.shape[1]
        if len(self.A) != len(self.B) or len(self.A) < 1:
            raise ValueError("One state matrix and one input matrix per letter are required")
        for letter, (A, B) in enumerate(zip(self.A, self.B, strict=True), start=1):
            if A.shape != (n, n):
                raise ValueError(f"A_{letter} has shape {A.shape}, expected {(n, n)}")
            if B.shape[0] != n or B.shape[1] != self.B[0].shape[1]:
                raise ValueError(f"B_{letter} has shape {B.shape}, expected ({n}, {self.B[0].shape[1]})")

    @property
    def state_dim(self) -> int:
        return self.C.shape[1]

    @property
    def alphabet(self) -> int:
        return len(self.A)

    @property
    def shape(self) -> tuple[int, int]:
        return self.C.shape[0], self.B[0].shape[1]

    def coefficient(self, word: Word) -> np.ndarray:
        if len(word) == 0:
            raise ValueError("The representation does not carry the empty-word coefficient")
        state = self.B[word[0] - 1]
        for letter in word[1:]:
            state = self.A[letter - 1] @ state
        return self.C @ state


class StabilityCertificate(ValueModel):
    blocks: BlockStructure
    P: tuple[Matrix, ...]
    margin: float
    method: str = "identity"

    def model_post_init(self, __context: Any) -> None:
        if len(self.P) != self.blocks.d:
            raise ValueError("One P block per uncertainty block is required")
        for index, (P, n) in enumerate(zip(self.P, self.blocks.dims, strict=True), start=1):
            if P.shape != (n, n):
                raise ValueError(f"P_{index} has shape {P.shape}, expected {(n, n)}")
            if n and np.max(np.abs(P - P.T)) > DEFAULT_TOLERANCES.symmetry * max(1.0, np.max(np.abs(P))):
                raise ValueError(f"P_{index} is not symmetric")
            if n and np.min(np.linalg.eigvalsh(P)) <= 0:
                raise ValueError(f"P_{index} is not positive definite")
        if self.margin <= 0:
            raise ValueError("A certificate needs a positive margin")

    @property
    def matrix(self) -> np.ndarray:
        if self.blocks.total == 0:
            return np.zeros((0, 0))
        return block_diag(*[P for P in self.P if P.size])


class SigmaPsiLft(ValueModel):
    """Minimal realization of the lifted series, with ``H = [Hx; Hy]`` and ``G = [Gx, Gu]``."""

    lft: LftModel
    n_x: int
    n_u: int
    n_y: int

    def model_post_init(self, __context: Any) -> None:
        if self.lft.p_out != self.n_x + self.n_y or self.lft.m_in != self.n_x + self.n_u:
            raise ValueError("Signature does not match (n_x + n_y) x (n_x + n_u)")
        if np.any(self.lft.D != 0):
            raise ValueError("The lifted realization has a zero feedthrough")

    @property
    def F(self) -> np.ndarray:
        return self.lft.A

    @property
    def Hx(self) -> np.ndarray:
        return self.lft.C[: self.n_x]

    @property
    def Hy(self) -> np.ndarray:
        return self.lft.C[self.n_x :]

    @property
    def Gx(self) -> np.ndarray:
        return self.lft.B[:, : self.n_x]

    @property
    def Gu(self) -> np.ndarray:
        return self.lft.B[:, self.n_x :]


class AssembledLft(ValueModel):
    """The LFT associated with an FALPV; block 1 carries the backward shift."""

    lft: LftModel
    provenance: FalpvDims
    scheduling_scale: float = 1.0

    def model_post_init(self, __context: Any) -> None:
        dims = self.provenance
        if self.lft.d != dims.n_p + 1:
            raise ValueError(f"Expected {dims.n_p + 1} blocks, got {self.lft.d}")
        if self.lft.blocks.dims[0] != dims.n_x:
            raise ValueError("The first block must have size n_x")
        if (self.lft.p_out, self.lft.m_in) != (dims.n_y, dims.n_u):
            raise ValueError("Signature does not match n_y x n_u")
        if not 0 < self.scheduling_scale <= 1:
            raise ValueError("scheduling_scale must lie in (0, 1]")

    @property
    def n_x(self) -> int:
        return self.provenance.n_x

    @property
    def uncertainty_blocks(self) -> BlockStructure:
        return BlockStructure(dims=self.lft.blocks.dims[1:])

    @property
    def sigma_psi(self) -> SigmaPsiLft:
        n_x = self.n_x
        return SigmaPsiLft(
            lft=LftModel(
                blocks=self.uncertainty_blocks,
                A=self.lft.A[n_x:, n_x:],
                B=np.hstack([self.lft.A[n_x:, :n_x], self.lft.B[n_x:]]),
                C=np.vstack([self.lft.A[:n_x, n_x:], self.lft.C[:, n_x:]]),
                D=np.zeros((n_x + self.lft.p_out, n_x + self.lft.m_in)),
            ),
            n_x=n_x,
            n_u=self.lft.m_in,
            n_y=self.lft.p_out,
        )


class Trajectory(ValueModel):
    """Rows are time instants: ``x`` holds ``x(0..T)``, the other signals ``0..T-1``."""

    u: Matrix
    p: Matrix
    x: Matrix
    y: Matrix

    def model_post_init(self, __context: Any) -> None:
        if self.x.shape[0] != self.horizon + 1 or self.y.shape[0] != self.horizon or self.p.shape[0] != self.horizon:
            raise ValueError("Signal lengths do not match the horizon")
        if np.any(self.x[0] != 0):
            raise ValueError("Trajectories start from the zero state")
        if np.any(np.abs(self.p) > 1):
            raise ValueError("Scheduling values must lie in [-1, 1]")

    @property
    def horizon(self) -> int:
        return self.u.shape[0]


class Signals(ValueModel):
    u: Matrix
    p: Matrix
    seed: int | None = None

    def model_post_init(self, __context: Any) -> None:
        if self.u.shape[0] != self.p.shape[0]:
            raise ValueError("u and p must have the same number of samples")
        if np.any(np.abs(self.p) > 1):
            raise ValueError("Scheduling values must lie in [-1, 1]")

    @property
    def horizon(self) -> int:
        return self.u.shape[0]


class AffineBasis(ValueModel):
    points: Matrix
    coefficients: Matrix
    condition: float
    residual: float


__all__ = [
    "DEFAULT_TOLERANCES",
    "AffineBasis",
    "AssembledLft",
    "BlockStructure",
    "FalpvDims",
    "FalpvModel",
    "LftCells",
    "LftModel",
    "LftReduction",
    "LinearRepresentation",
    "MinimalityVerdict",
    "PsiRealization",
    "PsiTaylor",
    "Signals",
    "SigmaPsiLft",
    "StabilityCertificate",
    "Tolerances",
    "Trajectory",
    "TruncatedSeries",
    "ValueModel",
]
