"""Finite-dimensional C*-algebras as direct sums of complex matrix blocks.

An algebra is described by its block sizes [m_1, ..., m_s]; an element is a
block-diagonal complex matrix stored as one dense block per summand.  The
operator norm, involution, positivity and the normalized trace are all
computed blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ShapeError",
    "AlgebraSpec",
    "AlgebraElement",
]


class ShapeError(ValueError):
    """Operands do not conform (different algebra or incompatible shapes)."""


@dataclass(frozen=True)
class AlgebraSpec:
    """Block structure of a finite-dimensional C*-algebra.

    Parameters
    ----------
    summand_dims : tuple of int
        Sizes m_j >= 1 of the matrix blocks, in order.
    """

    summand_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(m) for m in self.summand_dims)
        if len(dims) < 1:
            raise ValueError("algebra needs at least one summand")
        if any(m < 1 for m in dims):
            raise ValueError(f"block sizes must be positive, got {dims}")
        object.__setattr__(self, "summand_dims", dims)

    @property
    def num_summands(self) -> int:
        return len(self.summand_dims)

    @property
    def total_dim(self) -> int:
        """Complex dimension sum m_j**2."""
        return sum(m * m for m in self.summand_dims)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(
            self, tuple(np.eye(m, dtype=complex) for m in self.summand_dims)
        )

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(
            self, tuple(np.zeros((m, m), dtype=complex) for m in self.summand_dims)
        )

    def from_scalar(self, z: complex) -> "AlgebraElement":
        """The element z * 1_A."""
        return AlgebraElement(
            self, tuple(z * np.eye(m, dtype=complex) for m in self.summand_dims)
        )

    def random_element(self, rng: np.random.Generator) -> "AlgebraElement":
        """Independent standard complex Gaussian entries per block."""
        blocks = []
        for m in self.summand_dims:
            re = rng.standard_normal((m, m))
            im = rng.standard_normal((m, m))
            blocks.append((re + 1j * im) / np.sqrt(2.0))
        return AlgebraElement(self, tuple(blocks))


@dataclass(frozen=True)
class AlgebraElement:
    """An element of ⊕_j M_{m_j}(C), one complex block per summand.

    Values are treated as immutable; operations return new elements.
    """

    spec: AlgebraSpec
    blocks: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        dims = self.spec.summand_dims
        if len(self.blocks) != len(dims):
            raise ShapeError(
                f"expected {len(dims)} blocks, got {len(self.blocks)}"
            )
        blocks = []
        for m, blk in zip(dims, self.blocks):
            arr = np.asarray(blk, dtype=complex)
            if arr.shape != (m, m):
                raise ShapeError(f"block has shape {arr.shape}, expected ({m}, {m})")
            blocks.append(arr)
        object.__setattr__(self, "blocks", tuple(blocks))

    def _check_same_spec(self, other: "AlgebraElement"):
        if self.spec != other.spec:
            raise ShapeError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_spec(other)
        return AlgebraElement(
            self.spec, tuple(a + b for a, b in zip(self.blocks, other.blocks))
        )

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_spec(other)
        return AlgebraElement(
            self.spec, tuple(a - b for a, b in zip(self.blocks, other.blocks))
        )

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.spec, tuple(-a for a in self.blocks))

    def __mul__(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            self._check_same_spec(other)
            return AlgebraElement(
                self.spec, tuple(a @ b for a, b in zip(self.blocks, other.blocks))
            )
        return AlgebraElement(self.spec, tuple(complex(other) * a for a in self.blocks))

    def __rmul__(self, other) -> "AlgebraElement":
        return AlgebraElement(self.spec, tuple(complex(other) * a for a in self.blocks))

    def adjoint(self) -> "AlgebraElement":
        """Blockwise conjugate transpose."""
        return AlgebraElement(self.spec, tuple(a.conj().T for a in self.blocks))

    def norm(self) -> float:
        """The C*-norm: the largest singular value over all blocks."""
        return max(float(np.linalg.norm(a, 2)) for a in self.blocks)

    def is_positive(self, tol: float = 1e-9) -> bool:
        """Hermitian within tol and smallest eigenvalue >= -tol, per block."""
        if tol <= 0:
            raise ValueError("tol must be positive")
        for a in self.blocks:
            if np.linalg.norm(a - a.conj().T, 2) > tol:
                return False
            herm = (a + a.conj().T) / 2
            if float(np.linalg.eigvalsh(herm)[0]) < -tol:
                return False
        return True

    def normalized_trace(self) -> complex:
        """Sum of block traces divided by sum of block sizes."""
        tr = sum(complex(np.trace(a)) for a in self.blocks)
        return tr / sum(self.spec.summand_dims)

    def allclose(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        self._check_same_spec(other)
        return all(
            np.allclose(a, b, rtol=0.0, atol=tol)
            for a, b in zip(self.blocks, other.blocks)
        )
