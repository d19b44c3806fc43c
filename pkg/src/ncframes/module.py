"""Matrices and vectors over a block C*-algebra and their flat realizations.

An AMatrix is an r x c grid of algebra elements, stored per summand as a
numpy array of shape (r, c, m_j, m_j).  Flattening interleaves the entry
blocks into one (r*m_j) x (c*m_j) complex matrix per summand; flatten is a
*-isomorphism onto its image, so norms, products and adjoints can be
computed on either side.

Vectors in A^n are AMatrix values with a single column; the A-valued inner
product is conjugate-linear in the first argument, <v, w> = sum_i v_i* w_i
(right-module convention).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraSpec, ShapeError

__all__ = [
    "AMatrix",
    "FlatView",
    "NotCoisometricError",
    "inner_product",
    "is_unitary",
    "is_partial_isometry",
    "complete_to_unitary",
    "coordinate_projection",
]


class NotCoisometricError(ValueError):
    """Input rows are not orthonormal over A, so no unitary completion exists."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"matrix is not a coisometry: ||MM* - I|| = {residual:.3e} > tol = {tol:.3e}"
        )


@dataclass(frozen=True)
class FlatView:
    """Per-summand complex realization of an AMatrix."""

    spec: AlgebraSpec
    rows: int
    cols: int
    blocks: tuple[np.ndarray, ...] = field(repr=False)


@dataclass(frozen=True)
class AMatrix:
    """An r x c matrix with entries in ⊕_j M_{m_j}(C)."""

    spec: AlgebraSpec
    rows: int
    cols: int
    summands: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        dims = self.spec.summand_dims
        if self.rows < 1 or self.cols < 1:
            raise ShapeError("matrix dimensions must be positive")
        if len(self.summands) != len(dims):
            raise ShapeError("wrong number of summand arrays")
        arrays = []
        for m, arr in zip(dims, self.summands):
            a = np.asarray(arr, dtype=complex)
            if a.shape != (self.rows, self.cols, m, m):
                raise ShapeError(
                    f"summand array has shape {a.shape}, expected "
                    f"({self.rows}, {self.cols}, {m}, {m})"
                )
            arrays.append(a)
        object.__setattr__(self, "summands", tuple(arrays))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, spec: AlgebraSpec, rows: int, cols: int) -> "AMatrix":
        return cls(
            spec,
            rows,
            cols,
            tuple(
                np.zeros((rows, cols, m, m), dtype=complex)
                for m in spec.summand_dims
            ),
        )

    @classmethod
    def identity(cls, spec: AlgebraSpec, n: int) -> "AMatrix":
        summands = []
        for m in spec.summand_dims:
            arr = np.zeros((n, n, m, m), dtype=complex)
            idx = np.arange(n)
            arr[idx, idx] = np.eye(m)
            summands.append(arr)
        return cls(spec, n, n, tuple(summands))

    @classmethod
    def from_entries(
        cls, entries: Sequence[Sequence[AlgebraElement]]
    ) -> "AMatrix":
        """Build from a row-major grid of algebra elements sharing one spec."""
        rows = len(entries)
        cols = len(entries[0])
        spec = entries[0][0].spec
        summands = []
        for j, m in enumerate(spec.summand_dims):
            arr = np.zeros((rows, cols, m, m), dtype=complex)
            for p, row in enumerate(entries):
                if len(row) != cols:
                    raise ShapeError("ragged entry grid")
                for q, elem in enumerate(row):
                    if elem.spec != spec:
                        raise ShapeError("entries belong to different algebras")
                    arr[p, q] = elem.blocks[j]
            summands.append(arr)
        return cls(spec, rows, cols, tuple(summands))

    @classmethod
    def from_flat(
        cls,
        blocks: Iterable[np.ndarray],
        rows: int,
        cols: int,
        spec: AlgebraSpec,
    ) -> "AMatrix":
        """Inverse of flatten: split (r*m) x (c*m) matrices back into entries."""
        summands = []
        for m, blk in zip(spec.summand_dims, blocks):
            a = np.asarray(blk, dtype=complex)
            if a.shape != (rows * m, cols * m):
                raise ShapeError(
                    f"flat block has shape {a.shape}, expected ({rows * m}, {cols * m})"
                )
            summands.append(
                a.reshape(rows, m, cols, m).transpose(0, 2, 1, 3).copy()
            )
        return cls(spec, rows, cols, tuple(summands))

    @classmethod
    def column_vector(cls, entries: Sequence[AlgebraElement]) -> "AMatrix":
        return cls.from_entries([[e] for e in entries])

    @classmethod
    def random(
        cls, spec: AlgebraSpec, rows: int, cols: int, rng: np.random.Generator
    ) -> "AMatrix":
        summands = []
        for m in spec.summand_dims:
            re = rng.standard_normal((rows, cols, m, m))
            im = rng.standard_normal((rows, cols, m, m))
            summands.append((re + 1j * im) / np.sqrt(2.0))
        return cls(spec, rows, cols, tuple(summands))

    # -- views and entries -------------------------------------------------

    def flatten(self) -> FlatView:
        blocks = tuple(
            arr.transpose(0, 2, 1, 3).reshape(
                self.rows * m, self.cols * m
            )
            for m, arr in zip(self.spec.summand_dims, self.summands)
        )
        return FlatView(self.spec, self.rows, self.cols, blocks)

    @classmethod
    def unflatten(cls, view: FlatView) -> "AMatrix":
        return cls.from_flat(view.blocks, view.rows, view.cols, view.spec)

    def entry(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(
            self.spec, tuple(arr[i, j] for arr in self.summands)
        )

    def column(self, j: int) -> "AMatrix":
        return AMatrix(
            self.spec,
            self.rows,
            1,
            tuple(arr[:, j : j + 1] for arr in self.summands),
        )

    def select_columns(self, indices: Sequence[int]) -> "AMatrix":
        idx = list(indices)
        return AMatrix(
            self.spec,
            self.rows,
            len(idx),
            tuple(arr[:, idx] for arr in self.summands),
        )

    # -- algebra -----------------------------------------------------------

    def _check_same_spec(self, other: "AMatrix"):
        if self.spec != other.spec:
            raise ShapeError("matrices over different algebras")

    def __add__(self, other: "AMatrix") -> "AMatrix":
        self._check_same_spec(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in addition")
        return AMatrix(
            self.spec,
            self.rows,
            self.cols,
            tuple(a + b for a, b in zip(self.summands, other.summands)),
        )

    def __sub__(self, other: "AMatrix") -> "AMatrix":
        self._check_same_spec(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in subtraction")
        return AMatrix(
            self.spec,
            self.rows,
            self.cols,
            tuple(a - b for a, b in zip(self.summands, other.summands)),
        )

    def __mul__(self, scalar) -> "AMatrix":
        return AMatrix(
            self.spec,
            self.rows,
            self.cols,
            tuple(complex(scalar) * a for a in self.summands),
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "AMatrix") -> "AMatrix":
        self._check_same_spec(other)
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        summands = tuple(
            np.einsum("ipxy,pjyz->ijxz", a, b)
            for a, b in zip(self.summands, other.summands)
        )
        return AMatrix(self.spec, self.rows, other.cols, summands)

    def adjoint(self) -> "AMatrix":
        """Conjugate transpose over A: (M*)_ij = (M_ji)*."""
        summands = tuple(
            arr.transpose(1, 0, 3, 2).conj() for arr in self.summands
        )
        return AMatrix(self.spec, self.cols, self.rows, summands)

    @property
    def H(self) -> "AMatrix":
        return self.adjoint()

    def norm(self) -> float:
        """Operator norm: the largest summand spectral norm of the flat view."""
        return max(float(np.linalg.norm(b, 2)) for b in self.flatten().blocks)

    def allclose(self, other: "AMatrix", tol: float = 1e-12) -> bool:
        self._check_same_spec(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            np.allclose(a, b, rtol=0.0, atol=tol)
            for a, b in zip(self.summands, other.summands)
        )


def inner_product(v: AMatrix, w: AMatrix) -> AlgebraElement:
    """A-valued pairing <v, w> = sum_i v_i* w_i for column vectors in A^n."""
    if v.cols != 1 or w.cols != 1:
        raise ShapeError("inner_product expects column vectors")
    if v.spec != w.spec or v.rows != w.rows:
        raise ShapeError("vectors must share algebra and length")
    return (v.H @ w).entry(0, 0)


def is_unitary(M: AMatrix, tol: float = 1e-9) -> bool:
    """True iff both ||MM* - I|| and ||M*M - I|| are at most tol."""
    if M.rows != M.cols:
        raise ShapeError("is_unitary expects a square matrix")
    eye = AMatrix.identity(M.spec, M.rows)
    return (M @ M.H - eye).norm() <= tol and (M.H @ M - eye).norm() <= tol


def is_partial_isometry(M: AMatrix, tol: float = 1e-9) -> bool:
    """True iff ||M M* M - M|| <= tol * max(1, ||M||)."""
    defect = (M @ M.H @ M - M).norm()
    return defect <= tol * max(1.0, M.norm())


def _pivoted_complement_basis(flat: np.ndarray, want: int) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of a coisometric flat matrix.

    Deterministic pivoted modified Gram-Schmidt on the columns of the
    orthogonal projector I - M*M, choosing the largest residual column at
    each step (ties broken by lowest index).  For [I | 0] this returns the
    trailing standard basis vectors in ascending order.
    """
    dim = flat.shape[1]
    proj = np.eye(dim, dtype=complex) - flat.conj().T @ flat
    residuals = proj.copy()
    basis = np.zeros((dim, want), dtype=complex)
    for step in range(want):
        norms = np.linalg.norm(residuals, axis=0)
        j = int(np.argmax(norms))
        if norms[j] < 1e-8:
            raise NotCoisometricError(float(norms[j]), 1e-8)
        q = residuals[:, j] / norms[j]
        # second orthogonalization pass for stability
        for prev in range(step):
            q = q - basis[:, prev] * (basis[:, prev].conj() @ q)
        q = q / np.linalg.norm(q)
        basis[:, step] = q
        residuals -= np.outer(q, q.conj() @ residuals)
    return basis


def _fix_row_phases(rows: np.ndarray) -> np.ndarray:
    """Scale each row so its first non-negligible entry is real positive."""
    out = rows.copy()
    for i in range(out.shape[0]):
        row = out[i]
        nz = np.nonzero(np.abs(row) > 1e-12)[0]
        if nz.size:
            pivot = row[nz[0]]
            out[i] = row * (abs(pivot) / pivot)
    return out


def complete_to_unitary(M: AMatrix, tol: float = 1e-9) -> AMatrix:
    """Extend a coisometric n x k matrix to a k x k unitary over A.

    The first n rows of the result equal M; the remaining rows are a
    deterministic orthonormal basis of the orthogonal complement of the row
    space, computed per summand with each added row's leading entry made
    real positive.

    Raises
    ------
    NotCoisometricError
        If ||MM* - I|| > tol.
    """
    n, k = M.rows, M.cols
    if n > k:
        raise ShapeError("completion needs at least as many columns as rows")
    eye = AMatrix.identity(M.spec, n)
    residual = (M @ M.H - eye).norm()
    if residual > tol:
        raise NotCoisometricError(residual, tol)
    out_blocks = []
    for m, flat in zip(M.spec.summand_dims, M.flatten().blocks):
        want = (k - n) * m
        if want == 0:
            out_blocks.append(flat)
            continue
        basis = _pivoted_complement_basis(flat, want)
        extra = _fix_row_phases(basis.conj().T)
        out_blocks.append(np.vstack([flat, extra]))
    return AMatrix.from_flat(out_blocks, k, k, M.spec)


def coordinate_projection(
    spec: AlgebraSpec, k: int, indices: Iterable[int]
) -> AMatrix:
    """Diagonal k x k projection Q_I with 1_A on positions in I (0-based)."""
    idx = sorted(set(int(i) for i in indices))
    if idx and (idx[0] < 0 or idx[-1] >= k):
        raise IndexError(f"index set {idx} out of range for k={k}")
    summands = []
    for m in spec.summand_dims:
        arr = np.zeros((k, k, m, m), dtype=complex)
        for i in idx:
            arr[i, i] = np.eye(m)
        summands.append(arr)
    return AMatrix(spec, k, k, tuple(summands))
