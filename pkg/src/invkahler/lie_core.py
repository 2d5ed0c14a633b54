"""Compact matrix Lie algebras: bracket, adjoint matrices, exponentials.

Points of the Lie algebra are plain real numpy vectors of coordinates in the
algebra's basis.  Group elements of ``G`` and of its complexification are
complex matrices in the chosen representation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.linalg

EXP_NORM_BOUND = 50.0


class LieAlgebraError(ValueError):
    """Raised when algebra data violate the Lie algebra axioms."""


@dataclass(frozen=True)
class GroupElement:
    """An invertible complex matrix, flagged when it lies in the compact form."""

    matrix: np.ndarray
    real_form: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("group element must be a square matrix")
        if not abs(np.linalg.det(m)) > 0:
            raise ValueError("group element must be invertible")
        if self.real_form:
            defect = np.max(np.abs(m @ m.conj().T - np.eye(len(m))))
            if defect > 1e-10:
                raise ValueError(f"element flagged real_form is not unitary (defect {defect:.2e})")
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __matmul__(self, other):
        other_m = np.asarray(other)
        real = self.real_form and isinstance(other, GroupElement) and other.real_form
        return GroupElement(self.matrix @ other_m, real_form=real)

    def inv(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), real_form=self.real_form)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A compact Lie algebra with invariant inner product and matrix representation.

    Parameters
    ----------
    name : str
    structure_constants : (n, n, n) array
        ``[e_i, e_j] = sum_k C[i, j, k] e_k``.
    gram : (n, n) array
        Symmetric positive-definite ad-invariant inner product.
    rep_basis : (n, m, m) complex array
        Anti-Hermitian images of the basis vectors.
    """

    name: str
    structure_constants: np.ndarray
    gram: np.ndarray
    rep_basis: np.ndarray
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        C = np.asarray(self.structure_constants, dtype=float)
        g = np.asarray(self.gram, dtype=float)
        R = np.asarray(self.rep_basis, dtype=complex)
        n = C.shape[0]
        if C.shape != (n, n, n) or g.shape != (n, n) or R.shape[0] != n:
            raise LieAlgebraError("inconsistent shapes for structure constants, gram and rep basis")
        if R.ndim != 3 or R.shape[1] != R.shape[2]:
            raise LieAlgebraError("rep_basis must hold n square matrices")
        object.__setattr__(self, "structure_constants", C)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "rep_basis", R)
        self.validate()

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def rep_dim(self) -> int:
        return self.rep_basis.shape[1]

    # -- axioms -----------------------------------------------------------

    def jacobi_residual(self) -> float:
        C = self.structure_constants
        # [[e_i,e_j],e_k] + cyclic, component l
        t = np.einsum("ijm,mkl->ijkl", C, C)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(cyc))) if self.dim else 0.0

    def invariance_residual(self) -> float:
        # [X,Y].Z + Y.[X,Z] over basis triples
        C, g = self.structure_constants, self.gram
        t = np.einsum("ijm,mk->ijk", C, g)  # [e_i,e_j].e_k
        return float(np.max(np.abs(t + t.transpose(0, 2, 1)))) if self.dim else 0.0

    def rep_residual(self) -> float:
        R, C = self.rep_basis, self.structure_constants
        comm = np.einsum("iab,jbc->ijac", R, R) - np.einsum("jab,ibc->ijac", R, R)
        rhs = np.einsum("ijk,kac->ijac", C, R)
        return float(np.max(np.abs(comm - rhs))) if self.dim else 0.0

    def validate(self) -> None:
        C, g, R = self.structure_constants, self.gram, self.rep_basis
        scale = max(1.0, float(np.max(np.abs(C))) if C.size else 1.0)
        if np.max(np.abs(C + C.transpose(1, 0, 2)), initial=0.0) > self.tol * scale:
            raise LieAlgebraError("structure constants are not antisymmetric")
        if self.jacobi_residual() > self.tol * scale**2:
            raise LieAlgebraError(f"Jacobi identity fails (residual {self.jacobi_residual():.2e})")
        if np.max(np.abs(g - g.T)) > self.tol:
            raise LieAlgebraError("gram matrix is not symmetric")
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise LieAlgebraError("gram matrix is not positive definite")
        if self.invariance_residual() > self.tol * scale * np.max(np.abs(g)):
            raise LieAlgebraError("gram matrix is not ad-invariant")
        if np.max(np.abs(R + R.conj().transpose(0, 2, 1)), initial=0.0) > 1e-12:
            raise LieAlgebraError("rep basis matrices must be anti-Hermitian")
        if self.rep_residual() > 1e-12 * scale:
            raise LieAlgebraError("rep basis does not represent the structure constants")

    # -- algebra ------------------------------------------------------------

    def _check(self, *xs):
        for x in xs:
            if np.shape(x) != (self.dim,):
                raise ValueError(f"expected a point with {self.dim} coordinates, got shape {np.shape(x)}")

    def bracket(self, x, y) -> np.ndarray:
        """Lie bracket ``[x, y]``; the opposite bracket is ``-bracket``."""
        self._check(x, y)
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def ad_matrix(self, a) -> np.ndarray:
        """Matrix of ``ad(a)``; column ``j`` is ``[a, e_j]``."""
        self._check(a)
        return np.einsum("i,ijk->kj", a, self.structure_constants)

    def inner(self, x, y) -> float:
        return float(x @ self.gram @ y)

    def norm(self, a) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    def sharp(self, a) -> np.ndarray:
        """Covector ``V -> a . V`` in gram coordinates."""
        return self.gram @ a

    @cached_property
    def _cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.gram)

    @cached_property
    def _rep_pinv(self) -> np.ndarray:
        # real-linear coordinates of a complex matrix X = sum a_k R_k
        stacked = np.concatenate(
            [self.rep_basis.real.reshape(self.dim, -1), self.rep_basis.imag.reshape(self.dim, -1)], axis=1
        )
        return np.linalg.pinv(stacked)

    def to_matrix(self, a) -> np.ndarray:
        """Representation matrix ``sum_k a_k rep_basis[k]`` (complex coordinates allowed)."""
        return np.tensordot(np.asarray(a), self.rep_basis, axes=(0, 0))

    def from_matrix(self, X) -> np.ndarray:
        """Coordinates of a matrix in the real span of the rep basis (least squares)."""
        X = np.asarray(X, dtype=complex)
        flat = np.concatenate([X.real.ravel(), X.imag.ravel()])
        return flat @ self._rep_pinv

    def complex_from_matrix(self, X) -> np.ndarray:
        """Complex coordinates of a matrix in the complex span of the rep basis."""
        X = np.asarray(X, dtype=complex)
        skew = (X - X.conj().T) / 2  # real span of the basis
        herm = (X + X.conj().T) / 2  # i times that span
        return self.from_matrix(skew) + 1j * self.from_matrix(-1j * herm)

    def Ad(self, z, a) -> np.ndarray:
        """Adjoint action of a group element ``z`` on the point ``a``."""
        z = np.asarray(z)
        return self.from_matrix(z @ self.to_matrix(a) @ np.linalg.inv(z))

    def exp_c(self, re, im=None, *, bound: float = EXP_NORM_BOUND, method: str = "pade") -> GroupElement:
        """Exponential of ``re + i im`` in the complexified group.

        ``method`` is ``"pade"`` (scaling and squaring) or ``"eig"``.
        """
        re = np.asarray(re, dtype=float)
        im = np.zeros(self.dim) if im is None else np.asarray(im, dtype=float)
        self._check(re, im)
        size = np.hypot(self.norm(re), self.norm(im))
        if size > bound:
            raise OverflowError(f"norm {size:.3g} exceeds the exponential bound {bound}")
        Z = self.to_matrix(re) + 1j * self.to_matrix(im)
        if method == "pade":
            M = scipy.linalg.expm(Z)
        elif method == "eig":
            M = expm_eig(Z)
        else:
            raise ValueError(f"unknown exponential method {method!r}")
        return GroupElement(M, real_form=not np.any(im))

    def random_point(self, rng, radius: float = 1.0) -> np.ndarray:
        """Uniform sample in the gram-norm ball, rejection from the bounding box."""
        half = radius * np.sqrt(np.diag(np.linalg.inv(self.gram)))
        while True:
            a = rng.uniform(-half, half)
            if self.inner(a, a) <= radius**2:
                return a

    def random_group_element(self, rng, scale: float = np.pi) -> GroupElement:
        a = self.random_point(rng, scale)
        return self.exp_c(a)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "structure_constants": self.structure_constants.tolist(),
            "gram": self.gram.tolist(),
            "rep_basis": np.stack([self.rep_basis.real, self.rep_basis.imag], axis=-1).tolist(),
        }


def expm_eig(Z) -> np.ndarray:
    """Matrix exponential through an eigendecomposition.

    Hermitian and anti-Hermitian inputs go through ``eigh``; anything else
    through a general (diagonalizable) eigendecomposition.
    """
    Z = np.asarray(Z, dtype=complex)
    if np.allclose(Z, -Z.conj().T, atol=1e-14, rtol=0):
        w, U = np.linalg.eigh(1j * Z)
        return (U * np.exp(-1j * w)) @ U.conj().T
    if np.allclose(Z, Z.conj().T, atol=1e-14, rtol=0):
        w, U = np.linalg.eigh(Z)
        return (U * np.exp(w)) @ U.conj().T
    w, V = np.linalg.eig(Z)
    return (V * np.exp(w)) @ np.linalg.inv(V)


def structure_constants_from_rep(rep_basis, gram) -> np.ndarray:
    R = np.asarray(rep_basis, dtype=complex)
    n = len(R)
    C = np.zeros((n, n, n))
    stacked = np.concatenate([R.real.reshape(n, -1), R.imag.reshape(n, -1)], axis=1)
    pinv = np.linalg.pinv(stacked)
    for i in range(n):
        for j in range(n):
            comm = R[i] @ R[j] - R[j] @ R[i]
            C[i, j] = np.concatenate([comm.real.ravel(), comm.imag.ravel()]) @ pinv
    # exact zeros and antisymmetry for tidy tables
    C[np.abs(C) < 1e-15] = 0.0
    return (C - C.transpose(1, 0, 2)) / 2


def _trace_gram(rep_basis, scale: float) -> np.ndarray:
    R = np.asarray(rep_basis)
    return -scale * np.einsum("iab,jba->ij", R, R).real


def su2() -> LieAlgebra:
    """su(2) with ``e_j = -(i/2) sigma_j``, so ``[e1, e2] = e3`` and gram = Id."""
    sigma = np.array(
        [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
    )
    R = -0.5j * sigma
    gram = _trace_gram(R, 2.0)
    return LieAlgebra("su2", structure_constants_from_rep(R, gram), gram, R)


def so3() -> LieAlgebra:
    """so(3) with ``(L_i)_{jk} = -eps_{ijk}``, ``[L1, L2] = L3`` and gram = Id."""
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k], eps[i, k, j] = 1.0, -1.0
    R = -eps.astype(complex)
    gram = _trace_gram(R, 0.5)
    return LieAlgebra("so3", structure_constants_from_rep(R, gram), gram, R)


def su3() -> LieAlgebra:
    """su(3) with ``e_k = -(i/2) lambda_k`` (Gell-Mann), gram = Id."""
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    R = -0.5j * lam
    gram = _trace_gram(R, 2.0)
    return LieAlgebra("su3", structure_constants_from_rep(R, gram), gram, R)


def abelian(n: int) -> LieAlgebra:
    """u(1)^n realized as diagonal imaginary n x n matrices."""
    R = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        R[k, k, k] = 1j
    return LieAlgebra(f"u1^{n}", np.zeros((n, n, n)), np.eye(n), R)


_BUILTIN = {"su2": su2, "so3": so3, "su3": su3}


def get_algebra(name: str) -> LieAlgebra:
    """Look up a shipped algebra (``su2``, ``so3``, ``su3``, ``u1^n``) or load a JSON file."""
    if name in _BUILTIN:
        return _BUILTIN[name]()
    if name.startswith("u1^"):
        return abelian(int(name[3:]))
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        return load_algebra(path)
    raise KeyError(f"unknown Lie algebra {name!r}")


def load_algebra(source) -> LieAlgebra:
    """Load an algebra from a JSON file path or an already-parsed mapping."""
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text())
    else:
        doc = source
    rep = np.asarray(doc["rep_basis"], dtype=float)
    C = np.asarray(doc["structure_constants"], dtype=float)
    if C.shape[0] != int(doc["dim"]):
        raise LieAlgebraError("declared dim does not match the structure constants")
    return LieAlgebra(
        doc["name"],
        C,
        np.asarray(doc["gram"], dtype=float),
        rep[..., 0] + 1j * rep[..., 1],
    )
