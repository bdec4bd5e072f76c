"""Lie algebra data for the gauge groups U(1) and SU(2).

Algebra elements are handled in two interchangeable forms: as coefficient
vectors over a fixed orthonormal basis (the representation used by grid
fields, shape ``(..., dim)``), and as anti-hermitian matrices acting on the
representation space (shape ``(..., rep_dim, rep_dim)``).
"""

from __future__ import annotations

import numpy as np

__all__ = ["LieAlgebraSpec", "u1", "su2"]

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class LieAlgebraSpec:
    """A compact gauge algebra: basis matrices, bracket and inner product.

    Parameters
    ----------
    group_id : str
        "U1" or "SU2".
    basis : array_like, shape (dim, rep_dim, rep_dim)
        Anti-hermitian generators.
    trace_scale : float
        The inner product is ``<m1, m2> = -trace_scale * Re tr(m1 m2)``.
        The basis must be orthonormal under it.
    """

    def __init__(self, group_id: str, basis, trace_scale: float):
        self.group_id = group_id
        self.basis = np.asarray(basis, dtype=complex)
        self.trace_scale = float(trace_scale)
        self.dim = self.basis.shape[0]
        self.rep_dim = self.basis.shape[1]

        gram = np.array(
            [[self.inner(x, y) for y in self.basis] for x in self.basis]
        )
        if not np.allclose(gram, np.eye(self.dim), atol=1e-13):
            raise ValueError("basis is not orthonormal under the inner product")
        self.gram = gram

        # f[i, j, k]: [xi_i, xi_j] = sum_k f[i, j, k] xi_k
        f = np.zeros((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                comm = self.basis[i] @ self.basis[j] - self.basis[j] @ self.basis[i]
                f[i, j] = self.to_coeffs(comm)
        self.structure = f
        self.c = self._commutator_constant()

    # -- coefficient/matrix conversions ------------------------------------

    def inner(self, m1, m2):
        """Ad-invariant inner product of two algebra matrices."""
        return -self.trace_scale * np.real(np.einsum("...ij,...ji->...", m1, m2))

    def to_matrices(self, coeffs):
        """Coefficient vectors (..., dim) -> matrices (..., rep_dim, rep_dim)."""
        return np.einsum("...i,iab->...ab", np.asarray(coeffs), self.basis)

    def to_coeffs(self, mats):
        """Matrices (..., rep_dim, rep_dim) -> coefficient vectors (..., dim)."""
        mats = np.asarray(mats, dtype=complex)
        return np.stack([self.inner(mats, b) for b in self.basis], axis=-1)

    def bracket(self, x, y):
        """Pointwise commutator on coefficient arrays (..., dim)."""
        return np.einsum("...i,...j,ijk->...k", x, y, self.structure)

    def norm(self, coeffs):
        """Pointwise algebra norm of a coefficient array, shape (...,)."""
        return np.sqrt(np.sum(np.square(coeffs), axis=-1))

    # -- group exponential --------------------------------------------------

    def exp(self, coeffs):
        """Group element exp(xi) for xi given by coefficients (..., dim)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if self.group_id == "U1":
            # xi = i*a with a real; exp is the unit complex number e^{ia}.
            a = coeffs[..., 0]
            return np.exp(1j * a)[..., None, None]
        if self.group_id == "SU2":
            # xi = (i/2) a.sigma; exp = cos(|a|/2) I + i sin(|a|/2) (a_hat.sigma)
            a = coeffs
            theta = np.sqrt(np.sum(a * a, axis=-1))
            with np.errstate(invalid="ignore"):
                ahat = np.where(theta[..., None] > 0, a / np.where(theta[..., None] > 0, theta[..., None], 1.0), 0.0)
            eye = np.eye(2, dtype=complex)
            sig = np.einsum("...k,kab->...ab", ahat, _PAULI)
            half = 0.5 * theta
            return (
                np.cos(half)[..., None, None] * eye
                + 1j * np.sin(half)[..., None, None] * sig
            )
        raise ValueError(f"unknown group {self.group_id!r}")

    # -- commutator constant -------------------------------------------------

    def _ad_operator(self, xi):
        """Matrix of ad(xi) acting on coefficient vectors."""
        return np.einsum("i,ijk->kj", xi, self.structure)

    def _commutator_constant(self, n_samples: int = 2048, seed: int = 0) -> float:
        if self.dim == 1:
            return 0.0
        rng = np.random.default_rng(seed)
        best = 0.0
        best_xi = None
        for _ in range(n_samples):
            xi = rng.standard_normal(self.dim)
            xi /= np.linalg.norm(xi)
            s = np.linalg.norm(self._ad_operator(xi), 2)
            if s > best:
                best, best_xi = s, xi
        # local polish: power-iteration style ascent on the sphere
        xi = best_xi
        for _ in range(200):
            T = self._ad_operator(xi)
            _, _, vh = np.linalg.svd(T)
            eta = vh[0]
            # gradient of |[xi,eta]|^2 in xi at fixed maximizing eta
            grad = np.einsum("j,ijk,k->i", eta, self.structure,
                             np.einsum("i,j,ijk->k", xi, eta, self.structure))
            nrm = np.linalg.norm(grad)
            if nrm < 1e-15:
                break
            xi_new = grad / nrm
            s_new = np.linalg.norm(self._ad_operator(xi_new), 2)
            if s_new <= best + 1e-15:
                break
            best, xi = s_new, xi_new
        return float(best)

    def maximizing_pair(self, seed: int = 0):
        """A pair of unit elements approaching |[xi, eta]| = c."""
        if self.dim == 1:
            e = np.zeros(self.dim)
            e[0] = 1.0
            return e, e
        rng = np.random.default_rng(seed)
        best = (0.0, None, None)
        for _ in range(4096):
            xi = rng.standard_normal(self.dim)
            xi /= np.linalg.norm(xi)
            T = self._ad_operator(xi)
            u, s, vh = np.linalg.svd(T)
            if s[0] > best[0]:
                best = (s[0], xi, vh[0])
        return best[1], best[2]

    def __repr__(self):
        return f"LieAlgebraSpec({self.group_id}, dim={self.dim}, c={self.c:.6g})"


def u1() -> LieAlgebraSpec:
    """u(1) realized as imaginary scalars, basis {i}."""
    return LieAlgebraSpec("U1", [[[1j]]], trace_scale=1.0)


def su2() -> LieAlgebraSpec:
    """su(2) with basis i*sigma_k/2 and inner product -2 tr(xi eta)."""
    basis = 0.5j * _PAULI
    return LieAlgebraSpec("SU2", basis, trace_scale=2.0)
