"""Hermitian operator bases and real vectorization of quantum systems.

A d-dimensional quantum system is embedded as a real vector space of
dimension d^2 by expanding Hermitian operators in an orthonormal Hermitian
basis (normalized identity, plus the symmetric, antisymmetric and diagonal
generalized Gell-Mann matrices).  Conjugation by a unitary then becomes a
real orthogonal matrix, and the Hilbert-Schmidt pairing becomes the plain
Euclidean one, so quantum systems slot into the same real-linear machinery
as classical and box-like systems.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of d x d operators, shape (d^2, d, d).

    Order: identity/sqrt(d); then for each pair j<k (lexicographic) the
    symmetric and antisymmetric element; then the d-1 diagonal elements.
    For d=2 this is the Pauli basis {I, X, Y, Z}/sqrt(2).
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    mats = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = 1.0
            s[k, j] = 1.0
            mats.append(s / np.sqrt(2.0))
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1.0j
            a[k, j] = 1.0j
            mats.append(a / np.sqrt(2.0))
    for l in range(1, d):
        h = np.zeros((d, d), dtype=complex)
        for m in range(l):
            h[m, m] = 1.0
        h[l, l] = -float(l)
        mats.append(h / np.sqrt(l * (l + 1)))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def vectorize(op: np.ndarray, d: int) -> np.ndarray:
    """Real coordinate vector of a Hermitian operator, length d^2."""
    basis = hermitian_basis(d)
    coeffs = np.einsum("aij,ji->a", basis, op)
    if np.max(np.abs(coeffs.imag)) > 1e-12:
        raise ValueError("operator is not Hermitian within tolerance")
    return np.ascontiguousarray(coeffs.real)


def unvectorize(vec: np.ndarray, d: int) -> np.ndarray:
    """Inverse of vectorize: rebuild the d x d Hermitian operator."""
    basis = hermitian_basis(d)
    return np.einsum("a,aij->ij", np.asarray(vec, dtype=float), basis)


def unvectorize_dims(vec: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Rebuild an operator on a tensor product of factors.

    The composite basis is the Kronecker product of the per-factor bases,
    indexed with the left factor major, matching np.kron on coordinates.
    """
    if len(dims) == 1:
        return unvectorize(vec, dims[0])
    d0 = dims[0]
    rest = dims[1:]
    n0 = d0 * d0
    nrest = int(np.prod([d * d for d in rest]))
    v = np.asarray(vec, dtype=float).reshape(n0, nrest)
    basis0 = hermitian_basis(d0)
    tails = np.array([unvectorize_dims(v[a], rest) for a in range(n0)])
    # sum_a kron(basis0[a], tails[a]) without materializing each kron
    dr = tails.shape[1]
    out = np.einsum("aik,ajl->ijkl", basis0, tails).reshape(d0 * dr, d0 * dr)
    return out


def vectorize_dims(op: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Real coordinates of a Hermitian operator on a tensor product."""
    if len(dims) == 1:
        return vectorize(op, dims[0])
    d0 = dims[0]
    rest = dims[1:]
    dr = int(np.prod(rest))
    basis0 = hermitian_basis(d0)
    o = np.asarray(op).reshape(d0, dr, d0, dr)
    # contract the first factor against each basis element
    tails = np.einsum("aij,jrit->art", basis0, o)
    rows = [vectorize_dims(tails[a], rest) if np.max(np.abs(tails[a].imag)) < 1e-10
            else _vectorize_complex(tails[a], rest)
            for a in range(d0 * d0)]
    return np.concatenate(rows)


def _vectorize_complex(op: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    # Partial contractions of Hermitian operators need not be Hermitian;
    # their expansion coefficients in a Hermitian basis are still the
    # Hilbert-Schmidt overlaps, kept here with the real part only after
    # the full contraction has been assembled.
    if len(dims) == 1:
        basis = hermitian_basis(dims[0])
        return np.einsum("aij,ji->a", basis, op).real
    d0 = dims[0]
    rest = dims[1:]
    dr = int(np.prod(rest))
    basis0 = hermitian_basis(d0)
    o = op.reshape(d0, dr, d0, dr)
    tails = np.einsum("aij,jrit->art", basis0, o)
    rows = [_vectorize_complex(tails[a], rest) for a in range(d0 * d0)]
    return np.concatenate(rows)


def conjugation_superoperator(u: np.ndarray) -> np.ndarray:
    """Real matrix of X -> U X U* in the Hermitian basis, shape (d^2, d^2)."""
    d = u.shape[0]
    basis = hermitian_basis(d)
    conj = np.einsum("rs,bst,ut->bru", u, basis, u.conj())
    mat = np.einsum("aij,bji->ab", basis, conj)
    if np.max(np.abs(mat.imag)) > 1e-10:
        raise ValueError("conjugation superoperator came out non-real")
    return np.ascontiguousarray(mat.real)


def min_eigenvalue(vec: np.ndarray, dims: tuple[int, ...]) -> float:
    """Smallest eigenvalue of the operator encoded by vec."""
    op = unvectorize_dims(vec, dims)
    return float(np.linalg.eigvalsh(op)[0])


def operator_interval_residual(vec: np.ndarray, dims: tuple[int, ...]) -> float:
    """How far the encoded operator sits outside 0 <= E <= 1 (0 if inside)."""
    op = unvectorize_dims(vec, dims)
    ev = np.linalg.eigvalsh(op)
    return float(max(0.0, -ev[0], ev[-1] - 1.0))
