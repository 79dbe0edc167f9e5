"""Small dense linear-algebra helpers on tensor-product spaces."""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space
from scipy.stats import unitary_group


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def min_eigenvalue(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])


def idempotence_residual(p: np.ndarray) -> float:
    return float(np.max(np.abs(p @ p - p))) if p.size else 0.0


def projector_rank(p: np.ndarray) -> int:
    return int(round(float(np.real(np.trace(p))))) if p.size else 0


def projector_onto(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of the given orthonormal columns."""
    return vectors @ dagger(vectors)


def range_basis(p: np.ndarray, tol: float = 0.5) -> np.ndarray:
    """Orthonormal basis (columns) of the eigenvalue-1 space of a projector."""
    w, v = np.linalg.eigh(0.5 * (p + dagger(p)))
    return v[:, w > tol]


def orthogonal_complement(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of the columns of ``v``."""
    v = np.atleast_2d(v.T).T if v.ndim == 1 else v
    return null_space(dagger(v))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_mixed_state(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ dagger(g)
    return rho / np.real(np.trace(rho))


def clean_state(rho: np.ndarray) -> np.ndarray:
    """Hermitian part, negative eigenvalues clipped, unit trace.

    Used after slicing or projecting a state, where a small weight in the
    normalization would otherwise amplify rounding errors.
    """
    rho = 0.5 * (rho + dagger(rho))
    w, v = np.linalg.eigh(rho)
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ dagger(v)
    return rho / np.real(np.trace(rho))


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def apply_local(rho: np.ndarray, dims, party: int, k: np.ndarray) -> np.ndarray:
    """(K on ``party``) rho (K on ``party``)^dagger for a possibly non-square K."""
    dims = list(dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    # rows
    t = np.tensordot(k, t, axes=([1], [party]))
    t = np.moveaxis(t, 0, party)
    # columns
    t = np.tensordot(t, k.conj(), axes=([n + party], [1]))
    t = np.moveaxis(t, -1, n + party)
    new_dims = dims.copy()
    new_dims[party] = k.shape[0]
    size = int(np.prod(new_dims))
    return t.reshape(size, size)


def apply_product(rho: np.ndarray, dims, ops) -> np.ndarray:
    """(K_1 x ... x K_N) rho (K_1 x ... x K_N)^dagger, one local factor at a time."""
    dims = list(dims)
    for party, k in enumerate(ops):
        rho = apply_local(rho, dims, party, k)
        dims[party] = k.shape[0]
    return rho


def contract_effects(rho: np.ndarray, dims, effects, keep: int | None = None) -> np.ndarray:
    """Contract a state against stacked local operators.

    ``effects[n]`` has shape ``(J, d_n, d_n)``. Returns
    ``T[j_1..j_N] = tr[rho (E_1[j_1] x ... x E_N[j_N])]``. When ``keep`` names a
    party its operator is left out and the result carries two trailing axes
    ``(i, k)`` holding the reduced operator R with ``tr[rho (A x E)] = tr[A R]``.
    """
    dims = list(dims)
    n = len(dims)
    rows = list(range(n))
    cols = list(range(n, 2 * n))
    js = list(range(2 * n, 3 * n))
    operands = [rho.reshape(dims + dims), rows + cols]
    out = []
    for p in range(n):
        if p == keep:
            continue
        operands += [effects[p], [js[p], cols[p], rows[p]]]
        out.append(js[p])
    if keep is not None:
        out += [rows[keep], cols[keep]]
    return np.einsum(*operands, out, optimize="greedy")
