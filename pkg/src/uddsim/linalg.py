"""Dense complex linear algebra primitives shared by all other modules.

Operators, density matrices and state vectors are plain complex numpy
arrays; the validators below enforce the invariants the rest of the
package relies on.  The tensor-product index convention is fixed once:
the FIRST factor is the most significant index, i.e.
``kron(a, b)[i*db + k, j*db + l] = a[i, j] * b[k, l]``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

# Tolerances: algebraic identities at 1e-12, unitarity/trace at 1e-10.
# Double precision leaves ample headroom at the dimensions used here (<= 243).
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
STATE_NORM_TOL = 1e-12


def as_operator(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as a square complex128 matrix, validating the shape."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    return a


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def assert_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL, name: str = "operator") -> None:
    if not is_hermitian(a, tol):
        dev = float(np.max(np.abs(a - a.conj().T)))
        raise ValueError(f"{name} is not Hermitian (max |A - A^dag| = {dev:.3e} > {tol:.1e})")


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    d = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(d)) <= tol)


def assert_density_matrix(rho: np.ndarray, name: str = "rho") -> None:
    """Check Hermiticity, unit trace and positivity of a density matrix."""
    rho = as_operator(rho)
    assert_hermitian(rho, name=name)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} has trace {tr:.12g}, expected 1 within {TRACE_TOL:.1e}")
    if float(np.linalg.eigvalsh(rho).min()) < -POSITIVITY_TOL:
        raise ValueError(f"{name} has a negative eigenvalue beyond {POSITIVITY_TOL:.1e}")


def assert_state_vector(psi: np.ndarray, name: str = "psi") -> None:
    psi = np.asarray(psi)
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > STATE_NORM_TOL:
        raise ValueError(f"{name} has norm {nrm:.12g}, expected 1 within {STATE_NORM_TOL:.1e}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with the first factor as the most significant index."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of a sequence of factors, first factor most significant."""
    if len(factors) == 0:
        raise ValueError("need at least one factor")
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def embed_factor(op: np.ndarray, factor_dims: Sequence[int], index: int) -> np.ndarray:
    """Embed ``op`` acting on factor ``index`` (0-based) into the full product space."""
    op = as_operator(op)
    if op.shape[0] != factor_dims[index]:
        raise ValueError(
            f"operator dim {op.shape[0]} does not match factor dim {factor_dims[index]}"
        )
    factors = [op if i == index else np.eye(d, dtype=np.complex128)
               for i, d in enumerate(factor_dims)]
    return kron_all(factors)


def expm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, computed via eigendecomposition.

    The eigendecomposition route keeps the result unitary to roundoff for
    any step size, which the evolution code depends on.  Non-Hermitian
    input is rejected.
    """
    h = as_operator(h)
    assert_hermitian(h, name="h")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced matrix of ``rho`` over the factors listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Square matrix on the product space of ``dims``.
    dims : sequence of int
        Dimension of each tensor factor, most significant first.
    keep : sequence of int
        0-based indices of the factors to keep (order preserved as given
        relative order in ``dims``).
    """
    rho = as_operator(rho)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape[0] != total:
        raise ValueError(f"product of dims {dims} is {total}, got matrix of dim {rho.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must be nonempty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")

    n = len(dims)
    reshaped = rho.reshape(dims + dims)
    # Row indices 0..n-1, column indices n..2n-1; traced factors share an index.
    row_idx = list(range(n))
    col_idx = [i + n if i in keep else i for i in range(n)]
    out_idx = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(reshaped, row_idx + col_idx, out_idx)
    d_keep = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d_keep, d_keep)


def norm(a: np.ndarray, kind: str = "frobenius") -> float:
    """Matrix norm: ``frobenius``, ``trace`` (nuclear) or ``spectral``."""
    a = np.asarray(a, dtype=np.complex128)
    if kind == "frobenius":
        return float(np.linalg.norm(a))
    if kind == "trace":
        return float(np.linalg.svd(a, compute_uv=False).sum())
    if kind == "spectral":
        return float(np.linalg.svd(a, compute_uv=False).max())
    raise ValueError(f"unknown norm kind {kind!r}")


def bracket(a: np.ndarray, b: np.ndarray, anti: bool = False) -> np.ndarray:
    """Commutator ab - ba, or anticommutator ab + ba when ``anti`` is set."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b + b @ a if anti else a @ b - b @ a
