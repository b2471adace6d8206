"""Polarization operators, two-qubit and M-level operator bases, Hamiltonian splits.

Every basis here is tied to a polarization operator P = 2|psi><psi| - I:
the elements either commute or anticommute with P, which is what makes
the pulse-sequence sign-flipping argument work.  Basis element ordering
and normalization follow the published listings so labels stay stable
in tests and CSV output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    as_operator,
    assert_state_vector,
    bracket,
    kron,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)

PAULIS = {"i": ID2, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Spin-1 angular momentum matrices in the j_z eigenbasis (m = +1, 0, -1).
SPIN1_JX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.complex128) / np.sqrt(2)
SPIN1_JY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128) / np.sqrt(2)
SPIN1_JZ = np.diag([1.0, 0.0, -1.0]).astype(np.complex128)
SPIN1 = {"x": SPIN1_JX, "y": SPIN1_JY, "z": SPIN1_JZ}

# Linear-independence threshold for Gram-matrix rank checks (scale free).
GRAM_RANK_TOL = 1e-8


def basis_state(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> in ``dim`` dimensions."""
    psi = np.zeros(dim, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def up_up_state() -> np.ndarray:
    """|up,up> of two qubits."""
    return basis_state(4, 0)


def bell_plus_state() -> np.ndarray:
    """(|up,down> + |down,up>) / sqrt(2)."""
    psi = np.zeros(4, dtype=np.complex128)
    psi[1] = psi[2] = 1.0 / np.sqrt(2)
    return psi


def singlet_state() -> np.ndarray:
    """(|up,down> - |down,up>) / sqrt(2)."""
    psi = np.zeros(4, dtype=np.complex128)
    psi[1] = 1.0 / np.sqrt(2)
    psi[2] = -1.0 / np.sqrt(2)
    return psi


@dataclass(frozen=True)
class PolarizationOperator:
    """Involution P = 2|psi><psi| - I with +1 eigenstate ``target``.

    P**2 = I, P|psi> = |psi>, and the spectrum is one +1 eigenvalue with
    all remaining eigenvalues -1, so <P> = 1 pins the state to |psi>.
    """

    op: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        op = as_operator(self.op)
        target = np.asarray(self.target, dtype=np.complex128)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "target", target)
        d = op.shape[0]
        if np.max(np.abs(op @ op - np.eye(d))) > HERMITIAN_TOL:
            raise ValueError("polarization operator must square to the identity")
        if np.max(np.abs(op @ target - target)) > HERMITIAN_TOL:
            raise ValueError("target state must be a +1 eigenstate")
        w = np.sort(np.linalg.eigvalsh(op))
        expected = np.concatenate([-np.ones(d - 1), [1.0]])
        if np.max(np.abs(w - expected)) > 1e-10:
            raise ValueError("spectrum must be {+1 once, -1 (M-1)-fold}")

    @property
    def dim(self) -> int:
        return self.op.shape[0]


def polarization_from_state(psi: np.ndarray) -> PolarizationOperator:
    """Build 2|psi><psi| - I for a normalized state ``psi``."""
    psi = np.asarray(psi, dtype=np.complex128)
    assert_state_vector(psi)
    op = 2.0 * np.outer(psi, psi.conj()) - np.eye(psi.size)
    return PolarizationOperator(op=op, target=psi)


@dataclass(frozen=True)
class OperatorBasis:
    """A complete set of Hermitian basis operators flagged against a polarization.

    ``commuting[k]`` is True when ``elements[k]`` commutes with
    ``polarization.op`` and False when it anticommutes.  Elements are
    linearly independent and span all Hermitian operators on the space.
    """

    elements: tuple[np.ndarray, ...]
    commuting: tuple[bool, ...]
    names: tuple[str, ...]
    polarization: PolarizationOperator

    def __post_init__(self):
        if not (len(self.elements) == len(self.commuting) == len(self.names)):
            raise ValueError("elements, commuting flags and names must align")

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def gram_matrix(self) -> np.ndarray:
        """Hilbert-Schmidt Gram matrix of the vectorized elements."""
        vecs = np.stack([e.reshape(-1) for e in self.elements])
        return vecs.conj() @ vecs.T

    def is_independent(self, tol: float = GRAM_RANK_TOL) -> bool:
        s = np.linalg.svd(self.gram_matrix(), compute_uv=False)
        return bool(s.min() > tol * s.max())

    def verify_flags(self, tol: float = HERMITIAN_TOL) -> None:
        """Raise unless every element (anti)commutes with P as flagged."""
        p = self.polarization.op
        for name, e, comm in zip(self.names, self.elements, self.commuting):
            resid = float(np.max(np.abs(bracket(e, p, anti=not comm))))
            if resid > tol:
                rel = "commute" if comm else "anticommute"
                raise ValueError(f"{name} fails to {rel} with P (residual {resid:.3e})")


def _ketbra_sym(dim: int, k: int, l: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[k, l] = 1.0
    out[l, k] = 1.0
    return out


def _ketbra_asym(dim: int, k: int, l: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[k, l] = -1j
    out[l, k] = 1j
    return out


def pauli_product_basis() -> tuple[tuple[np.ndarray, ...], tuple[str, ...]]:
    """The 16 two-qubit Pauli products sigma_k (x) sigma_l.

    Ordered with the first-qubit label as the major index:
    II, IX, IY, IZ, XI, XX, ..., ZZ.  Trace-orthogonal with
    Trace(X_j X_k) = 4 delta_jk.
    """
    order = "ixyz"
    elements = []
    names = []
    for a in order:
        for b in order:
            elements.append(kron(PAULIS[a], PAULIS[b]))
            names.append((a + b).upper())
    return tuple(elements), tuple(names)


def two_qubit_y_basis() -> OperatorBasis:
    """16-element basis adapted to P = 2|up,up><up,up| - I.

    Y1..Y10 commute with Y1 = P, Y11..Y16 anticommute.  Y1..Y4 are
    projector combinations onto the computational basis states; the rest
    are symmetric/antisymmetric pair operators |a><b| +- h.c.
    """
    d = 4
    proj = [np.zeros((d, d), dtype=np.complex128) for _ in range(d)]
    for k in range(d):
        proj[k][k, k] = 1.0
    p0, p1, p2, p3 = proj

    elements = [
        2 * p0 - np.eye(d),                    # Y1 = P
        p0 + p1,                               # Y2
        p0 - p1 + 2 * p2,                      # Y3
        p0 - p1 - p2 + 3 * p3,                 # Y4
        _ketbra_sym(d, 1, 3),                  # Y5
        _ketbra_asym(d, 1, 3),                 # Y6
        _ketbra_sym(d, 2, 3),                  # Y7
        _ketbra_asym(d, 2, 3),                 # Y8
        _ketbra_sym(d, 1, 2),                  # Y9
        _ketbra_asym(d, 1, 2),                 # Y10
        _ketbra_sym(d, 0, 1),                  # Y11
        _ketbra_asym(d, 0, 1),                 # Y12
        _ketbra_sym(d, 0, 2),                  # Y13
        _ketbra_asym(d, 0, 2),                 # Y14
        _ketbra_sym(d, 0, 3),                  # Y15
        _ketbra_asym(d, 0, 3),                 # Y16
    ]
    flags = [True] * 10 + [False] * 6
    names = tuple(f"Y{k}" for k in range(1, 17))
    pol = polarization_from_state(up_up_state())
    return OperatorBasis(tuple(elements), tuple(flags), names, pol)


def _pauli2(a: str, b: str) -> np.ndarray:
    return kron(PAULIS[a], PAULIS[b])


def two_qubit_bell_basis() -> OperatorBasis:
    """16-element basis adapted to the Bell state (|ud> + |du>)/sqrt(2).

    The commutant block (first 10) and anticommutant block (last 6) are
    one published choice; other equally valid commutant bases exist.
    """
    ii = _pauli2("i", "i")
    elements = [
        0.5 * (-ii + _pauli2("x", "x") + _pauli2("y", "y") - _pauli2("z", "z")),   # Yt1
        0.5 * (ii + _pauli2("x", "x")),                                            # Yt2
        0.5 * (ii - _pauli2("x", "x") + 2 * _pauli2("y", "y")),                    # Yt3
        0.5 * (ii - _pauli2("x", "x") - _pauli2("y", "y") - 3 * _pauli2("z", "z")),# Yt4
        0.5 * (_pauli2("z", "x") - _pauli2("x", "z")),                             # Yt5
        0.5 * (_pauli2("i", "y") - _pauli2("y", "i")),                             # Yt6
        0.5 * (_pauli2("i", "x") - _pauli2("x", "i")),                             # Yt7
        -0.5 * (_pauli2("y", "z") - _pauli2("z", "y")),                            # Yt8
        0.5 * (_pauli2("z", "i") + _pauli2("i", "z")),                             # Yt9
        -0.5 * (_pauli2("x", "y") + _pauli2("y", "x")),                            # Yt10
        0.5 * (_pauli2("x", "i") + _pauli2("i", "x")),                             # Yt11
        -0.5 * (_pauli2("y", "z") + _pauli2("z", "y")),                            # Yt12
        0.5 * (_pauli2("x", "z") + _pauli2("z", "x")),                             # Yt13
        -0.5 * (_pauli2("y", "i") + _pauli2("i", "y")),                            # Yt14
        0.5 * (_pauli2("z", "i") - _pauli2("i", "z")),                             # Yt15
        0.5 * (_pauli2("x", "y") - _pauli2("y", "x")),                             # Yt16
    ]
    flags = [True] * 10 + [False] * 6
    names = tuple(f"Yt{k}" for k in range(1, 17))
    pol = polarization_from_state(bell_plus_state())
    return OperatorBasis(tuple(elements), tuple(flags), names, pol)


def mlevel_v_basis(m: int, target: int = 0) -> OperatorBasis:
    """M**2-element Hermitian basis adapted to P = 2|target><target| - I.

    Layout (with levels relabeled so ``target`` plays the role of level 0):

    * V1 = 2 P_target - I,
    * V2..VM: diagonal projector combinations
      V_k = P_0 - P_1 - ... - P_{k-2} + (k-1) P_{k-1},
    * (M-1)(M-2) pair operators |k><l| + h.c. and -i|k><l| + h.c. for
      0 < k < l (symmetric block first), all commuting with V1,
    * 2(M-1) operators |0><l| +- h.c., interleaved by l, anticommuting.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    if not (0 <= target < m):
        raise ValueError(f"target {target} out of range for m = {m}")

    # Level order with the target level first; indices below refer to it.
    levels = [target] + [k for k in range(m) if k != target]

    def proj(i: int) -> np.ndarray:
        out = np.zeros((m, m), dtype=np.complex128)
        out[levels[i], levels[i]] = 1.0
        return out

    elements = [2 * proj(0) - np.eye(m)]
    names = ["V1"]
    for k in range(2, m + 1):
        v = proj(0).copy()
        for i in range(1, k - 1):
            v -= proj(i)
        v += (k - 1) * proj(k - 1)
        elements.append(v)
        names.append(f"V{k}")
    idx = m + 1
    for k in range(1, m):
        for l in range(k + 1, m):
            elements.append(_ketbra_sym(m, levels[k], levels[l]))
            names.append(f"V{idx}")
            idx += 1
    for k in range(1, m):
        for l in range(k + 1, m):
            elements.append(_ketbra_asym(m, levels[k], levels[l]))
            names.append(f"V{idx}")
            idx += 1
    for l in range(1, m):
        elements.append(_ketbra_sym(m, levels[0], levels[l]))
        names.append(f"V{idx}")
        idx += 1
        elements.append(_ketbra_asym(m, levels[0], levels[l]))
        names.append(f"V{idx}")
        idx += 1

    n_comm = m * m - 2 * (m - 1)
    flags = [True] * n_comm + [False] * (2 * (m - 1))
    pol = polarization_from_state(basis_state(m, target))
    return OperatorBasis(tuple(elements), tuple(flags), tuple(names), pol)


def spin1_operators() -> dict[str, np.ndarray]:
    """Spin-1 angular momentum matrices and the nine adapted basis operators.

    V1 = j_z + j_z**2 - I is the control operator for locking the m = +1
    state; V2..V5 commute with it and V6..V9 anticommute.  All operators
    are expressed through j_x, j_y, j_z and j_pm = j_x +- i j_y.
    """
    jx, jy, jz = SPIN1_JX, SPIN1_JY, SPIN1_JZ
    jp = jx + 1j * jy
    jm = jx - 1j * jy
    eye = np.eye(3, dtype=np.complex128)
    jz2 = jz @ jz
    return {
        "jx": jx,
        "jy": jy,
        "jz": jz,
        "jplus": jp,
        "jminus": jm,
        "V1": jz + jz2 - eye,
        "V2": eye + 0.5 * jz - 0.5 * jz2,
        "V3": -eye - 0.5 * jz + 2.5 * jz2,
        "V4": -(jp @ jz + jz @ jm) / np.sqrt(2),
        "V5": 1j * (jp @ jz - jz @ jm) / np.sqrt(2),
        "V6": (jz @ jp + jm @ jz) / np.sqrt(2),
        "V7": 1j * (jm @ jz - jz @ jp) / np.sqrt(2),
        "V8": 0.5 * (jp @ jp + jm @ jm),
        "V9": 0.5j * (jm @ jm - jp @ jp),
    }


@dataclass(frozen=True)
class SplitHamiltonian:
    """Decomposition h = h0 + hp with [h0, P] = 0 and {hp, P} = 0."""

    h0: np.ndarray
    hp: np.ndarray
    p_op: np.ndarray = field(repr=False)

    def residuals(self) -> dict[str, float]:
        return {
            "commutator": float(np.max(np.abs(bracket(self.h0, self.p_op)))),
            "anticommutator": float(np.max(np.abs(bracket(self.hp, self.p_op, anti=True)))),
        }


def _involution_matrix(p) -> np.ndarray:
    """Accept a PolarizationOperator or any Hermitian involution matrix."""
    op = p.op if isinstance(p, PolarizationOperator) else as_operator(p)
    if not isinstance(p, PolarizationOperator):
        d = op.shape[0]
        if np.max(np.abs(op - op.conj().T)) > HERMITIAN_TOL:
            raise ValueError("splitting operator must be Hermitian")
        if np.max(np.abs(op @ op - np.eye(d))) > HERMITIAN_TOL:
            raise ValueError("splitting operator must square to the identity")
    return op


def split_hamiltonian(h: np.ndarray, p) -> SplitHamiltonian:
    """Split a Hermitian ``h`` into commutant and anticommutant parts of P.

    ``p`` may be a :class:`PolarizationOperator` or any Hermitian
    involution (e.g. a system polarization embedded as P x I_bath, whose
    +1 eigenvalue is degenerate).  Uses the projection
    h0 = (h + P h P) / 2, hp = (h - P h P) / 2, which works in any
    dimension without enumerating a basis; P**2 = I makes the two parts
    exactly reconstruct h and land in the right (anti)commutant.
    """
    h = as_operator(h)
    pop = _involution_matrix(p)
    if h.shape[0] != pop.shape[0]:
        raise ValueError(f"dimension mismatch: h is {h.shape[0]}, P is {pop.shape[0]}")
    conj = pop @ h @ pop
    h0 = (h + conj) / 2.0
    hp = (h - conj) / 2.0
    return SplitHamiltonian(h0=h0, hp=hp, p_op=pop)
