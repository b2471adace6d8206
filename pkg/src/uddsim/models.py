"""Randomized system+bath Hamiltonians and the named control operators.

Both model builders draw every coupling coefficient uniformly from
[0, 1) using a seeded splitmix64 stream in a documented order, so a
model instance is reproducible bit-for-bit from its seed:

* single-body terms first, looping over (factor m, axis) with axes
  ordered x, y, z;
* then pair terms, looping over (n, m, axis_n, axis_m) for all pairs
  n < m.

Factor indices are 1-based and the first factor is the most significant
tensor slot; the system occupies the leading factor(s).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    PAULIS,
    SPIN1,
    PolarizationOperator,
    basis_state,
    bell_plus_state,
    pauli_product_basis,
    polarization_from_state,
    singlet_state,
    up_up_state,
)
from .linalg import assert_hermitian, embed_factor, kron
from .rng import SplitMix64

AXES = ("x", "y", "z")

CONTROL_KINDS = (
    "y1_product",
    "bell_plus",
    "bell_singlet",
    "single_intuitive",
    "mlevel_v1",
    "none",
)


@dataclass(frozen=True)
class CoefficientDraw:
    """One sampled coupling: a single-body (m, axis) or pair (n, m, axes) term."""

    term_kind: str            # "single" | "pair"
    factors: tuple[int, ...]  # 1-based factor indices
    axes: tuple[str, ...]
    value: float


@dataclass(frozen=True)
class ModelInstance:
    """A concrete system+bath Hamiltonian with its full sampling record."""

    h_total: np.ndarray
    factor_dims: tuple[int, ...]
    system_factor_count: int
    seed: int
    coefficient_log: tuple[CoefficientDraw, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @property
    def system_dims(self) -> tuple[int, ...]:
        return self.factor_dims[: self.system_factor_count]

    @property
    def system_dim(self) -> int:
        return int(np.prod(self.system_dims))

    @property
    def bath_dim(self) -> int:
        return self.dim // self.system_dim


def _build_spin_bath(
    seed: int,
    factor_dims: tuple[int, ...],
    system_factor_count: int,
    local_ops: dict[str, np.ndarray],
    shared_pair_coefficients: bool,
) -> ModelInstance:
    n_factors = len(factor_dims)
    dim = int(np.prod(factor_dims))
    rng = SplitMix64(seed)
    log: list[CoefficientDraw] = []
    h = np.zeros((dim, dim), dtype=np.complex128)

    # Per-factor embedded operators, indexed [factor][axis].
    embedded = [
        {ax: embed_factor(local_ops[ax], factor_dims, i) for ax in AXES}
        for i in range(n_factors)
    ]

    for m in range(system_factor_count + 1, n_factors + 1):
        for ax in AXES:
            b = rng.next_float()
            log.append(CoefficientDraw("single", (m,), (ax,), b))
            h += b * embedded[m - 1][ax]

    shared: dict[tuple[str, str], float] = {}
    for n in range(1, n_factors + 1):
        for m in range(n + 1, n_factors + 1):
            for ax_n in AXES:
                for ax_m in AXES:
                    if shared_pair_coefficients:
                        if (ax_n, ax_m) not in shared:
                            shared[(ax_n, ax_m)] = rng.next_float()
                        c = shared[(ax_n, ax_m)]
                    else:
                        c = rng.next_float()
                    log.append(CoefficientDraw("pair", (n, m), (ax_n, ax_m), c))
                    h += c * (embedded[m - 1][ax_m] @ embedded[n - 1][ax_n])

    assert_hermitian(h, name="h_total")
    return ModelInstance(
        h_total=h,
        factor_dims=factor_dims,
        system_factor_count=system_factor_count,
        seed=seed,
        coefficient_log=tuple(log),
    )


def build_two_qubit_spin_bath(seed: int, shared_pair_coefficients: bool = False) -> ModelInstance:
    """Two system qubits coupled to a bath of three spin-1/2 particles (dim 32).

    Single-spin fields act on the bath spins only (factors 3..5); pair
    couplings connect every pair of the five spins on all nine axis
    combinations.  99 coefficients total (9 single + 90 pair).  With
    ``shared_pair_coefficients`` the nine axis-pair values are drawn once
    and reused for every spin pair (the alternate reading of a shared
    coupling table); the default draws them independently per pair.
    """
    return _build_spin_bath(seed, (2, 2, 2, 2, 2), 2, PAULIS, shared_pair_coefficients)


def build_three_level_bath(seed: int, shared_pair_coefficients: bool = False) -> ModelInstance:
    """One three-level system coupled to four three-level bath factors (dim 243).

    Spin-1 angular momentum operators replace the Pauli matrices; the
    single-body fields act on factors 2..5 and pair couplings connect all
    ten factor pairs.  102 coefficients total (12 single + 90 pair).
    """
    return _build_spin_bath(seed, (3, 3, 3, 3, 3), 1, SPIN1, shared_pair_coefficients)


def write_coefficient_log(model: ModelInstance, f) -> None:
    """Write the coefficient draws as CSV to a file object, in draw order."""
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["term_kind", "factor_1", "factor_2", "axis_1", "axis_2", "value"])
    for d in model.coefficient_log:
        f1 = d.factors[0]
        f2 = d.factors[1] if len(d.factors) > 1 else ""
        a1 = d.axes[0]
        a2 = d.axes[1] if len(d.axes) > 1 else ""
        w.writerow([d.term_kind, f1, f2, a1, a2, repr(d.value)])


def coefficient_log_csv(model: ModelInstance) -> str:
    buf = io.StringIO()
    write_coefficient_log(model, buf)
    return buf.getvalue()


def control_operator(kind: str, system_dims: tuple[int, ...]):
    """Control operator for a given scheme on the given system factors.

    Returns a :class:`PolarizationOperator` for the polarization-based
    schemes, a plain Hermitian ndarray for ``single_intuitive`` (whose
    pulse carries area pi/2 per single-qubit operator), and None for
    ``none``.
    """
    system_dims = tuple(int(d) for d in system_dims)
    if kind == "none":
        return None
    if kind in ("y1_product", "bell_plus", "bell_singlet", "single_intuitive"):
        if system_dims != (2, 2):
            raise ValueError(f"control {kind!r} needs a two-qubit system, got dims {system_dims}")
        if kind == "y1_product":
            return polarization_from_state(up_up_state())
        if kind == "bell_plus":
            return polarization_from_state(bell_plus_state())
        if kind == "bell_singlet":
            return polarization_from_state(singlet_state())
        return kron(PAULIS["z"], PAULIS["i"]) + kron(PAULIS["i"], PAULIS["z"])
    if kind == "mlevel_v1":
        if len(system_dims) != 1:
            raise ValueError(f"control 'mlevel_v1' needs a single M-level system, got {system_dims}")
        return polarization_from_state(basis_state(system_dims[0], 0))
    raise ValueError(f"unknown control kind {kind!r}")


def generic_two_qubit_hamiltonian(coeffs) -> np.ndarray:
    """Sum of the 16 two-qubit Pauli products weighted by ``coeffs``.

    Coefficient order follows :func:`uddsim.algebra.pauli_product_basis`
    (II first, second-qubit label minor), so ``coeffs[0]`` is the
    identity (bath-free constant) term.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    elements, _ = pauli_product_basis()
    if coeffs.shape != (16,):
        raise ValueError(f"need 16 coefficients, got shape {coeffs.shape}")
    h = np.zeros((4, 4), dtype=np.complex128)
    for c, x in zip(coeffs, elements):
        h += c * x
    return h


def initial_full_state(model: ModelInstance, system_state: np.ndarray) -> np.ndarray:
    """System state tensored with every bath factor in its first basis state."""
    system_state = np.asarray(system_state, dtype=np.complex128)
    if system_state.size != model.system_dim:
        raise ValueError(
            f"system state has dim {system_state.size}, model system dim is {model.system_dim}"
        )
    full = system_state
    for d in model.factor_dims[model.system_factor_count:]:
        full = np.kron(full, basis_state(d, 0))
    return full
