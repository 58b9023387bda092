"""Pauli strings and their algebra.

A Pauli string is stored as a word over ``IXYZ`` with qubit 0 first. Dense
matrices use the Kronecker order ``ops[0] (x) ops[1] (x) ...``, so qubit ``i``
lives on bit ``n - 1 - i`` of a computational-basis index.

Actions on state vectors never build matrices: for a string with X-mask ``x``,
Z-mask ``z`` and ``ny`` Y letters,

    P |b> = i**ny * (-1)**popcount(b & z) |b ^ x>

since ``Y = i X Z`` letter by letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .errors import InvalidArgumentError

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-letter products: _PRODUCT[a, b] = (phase, c) with a @ b = phase * c
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators, e.g. ``PauliString("ZZI")``."""

    ops: str

    def __post_init__(self):
        ops = self.ops.upper()
        if not ops or set(ops) - set("IXYZ"):
            raise InvalidArgumentError(f"invalid Pauli string {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_sparse(cls, n_qubits: int, letters: dict[int, str]) -> PauliString:
        """Build a string from ``{qubit: letter}``, identity elsewhere."""
        ops = ["I"] * n_qubits
        for q, letter in letters.items():
            if not 0 <= q < n_qubits:
                raise InvalidArgumentError(f"qubit {q} out of range for {n_qubits} qubits")
            ops[q] = letter
        return cls("".join(ops))

    @property
    def n_qubits(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return self.ops

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.ops)

    def commutes_with(self, other: PauliString) -> bool:
        """True iff the strings commute: an even number of sites carry
        distinct non-identity letters."""
        self._check_size(other)
        clashes = sum(a != "I" and b != "I" and a != b for a, b in zip(self.ops, other.ops))
        return clashes % 2 == 0

    def multiply(self, other: PauliString) -> tuple[complex, PauliString]:
        """Return ``(phase, P)`` with ``self @ other == phase * P``."""
        self._check_size(other)
        phase = 1 + 0j
        letters = []
        for a, b in zip(self.ops, other.ops):
            p, c = _PRODUCT[a, b]
            phase *= p
            letters.append(c)
        return phase, PauliString("".join(letters))

    def commutator(self, other: PauliString) -> tuple[complex, PauliString] | None:
        """``[self, other]`` as ``(coefficient, string)``, or None when it vanishes.

        Anticommuting strings give ``[A, B] = 2 A B``.
        """
        if self.commutes_with(other):
            return None
        phase, prod = self.multiply(other)
        return 2 * phase, prod

    def to_matrix(self) -> np.ndarray:
        return reduce(np.kron, [PAULI_MATRICES[c] for c in self.ops])

    @cached_property
    def masks(self) -> tuple[int, int, int]:
        """``(x_mask, z_mask, n_y)`` in the computational-basis bit layout."""
        n = self.n_qubits
        x = z = ny = 0
        for q, c in enumerate(self.ops):
            bit = 1 << (n - 1 - q)
            if c in "XY":
                x |= bit
            if c in "ZY":
                z |= bit
            ny += c == "Y"
        return x, z, ny

    def action(self) -> tuple[np.ndarray, np.ndarray]:
        """Permutation and phase vector with ``(P psi) = (phase * psi)[perm]``."""
        x, z, ny = self.masks
        idx = np.arange(2**self.n_qubits, dtype=np.int64)
        parity = np.bitwise_count(idx & z) & 1
        phase = (1j**ny) * (1 - 2 * parity.astype(float))
        return idx ^ x, phase

    def apply(self, psi: np.ndarray) -> np.ndarray:
        perm, phase = self.action()
        return (phase * psi)[perm]

    def _check_size(self, other: PauliString) -> None:
        if other.n_qubits != self.n_qubits:
            raise InvalidArgumentError(
                f"Pauli strings act on {self.n_qubits} and {other.n_qubits} qubits"
            )


def nested_commutator_nonzero(a: PauliString, b: PauliString, c: PauliString) -> bool:
    """Whether ``[a, [b, c]]`` is a nonzero operator.

    ``[b, c]`` is zero or proportional to the single string ``b c``; the outer
    commutator then vanishes iff ``a`` commutes with that string.
    """
    inner = b.commutator(c)
    if inner is None:
        return False
    return not a.commutes_with(inner[1])
