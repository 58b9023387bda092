"""Hamiltonian representations, exact diagonalization and reference states.

Three representations are supported:

- :class:`DiagonalHamiltonian` -- a bare spectrum, already in its eigenbasis;
- :class:`PauliSumHamiltonian` -- ``sum_j alpha_j P_j`` with unit-norm Pauli strings;
- :class:`DenseHermitianMatrix` -- an explicit matrix, e.g. ingested from file.

All three expose ``dimension`` and ``matvec`` so that propagators and matrix
builders can treat them uniformly. State vectors are plain complex numpy
arrays of unit norm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    HamiltonianParseError,
    HermiticityError,
    InvalidArgumentError,
    NumericalFailureError,
    ResourceLimitError,
)
from .pauli import PauliString

DEFAULT_DENSE_CAP = 2**14
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """Hamiltonian given directly by its (ascending) energies."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).ravel()
        if e.size == 0:
            raise InvalidArgumentError("a Hamiltonian needs at least one level")
        e = e[np.argsort(e, kind="stable")]
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def dimension(self) -> int:
        return self.energies.size

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        return self.energies * psi


@dataclass(frozen=True)
class PauliSumHamiltonian:
    """``H = sum_j alpha_j P_j`` with real coefficients.

    Duplicate strings are merged on construction, keeping the position of the
    first occurrence; term order is otherwise preserved and defines the
    Trotter ordering.
    """

    terms: tuple[tuple[float, PauliString], ...]
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidArgumentError("n_qubits must be positive")
        merged: dict[PauliString, float] = {}
        for coeff, string in self.terms:
            if not isinstance(string, PauliString):
                string = PauliString(string)
            if string.n_qubits != self.n_qubits:
                raise InvalidArgumentError(
                    f"term {string} does not act on {self.n_qubits} qubits"
                )
            c = complex(coeff)
            if abs(c.imag) > HERMITIAN_TOL:
                raise HermiticityError(f"coefficient of {string} is not real: {coeff}")
            merged[string] = merged.get(string, 0.0) + c.real
        object.__setattr__(self, "terms", tuple((c, s) for s, c in merged.items()))

    @classmethod
    def from_strings(cls, terms, n_qubits: int | None = None) -> PauliSumHamiltonian:
        """Build from ``[(coeff, "XZI"), ...]``."""
        terms = [(c, PauliString(s) if isinstance(s, str) else s) for c, s in terms]
        if n_qubits is None:
            if not terms:
                raise InvalidArgumentError("cannot infer n_qubits from an empty term list")
            n_qubits = terms[0][1].n_qubits
        return cls(tuple(terms), n_qubits)

    @property
    def dimension(self) -> int:
        return 2**self.n_qubits

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    @property
    def strings(self) -> list[PauliString]:
        return [s for _, s in self.terms]

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def one_norm(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @cached_property
    def term_actions(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [s.action() for _, s in self.terms]

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=complex)
        for (coeff, _), (perm, phase) in zip(self.terms, self.term_actions):
            out += coeff * (phase * psi)[perm]
        return out

    def __str__(self) -> str:
        return " + ".join(f"{c:g}*{s}" for c, s in self.terms)


@dataclass(frozen=True)
class DenseHermitianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgumentError(f"expected a square matrix, got shape {m.shape}")
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > HERMITIAN_TOL:
            raise HermiticityError(f"matrix deviates from Hermitian by {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        return self.entries @ psi


Hamiltonian = Union[DiagonalHamiltonian, PauliSumHamiltonian, DenseHermitianMatrix]


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition ``H |N> = E_N |N>`` with ascending energies."""

    energies: np.ndarray
    eigenvectors: np.ndarray
    min_gap: float

    @property
    def dimension(self) -> int:
        return self.energies.size

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    def to_eigenbasis(self, psi: np.ndarray) -> np.ndarray:
        return self.eigenvectors.conj().T @ psi

    def from_eigenbasis(self, coeffs: np.ndarray) -> np.ndarray:
        return self.eigenvectors @ coeffs


@dataclass(frozen=True)
class SupportSpace:
    """Eigenstates carrying weight ``|<N|Psi0>|^2`` above ``threshold``.

    ``entries`` holds ``(level index, weight)`` sorted by descending weight.
    """

    entries: tuple[tuple[int, float], ...]
    threshold: float
    all_weights: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return len(self.entries)

    @property
    def indices(self) -> list[int]:
        return [n for n, _ in self.entries]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.entries])


def build_linear_spectrum(delta_e: float, dimension: int) -> DiagonalHamiltonian:
    """Harmonic-oscillator-like spectrum ``E_N = N * delta_e``."""
    if not delta_e > 0:
        raise InvalidArgumentError(f"delta_e must be positive, got {delta_e}")
    if int(dimension) != dimension or dimension < 1:
        raise InvalidArgumentError(f"dimension must be a positive integer, got {dimension}")
    return DiagonalHamiltonian(delta_e * np.arange(int(dimension), dtype=float))


def build_tfim(n_sites: int, j_coupling: float = 1.0, h_field: float = 2.0) -> PauliSumHamiltonian:
    """Open-chain transverse-field Ising model ``-J (sum Z_i Z_{i+1} + h sum X_i)``.

    Terms come in the canonical order used for Trotterization: all ZZ bonds in
    ascending site order, then all X fields in ascending site order.
    """
    if int(n_sites) != n_sites or n_sites < 1:
        raise InvalidArgumentError(f"n_sites must be a positive integer, got {n_sites}")
    n = int(n_sites)
    terms = [
        (-j_coupling, PauliString.from_sparse(n, {i: "Z", i + 1: "Z"})) for i in range(n - 1)
    ]
    terms += [(-j_coupling * h_field, PauliString.from_sparse(n, {i: "X"})) for i in range(n)]
    return PauliSumHamiltonian(tuple(terms), n)


def to_dense(h: Hamiltonian, cap: int = DEFAULT_DENSE_CAP) -> DenseHermitianMatrix:
    """Explicit matrix of ``h``; refuses dimensions above ``cap``."""
    dim = h.dimension
    if dim > cap:
        raise ResourceLimitError(f"dense dimension {dim} exceeds cap {cap}")
    if isinstance(h, DenseHermitianMatrix):
        return h
    if isinstance(h, DiagonalHamiltonian):
        return DenseHermitianMatrix(np.diag(h.energies).astype(complex))
    m = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for coeff, s in h.terms:
        perm, phase = s.action()
        # (P psi)[c] = phase[c ^ x] psi[c ^ x]  =>  M[c, c ^ x] = phase[c ^ x]
        m[cols, perm] += coeff * phase[perm]
    return DenseHermitianMatrix(m)


def _min_gap(energies: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(energies))))
    gaps = np.diff(energies)
    gaps = gaps[gaps > 1e-12 * scale]
    return float(gaps.min()) if gaps.size else math.inf


def diagonalize(h: Hamiltonian, cap: int = DEFAULT_DENSE_CAP) -> Spectrum:
    """Full eigendecomposition; ties keep the original ordering."""
    if isinstance(h, DiagonalHamiltonian):
        e = h.energies
        return Spectrum(e, np.eye(e.size, dtype=complex), _min_gap(e))
    m = to_dense(h, cap).entries
    try:
        e, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(e, kind="stable")
    e, v = e[order], v[:, order]
    return Spectrum(e, v, _min_gap(e))


# -- reference states -------------------------------------------------------


def make_reference(
    kind: str,
    *,
    spectrum: Spectrum | None = None,
    n_qubits: int | None = None,
    dimension: int | None = None,
    index: int = 0,
    beta: float = 1.0,
    amplitudes: tuple[float, float] | None = None,
) -> np.ndarray:
    """Reference state ``|Psi0>`` in the computational basis.

    kind:
        ``"basis"``: the ``index``-th computational basis state (a
        Hartree-Fock-like determinant).
        ``"boltzmann"``: ``sum_N exp(-beta E_N) |N>`` normalized, built from
        ``spectrum``.
        ``"product"``: ``(a|0> + b|1>)`` on every one of ``n_qubits`` qubits.
    """
    if kind == "basis":
        dim = dimension
        if dim is None and spectrum is not None:
            dim = spectrum.dimension
        if dim is None and n_qubits is not None:
            dim = 2**n_qubits
        if dim is None:
            raise InvalidArgumentError("basis reference needs a dimension")
        if not 0 <= index < dim:
            raise InvalidArgumentError(f"basis index {index} out of range for dimension {dim}")
        psi = np.zeros(dim, dtype=complex)
        psi[index] = 1.0
        return psi
    if kind == "boltzmann":
        if spectrum is None:
            raise InvalidArgumentError("boltzmann reference needs a spectrum")
        e = spectrum.energies
        # shifting by E_0 only changes the normalization constant
        c = np.exp(-beta * (e - e[0]))
        c = c / np.linalg.norm(c)
        return spectrum.from_eigenbasis(c.astype(complex))
    if kind == "product":
        if amplitudes is None:
            raise InvalidArgumentError("product reference needs amplitudes (a, b)")
        if n_qubits is None:
            if spectrum is None:
                raise InvalidArgumentError("product reference needs n_qubits")
            n_qubits = int(round(math.log2(spectrum.dimension)))
            if 2**n_qubits != spectrum.dimension:
                raise InvalidArgumentError("spectrum dimension is not a power of two")
        site = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(site)
        if site.shape != (2,) or norm == 0:
            raise InvalidArgumentError(f"invalid single-site amplitudes {amplitudes}")
        site = site / norm
        psi = np.ones(1, dtype=complex)
        for _ in range(n_qubits):
            psi = np.kron(psi, site)
        return psi
    raise InvalidArgumentError(f"unknown reference kind {kind!r}")


def parse_reference(text: str) -> dict:
    """Parse the CLI form ``basis:3``, ``boltzmann:1.0`` or ``product:0.979,0.205``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "basis":
            return {"kind": "basis", "index": int(arg or 0)}
        if kind == "boltzmann":
            return {"kind": "boltzmann", "beta": float(arg or 1.0)}
        if kind == "product":
            a, b = (float(x) for x in arg.split(","))
            return {"kind": "product", "amplitudes": (a, b)}
    except ValueError as exc:
        raise InvalidArgumentError(f"cannot parse reference {text!r}: {exc}") from exc
    raise InvalidArgumentError(f"unknown reference kind in {text!r}")


def support_space(ref: np.ndarray, spectrum: Spectrum, threshold: float = 1e-12) -> SupportSpace:
    if ref.shape[0] != spectrum.dimension:
        raise InvalidArgumentError("reference and spectrum dimensions differ")
    weights = np.abs(spectrum.to_eigenbasis(ref)) ** 2
    order = np.argsort(-weights, kind="stable")
    entries = tuple((int(n), float(weights[n])) for n in order if weights[n] > threshold)
    return SupportSpace(entries, threshold, weights)


def boltzmann_support_size(s_sv: float, beta: float, delta_e: float) -> int:
    """Closed-form support size ``ceil(-ln(s_sv) / (2 beta dE)) - 1`` of a
    Boltzmann reference on a linear spectrum."""
    return math.ceil(-math.log(s_sv) / (2 * beta * delta_e)) - 1


# -- file ingestion ---------------------------------------------------------


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise HamiltonianParseError(f"{where}: missing field {key!r}")
    return obj[key]


def parse_hamiltonian(data: dict, source: str = "<data>") -> Hamiltonian:
    """Build a Hamiltonian from the JSON object layout described in the README."""
    if not isinstance(data, dict):
        raise HamiltonianParseError(f"{source}: top level must be an object")
    kind = _require(data, "kind", source)
    try:
        if kind == "diagonal":
            energies = _require(data, "energies", source)
            return DiagonalHamiltonian(np.asarray(energies, dtype=float))
        if kind == "pauli":
            n = int(_require(data, "n_qubits", source))
            terms = []
            for i, t in enumerate(_require(data, "terms", source)):
                where = f"{source}: terms[{i}]"
                coeff = float(_require(t, "coeff", where))
                string = str(_require(t, "string", where))
                if len(string) != n:
                    raise HamiltonianParseError(f"{where}: string {string!r} has length != {n}")
                terms.append((coeff, PauliString(string)))
            return PauliSumHamiltonian(tuple(terms), n)
        if kind == "dense":
            dim = int(_require(data, "dim", source))
            m = np.zeros((dim, dim), dtype=complex)
            seen = np.zeros((dim, dim), dtype=bool)
            for i, trip in enumerate(_require(data, "triplets", source)):
                if len(trip) != 4:
                    raise HamiltonianParseError(
                        f"{source}: triplets[{i}] must be [row, col, re, im]"
                    )
                r, c = int(trip[0]), int(trip[1])
                if not (0 <= r < dim and 0 <= c < dim):
                    raise HamiltonianParseError(f"{source}: triplets[{i}] index out of range")
                m[r, c] = complex(float(trip[2]), float(trip[3]))
                seen[r, c] = True
            # lower triangle may be omitted: fill from the conjugate of the upper one
            fill = ~seen & seen.T
            m[fill] = m.T.conj()[fill]
            return DenseHermitianMatrix(m)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (HamiltonianParseError, HermiticityError)):
            raise
        raise HamiltonianParseError(f"{source}: {exc}") from exc
    raise HamiltonianParseError(f"{source}: unknown kind {kind!r}")


def load_hamiltonian(path: str | Path) -> Hamiltonian:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise HamiltonianParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_hamiltonian(data, str(path))


def hamiltonian_to_json(h: Hamiltonian) -> dict:
    if isinstance(h, DiagonalHamiltonian):
        return {"kind": "diagonal", "energies": h.energies.tolist()}
    if isinstance(h, PauliSumHamiltonian):
        return {
            "kind": "pauli",
            "n_qubits": h.n_qubits,
            "terms": [{"coeff": c, "string": str(s)} for c, s in h.terms],
        }
    m = h.entries
    rows, cols = np.triu_indices(m.shape[0])
    keep = m[rows, cols] != 0
    return {
        "kind": "dense",
        "dim": m.shape[0],
        "triplets": [
            [int(r), int(c), float(m[r, c].real), float(m[r, c].imag)]
            for r, c in zip(rows[keep], cols[keep])
        ],
    }
