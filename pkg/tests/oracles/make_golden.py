"""Brute-force reference values for the test suite.

Everything here is built from dense Kronecker products and explicit state
vectors with numpy/scipy only; the package under test is never imported.
Run from the repository root to refresh ``tests/fixtures/golden.json``:

    python tests/oracles/make_golden.py
"""

from __future__ import annotations

import json
import math
from functools import reduce
from pathlib import Path

import numpy as np
from scipy.linalg import expm

OUT = Path(__file__).resolve().parents[1] / "fixtures" / "golden.json"

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(word: str) -> np.ndarray:
    return reduce(np.kron, [PAULI[c] for c in word])


def tfim_terms(n: int, j: float, h: float) -> list[tuple[float, str]]:
    # ZZ bonds first, then X fields, both in ascending site order
    terms = []
    for i in range(n - 1):
        w = ["I"] * n
        w[i] = w[i + 1] = "Z"
        terms.append((-j, "".join(w)))
    for i in range(n):
        w = ["I"] * n
        w[i] = "X"
        terms.append((-j * h, "".join(w)))
    return terms


def dense(terms) -> np.ndarray:
    return sum(c * pauli_matrix(w) for c, w in terms)


def gamma_cubed_dense(terms, tol=1e-12) -> tuple[float, int]:
    mats = [pauli_matrix(w) for _, w in terms]
    a = [abs(c) for c, _ in terms]
    m = len(terms)

    def nonzero(q, p, j):
        inner = mats[p] @ mats[j] - mats[j] @ mats[p]
        outer = mats[q] @ inner - inner @ mats[q]
        return np.abs(outer).max() > tol

    cube, count = 0.0, 0
    for j in range(m):
        for p in range(j + 1, m):
            for q in range(j + 1, m):
                if nonzero(q, p, j):
                    cube += 2 / 3 * a[p] * a[q] * a[j]
                    count += 1
            if nonzero(j, p, j):
                cube += 1 / 3 * a[p] * a[j] ** 2
                count += 1
    return cube, count


def trotter1_dense(terms, dt: float) -> np.ndarray:
    dim = pauli_matrix(terms[0][1]).shape[0]
    u = np.eye(dim, dtype=complex)
    for c, w in terms:
        # the first term acts first
        u = expm(-1j * c * dt * pauli_matrix(w)) @ u
    return u


def harmonic_krylov(delta_e: float, dim: int, beta: float, n_t: int, dt: float) -> np.ndarray:
    """Eigenvalues of the regularized pencil from explicitly evolved states."""
    e = delta_e * np.arange(dim)
    h = np.diag(e).astype(complex)
    psi = np.exp(-beta * e).astype(complex)
    psi /= np.linalg.norm(psi)
    states = np.column_stack([np.exp(-1j * e * k * dt) * psi for k in range(n_t + 1)])
    s = states.conj().T @ states
    hm = states.conj().T @ h @ states
    lam, w = np.linalg.eigh(s)
    keep = lam > 1e-12
    x = w[:, keep] / np.sqrt(lam[keep])
    ht = x.conj().T @ hm @ x
    return np.linalg.eigvalsh(0.5 * (ht + ht.conj().T))


def main() -> None:
    golden: dict = {}

    # small TFIM: Trotter-error coefficient and resource closed forms
    terms2 = tfim_terms(2, 1.0, 2.0)
    cube, count = gamma_cubed_dense(terms2)
    gamma = cube ** (1 / 3)
    e2 = np.linalg.eigvalsh(dense(terms2))
    n_terms = len(terms2)
    one_norm = sum(abs(c) for c, _ in terms2)
    eps = 1e-3
    t_step = gamma**-1.5 * math.sqrt(eps / (2 * math.sqrt(2) * math.pi))
    m_anc = math.ceil(-0.5 + math.log2(2 * math.pi / (eps * t_step)))
    per_run = 2 * n_terms * (2 * math.sqrt(2) * math.pi * gamma / eps) ** 1.5
    min_overlap = 0.5
    n_t, t_max, s_inv = 20, 1.0, 10.0
    n_s = n_t**4.5 * n_terms * (gamma * t_max) ** 1.5 / eps**2.5
    golden["tfim2"] = {
        "n_sites": 2,
        "j": 1.0,
        "h": 2.0,
        "gamma_cubed": cube,
        "gamma": gamma,
        "triple_count": count,
        "n_terms": n_terms,
        "one_norm": one_norm,
        "ground_energy": float(e2[0]),
        "eps": eps,
        "trotter_step": t_step,
        "m_ancillae": m_anc,
        "n_exp_per_run": per_run,
        "min_overlap": min_overlap,
        "n_exp_qpe": per_run / min_overlap,
        "vqpe_n_t": n_t,
        "vqpe_t_max": t_max,
        "vqpe_s_inv_norm": s_inv,
        "n_exp_vqpe_s": n_s,
        "n_exp_vqpe_h": n_s * one_norm**2,
        "n_exp_vqpe_total": n_terms * (n_t * one_norm) ** 4.5 * s_inv**5
        * (gamma * t_max) ** 1.5 / eps**2.5,
    }

    # ten-site TFIM: ground energy, first-order Trotter eigenphase, product-state weight
    terms10 = tfim_terms(10, 1.0, 2.0)
    h10 = dense(terms10)
    e10, v10 = np.linalg.eigh(h10)
    ground = v10[:, 0]
    dt = 0.05
    mu, vt = np.linalg.eig(trotter1_dense(terms10, dt))
    overlaps = np.abs(vt.conj().T @ ground) / np.linalg.norm(vt, axis=0)
    k = int(np.argmax(overlaps))
    site = np.array([0.979, 0.205], dtype=complex)
    site /= np.linalg.norm(site)
    product = reduce(np.kron, [site] * 10)
    zero = np.zeros(2**10, dtype=complex)
    zero[0] = 1
    golden["tfim10"] = {
        "n_sites": 10,
        "j": 1.0,
        "h": 2.0,
        "dt": dt,
        "ground_energy": float(e10[0]),
        "trotter_ground_energy": float(-np.angle(mu[k]) / dt),
        "trotter_overlap": float(overlaps[k]),
        "product_amplitudes": [0.979, 0.205],
        "product_ground_weight": float(abs(ground.conj() @ product) ** 2),
        "zero_state_ground_weight": float(abs(ground.conj() @ zero) ** 2),
    }

    # harmonic spectrum at the perfect step
    delta_e, dim, beta, n_t_h = 0.75, 16, 1.0, 15
    dt_p = 2 * math.pi / ((n_t_h + 1) * delta_e)
    eps_h = harmonic_krylov(delta_e, dim, beta, n_t_h, dt_p)
    e = delta_e * np.arange(dim)
    w = np.exp(-2 * beta * e)
    w /= w.sum()
    golden["harmonic"] = {
        "delta_e": delta_e,
        "dimension": dim,
        "beta": beta,
        "n_t": n_t_h,
        "dt": dt_p,
        "krylov_eigenvalues": [float(x) for x in eps_h],
        "exact_energies": [float(x) for x in e],
        "boltzmann_weights": [float(x) for x in w],
        "support_counts": {
            f"{s:g}": int((w > s).sum()) for s in (1e-2, 1e-4, 1e-8)
        },
    }

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
