import math

import numpy as np
import pytest

from vqpe.errors import ContractViolationError, InvalidArgumentError
from vqpe.evolution import Propagator, evolved_sequence
from vqpe.hamiltonian import build_linear_spectrum, build_tfim, diagonalize, make_reference
from vqpe.krylov import (
    SolverConfig,
    assemble_h_full,
    assemble_s,
    gram_matrix,
    measure_overlap_generator,
    solve_gevp,
)
from vqpe.noise import NoiseSpec
from vqpe.pcc import perfect_time_step
from vqpe.qpe import trotter_ground_energy
from vqpe.trace import convergence_trace, make_propagator, trace_from_generator


@pytest.fixture(scope="module")
def harmonic():
    h = build_linear_spectrum(0.75, 16)
    spec = diagonalize(h)
    psi = make_reference("boltzmann", spectrum=spec, beta=1.0)
    return h, spec, psi, perfect_time_step(0.75, 15)


def test_prefixes_match_independent_solves(harmonic):
    h, spec, psi, dt = harmonic
    prop = Propagator.exact(spec, dt)
    trace = convergence_trace(h, psi, prop, SolverConfig(1e-10), 12)
    assert list(trace.n_t) == list(range(13))
    states = evolved_sequence(prop, psi, 12)
    for n in (0, 5, 12):
        phi = states[: n + 1]
        est = solve_gevp(assemble_h_full(h, phi), gram_matrix(phi), SolverConfig(1e-10))
        assert np.allclose(trace[n].eigenvalues, est.eigenvalues, atol=1e-9)
        assert trace[n].n_svd == est.n_svd


def test_trace_times(harmonic):
    h, spec, psi, dt = harmonic
    trace = convergence_trace(h, psi, Propagator.exact(spec, dt), SolverConfig(), 6)
    e = trace[4]
    assert e.total_time == pytest.approx(4 * dt)
    assert e.cumulative_time == pytest.approx(dt * 5 * 6 / 2)


def test_n_t_values_subset(harmonic):
    h, spec, psi, dt = harmonic
    prop = Propagator.exact(spec, dt)
    full = convergence_trace(h, psi, prop, SolverConfig(1e-6), 15)
    some = convergence_trace(h, psi, prop, SolverConfig(1e-6), 15, n_t_values=[15, 3, 7])
    assert list(some.n_t) == [3, 7, 15]
    assert np.allclose(some[2].eigenvalues, full[15].eigenvalues)
    with pytest.raises(InvalidArgumentError):
        convergence_trace(h, psi, prop, SolverConfig(), 5, n_t_values=[6])


def test_nan_padding_for_missing_levels(harmonic):
    h, spec, psi, dt = harmonic
    trace = convergence_trace(h, psi, Propagator.exact(spec, dt), SolverConfig(0.5), 3)
    assert math.isnan(trace[0].energy(3))
    assert np.isnan(trace.energies(3)[0])
    assert trace.singular_values(0)[0] == pytest.approx(1.0)


def test_degenerate_prefix_is_recorded(harmonic):
    h, spec, psi, dt = harmonic
    trace = convergence_trace(h, psi, Propagator.exact(spec, dt), SolverConfig(1.5), 4)
    # a single state has S = [1], below the threshold
    assert trace[0].n_svd == 0
    assert math.isnan(trace[0].ground_energy)
    assert trace[0].diagnostics
    assert trace[4].n_svd >= 1


def test_element_noise_prefix_consistency(harmonic):
    h, spec, psi, dt = harmonic
    gen = measure_overlap_generator(Propagator.exact(spec, dt), psi, 20, h)
    noise = NoiseSpec("element", 1e-3, seed=4)
    long = trace_from_generator(gen, SolverConfig(0.1), 20, noise=noise)
    short = trace_from_generator(gen, SolverConfig(0.1), 10, noise=noise)
    assert np.array_equal(long[10].eigenvalues, short[10].eigenvalues)
    again = trace_from_generator(gen, SolverConfig(0.1), 20, noise=noise)
    assert np.array_equal(long.ground_energies, again.ground_energies)


def test_trotter_hermitian_uses_full_matrix():
    h = build_tfim(3, 1.0, 2.0)
    psi = make_reference("basis", dimension=8)
    prop = make_propagator(h, 0.1, "trotter1")
    trace = convergence_trace(h, psi, prop, SolverConfig(1e-8), 10)
    states = evolved_sequence(prop, psi, 10)
    est = solve_gevp(assemble_h_full(h, states), gram_matrix(states), SolverConfig(1e-8))
    assert np.allclose(trace[10].eigenvalues, est.eigenvalues, atol=1e-9)
    with pytest.raises(ContractViolationError):
        convergence_trace(h, psi, prop, SolverConfig(1e-2), 5, noise=NoiseSpec("shots", shots=100))


def test_trotter_unitary_converges_to_trotter_phase():
    h = build_tfim(3, 1.0, 2.0)
    spec = diagonalize(h)
    psi = make_reference("basis", dimension=8)
    prop = make_propagator(h, 0.1, "trotter1")
    trace = convergence_trace(h, psi, prop, SolverConfig(1e-8, "unitary", 0.1), 30)
    assert trace[30].ground_energy == pytest.approx(trotter_ground_energy(h, 0.1, spec), abs=1e-8)


def test_shot_trace_is_seeded():
    h = build_tfim(2, 1.0, 2.0)
    psi = make_reference("basis", dimension=4)
    prop = make_propagator(h, 0.2)
    noise = NoiseSpec("shots", shots=100_000, seed=1)
    a = convergence_trace(h, psi, prop, SolverConfig(0.2), 8, noise=noise)
    b = convergence_trace(h, psi, prop, SolverConfig(0.2), 8, noise=noise)
    assert np.array_equal(a.ground_energies, b.ground_energies)
    e0 = diagonalize(h).ground_energy
    assert abs(a[8].ground_energy - e0) < 0.05


def test_overlap_prefix_matches_assembly(harmonic):
    h, spec, psi, dt = harmonic
    gen = measure_overlap_generator(Propagator.exact(spec, dt), psi, 5)
    assert np.allclose(assemble_s(gen, 5), gram_matrix(evolved_sequence(Propagator.exact(spec, dt), psi, 5)))
