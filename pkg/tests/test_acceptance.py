"""Acceptance gate: one test per criterion, each printing a single verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected into the terminal summary.
"""
import io
import json
import math
import time

import numpy as np

from helpers import SX, SY, SZ, bloch_grid, faithfulness_case, random_hermitian
from obsalg.cli import problem_document, run
from obsalg.complementarity import (
    WEYL_COSINE_REFERENCE,
    build_oscillator,
    minimize_deviation_functional,
    robertson_bound,
    weyl_cosine_experiment,
)
from obsalg.gns import gns_construct, gns_direct_sum, verify_representation
from obsalg.matrix_algebra import block_algebra, full_algebra, generate_algebra, verify_cstar_laws
from obsalg.optimize import OptimizerConfig
from obsalg.poisson import run_identity_battery
from obsalg.sectors import decompose, phase_observability, phase_variation
from obsalg.states import State, deviation, expectation, simulate_measurements
from obsalg.weyl import conjugated_system, haar_unitary, phase_distance, schrodinger_system, solve_intertwiner

S1 = 0.5 * SX
S3 = 0.5 * SZ


def _rows(names, **kw):
    rows = {r.name: r for r in run_identity_battery(**kw)}
    return [rows[n] for n in names]


def test_criterion_01_spin_sum_of_squares(tmp_path, acceptance_line):
    path = tmp_path / "spin.json"
    path.write_text(json.dumps(problem_document("bounds minimize", {"a": S1.real.tolist(), "b": S3.real.tolist()})))
    out = io.StringIO()
    t0 = time.perf_counter()
    code = run(["bounds", "minimize", "--kind", "sum_of_squares", "--file", str(path), "--seed", "1", "--format", "json"], out, io.StringIO())
    elapsed = time.perf_counter() - t0
    value = json.loads(out.getvalue())["infimum_estimate"]
    worst = 0.0
    for psi in bloch_grid(10_000):
        s = State.pure(psi)
        direct = deviation(s, S1) ** 2 + deviation(s, S3) ** 2
        closed = 0.5 - expectation(s, S1).real ** 2 - expectation(s, S3).real ** 2
        worst = max(worst, abs(direct - closed))
    ok = code == 0 and abs(value - 0.25) < 1e-6 and worst < 1e-12 and elapsed < 2.0
    acceptance_line(1, ok, f"infimum {value:.10f}, closed-form gap {worst:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_spin_product(acceptance_line):
    t0 = time.perf_counter()
    rep = minimize_deviation_functional(S1, S3, "product", OptimizerConfig(seed=1))
    elapsed = time.perf_counter() - t0
    ok = rep.infimum_estimate < 1e-6 and elapsed < 2.0
    acceptance_line(2, ok, f"product infimum {rep.infimum_estimate:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_03_commutator_identity(acceptance_line):
    t0 = time.perf_counter()
    (row,) = _rows(["commutator_equals_z_bracket"], degree=4, pairs=200, seed=1, max_coords=3)
    elapsed = time.perf_counter() - t0
    ok = row.ok and row.total == 200 and elapsed < 30
    acceptance_line(3, ok, f"{row.passed}/{row.total} exact, {elapsed:.1f}s")
    assert ok


def test_criterion_04_dirac_and_jacobi(acceptance_line):
    t0 = time.perf_counter()
    dirac, jacobi = _rows(["dirac_identity", "jacobi_identity"], degree=3, pairs=100, seed=2, max_coords=3)
    elapsed = time.perf_counter() - t0
    ok = dirac.ok and jacobi.ok and dirac.total == jacobi.total == 100 and elapsed < 30
    acceptance_line(4, ok, f"dirac {dirac.passed}/100, jacobi {jacobi.passed}/100, {elapsed:.1f}s")
    assert ok


def test_criterion_05_specializations(acceptance_line):
    classical, quantum = _rows(["classical_limit", "schroedinger_action"], degree=3, pairs=100, seed=3, max_coords=3)
    ok = classical.ok and quantum.ok
    acceptance_line(5, ok, f"classical {classical.passed}/100, schroedinger {quantum.passed}/100")
    assert ok


def test_criterion_06_gns_reconstruction(acceptance_line):
    rng = np.random.default_rng(6)
    worst_exp = worst_hom = 0.0
    ranks_ok = True
    for _ in range(50):
        n = int(rng.integers(2, 7))
        alg = full_algebra(n)
        s = State.random(n, rng)
        t = gns_construct(alg, s)
        rep = verify_representation(t, alg, s)
        worst_exp = max(worst_exp, rep.residuals["expectation"])
        worst_hom = max(worst_hom, rep.residuals["multiplicativity"], rep.residuals["star"], rep.residuals["linearity"])
        ranks_ok &= rep.cyclic_rank == t.space_dim
    pure = gns_construct(full_algebra(2), State.pure([1, 0])).space_dim
    trace = gns_construct(full_algebra(2), State.mixed(2)).space_dim
    ok = worst_exp < 1e-9 and worst_hom < 1e-8 and ranks_ok and pure == 2 and trace == 4
    acceptance_line(6, ok, f"expectation {worst_exp:.1e}, homomorphism {worst_hom:.1e}, dims pure/tracial {pure}/{trace}")
    assert ok


def test_criterion_07_faithfulness(acceptance_line):
    rng = np.random.default_rng(7)
    agree = 0
    worst_norm = 0.0
    for _ in range(50):
        alg, fam, _ = faithfulness_case(rng)
        ds = gns_direct_sum(alg, fam)
        agree += ds.faithful == ds.separating
        if ds.separating:
            worst_norm = max(worst_norm, float(np.max(np.abs(ds.norm_deficits))))
    ok = agree == 50 and worst_norm < 1e-7
    acceptance_line(7, ok, f"verdicts agree {agree}/50, separating-family norm deficit {worst_norm:.1e}")
    assert ok


def test_criterion_08_sectors(acceptance_line):
    alg = block_algebra([2, 1])
    dec = decompose(alg, "irreducible")
    off = dec.off_block_residual(alg)
    c = 1 / math.sqrt(2)
    psi1 = dec.block_basis(0) @ np.array([0.6, 0.8j])
    psi2 = dec.block_basis(1)[:, 0]
    cross = phase_observability(alg, dec, psi1, psi2, c, c).variation
    control, _ = phase_variation([SX], [1, 0], [0, 1], c, c, np.linspace(0, 2 * np.pi, 64, endpoint=False))
    sizes = tuple(s for _, s in dec.blocks)
    ok = sizes == (2, 1) and off < 1e-10 and cross < 1e-12 and abs(control - 2.0) < 1e-10
    acceptance_line(8, ok, f"blocks {sizes}, off-block {off:.1e}, cross-sector variation {cross:.1e}, control {control:.12f}")
    assert ok


def test_criterion_09_robertson(acceptance_line):
    rng = np.random.default_rng(9)
    worst = math.inf
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        s = State.random(n, rng)
        a, b = random_hermitian(n, rng), random_hermitian(n, rng)
        worst = min(worst, deviation(s, a) * deviation(s, b) - robertson_bound(s, a, b))
    s0 = State.pure([1, 0])
    eq = abs(deviation(s0, SX) * deviation(s0, SY) - robertson_bound(s0, SX, SY))
    ok = worst >= -1e-10 and eq < 1e-12
    acceptance_line(9, ok, f"minimum slack {worst:.2e}, equality case gap {eq:.1e}")
    assert ok


def test_criterion_10_weyl_uniqueness(acceptance_line):
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    null_ok = True
    worst_res = worst_phase = 0.0
    for n in (2, 3, 5, 8, 16, 64):
        base = schrodinger_system(n)
        for _ in range(20):
            g = haar_unitary(n, rng)
            sol = solve_intertwiner(base, conjugated_system(base, g))
            null_ok &= sol.null_dim == 1
            worst_res = max(worst_res, max(sol.residuals.values()))
            worst_phase = max(worst_phase, phase_distance(sol.w, g))
    elapsed = time.perf_counter() - t0
    ok = null_ok and worst_res < 1e-8 and worst_phase < 1e-7 and elapsed < 60
    acceptance_line(10, ok, f"null dim 1 in 120/120: {null_ok}, residual {worst_res:.1e}, phase distance {worst_phase:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_11_weyl_cosine(acceptance_line):
    t0 = time.perf_counter()
    rep = weyl_cosine_experiment(build_oscillator(40, 1.0, 1.0), OptimizerConfig(seed=11))
    elapsed = time.perf_counter() - t0
    value = rep.infimum_estimate
    change = rep.extras["relative_change"]
    ok = value > 0.01 and change < 0.2 and rep.extras["reference"] == WEYL_COSINE_REFERENCE and elapsed < 300
    acceptance_line(
        11,
        ok,
        f"N=40 infimum {value:.4f}, N=20 {rep.extras['half_truncation_infimum']:.4f} "
        f"(change {100 * change:.1f}%), reference {WEYL_COSINE_REFERENCE}, {elapsed:.0f}s",
    )
    assert ok


def test_criterion_12_cstar_laws(acceptance_line):
    rng = np.random.default_rng(12)
    worst = 0.0
    dims = []
    for n in range(2, 7):
        for _ in range(2):
            gens = [random_hermitian(n, rng) for _ in range(int(rng.integers(1, 3)))]
            if rng.random() < 0.5:
                # keep some algebras proper by cutting the generators to a corner
                mask = np.zeros((n, n))
                mask[: n - 1, : n - 1] = 1
                gens = [g * mask for g in gens]
            alg = generate_algebra(gens)
            dims.append(alg.dim)
            rep = verify_cstar_laws(alg, 100, int(rng.integers(2**31)))
            worst = max(worst, rep.max_residual())
    ok = worst < 1e-9
    acceptance_line(12, ok, f"max residual {worst:.1e} over {len(dims)} algebras (dims {min(dims)}..{max(dims)})")
    assert ok


def test_criterion_13_measurement(acceptance_line):
    rng = np.random.default_rng(13)
    n_samples = 100_000
    worst = 0.0
    for k in range(20):
        n = int(rng.integers(2, 6))
        s = State.random(n, rng)
        a = random_hermitian(n, rng)
        rec = simulate_measurements(s, a, n_samples, seed=k)
        se = deviation(s, a) / math.sqrt(n_samples)
        worst = max(worst, abs(rec.empirical_mean - expectation(s, a).real) / se)
    eig = simulate_measurements(State.pure([1, 0]), SZ, 1000, seed=0)
    exact = eig.empirical_mean == 1.0 and bool(np.all(eig.outcomes == 1.0))
    ok = worst < 4 and exact
    acceptance_line(13, ok, f"worst error {worst:.2f} standard errors over 20 cases, eigenstate exact: {exact}")
    assert ok
