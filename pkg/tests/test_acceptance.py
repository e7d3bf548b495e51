"""Acceptance suite: the nine release criteria, one test and one printed
pass/fail line each.  Run with ``pytest tests/test_acceptance.py -v -s``
to see the lines; every criterion also asserts, so a plain ``pytest``
fails loudly when one breaks.

All entropies are in natural log unless stated otherwise.
"""

import json
import time

import numpy as np

from bnineq import (
    ADDITIVITY_SPLIT,
    FactorShape,
    FourFactorState,
    DensityMatrix,
    PureState,
    bn_gap,
    bn_lhs,
    bn_rhs,
    canonical_counterexample,
    deformed_counterexample,
    degenerate_blocks,
    entangled_decomposition,
    haar_state,
    haar_unitary,
    hermitian_eigen,
    maximize_rhs,
    partial_trace,
    partial_trace_naive,
    product_decomposition,
    save_state,
    scan,
    schmidt_decompose,
    state_to_document,
    verify_decomposition,
    von_neumann_entropy,
)
from bnineq.cli import main

TWO_LN_TWO = 1.3862943611198906


def report(number, ok, detail):
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_1_canonical_family_violates_at_all_dims():
    t0 = time.perf_counter()
    worst = 0.0
    for d in (2, 3, 4, 5):
        s = canonical_counterexample(d)
        lhs = bn_lhs(s)
        rhs_ent = bn_rhs(entangled_decomposition(d))
        rhs_prod = bn_rhs(product_decomposition(d))
        gap = lhs - rhs_ent
        target = 2.0 * np.log(d)
        assert lhs <= 1e-10, f"d={d}: lhs={lhs}"
        assert abs(rhs_ent - target) <= 1e-9, f"d={d}: rhs_ent={rhs_ent}"
        assert rhs_prod <= 1e-10, f"d={d}: rhs_prod={rhs_prod}"
        assert gap <= -target + 1e-8, f"d={d}: gap={gap}"
        worst = max(worst, lhs, abs(rhs_ent - target), rhs_prod)
    elapsed = time.perf_counter() - t0
    report(
        1,
        elapsed < 10.0,
        f"d in 2..5: lhs = 0, entangled rhs = 2 ln d, product rhs = 0 "
        f"(worst deviation {worst:.2e}), {elapsed:.2f}s < 10s",
    )


def test_criterion_2_canonical_state_is_basis_independent():
    worst = 0.0
    for d in (2, 3):
        target = canonical_counterexample(d).state.amplitudes
        for trial in range(20):
            u = haar_unitary(d * d, 9000 + 100 * d + trial)
            rebuilt = np.zeros(d**4, dtype=np.complex128)
            for a in range(d * d):
                rebuilt += np.kron(u[:, a], np.conj(u[:, a]))
            rebuilt /= d
            worst = max(worst, float(np.linalg.norm(rebuilt - target)))
    report(
        2,
        worst <= 1e-10,
        f"(1/d) sum_a Phi_a x conj(Phi_a) reproduces the state for 20 Haar "
        f"bases at d=2,3 (worst norm difference {worst:.2e} <= 1e-10)",
    )


def test_criterion_3_deformed_family_keeps_violating():
    lhs_by_eps = {}
    for eps in (0.2, 0.1, 0.05):
        state, designated = deformed_counterexample(2, eps)
        recovered = schmidt_decompose(state.state, ADDITIVITY_SPLIT)
        blocks = degenerate_blocks(recovered.coefficients)
        assert recovered.rank == 4 and all(len(b) == 1 for b in blocks), (
            f"eps={eps}: coefficients not distinct: {recovered.coefficients}"
        )
        rep = bn_gap(state, designated, source="deformed")
        assert rep.gap < 0.0, f"eps={eps}: gap={rep.gap}"
        naive = von_neumann_entropy(partial_trace_naive(state.state, (1, 3)))
        assert abs(rep.lhs - naive) <= 1e-10, f"eps={eps}: lhs oracle gap"
        lhs_by_eps[eps] = rep.lhs
        if eps == 0.05:
            rhs_floor_ok = rep.rhs > TWO_LN_TWO - 0.05
            assert rhs_floor_ok, f"rhs={rep.rhs}"
    ordered = lhs_by_eps[0.05] < lhs_by_eps[0.1] < lhs_by_eps[0.2]
    report(
        3,
        ordered,
        "eps in {0.2, 0.1, 0.05} at d=2: unique spectra, negative gaps, "
        f"lhs ordered ({lhs_by_eps[0.05]:.4f} < {lhs_by_eps[0.1]:.4f} < "
        f"{lhs_by_eps[0.2]:.4f}), rhs(0.05) > 2 ln 2 - 0.05, naive-oracle match",
    )


def test_criterion_4_schmidt_roundtrip_on_random_states():
    worst_residual = 0.0
    worst_coeff = 0.0
    cases = [(FactorShape((2, 2, 2, 2)), 100), (FactorShape((3, 2, 3, 2)), 50)]
    for shape, count in cases:
        for k in range(count):
            psi = haar_state(shape, 3000 + 1000 * shape.dims[0] + k)
            dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
            worst_residual = max(worst_residual, verify_decomposition(psi, dec))
            spectrum, _ = hermitian_eigen(partial_trace(psi, (1, 2)).entries)
            padded = np.zeros(spectrum.values.size)
            padded[: dec.rank] = dec.coefficients
            worst_coeff = max(worst_coeff, float(np.max(np.abs(padded - spectrum.values))))
    report(
        4,
        worst_residual <= 1e-9 and worst_coeff <= 1e-10,
        f"150 random states reconstruct (worst residual {worst_residual:.2e} "
        f"<= 1e-9) with coefficients matching marginal spectra "
        f"(worst {worst_coeff:.2e} <= 1e-10)",
    )


def test_criterion_5_entropy_property_suite():
    rng = np.random.default_rng(424242)
    # pure states
    for d in (2, 3, 4):
        e = np.zeros(d)
        e[0] = 1.0
        rho = DensityMatrix(np.diag(e).astype(complex), FactorShape((d,)))
        assert von_neumann_entropy(rho) <= 1e-12
    # maximally mixed
    for d in (2, 3, 4, 5, 6):
        rho = DensityMatrix(np.eye(d) / d, FactorShape((d,)))
        assert abs(von_neumann_entropy(rho) - np.log(d)) <= 1e-12
    # unitary invariance, additivity, range
    for _ in range(20):
        psi = haar_state(FactorShape((3, 3)), int(rng.integers(2**32)))
        rho = partial_trace(psi, (1,))
        s = von_neumann_entropy(rho)
        assert -1e-10 <= s <= np.log(3) + 1e-10
        z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        rotated = DensityMatrix(q @ rho.entries @ q.conj().T, rho.origin_shape)
        assert abs(von_neumann_entropy(rotated) - s) <= 1e-10
        chi = haar_state(FactorShape((2, 2)), int(rng.integers(2**32)))
        sigma = partial_trace(chi, (1,))
        product = DensityMatrix(
            np.kron(rho.entries, sigma.entries), FactorShape((3, 2))
        )
        additivity_gap = abs(
            von_neumann_entropy(product) - s - von_neumann_entropy(sigma)
        )
        assert additivity_gap <= 1e-9
    report(
        5,
        True,
        "entropy: 0 on pure states, ln d on maximally mixed, unitary "
        "invariant (1e-10), additive on products (1e-9), in range over 20 "
        "random density matrices",
    )


def test_criterion_6_partial_trace_routes_agree():
    shapes = [(2, 2, 2, 2), (3, 2, 3, 2), (2, 3, 2), (4, 2, 3), (2, 2)]
    rng = np.random.default_rng(777)
    worst = 0.0
    for k in range(50):
        shape = FactorShape(shapes[k % len(shapes)])
        psi = haar_state(shape, 60000 + k)
        n_keep = int(rng.integers(1, shape.n_factors + 1))
        keep = tuple(sorted(rng.choice(shape.n_factors, size=n_keep, replace=False) + 1))
        fast = partial_trace(psi, keep)
        slow = partial_trace_naive(psi, keep)
        worst = max(worst, float(np.max(np.abs(fast.entries - slow.entries))))
    report(
        6,
        worst <= 1e-12,
        f"reshape-based and summation-based partial traces agree on 50 "
        f"random states (worst entry difference {worst:.2e} <= 1e-12)",
    )


def test_criterion_7_optimizer_recovers_the_entangled_rhs():
    t0 = time.perf_counter()
    s = canonical_counterexample(2)
    dec, rep = maximize_rhs(s)  # default budgets
    attained = rep.rhs >= TWO_LN_TWO - 0.01
    assert attained, f"best rhs {rep.rhs}"
    assert verify_decomposition(s.state, dec) <= 1e-9
    state, _ = deformed_counterexample(2, 0.1)
    initial = bn_rhs(schmidt_decompose(state.state, ADDITIVITY_SPLIT))
    _, noop = maximize_rhs(state)
    assert abs(noop.rhs - initial) <= 1e-10, "non-degenerate input moved"
    elapsed = time.perf_counter() - t0
    report(
        7,
        elapsed < 60.0,
        f"default budget reaches rhs {rep.rhs:.12f} >= 2 ln 2 - 0.01 on the "
        f"canonical state and leaves a non-degenerate state unchanged "
        f"({elapsed:.2f}s < 60s)",
    )


def test_criterion_8_scan_is_fast_and_reproducible():
    shape = FactorShape((2, 2, 2, 2))
    t0 = time.perf_counter()
    first = scan(1000, shape, 20260823)
    elapsed = time.perf_counter() - t0
    second = scan(1000, shape, 20260823)
    worst = max(
        abs(a.gap - b.gap) for a, b in zip(first.per_sample, second.per_sample)
    )
    gaps = [r.gap for r in first.per_sample if r.error is None]
    count_ok = first.violation_count == sum(g < -1e-9 for g in gaps)
    assert worst <= 1e-12, f"reruns differ by {worst}"
    assert count_ok
    report(
        8,
        elapsed < 60.0,
        f"1000-sample scan in {elapsed:.2f}s < 60s, bit-reproducible "
        f"(max rerun difference {worst:.1e}), violation_count = "
        f"{first.violation_count} reported alongside min/max/mean gap",
    )


def test_criterion_9_cli_contract(tmp_path, capsys):
    good = tmp_path / "canonical.json"
    save_state(canonical_counterexample(2).state, good)
    code_good = main(["check", "--input", str(good)])
    capsys.readouterr()

    bad = tmp_path / "bad_norm.json"
    doc = state_to_document(canonical_counterexample(2).state)
    doc["amplitudes"][0] = [0.75, 0.0]
    bad.write_text(json.dumps(doc))
    code_bad = main(["check", "--input", str(bad)])
    capsys.readouterr()

    argv = ["counterexample", "--dim", "2"]
    assert main(argv) == 0
    json_doc = json.loads(capsys.readouterr().out)
    assert main(argv + ["--format", "csv"]) == 0
    csv_rows = {}
    for line in capsys.readouterr().out.strip().split("\n")[1:]:
        key, value = line.split(",", 1)
        csv_rows[key] = value
    numeric_fields = [
        "lhs",
        "rhs_product",
        "rhs_entangled",
        "gap_entangled",
        "theoretical_entangled_rhs",
        "residual_product",
        "residual_entangled",
    ]
    agree = all(float(csv_rows[f]) == json_doc[f] for f in numeric_fields)
    report(
        9,
        code_good == 0 and code_bad == 2 and agree,
        f"exit codes: well-formed run {code_good} (want 0), malformed file "
        f"{code_bad} (want 2); JSON and CSV numeric payloads identical at "
        f"17 significant digits",
    )
