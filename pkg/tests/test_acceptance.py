"""Acceptance criteria 1-14, one test each.

Every test prints a single ``criterion N: PASS|FAIL - ...`` line; the lines
are repeated in the pytest terminal summary.
"""

import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from wiretap_ot.adversaries import AttackSpec
from wiretap_ot.analysis import capacities, rate_region
from wiretap_ot.analysis.montecarlo import iter_outcomes
from wiretap_ot.analysis.oracle import exact_leakage_oracle, tiny_params
from wiretap_ot.analysis.residual import key_selections, residual_min_entropy, residual_report
from wiretap_ot.hashing import exact_hash_entropy, pa_battery, pa_bound, pa_leakage, renyi2
from wiretap_ot.interactive_hashing import full_rank_matrices, property_report
from wiretap_ot.protocols import derive_params
from wiretap_ot.protocols.params import variant_capacity

TOL = 1e-12


def test_criterion_01_capacity_formulas(criterion):
    t = time.perf_counter()
    checks = [
        abs(capacities(0.5, 0.5).c2p - 0.25) <= TOL,
        abs(capacities(0.2, 0.6).c1p - 0.2) <= TOL,
        abs(capacities(0.4, 0.6).c1p - 0.3) <= TOL,
        abs(capacities(0.7, 0.6).c1p - 0.18) <= TOL,
    ]
    grid = [i / 100 for i in range(1, 100)]
    reduction = max(abs(capacities(e1, 1.0).c2p - min(e1, 1 - e1)) for e1 in grid)
    elapsed = time.perf_counter() - t
    ok = all(checks) and reduction <= TOL and elapsed < 1
    criterion(1, ok, f"worked values {sum(checks)}/4, eps2=1 reduction max err {reduction:.1e} over 99 points, "
                     f"{elapsed:.3f}s")


def test_criterion_02_one_of_n_consistency(criterion):
    t = time.perf_counter()
    grid = [i / 20 for i in range(21)]
    worst_n2 = 0.0
    monotone = True
    for e1 in grid:
        for e2 in grid:
            base = capacities(e1, e2)
            two = capacities(e1, e2, 2)
            worst_n2 = max(worst_n2, abs(two.c2p_N - base.c2p), abs(two.c1p_N - base.c1p))
            prev = two
            for N in range(3, 11):
                cur = capacities(e1, e2, N)
                monotone &= cur.c2p_N <= prev.c2p_N + TOL and cur.c1p_N <= prev.c1p_N + TOL
                prev = cur
    elapsed = time.perf_counter() - t
    ok = worst_n2 <= TOL and monotone and elapsed < 1
    criterion(2, ok, f"N=2 max err {worst_n2:.1e}, nonincreasing in N=2..10: {monotone}, 21x21 grid, {elapsed:.3f}s")


def test_criterion_03_rate_region(criterion):
    t = time.perf_counter()
    grid = [i / 20 for i in range(1, 20)]
    contained = all(rate_region(e1, e2).outer.contains(x, y)
                    for e1 in grid for e2 in grid for x, y in rate_region(e1, e2).inner.vertices)
    bp = rate_region(0.4, 0.7).breakpoints()
    got = (bp["rc_max"], bp["rb_at_rc_max"], bp["sum"])
    points_ok = all(abs(g - w) <= TOL for g, w in zip(got, (0.12, 0.16, 0.28)))
    elapsed = time.perf_counter() - t
    ok = contained and points_ok and elapsed < 1
    criterion(3, ok, f"inner within outer on 19x19: {contained}, breakpoints "
                     f"{'/'.join(f'{v:.12g}' for v in got)}, {elapsed:.3f}s")


def test_criterion_04_degraded_tightness(criterion):
    t = time.perf_counter()
    grid = [Fraction(i, 40) for i in range(41)]
    tight = checked = 0
    for e1 in grid:
        for e2 in grid:
            if e1 <= e2 * (1 - e1) / 3:
                cap = capacities(e1, e2)
                checked += 1
                tight += cap.degraded_lower == cap.degraded_upper
    value = capacities(0.1, 0.6).degraded_lower
    elapsed = time.perf_counter() - t
    ok = checked > 0 and tight == checked and abs(value - 0.1) <= TOL and elapsed < 1
    criterion(4, ok, f"lower == upper exactly at {tight}/{checked} rational grid points in the tight regime, "
                     f"value at (0.1,0.6) = {value:.12g}, {elapsed:.3f}s")


def test_criterion_05_interactive_hashing(criterion):
    t = time.perf_counter()
    results = property_report(k_max=3, p5_ks=(8, 10, 12), densities=(2 ** -3, 2 ** -5), trials=10_000, seed=0)
    elapsed = time.perf_counter() - t
    # Full-rank 2 x 3 matrices: (2^3 - 1)(2^3 - 2) = 42; the exhaustive check covers every one.
    matrices = sum(1 for _ in full_rank_matrices(3))
    failed = [r.name for r in results if not r.passed]
    p5 = [r for r in results if r.name.startswith("P5")]
    ok = not failed and matrices == 42 and len(p5) == 6 and elapsed < 30
    criterion(5, ok, f"{len(results) - len(failed)}/{len(results)} property checks pass, P3 over all {matrices} "
                     f"full-rank 2x3 matrices x 8 inputs, 6 P5 cells at 10^4 trials, {elapsed:.1f}s")


def test_criterion_06_privacy_amplification(criterion):
    t = time.perf_counter()
    cases = 0
    worst = math.inf
    violations = []
    for in_len in range(1, 7):
        for name, d in pa_battery(in_len, np.random.default_rng(in_len)):
            c = renyi2(d)
            for out_len in range(in_len + 1):
                gap = exact_hash_entropy(d, out_len) - pa_bound(out_len, c)
                cases += 1
                worst = min(worst, gap)
                if gap < -1e-12:
                    violations.append((in_len, name, out_len))
    elapsed = time.perf_counter() - t
    ok = not violations and elapsed < 60
    criterion(6, ok, f"{cases} (distribution, out_len) cases, in_len 1..6, min slack {worst:.3e}, "
                     f"{len(violations)} violations, {elapsed:.1f}s")


def test_criterion_07_protocol1_honest(criterion):
    t = time.perf_counter()
    params = derive_params("c2p", 0.8 * capacities(0.5, 0.5).c2p, 0.5, 0.5, 20_000)
    aborts = failures = enough = 0
    bounds = []
    for _, out in iter_outcomes(params, trials=200, master_seed=7):
        if out.aborted:
            aborts += 1
            continue
        failures += not out.correct()
        u = out.inputs.choice
        other = out.transcript.get(f"L{1 - u}")
        residual = residual_min_entropy(out, {"bob", "eve"}, other)
        enough += residual >= params.key_len
        bounds.append(pa_leakage(params.key_len, residual))
    completed = 200 - aborts
    elapsed = time.perf_counter() - t
    ok = failures == 0 and aborts <= 2 and enough >= 0.99 * 200 and elapsed < 120
    criterion(7, ok, f"n={params.n}, key {params.key_len} bits, {failures} failures in {completed} runs, "
                     f"abort {aborts}/200, residual >= key in {enough}/200, max leakage bound "
                     f"{max(bounds):.2e}, {elapsed:.1f}s")


def test_criterion_08_protocol1_oracle(criterion):
    t = time.perf_counter()
    rep = exact_leakage_oracle("c2p", tiny_params("c2p"), family="surjective")
    elapsed = time.perf_counter() - t
    ok = (rep.restricted and abs(rep.i_u_aliceeve) <= 1e-9 and rep.p_err == 0
          and rep.i_kbar_bobeve <= rep.bounds["i_kbar_bobeve"] and rep.i_all_eve <= rep.bounds["i_all_eve"]
          and elapsed < 300)
    criterion(8, ok, f"n=6 {rep.family_label}: I(U;VA,VE)={rep.i_u_aliceeve:.1e}, P_err={rep.p_err}, "
                     f"I(Kbar;VB,VE)={rep.i_kbar_bobeve:.4f} <= {rep.bounds['i_kbar_bobeve']:.4f}, "
                     f"I(K0,K1,U;VE)={rep.i_all_eve:.4f} <= {rep.bounds['i_all_eve']:.4f}, {elapsed:.1f}s")


def test_criterion_09_protocol2_structure(criterion):
    t = time.perf_counter()
    params = derive_params("c1p", 0.8 * variant_capacity("c1p", 0.5, 0.5), 0.5, 0.5, 20_000)
    completed = structural = correct = 0
    for _, out in iter_outcomes(params, trials=100, master_seed=9):
        if out.aborted:
            continue
        completed += 1
        correct += bool(out.correct())
        other = out.transcript.get(f"L{1 - out.inputs.choice}")
        structural += residual_min_entropy(out, {"bob"}, other) >= params.nr
    elapsed = time.perf_counter() - t
    ok = completed > 0 and structural == completed and correct == completed and elapsed < 60
    criterion(9, ok, f"n={params.n}, nr={params.nr}: unchosen set holds >= nr erasures in {structural}/{completed}, "
                     f"correct {correct}/{completed}, {elapsed:.1f}s")


def test_criterion_10_protocol3_swap_detection(criterion):
    t = time.perf_counter()
    params = derive_params("mal_le_half", 0.06, 0.4, 0.5, 3000)
    s = math.ceil(0.1 * params.n)
    detected = sum(out.aborted for _, out in iter_outcomes(params, AttackSpec("bob_swap", s), 200, 10))
    honest = sum(out.aborted for _, out in iter_outcomes(params, AttackSpec(), 200, 11))
    elapsed = time.perf_counter() - t
    ok = detected >= 0.95 * 200 and honest <= 0.02 * 200 and elapsed < 120
    criterion(10, ok, f"swap s={s}: detected {detected}/200, honest aborts {honest}/200, {elapsed:.1f}s")


def test_criterion_11_protocol4(criterion):
    t = time.perf_counter()
    params = derive_params("mal_gt_half", 0.021, 0.7, 0.5, 2000, tune_n=True)
    honest = sum(out.aborted for _, out in iter_outcomes(params, AttackSpec(), 200, 12))
    target = params.beta_n * (params.eps1 * params.eps2 - 2 * params.delta)
    limit = 2 ** (-(params.delta + params.delta_prime) * params.beta_n) / math.log(2)
    completed = protected = 0
    for _, out in iter_outcomes(params, AttackSpec("bob_pack"), 200, 13):
        if out.aborted:
            continue
        completed += 1
        rep = residual_report(out)
        best = max(rep["residuals"])
        protected += best >= target and pa_leakage(params.key_len, best) <= limit
    elapsed = time.perf_counter() - t
    ok = honest <= 0.1 * 200 and completed > 0 and protected >= 0.95 * completed and elapsed < 180
    criterion(11, ok, f"n={params.n}: honest aborts {honest}/200; under packing {protected}/{completed} runs keep a "
                      f"stripped set with >= {target:.1f} Psi-erasures and leakage <= {limit:.2e}, {elapsed:.1f}s")


def test_criterion_12_protocol5(criterion):
    t = time.perf_counter()
    params = derive_params("independent_pair", 0.12, 0.7, 0.5, 2000)
    completed = both = 0
    for _, out in iter_outcomes(params, trials=100, master_seed=14):
        if out.aborted:
            continue
        completed += 1
        both += bool(out.correct())
    rb, rc = params.key_len / params.n, params.cathy_key_len / params.n
    inside = rate_region(0.7, 0.5).inner.contains(rb, rc)
    elapsed = time.perf_counter() - t
    ok = completed > 0 and both == completed and inside and elapsed < 60
    criterion(12, ok, f"both strings recovered in {both}/{completed}, (r_B, r_C) = ({rb:.4f}, {rc:.4f}) "
                      f"inside inner region: {inside}, {elapsed:.1f}s")


def test_criterion_13_protocol6(criterion):
    t = time.perf_counter()
    params = derive_params("degraded", 0.08, 0.1, 0.6, 30_000)
    completed = correct = exact = 0
    for _, out in iter_outcomes(params, trials=100, master_seed=15):
        if out.aborted:
            continue
        completed += 1
        correct += bool(out.correct())
        mine, bobs = out.views["alice"].state["L"], out.views["bob"].state["L"]
        exact += all(np.array_equal(a, b) for a, b in zip(mine, bobs))
    rep = exact_leakage_oracle("degraded", tiny_params("degraded"))
    elapsed = time.perf_counter() - t
    ok = (completed > 0 and correct == completed and exact == completed and abs(rep.i_u_alice) <= 1e-9
          and rep.i_u_eve <= rep.bounds["i_u_eve"] and elapsed < 180)
    criterion(13, ok, f"n={params.n}: correct {correct}/{completed}, reconstruction exact {exact}/{completed}; "
                      f"n=8 oracle I(U;VA)={rep.i_u_alice:.1e}, I(U;VE)={rep.i_u_eve:.4f} "
                      f"<= bound {rep.bounds['i_u_eve']:.4f}, {elapsed:.1f}s")


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "wiretap_ot", *args], capture_output=True, text=True)


def test_criterion_14_determinism(criterion, tmp_path):
    t = time.perf_counter()
    runs = {
        "simulate.csv": ["simulate", "--variant", "c2p", "--eps1", "0.5", "--eps2", "0.5", "--rate-fraction", "0.8",
                         "--n", "20000", "--trials", "200", "--seed", "7"],
        "attack.json": ["simulate", "--variant", "mal_le_half", "--eps1", "0.4", "--eps2", "0.5", "--r", "0.06",
                        "--n", "3000", "--trials", "20", "--seed", "10", "--attack", "bob_swap",
                        "--attack-strength", "300", "--format", "json"],
        "oracle.json": ["oracle", "--variant", "c2p", "--family", "surjective"],
        "capacity.csv": ["capacity", "--grid", "0.05"],
    }
    identical = []
    for name, args in runs.items():
        blobs = []
        for rep in range(2):
            path = tmp_path / f"{rep}-{name}"
            extra = ["--output", str(path)]
            if name == "simulate.csv":
                extra += ["--raw-output", str(tmp_path / f"{rep}-raw.csv")]
            proc = run_cli(*args, *extra)
            assert proc.returncode == 0, proc.stderr
            blobs.append(path.read_bytes())
        identical.append(blobs[0] == blobs[1])
    raw_same = (tmp_path / "0-raw.csv").read_bytes() == (tmp_path / "1-raw.csv").read_bytes()
    elapsed = time.perf_counter() - t
    ok = all(identical) and raw_same
    criterion(14, ok, f"{sum(identical) + raw_same}/{len(runs) + 1} output files byte-identical across reruns "
                      f"with the same master seed, {elapsed:.1f}s")
