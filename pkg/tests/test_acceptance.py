"""The eight headline acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import hashlib
import math
import time
import warnings

import numpy as np
import pytest

from diagsynth import cluster as C, diagonal as D, mlpipe as ml
from diagsynth._runtime import rng_for
from diagsynth.circuit import diag_phases, gate_counts, wrap
from diagsynth.sequences import SequenceKind

from conftest import ACCEPTANCE_LINES

KINDS = list(SequenceKind)


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_gate_counts():
    expected = {2: 5, 3: 13, 4: 29, 5: 61, 6: 125, 7: 253, 8: 509, 9: 1021}
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    got = {}
    for n in expected:
        circ, _ = D.decompose(D.DiagonalUnitary.from_phases(rng.uniform(-math.pi, math.pi, 1 << n)))
        got[n] = len(circ.gates)
        assert sum(gate_counts(circ).values()) == got[n]
    elapsed = time.perf_counter() - t0
    record(1, "gate totals n=2..9", got == expected and elapsed < 1.0,
           f"totals {list(got.values())}, {elapsed:.3f} s")


def _aligned_error(got, target):
    d = wrap(got - target)
    shift = np.angle(np.mean(np.exp(1j * d)))
    return float(np.max(np.abs(wrap(d - shift))))


def test_2_round_trip():
    worst, n10_time = 0.0, None
    for n in range(2, 11):
        t0 = time.perf_counter()
        lam = rng_for(2024, n).uniform(-math.pi, math.pi, size=(1000, 1 << n))
        angles, gphase, _ = D.decompose_angles(lam)
        for a, g, target in zip(angles, gphase, lam):
            got = diag_phases(D.build_ansatz(n, a, global_phase=float(g))).phases
            worst = max(worst, _aligned_error(got, target))
        if n == 10:
            n10_time = time.perf_counter() - t0
    record(2, "round trip 1000 diagonals per n=2..10", worst < 1e-9 and n10_time < 30.0,
           f"max error {worst:.2e}, n=10 batch {n10_time:.1f} s")


def _rn_checks(n_max):
    ortho = all(
        np.array_equal((e := D.rn_matrix(n).entries) @ e.T, (1 << (n - 1)) * np.eye(1 << (n - 1), dtype=np.int64))
        for n in range(2, 11))
    dets = D.det_relation_check(8)
    det_ok = all(r.rel_error <= 1e-9 for r in dets)
    perm_ok = all(D.find_permutation(D.rn_matrix(n).entries, D.tensor_power_r2(n - 1)) is not None
                  for n in range(2, n_max + 1))
    return ortho, det_ok, perm_ok, max(r.rel_error for r in dets)


def test_3_rn_algebra():
    ortho, det_ok, perm_ok, det_err = _rn_checks(8)
    record(3, "r_n orthogonality n<=10, determinant and permutation n<=8", ortho and det_ok and perm_ok,
           f"orthogonal {ortho}, det rel error {det_err:.1e}, permutation {perm_ok}")


@pytest.mark.slow
def test_3_rn_permutation_to_ten():
    ok = all(D.find_permutation(D.rn_matrix(n).entries, D.tensor_power_r2(n - 1)) is not None
             for n in (9, 10))
    record(3, "r_n permutation equivalence extended to n=10", ok, f"n=9,10 {ok}")


def test_4_phase_map_structure():
    failures, worst = [], 0.0
    for kind in KINDS:
        for n in range(1, 13):
            M = D.build_phase_map(n, kind).matrix
            dim = 1 << n
            if M.shape != (dim, dim - 1) or not np.all(np.abs(M) == 0.5) or np.any(M.sum(axis=0) != 0):
                failures.append((kind.value, n, "entries"))
                continue
            lam = rng_for(7, n, KINDS.index(kind)).uniform(-math.pi, math.pi, size=(100, dim))
            centered = lam - lam.mean(axis=1, keepdims=True)
            oracle, _, rank, _ = np.linalg.lstsq(M, centered.T, rcond=None)
            if rank != dim - 1:
                failures.append((kind.value, n, f"rank {rank}"))
            fast = np.stack([D.solve_angles(n, c, kind) for c in centered], axis=1)
            worst = max(worst, float(np.max(np.abs(fast - oracle))))
    ok = not failures and worst < 1e-9
    record(4, "phase map entries, column sums, rank; fast solve vs lstsq, n<=12 both kinds", ok,
           f"failures {failures}, max solve gap {worst:.1e}")


def test_5_ml_recovery():
    schedule = ml.StepSchedule(**ml.PRETTY_SCHEDULE)
    rows, ok = [], True
    for n in range(2, 6):
        ds = ml.gen_pretty(n, 2500, epsilon=0.025, seed=n)
        train, test = ds.split(0.2, seed=n)
        model, losses = ml.train(train, schedule, epochs=100000, seed=n, tol=1e-9)
        r2 = ml.metrics(model, test).r2
        rep = ml.snap_weights(model, 0.5, D.build_phase_map(n).matrix)
        good = r2 > 0.999 and losses[-1] < 1e-6 and rep.max_deviation < 1e-2 and rep.matches_reference
        ok &= good
        rows.append(f"n={n} R2={r2:.6f} loss={losses[-1]:.1e} dev={rep.max_deviation:.1e}")
    record(5, "linear model recovers the phase map from pretty data, n=2..5", ok, "; ".join(rows))


def test_6_zz_tail():
    reports = [D.weyl_tail_check(phi) for phi in np.linspace(-math.pi, math.pi, 50)]
    dev = max(r.max_deviation for r in reports)
    coeffs = all(abs(r.xx) < 1e-12 and abs(r.yy) < 1e-12 and abs(r.zz - r.g_z) < 1e-12 for r in reports)
    record(6, "two-qubit tail equals exp(-i phi/2 ZZ), coefficients (g_z, 0, 0)", dev < 1e-12 and coeffs,
           f"max deviation {dev:.1e}, coefficients {coeffs}")


def _hash(x, y):
    return hashlib.sha256(np.ascontiguousarray(x).tobytes() + np.ascontiguousarray(y).tobytes()).hexdigest()


def test_7_clustering_pipeline():
    purities, counts, pairing = [], [], True
    for seed in range(20):
        ds = ml.gen_raw(3, 200, seed=seed, mutation_prob=0.5, moves=("pi_shift",))
        c = C.hcluster(ds.X, math.pi / 2)
        counts.append(c.count)
        labels = np.array(ds.meta["templates"])
        agree = sum(max(np.sum(labels[c.members(k)] == t) for t in set(labels)) for k in range(c.count))
        purities.append(agree / len(ds))
        with warnings.catch_warnings():
            # equiprobable templates can tie for largest; either cluster is valid
            warnings.simplefilter("ignore", UserWarning)
            kept = C.filter_dominant(ds, c)
        before = {_hash(x, y) for x, y in zip(ds.X, ds.Y)}
        cols = kept.meta["kept_columns"]
        for i, x, y in zip(kept.meta["kept_rows"], kept.X, kept.Y):
            pairing &= _hash(ds.X[i], ds.Y[i]) in before
            pairing &= np.array_equal(ds.X[i][cols], x) and np.array_equal(ds.Y[i], y)
    ok = all(k == 2 for k in counts) and min(purities) >= 0.99 and pairing
    record(7, "two-template raw data, 20 seeds", ok,
           f"cluster counts {sorted(set(counts))}, min purity {min(purities):.3f}, pairing {pairing}")


def test_8_exponential_scaling():
    ns = np.arange(4, 13)
    rng = np.random.default_rng(8)
    totals = []
    for n in ns:
        circ, _ = D.decompose(D.DiagonalUnitary.from_phases(rng.uniform(-math.pi, math.pi, 1 << int(n))))
        totals.append(len(circ.gates))
    totals = np.array(totals, dtype=float)
    slope = np.polyfit(ns, np.log2(totals), 1)[0]
    record(8, "log2 slope of gate totals over n=4..12", abs(slope - 1.0) <= 0.02, f"slope {slope:.4f}")
