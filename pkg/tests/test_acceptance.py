"""Acceptance criteria, each at its stated tolerance and runtime limit.

Every test records a single ``criterion N: PASS|FAIL ...`` line; the lines
are printed together at the end of the pytest run (see ``conftest.py``) and
also when this file is run directly with ``python tests/test_acceptance.py``.
"""

import math
import time
import warnings

import numpy as np
import pytest

from subfreq import (
    ColumnQuery,
    Dataset,
    build_net,
    build_sample,
    build_sketchnet,
    emit_figure_data,
    estimate_frequency,
    frequency_vector,
    gen_f0,
    gen_hh,
    moment,
    net_size_bound_exact,
    query,
    rounding_distortion,
    sample_size,
)
from subfreq.hardgen import fp_case1_bound, gen_fp, gen_lpsample
from subfreq.netsketch import SketchSpec, net_size
from subfreq.oracle import lp_norm, lp_sample_many

REPORT = []


def _report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    REPORT.append(line)
    print(line)


WORKED = Dataset(np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 1, 0]]), 2)


def test_worked_example():
    c = ColumnQuery.of([0, 1])
    frequency_vector(WORKED, c)
    elapsed = math.inf
    for _ in range(5):
        start = time.perf_counter()
        f = frequency_vector(WORKED, c)
        f0, f1 = moment(f, 0), moment(f, 1)
        elapsed = min(elapsed, time.perf_counter() - start)
    dense = f.dense().tolist()
    ok = dense == [1, 1, 0, 3] and f0 == 3 and f1 == 5 and elapsed < 1e-3
    _report(1, ok, f"f={dense} F0={f0} F1={f1} time={elapsed * 1e3:.3f}ms")
    assert ok


def test_net_size_bound():
    start = time.perf_counter()
    worst = None
    violations = 0
    for d in range(4, 21):
        for step in range(1, 10):
            alpha = step / 20
            size = len(build_net(d, alpha).members)
            assert size == net_size(d, alpha)
            # compare 2**(H d + 1) >= size exactly: H(1/2 - alpha) d + 1 >= log2(size)
            if not net_size_bound_exact(d, alpha, size):
                violations += 1
            slack = math.log2(2.0 ** (_h(0.5 - alpha) * d + 1) / size)
            worst = slack if worst is None else min(worst, slack)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 10
    _report(2, ok, f"violations={violations} min_log2_slack={worst:.3f} time={elapsed:.2f}s")
    assert ok


def _h(x):
    return 0.0 if x in (0, 1) else -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def test_rounding_distortion():
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    violations = 0
    literal_violations = 0
    checked = 0
    for _ in range(200):
        d = int(rng.integers(4, 11))
        n = int(rng.integers(1, 301))
        a = Dataset(rng.integers(0, 2, size=(n, d)), 2)
        queries = [ColumnQuery(tuple(j for j in range(d) if mask >> j & 1))
                   for mask in range(2**d)]
        truth = {c: frequency_vector(a, c) for c in queries}
        for alpha in (0.1, 0.25):
            net = build_net(d, alpha)
            for p in (0.0, 0.5, 2.0):
                snet = build_sketchnet(a, net, SketchSpec("exact"), p, rng)
                r = rounding_distortion(p, alpha, d)
                literal = 2.0 ** (alpha * d)
                for c in queries:
                    est, _ = query(snet, c)
                    z = moment(truth[c], p)
                    ratio = est / z
                    checked += 1
                    if not 1 / r * (1 - 1e-12) <= ratio <= r * (1 + 1e-12):
                        violations += 1
                    if not 1 / literal * (1 - 1e-12) <= ratio <= literal * (1 + 1e-12):
                        literal_violations += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 120
    _report(3, ok, f"checked={checked} violations={violations} "
                   f"(against literal 2^(alpha d): {literal_violations}) time={elapsed:.1f}s")
    assert ok


def test_sampling_guarantee():
    eps, delta = 0.1, 0.05
    t = sample_size(eps, delta)
    assert t == 369
    rng = np.random.default_rng(7)
    n, d = 1000, 8
    head = (rng.random(n) < 0.5)[:, None]
    rows = np.where(head, 0, rng.integers(0, 2, size=(n, d)))
    rows[:, 3:] = rng.integers(0, 2, size=(n, d - 3))
    a = Dataset(rows, 2)
    c = ColumnQuery.of([0, 1, 2])
    f = frequency_vector(a, c)
    b_id = max(f.counts, key=f.counts.get)
    b = [0, 0, 0]
    true = f.counts[b_id]
    norm_half = lp_norm(f, 0.5)
    start = time.perf_counter()
    bad_n = bad_p = 0
    for seed in range(1000):
        s = build_sample(a, t, np.random.default_rng(seed))
        err = abs(estimate_frequency(s, c, b) - true)
        bad_n += err > eps * n
        bad_p += err > eps * norm_half
    elapsed = time.perf_counter() - start
    rate_n, rate_p = bad_n / 1000, bad_p / 1000
    ok = b_id == 0 and rate_n <= 0.07 and rate_p <= 0.07 and elapsed < 30
    _report(4, ok, f"t={t} f={true} fail_rate(eps n)={rate_n:.3f} "
                   f"fail_rate(eps |f|_0.5)={rate_p:.3f} time={elapsed:.1f}s")
    assert ok


def test_f0_separation():
    d, k, q = 8, 3, 4
    t_size = math.comb(d, k) // 2
    start = time.perf_counter()
    lows, highs = [], []
    for seed in range(50):
        inst_in = gen_f0(d, k, q, t_size, True, np.random.default_rng(seed))
        inst_out = gen_f0(d, k, q, t_size, False, np.random.default_rng(seed))
        highs.append(inst_in.statistic())
        lows.append(inst_out.statistic())
    elapsed = time.perf_counter() - start
    ok = min(highs) >= q**k and max(lows) <= k * q ** (k - 1) and elapsed < 30
    _report(5, ok, f"min_in_F0={min(highs):g} (need >= {q**k}) "
                   f"max_out_F0={max(lows):g} (need <= {k * q**(k - 1)}) "
                   f"predicted_factor=q/k={q / k:.4g} time={elapsed:.2f}s")
    assert ok


def test_hh_instance_counts():
    d, eps, gamma, t_size = 16, 0.25, 0.125, 8
    start = time.perf_counter()
    ok = True
    statuses = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for seed in range(20):
            for case_in in (True, False):
                inst = gen_hh(d, eps, gamma, t_size, case_in, np.random.default_rng(seed))
                value = inst.statistic()
                ok &= inst.params["ones_count"] == 16
                ok &= value >= 16 if case_in else value <= 64
                statuses.append((case_in, inst.params["hh_status"]))
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < 10
    hh_in = sum(s for c, s in statuses if c)
    hh_out = sum(s for c, s in statuses if not c)
    _report(6, ok, f"counts hold on 20 seeds per case; reported heavy-hitter status "
                   f"in={hh_in}/20 out={hh_out}/20 time={elapsed:.2f}s")
    assert ok


def test_fp_and_lp_sampling_separation():
    d, eps, gamma, t_size, p = 16, 0.25, 0.05, 8, 0.5
    start = time.perf_counter()
    fp_in = []
    out_mass = []
    rates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for seed in range(10):
            fp_in.append(gen_fp(d, eps, gamma, t_size, True, p, np.random.default_rng(seed)).statistic())
            inst_out = gen_lpsample(d, eps, gamma, t_size, False, p, np.random.default_rng(seed))
            out_mass.append(inst_out.statistic())
            inst_in = gen_lpsample(d, eps, gamma, t_size, True, p, np.random.default_rng(seed))
            f = frequency_vector(inst_in.dataset, inst_in.query)
            draws = lp_sample_many(f, p, 10_000, np.random.default_rng(1000 + seed))
            rates.append(float(np.isin(draws, inst_in.witness).mean()))
    elapsed = time.perf_counter() - start
    ok = (min(fp_in) >= 2 ** (eps * d) and max(out_mass) == 0.0
          and min(rates) >= 0.20 and elapsed < 30)
    _report(7, ok, f"min_in_Fp={min(fp_in):.4g} (need >= {2 ** (eps * d):g}) "
                   f"max_out_mass={max(out_mass)} min_hit_rate={min(rates):.4f} "
                   f"time={elapsed:.2f}s")
    assert ok


def test_figure_reproduction():
    start = time.perf_counter()
    rows = emit_figure_data(20)
    elapsed = time.perf_counter() - start

    def nearest(target):
        return min(rows, key=lambda r: abs(math.log2(r[1]) - target))

    r2, r8 = nearest(-2), nearest(-8)
    quarter = [r for r in rows if abs(r[0] - 0.25) < 1e-12]
    ok = (math.floor(math.log10(r2[2])) == 1 and math.floor(math.log10(r8[2])) == 2
          and len(quarter) == 1 and abs(quarter[0][1] - 0.0731) <= 5e-4
          and quarter[0][2] == 32 and elapsed < 1)
    _report(8, ok, f"near 2^-2: alpha={r2[0]:g} factor={r2[2]:.3g}; "
                   f"near 2^-8: alpha={r8[0]:g} factor={r8[2]:.3g}; "
                   f"alpha=0.25: ({quarter[0][1]:.4f}, {quarter[0][2]:g}) time={elapsed * 1e3:.2f}ms")
    assert ok


def test_overlap_parameter_arithmetic():
    # c = 0.9 eps (1/p - 1) must keep the absent-word bound at most 2**((1 - a) eps d), a >= 0.01
    start = time.perf_counter()
    worst = (-math.inf, None)
    failures = 0
    cases = 0
    for p in (0.25, 0.5, 0.75):
        for eps in (0.1, 0.25):
            c = 0.9 * eps * (1 / p - 1)
            for d in (32, 64, 128):
                cases += 1
                value = fp_case1_bound(d, eps, c, p)
                limit = 2.0 ** ((1 - 0.01) * eps * d)
                if value > limit * (1 + 1e-9):
                    failures += 1
                exponent_ratio = math.log2(value) / (eps * d)
                if exponent_ratio > worst[0]:
                    worst = (exponent_ratio, (p, eps, d))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 1
    _report(9, ok, f"{failures}/{cases} grid points exceed 2^(0.99 eps d); "
                   f"largest log2(bound)/(eps d)={worst[0]:.3f} at p,eps,d={worst[1]} "
                   f"time={elapsed * 1e3:.2f}ms")
    assert ok


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
