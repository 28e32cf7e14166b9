import math
from itertools import combinations

import numpy as np
import pytest

from subfreq import (
    CapacityError,
    ColumnQuery,
    Dataset,
    build_net,
    build_sketchnet,
    emit_figure_data,
    entropy,
    frequency_vector,
    moment,
    net_size_bound_exact,
    query,
    round_query,
    rounding_distortion,
    tradeoff_table,
)
from subfreq.netsketch import (
    SketchSpec,
    exact_member_moments,
    figure_alphas,
    max_shift,
    net_size,
    net_size_bound,
    net_thresholds,
)


def test_entropy():
    assert entropy(0.5) == 1
    assert entropy(0) == 0 and entropy(1) == 0
    assert entropy(0.25) == pytest.approx(0.811278, abs=1e-6)
    with pytest.raises(ValueError):
        entropy(1.5)


def test_net_sizes():
    assert net_size(8, 0.25) == 74
    assert len(build_net(8, 0.25)) == 74
    assert net_size(20, 0.25) == 43400
    assert 43400 <= net_size_bound(20, 0.25) == pytest.approx(1.5e5, rel=0.05)
    assert net_size_bound_exact(20, 0.25)


def test_tiny_alpha():
    # the middle size d/2 stays strictly inside the band for any alpha > 0
    assert net_size(10, 1e-6) == 2**10 - math.comb(10, 5)
    assert net_size(9, 1e-6) == 2**9


def test_net_order_and_membership():
    net = build_net(6, 0.2)
    assert (net.lo, net.hi) == net_thresholds(6, 0.2) == (1, 5)
    sizes = [len(m) for m in net.members]
    assert sizes == sorted(sizes)
    assert net.members[:3] == ((), (0,), (1,))
    assert all(net.is_member(len(m)) for m in net.members)
    assert ColumnQuery.of([0, 1, 2]) not in net


def test_net_capacity_and_domain():
    with pytest.raises(CapacityError):
        build_net(30, 0.01)
    with pytest.raises(ValueError):
        build_net(8, 0.5)


def test_round_query_examples():
    net = build_net(8, 0.25)
    assert round_query(net, ColumnQuery.of([0, 1])) == ColumnQuery.of([0, 1])
    assert round_query(net, ColumnQuery.of([0, 1, 2])) == ColumnQuery.of([0, 1])
    assert round_query(net, ColumnQuery.of(range(5))) == ColumnQuery.of(range(6))
    assert round_query(net, ColumnQuery.of([7, 6, 5, 4, 3])) == ColumnQuery.of([0, 3, 4, 5, 6, 7])


@pytest.mark.parametrize("d", range(2, 13))
@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.15, 0.25, 0.3, 0.45])
def test_round_query_shift_bound(d, alpha):
    net = build_net(d, alpha)
    for k in range(d + 1):
        for cols in combinations(range(d), k):
            c = ColumnQuery(cols)
            r = round_query(net, c)
            assert net.is_member(len(r))
            assert set(r.columns) <= set(cols) or set(cols) <= set(r.columns)
            assert len(set(r.columns) ^ set(cols)) <= net.shift <= math.ceil(alpha * d)


def test_shift_equals_alpha_d_when_integral():
    for d, alpha in [(8, 0.25), (20, 0.25), (10, 0.1), (20, 0.15)]:
        assert max_shift(d, alpha) == round(alpha * d)


def test_rounding_distortion_examples():
    assert rounding_distortion(0, 0.25, 20) == 32
    assert rounding_distortion(1, 0.25, 20) == 1
    assert rounding_distortion(2, 0.25, 20) == 32
    assert rounding_distortion(0.5, 0.25, 20) == pytest.approx(2**2.5)
    assert rounding_distortion(0, 0.25, 8, q=3) == 9


def test_tradeoff_and_figure():
    (a, rel, fac), = tradeoff_table(20, [0.25])
    assert round(rel, 4) == 0.0731 and fac == 32
    assert tradeoff_table(20, [1e-9])[0][1] == pytest.approx(1, rel=1e-6)
    rows = emit_figure_data(20, 49)
    assert len(rows) == 49 and any(r[0] == 0.25 for r in rows)
    assert all(0 < r[0] < 0.5 for r in rows)
    assert rows[-1][1] == pytest.approx(2.0 ** (entropy(0.5 - rows[-1][0]) * 20 - 20))
    near8 = min(rows, key=lambda r: abs(math.log2(r[1]) + 8))
    assert 3000 < near8[1] * 2**20 < 6000
    assert figure_alphas(3) == [0.125, 0.25, 0.375]
    with pytest.raises(ValueError):
        figure_alphas(1)


def test_worked_net(worked):
    net = build_net(3, 0.3)
    assert net.members == ((), (0, 1, 2))
    snet = build_sketchnet(worked, net, SketchSpec("exact"), 0, np.random.default_rng(0))
    est, cert = query(snet, ColumnQuery.of([0, 1, 2]))
    assert est == 4 and cert.distortion == 1 and cert.beta == 1


def test_exact_sketches_reproduce_oracle():
    rng = np.random.default_rng(4)
    a = Dataset(rng.integers(0, 3, size=(100, 6)), 3)
    net = build_net(6, 0.2)
    for p in (0, 0.5, 2):
        snet = build_sketchnet(a, net, SketchSpec("exact"), p, np.random.default_rng(1))
        truth = exact_member_moments(a, net, p)
        for cols in net.members:
            est, cert = query(snet, ColumnQuery(cols))
            assert est == pytest.approx(truth[cols]) and cert.factor == 1


@pytest.mark.parametrize("p", [0, 2])
def test_exhaustive_ratio_bound(p):
    rng = np.random.default_rng(8)
    a = Dataset(rng.integers(0, 2, size=(500, 8)), 2)
    snet = build_sketchnet(a, build_net(8, 0.25), SketchSpec("exact"), p, rng)
    for k in (3, 4, 5):
        for cols in combinations(range(8), k):
            c = ColumnQuery(cols)
            est, cert = query(snet, c)
            ratio = est / moment(frequency_vector(a, c), p)
            assert 0.25 <= ratio <= 4
            assert cert.distortion in (1, 4)


def test_f1_needs_no_sketches(worked):
    snet = build_sketchnet(worked, build_net(3, 0.3), SketchSpec("exact"), 1, np.random.default_rng(0))
    assert snet.sketches == {}
    assert query(snet, ColumnQuery.of([1]))[0] == 5


def test_bottomk_net_certificate():
    rng = np.random.default_rng(2)
    a = Dataset(rng.integers(0, 2, size=(400, 8)), 2)
    net = build_net(8, 0.25)
    spec = SketchSpec.for_net("bottomk", len(net), 0.5, 0.1)
    snet = build_sketchnet(a, net, spec, 0, rng)
    assert spec.beta == 1.5
    for cols in [(0, 1), (0, 1, 2), tuple(range(8))]:
        c = ColumnQuery(cols)
        est, cert = query(snet, c)
        truth = moment(frequency_vector(a, c), 0)
        assert truth / cert.factor <= est <= truth * cert.factor


def test_builds_are_reproducible():
    rng = np.random.default_rng(2)
    a = Dataset(rng.integers(0, 2, size=(200, 6)), 2)
    net = build_net(6, 0.2)
    spec = SketchSpec.for_net("signhash", len(net), 0.3, 0.1)
    e1 = [query(build_sketchnet(a, net, spec, 2, np.random.default_rng(5)), ColumnQuery.of([0]))[0]
          for _ in range(2)]
    assert e1[0] == e1[1]


def test_kind_mismatch_rejected(worked):
    net = build_net(3, 0.3)
    with pytest.raises(ValueError):
        build_sketchnet(worked, net, SketchSpec("bottomk", 0.2, 0.1), 2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_sketchnet(worked, net, SketchSpec("signhash", 0.2, 0.1), 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        SketchSpec("bottomk")


@pytest.mark.parametrize("seed", range(4))
def test_moment_shift_bounds(seed):
    rng = np.random.default_rng(100 + seed)
    d = int(rng.integers(4, 11))
    a = Dataset(rng.integers(0, 2, size=(int(rng.integers(1, 301)), d)), 2)
    for alpha in (0.1, 0.25):
        net = build_net(d, alpha)
        s = net.shift
        for mask in range(2**d):
            c = ColumnQuery(tuple(j for j in range(d) if mask >> j & 1))
            c2 = round_query(net, c)
            small, big = (c2, c) if len(c2) <= len(c) else (c, c2)
            gap = len(big) - len(small)
            f_small, f_big = frequency_vector(a, small), frequency_vector(a, big)
            # merging classes: F0 can only fall, by at most 2**gap
            assert moment(f_small, 0) <= moment(f_big, 0) <= 2**gap * moment(f_small, 0)
            for p in (1, 2, 3):
                hi, lo = moment(f_big, p), moment(f_small, p)
                assert hi / 2 ** (gap * (p - 1)) <= lo * (1 + 1e-12) and lo >= hi * (1 - 1e-12)
            assert gap <= s
