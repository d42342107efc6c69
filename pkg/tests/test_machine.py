from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hybridmem.machine import (GB, ClusterDesign, Design, MemoryTier, NetworkParams,
                               NodeSpec, PairingError, TierKind, default_hms_node,
                               default_ums_node, derive_paired_clusters,
                               effective_local_latency, fast_tier,
                               local_access_probability, slow_tier)


def node(fast_gb, slow_gb=0, slow_lat=1.6):
    tiers = [fast_tier(fast_gb * GB)]
    if slow_gb:
        tiers.append(slow_tier(slow_gb * GB, slow_lat))
    return NodeSpec(8, tuple(tiers))


def test_default_nodes():
    h, u = default_hms_node(), default_ums_node()
    assert (h.cores, h.total_capacity, h.fast_capacity) == (8, 64 * GB, 16 * GB)
    assert (u.cores, u.total_capacity) == (8, 16 * GB)
    assert h.fast_fraction == 0.25
    slow = [t for t in h.tiers if t.kind is TierKind.SLOW][0]
    assert slow.read_latency == slow.write_latency == 1.6


@pytest.mark.parametrize("hms_gb, ums_gb, n, ums_n, total_gb", [
    (64, 16, 32, 128, 2048),
    (64, 64, 8, 8, 512),
    (48, 16, 5, 15, 240),
])
def test_pairing(hms_gb, ums_gb, n, ums_n, total_gb):
    h = node(16, hms_gb - 16) if hms_gb > 16 else node(hms_gb)
    u = node(ums_gb)
    hms, ums = derive_paired_clusters(h, u, n)
    assert ums.node_count == ums_n
    assert hms.total_memory == ums.total_memory == total_gb * GB
    assert (hms.design, ums.design) == (Design.HMS, Design.UMS)


def test_pairing_rejects_remainder():
    with pytest.raises(PairingError, match="remainder"):
        derive_paired_clusters(node(16, 48), node(24), 4)


@given(st.integers(1, 64), st.integers(1, 16), st.integers(1, 256))
def test_pairing_same_memory_property(ums_gb, ratio, n):
    h = node(ums_gb * ratio)
    hms, ums = derive_paired_clusters(h, node(ums_gb), n)
    assert hms.total_memory == ums.total_memory
    assert ums.node_count == n * ratio


def test_effective_latency_examples():
    assert effective_local_latency(default_ums_node(), True) == 1.0
    assert effective_local_latency(default_hms_node(), False) == 1.0
    v = effective_local_latency(default_hms_node(), True)
    assert v == 0.25 * 1.0 + 0.75 * 1.6
    assert abs(Fraction(v) - Fraction(29, 20)) < Fraction(1, 2 ** 50)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(1.0, 4.0),
       st.floats(1.0, 4.0))
def test_effective_latency_monotone(f1, f2, l1, l2):
    def lat(slow_frac, slow_lat):
        fast = max(1, round(1000 * (1 - slow_frac)))
        slow = max(1, round(1000 * slow_frac))
        n = NodeSpec(8, (fast_tier(fast), slow_tier(slow, slow_lat)))
        return effective_local_latency(n, True), slow / (fast + slow)
    a, fa = lat(f1, min(l1, l2))
    b, fb = lat(f1, max(l1, l2))
    assert a <= b + 1e-12
    lo, flo = lat(min(f1, f2), l1)
    hi, fhi = lat(max(f1, f2), l1)
    if flo <= fhi:
        assert lo <= hi + 1e-12


def test_degenerate_slow_latency_matches_ums():
    h = default_hms_node().with_slow_latency(1.0)
    assert effective_local_latency(h) == effective_local_latency(default_ums_node())


def test_asymmetric_write_latency():
    h = NodeSpec(8, (fast_tier(16 * GB), slow_tier(48 * GB, 1.6, 3.2)))
    assert effective_local_latency(h, True, 0.0) == pytest.approx(1.45)
    # writes see 0.25*1 + 0.75*3.2 = 2.65
    assert effective_local_latency(h, True, 1.0) == pytest.approx(2.65)
    assert effective_local_latency(h, True, 0.5) == pytest.approx(2.05)


def test_local_access_probability():
    hms, ums = derive_paired_clusters(default_hms_node(), default_ums_node(), 32)
    assert local_access_probability(hms) == 0.03125
    assert local_access_probability(ums) == 0.0078125
    assert local_access_probability(hms) == 4 * local_access_probability(ums)
    one = ClusterDesign(Design.UMS, default_ums_node(), 1)
    assert local_access_probability(one) == 1.0


@pytest.mark.parametrize("kw", [
    dict(kind=TierKind.FAST, capacity=0),
    dict(kind=TierKind.FAST, capacity=1, read_latency=1.2),
    dict(kind=TierKind.SLOW, capacity=1, read_latency=0.9),
    dict(kind=TierKind.SLOW, capacity=1, read_latency=1.6, write_latency=0.0),
])
def test_tier_invariants(kw):
    with pytest.raises(ValueError):
        MemoryTier(**kw)


def test_node_and_cluster_invariants():
    with pytest.raises(ValueError, match="fast tier"):
        NodeSpec(8, (slow_tier(GB),))
    with pytest.raises(ValueError, match="at least one node"):
        ClusterDesign(Design.UMS, default_ums_node(), 0)
    with pytest.raises(ValueError, match="remote latency"):
        ClusterDesign(Design.HMS, default_hms_node(), 2, NetworkParams(1.2, 0.0))
