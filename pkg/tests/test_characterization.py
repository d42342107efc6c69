import io
import itertools
import math

import pytest
from hypothesis import given, strategies as st

from hybridmem.characterization import (COUNTER_HEADER, Classification,
                                        CounterFormatError, CounterSample, Intensity,
                                        Locality, Regularity, Thresholds, UndefinedMetric,
                                        classify, cpu_intensity_score,
                                        irregularity_signal, locality_score,
                                        parse_counter_rows, rank_benefit,
                                        write_counters, ingest_counters)
from hybridmem.calibrate import TARGET_LABELS, classification_report


def sample(cycles=1000, instr=1000, loads=500, misses=10, stalls=100, prefetch=0):
    return CounterSample(cycles, instr, loads, misses, stalls, prefetch)


def test_locality_examples():
    assert locality_score(sample(loads=1000, misses=0)) == 0.0
    assert locality_score(sample(loads=1000, misses=100)) == 0.1
    with pytest.raises(UndefinedMetric):
        locality_score(sample(loads=0, misses=0))


def test_intensity_examples():
    assert cpu_intensity_score(sample(instr=1000, misses=10)) == 100.0
    assert cpu_intensity_score(sample(instr=1000, misses=0)) == math.inf
    assert classify(sample(instr=1000, misses=0)).cpu_intensity is Intensity.HIGH


def test_irregularity_signal():
    sig = irregularity_signal(sample(cycles=1000, stalls=600, misses=100, prefetch=20))
    assert sig.stall_fraction == 0.6
    assert sig.prefetch_per_miss == 0.2
    assert sig.prefetch_meaningful
    with pytest.raises(UndefinedMetric):
        irregularity_signal(sample(cycles=0, stalls=0))


def test_prefetch_guard_ignores_cache_resident_codes():
    # misses/load 0.002 < guard: prefetch counts cannot rescue regularity
    s = sample(loads=5000, misses=10, stalls=900, prefetch=10)
    assert classify(s).regularity is Regularity.IRREGULAR
    # with enough misses, heavy prefetching marks it Regular
    s = sample(loads=500, misses=100, stalls=900, prefetch=90)
    assert classify(s).regularity is Regularity.REGULAR


@pytest.mark.parametrize("mpl, expect", [
    (0.0, Locality.GOOD), (0.019, Locality.GOOD), (0.02, Locality.FAIR),
    (0.149, Locality.FAIR), (0.15, Locality.POOR), (1.0, Locality.POOR)])
def test_locality_bins(mpl, expect):
    assert classify(sample(loads=1000, misses=round(mpl * 1000))).locality is expect


def test_threshold_validation():
    with pytest.raises(ValueError):
        Thresholds(locality_fair=0.2, locality_poor=0.1)
    with pytest.raises(ValueError):
        Thresholds(stall=0.0)


def test_default_workload_labels(cal):
    assert classification_report(cal) == TARGET_LABELS


ALL = [Classification(r, l, i, label=f"{r.value}/{l.value}/{i.value}")
       for r, l, i in itertools.product(Regularity, Locality, Intensity)]
# higher is more benefit on each axis
BENEFIT = {Regularity.IRREGULAR: 1, Regularity.REGULAR: 0,
           Locality.POOR: 2, Locality.FAIR: 1, Locality.GOOD: 0,
           Intensity.LOW: 2, Intensity.MED: 1, Intensity.HIGH: 0}


def test_rank_all_combinations():
    ranked = rank_benefit(ALL[::-1])
    assert [c.benefit_rank for c in ranked] == list(range(1, 19))
    rank = {c.label: c.benefit_rank for c in ranked}
    # brute force: componentwise dominance implies a better rank
    for a, b in itertools.permutations(ALL, 2):
        ka = [BENEFIT[a.regularity], BENEFIT[a.locality], BENEFIT[a.cpu_intensity]]
        kb = [BENEFIT[b.regularity], BENEFIT[b.locality], BENEFIT[b.cpu_intensity]]
        if ka != kb and all(x >= y for x, y in zip(ka, kb)):
            assert rank[a.label] < rank[b.label]
    # regularity dominates the other two axes
    assert ranked[0].labels == ("Irregular", "Poor", "Low")
    assert ranked[8].regularity is Regularity.IRREGULAR
    assert ranked[9].regularity is Regularity.REGULAR


def test_rank_ties_keep_input_order():
    c = [Classification(Regularity.REGULAR, Locality.GOOD, Intensity.HIGH, label=x)
         for x in "abc"]
    assert [r.label for r in rank_benefit(c)] == ["a", "b", "c"]
    assert [r.benefit_rank for r in rank_benefit(c)] == [1, 2, 3]
    assert rank_benefit(c[:1])[0].benefit_rank == 1
    with pytest.raises(ValueError):
        rank_benefit([])


counts = st.integers(1, 10 ** 6)


@given(counts, counts, counts, st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
       st.sampled_from([1000, 10 ** 6]))
def test_classification_scale_invariant(cycles, instr, loads, mfrac, sfrac, pfrac, k):
    misses = int(loads * mfrac)
    s = CounterSample(cycles, instr, loads, misses, int(cycles * sfrac),
                      int(misses * pfrac))
    assert classify(s).labels == classify(s.scaled(k)).labels


def text(*rows):
    return io.StringIO("\n".join([",".join(COUNTER_HEADER), *rows]) + "\n")


def test_parse_round_trip(tmp_path):
    rows = [("a", sample()), ("b", sample(misses=0, prefetch=0))]
    path = tmp_path / "c.csv"
    write_counters(path, rows)
    assert ingest_counters(path) == rows


@pytest.mark.parametrize("row, msg", [
    ("a,1,2,3,4,5", "line 2: expected 7 fields"),
    ("a,1,2,3,4,5,x", "line 2: prefetch_events must be an integer"),
    ("a,1,2,3,4,5,1.5", "line 2: prefetch_events must be an integer"),
    ("a,1,2,3,-4,0,0", "line 2: llc_misses is negative"),
    ("a,10,2,3,4,50,0", "line 2: frontend_stall_cycles"),
])
def test_parse_errors_name_line_and_field(row, msg):
    with pytest.raises(CounterFormatError, match=msg):
        parse_counter_rows(text(row))


def test_parse_error_on_later_line():
    with pytest.raises(CounterFormatError, match="line 3: loads"):
        parse_counter_rows(text("ok,10,10,10,1,1,0", "bad,10,10,z,1,1,0"))


def test_missing_column():
    with pytest.raises(CounterFormatError, match="missing column.*loads"):
        parse_counter_rows(io.StringIO("label,cycles\nx,1\n"))
