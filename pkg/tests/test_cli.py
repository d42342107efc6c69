import csv
import json

import pytest

from hybridmem.cli import main
from hybridmem.characterization import COUNTER_HEADER


@pytest.fixture(scope="module")
def sim(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--seed", "0", "--out", str(out)]) == 0
    return out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_full_grid(sim):
    r = rows(sim / "results.csv")
    assert len(r) == 7 * 6 * 2
    assert {x["design"] for x in r} == {"HMS", "UMS"}
    assert len(rows(sim / "counters.csv")) == 84
    assert len(rows(sim / "classification_counters.csv")) == 7


def test_simulate_is_deterministic(sim, tmp_path):
    assert main(["simulate", "--seed", "0", "--out", str(tmp_path)]) == 0
    for name in ("results.csv", "counters.csv", "classification_counters.csv"):
        assert (sim / name).read_bytes() == (tmp_path / name).read_bytes()


def test_empty_workloads_rejected_before_output(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"workloads": []}))
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    assert "workloads" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize("cfg, msg", [
    ({"bogus": 1}, "bogus"),
    ({"hms_processes": [12]}, "whole"),
    ({"workloads": ["Nope"]}, "Nope"),
    ({"ums_node": {"cores": 8, "fast_gb": 24}}, "remainder"),
])
def test_bad_configs(tmp_path, capsys, cfg, msg):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert msg in capsys.readouterr().err


def test_config_subset_run(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"workloads": ["gups"], "hms_processes": [8, 16],
                               "network": {"remote_latency": 4.0}}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "results.csv")
    assert [x["scale_label"] for x in r] == ["8:32", "8:32", "16:64", "16:64"]
    assert r[0]["workload"] == "GUPS"


def test_classify_round_trip(sim, tmp_path, capsys):
    assert main(["classify", str(sim / "classification_counters.csv")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "label,regularity,locality,cpu_intensity,benefit_rank"
    assert out[1] == "GUPS,Irregular,Poor,Low,1"
    assert [line.split(",")[0] for line in out[1:3]] == ["GUPS", "Graph500"]

    assert main(["classify", str(sim / "classification_counters.csv"),
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "classification.csv").read_text().splitlines() == out


def test_classify_single_row_and_scaling(sim, tmp_path, capsys):
    src = rows(sim / "classification_counters.csv")
    one, scaled = tmp_path / "one.csv", tmp_path / "scaled.csv"
    for path, k in ((one, 1), (scaled, 1000)):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(COUNTER_HEADER)
            w.writerow([src[3]["label"]] + [int(src[3][c]) * k for c in COUNTER_HEADER[1:]])
    main(["classify", str(one)])
    a = capsys.readouterr().out
    main(["classify", str(scaled)])
    assert capsys.readouterr().out == a
    assert a.splitlines()[1] == "LU,Regular,Fair,Med,1"


def test_classify_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(",".join(COUNTER_HEADER) + "\nx,1,1,1,1,1,oops\n")
    assert main(["classify", str(bad)]) == 2
    assert "line 2: prefetch_events" in capsys.readouterr().err


def test_report(sim, tmp_path, capsys):
    assert main(["report", str(sim / "results.csv"), "--out", str(tmp_path)]) == 0
    printed = capsys.readouterr().out
    assert "GUPS" in printed and "HPCCG" in printed
    plot = rows(tmp_path / "plot_GUPS.csv")
    assert list(plot[0]) == ["scale_label", "perf_hms", "perf_ums", "improvement"]
    assert len(plot) == 6
    summary = {r["workload"]: r for r in rows(tmp_path / "summary.csv")}
    assert summary["GUPS"]["at_scale"] == "256:1024"
    for p in plot:
        assert float(p["improvement"]) == pytest.approx(
            float(p["perf_hms"]) / float(p["perf_ums"]), rel=1e-5)


def test_report_missing_column(tmp_path, capsys):
    bad = tmp_path / "r.csv"
    bad.write_text("workload,scale_label\nGUPS,8:32\n")
    assert main(["report", str(bad), "--out", str(tmp_path)]) == 2
    assert "missing column(s) design" in capsys.readouterr().err


def test_calibrate_reproduces_shipped_file(tmp_path, capsys):
    from hybridmem.calibration import Calibration
    dest = tmp_path / "cal.json"
    assert main(["calibrate", "--calibration", str(dest)]) == 0
    assert "MISMATCH" not in capsys.readouterr().out
    new, shipped = Calibration.load(dest), Calibration.load()
    assert new.network.hub_contention_alpha == pytest.approx(
        shipped.network.hub_contention_alpha, rel=1e-9)
    for name, k in shipped.kernels.items():
        assert new.kernel(name).comm_coef == pytest.approx(k.comm_coef, rel=1e-9)
