import csv
import json

import numpy as np
import pytest

from semiwig.config import RegimeConfig
from semiwig.errors import ConfigError
from semiwig.experiments import (
    PREDICTED_EXPONENTS,
    classify_regime,
    epsilon_sweep,
    initial_norm_exponents,
    reproduce_tables,
    run_point,
)

CHEAP = RegimeConfig(
    sigma=1.0,
    exponent=1.5,
    focusing=True,
    epsilons=(0.2, 0.15, 0.1, 0.08),
    wavenumber=(0.5,),
    t_end=0.3,
    frames=4,
    metrics=("delta_distance_s1", "transport_mismatch_s0", "a0_growth", "kinetic_bound", "moment_drift"),
)


def test_regime_defocusing_half_power():
    rep = classify_regime(RegimeConfig(exponent=0.5, focusing=False))
    assert all(label == "(i) holds" for _, _, label in rep.alternatives)
    assert rep.assumption4 is False
    assert not rep.baseline


def test_regime_three_dimensional_band():
    rep = classify_regime(RegimeConfig(n=3, sigma=1.0, exponent=2.0, focusing=False))
    assert rep.band == (1.5, 4.0) and rep.in_band
    assert rep.assumption3_relevant and rep.assumption3_holds
    assert all("(ii)" in label for _, _, label in rep.alternatives)


def test_regime_focusing_small_coupling():
    rep = classify_regime(RegimeConfig(exponent=1.2, focusing=True))
    assert all(label.startswith("(iii) holds") for _, _, label in rep.alternatives)
    assert rep.assumption4 is True
    assert rep.gn_constant == pytest.approx(1 / np.sqrt(3), rel=1e-6)


def test_regime_focusing_fails_for_large_coupling():
    rep = classify_regime(RegimeConfig(coefficient=5.0, exponent=1.0, focusing=True))
    assert all(label.startswith("(iii) fails") for _, _, label in rep.alternatives)
    assert rep.assumption4 is False


def test_regime_baseline_and_lines():
    rep = classify_regime(RegimeConfig(exponent=2.5, focusing=False))
    assert rep.baseline and not rep.in_band
    text = "\n".join(rep.lines())
    assert "baseline" in text and "outside" in text
    json.dumps(rep.as_dict())


def test_run_point_metrics():
    p = run_point(CHEAP, 0.1)
    assert p.ok and p.points >= 64
    assert set(p.metrics) == set(CHEAP.metrics)
    assert p.metrics["a0_growth"] >= 1.0 - 1e-12
    assert p.metrics["kinetic_bound"] <= 1.05


def test_sweep_is_independent_of_worker_count(tmp_path):
    a = epsilon_sweep(CHEAP, jobs=1)
    b = epsilon_sweep(CHEAP, jobs=2)
    assert [r[:3] for r in a.rows] == [r[:3] for r in b.rows]
    a.write_csv(tmp_path / "a.csv", timing=False)
    b.write_csv(tmp_path / "b.csv", timing=False)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert a.ok
    # every verdict names its threshold and numbers
    for v in a.verdicts:
        assert v.detail and v.name


def test_sweep_csv_schema(tmp_path):
    res = epsilon_sweep(CHEAP)
    res.write_csv(tmp_path / "sweep.csv")
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["epsilon", "metric", "value", "runtime_s"]
    assert len(rows) == 1 + len(CHEAP.epsilons) * len(CHEAP.metrics)
    summary = res.summary()
    assert set(summary["fits"]) == set(CHEAP.metrics)
    json.dumps(summary)


def test_failed_point_is_recorded_and_sweep_continues():
    cfg = CHEAP.with_(epsilons=(0.2, 0.15, 0.1, 0.08, 0.0005), max_points=2048)
    res = epsilon_sweep(cfg)
    failed = [p for p in res.points if not p.ok]
    assert len(failed) == 1 and failed[0].epsilon == 0.0005
    assert "ResolutionError" in failed[0].error
    assert res.ok
    assert all(np.isnan(v) for e, _, v, _ in res.rows if e == 0.0005)


def test_sweep_with_too_few_points_fails():
    cfg = CHEAP.with_(epsilons=(0.2, 0.1, 0.002, 0.001, 0.0005), max_points=2048)
    res = epsilon_sweep(cfg)
    assert not res.ok and not res.passed


def test_delta_distance_sweep_decays():
    cfg = RegimeConfig(
        focusing=True,
        exponent=1.5,
        envelope_width=2 * np.sqrt(np.pi),
        wavenumber=(0.5,),
        metrics=("delta_distance_s1", "narrowband_persistence"),
        frames=5,
    )
    res = epsilon_sweep(cfg)
    eps, d = res.values("delta_distance_s1")
    assert np.all(np.diff(d) < 0)
    assert res.fits["delta_distance_s1"].slope > 0.25
    assert res.passed


@pytest.mark.parametrize("family,dim", [("envelope-wavepacket", 1), ("radial-chirp", 1)])
def test_initial_norm_exponents(family, dim):
    fits = initial_norm_exponents(family, dim, 0.5, (0.2, 0.1, 0.05, 0.025))
    for norm in ("gradient", "a0"):
        pred = PREDICTED_EXPONENTS[(family, dim, norm)](0.5)
        assert fits[norm].slope == pytest.approx(pred, rel=0.15)


def test_tables_without_dynamics(tmp_path):
    rep = reproduce_tables(dynamics=False)
    assert rep.passed
    assert len(rep.cells) == 12
    rep.write_csv(tmp_path / "t.csv")
    header = (tmp_path / "t.csv").read_text().splitlines()[0]
    assert header == "table,row,cell,predicted_exponent,fitted_exponent,pass"
    assert "predicted" in rep.text()


def test_regime_rejects_bad_coefficient():
    with pytest.raises(ConfigError):
        classify_regime(RegimeConfig(coefficient=-1.0))
