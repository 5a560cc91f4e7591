import math

import numpy as np
import pytest

from cliquemem import InfeasibleConfigError
from cliquemem.core import DecoderSpec
from cliquemem.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    parse_config_file,
    preset_config,
    rows_to_csv,
    run_experiment,
)
from cliquemem.rng import substream


def tiny_fig3(seed=7):
    return preset_config("fig3", trials=6, seed=seed, s_values=(40, 80))


def test_csv_is_deterministic_per_seed():
    a = rows_to_csv(run_experiment(tiny_fig3()))
    b = rows_to_csv(run_experiment(tiny_fig3()))
    assert a == b
    c = rows_to_csv(run_experiment(tiny_fig3(seed=8)))
    assert a != c


def test_csv_schema():
    text = rows_to_csv(run_experiment(tiny_fig3()))
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert all(line.count(",") == CSV_HEADER.count(",") for line in lines)


def test_trial_substreams_stable_under_growth():
    # adding trials must not perturb the draws of existing ones
    draws_small = [substream(5, 1, 0, t).integers(0, 1000) for t in range(5)]
    draws_large = [substream(5, 1, 0, t).integers(0, 1000) for t in range(10)]
    assert draws_small == draws_large[:5]
    assert substream(5, 1, 0, 0).integers(0, 1000) != substream(6, 1, 0, 0).integers(0, 1000) \
        or substream(5, 1, 0, 1).integers(0, 1000) != substream(6, 1, 0, 1).integers(0, 1000)


def test_proportion_stderr_is_binomial():
    rows = run_experiment(tiny_fig3())
    checked = 0
    for row in rows:
        if row.metric.startswith("mer"):
            assert row.stderr == pytest.approx(
                math.sqrt(row.value * (1 - row.value) / row.trials))
            checked += 1
    assert checked == 4


def test_sequence_rows_cover_expected_metrics():
    cfg = ExperimentConfig(kind="sequence", chi=8, l=32, r=3, L=16,
                           s_values=(5, 10), trials=4, seed=1)
    rows = run_experiment(cfg)
    metrics = {row.metric for row in rows}
    assert metrics == {"sber_sim", "sqer_sim", "density_sim", "density_model",
                       "sber_struct", "sber_struct_model"}
    for row in rows:
        if row.metric == "sber_sim":
            assert row.value == 0.0       # trivial load decodes exactly


def test_infeasible_configs_rejected_before_running():
    with pytest.raises(InfeasibleConfigError):
        run_experiment(ExperimentConfig(kind="sequence", chi=8, l=32, r=8, L=16))
    with pytest.raises(InfeasibleConfigError):
        run_experiment(ExperimentConfig(kind="sequence", chi=8, l=32, r=3, L=16,
                                        s_values=()))
    with pytest.raises(InfeasibleConfigError):
        run_experiment(ExperimentConfig(kind="sequence", chi=8, l=32, r=3, L=16,
                                        s_values=(10, 5)))
    with pytest.raises(InfeasibleConfigError):
        run_experiment(ExperimentConfig(kind="vectorial", chi=12, l=8, r=3, L=10,
                                        c=4, restrict=True, s_values=(5,),
                                        decoder=DecoderSpec("gwsta", alpha=4)))
    with pytest.raises(InfeasibleConfigError):
        run_experiment(ExperimentConfig(kind="sequence", chi=8, l=32, r=3, L=15,
                                        s_values=(5,), wrap=True))
    with pytest.raises(InfeasibleConfigError):
        preset_config("nope")


def test_restricted_vectorial_config_runs_when_feasible():
    cfg = ExperimentConfig(kind="vectorial", chi=12, l=8, r=2, L=10, c=3,
                           restrict=True, s_values=(4,), trials=3, seed=2,
                           decoder=DecoderSpec("gwsta", alpha=3))
    rows = run_experiment(cfg)
    assert [row.metric for row in rows] == ["per"]
    assert rows[0].value == 0.0


def test_double_rows(tmp_path):
    cfg = ExperimentConfig(kind="double", chi=20, l=8, r=2, L=8, c=3,
                           s_values=(4,), trials=3, seed=3,
                           decoder=DecoderSpec("gwsta", alpha=3))
    rows = run_experiment(cfg)
    assert {row.metric for row in rows} == {"per_single", "per_double"}


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment\n"
        "kind = sequence\n"
        "chi = 8\n"
        "l = 32\n"
        "r = 3\n"
        "length = 16\n"
        "s = 5, 10\n"
        "trials = 4\n"
        "seed = 9\n"
        "wrap = true\n"
    )
    cfg = parse_config_file(path)
    assert cfg.kind == "sequence"
    assert cfg.s_values == (5, 10)
    assert cfg.wrap is True
    assert cfg.L == 16
    run_experiment(cfg)

    bad = tmp_path / "bad.cfg"
    bad.write_text("chi = 8\n")
    with pytest.raises(InfeasibleConfigError):
        parse_config_file(bad)
    worse = tmp_path / "worse.cfg"
    worse.write_text("kind sequence\n")
    with pytest.raises(ValueError):
        parse_config_file(worse)


def test_formatting_rules():
    from cliquemem.experiments import _fmt

    assert _fmt(None) == ""
    assert _fmt(3) == "3"
    assert _fmt(np.int64(3)) == "3"
    assert _fmt(0.30000000001) == "0.3"
    assert _fmt("x") == "x"
