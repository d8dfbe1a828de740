import math

import numpy as np
import pytest
from pydantic import ValidationError

from qmimo.channel import betas_of, drop_users
from qmimo.experiments import (
    CSV_COLUMNS,
    ScenarioConfig,
    csv_text,
    load_config,
    run_figure,
    run_figure1,
    run_figure2,
    run_figure3,
    sweep,
    write_csv,
)
from qmimo.quantizer import INFINITE, alpha_of_bits
from qmimo.rates import (
    approx_rate_per_user,
    ergodic_rate_mc,
    power_scaled_limit,
)

FAST = {"trials": 150}


@pytest.fixture(scope="module")
def fig1():
    return run_figure1(FAST)


@pytest.fixture(scope="module")
def fig2():
    return run_figure2(FAST)


@pytest.fixture(scope="module")
def fig3():
    return run_figure3(FAST)


def _rows_by(table, **match):
    return [
        r
        for r in table.rows
        if all(getattr(r, key) == value for key, value in match.items())
    ]


def test_figure1_grid(fig1):
    assert len(fig1.rows) == 15  # 5 antenna counts x 3 bit settings
    assert sorted({r.m_antennas for r in fig1.rows}) == [32, 64, 128, 256, 512]
    assert {r.bits for r in fig1.rows} == {1, 2, INFINITE}
    assert all(r.p_u_linear == 10.0 for r in fig1.rows)
    assert all(r.n_users == 10 for r in fig1.rows)


def test_figure1_more_bits_more_rate(fig1):
    for m in (32, 64, 128, 256, 512):
        one = _rows_by(fig1, m_antennas=m, bits=1)[0]
        two = _rows_by(fig1, m_antennas=m, bits=2)[0]
        inf = _rows_by(fig1, m_antennas=m, bits=INFINITE)[0]
        assert one.sum_rate_approx < two.sum_rate_approx < inf.sum_rate_approx
        # paired fading draws make the ordering hold for the MC column too
        assert one.sum_rate_mc < two.sum_rate_mc < inf.sum_rate_mc


def test_figure1_mc_tracks_approx_loosely(fig1):
    # full 3% criterion runs in the acceptance suite at 10^4 trials
    for r in fig1.rows:
        assert abs(r.sum_rate_mc - r.sum_rate_approx) / r.sum_rate_mc < 0.10


def test_figure2_grid_and_limit_column(fig2):
    assert len(fig2.rows) == 24
    e_u = 100.0
    betas = betas_of(list(fig2.drops_by_index[0]))
    for r in fig2.rows:
        assert r.p_u_linear == pytest.approx(e_u / r.m_antennas, rel=1e-12)
        expected = sum(power_scaled_limit(b, e_u, alpha_of_bits(r.bits)) for b in betas)
        assert r.sum_rate_limit == pytest.approx(expected, rel=1e-12)


def test_figure2_saturation(fig2):
    for bits in (1, 2, INFINITE):
        rate = {r.m_antennas: r.sum_rate_approx for r in _rows_by(fig2, bits=bits)}
        assert rate[4096] - rate[2048] < rate[128] - rate[64]
        assert rate[4096] < _rows_by(fig2, bits=bits)[0].sum_rate_limit


def test_figure2_gaps_narrow_with_bits(fig2):
    at_1024 = {r.bits: r.sum_rate_approx for r in _rows_by(fig2, m_antennas=1024)}
    assert at_1024[INFINITE] - at_1024[2] < at_1024[2] - at_1024[1]


def test_figure3_rows(fig3):
    assert len(fig3.rows) == 12
    assert [r.bits for r in fig3.rows] == list(range(1, 13))
    assert all(r.m_antennas == 100 for r in fig3.rows)
    assert all(r.energy_efficiency is not None for r in fig3.rows)


def test_figure3_rate_monotone_eta_degrades(fig3):
    rates = [r.sum_rate_approx for r in fig3.rows]
    assert all(b >= a for a, b in zip(rates, rates[1:]))
    eta = {r.bits: r.energy_efficiency for r in fig3.rows}
    assert eta[1] > eta[10]


def test_unknown_figure_id():
    with pytest.raises(ValueError):
        run_figure(4)


def test_sweep_single_point_matches_direct_call():
    config = ScenarioConfig(
        m_values=[24],
        n_users=3,
        bits_values=[2],
        trials=200,
        drop_seed=42,
        fading_seed=43,
    )
    table = sweep(config)
    assert len(table.rows) == 1
    row = table.rows[0]
    betas = betas_of(drop_users(config.cell, 3, 42))
    alpha = alpha_of_bits(2)
    direct = ergodic_rate_mc(betas, 24, 10.0, alpha, 200, 43)
    assert row.sum_rate_mc == direct.sum_rate_mc.mean
    assert row.sum_rate_mc_stderr == direct.sum_rate_mc.stderr
    assert row.sum_rate_approx == pytest.approx(
        float(approx_rate_per_user(betas, 24, 10.0, alpha).sum()), rel=1e-15
    )


def test_sweep_deterministic_and_job_invariant():
    config = ScenarioConfig(
        m_values=[8, 16], n_users=2, bits_values=[1, INFINITE], trials=150
    )
    first = csv_text(sweep(config))
    second = csv_text(sweep(config))
    threaded = csv_text(sweep(config, jobs=4))
    assert first == second == threaded


def test_rows_reproducible_from_recorded_seeds(fig1):
    row = _rows_by(fig1, m_antennas=64, bits=2)[0]
    betas = betas_of(drop_users(fig1.config.cell, row.n_users, row.drop_seed))
    again = ergodic_rate_mc(
        betas, row.m_antennas, row.p_u_linear, alpha_of_bits(row.bits), row.trials, row.fading_seed
    )
    assert again.sum_rate_mc.mean == row.sum_rate_mc
    approx = float(approx_rate_per_user(betas, 64, row.p_u_linear, alpha_of_bits(2)).sum())
    assert approx == pytest.approx(row.sum_rate_approx, rel=1e-12)


def test_csv_layout(fig1):
    text = csv_text(fig1)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 16
    # sorted by antennas, then bits with INFINITE last
    keys = []
    for line in lines[1:]:
        fields = line.split(",")
        keys.append((int(fields[0]), math.inf if fields[2] == "inf" else int(fields[2])))
    assert keys == sorted(keys)
    # energy efficiency is blank exactly on infinite-resolution rows
    for line in lines[1:]:
        fields = dict(zip(CSV_COLUMNS, line.split(",")))
        if fields["bits"] == "inf":
            assert fields["energy_efficiency"] == ""
        else:
            assert float(fields["energy_efficiency"]) > 0
        # ten significant digits at most
        mantissa = fields["sum_rate_mc"].split("e")[0].replace("-", "").replace(".", "")
        assert len(mantissa) <= 10


def test_csv_file_round_trip(tmp_path, fig1):
    path = tmp_path / "table.csv"
    write_csv(fig1, path)
    assert path.read_text(encoding="utf-8") == csv_text(fig1)


def test_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ValidationError):
        ScenarioConfig(m_values=[4], bits_values=[1], bogus=1)
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("m_values: [4]\nbits_values: [1]\nwhatever: 2\n")
    with pytest.raises(ValidationError):
        load_config(cfg)


def test_config_file_round_trip(tmp_path):
    cfg = tmp_path / "scenario.yaml"
    cfg.write_text(
        "m_values: [8, 16]\n"
        "n_users: 2\n"
        "power_mode: scaled\n"
        "eu_db: 20.0\n"
        "bits_values: [1, .inf]\n"
        "trials: 150\n"
        "drop_seed: 5\n"
        "fading_seed: 6\n"
    )
    config = load_config(cfg)
    assert config.m_values == [8, 16]
    assert config.bits_values == [1, INFINITE]
    table = sweep(config)
    assert len(table.rows) == 4


def test_config_validation_bounds():
    with pytest.raises(ValidationError):
        ScenarioConfig(m_values=[], bits_values=[1])
    with pytest.raises(ValidationError):
        ScenarioConfig(m_values=[4], bits_values=[1], trials=50)
    with pytest.raises(ValidationError):
        ScenarioConfig(m_values=[4], bits_values=[0])
    with pytest.raises(ValidationError):
        ScenarioConfig(m_values=[0], bits_values=[1])


def test_grid_cap_refusal():
    config = ScenarioConfig(m_values=list(range(1, 20)), bits_values=[1, 2], trials=100)
    with pytest.raises(ValueError, match="cap"):
        sweep(config, grid_cap=10)


def test_multi_drop_rows_and_column():
    config = ScenarioConfig(
        m_values=[8], n_users=2, bits_values=[1], trials=150, drops=2
    )
    table = sweep(config)
    assert len(table.rows) == 2
    assert {r.drop_index for r in table.rows} == {0, 1}
    seeds = {r.drop_seed for r in table.rows}
    assert len(seeds) == 2
    text = csv_text(table)
    assert text.splitlines()[0].endswith(",drop_index")
    # each drop is independently regenerable from its recorded seed
    for row in table.rows:
        betas = betas_of(drop_users(config.cell, 2, row.drop_seed))
        assert np.array_equal(betas, betas_of(list(table.drops_by_index[row.drop_index])))
