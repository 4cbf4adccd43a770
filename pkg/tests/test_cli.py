import json

import pytest

from wsnsim.cli import COLUMNS, main, read_csv
from wsnsim.config import PRESETS, load_config, parse_config
from wsnsim.netmodel import ConfigError, Protocol, ScenarioConfig


def test_empty_config_is_default():
    cfg = parse_config("")
    assert cfg == ScenarioConfig()
    assert cfg.protocol is Protocol.LEACH and cfg.field_side == 100.0
    r = cfg.radio
    assert (r.e_elec, r.e_da, r.eps_fs, r.eps_mp, r.packet_bits) == (50e-9, 5e-9, 10e-12, 0.0013e-12, 4000)
    assert cfg.e0 == 0.5 and cfg.tiers.p_opt == 0.1 and cfg.n == 100


def test_invariant_violation_named():
    with pytest.raises(ConfigError, match="m \\+ b"):
        parse_config("[tiers]\nm = 0.8\nb = 0.3\n")


def test_reactive_defaults():
    cfg = parse_config('[scenario]\nprotocol = "TEEN"\n')
    assert cfg.reactive.hard_threshold == 50.0 and cfg.reactive.soft_threshold == 2.0


def test_reactive_values_and_override():
    text = '[scenario]\nprotocol = "TSEP"\n[reactive]\nhard_threshold = 70\nsoft_threshold = 0.5\n'
    assert parse_config(text).reactive.hard_threshold == 70.0
    assert parse_config(text, protocol="LEACH").reactive is None


def test_reactive_block_with_proactive_protocol():
    with pytest.raises(ConfigError):
        parse_config('[scenario]\nprotocol = "SEP"\n[reactive]\nhard_threshold = 70\n')


@pytest.mark.parametrize("text,msg", [
    ("[tiers]\nq = 1\n", "unknown key"),
    ("[extra]\nq = 1\n", "unknown section"),
    ("[scenario]\nn = 'many'\n", "expected int"),
    ("[scenario]\nn = 10\nn = 11\n", "line 3"),
    ("[scenario]\nprotocol = 'HEED'\n", "unknown protocol"),
])
def test_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[scenario]\nseed = 9\nbs_position = [10, 20]\n[field]\nevent_probability = 0.02\n')
    cfg = load_config(p)
    assert cfg.rng_seed == 9 and tuple(cfg.bs_position) == (10.0, 20.0)
    assert cfg.field_model.event_probability == 0.02
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")


def test_presets():
    one, two = PRESETS["paper-case-1"], PRESETS["paper-case-2"]
    assert (one.base.tiers.alpha, one.base.tiers.m, one.base.tiers.b) == (1.0, 0.1, 0.3)
    assert (two.base.tiers.alpha, two.base.tiers.m, two.base.tiers.b) == (3.0, 0.2, 0.3)
    assert set(one.protocols) == set(Protocol)
    assert one.base.radio == ScenarioConfig().radio
    assert len(one.with_seed_count(30).seeds) == 30


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[scenario]\nprotocol = "TSEP"\nn = 20\nmax_rounds = 150\n')
    return p


def test_run_twice_is_byte_identical(tmp_path, cfg_file):
    assert main(["run", "--config", str(cfg_file), "--seed", "7", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", str(cfg_file), "--seed", "7", "--out", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / "a" / "rounds.csv").read_bytes(), (tmp_path / "b" / "rounds.csv").read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 151
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["seed"] == 7 and summary["protocol"] == "TSEP"


def test_compare_outputs(tmp_path, cfg_file):
    out = tmp_path / "cmp"
    rc = main(["compare", "--config", str(cfg_file), "--protocols", "LEACH,TEEN", "--seeds", "2", "--out", str(out)])
    assert rc == 0
    assert (out / "LEACH" / "seed_1.csv").exists()
    assert "TEEN" in (out / "comparison.txt").read_text()
    mean = read_csv(out / "LEACH_mean.csv")
    assert len(mean["round"]) == 150


def test_compare_zero_protocols_is_usage_error(tmp_path, cfg_file, capsys):
    assert main(["compare", "--config", str(cfg_file), "--protocols", "", "--out", str(tmp_path)]) == 1
    assert "protocol" in capsys.readouterr().err


def test_cli_error_codes(tmp_path, capsys):
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["run", "--config", str(tmp_path / "nope.toml")]) == 1
    bad = tmp_path / "bad.toml"
    bad.write_text("[tiers]\nm = 0.8\nb = 0.3\n")
    assert main(["run", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 4


def test_plots_from_csv(tmp_path, cfg_file):
    from wsnsim.cli import plot_from_csvs
    out = tmp_path / "cmp"
    main(["compare", "--config", str(cfg_file), "--protocols", "LEACH,SEP", "--seeds", "1", "--out", str(out)])
    paths = plot_from_csvs({p: out / f"{p}_mean.csv" for p in ("LEACH", "SEP")}, out)
    assert [p.name for p in paths] == ["alive.svg", "dead.svg", "packets.svg"]
    assert all(p.read_text().lstrip().startswith("<?xml") for p in paths)
