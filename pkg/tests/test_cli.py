import hashlib
import os
from importlib import resources

import pytest
import yaml

from mmwsim.channel import load_pool
from mmwsim.cli import main
from mmwsim.scenario_file import (
    ScenarioFileError,
    apply_overrides,
    dump_scenario,
    load_scenario,
    parse_scenario_text,
    scenario_to_data,
)


def bundled(name):
    return str(resources.files("mmwsim.data").joinpath("scenarios", name))


MINIMAL = """\
radio:
  tx_power_dbm: 30
topology:
  base_stations: [[0, 0]]
  users:
    - position: [40, 0]
      velocity: [20, 0]
run:
  seed: 3
  duration: 0.02
"""


def _sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_validate_ok(capsys):
    assert main(["validate", bundled("los.yaml")]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_validate_missing_radio(tmp_path, capsys):
    p = tmp_path / "s.yaml"
    p.write_text(MINIMAL.replace("radio:\n  tx_power_dbm: 30\n", ""))
    assert main(["validate", str(p)]) == 2
    assert "radio: missing required section" in capsys.readouterr().out


def test_validate_negative_subband_width(tmp_path, capsys):
    p = tmp_path / "s.yaml"
    p.write_text("frame:\n  SubbandWidth: -13.89e+6\n" + MINIMAL)
    assert main(["validate", str(p)]) == 2
    out = capsys.readouterr().out
    assert f"{p}:2: frame.SubbandWidth: must be > 0" in out


def test_all_problems_reported_with_lines(tmp_path):
    text = MINIMAL.replace("  tx_power_dbm: 30\n", "  tx_power_dbm: loud\n  colour: red\n")
    with pytest.raises(ScenarioFileError) as exc:
        parse_scenario_text(text, "x.yaml")
    diags = exc.value.diagnostics
    assert "x.yaml:2: radio.tx_power_dbm: expected a number, got 'loud'" in diags
    assert "x.yaml:3: radio.colour: unknown key" in diags


def test_yaml_syntax_error_has_line():
    with pytest.raises(ScenarioFileError, match=r"x.yaml:2: YAML syntax error"):
        parse_scenario_text("radio:\n  a: b: c\n", "x.yaml")


def test_roundtrip_equal():
    for name in ("los.yaml", "nlos.yaml"):
        sc = load_scenario(bundled(name))
        assert parse_scenario_text(dump_scenario(sc)) == sc
    sc = parse_scenario_text(MINIMAL)
    assert parse_scenario_text(dump_scenario(sc)) == sc
    assert scenario_to_data(sc)["run"]["seed"] == 3


def test_overrides_last_wins():
    sc = parse_scenario_text(MINIMAL, overrides=["run.seed=7", "radio.noise_figure_db=9", "run.seed=8"])
    assert sc.run.seed == 8 and sc.radio.noise_figure_db == 9.0
    data = apply_overrides({"topology": {"users": [{"position": [1, 2]}]}}, ["topology.users.0.position=[5, 6]"])
    assert data["topology"]["users"][0]["position"] == [5, 6]
    with pytest.raises(ScenarioFileError, match="dotted.key=value"):
        parse_scenario_text(MINIMAL, overrides=["noequals"])


def test_run_bundled_los(tmp_path):
    out = tmp_path / "o"
    assert main(["run", bundled("los.yaml"), "--set", "run.duration=0.05", "--out", str(out)]) == 0
    for f in ("slot_trace.csv", "sap_messages.csv", "large_scale_updates.csv", "summary.txt", "scenario.yaml"):
        assert (out / f).exists()


def test_run_bad_pattern_exit_2(tmp_path, capsys):
    code = main(["run", bundled("los.yaml"), "--set", "frame.TDDControlDataPattern=ccxddddd", "--out", str(tmp_path)])
    assert code == 2
    assert "TDDControlDataPattern" in capsys.readouterr().err


def test_run_runtime_failure_exit_3(tmp_path, capsys):
    missing = tmp_path / "nope.bin"
    code = main(["run", bundled("los.yaml"), "--set", "run.duration=0.01", "--set", f"channel.pool_file={missing}", "--out", str(tmp_path / "o")])
    assert code == 3


def test_seed_override_changes_hash_not_schema(tmp_path):
    outs = []
    for seed in (1, 2):
        out = tmp_path / f"s{seed}"
        assert main(["run", bundled("los.yaml"), "--set", "run.duration=0.05", "--seed", str(seed), "--out", str(out)]) == 0
        outs.append(out / "slot_trace.csv")
    assert _sha(outs[0]) != _sha(outs[1])
    heads = [p.read_text().splitlines()[0] for p in outs]
    assert heads[0] == heads[1]


def test_summary_header_reflects_overrides(tmp_path):
    out = tmp_path / "o"
    main(["run", bundled("los.yaml"), "--set", "run.duration=0.03", "--set", "radio.tx_power_dbm=27.5", "--out", str(out)])
    text = (out / "summary.txt").read_text()
    header = "\n".join(line[4:] for line in text.splitlines() if line.startswith("#   "))
    doc = yaml.safe_load(header)
    assert doc["radio"]["tx_power_dbm"] == 27.5
    assert doc["run"]["duration"] == 0.03
    assert doc["run"]["output_dir"] == str(out)
    assert "miesm_table_sha256:" in text
    stats = dict(line.split(": ", 1) for line in text.splitlines() if not line.startswith("#"))
    assert set(stats) == {"dl_slots", "mean_sinr_db", "total_delivered_bits", "throughput_bps", "drop_rate"}


def test_replications(tmp_path):
    out = tmp_path / "rep"
    assert main(["run", bundled("nlos.yaml"), "--set", "run.duration=0.02", "--replications", "2", "--seed", "4", "--out", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["seed4", "seed5"]


def test_genpool(tmp_path):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    assert main(["genpool", "--seed", "9", "--count", "100", "--tx-antennas", "64", "--rx-antennas", "16", "--out", str(a)]) == 0
    pool = load_pool(a)
    assert len(pool) == 100 and all(p.n_tx == 64 and p.n_rx == 16 for p in pool)
    assert main(["genpool", "--seed", "9", "--count", "100", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_genpool_single_and_unwritable(tmp_path):
    p = tmp_path / "one.bin"
    assert main(["genpool", "--count", "1", "--out", str(p)]) == 0
    assert len(load_pool(p)) == 1
    assert main(["genpool", "--count", "1", "--out", str(tmp_path / "missing" / "x.bin")]) == 3
