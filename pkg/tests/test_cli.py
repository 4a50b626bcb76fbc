"""Config parsing, task runners, presets and the command-line entry point."""

import json

import numpy as np
import pytest

from kitaevwire import Boundary, ConfigError
from kitaevwire.cli import (
    PRESETS,
    load_preset,
    main,
    parse_config,
    render_config,
    run_preset,
    run_task,
)
from kitaevwire.output import read_bdg_tsv

MINIMAL_SPECTRUM = """
[wire]
n_sites = 30
hopping = 1.0
pairing = 0.5
chem_potential = 0.1
boundary = open

[task]
type = spectrum
"""

CONDUCTANCE_SMALL = """
[wire]
n_sites = 6
hopping = 1.0
pairing = 0.4
chem_potential = 0.2
boundary = open

[lead.left]
site = 1
lambda = 0.3
omega_c = 10.0

[lead.right]
site = 6
coupling = 0.3
omega_c = 10.0

[task]
type = conductance
bias_min = -1.5
bias_max = 1.5
points = 101
"""


def test_parse_minimal_spectrum_config():
    rc = parse_config(MINIMAL_SPECTRUM)
    assert rc.task == "spectrum"
    assert rc.wire.n_sites == 30
    assert rc.wire.pairing == 0.5 + 0j
    assert rc.wire.boundary is Boundary.OPEN
    assert rc.leads == ()


def test_parse_conductance_config_with_lambda_alias():
    rc = parse_config(CONDUCTANCE_SMALL)
    assert rc.task == "conductance"
    assert len(rc.leads) == 2
    assert rc.leads[0].coupling == 0.3
    assert rc.points == 101


def test_defect_site_out_of_range():
    text = MINIMAL_SPECTRUM.replace("boundary = open", "defects = 0:5.0")
    with pytest.raises(ConfigError, match="out of range"):
        parse_config(text)


def test_conductance_needs_two_leads():
    text = CONDUCTANCE_SMALL.replace("[lead.right]", "[lead.right] # disabled")
    # strip the right-lead keys so only one lead remains
    lines = [
        ln
        for ln in text.splitlines()
        if not (ln.startswith(("site = 6", "coupling = 0.3")))
    ]
    with pytest.raises(ConfigError, match="requires 2 leads"):
        parse_config("\n".join(lines).replace("omega_c = 10.0\n\n[task]", "[task]"))


def test_unknown_key_reports_line_number():
    text = MINIMAL_SPECTRUM + "\n[wire]\nbananas = 7\n"
    with pytest.raises(ConfigError, match=r"line \d+: unknown key 'bananas'"):
        parse_config(text)


def test_bad_value_reports_line_number():
    text = MINIMAL_SPECTRUM.replace("n_sites = 30", "n_sites = many")
    with pytest.raises(ConfigError, match=r"line \d+: cannot parse 'many'"):
        parse_config(text)


def test_unknown_section_reports_line_number():
    with pytest.raises(ConfigError, match=r"line 1: unknown section"):
        parse_config("[socks]\ncolор = blue\n")


def test_render_parse_roundtrip():
    rc = parse_config(CONDUCTANCE_SMALL)
    assert parse_config(render_config(rc)) == rc


def test_spectrum_task_writes_labeled_csv(tmp_path):
    rc = parse_config(MINIMAL_SPECTRUM)
    paths = run_task(rc, tmp_path)
    body = (tmp_path / "spectrum.csv").read_text().splitlines()
    rows = [ln for ln in body if ln and not ln.startswith("#")][1:]
    assert len(rows) == 60
    labels = {row.split(",")[2] for row in rows}
    assert labels <= {"in_gap", "bulk", "defect_byproduct"}
    assert "in_gap" in labels
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["task"] == "spectrum"
    assert "config_echo" in meta


def test_spectrum_dump_matrix_roundtrips(tmp_path):
    import dataclasses

    rc = dataclasses.replace(parse_config(MINIMAL_SPECTRUM), dump_matrix=True)
    run_task(rc, tmp_path)
    from kitaevwire import build_bdg

    back = read_bdg_tsv(tmp_path / "bdg_matrix.tsv")
    assert np.array_equal(back, np.asarray(build_bdg(rc.wire).entries))


def test_profiles_task_fallback_without_in_gap(tmp_path):
    text = MINIMAL_SPECTRUM.replace("boundary = open", "boundary = closed").replace(
        "type = spectrum", "type = profiles"
    )
    run_task(parse_config(text), tmp_path)
    assert (tmp_path / "profile_pair0.csv").exists()
    assert (tmp_path / "majorana_pair0.csv").exists()


def test_defect_sweep_preset_monotonic(tmp_path):
    run_preset("fig2", tmp_path)
    rows = [
        ln
        for ln in (tmp_path / "defect_sweep.csv").read_text().splitlines()
        if ln and not ln.startswith("#")
    ][1:]
    values = [float(r.split(",")[1]) for r in rows]
    assert [float(r.split(",")[0]) for r in rows] == [2, 5, 10, 20, 50, 100]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_preset_names_all_load():
    for name in PRESETS:
        rc = load_preset(name)
        assert rc.task in ("spectrum", "profiles", "defect_sweep", "conductance")
    with pytest.raises(ConfigError):
        load_preset("fig99")


def test_rerun_from_echo_is_byte_identical(tmp_path):
    run_preset("fig1b", tmp_path / "a")
    echo = json.loads((tmp_path / "a" / "metadata.json").read_text())["config_echo"]
    run_task(parse_config(echo), tmp_path / "b")
    assert (tmp_path / "a" / "spectrum.csv").read_bytes() == (
        tmp_path / "b" / "spectrum.csv"
    ).read_bytes()


def test_main_conductance_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CONDUCTANCE_SMALL)
    out = tmp_path / "out"
    assert main(["conductance", "--config", str(cfg), "--out", str(out)]) == 0
    for name in ("conductance.csv", "peaks.csv", "spectrum.csv", "metadata.json"):
        assert (out / name).exists()
    header = [
        ln
        for ln in (out / "conductance.csv").read_text().splitlines()
        if not ln.startswith("#")
    ][0]
    assert header == "bias,didv_total,didv_direct,didv_crossed,didv_local_andreev"


def test_main_config_error_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(MINIMAL_SPECTRUM.replace("n_sites = 30", "n_sites = 1"))
    assert main(["spectrum", "--config", str(cfg)]) == 2


def test_main_missing_file_exit_code(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_main_numerical_error_exit_code(tmp_path):
    text = """
[wire]
n_sites = 8
hopping = 1.0
pairing = 0.0
chem_potential = 0.1
boundary = closed
defects = 4:5.0

[task]
type = defect_sweep
mu_p_list = 5
"""
    cfg = tmp_path / "gapless.cfg"
    cfg.write_text(text)
    # a gapless wire has no in-gap modes to track
    assert main(["defect-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_main_verify_passes():
    assert main(["verify", "--samples", "10", "--seed", "1"]) == 0


def test_main_self_energy_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CONDUCTANCE_SMALL)
    out = tmp_path / "out"
    assert (
        main(
            [
                "conductance",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--self-energy",
                "exact",
                "--threads",
                "2",
            ]
        )
        == 0
    )
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["self_energy"] == "exact"
