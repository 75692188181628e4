"""Command-line interface: outputs, config overlay and exit codes."""

import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from ballisticwaves.airyq import QArgs, q, qi
from ballisticwaves.atomlaser import (
    GaussianSource,
    VortexLattice,
    lattice_spectrum,
    rb87_context,
    vortex_current_1m,
)
from ballisticwaves.ballistic import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    PhysicalContext,
    total_current_matrix,
)
from ballisticwaves.cli import main
from ballisticwaves.harmonics import MultipoleIndex, translation_coeff_t
from ballisticwaves.specfun import airy


def _run(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def _parse_values(output):
    out = {}
    for line in output.splitlines():
        if " = " in line:
            key, val = line.split(" = ")
            out[key.strip()] = float(val)
    return out


# ------------------------------------------------------------------- eval


def test_eval_airy():
    res = _run(["eval", "airy", "--x", "-1.5"])
    assert res.exit_code == 0
    vals = _parse_values(res.output)
    v = airy(-1.5)
    assert vals["ai"] == v.ai
    assert vals["aip"] == v.aip
    assert vals["bi"] == v.bi
    assert vals["bip"] == v.bip


def test_eval_q_and_qi():
    res = _run(["eval", "q", "--k", "2", "--rho", "0.8", "--zeta", "0.3", "--eps", "-1.0"])
    assert res.exit_code == 0
    vals = _parse_values(res.output)
    want = q(2, QArgs(0.8, 0.3, -1.0))
    assert vals["re"] == want.real
    assert vals["im"] == want.imag
    res = _run(["eval", "qi", "--k", "3", "--eps", "2.0"])
    assert res.exit_code == 0
    assert _parse_values(res.output)["value"] == qi(3, 2.0)


def test_eval_tcoeff_and_green_lm():
    res = _run(["eval", "tcoeff", "--j", "1", "--l", "2", "--m", "1"])
    assert res.exit_code == 0
    assert _parse_values(res.output)["value"] == translation_coeff_t(1, 2, 1)
    res = _run(
        ["eval", "green-lm", "--l", "1", "--m", "0", "--x-m", "1e-7",
         "--y-m", "0", "--z-m", "2e-7", "--energy-uev", "60.8"]
    )
    assert res.exit_code == 0
    vals = _parse_values(res.output)
    from ballisticwaves.ballistic import green_lm

    phys = PhysicalContext(ELECTRON_MASS, 116.0 * ELEMENTARY_CHARGE)
    want = green_lm(
        MultipoleIndex(1, 0), (1e-7, 0.0, 2e-7), 60.8e-6 * ELEMENTARY_CHARGE, phys
    )
    assert vals["re"] == want.real
    assert vals["im"] == want.imag


def test_eval_missing_options_exit_2():
    res = _run(["eval", "airy"])
    assert res.exit_code == 2
    res = _run(["eval", "q", "--k", "1"])
    assert res.exit_code == 2


def test_eval_domain_error_exit_2():
    res = _run(["eval", "airy", "--x", "500"])
    assert res.exit_code == 2


def test_eval_singularity_exit_4():
    res = _run(["eval", "q", "--k", "1", "--rho", "0", "--zeta", "0", "--eps", "0"])
    assert res.exit_code == 4


# ------------------------------------------------------- photodetach-profile


def _profile_args(tmp_path, extra=()):
    return [
        "photodetach-profile", "--grid-n", "32", "--out", str(tmp_path), *extra,
    ]


def test_photodetach_profile_outputs(tmp_path):
    res = _run(_profile_args(tmp_path))
    assert res.exit_code == 0
    for ext in ("csv", "pgm", "json"):
        assert (tmp_path / f"photodetach_pi.{ext}").exists()
    # PGM header and payload size.
    blob = (tmp_path / "photodetach_pi.pgm").read_bytes()
    header, rest = blob.split(b"\n", 1)
    assert header == b"P5"
    dims, rest = rest.split(b"\n", 1)
    assert dims == b"32 32"
    maxval, payload = rest.split(b"\n", 1)
    assert maxval == b"65535"
    assert len(payload) == 32 * 32 * 2
    img = np.frombuffer(payload, dtype=">u2").reshape(32, 32)
    assert img.max() == 65535
    # Metadata round trip.
    meta = json.loads((tmp_path / "photodetach_pi.json").read_text())
    assert meta["scenario"] == "photodetach-profile"
    assert meta["inputs"]["polarization"] == "pi"
    assert meta["inputs"]["grid_n"] == 32
    assert "out" not in meta["inputs"]
    assert meta["image_max_value"] > 0.0
    assert set(meta["files"]) == {"photodetach_pi.csv", "photodetach_pi.pgm"}
    # CSV layout: two comment lines then 32 rows of 32 values.
    lines = (tmp_path / "photodetach_pi.csv").read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert len(data) == 32
    assert len(data[0].split(",")) == 32


def test_photodetach_profile_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        res = _run(_profile_args(d))
        assert res.exit_code == 0
    assert (d1 / "photodetach_pi.csv").read_bytes() == (
        d2 / "photodetach_pi.csv"
    ).read_bytes()
    assert (d1 / "photodetach_pi.pgm").read_bytes() == (
        d2 / "photodetach_pi.pgm"
    ).read_bytes()


def test_photodetach_profile_regime_exit_3(tmp_path):
    res = _run(_profile_args(tmp_path, ("--z-m", "1e-8", "--window-m", "1e-9")))
    assert res.exit_code == 3


def test_config_overlay(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"grid-n": 16, "polarization": "sigma"}))
    res = _run(["photodetach-profile", "--config", str(cfg), "--out", str(tmp_path)])
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "photodetach_sigma.json").read_text())
    assert meta["inputs"]["grid_n"] == 16
    # Explicit CLI flags beat config values.
    res = _run(
        ["photodetach-profile", "--config", str(cfg), "--polarization", "circular",
         "--grid-n", "8", "--out", str(tmp_path)]
    )
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "photodetach_circular.json").read_text())
    assert meta["inputs"]["grid_n"] == 8


def test_config_unknown_key_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"grdi-n": 16}))
    res = _run(["photodetach-profile", "--config", str(cfg), "--out", str(tmp_path)])
    assert res.exit_code == 2
    cfg.write_text("not json")
    res = _run(["photodetach-profile", "--config", str(cfg), "--out", str(tmp_path)])
    assert res.exit_code == 2


# ------------------------------------------------------ photodetach-spectrum


def test_photodetach_spectrum_columns(tmp_path):
    res = _run(
        ["photodetach-spectrum", "--emin-uev", "-10", "--emax-uev", "50",
         "--n-points", "7", "--out", str(tmp_path)]
    )
    assert res.exit_code == 0
    lines = (tmp_path / "photodetach_spectrum.csv").read_text().splitlines()
    assert lines[0] == "E_uev,J_10_per_s,J_1pm1_per_s,J_avg_per_s"
    assert len(lines) == 8
    phys = PhysicalContext(ELECTRON_MASS, 116.0 * ELEMENTARY_CHARGE)
    uev = 1e-6 * ELEMENTARY_CHARGE
    for line in lines[1:]:
        e_uev, j10, j11, javg = (float(v) for v in line.split(","))
        i10, i11 = MultipoleIndex(1, 0), MultipoleIndex(1, 1)
        assert j10 == pytest.approx(
            total_current_matrix(i10, i10, e_uev * uev, phys), rel=1e-12
        )
        assert j11 == pytest.approx(
            total_current_matrix(i11, i11, e_uev * uev, phys), rel=1e-12
        )
        assert javg == pytest.approx(0.5 * (j10 + j11), rel=1e-12)


# ------------------------------------------------------------- atom laser


def test_atomlaser_profile_swave(tmp_path):
    res = _run(
        ["atomlaser-profile", "--source", "swave", "--grid-n", "16",
         "--out", str(tmp_path)]
    )
    assert res.exit_code == 0
    for ext in ("csv", "pgm", "json"):
        assert (tmp_path / f"atomlaser_swave.{ext}").exists()
    meta = json.loads((tmp_path / "atomlaser_swave.json").read_text())
    assert meta["inputs"]["source"] == "swave"
    assert meta["image_max_value"] > 0.0


def test_atomlaser_spectrum_matches_library(tmp_path):
    res = _run(
        ["atomlaser-spectrum", "--source", "parallel", "--dnu-min-khz", "-2",
         "--dnu-max-khz", "2", "--n-points", "5", "--out", str(tmp_path)]
    )
    assert res.exit_code == 0
    lines = (tmp_path / "atomlaser_spectrum_parallel.csv").read_text().splitlines()
    assert lines[0] == "detuning_hz,J_per_s"
    ctx = rb87_context()
    src = GaussianSource(1e6, 2.0 * math.pi * 100.0, 2e-6, MultipoleIndex(1, 1))
    for line in lines[1:]:
        dnu, jval = (float(v) for v in line.split(","))
        want = vortex_current_1m(src, 2.0 * math.pi * HBAR * dnu, ctx)
        assert jval == pytest.approx(want, rel=1e-12)


def test_atomlaser_lattice_vortex_file(tmp_path):
    vf = tmp_path / "vortices.csv"
    pos = [(0.0, 0.0), (8e-6, 0.0), (-4e-6, 6e-6)]
    vf.write_text("\n".join(f"{x:.6e},{y:.6e}" for x, y in pos) + "\n")
    res = _run(
        ["atomlaser-spectrum", "--source", "lattice", "--vortex-file", str(vf),
         "--dnu-min-khz", "0", "--dnu-max-khz", "4", "--n-points", "3",
         "--width-um", "5", "--out", str(tmp_path)]
    )
    assert res.exit_code == 0
    lines = (tmp_path / "atomlaser_spectrum_lattice.csv").read_text().splitlines()
    ctx = rb87_context()
    latt = VortexLattice(
        tuple(complex(x, y) for x, y in pos),
        2.0 * math.pi * 250.0, 5.0 * 1e-6, 1e6, 2.0 * math.pi * 100.0,
    )
    want = dict(lattice_spectrum(latt, [0.0, 2000.0, 4000.0], ctx))
    for line in lines[1:]:
        dnu, jval = (float(v) for v in line.split(","))
        assert jval == pytest.approx(want[dnu], rel=1e-12)
    # Unreadable vortex file is a config error.
    res = _run(
        ["atomlaser-spectrum", "--source", "lattice",
         "--vortex-file", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]
    )
    assert res.exit_code == 2
