"""Command-line scenario runner producing reproducible flat-file figures.

Each subcommand evaluates a library scenario onto CSV (fixed 17-significant-
digit scientific notation), 16-bit PGM images (normalized to the per-image
maximum, which is recorded in the metadata), and a JSON metadata file that
holds every input needed to re-run the scenario.

Exit codes: 0 success, 2 configuration error, 3 regime error, 4 numerical
stability error.
"""

from __future__ import annotations

import functools
import json
import math
import pathlib
import sys

import click
import numpy as np

from . import __version__
from .atomlaser import (
    GaussianSource,
    VortexLattice,
    beam_density_grid,
    lattice_beam_grid,
    lattice_spectrum,
    farfield_density,
    rb87_context,
    triangular_vortex_positions,
)
from .airyq import QArgs, q, qi
from .ballistic import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    DetectorGrid,
    PhysicalContext,
    photodetachment_profile,
    photodetachment_spectrum,
    total_current_matrix,
    green_lm,
)
from .errors import (
    DomainError,
    RegimeError,
    SingularityError,
    StabilityError,
    UnsupportedOrderError,
)
from .harmonics import MultipoleIndex, translation_coeff_t
from .specfun import airy

_UEV = 1e-6 * ELEMENTARY_CHARGE  # 1 micro-electronvolt in joules


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    """Map library exceptions onto the documented process exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, UnsupportedOrderError) as exc:
            _fail(2, str(exc))
        except RegimeError as exc:
            _fail(3, str(exc))
        except (StabilityError, SingularityError, FloatingPointError, OverflowError) as exc:
            _fail(4, str(exc))

    return wrapper


def _apply_config(ctx: click.Context, config: str | None, params: dict) -> dict:
    """Overlay values from a JSON config file onto unset CLI options."""
    if config is None:
        return params
    try:
        with open(config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(2, f"cannot read config {config}: {exc}")
    if not isinstance(cfg, dict):
        _fail(2, f"config {config} must hold a JSON object")
    out = dict(params)
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if name not in out:
            _fail(2, f"unknown config key {key!r}")
        src = ctx.get_parameter_source(name)
        if src is None or src.name == "DEFAULT":
            out[name] = value
    return out


def _format(v: float) -> str:
    return f"{v:.16e}"


def _write_grid_outputs(outdir: str, stem: str, grid: DetectorGrid, meta: dict) -> None:
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    values = np.asarray(grid.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise StabilityError("grid evaluation produced non-finite values")
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("# row i: y = y[i]; column j: x = x[j]; value = per-pixel density\n")
        fh.write("# x: " + ",".join(_format(v) for v in grid.x) + "\n")
        fh.write("# y: " + ",".join(_format(v) for v in grid.y) + "\n")
        for row in values:
            fh.write(",".join(_format(v) for v in row) + "\n")
    vmax = float(values.max())
    scaled = np.zeros_like(values) if vmax <= 0.0 else values / vmax
    img = np.round(scaled * 65535.0).astype(">u2")
    pgm_path = out / f"{stem}.pgm"
    with open(pgm_path, "wb") as fh:
        fh.write(f"P5\n{values.shape[1]} {values.shape[0]}\n65535\n".encode())
        fh.write(img.tobytes())
    meta = dict(meta)
    meta["image_max_value"] = vmax
    meta["code_version"] = __version__
    meta["files"] = [csv_path.name, pgm_path.name]
    with open(out / f"{stem}.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_spectrum_outputs(
    outdir: str, stem: str, header: list[str], rows: list[tuple], meta: dict
) -> None:
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format(float(v)) for v in row) + "\n")
    meta = dict(meta)
    meta["code_version"] = __version__
    meta["files"] = [csv_path.name]
    with open(out / f"{stem}.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


@click.group()
def main() -> None:
    """Ballistic matter-wave scenarios: profiles and spectra as flat files."""


@main.command("photodetach-profile")
@click.option("--config", type=click.Path(), default=None, help="JSON config file.")
@click.option("--energy-uev", type=float, default=60.8, show_default=True)
@click.option("--field-vpm", type=float, default=116.0, show_default=True)
@click.option("--z-m", type=float, default=0.514, show_default=True)
@click.option("--window-m", type=float, default=1.2e-3, show_default=True)
@click.option("--grid-n", type=int, default=512, show_default=True)
@click.option(
    "--mode",
    type=click.Choice(["far-field", "exact"]),
    default="far-field",
    show_default=True,
)
@click.option(
    "--polarization",
    type=click.Choice(["pi", "sigma", "circular", "tilt45"]),
    default="pi",
    show_default=True,
)
@click.option("--out", type=click.Path(), default=".", show_default=True)
@click.pass_context
@handle_errors
def photodetach_profile(ctx, config, **params):
    """Photocurrent density image of a p-wave source on a distant detector."""
    p = _apply_config(ctx, config, params)
    phys = PhysicalContext(
        mass=ELECTRON_MASS, force=ELEMENTARY_CHARGE * float(p["field_vpm"])
    )
    energy = float(p["energy_uev"]) * _UEV
    grid = DetectorGrid.centered(
        float(p["z_m"]), float(p["window_m"]), float(p["window_m"]),
        int(p["grid_n"]), int(p["grid_n"]),
    )
    result = photodetachment_profile(p["polarization"], grid, energy, phys, mode=p["mode"])
    meta = {
        "scenario": "photodetach-profile",
        "inputs": {k: p[k] for k in sorted(p) if k != "out"},
        "beta_per_joule": phys.beta,
        "eps": phys.eps(energy),
        "alpha_minus_center": phys.qargs((0.0, 0.0, grid.z), energy).alpha_minus,
    }
    _write_grid_outputs(p["out"], f"photodetach_{p['polarization']}", result, meta)
    click.echo(f"wrote photodetach_{p['polarization']}.[csv,pgm,json] to {p['out']}")


@main.command("photodetach-spectrum")
@click.option("--config", type=click.Path(), default=None, help="JSON config file.")
@click.option("--field-vpm", type=float, default=116.0, show_default=True)
@click.option("--emin-uev", type=float, default=-30.0, show_default=True)
@click.option("--emax-uev", type=float, default=150.0, show_default=True)
@click.option("--n-points", type=int, default=601, show_default=True)
@click.option("--out", type=click.Path(), default=".", show_default=True)
@click.pass_context
@handle_errors
def photodetach_spectrum(ctx, config, **params):
    """Total p-wave photocurrent versus energy (staircase spectrum)."""
    p = _apply_config(ctx, config, params)
    phys = PhysicalContext(
        mass=ELECTRON_MASS, force=ELEMENTARY_CHARGE * float(p["field_vpm"])
    )
    energies = np.linspace(
        float(p["emin_uev"]) * _UEV, float(p["emax_uev"]) * _UEV, int(p["n_points"])
    )
    rows = []
    i10 = MultipoleIndex(1, 0)
    i11 = MultipoleIndex(1, 1)
    for energy in energies:
        j10 = total_current_matrix(i10, i10, float(energy), phys)
        j11 = total_current_matrix(i11, i11, float(energy), phys)
        rows.append((energy / _UEV, j10, j11, 0.5 * (j10 + j11)))
    meta = {
        "scenario": "photodetach-spectrum",
        "inputs": {k: p[k] for k in sorted(p) if k != "out"},
        "beta_per_joule": phys.beta,
    }
    _write_spectrum_outputs(
        p["out"], "photodetach_spectrum",
        ["E_uev", "J_10_per_s", "J_1pm1_per_s", "J_avg_per_s"], rows, meta,
    )
    click.echo(f"wrote photodetach_spectrum.[csv,json] to {p['out']}")


def _lattice_from(p) -> VortexLattice:
    if p["vortex_file"] is not None:
        try:
            rows = np.loadtxt(p["vortex_file"], delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise DomainError(f"cannot read vortex file {p['vortex_file']}: {exc}")
        positions = tuple(complex(x, y) for x, y in rows)
    else:
        positions = triangular_vortex_positions(3, 10e-6)
    return VortexLattice(
        positions=positions,
        rot=2.0 * math.pi * float(p["rot_hz"]),
        width=float(p["width_um"]) * 1e-6,
        n_atoms=float(p["n_atoms"]),
        rabi=2.0 * math.pi * float(p["rabi_hz"]),
    )


_SOURCE_CHOICES = ["swave", "parallel", "m0", "perpendicular", "lattice"]


@main.command("atomlaser-profile")
@click.option("--config", type=click.Path(), default=None, help="JSON config file.")
@click.option("--source", type=click.Choice(_SOURCE_CHOICES), default="parallel", show_default=True)
@click.option("--detuning-khz", type=float, default=0.0, show_default=True)
@click.option("--z-m", type=float, default=1e-3, show_default=True)
@click.option("--window-m", type=float, default=30e-6, show_default=True)
@click.option("--grid-n", type=int, default=512, show_default=True)
@click.option("--width-um", type=float, default=2.0, show_default=True)
@click.option("--rabi-hz", type=float, default=100.0, show_default=True)
@click.option("--n-atoms", type=float, default=1e6, show_default=True)
@click.option("--rot-hz", type=float, default=250.0, show_default=True)
@click.option("--time-s", type=float, default=0.0, show_default=True)
@click.option("--vortex-file", type=click.Path(), default=None,
              help="CSV of x,y vortex positions (m); lattice source only.")
@click.option("--mode", type=click.Choice(["exact", "closed-form"]),
              default="exact", show_default=True)
@click.option("--out", type=click.Path(), default=".", show_default=True)
@click.pass_context
@handle_errors
def atomlaser_profile(ctx, config, **params):
    """Atom-laser beam density on a plane below the condensate."""
    p = _apply_config(ctx, config, params)
    phys = rb87_context()
    energy = 2.0 * math.pi * HBAR * float(p["detuning_khz"]) * 1e3
    grid = DetectorGrid.centered(
        float(p["z_m"]), float(p["window_m"]), float(p["window_m"]),
        int(p["grid_n"]), int(p["grid_n"]),
    )
    source = p["source"]
    width = float(p["width_um"]) * 1e-6
    rabi = 2.0 * math.pi * float(p["rabi_hz"])
    if source == "lattice":
        latt = _lattice_from(p)
        result = lattice_beam_grid(latt, grid, float(p["time_s"]), energy, phys)
    elif p["mode"] == "closed-form" and source in ("parallel", "perpendicular"):
        src = GaussianSource(float(p["n_atoms"]), rabi, width, MultipoleIndex(1, 1))
        orientation = "parallel" if source == "parallel" else "perpendicular"
        result = farfield_density(src, grid, energy, phys, orientation, "closed-form")
    else:
        idx = {
            "swave": MultipoleIndex(0, 0),
            "parallel": MultipoleIndex(1, 1),
            "m0": MultipoleIndex(1, 0),
            "perpendicular": MultipoleIndex(1, 1),
        }[source]
        src = GaussianSource(float(p["n_atoms"]), rabi, width, idx)
        orientation = "perpendicular" if source == "perpendicular" else None
        result = beam_density_grid(src, grid, energy, phys, orientation)
    meta = {
        "scenario": "atomlaser-profile",
        "inputs": {k: p[k] for k in sorted(p) if k != "out"},
        "beta_per_joule": phys.beta,
        "eps": phys.eps(energy),
        "alpha_minus_center": phys.qargs((0.0, 0.0, grid.z), energy).alpha_minus,
    }
    _write_grid_outputs(p["out"], f"atomlaser_{source}", result, meta)
    click.echo(f"wrote atomlaser_{source}.[csv,pgm,json] to {p['out']}")


@main.command("atomlaser-spectrum")
@click.option("--config", type=click.Path(), default=None, help="JSON config file.")
@click.option("--source", type=click.Choice(_SOURCE_CHOICES), default="parallel", show_default=True)
@click.option("--dnu-min-khz", type=float, default=-10.0, show_default=True)
@click.option("--dnu-max-khz", type=float, default=10.0, show_default=True)
@click.option("--n-points", type=int, default=201, show_default=True)
@click.option("--width-um", type=float, default=2.0, show_default=True)
@click.option("--rabi-hz", type=float, default=100.0, show_default=True)
@click.option("--n-atoms", type=float, default=1e6, show_default=True)
@click.option("--rot-hz", type=float, default=250.0, show_default=True)
@click.option("--vortex-file", type=click.Path(), default=None,
              help="CSV of x,y vortex positions (m); lattice source only.")
@click.option("--out", type=click.Path(), default=".", show_default=True)
@click.pass_context
@handle_errors
def atomlaser_spectrum(ctx, config, **params):
    """Outcoupling rate versus rf detuning."""
    from .atomlaser import gaussian_multipole_current, perp_vortex_current, vortex_current_1m

    p = _apply_config(ctx, config, params)
    phys = rb87_context()
    detunings = np.linspace(
        float(p["dnu_min_khz"]) * 1e3, float(p["dnu_max_khz"]) * 1e3, int(p["n_points"])
    )
    source = p["source"]
    width = float(p["width_um"]) * 1e-6
    rabi = 2.0 * math.pi * float(p["rabi_hz"])
    n_atoms = float(p["n_atoms"])
    if source == "lattice":
        latt = _lattice_from(p)
        rows = lattice_spectrum(latt, detunings, phys)
    else:
        rows = []
        for dnu in detunings:
            energy = 2.0 * math.pi * HBAR * float(dnu)
            if source == "swave":
                j = gaussian_multipole_current(0, n_atoms, rabi, width, energy, phys)
            elif source == "perpendicular":
                j = perp_vortex_current(
                    GaussianSource(n_atoms, rabi, width, MultipoleIndex(1, 1)),
                    energy, phys,
                )
            else:
                m = 1 if source == "parallel" else 0
                j = vortex_current_1m(
                    GaussianSource(n_atoms, rabi, width, MultipoleIndex(1, m)),
                    energy, phys,
                )
            rows.append((float(dnu), j))
    meta = {
        "scenario": "atomlaser-spectrum",
        "inputs": {k: p[k] for k in sorted(p) if k != "out"},
        "beta_per_joule": phys.beta,
    }
    _write_spectrum_outputs(
        p["out"], f"atomlaser_spectrum_{source}",
        ["detuning_hz", "J_per_s"], rows, meta,
    )
    click.echo(f"wrote atomlaser_spectrum_{source}.[csv,json] to {p['out']}")


@main.command("eval")
@click.argument("function", type=click.Choice(["airy", "q", "qi", "tcoeff", "green-lm"]))
@click.option("--x", type=float, default=None, help="Argument for airy.")
@click.option("--k", type=int, default=None, help="Index for q / qi.")
@click.option("--rho", type=float, default=None)
@click.option("--zeta", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--j", type=int, default=None, help="Index for tcoeff.")
@click.option("--l", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--x-m", type=float, default=None, help="Field point x (m) for green-lm.")
@click.option("--y-m", type=float, default=None)
@click.option("--z-m", type=float, default=None)
@click.option("--energy-uev", type=float, default=None)
@click.option("--field-vpm", type=float, default=116.0, show_default=True)
@handle_errors
def eval_function(function, x, k, rho, zeta, eps, j, l, m, x_m, y_m, z_m, energy_uev, field_vpm):
    """Evaluate a library function directly (scripting and debugging)."""

    def need(**kv):
        missing = [name for name, val in kv.items() if val is None]
        if missing:
            _fail(2, f"{function} requires --{', --'.join(missing)}")

    if function == "airy":
        need(x=x)
        v = airy(x)
        click.echo(f"airy x={_format(x)}")
        for name, val in [("ai", v.ai), ("aip", v.aip), ("bi", v.bi), ("bip", v.bip)]:
            click.echo(f"{name} = {_format(val)}")
    elif function == "q":
        need(k=k, rho=rho, zeta=zeta, eps=eps)
        val = q(k, QArgs(rho, zeta, eps))
        click.echo(f"q k={k} rho={_format(rho)} zeta={_format(zeta)} eps={_format(eps)}")
        click.echo(f"re = {_format(val.real)}")
        click.echo(f"im = {_format(val.imag)}")
    elif function == "qi":
        need(k=k, eps=eps)
        val = qi(k, eps)
        click.echo(f"qi k={k} eps={_format(eps)}")
        click.echo(f"value = {_format(val)}")
    elif function == "tcoeff":
        need(j=j, l=l, m=m)
        val = translation_coeff_t(j, l, m)
        click.echo(f"tcoeff j={j} l={l} m={m}")
        click.echo(f"value = {_format(val)}")
    else:  # green-lm
        need(l=l, m=m, x_m=x_m, y_m=y_m, z_m=z_m, energy_uev=energy_uev)
        phys = PhysicalContext(mass=ELECTRON_MASS, force=ELEMENTARY_CHARGE * field_vpm)
        val = green_lm(
            MultipoleIndex(l, m), (x_m, y_m, z_m), energy_uev * _UEV, phys
        )
        click.echo(
            f"green-lm l={l} m={m} r=({_format(x_m)},{_format(y_m)},{_format(z_m)}) "
            f"E_uev={_format(energy_uev)} field_vpm={_format(field_vpm)}"
        )
        click.echo(f"re = {_format(val.real)}")
        click.echo(f"im = {_format(val.imag)}")


if __name__ == "__main__":
    main()
