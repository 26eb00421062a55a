"""Render trap-analysis figures from sweep CSV files.

Figures consume only the CSV and annotation files emitted by the vortexlev
CLI; there is no physics recomputation here. Supported layouts:

  fig1   trap depth vs size parameter (GB), with resonance dashed lines
  fig3   trap depth vs size parameter, counterpropagating pair
  fig4   trap depth vs size parameter, single dark beam
  fig5   transverse potential profiles, one curve per wavelength
  fig6   trap depth vs size parameter (RVB)
  fig7   oscillation frequencies and recoil rates vs a reference trap
  fig8   same layout as fig7 (single-beam comparison)
  fig9   same layout as fig7 (two-material comparison)
  fig10  bulk temperature vs size parameter with the melting band

Outputs are vector images; rendering is deterministic (no embedded
timestamps, fixed hash salt).
"""

from __future__ import annotations

import argparse
import csv

import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figures"

import matplotlib.pyplot as plt
import numpy as np

RESULT_COLUMNS = ["kR", "R_nm", "z_eq_um", "dUx_kT", "dUy_kT", "dUz_kT",
                  "fx_kHz", "fy_kHz", "fz_kHz", "Gx_per_s", "Gy_per_s",
                  "Gz_per_s", "T_K", "flags"]
PROFILE_COLUMNS = ["position_um", "U_kT", "axis", "kR", "wavelength_nm"]
ANNOTATION_COLUMNS = ["family", "order", "kR"]

MELTING_K = 1680.0
FAMILY_STYLE = {"paper-TM": dict(color="black"), "paper-TE": dict(color="#8B4513")}

SUPPORTED_FIGURES = ("fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
                     "fig9", "fig10")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    data_dir: Path
    out_path: Path
    annotations: Path | None = None
    reference_dir: Path | None = None
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in SUPPORTED_FIGURES:
            raise SchemaError(f"unknown figure id {self.figure_id!r} "
                              f"(supported: {', '.join(SUPPORTED_FIGURES)})")
        if not Path(self.data_dir).is_dir():
            raise SchemaError(f"data directory not found: {self.data_dir}")


def read_table(path: Path, expected: list[str]) -> dict[str, np.ndarray]:
    """CSV into column arrays, validating the schema by column name."""
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        names = reader.fieldnames or []
        missing = [c for c in expected if c not in names]
        if missing:
            raise SchemaError(f"{path.name} is missing column(s): "
                              f"{', '.join(missing)}")
        rows = list(reader)
    out: dict[str, np.ndarray] = {}
    for c in expected:
        if c in ("flags", "axis", "family"):
            out[c] = np.array([r[c] for r in rows], dtype=object)
        else:
            out[c] = np.array([float(r[c]) for r in rows])
    return out


def _watermark_if_empty(ax, table) -> bool:
    if len(next(iter(table.values()))) == 0:
        ax.text(0.5, 0.5, "no data", transform=ax.transAxes,
                ha="center", va="center", fontsize=18, alpha=0.35)
        return True
    return False


def _draw_annotations(ax, spec: FigureSpec):
    if spec.annotations is None:
        return
    table = read_table(Path(spec.annotations), ANNOTATION_COLUMNS)
    for family, kr in zip(table["family"], table["kR"]):
        style = FAMILY_STYLE.get(str(family), dict(color="gray"))
        ax.axvline(kr, linestyle="--", linewidth=0.8, alpha=0.8, **style)


def _depth_figure(spec: FigureSpec, title: str):
    table = read_table(Path(spec.data_dir) / "trap.csv", RESULT_COLUMNS)
    fig, (ax_a, ax_b) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    if not _watermark_if_empty(ax_a, table):
        kr = table["kR"]
        for col, label in (("dUx_kT", r"$\Delta U_x$"),
                           ("dUy_kT", r"$\Delta U_y$"),
                           ("dUz_kT", r"$\Delta U_z$")):
            ax_a.plot(kr, table[col], label=label)
        ax_a.axhline(0.0, color="gray", linewidth=0.6)
        ax_a.legend(loc="best", fontsize=8)
        # zoomed transverse panel
        for col in ("dUx_kT", "dUy_kT"):
            ax_b.plot(kr, table[col])
        finite = table["dUx_kT"][np.isfinite(table["dUx_kT"])]
        if finite.size:
            lim = np.percentile(np.abs(finite), 75) + 1e-9
            ax_b.set_ylim(-1.5 * lim, 1.5 * lim)
        ax_b.axhline(0.0, color="gray", linewidth=0.6)
    for ax in (ax_a, ax_b):
        _draw_annotations(ax, spec)
    ax_a.set_ylabel(r"$\Delta U\ /\ k_B T_0$")
    ax_b.set_ylabel(r"transverse $\Delta U\ /\ k_B T_0$ (zoom)")
    ax_b.set_xlabel(r"size parameter $kR$")
    ax_a.set_title(title)
    return fig


def _profile_figure(spec: FigureSpec):
    table = read_table(Path(spec.data_dir) / "profiles.csv", PROFILE_COLUMNS)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    if not _watermark_if_empty(ax, table):
        for lam in sorted(set(table["wavelength_nm"])):
            sel = table["wavelength_nm"] == lam
            ax.plot(table["position_um"][sel], table["U_kT"][sel],
                    label=f"{lam:.0f} nm")
        ax.legend(title="wavelength", fontsize=8)
    ax.set_xlabel(r"transverse position [$\mu$m]")
    ax.set_ylabel(r"$U\ /\ k_B T_0$")
    ax.set_title("transverse potential vs wavelength")
    return fig


def _comparison_figure(spec: FigureSpec, title: str):
    if spec.reference_dir is None:
        raise SchemaError(f"{spec.figure_id} needs --ref (reference sweep directory)")
    main = read_table(Path(spec.data_dir) / "recoil.csv", RESULT_COLUMNS)
    ref = read_table(Path(spec.reference_dir) / "recoil.csv", RESULT_COLUMNS)
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True)
    (ax_f, ax_fr), (ax_g, ax_gr) = axes
    if not _watermark_if_empty(ax_f, main):
        kr = main["kR"]
        for col, label in (("fx_kHz", r"$\Omega_x/2\pi$"),
                           ("fz_kHz", r"$\Omega_z/2\pi$")):
            ax_f.plot(kr, main[col], label=f"{label}")
            ax_f.plot(ref["kR"], ref[col], linestyle=":", label=f"{label} (ref)")
        ax_f.legend(fontsize=7)
        ref_on_kr = {c: np.interp(kr, ref["kR"], ref[c]) for c in
                     ("fx_kHz", "fz_kHz", "Gx_per_s", "Gz_per_s")}
        with np.errstate(divide="ignore", invalid="ignore"):
            ax_fr.plot(kr, main["fx_kHz"] / ref_on_kr["fx_kHz"], label="x")
            ax_fr.plot(kr, main["fz_kHz"] / ref_on_kr["fz_kHz"], label="z")
            ax_g.semilogy(kr, main["Gx_per_s"], label=r"$\Gamma_x$")
            ax_g.semilogy(kr, main["Gz_per_s"], label=r"$\Gamma_z$")
            ax_g.semilogy(ref["kR"], ref["Gx_per_s"], linestyle=":")
            ax_g.semilogy(ref["kR"], ref["Gz_per_s"], linestyle=":")
            ax_gr.plot(kr, main["Gx_per_s"] / ref_on_kr["Gx_per_s"], label="x")
            ax_gr.plot(kr, main["Gz_per_s"] / ref_on_kr["Gz_per_s"], label="z")
        ax_fr.axhline(1.0, color="gray", linewidth=0.6)
        ax_gr.axhline(1.0, color="gray", linewidth=0.6)
        ax_fr.legend(fontsize=7)
        ax_gr.legend(fontsize=7)
    for ax in axes.ravel():
        _draw_annotations(ax, spec)
    ax_f.set_ylabel("frequency [kHz]")
    ax_fr.set_ylabel("frequency ratio")
    ax_g.set_ylabel(r"$\Gamma$ [1/s]")
    ax_gr.set_ylabel(r"$\Gamma$ ratio")
    for ax in (ax_g, ax_gr):
        ax.set_xlabel(r"size parameter $kR$")
    fig.suptitle(title)
    return fig


def _temperature_figure(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6, 4.2))
    data_dir = Path(spec.data_dir)
    candidates = sorted(data_dir.glob("thermal*.csv")) or [data_dir / "thermal.csv"]
    drew = False
    for path in candidates:
        table = read_table(path, RESULT_COLUMNS)
        if len(table["kR"]) == 0:
            continue
        ax.semilogy(table["kR"], table["T_K"], label=path.stem)
        drew = True
    if not drew:
        ax.text(0.5, 0.5, "no data", transform=ax.transAxes,
                ha="center", va="center", fontsize=18, alpha=0.35)
    # melting band
    top = ax.get_ylim()[1]
    ax.axhspan(MELTING_K, max(3 * MELTING_K, top), color="0.8", alpha=0.6,
               zorder=0, label="melting")
    _draw_annotations(ax, spec)
    if drew:
        ax.legend(fontsize=8)
    ax.set_xlabel(r"size parameter $kR$")
    ax.set_ylabel("bulk temperature [K]")
    return fig


def build_figure(spec: FigureSpec):
    """Matplotlib Figure for the requested layout (no file output)."""
    if spec.figure_id == "fig1":
        return _depth_figure(spec, "trap depth, Gaussian beam")
    if spec.figure_id == "fig3":
        return _depth_figure(spec, "trap depth, counterpropagating pair")
    if spec.figure_id == "fig4":
        return _depth_figure(spec, "trap depth, single dark beam")
    if spec.figure_id == "fig5":
        return _profile_figure(spec)
    if spec.figure_id == "fig6":
        return _depth_figure(spec, "trap depth, radial beam")
    if spec.figure_id == "fig7":
        return _comparison_figure(spec, "counterpropagating pair vs reference")
    if spec.figure_id == "fig8":
        return _comparison_figure(spec, "radial beam vs reference")
    if spec.figure_id == "fig9":
        return _comparison_figure(spec, "two-material comparison")
    if spec.figure_id == "fig10":
        return _temperature_figure(spec)
    raise SchemaError(f"unknown figure id {spec.figure_id!r}")


def render(spec: FigureSpec) -> Path:
    """Render the figure to spec.out_path (vector format from the suffix)."""
    fig = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata=_no_timestamp_metadata(out.suffix))
    plt.close(fig)
    return out


def _no_timestamp_metadata(suffix: str) -> dict:
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return {}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Regenerate trap-analysis figures from sweep CSV data")
    parser.add_argument("figure_id", choices=SUPPORTED_FIGURES)
    parser.add_argument("--data", required=True, help="sweep output directory")
    parser.add_argument("--out", required=True, help="output image path (.svg/.pdf)")
    parser.add_argument("--annotations", default=None,
                        help="resonance annotation CSV (family,order,kR)")
    parser.add_argument("--ref", default=None,
                        help="reference sweep directory (fig7/fig8/fig9)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(args.figure_id, Path(args.data), Path(args.out),
                          annotations=Path(args.annotations) if args.annotations else None,
                          reference_dir=Path(args.ref) if args.ref else None)
        out = render(spec)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
