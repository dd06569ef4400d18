"""Figure rendering from simulation CSV outputs.

plotkit never computes physics: it reads the documented CSV schemas,
rescales axes to display units, and draws.  A sha256 checksum of every
input CSV is embedded in the output image metadata for provenance.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("spectrum", "scan", "isolation", "delay")

SCHEMAS = {
    "spectrum": ("delta_p", "T", "R", "arg_tp"),
    "delay_spectrum": ("delta_p", "T", "R", "arg_tp", "tau_g"),
    "isolation": ("delta_p", "isolation"),
    "scan_ef": ("omega", "ef"),
    "scan_tau": ("omega", "tau_g"),
}

R_MAGNIFY_THRESHOLD = 0.01
R_MAGNIFICATION = 100


class PlotkitError(Exception):
    """Base error."""


class SchemaError(PlotkitError):
    """CSV header does not match any accepted schema for the figure kind."""


class EmptyInputError(PlotkitError):
    """CSV has a header but no data rows."""


@dataclass(frozen=True)
class Curve:
    path: str
    label: str
    style: str = "solid"  # solid | dashed | dotted | dashdot


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    output: str
    curves: tuple[Curve, ...]
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PlotkitError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.curves:
            raise PlotkitError("figure needs at least one input curve")


def load_spec(path: str | Path) -> FigureSpec:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        curves = tuple(
            Curve(path=c["path"], label=c["label"],
                  style=c.get("style", "solid"))
            for c in raw["curves"])
        return FigureSpec(
            kind=raw["kind"],
            output=raw["output"],
            curves=curves,
            x_range=tuple(raw["x_range"]) if "x_range" in raw else None,
            y_range=tuple(raw["y_range"]) if "y_range" in raw else None,
            title=raw.get("title"),
        )
    except KeyError as exc:
        raise PlotkitError(f"figure spec missing key {exc}") from None


def read_csv(path: str | Path, allowed_schemas: tuple[str, ...]
             ) -> tuple[str, dict[str, list[float]]]:
    """Read one CSV; returns (schema name, column dict)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise EmptyInputError(f"{path}: file is empty") from None
        schema = None
        for name in allowed_schemas:
            if header == SCHEMAS[name]:
                schema = name
                break
        if schema is None:
            raise SchemaError(
                f"{path}: header {','.join(header)!r} does not match any of "
                f"{[','.join(SCHEMAS[s]) for s in allowed_schemas]}")
        cols: dict[str, list[float]] = {h: [] for h in header}
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}: row with {len(row)} fields, expected "
                    f"{len(header)}")
            for h, v in zip(header, row):
                cols[h].append(float(v))
    if not cols[header[0]]:
        raise EmptyInputError(f"{path}: no data rows")
    return schema, cols


def input_checksums(curves: tuple[Curve, ...]) -> str:
    parts = []
    for c in curves:
        digest = hashlib.sha256(Path(c.path).read_bytes()).hexdigest()
        parts.append(f"{Path(c.path).name}=sha256:{digest}")
    return "; ".join(parts)


def _save(fig, spec: FigureSpec) -> str:
    meta_desc = f"inputs: {input_checksums(spec.curves)}"
    out = Path(spec.output)
    if out.suffix.lower() == ".svg":
        fig.savefig(out, format="svg", metadata={"Description": meta_desc})
    elif out.suffix.lower() == ".png":
        fig.savefig(out, format="png", metadata={"Description": meta_desc})
    else:
        raise PlotkitError(
            f"unsupported output format {out.suffix!r} (use .svg or .png)")
    plt.close(fig)
    return str(out)


def plot_spectrum(spec: FigureSpec) -> str:
    """Transmission and reflection vs probe detuning (MHz).

    Reflection curves whose maximum is below 1% are magnified x100 and
    the factor is annotated in their legend label.
    """
    if spec.kind != "spectrum":
        raise PlotkitError(f"plot_spectrum got kind {spec.kind!r}")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in spec.curves:
        _, cols = read_csv(curve.path, ("spectrum", "delay_spectrum"))
        x = [v / 1e6 for v in cols["delta_p"]]
        ax.plot(x, cols["T"], linestyle=curve.style,
                label=f"T ({curve.label})")
        r = cols["R"]
        r_max = max(r)
        if r_max == 0.0:
            continue  # nothing to draw for an exactly dark direction
        if r_max < R_MAGNIFY_THRESHOLD:
            r = [v * R_MAGNIFICATION for v in r]
            r_label = f"R x{R_MAGNIFICATION} ({curve.label})"
        else:
            r_label = f"R ({curve.label})"
        ax.plot(x, r, linestyle="dotted", label=r_label)
    _finish_axes(ax, spec, "probe detuning (MHz)", "rate")
    return _save(fig, spec)


def plot_isolation(spec: FigureSpec) -> str:
    """Transmission contrast |T_cw - T_ccw| vs probe detuning (MHz)."""
    if spec.kind != "isolation":
        raise PlotkitError(f"plot_isolation got kind {spec.kind!r}")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in spec.curves:
        _, cols = read_csv(curve.path, ("isolation",))
        x = [v / 1e6 for v in cols["delta_p"]]
        ax.plot(x, cols["isolation"], linestyle=curve.style,
                label=curve.label)
    _finish_axes(ax, spec, "probe detuning (MHz)", "isolation")
    return _save(fig, spec)


def plot_scan(spec: FigureSpec) -> str:
    """Enhancement factor or group delay vs spin-rate magnitude (kHz).

    kind = "scan" expects omega,ef columns; kind = "delay" expects
    omega,tau_g and draws the delay in microseconds.
    """
    if spec.kind not in ("scan", "delay"):
        raise PlotkitError(f"plot_scan got kind {spec.kind!r}")
    schema = "scan_ef" if spec.kind == "scan" else "scan_tau"
    y_col = "ef" if spec.kind == "scan" else "tau_g"
    y_scale = 1.0 if spec.kind == "scan" else 1e6
    y_label = "enhancement factor" if spec.kind == "scan" else (
        "group delay (us)")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in spec.curves:
        _, cols = read_csv(curve.path, (schema,))
        x = [abs(v) / 1e3 for v in cols["omega"]]
        y = [v * y_scale for v in cols[y_col]]
        ax.plot(x, y, linestyle=curve.style, label=curve.label)
    _finish_axes(ax, spec, "|spin rate| (kHz)", y_label)
    return _save(fig, spec)


def _finish_axes(ax, spec: FigureSpec, x_label: str, y_label: str) -> None:
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if spec.x_range is not None:
        ax.set_xlim(spec.x_range)
    if spec.y_range is not None:
        ax.set_ylim(spec.y_range)
    if spec.title:
        ax.set_title(spec.title)
    if len(ax.get_lines()) > 1:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)


RENDERERS = {
    "spectrum": plot_spectrum,
    "isolation": plot_isolation,
    "scan": plot_scan,
    "delay": plot_scan,
}


def render(spec: FigureSpec) -> str:
    return RENDERERS[spec.kind](spec)
