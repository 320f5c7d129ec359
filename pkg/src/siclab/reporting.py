"""Report emission: CSV tables, a metadata sidecar, and rendered figures.

Floats are written with repr so a round-trip parse recovers them
exactly; the sidecar holds the config echo, the seed, and the tool
version, with no timestamps, so identical runs produce identical bytes.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")  # file output only, no display server

import matplotlib.pyplot as plt

from . import __version__


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def emit_csv(rows, path: str, axis_name: str = "swept_value",
             estimate_names=None) -> str:
    """Write one ResultRow per line; empty rows give a header-only file."""
    if estimate_names is None:
        estimate_names = list(rows[0].estimates) if rows else []
    header = [axis_name]
    for name in estimate_names:
        header.extend((name, name + "_se"))
    header.extend(("reference", "trials"))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            cells = [_cell(row.swept_value)]
            for name in estimate_names:
                cells.append(_cell(row.estimates[name]))
                cells.append(_cell(row.std_errors[name]))
            cells.append(_cell(row.reference))
            cells.append(str(row.trials))
            writer.writerow(cells)
    return path


def write_meta(path: str, config_text: str, master_seed: int) -> str:
    lines = [f"tool: siclab {__version__}",
             f"master_seed: {master_seed}",
             "config:"]
    lines.extend("  " + line for line in config_text.splitlines())
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    return path


def render_figure(rows, path: str, axis_name: str = "swept_value",
                  estimate_names=None, title: str = "") -> str:
    """Point estimates with error bars against the sweep axis, with the
    analytic reference drawn as a horizontal line."""
    if estimate_names is None:
        estimate_names = list(rows[0].estimates) if rows else []
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [row.swept_value if row.swept_value is not None else i
          for i, row in enumerate(rows)]
    for name in estimate_names:
        ys = [row.estimates[name] for row in rows]
        errs = [row.std_errors[name] for row in rows]
        ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, label=name)
    if rows:
        ax.axhline(rows[0].reference, linestyle="--", color="gray",
                   label="reference")
    ax.set_xlabel(axis_name)
    ax.legend(loc="best", fontsize="small")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(rows, out_dir: str, stem: str, axis_name: str,
                 estimate_names, config_text: str, master_seed: int) -> dict:
    """Emit {stem}.csv, {stem}.png, and meta.txt under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    paths["csv"] = emit_csv(rows, os.path.join(out_dir, stem + ".csv"),
                            axis_name, estimate_names)
    paths["meta"] = write_meta(os.path.join(out_dir, "meta.txt"),
                               config_text, master_seed)
    if rows:
        paths["figure"] = render_figure(
            rows, os.path.join(out_dir, stem + ".png"), axis_name,
            estimate_names, title=stem)
    return paths
