"""CSV and SVG artifact emitters.

All CSVs are comma-separated with a header row; '#'-prefixed metadata lines
may precede the header.  SVGs are generated directly from polyline/line
primitives so no plotting package is required.
"""

import csv

import numpy as np


# ---------------------------------------------------------------------------
# CSV

def write_mode_table_csv(table, path, value_name="abar"):
    """Rows m = 1..M, one column per wavenumber (Table-style layout)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m"] + [f"{value_name}(k={k:g})" for k in table.kvals])
        data = getattr(table, "amps", None)
        if data is None:
            data = table.freqs
        for m in range(data.shape[0]):
            writer.writerow([m + 1] + [f"{x:.10g}" for x in data[m]])


def write_energy_history_csv(series, kgrid_pos, path, meta=None):
    """Rows (t, E(k_0), ..., E(k_J)) over the non-negative wavenumbers."""
    with open(path, "w", newline="") as fh:
        if meta:
            for key, val in meta.items():
                fh.write(f"# {key}: {val}\n")
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"E(k={k:g})" for k in kgrid_pos])
        for t, e in zip(series.energy_t, series.energy_e):
            writer.writerow([f"{t:.10g}"] + [f"{x:.10g}" for x in e])


def write_sigma_curve_csv(kvals, sigmas, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "sigma"])
        for k, s in zip(kvals, sigmas):
            writer.writerow([f"{k:.10g}", f"{s:.10g}"])


def write_field_csv(r, z, ur, uz, path, meta=None):
    """Rows (r, z, u_r, u_z) over the mesh (r fast along columns)."""
    with open(path, "w", newline="") as fh:
        if meta:
            for key, val in meta.items():
                fh.write(f"# {key}: {val}\n")
        writer = csv.writer(fh)
        writer.writerow(["r", "z", "u_r", "u_z"])
        for i, ri in enumerate(r):
            for j, zj in enumerate(z):
                writer.writerow([f"{ri:.10g}", f"{zj:.10g}",
                                 f"{ur[i, j]:.10g}", f"{uz[i, j]:.10g}"])


def write_resonances_csv(resonances, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "k_in", "k_out", "freq_residual"])
        for res in resonances:
            writer.writerow([res.kind, "+".join(f"{k:g}" for k in res.k_in),
                             f"{res.k_out:g}", f"{res.residual:.3e}"])


def write_sensitivity_csv(rep, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dt_a", "dt_b", "t_div", "max_rel_separation"])
        for (da, db), td in sorted(rep.t_div.items()):
            writer.writerow([f"{da:g}", f"{db:g}",
                             "" if td is None else f"{td:g}",
                             f"{rep.max_separation[(da, db)]:.6e}"])


# ---------------------------------------------------------------------------
# SVG

_SVG_HEAD = ('<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             'viewBox="0 0 {w} {h}">\n<rect width="{w}" height="{h}" fill="white"/>\n')

_COLORS = ["#1f3b99", "#b02418", "#1a7a2e", "#8a5a00", "#6a2d8f",
           "#006d77", "#99321f", "#444444"]


def _axes(width, height, margin):
    x0, y0 = margin, height - margin
    x1, y1 = width - margin, margin
    return (f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>\n'
            f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>\n')


def svg_curves(path, x, curves, labels=None, width=720, height=480,
               logy=False, title="", xlabel="", ylabel=""):
    """Multi-curve polyline plot; curves is a list of y-arrays over shared x."""
    margin = 60
    x = np.asarray(x, dtype=float)
    ys = []
    for y in curves:
        y = np.asarray(y, dtype=float)
        if logy:
            y = np.log10(np.maximum(np.abs(y), 1e-300))
        ys.append(y)
    ally = np.concatenate(ys)
    ylo, yhi = float(ally.min()), float(ally.max())
    if yhi - ylo < 1e-12:
        yhi = ylo + 1.0
    xlo, xhi = float(x.min()), float(x.max())
    if xhi - xlo < 1e-12:
        xhi = xlo + 1.0

    def sx(v):
        return margin + (v - xlo) / (xhi - xlo) * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - ylo) / (yhi - ylo) * (height - 2 * margin)

    parts = [_SVG_HEAD.format(w=width, h=height), _axes(width, height, margin)]
    if title:
        parts.append(f'<text x="{width / 2}" y="24" text-anchor="middle" '
                     f'font-size="16">{title}</text>\n')
    if xlabel:
        parts.append(f'<text x="{width / 2}" y="{height - 16}" text-anchor="middle" '
                     f'font-size="13">{xlabel}</text>\n')
    if ylabel:
        lab = ("log10 " + ylabel) if logy else ylabel
        parts.append(f'<text x="18" y="{height / 2}" text-anchor="middle" font-size="13" '
                     f'transform="rotate(-90 18 {height / 2})">{lab}</text>\n')
    for i, y in enumerate(ys):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>\n')
        if labels:
            parts.append(f'<text x="{width - margin + 6}" '
                         f'y="{sy(y[-1]):.2f}" font-size="12" '
                         f'fill="{color}">{labels[i]}</text>\n')
    # axis extent ticks
    for v, anchor in ((xlo, "start"), (xhi, "end")):
        parts.append(f'<text x="{sx(v):.2f}" y="{height - margin + 18}" '
                     f'text-anchor="{anchor}" font-size="11">{v:.4g}</text>\n')
    for v in (ylo, yhi):
        parts.append(f'<text x="{margin - 6}" y="{sy(v) + 4:.2f}" text-anchor="end" '
                     f'font-size="11">{v:.4g}</text>\n')
    parts.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("".join(parts))


def svg_quiver(path, r, z, ur, uz, width=560, height=560, title="",
               max_arrow=None):
    """Arrow plot of (u_r, u_z) on the (z, r) plane (z horizontal, r vertical)."""
    margin = 50
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    speed = np.hypot(ur, uz)
    vmax = float(speed.max())
    if vmax <= 0:
        vmax = 1.0
    # target arrow length: one mesh spacing
    dzp = (width - 2 * margin) / max(len(z) - 1, 1)
    drp = (height - 2 * margin) / max(len(r) - 1, 1)
    scale = (max_arrow or min(dzp, drp)) / vmax

    def sx(v):
        return margin + (v - z[0]) / max(z[-1] - z[0], 1e-300) * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - r[0]) / max(r[-1] - r[0], 1e-300) * (height - 2 * margin)

    parts = [_SVG_HEAD.format(w=width, h=height), _axes(width, height, margin)]
    if title:
        parts.append(f'<text x="{width / 2}" y="24" text-anchor="middle" '
                     f'font-size="15">{title}</text>\n')
    stride_r = max(1, len(r) // 32)
    stride_z = max(1, len(z) // 32)
    for i in range(0, len(r), stride_r):
        for j in range(0, len(z), stride_z):
            x0, y0 = sx(z[j]), sy(r[i])
            dx = uz[i, j] * scale
            dy = -ur[i, j] * scale
            x1, y1 = x0 + dx, y0 + dy
            parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" '
                         f'y2="{y1:.2f}" stroke="#1f3b99" stroke-width="1"/>\n')
            # small head: dot at the tip
            parts.append(f'<circle cx="{x1:.2f}" cy="{y1:.2f}" r="1.2" '
                         f'fill="#1f3b99"/>\n')
    parts.append(f'<text x="{width / 2}" y="{height - 14}" text-anchor="middle" '
                 f'font-size="12">z</text>\n')
    parts.append(f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
                 f'transform="rotate(-90 16 {height / 2})">r</text>\n')
    parts.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("".join(parts))
