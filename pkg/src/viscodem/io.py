"""Serialization of simulation records: per-step field CSVs, surface CSVs,
loss histories, legacy-format VTK point clouds, and parameter snapshots.

Field CSV columns (the documented schema consumed by external tooling):
  cartesian:    x,y,u_x,u_y,sig_xx,sig_yy,sig_xy,sig_zz
  cylindrical:  r,theta,u_r,u_theta,sig_rr,sig_tt,sig_rt,sig_zz
growth runs append g_r,g_theta.  Surface CSVs share the schema.  run.json
records scenario metadata, the column list, surface-set names, and the
time grid; steps.csv and loss_history.csv carry per-step summaries and
per-iteration energies.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

FIELD_KEYS = ("u1", "u2", "s11", "s22", "s12", "s33")
CART_COLS = ("x", "y", "u_x", "u_y", "sig_xx", "sig_yy", "sig_xy", "sig_zz")
CYL_COLS = ("r", "theta", "u_r", "u_theta", "sig_rr", "sig_tt", "sig_rt", "sig_zz")


def field_columns(coordinate_tag: str, with_growth: bool) -> list:
    cols = list(CART_COLS if coordinate_tag == "cartesian" else CYL_COLS)
    if with_growth:
        cols += ["g_r", "g_theta"]
    return cols


def _field_matrix(record, step, rows: slice):
    cols = [record.coords[rows, 0], record.coords[rows, 1]]
    cols += [step.fields[k][rows] for k in FIELD_KEYS]
    if step.growth is not None:
        cols += [step.growth["g_r"][rows], step.growth["g_theta"][rows]]
    return np.column_stack(cols)


def _write_csv(path: Path, header: list, matrix: np.ndarray):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in matrix:
            w.writerow([f"{v:.17g}" for v in row])


def write_vtk_points(path: Path, coords_xy: np.ndarray, point_data: dict,
                     vectors: dict | None = None, title: str = "viscodem fields"):
    """Legacy-format ASCII VTK point cloud (POLYDATA with VERTICES)."""
    n = len(coords_xy)
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(title + "\n")
        f.write("ASCII\nDATASET POLYDATA\n")
        f.write(f"POINTS {n} double\n")
        for x, y in coords_xy:
            f.write(f"{x:.12g} {y:.12g} 0.0\n")
        f.write(f"VERTICES {n} {2 * n}\n")
        for i in range(n):
            f.write(f"1 {i}\n")
        f.write(f"POINT_DATA {n}\n")
        for name, vals in point_data.items():
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            for v in vals:
                f.write(f"{v:.12g}\n")
        for name, vecs in (vectors or {}).items():
            f.write(f"VECTORS {name} double\n")
            for vx, vy in vecs:
                f.write(f"{vx:.12g} {vy:.12g} 0.0\n")


def _to_xy(record, rows: slice):
    """Physical xy coordinates and cartesian displacement for VTK output."""
    c1 = record.coords[rows, 0]
    c2 = record.coords[rows, 1]
    if record.coordinate_tag == "cartesian":
        return np.column_stack([c1, c2]), None
    x = c1 * np.cos(c2)
    y = c1 * np.sin(c2)
    return np.column_stack([x, y]), (np.cos(c2), np.sin(c2))


def write_run(record, outdir, fields: bool = True, vtk: bool = True, every: int = 1):
    """Serialize a SimulationRecord under outdir; returns the Path."""
    out = Path(outdir)
    (out / "fields").mkdir(parents=True, exist_ok=True)
    (out / "surfaces").mkdir(exist_ok=True)
    if vtk:
        (out / "vtk").mkdir(exist_ok=True)

    with_growth = record.steps[0].growth is not None
    cols = field_columns(record.coordinate_tag, with_growth)
    surface_sets = [k for k in record.row_slices if k != "volume"]

    meta = {
        "scenario": record.scenario,
        "coordinate_tag": record.coordinate_tag,
        "columns": cols,
        "surface_sets": surface_sets,
        "times": [float(s.t) for s in record.steps],
        "fields_pattern": "fields/step_{index:04d}.csv",
        "surface_pattern": "surfaces/{set}_{index:04d}.csv",
    }
    with open(out / "run.json", "w") as f:
        json.dump(meta, f, indent=1)

    if record.config_text is not None:
        (out / "config.cfg").write_text(record.config_text)

    with open(out / "steps.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["step", "t", "converged_loss", "wall_time",
                    "max_displacement", "lr_halvings"])
        for s in record.steps:
            w.writerow([s.index, f"{s.t:.17g}", f"{s.converged_loss:.17g}",
                        f"{s.wall_time:.6g}", f"{s.max_displacement:.17g}",
                        s.lr_halvings])

    with open(out / "loss_history.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["step", "iteration", "loss"])
        for s in record.steps:
            for i, v in enumerate(s.losses):
                w.writerow([s.index, i, f"{v:.17g}"])

    for s in record.steps:
        if s.index % every and s.index != len(record.steps) - 1:
            continue
        if fields:
            _write_csv(out / f"fields/step_{s.index:04d}.csv", cols,
                       _field_matrix(record, s, record.row_slices["volume"]))
            for name in surface_sets:
                _write_csv(out / f"surfaces/{name}_{s.index:04d}.csv", cols,
                           _field_matrix(record, s, record.row_slices[name]))
        if vtk:
            rows = record.row_slices["volume"]
            xy, frame = _to_xy(record, rows)
            u1 = s.fields["u1"][rows]
            u2 = s.fields["u2"][rows]
            if frame is None:
                ux, uy = u1, u2
            else:
                cth, sth = frame
                ux = u1 * cth - u2 * sth
                uy = u1 * sth + u2 * cth
            data = {
                "u_mag": np.hypot(ux, uy),
                "energy_density": s.fields["wdens"][rows],
            }
            if s.growth is not None:
                data["g_r"] = s.growth["g_r"][rows]
                data["g_theta"] = s.growth["g_theta"][rows]
            write_vtk_points(out / f"vtk/step_{s.index:04d}.vtk", xy, data,
                             {"displacement": np.column_stack([ux, uy])})

    header = {"scenario": record.scenario}
    header.update(record.field_meta or {})
    save_params(out / "params_final.csv", record.final_params, header)
    return out


def save_params(path, params: np.ndarray, header: dict):
    """Flat parameter vector with a JSON comment header."""
    with open(path, "w") as f:
        f.write("# " + json.dumps(header) + "\n")
        for v in params:
            f.write(f"{v:.17g}\n")


def load_params(path):
    with open(path) as f:
        first = f.readline()
        header = json.loads(first[1:].strip()) if first.startswith("#") else {}
        vals = [float(line) for line in f if line.strip()]
    return header, np.array(vals)
