"""Wiring from a validated ScenarioConfig to runtime objects and the
incremental simulation driver."""
from __future__ import annotations

import numpy as np

from .config import DIRECTIONS, ScenarioConfig
from .errors import ConfigError
from .field import (NeuralField, clamped_left_beam_bc, fixed_outer_annulus_bc,
                    init_params, quarter_shell_bc, stretched_beam_bc)
from .geometry import Domain, sample_annulus, sample_beam
from .growth import DIFFERENTIAL, ISOTROPIC, GrowthState
from .material import MaterialModel, from_standard_solid
from .solver import (Loads, ScenarioProgram, SimulationRecord, StepConfig,
                     run_time_step)

HALF_PI = 0.5 * np.pi


def build_domain(cfg: ScenarioConfig) -> Domain:
    g = cfg.geometry
    if g.kind == "beam":
        return sample_beam(g.L, g.h, g.nx, g.ny)
    span = HALF_PI if g.kind == "quarter_annulus" else np.pi
    return sample_annulus(g.r_i, g.r_o, span, g.nr, g.nt)


def build_material(cfg: ScenarioConfig) -> MaterialModel:
    m = cfg.material
    if m.G_inf is not None:
        branches = []
        if m.branches:
            for chunk in m.branches.split(";"):
                G, lam, tau = (float(x) for x in chunk.split(":"))
                branches.append((G, lam, tau))
        return MaterialModel(m.G_inf, m.lambda_inf, tuple(branches), m.nu)
    return from_standard_solid(m.E_inf, m.E_1, m.xi, m.nu)


def instantaneous_young_modulus(cfg: ScenarioConfig) -> float:
    m = cfg.material
    if m.G_inf is not None:
        G0 = build_material(cfg).instantaneous[0]
        return 2.0 * G0 * (1.0 + m.nu)
    return m.E_inf + m.E_1


def build_bc(cfg: ScenarioConfig):
    if cfg.kind == "relaxation":
        return stretched_beam_bc(cfg.geometry.L, cfg.loads.stretch)
    if cfg.kind in ("creep", "beam_buckle"):
        return clamped_left_beam_bc(cfg.geometry.L)
    if cfg.kind == "shell_buckle":
        return quarter_shell_bc()
    return fixed_outer_annulus_bc(cfg.geometry.r_o, cfg.geometry.r_i)


def build_loads(cfg: ScenarioConfig) -> Loads:
    ld = cfg.loads
    if not ld.pressure:
        return Loads(0.0, None, (1.0, 0.0), ld.body_force)
    return Loads(ld.pressure, ld.boundary, DIRECTIONS[ld.direction], ld.body_force)


def build_field(cfg: ScenarioConfig, domain: Domain) -> NeuralField:
    sizes = (2, *cfg.stepping.hidden, 2)
    return NeuralField.for_domain(domain, build_bc(cfg), sizes,
                                  seed=cfg.stepping.seed, mode=cfg.stepping.network)


def build_growth(cfg: ScenarioConfig, n_rows: int) -> GrowthState | None:
    if cfg.growth is None:
        return None
    g = cfg.growth
    E0 = instantaneous_young_modulus(cfg)
    base = g.b_g if g.b_g is not None else g.b_g_factor * E0
    b_r = g.b_g_r if g.b_g_r is not None else base
    b_t = g.b_g_theta if g.b_g_theta is not None else base
    law = ISOTROPIC if g.law == "isotropic" else DIFFERENTIAL
    return GrowthState.fresh(n_rows, law, g.k, b_r, b_t)


def step_config(cfg: ScenarioConfig) -> StepConfig:
    s = cfg.stepping
    return StepConfig(delta_t=s.delta_t, iterations=s.iterations,
                      first_iterations=s.first_iterations,
                      learning_rate=s.learning_rate, seed=s.seed,
                      warm_start=s.warm_start)


def run_simulation(cfg: ScenarioConfig, backend: str | None = None,
                   fused: bool = True, progress=None) -> SimulationRecord:
    """Execute the full incremental loop for one scenario configuration."""
    domain = build_domain(cfg)
    material = build_material(cfg)
    field = build_field(cfg, domain)
    loads = build_loads(cfg)
    # the point axis stacks the volume set and every boundary sample set
    n_rows = domain.n_points + sum(len(bs.weights)
                                   for bs in domain.boundary_sets.values())
    growth = build_growth(cfg, n_rows)
    program = ScenarioProgram(domain, field, material, loads, growth,
                              backend=backend, fused=fused)
    scfg = step_config(cfg)
    phi = field.params.copy()
    steps = []
    for i in range(cfg.stepping.steps + 1):
        t = i * cfg.stepping.delta_t
        if i > 0 and not scfg.warm_start:
            phi = init_params(scfg.seed + i, field.layer_sizes, field.mode)
        phi, rec, growth = run_time_step(program, phi, scfg, i, t, growth)
        steps.append(rec)
        if progress is not None:
            progress(rec)
    field.params = phi.copy()
    return SimulationRecord(
        scenario=cfg.kind,
        coordinate_tag=domain.coordinate_tag,
        coords=program.coords,
        row_slices=program.row_slices,
        steps=steps,
        final_params=phi,
        config_text=cfg.to_text(),
        field_meta={"layer_sizes": list(field.layer_sizes),
                    "activation": field.activation,
                    "seed": field.seed, "mode": field.mode,
                    "input_center": list(field.input_center),
                    "input_halfwidth": list(field.input_halfwidth)},
    )
