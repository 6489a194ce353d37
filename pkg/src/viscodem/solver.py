"""Potential-energy assembly and the incremental minimization loop.

Each time step solves a pseudo-elastic problem: relaxed moduli G(t),
lambda(t) are frozen, the recorded energy graph is replayed forward and
backward once per Adam iteration, and (for growth scenarios) the growth
ratios advance by delta_t / iterations after every iteration using the
current-iterate Cauchy stress.  The graph is recorded once per scenario;
time steps only refresh leaf storage and the parameter vector, warm
starting from the previous converged state.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field as dfield

import numpy as np

from .autodiff import Executor, Tape
from .errors import InvertedElement
from .geometry import Domain
from .growth import GrowthState, growth_increment
from .kinematics import (deformation_gradient_cartesian,
                         deformation_gradient_cylindrical, elastic_part)
from .material import MaterialModel, cauchy_stress, relaxed_moduli, strain_energy_density, _det3


@dataclass
class Loads:
    """Dead surface traction (magnitude + direction in the domain frame)
    plus an optional body force; direction components multiply (u1, u2)."""
    pressure: float = 0.0
    boundary: str | None = None
    direction: tuple = (1.0, 0.0)
    body_force: tuple = (0.0, 0.0)


@dataclass
class StepConfig:
    delta_t: float = 1.0
    iterations: int = 1000
    first_iterations: int = 3000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    warm_start: bool = True

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        if self.iterations < 1 or self.first_iterations < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def fresh(cls, n: int):
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(phi, grad, state: AdamState, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Standard Adam update with bias correction; returns the new phi."""
    state.step += 1
    state.m = beta1 * state.m + (1.0 - beta1) * grad
    state.v = beta2 * state.v + (1.0 - beta2) * grad * grad
    mhat = state.m / (1.0 - beta1 ** state.step)
    vhat = state.v / (1.0 - beta2 ** state.step)
    return phi - lr * mhat / (np.sqrt(vhat) + eps)


class ScenarioProgram:
    """Frozen energy graph for one scenario: volume collocation points plus
    every boundary sample set stacked on one point axis (zero energy weight
    on the boundary rows, zero traction weight off the loaded set)."""

    def __init__(self, domain: Domain, field, material: MaterialModel,
                 loads: Loads, growth: GrowthState | None = None,
                 backend: str | None = None, fused: bool = True):
        self.domain = domain
        self.field = field
        self.material = material
        self.loads = loads
        self.has_growth = growth is not None

        names = list(domain.boundary_sets)
        pts = [domain.points] + [domain.boundary_sets[k].points for k in names]
        self.coords = np.vstack(pts)
        n_total = len(self.coords)
        self.row_slices = {"volume": slice(0, domain.n_points)}
        at = domain.n_points
        for k in names:
            m = len(domain.boundary_sets[k].weights)
            self.row_slices[k] = slice(at, at + m)
            at += m

        w_energy = np.zeros(n_total)
        w_energy[self.row_slices["volume"]] = domain.weights
        w_trac = np.zeros(n_total)
        if loads.boundary is not None and loads.pressure != 0.0:
            bs = domain.boundary_sets[loads.boundary]
            w_trac[self.row_slices[loads.boundary]] = bs.weights

        tape = Tape(n_total)
        x1 = tape.input_array("x1", seed=(1.0, 0.0))
        x2 = tape.input_array("x2", seed=(0.0, 1.0))
        we = tape.input_array("w_energy")
        wt = tape.input_array("w_traction")
        Gv = tape.scalar_input("G")
        lamv = tape.scalar_input("lam")
        tv = tape.scalar_input("t")
        pv = tape.scalar_input("p")

        u1, u2, _ = field.build(tape, x1, x2, tv, fused=fused)
        jac = [[tape.tangent(u1, 0), tape.tangent(u1, 1)],
               [tape.tangent(u2, 0), tape.tangent(u2, 1)]]
        if domain.coordinate_tag == "cartesian":
            F = deformation_gradient_cartesian(jac)
        else:
            F = deformation_gradient_cylindrical(u1, u2, jac, x1)

        if self.has_growth:
            g_r = tape.input_array("g_r")
            g_t = tape.input_array("g_theta")
            F_used = elastic_part(F, g_r, g_t)
        else:
            F_used = F

        w = strain_energy_density(F_used, Gv, lamv)
        integrand = w * we
        d1, d2 = loads.direction
        if loads.boundary is not None and loads.pressure != 0.0:
            integrand = integrand - pv * (d1 * u1 + d2 * u2) * wt
        f1, f2 = loads.body_force
        if f1 or f2:
            integrand = integrand - (f1 * u1 + f2 * u2) * we
        if self.has_growth:
            bterm = (g_r * g_t) * (growth.b_r * g_r + growth.b_theta * g_t)
            integrand = integrand + bterm * we
        loss = tape.sum_over_points(integrand)

        sig = cauchy_stress(F_used, Gv, lamv)
        tape.mark_output("u1", u1)
        tape.mark_output("u2", u2)
        tape.mark_output("s11", sig[0][0])
        tape.mark_output("s22", sig[1][1])
        tape.mark_output("s12", sig[0][1])
        tape.mark_output("s33", sig[2][2])
        tape.mark_output("J", _det3(F_used))
        tape.mark_output("wdens", w)
        tape.mark_loss(loss)

        self.executor = Executor(tape.freeze(), backend=backend)
        self.executor.set_array("x1", self.coords[:, 0])
        self.executor.set_array("x2", self.coords[:, 1])
        self.executor.set_array("w_energy", w_energy)
        self.executor.set_array("w_traction", w_trac)
        self.executor.set_scalar("p", loads.pressure)
        if self.has_growth:
            self.set_growth(growth)

    @property
    def n_rows(self) -> int:
        return len(self.coords)

    def set_step(self, t: float):
        G, lam = relaxed_moduli(self.material, t)
        self.executor.set_scalar("G", G)
        self.executor.set_scalar("lam", lam)
        self.executor.set_scalar("t", t)

    def set_growth(self, state: GrowthState):
        self.executor.set_array("g_r", state.g_r)
        self.executor.set_array("g_theta", state.g_theta)

    def _check_jacobian(self):
        J = self.executor.output("J")
        bad = np.argmin(J)
        if J[bad] <= 0.0:
            raise InvertedElement(int(bad), tuple(self.coords[bad]), float(J[bad]))

    def gradient(self, phi):
        self.executor.set_params(phi)
        loss = self.executor.forward()
        self._check_jacobian()
        grad = self.executor.backward()
        return loss, grad

    def snapshot(self, phi) -> dict:
        self.executor.set_params(phi)
        self.executor.forward()
        self._check_jacobian()
        keys = ("u1", "u2", "s11", "s22", "s12", "s33", "J", "wdens")
        return {k: self.executor.output(k) for k in keys}


def assemble_potential(domain, field, material, t, loads,
                       growth: GrowthState | None = None,
                       backend=None, fused=True) -> ScenarioProgram:
    """Record the potential-energy graph and prime it for time t."""
    prog = ScenarioProgram(domain, field, material, loads, growth,
                           backend=backend, fused=fused)
    prog.set_step(t)
    return prog


class StepDiverged(RuntimeError):
    def __init__(self, iteration, learning_rate, loss):
        self.iteration = iteration
        self.learning_rate = learning_rate
        self.loss = loss
        super().__init__(f"energy diverged at iteration {iteration} "
                         f"(lr={learning_rate:g}, loss={loss:g})")


@dataclass
class StepRecord:
    index: int
    t: float
    losses: np.ndarray
    converged_loss: float
    wall_time: float
    max_displacement: float
    lr_halvings: int
    fields: dict
    growth: dict | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.losses)):
            raise ValueError("loss record contains non-finite entries")


@dataclass
class SimulationRecord:
    scenario: str
    coordinate_tag: str
    coords: np.ndarray
    row_slices: dict
    steps: list
    final_params: np.ndarray
    config_text: str | None = None
    field_meta: dict | None = None

    @property
    def times(self):
        return [s.t for s in self.steps]

    def volume(self, step_index: int, key: str):
        return self.steps[step_index].fields[key][self.row_slices["volume"]]

    def rows(self, step_index: int, set_name: str, key: str):
        return self.steps[step_index].fields[key][self.row_slices[set_name]]


def run_time_step(program: ScenarioProgram, phi, cfg: StepConfig, index: int,
                  t: float, growth: GrowthState | None = None,
                  iterations: int | None = None):
    """Minimize the step-t potential; returns (phi, record, growth)."""
    start = time.perf_counter()
    program.set_step(t)
    if iterations is None:
        iterations = cfg.first_iterations if index == 0 else cfg.iterations
    adam = AdamState.fresh(len(phi))
    lr = cfg.learning_rate
    halvings = 0
    dt_growth = cfg.delta_t / iterations
    losses = np.empty(iterations)
    loss0 = None
    for it in range(iterations):
        loss, grad = program.gradient(phi)
        losses[it] = loss
        if loss0 is None:
            loss0 = loss
        elif loss - loss0 > 10.0 * abs(loss0) + 1e-9:
            # divergence guard: halve once, abort on the second trigger
            if halvings == 0:
                lr *= 0.5
                halvings = 1
                loss0 = loss
            else:
                raise StepDiverged(it, lr, loss)
        phi = adam_step(phi, grad, adam, lr,
                        cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        if growth is not None and index > 0:
            s11 = program.executor.output("s11")
            s22 = program.executor.output("s22")
            growth = growth_increment(growth, s11, s22, dt_growth)
            program.set_growth(growth)
    fields = program.snapshot(phi)
    umag = np.hypot(fields["u1"], fields["u2"])
    record = StepRecord(
        index=index, t=t, losses=losses,
        converged_loss=float(program.executor.loss_value()),
        wall_time=time.perf_counter() - start,
        max_displacement=float(umag.max()),
        lr_halvings=halvings,
        fields=fields,
        growth=None if growth is None else
        {"g_r": growth.g_r.copy(), "g_theta": growth.g_theta.copy()},
    )
    return phi, record, growth
