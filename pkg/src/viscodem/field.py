"""Neural displacement ansatz with exact (hard) boundary enforcement.

The field is u(x, t) = N(x; phi) .* b(x) + ubar(x, t): a small tanh MLP
whose output is multiplied componentwise by a factor vanishing on the
essential boundary, plus a particular solution satisfying the prescribed
values there.  Constraints therefore hold identically for any parameter
vector.  Inputs are affinely mapped to [-1, 1] per component (a fixed,
recorded transform) so the tanh layers train well on domains of any size.

Two wiring modes: a single two-output network (default) or two scalar
networks with separate parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Callable

import numpy as np

from .autodiff import Executor, Tape

SINGLE, SPLIT = "single", "split"


def layer_param_count(sizes) -> int:
    return sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))


def param_count(layer_sizes, mode: str = SINGLE) -> int:
    if mode == SINGLE:
        return layer_param_count(layer_sizes)
    scalar = list(layer_sizes[:-1]) + [1]
    return layer_sizes[-1] * layer_param_count(scalar)


OUTPUT_GAIN = 0.01


def init_params(seed: int, layer_sizes, mode: str = SINGLE,
                output_gain: float = OUTPUT_GAIN) -> np.ndarray:
    """Glorot-uniform weights, zero biases, from a seeded 64-bit generator.

    The output layer is scaled down by output_gain so the wrapped field
    starts near the particular solution; a raw O(1) initial output would
    invert elements (det F <= 0) on meter-scale domains before the first
    update."""
    if any(s < 1 for s in layer_sizes):
        raise ValueError("layer sizes must be >= 1")
    rng = np.random.default_rng(seed)

    def tower(sizes):
        chunks = []
        last = len(sizes) - 2
        for li, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            limit = np.sqrt(6.0 / (n_in + n_out))
            w = rng.uniform(-limit, limit, n_in * n_out)
            if li == last:
                w *= output_gain
            chunks.append(w)
            chunks.append(np.zeros(n_out))
        return chunks

    if mode == SINGLE:
        return np.concatenate(tower(layer_sizes))
    scalar = list(layer_sizes[:-1]) + [1]
    return np.concatenate(sum((tower(scalar) for _ in range(layer_sizes[-1])), []))


@dataclass(frozen=True)
class BoundaryConstruction:
    """Componentwise distance-like factors b(x) and particular solution
    ubar(x, t); both written with generic arithmetic so they work on floats
    and tape variables alike."""

    name: str
    factors: Callable          # (x1, x2) -> (b1, b2); entries may be 1.0
    particular: Callable       # (x1, x2, t) -> (u1bar, u2bar)


def _zero_particular(x1, x2, t):
    return 0.0, 0.0


def stretched_beam_bc(L: float, dL: float) -> BoundaryConstruction:
    """Clamped left end, right end held at axial displacement dL:
    u_x = N_x x (L - x) + x dL/L,  u_y = N_y x.  Factors are normalized to
    unit maximum (the constant is absorbed by the network weights; BC
    exactness is unchanged)."""
    cx = 1.0 / (0.25 * L * L)
    return BoundaryConstruction(
        "stretched_beam",
        lambda x, y: (x * (L - x) * cx, x * (1.0 / L)),
        lambda x, y, t: (x * (dL / L), 0.0),
    )


def clamped_left_beam_bc(L: float = 10.0) -> BoundaryConstruction:
    """Clamped left end only: u = N x / L (end-loaded beam scenarios)."""
    return BoundaryConstruction(
        "clamped_left_beam",
        lambda x, y: (x * (1.0 / L), x * (1.0 / L)),
        _zero_particular,
    )


def _sincos(th):
    if hasattr(th, "sin"):
        return 2.0 * th.sin() * th.cos()
    return 2.0 * np.sin(th) * np.cos(th)


def quarter_shell_bc() -> BoundaryConstruction:
    """Symmetry cuts at theta = 0, pi/2: u_theta = N sin(theta) cos(theta)
    (unit-normalized to sin 2theta), u_r unconstrained."""
    return BoundaryConstruction(
        "quarter_shell",
        lambda r, th: (1.0, _sincos(th)),
        _zero_particular,
    )


def fixed_outer_annulus_bc(r_outer: float, r_inner: float = 0.9) -> BoundaryConstruction:
    """Outer surface radially fixed, circumferential symmetry factor as in
    the half-annulus growth setup: u_r = N (r_o - r),
    u_theta = N sin(theta) cos(theta); both unit-normalized.  The
    circumferential factor changes sign across theta = pi/2 (kept verbatim
    from the source construction)."""
    ct = 1.0 / (r_outer - r_inner)
    return BoundaryConstruction(
        "fixed_outer_annulus",
        lambda r, th: ((r_outer - r) * ct, _sincos(th)),
        _zero_particular,
    )


@dataclass
class NeuralField:
    """MLP parameters plus the boundary wrapper defining the admissible
    displacement field."""

    layer_sizes: tuple = (2, 20, 20, 20, 2)
    activation: str = "tanh"
    seed: int = 0
    mode: str = SINGLE
    bc: BoundaryConstruction | None = None
    input_center: tuple = (0.0, 0.0)
    input_halfwidth: tuple = (1.0, 1.0)
    params: np.ndarray = dfield(default=None, repr=False)

    def __post_init__(self):
        if self.activation != "tanh":
            raise ValueError("only the tanh activation is wired up")
        if self.mode not in (SINGLE, SPLIT):
            raise ValueError(f"unknown network mode {self.mode!r}")
        if self.params is None:
            self.params = init_params(self.seed, self.layer_sizes, self.mode)

    @property
    def n_params(self) -> int:
        return param_count(self.layer_sizes, self.mode)

    @classmethod
    def for_domain(cls, domain, bc, layer_sizes=(2, 20, 20, 20, 2),
                   seed=0, mode=SINGLE):
        lo = domain.points.min(axis=0)
        hi = domain.points.max(axis=0)
        center = 0.5 * (lo + hi)
        half = np.maximum(0.5 * (hi - lo), 1e-12)
        return cls(tuple(layer_sizes), "tanh", seed, mode, bc,
                   tuple(center), tuple(half))

    # -- graph construction -------------------------------------------------
    def _tower(self, tape, sizes, pvars, off, xn, fused):
        h = [xn[0], xn[1]]
        for li, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            w0 = pvars[off].slot
            b0 = pvars[off + n_in * n_out].slot
            if fused:
                z = tape.affine(h, w0, b0, n_out)
            else:
                z = []
                for j in range(n_out):
                    acc = pvars[off + n_in * n_out + j]
                    for i in range(n_in):
                        acc = acc + pvars[off + j * n_in + i] * h[i]
                    z.append(acc)
            off += n_in * n_out + n_out
            h = [v.tanh() for v in z] if li < len(sizes) - 2 else z
        return h, off

    def build(self, tape: Tape, x1, x2, t=None, fused: bool = True):
        """Record the wrapped displacement (u1, u2) on the tape; returns the
        pair of Vars plus the parameter Vars (for gradient layout)."""
        pvars = tape.parameter_block(self.n_params)
        xn = [(x1 - self.input_center[0]) * (1.0 / self.input_halfwidth[0]),
              (x2 - self.input_center[1]) * (1.0 / self.input_halfwidth[1])]
        if self.mode == SINGLE:
            out, _ = self._tower(tape, list(self.layer_sizes), pvars, 0, xn, fused)
        else:
            scalar = list(self.layer_sizes[:-1]) + [1]
            out = []
            off = 0
            for _ in range(self.layer_sizes[-1]):
                o, off = self._tower(tape, scalar, pvars, off, xn, fused)
                out.append(o[0])
        b1, b2 = self.bc.factors(x1, x2)
        p1, p2 = self.bc.particular(x1, x2, t if t is not None else 0.0)
        u1 = out[0] * b1 + p1
        u2 = out[1] * b2 + p2
        return u1, u2, pvars

    # -- direct numeric evaluation -------------------------------------------
    def _program(self, points):
        pts = np.asarray(points, float)
        tape = Tape(len(pts))
        x1 = tape.input_array("x1", seed=(1.0, 0.0))
        x2 = tape.input_array("x2", seed=(0.0, 1.0))
        u1, u2, _ = self.build(tape, x1, x2)
        tape.mark_output("u1", u1)
        tape.mark_output("u2", u2)
        for i, u in enumerate((u1, u2)):
            for k in range(2):
                tape.mark_output(f"jac{i}{k}", tape.tangent(u, k))
        ex = Executor(tape.freeze())
        ex.set_array("x1", pts[:, 0])
        ex.set_array("x2", pts[:, 1])
        return ex

    def evaluate(self, points, t=None):
        """Displacement at coordinate pairs; exact on essential boundaries."""
        ex = self._program(points)
        ex.set_params(self.params)
        ex.forward()
        return np.column_stack([ex.output("u1"), ex.output("u2")])

    def spatial_jacobian(self, points, t=None):
        """du_i/dx_j at coordinate pairs, shape (n, 2, 2), via the dual
        forward pass (the recorded entries stay differentiable w.r.t. phi)."""
        ex = self._program(points)
        ex.set_params(self.params)
        ex.forward()
        n = len(np.atleast_2d(points))
        jac = np.empty((n, 2, 2))
        for i in range(2):
            for k in range(2):
                jac[:, i, k] = ex.output(f"jac{i}{k}")
        return jac
