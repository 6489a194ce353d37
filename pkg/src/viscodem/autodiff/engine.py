"""Executor facade: owns storage for a frozen Program and runs a backend.

The compiled Cython kernel is preferred when importable; the numpy replay
is the fallback.  Set VISCODEM_BACKEND=numpy|compiled to force one.  Both
backends share storage layout and instruction semantics; see
benchmarks/bench_backends.py for a speed comparison.
"""
from __future__ import annotations

import os

import numpy as np

from . import numpy_exec
from .program import Program, WIDE

try:
    from . import _core
except ImportError:  # pure-python install
    _core = None


class NonFiniteLoss(Exception):
    """Loss evaluated to NaN/inf; carries the offending value."""

    def __init__(self, value):
        self.value = value
        super().__init__(f"non-finite loss: {value}")


def available_backends():
    names = ["numpy"]
    if _core is not None:
        names.insert(0, "compiled")
    return names


def default_backend() -> str:
    env = os.environ.get("VISCODEM_BACKEND")
    if env:
        if env not in ("numpy", "compiled"):
            raise ValueError(f"unknown backend {env!r}")
        if env == "compiled" and _core is None:
            raise RuntimeError("compiled backend requested but extension not built")
        return env
    return "compiled" if _core is not None else "numpy"


class Store:
    """Forward and adjoint pools for one Program."""

    def __init__(self, prog: Program):
        n, w, s = prog.n_points, prog.n_wide, prog.n_narrow
        self.vN = np.zeros((w, n))
        self.t1N = np.zeros((w, n))
        self.t2N = np.zeros((w, n))
        self.v1 = np.zeros(s)
        self.t11 = np.zeros(s)
        self.t21 = np.zeros(s)
        self.avN = np.zeros((w, n))
        self.a1N = np.zeros((w, n))
        self.a2N = np.zeros((w, n))
        self.av1 = np.zeros(s)
        # tangent-adjoint sinks for narrow slots (identically zero tangents)
        self.a11 = np.zeros(s)
        self.a21 = np.zeros(s)


class Executor:
    def __init__(self, prog: Program, backend: str | None = None):
        self.prog = prog
        self.backend = backend or default_backend()
        if self.backend == "compiled" and _core is None:
            raise RuntimeError("compiled backend not available")
        self.store = Store(prog)
        self._instrs = numpy_exec.unpack(prog) if self.backend == "numpy" else None
        if self.backend == "compiled":
            self._packed = _core.pack(
                prog.op, prog.arg_a, prog.arg_b, prog.out0, prog.n_out, prog.aux,
                prog.extra_ptr, prog.extra_len, prog.extra,
                prog.slot_pool, prog.slot_row)
        # constants and leaf tangent seeds are set once
        self.store.v1[prog.const_rows] = prog.const_vals
        for leaf in prog.leaves.values():
            if leaf.pool == WIDE:
                r = prog.slot_row[leaf.slot0]
                self.store.t1N[r] = leaf.seed[0]
                self.store.t2N[r] = leaf.seed[1]
        self._forward_done = False

    # -- leaf refresh ------------------------------------------------------
    def set_array(self, name: str, values):
        leaf = self.prog.leaves[name]
        if leaf.pool != WIDE:
            raise ValueError(f"{name!r} is not a per-point leaf")
        self.store.vN[self.prog.slot_row[leaf.slot0]] = values

    def set_scalar(self, name: str, value: float):
        leaf = self.prog.leaves[name]
        if leaf.pool == WIDE:
            raise ValueError(f"{name!r} is a per-point leaf")
        self.store.v1[self.prog.slot_row[leaf.slot0]] = value

    def set_params(self, vec):
        leaf = self.prog.leaves[self.prog.param_leaf]
        r0 = self.prog.slot_row[leaf.slot0]
        self.store.v1[r0:r0 + leaf.count] = vec

    # -- execution -----------------------------------------------------------
    def forward(self) -> float:
        if self.backend == "numpy":
            numpy_exec.forward(self._instrs, self.store)
        else:
            st = self.store
            _core.forward(self._packed, st.vN, st.t1N, st.t2N,
                          st.v1, st.t11, st.t21)
        self._forward_done = True
        if self.prog.loss_slot >= 0:
            return float(self.store.v1[self.prog.slot_row[self.prog.loss_slot]])
        return 0.0

    def loss_value(self) -> float:
        return float(self.store.v1[self.prog.slot_row[self.prog.loss_slot]])

    def output(self, name: str):
        slot = self.prog.outputs[name]
        r = self.prog.slot_row[slot]
        if self.prog.slot_pool[slot] == WIDE:
            return self.store.vN[r].copy()
        return float(self.store.v1[r])

    def value_of(self, var_or_slot):
        slot = getattr(var_or_slot, "slot", var_or_slot)
        r = self.prog.slot_row[slot]
        if self.prog.slot_pool[slot] == WIDE:
            return self.store.vN[r].copy()
        return float(self.store.v1[r])

    def tangents_of(self, var_or_slot):
        slot = getattr(var_or_slot, "slot", var_or_slot)
        r = self.prog.slot_row[slot]
        if self.prog.slot_pool[slot] == WIDE:
            return self.store.t1N[r].copy(), self.store.t2N[r].copy()
        return float(self.store.t11[r]), float(self.store.t21[r])

    def backward(self):
        """Adjoint sweep from the loss node; returns d(loss)/d(params)."""
        if not self._forward_done:
            raise RuntimeError("forward() must run before backward()")
        if self.prog.loss_slot < 0:
            raise RuntimeError("program has no loss node")
        loss = self.loss_value()
        if not np.isfinite(loss):
            raise NonFiniteLoss(loss)
        st = self.store
        st.avN.fill(0.0)
        st.a1N.fill(0.0)
        st.a2N.fill(0.0)
        st.av1.fill(0.0)
        st.a11.fill(0.0)
        st.a21.fill(0.0)
        st.av1[self.prog.slot_row[self.prog.loss_slot]] = 1.0
        if self.backend == "numpy":
            numpy_exec.reverse(self._instrs, st)
        else:
            _core.reverse(self._packed, st.vN, st.t1N, st.t2N,
                          st.v1, st.t11, st.t21,
                          st.avN, st.a1N, st.a2N, st.av1, st.a11, st.a21)
        leaf = self.prog.leaves[self.prog.param_leaf]
        r0 = self.prog.slot_row[leaf.slot0]
        return st.av1[r0:r0 + leaf.count].copy()

    def gradient(self):
        """forward + backward; returns (loss, grad)."""
        loss = self.forward()
        grad = self.backward()
        return loss, grad


def param_gradient(executor: Executor):
    """Gradient of the recorded loss with respect to every trainable
    parameter, in parameter-layout order.  Raises NonFiniteLoss on a
    non-finite loss value."""
    return executor.gradient()
