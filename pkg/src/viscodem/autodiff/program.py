"""Recorded computation graph over dual-valued scalars.

A Tape records elementary operations on Var handles into an append-only
instruction list.  Every slot holds a dual triple (value, d/dx, d/dy) per
collocation point ("wide" slots) or a single triple shared by all points
("narrow" slots: parameters, constants, per-step scalars).  Freezing the
tape yields a Program whose instruction stream the executors replay:
forward to evaluate, backward to accumulate parameter adjoints.  The
recorded graph is static; per-iteration work only refreshes leaf storage,
so the node count is a fixed function of network size and point count.

Elementary op set: +, -, *, /, exp, ln, tanh, power, sqrt, plus sin/cos
(needed by cylindrical boundary factors), tangent extraction (turns a
spatial derivative into a first-class node, which is what lets parameter
gradients flow through spatial Jacobians), point-sum reduction, and a
fused affine-layer op that is arithmetic-equivalent to its *,+ expansion.
Local partials are recovered from recorded forward values during the
reverse sweep rather than stored explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# opcodes (mirrored in _core.pyx)
ADD, SUB, MUL, DIV, EXP, LN, TANH, POW, SQRT, SIN, COS, TANGENT, PSUM, AFFINE = range(14)

OP_NAMES = {
    ADD: "add", SUB: "sub", MUL: "mul", DIV: "div", EXP: "exp", LN: "ln",
    TANH: "tanh", POW: "pow", SQRT: "sqrt", SIN: "sin", COS: "cos",
    TANGENT: "tangent", PSUM: "psum", AFFINE: "affine",
}

WIDE, NARROW = 0, 1


class Var:
    """Handle to one tape slot; arithmetic records new instructions."""

    __slots__ = ("tape", "slot")

    def __init__(self, tape: "Tape", slot: int):
        self.tape = tape
        self.slot = slot

    def _rhs(self, other) -> int:
        if isinstance(other, Var):
            if other.tape is not self.tape:
                raise ValueError("mixing Vars from different tapes")
            return other.slot
        return self.tape.const(float(other)).slot

    def __add__(self, other):
        return self.tape._emit(ADD, self.slot, self._rhs(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.tape._emit(SUB, self.slot, self._rhs(other))

    def __rsub__(self, other):
        return self.tape._emit(SUB, self._rhs(other), self.slot)

    def __mul__(self, other):
        return self.tape._emit(MUL, self.slot, self._rhs(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.tape._emit(DIV, self.slot, self._rhs(other))

    def __rtruediv__(self, other):
        return self.tape._emit(DIV, self._rhs(other), self.slot)

    def __neg__(self):
        return self.tape.const(-1.0) * self

    def __pow__(self, c):
        return self.tape._emit(POW, self.slot, -1, aux=float(c))

    def exp(self):
        return self.tape._emit(EXP, self.slot, -1)

    def log(self):
        return self.tape._emit(LN, self.slot, -1)

    def tanh(self):
        return self.tape._emit(TANH, self.slot, -1)

    def sqrt(self):
        return self.tape._emit(SQRT, self.slot, -1)

    def sin(self):
        return self.tape._emit(SIN, self.slot, -1)

    def cos(self):
        return self.tape._emit(COS, self.slot, -1)


@dataclass
class Leaf:
    name: str
    slot0: int
    count: int
    pool: int
    seed: tuple[float, float] = (0.0, 0.0)


@dataclass
class Program:
    n_points: int
    n_wide: int
    n_narrow: int
    slot_pool: np.ndarray   # uint8 per slot
    slot_row: np.ndarray    # int32 per slot
    op: np.ndarray          # int32 per instruction
    arg_a: np.ndarray
    arg_b: np.ndarray
    out0: np.ndarray
    n_out: np.ndarray
    aux: np.ndarray         # float64
    extra_ptr: np.ndarray
    extra_len: np.ndarray
    extra: np.ndarray       # int32 pool
    leaves: dict
    const_rows: np.ndarray
    const_vals: np.ndarray
    outputs: dict
    loss_slot: int
    param_leaf: str | None

    @property
    def n_instructions(self) -> int:
        return len(self.op)

    @property
    def n_slots(self) -> int:
        return len(self.slot_pool)


class Tape:
    """Graph builder; freeze() packs the instruction stream for execution."""

    def __init__(self, n_points: int):
        if n_points < 1:
            raise ValueError("n_points must be >= 1")
        self.n_points = int(n_points)
        self._pool = []     # per slot: WIDE | NARROW
        self._row = []      # per slot: row within its pool
        self._n_wide = 0
        self._n_narrow = 0
        self._instrs = []   # (op, a, b, out0, n_out, aux, extra)
        self._leaves = {}
        self._consts = {}   # value -> Var
        self._outputs = {}
        self._loss_slot = None
        self._param_leaf = None
        self._frozen = False

    # -- slot allocation -------------------------------------------------
    def _new_slot(self, pool: int) -> int:
        slot = len(self._pool)
        self._pool.append(pool)
        if pool == WIDE:
            self._row.append(self._n_wide)
            self._n_wide += 1
        else:
            self._row.append(self._n_narrow)
            self._n_narrow += 1
        return slot

    def _check_open(self):
        if self._frozen:
            raise RuntimeError("tape already frozen")

    # -- leaves ----------------------------------------------------------
    def input_array(self, name: str, seed=(0.0, 0.0)) -> Var:
        """Per-point input leaf; seed gives its constant spatial tangents."""
        self._check_open()
        if name in self._leaves:
            raise ValueError(f"duplicate leaf {name!r}")
        slot = self._new_slot(WIDE)
        self._leaves[name] = Leaf(name, slot, 1, WIDE, (float(seed[0]), float(seed[1])))
        return Var(self, slot)

    def scalar_input(self, name: str) -> Var:
        """Width-one refreshable leaf (relaxed moduli, load magnitude, ...)."""
        self._check_open()
        if name in self._leaves:
            raise ValueError(f"duplicate leaf {name!r}")
        slot = self._new_slot(NARROW)
        self._leaves[name] = Leaf(name, slot, 1, NARROW)
        return Var(self, slot)

    def parameter_block(self, n: int, name: str = "phi") -> list[Var]:
        """Contiguous block of trainable width-one leaves."""
        self._check_open()
        if name in self._leaves:
            raise ValueError(f"duplicate leaf {name!r}")
        if self._param_leaf is not None:
            raise ValueError("only one parameter block per tape")
        slot0 = len(self._pool)
        vars_ = [Var(self, self._new_slot(NARROW)) for _ in range(n)]
        self._leaves[name] = Leaf(name, slot0, n, NARROW)
        self._param_leaf = name
        return vars_

    def const(self, value: float) -> Var:
        self._check_open()
        value = float(value)
        if value not in self._consts:
            slot = self._new_slot(NARROW)
            self._consts[value] = Var(self, slot)
        return self._consts[value]

    # -- instruction emission ---------------------------------------------
    def _emit(self, op: int, a: int, b: int, aux: float = 0.0, extra=None,
              n_out: int = 1, out_pool=None) -> Var:
        self._check_open()
        if out_pool is None:
            wide = self._pool[a] == WIDE or (b >= 0 and self._pool[b] == WIDE)
            out_pool = WIDE if wide else NARROW
        out0 = len(self._pool)
        for _ in range(n_out):
            self._new_slot(out_pool)
        self._instrs.append((op, a, b, out0, n_out, float(aux),
                             None if extra is None else np.asarray(extra, np.int32)))
        return Var(self, out0)

    def tangent(self, v: Var, k: int) -> Var:
        """Extract spatial-derivative component k as a new node."""
        if k not in (0, 1):
            raise ValueError("tangent index must be 0 or 1")
        return self._emit(TANGENT, v.slot, -1, aux=float(k))

    def sum_over_points(self, v: Var) -> Var:
        if self._pool[v.slot] != WIDE:
            raise ValueError("sum_over_points needs a per-point node")
        return self._emit(PSUM, v.slot, -1, out_pool=NARROW)

    def affine(self, xs: list[Var], w0: int, b0: int, k_out: int) -> list[Var]:
        """Fused layer: out_j = b_j + sum_i W[j,i] * x_i.

        W rows are the k_out*k_in narrow slots starting at w0 (row-major),
        biases the k_out slots at b0.  Weight/bias slots must be zero-tangent
        narrow leaves (trainable parameters or constants); equivalence with
        the elementary *,+ expansion is covered by tests.
        """
        k_in = len(xs)
        for x in xs:
            if self._pool[x.slot] != WIDE:
                raise ValueError("affine inputs must be per-point nodes")
        for s in range(w0, w0 + k_in * k_out):
            if self._pool[s] != NARROW:
                raise ValueError("affine weights must be narrow slots")
        for s in range(b0, b0 + k_out):
            if self._pool[s] != NARROW:
                raise ValueError("affine biases must be narrow slots")
        extra = [k_in, k_out] + [x.slot for x in xs] + [w0, b0]
        out = self._emit(AFFINE, -1, -1, extra=extra, n_out=k_out, out_pool=WIDE)
        return [Var(self, out.slot + j) for j in range(k_out)]

    # -- outputs / freezing -------------------------------------------------
    def mark_output(self, name: str, v: Var):
        self._check_open()
        self._outputs[name] = v.slot

    def mark_loss(self, v: Var):
        self._check_open()
        if self._pool[v.slot] != NARROW:
            raise ValueError("loss must be a width-one node")
        self._loss_slot = v.slot

    def freeze(self) -> Program:
        self._check_open()
        self._frozen = True
        n = len(self._instrs)
        op = np.empty(n, np.int32)
        arg_a = np.empty(n, np.int32)
        arg_b = np.empty(n, np.int32)
        out0 = np.empty(n, np.int32)
        n_out = np.empty(n, np.int32)
        aux = np.empty(n, np.float64)
        extra_ptr = np.zeros(n, np.int32)
        extra_len = np.zeros(n, np.int32)
        extra_pool = []
        for i, (o, a, b, q, m, x, e) in enumerate(self._instrs):
            op[i], arg_a[i], arg_b[i], out0[i], n_out[i], aux[i] = o, a, b, q, m, x
            if e is not None:
                extra_ptr[i] = len(extra_pool)
                extra_len[i] = len(e)
                extra_pool.extend(e.tolist())
        const_rows = np.array([self._row[v.slot] for v in self._consts.values()], np.int32)
        const_vals = np.array(list(self._consts.keys()), np.float64)
        return Program(
            n_points=self.n_points,
            n_wide=self._n_wide,
            n_narrow=self._n_narrow,
            slot_pool=np.asarray(self._pool, np.uint8),
            slot_row=np.asarray(self._row, np.int32),
            op=op, arg_a=arg_a, arg_b=arg_b, out0=out0, n_out=n_out, aux=aux,
            extra_ptr=extra_ptr, extra_len=extra_len,
            extra=np.asarray(extra_pool, np.int32),
            leaves=dict(self._leaves),
            const_rows=const_rows, const_vals=const_vals,
            outputs=dict(self._outputs),
            loss_slot=-1 if self._loss_slot is None else self._loss_slot,
            param_leaf=self._param_leaf,
        )
