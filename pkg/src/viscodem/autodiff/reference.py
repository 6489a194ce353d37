"""Single-point replay of a Program using DualScalar arithmetic.

Slow but independent of the vectorized executors: used by tests to
cross-check forward values and spatial tangents node by node.  Point-sum
reductions are skipped (they are cross-point), so anything downstream of
one evaluates to None.
"""
from __future__ import annotations

from .dual import DualScalar
from .program import (ADD, SUB, MUL, DIV, EXP, LN, TANH, POW, SQRT, SIN, COS,
                      TANGENT, PSUM, AFFINE, WIDE)


def evaluate_point(ex, point: int) -> dict:
    """Replay ex.prog at one collocation point; returns slot -> DualScalar."""
    prog = ex.prog
    st = ex.store
    written = set()
    for i in range(prog.n_instructions):
        for j in range(int(prog.n_out[i])):
            written.add(int(prog.out0[i]) + j)
    vals: dict[int, DualScalar | None] = {}
    for s in range(prog.n_slots):
        if s in written:
            continue
        r = prog.slot_row[s]
        if prog.slot_pool[s] == WIDE:
            vals[s] = DualScalar(st.vN[r, point], (st.t1N[r, point], st.t2N[r, point]))
        else:
            vals[s] = DualScalar(st.v1[r], (0.0, 0.0))

    for i in range(prog.n_instructions):
        op = int(prog.op[i])
        a = int(prog.arg_a[i])
        b = int(prog.arg_b[i])
        o = int(prog.out0[i])
        if op == AFFINE:
            e = prog.extra[prog.extra_ptr[i]:prog.extra_ptr[i] + prog.extra_len[i]]
            k_in, k_out = int(e[0]), int(e[1])
            xs = [vals[int(s)] for s in e[2:2 + k_in]]
            w0, b0 = int(e[2 + k_in]), int(e[3 + k_in])
            for j in range(k_out):
                acc = vals[b0 + j]
                for k in range(k_in):
                    acc = acc + vals[w0 + j * k_in + k] * xs[k]
                vals[o + j] = acc
            continue
        x = vals[a]
        if op == PSUM or x is None or (b >= 0 and vals[b] is None):
            vals[o] = None
            continue
        if op == TANGENT:
            vals[o] = DualScalar(x.tangents[int(prog.aux[i])], (0.0, 0.0))
        elif op == ADD:
            vals[o] = x + vals[b]
        elif op == SUB:
            vals[o] = x - vals[b]
        elif op == MUL:
            vals[o] = x * vals[b]
        elif op == DIV:
            vals[o] = x / vals[b]
        elif op == EXP:
            vals[o] = x.exp()
        elif op == LN:
            vals[o] = x.log()
        elif op == TANH:
            vals[o] = x.tanh()
        elif op == POW:
            vals[o] = x ** prog.aux[i]
        elif op == SQRT:
            vals[o] = x.sqrt()
        elif op == SIN:
            vals[o] = x.sin()
        elif op == COS:
            vals[o] = x.cos()
        else:
            raise AssertionError(op)
    return vals
