"""Vectorized numpy replay of a frozen Program (fallback backend).

Wide slots live in (n_wide, n_points) arrays, narrow slots in flat
vectors; instructions are replayed in order for the forward pass and in
reverse for adjoint accumulation.  Local partials are reconstructed from
forward storage.  Narrow slots provably carry zero tangents (only wide
leaves are seeded), which the reverse rules exploit.
"""
from __future__ import annotations

import numpy as np

from .program import (ADD, SUB, MUL, DIV, EXP, LN, TANH, POW, SQRT, SIN, COS,
                      TANGENT, PSUM, AFFINE, WIDE)


def unpack(prog):
    """Resolve slots to (pool, row) once so the replay loop stays lean."""
    pool = prog.slot_pool
    row = prog.slot_row
    out = []
    for i in range(prog.n_instructions):
        op = int(prog.op[i])
        a = int(prog.arg_a[i])
        b = int(prog.arg_b[i])
        o = int(prog.out0[i])
        rec = {
            "op": op,
            "aw": a >= 0 and pool[a] == WIDE, "ar": -1 if a < 0 else int(row[a]),
            "bw": b >= 0 and pool[b] == WIDE, "br": -1 if b < 0 else int(row[b]),
            "ow": pool[o] == WIDE, "or": int(row[o]),
            "n_out": int(prog.n_out[i]),
            "aux": float(prog.aux[i]),
        }
        if op == AFFINE:
            e = prog.extra[prog.extra_ptr[i]:prog.extra_ptr[i] + prog.extra_len[i]]
            k_in, k_out = int(e[0]), int(e[1])
            x_slots = e[2:2 + k_in]
            w0, b0 = int(e[2 + k_in]), int(e[3 + k_in])
            rec["k_in"], rec["k_out"] = k_in, k_out
            rec["x_rows"] = np.array([row[s] for s in x_slots], np.intp)
            wr = int(row[w0])
            br_ = int(row[b0])
            # narrow slots are allocated sequentially, so rows are contiguous
            rec["w_rows"] = slice(wr, wr + k_in * k_out)
            rec["b_rows"] = slice(br_, br_ + k_out)
        out.append(rec)
    return out


def forward(instrs, st):
    vN, t1N, t2N = st.vN, st.t1N, st.t2N
    v1 = st.v1
    for r in instrs:
        op = r["op"]
        if op == AFFINE:
            o = r["or"]
            k = r["k_out"]
            W = v1[r["w_rows"]].reshape(k, r["k_in"])
            bias = v1[r["b_rows"]]
            xr = r["x_rows"]
            vN[o:o + k] = W @ vN[xr] + bias[:, None]
            t1N[o:o + k] = W @ t1N[xr]
            t2N[o:o + k] = W @ t2N[xr]
            continue
        av = vN[r["ar"]] if r["aw"] else v1[r["ar"]]
        a1 = t1N[r["ar"]] if r["aw"] else 0.0
        a2 = t2N[r["ar"]] if r["aw"] else 0.0
        if op == PSUM:
            o = r["or"]
            v1[o] = av.sum()
            continue
        if op == TANGENT:
            o = r["or"]
            src = t1N if r["aux"] == 0.0 else t2N
            if r["ow"]:
                vN[o] = src[r["ar"]]
                t1N[o] = 0.0
                t2N[o] = 0.0
            else:
                v1[o] = 0.0
            continue
        if op <= DIV:  # binary
            bv = vN[r["br"]] if r["bw"] else v1[r["br"]]
            b1 = t1N[r["br"]] if r["bw"] else 0.0
            b2 = t2N[r["br"]] if r["bw"] else 0.0
            if op == ADD:
                ov, o1, o2 = av + bv, a1 + b1, a2 + b2
            elif op == SUB:
                ov, o1, o2 = av - bv, a1 - b1, a2 - b2
            elif op == MUL:
                ov = av * bv
                o1 = a1 * bv + av * b1
                o2 = a2 * bv + av * b2
            else:
                inv = 1.0 / bv
                ov = av * inv
                o1 = (a1 - ov * b1) * inv
                o2 = (a2 - ov * b2) * inv
        elif op == EXP:
            ov = np.exp(av)
            o1, o2 = ov * a1, ov * a2
        elif op == LN:
            ov = np.log(av)
            d = 1.0 / av
            o1, o2 = d * a1, d * a2
        elif op == TANH:
            ov = np.tanh(av)
            d = 1.0 - ov * ov
            o1, o2 = d * a1, d * a2
        elif op == POW:
            c = r["aux"]
            ov = av ** c
            d = c * av ** (c - 1.0)
            o1, o2 = d * a1, d * a2
        elif op == SQRT:
            ov = np.sqrt(av)
            d = 0.5 / ov
            o1, o2 = d * a1, d * a2
        elif op == SIN:
            ov = np.sin(av)
            d = np.cos(av)
            o1, o2 = d * a1, d * a2
        elif op == COS:
            ov = np.cos(av)
            d = -np.sin(av)
            o1, o2 = d * a1, d * a2
        else:
            raise AssertionError(f"bad opcode {op}")
        o = r["or"]
        if r["ow"]:
            vN[o], t1N[o], t2N[o] = ov, o1, o2
        else:
            v1[o] = ov
            st.t11[o] = o1
            st.t21[o] = o2


def reverse(instrs, st):
    vN, t1N, t2N = st.vN, st.t1N, st.t2N
    v1 = st.v1
    avN, a1N, a2N = st.avN, st.a1N, st.a2N
    av1 = st.av1

    def acc(wide, row, cv, c1=None, c2=None):
        if wide:
            avN[row] += cv
            if c1 is not None:
                a1N[row] += c1
                a2N[row] += c2
        else:
            av1[row] += cv.sum() if isinstance(cv, np.ndarray) else cv
            # narrow tangent adjoints are irrelevant: narrow tangents are zero

    for r in reversed(instrs):
        op = r["op"]
        o = r["or"]
        if op == AFFINE:
            k = r["k_out"]
            W = v1[r["w_rows"]].reshape(k, r["k_in"])
            xr = r["x_rows"]
            AO, AO1, AO2 = avN[o:o + k], a1N[o:o + k], a2N[o:o + k]
            GV, G1, G2 = W.T @ AO, W.T @ AO1, W.T @ AO2
            for i, rw in enumerate(xr):
                avN[rw] += GV[i]
                a1N[rw] += G1[i]
                a2N[rw] += G2[i]
            GW = AO @ vN[xr].T + AO1 @ t1N[xr].T + AO2 @ t2N[xr].T
            av1[r["w_rows"]] += GW.ravel()
            av1[r["b_rows"]] += AO.sum(axis=1)
            continue
        if r["ow"]:
            gv, g1, g2 = avN[o], a1N[o], a2N[o]
        else:
            gv, g1, g2 = av1[o], 0.0, 0.0
        if op == PSUM:
            avN[r["ar"]] += gv
            continue
        if op == TANGENT:
            if r["aw"]:  # narrow tangents are identically zero: nothing flows
                if r["aux"] == 0.0:
                    a1N[r["ar"]] += gv
                else:
                    a2N[r["ar"]] += gv
            continue
        aw, ar = r["aw"], r["ar"]
        av = vN[ar] if aw else v1[ar]
        a1 = t1N[ar] if aw else 0.0
        a2 = t2N[ar] if aw else 0.0
        if op <= DIV:
            bw, br = r["bw"], r["br"]
            bv = vN[br] if bw else v1[br]
            b1 = t1N[br] if bw else 0.0
            b2 = t2N[br] if bw else 0.0
            if op == ADD:
                acc(aw, ar, gv, g1, g2)
                acc(bw, br, gv, g1, g2)
            elif op == SUB:
                acc(aw, ar, gv, g1, g2)
                acc(bw, br, -gv, -g1, -g2)
            elif op == MUL:
                acc(aw, ar, gv * bv + g1 * b1 + g2 * b2, g1 * bv, g2 * bv)
                acc(bw, br, gv * av + g1 * a1 + g2 * a2, g1 * av, g2 * av)
            else:  # DIV: out = a/b
                inv = 1.0 / bv
                ov = av * inv
                acc(aw, ar, (gv - g1 * b1 * inv - g2 * b2 * inv) * inv,
                    g1 * inv, g2 * inv)
                pbv = -ov * inv
                # pb.t_k = (-out.t_k + out.v*b.t_k/b.v)/b.v
                o1 = (a1 - ov * b1) * inv
                o2 = (a2 - ov * b2) * inv
                pb1 = (-o1 + ov * b1 * inv) * inv
                pb2 = (-o2 + ov * b2 * inv) * inv
                acc(bw, br, gv * pbv + g1 * pb1 + g2 * pb2, g1 * pbv, g2 * pbv)
        elif op == EXP:
            ov = vN[o] if r["ow"] else v1[o]
            o1 = t1N[o] if r["ow"] else 0.0
            o2 = t2N[o] if r["ow"] else 0.0
            acc(aw, ar, gv * ov + g1 * o1 + g2 * o2, g1 * ov, g2 * ov)
        elif op == LN:
            d = 1.0 / av
            acc(aw, ar, (gv - (g1 * a1 + g2 * a2) * d) * d, g1 * d, g2 * d)
        elif op == TANH:
            ov = vN[o] if r["ow"] else v1[o]
            o1 = t1N[o] if r["ow"] else 0.0
            o2 = t2N[o] if r["ow"] else 0.0
            d = 1.0 - ov * ov
            acc(aw, ar, gv * d - 2.0 * ov * (g1 * o1 + g2 * o2), g1 * d, g2 * d)
        elif op == POW:
            c = r["aux"]
            q1 = c * av ** (c - 1.0)
            q2 = c * (c - 1.0) * av ** (c - 2.0)
            acc(aw, ar, gv * q1 + (g1 * a1 + g2 * a2) * q2, g1 * q1, g2 * q1)
        elif op == SQRT:
            ov = vN[o] if r["ow"] else v1[o]
            o1 = t1N[o] if r["ow"] else 0.0
            o2 = t2N[o] if r["ow"] else 0.0
            d = 0.5 / ov
            acc(aw, ar, gv * d - (g1 * o1 + g2 * o2) * d / ov, g1 * d, g2 * d)
        elif op == SIN:
            d = np.cos(av)
            s = vN[o] if r["ow"] else v1[o]
            acc(aw, ar, gv * d - s * (g1 * a1 + g2 * a2), g1 * d, g2 * d)
        elif op == COS:
            d = -np.sin(av)
            s = vN[o] if r["ow"] else v1[o]
            acc(aw, ar, gv * d - s * (g1 * a1 + g2 * a2), g1 * d, g2 * d)
        else:
            raise AssertionError(f"bad opcode {op}")
