# Compiled replay kernels for frozen Programs.
#
# Semantics mirror numpy_exec exactly; opcodes mirror program.py.  Operands
# are addressed through (pointer, stride) pairs so narrow (width-one) slots
# reuse the same loops with stride zero; sequential accumulation keeps the
# reverse sweep deterministic.

from libc.math cimport exp, log, tanh, sqrt, sin, cos, pow

cdef enum:
    ADD, SUB, MUL, DIV, EXP_, LN, TANH_, POW_, SQRT_, SIN_, COS_, TANGENT, PSUM, AFFINE


cdef class Pack:
    cdef int[::1] op, arg_a, arg_b, out0, n_out, extra_ptr, extra_len, extra, slot_row
    cdef unsigned char[::1] slot_pool
    cdef double[::1] aux
    cdef int n_instr


def pack(op, arg_a, arg_b, out0, n_out, aux, extra_ptr, extra_len, extra,
         slot_pool, slot_row):
    cdef Pack p = Pack()
    import numpy as np
    p.op = np.ascontiguousarray(op, np.int32)
    p.arg_a = np.ascontiguousarray(arg_a, np.int32)
    p.arg_b = np.ascontiguousarray(arg_b, np.int32)
    p.out0 = np.ascontiguousarray(out0, np.int32)
    p.n_out = np.ascontiguousarray(n_out, np.int32)
    p.aux = np.ascontiguousarray(aux, np.float64)
    p.extra_ptr = np.ascontiguousarray(extra_ptr, np.int32)
    p.extra_len = np.ascontiguousarray(extra_len, np.int32)
    p.extra = np.ascontiguousarray(extra if len(extra) else np.zeros(1, np.int32), np.int32)
    p.slot_pool = np.ascontiguousarray(slot_pool, np.uint8)
    p.slot_row = np.ascontiguousarray(slot_row, np.int32)
    p.n_instr = len(p.op)
    return p


def forward(Pack pk,
            double[:, ::1] vN, double[:, ::1] t1N, double[:, ::1] t2N,
            double[::1] v1, double[::1] t11, double[::1] t21):
    cdef Py_ssize_t n = vN.shape[1]
    cdef Py_ssize_t i, p, m, j, k
    cdef int op, a, b, o, ar, br, orow, eptr, k_in, k_out, wr0, br0, xr
    cdef bint ow
    cdef Py_ssize_t sa, sb
    cdef double *pav
    cdef double *pa1
    cdef double *pa2
    cdef double *pbv
    cdef double *pb1
    cdef double *pb2
    cdef double *pov
    cdef double *po1
    cdef double *po2
    cdef double av, a1, a2, bv, b1, b2, ov, o1, o2, d, c, w, sv, s1, s2, bj

    for i in range(pk.n_instr):
        op = pk.op[i]
        o = pk.out0[i]
        if op == AFFINE:
            eptr = pk.extra_ptr[i]
            k_in = pk.extra[eptr]
            k_out = pk.extra[eptr + 1]
            wr0 = pk.slot_row[pk.extra[eptr + 2 + k_in]]
            br0 = pk.slot_row[pk.extra[eptr + 3 + k_in]]
            orow = pk.slot_row[o]
            for j in range(k_out):
                bj = v1[br0 + j]
                pov = &vN[orow + j, 0]
                po1 = &t1N[orow + j, 0]
                po2 = &t2N[orow + j, 0]
                for p in range(n):
                    pov[p] = bj
                    po1[p] = 0.0
                    po2[p] = 0.0
                for k in range(k_in):
                    w = v1[wr0 + j * k_in + k]
                    xr = pk.slot_row[pk.extra[eptr + 2 + k]]
                    pav = &vN[xr, 0]
                    pa1 = &t1N[xr, 0]
                    pa2 = &t2N[xr, 0]
                    for p in range(n):
                        pov[p] += w * pav[p]
                        po1[p] += w * pa1[p]
                        po2[p] += w * pa2[p]
            continue

        a = pk.arg_a[i]
        ar = pk.slot_row[a]
        if pk.slot_pool[a] == 0:
            pav = &vN[ar, 0]; pa1 = &t1N[ar, 0]; pa2 = &t2N[ar, 0]; sa = 1
        else:
            pav = &v1[ar]; pa1 = &t11[ar]; pa2 = &t21[ar]; sa = 0

        if op == PSUM:
            sv = 0.0; s1 = 0.0; s2 = 0.0
            for p in range(n):
                sv += pav[p]
                s1 += pa1[p]
                s2 += pa2[p]
            orow = pk.slot_row[o]
            v1[orow] = sv
            t11[orow] = s1
            t21[orow] = s2
            continue

        ow = pk.slot_pool[o] == 0
        orow = pk.slot_row[o]
        if ow:
            pov = &vN[orow, 0]; po1 = &t1N[orow, 0]; po2 = &t2N[orow, 0]; m = n
        else:
            pov = &v1[orow]; po1 = &t11[orow]; po2 = &t21[orow]; m = 1

        if op == TANGENT:
            if pk.aux[i] == 0.0:
                for p in range(m):
                    pov[p] = pa1[p * sa]
                    po1[p] = 0.0
                    po2[p] = 0.0
            else:
                for p in range(m):
                    pov[p] = pa2[p * sa]
                    po1[p] = 0.0
                    po2[p] = 0.0
            continue

        if op <= DIV:
            b = pk.arg_b[i]
            br = pk.slot_row[b]
            if pk.slot_pool[b] == 0:
                pbv = &vN[br, 0]; pb1 = &t1N[br, 0]; pb2 = &t2N[br, 0]; sb = 1
            else:
                pbv = &v1[br]; pb1 = &t11[br]; pb2 = &t21[br]; sb = 0
            if op == ADD:
                for p in range(m):
                    pov[p] = pav[p * sa] + pbv[p * sb]
                    po1[p] = pa1[p * sa] + pb1[p * sb]
                    po2[p] = pa2[p * sa] + pb2[p * sb]
            elif op == SUB:
                for p in range(m):
                    pov[p] = pav[p * sa] - pbv[p * sb]
                    po1[p] = pa1[p * sa] - pb1[p * sb]
                    po2[p] = pa2[p * sa] - pb2[p * sb]
            elif op == MUL:
                for p in range(m):
                    av = pav[p * sa]; bv = pbv[p * sb]
                    pov[p] = av * bv
                    po1[p] = pa1[p * sa] * bv + av * pb1[p * sb]
                    po2[p] = pa2[p * sa] * bv + av * pb2[p * sb]
            else:
                for p in range(m):
                    av = pav[p * sa]; bv = pbv[p * sb]
                    d = 1.0 / bv
                    ov = av * d
                    pov[p] = ov
                    po1[p] = (pa1[p * sa] - ov * pb1[p * sb]) * d
                    po2[p] = (pa2[p * sa] - ov * pb2[p * sb]) * d
            continue

        if op == EXP_:
            for p in range(m):
                ov = exp(pav[p * sa])
                pov[p] = ov
                po1[p] = ov * pa1[p * sa]
                po2[p] = ov * pa2[p * sa]
        elif op == LN:
            for p in range(m):
                av = pav[p * sa]
                d = 1.0 / av
                pov[p] = log(av)
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]
        elif op == TANH_:
            for p in range(m):
                ov = tanh(pav[p * sa])
                d = 1.0 - ov * ov
                pov[p] = ov
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]
        elif op == POW_:
            c = pk.aux[i]
            for p in range(m):
                av = pav[p * sa]
                pov[p] = pow(av, c)
                d = c * pow(av, c - 1.0)
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]
        elif op == SQRT_:
            for p in range(m):
                ov = sqrt(pav[p * sa])
                d = 0.5 / ov
                pov[p] = ov
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]
        elif op == SIN_:
            for p in range(m):
                av = pav[p * sa]
                d = cos(av)
                pov[p] = sin(av)
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]
        elif op == COS_:
            for p in range(m):
                av = pav[p * sa]
                d = -sin(av)
                pov[p] = cos(av)
                po1[p] = d * pa1[p * sa]
                po2[p] = d * pa2[p * sa]


def reverse(Pack pk,
            double[:, ::1] vN, double[:, ::1] t1N, double[:, ::1] t2N,
            double[::1] v1, double[::1] t11, double[::1] t21,
            double[:, ::1] avN, double[:, ::1] a1N, double[:, ::1] a2N,
            double[::1] av1, double[::1] a11, double[::1] a21):
    cdef Py_ssize_t n = vN.shape[1]
    cdef Py_ssize_t i, p, m, j, k
    cdef int op, a, b, o, ar, br, orow, eptr, k_in, k_out, wr0, br0, xr
    cdef bint ow
    cdef Py_ssize_t sa, sb
    cdef double *pav
    cdef double *pa1
    cdef double *pa2
    cdef double *pbv
    cdef double *pb1
    cdef double *pb2
    cdef double *pov
    cdef double *po1
    cdef double *po2
    cdef double *qav
    cdef double *qa1
    cdef double *qa2
    cdef double *qbv
    cdef double *qb1
    cdef double *qb2
    cdef double *qov
    cdef double *qo1
    cdef double *qo2
    cdef double av, a1, a2, bv, b1, b2, ov, o1, o2, gv, g1, g2
    cdef double d, c, w, sv, q1, q2, inv, pbv_, pb1_, pb2_, gw

    for i in range(pk.n_instr - 1, -1, -1):
        op = pk.op[i]
        o = pk.out0[i]
        if op == AFFINE:
            eptr = pk.extra_ptr[i]
            k_in = pk.extra[eptr]
            k_out = pk.extra[eptr + 1]
            wr0 = pk.slot_row[pk.extra[eptr + 2 + k_in]]
            br0 = pk.slot_row[pk.extra[eptr + 3 + k_in]]
            orow = pk.slot_row[o]
            for j in range(k_out):
                qov = &avN[orow + j, 0]
                qo1 = &a1N[orow + j, 0]
                qo2 = &a2N[orow + j, 0]
                sv = 0.0
                for p in range(n):
                    sv += qov[p]
                av1[br0 + j] += sv
                for k in range(k_in):
                    xr = pk.slot_row[pk.extra[eptr + 2 + k]]
                    w = v1[wr0 + j * k_in + k]
                    pav = &vN[xr, 0]; pa1 = &t1N[xr, 0]; pa2 = &t2N[xr, 0]
                    qav = &avN[xr, 0]; qa1 = &a1N[xr, 0]; qa2 = &a2N[xr, 0]
                    gw = 0.0
                    for p in range(n):
                        gw += qov[p] * pav[p] + qo1[p] * pa1[p] + qo2[p] * pa2[p]
                        qav[p] += w * qov[p]
                        qa1[p] += w * qo1[p]
                        qa2[p] += w * qo2[p]
                    av1[wr0 + j * k_in + k] += gw
            continue

        a = pk.arg_a[i]
        ar = pk.slot_row[a]
        if pk.slot_pool[a] == 0:
            pav = &vN[ar, 0]; pa1 = &t1N[ar, 0]; pa2 = &t2N[ar, 0]
            qav = &avN[ar, 0]; qa1 = &a1N[ar, 0]; qa2 = &a2N[ar, 0]; sa = 1
        else:
            pav = &v1[ar]; pa1 = &t11[ar]; pa2 = &t21[ar]
            qav = &av1[ar]; qa1 = &a11[ar]; qa2 = &a21[ar]; sa = 0

        if op == PSUM:
            orow = pk.slot_row[o]
            gv = av1[orow]
            for p in range(n):
                qav[p] += gv
            continue

        ow = pk.slot_pool[o] == 0
        orow = pk.slot_row[o]
        if ow:
            pov = &vN[orow, 0]; po1 = &t1N[orow, 0]; po2 = &t2N[orow, 0]
            qov = &avN[orow, 0]; qo1 = &a1N[orow, 0]; qo2 = &a2N[orow, 0]; m = n
        else:
            pov = &v1[orow]; po1 = &t11[orow]; po2 = &t21[orow]
            qov = &av1[orow]; qo1 = &a11[orow]; qo2 = &a21[orow]; m = 1

        if op == TANGENT:
            if pk.aux[i] == 0.0:
                for p in range(m):
                    qa1[p * sa] += qov[p]
            else:
                for p in range(m):
                    qa2[p * sa] += qov[p]
            continue

        if op <= DIV:
            b = pk.arg_b[i]
            br = pk.slot_row[b]
            if pk.slot_pool[b] == 0:
                pbv = &vN[br, 0]; pb1 = &t1N[br, 0]; pb2 = &t2N[br, 0]
                qbv = &avN[br, 0]; qb1 = &a1N[br, 0]; qb2 = &a2N[br, 0]; sb = 1
            else:
                pbv = &v1[br]; pb1 = &t11[br]; pb2 = &t21[br]
                qbv = &av1[br]; qb1 = &a11[br]; qb2 = &a21[br]; sb = 0
            if op == ADD:
                for p in range(m):
                    gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                    qav[p * sa] += gv; qa1[p * sa] += g1; qa2[p * sa] += g2
                    qbv[p * sb] += gv; qb1[p * sb] += g1; qb2[p * sb] += g2
            elif op == SUB:
                for p in range(m):
                    gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                    qav[p * sa] += gv; qa1[p * sa] += g1; qa2[p * sa] += g2
                    qbv[p * sb] -= gv; qb1[p * sb] -= g1; qb2[p * sb] -= g2
            elif op == MUL:
                for p in range(m):
                    gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                    av = pav[p * sa]; a1 = pa1[p * sa]; a2 = pa2[p * sa]
                    bv = pbv[p * sb]; b1 = pb1[p * sb]; b2 = pb2[p * sb]
                    qav[p * sa] += gv * bv + g1 * b1 + g2 * b2
                    qa1[p * sa] += g1 * bv
                    qa2[p * sa] += g2 * bv
                    qbv[p * sb] += gv * av + g1 * a1 + g2 * a2
                    qb1[p * sb] += g1 * av
                    qb2[p * sb] += g2 * av
            else:
                for p in range(m):
                    gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                    av = pav[p * sa]; a1 = pa1[p * sa]; a2 = pa2[p * sa]
                    bv = pbv[p * sb]; b1 = pb1[p * sb]; b2 = pb2[p * sb]
                    inv = 1.0 / bv
                    ov = av * inv
                    o1 = (a1 - ov * b1) * inv
                    o2 = (a2 - ov * b2) * inv
                    qav[p * sa] += (gv - (g1 * b1 + g2 * b2) * inv) * inv
                    qa1[p * sa] += g1 * inv
                    qa2[p * sa] += g2 * inv
                    pbv_ = -ov * inv
                    pb1_ = (-o1 + ov * b1 * inv) * inv
                    pb2_ = (-o2 + ov * b2 * inv) * inv
                    qbv[p * sb] += gv * pbv_ + g1 * pb1_ + g2 * pb2_
                    qb1[p * sb] += g1 * pbv_
                    qb2[p * sb] += g2 * pbv_
            continue

        if op == EXP_:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                ov = pov[p]; o1 = po1[p]; o2 = po2[p]
                qav[p * sa] += gv * ov + g1 * o1 + g2 * o2
                qa1[p * sa] += g1 * ov
                qa2[p * sa] += g2 * ov
        elif op == LN:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                av = pav[p * sa]
                d = 1.0 / av
                qav[p * sa] += (gv - (g1 * pa1[p * sa] + g2 * pa2[p * sa]) * d) * d
                qa1[p * sa] += g1 * d
                qa2[p * sa] += g2 * d
        elif op == TANH_:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                ov = pov[p]
                d = 1.0 - ov * ov
                qav[p * sa] += gv * d - 2.0 * ov * (g1 * po1[p] + g2 * po2[p])
                qa1[p * sa] += g1 * d
                qa2[p * sa] += g2 * d
        elif op == POW_:
            c = pk.aux[i]
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                av = pav[p * sa]
                q1 = c * pow(av, c - 1.0)
                q2 = c * (c - 1.0) * pow(av, c - 2.0)
                qav[p * sa] += gv * q1 + (g1 * pa1[p * sa] + g2 * pa2[p * sa]) * q2
                qa1[p * sa] += g1 * q1
                qa2[p * sa] += g2 * q1
        elif op == SQRT_:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                ov = pov[p]
                d = 0.5 / ov
                qav[p * sa] += gv * d - (g1 * po1[p] + g2 * po2[p]) * d / ov
                qa1[p * sa] += g1 * d
                qa2[p * sa] += g2 * d
        elif op == SIN_:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                av = pav[p * sa]
                d = cos(av)
                qav[p * sa] += gv * d - pov[p] * (g1 * pa1[p * sa] + g2 * pa2[p * sa])
                qa1[p * sa] += g1 * d
                qa2[p * sa] += g2 * d
        elif op == COS_:
            for p in range(m):
                gv = qov[p]; g1 = qo1[p]; g2 = qo2[p]
                av = pav[p * sa]
                d = -sin(av)
                qav[p * sa] += gv * d - pov[p] * (g1 * pa1[p * sa] + g2 * pa2[p * sa])
                qa1[p * sa] += g1 * d
                qa2[p * sa] += g2 * d
