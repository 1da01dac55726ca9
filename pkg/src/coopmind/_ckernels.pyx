# Compiled stride-1 2-D convolution kernels (forward and both backward
# passes).  These are the hot inner loops of the state feature
# extractor; a numpy fallback with identical semantics lives in
# coopmind.nn.conv and is selected at import when this module is
# unavailable.
#
# Loop structure: kernel-offset outermost with precomputed valid output
# ranges, so the innermost width loop is branch-free and walks both the
# input and output rows contiguously.

cimport cython
from cython cimport floating
from cython.parallel cimport prange


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_forward(floating[:, :, :, ::1] x, floating[:, :, :, ::1] w,
                   floating[::1] b, int ph, int pw,
                   floating[:, :, :, ::1] out):
    cdef Py_ssize_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t F = w.shape[0], KH = w.shape[2], KW = w.shape[3]
    cdef Py_ssize_t OH = out.shape[2], OW = out.shape[3]
    cdef Py_ssize_t n, f, c, kh, kw, oh, ow, oh0, oh1, ow0, ow1, dh, dw
    cdef floating wv, bv

    with nogil:
        for n in prange(N, schedule='static'):
            for f in range(F):
                bv = b[f]
                for oh in range(OH):
                    for ow in range(OW):
                        out[n, f, oh, ow] = bv
            for c in range(C):
                for kh in range(KH):
                    dh = kh - ph
                    oh0 = -dh if dh < 0 else 0
                    oh1 = H - dh if H - dh < OH else OH
                    if oh1 <= oh0:
                        continue
                    for kw in range(KW):
                        dw = kw - pw
                        ow0 = -dw if dw < 0 else 0
                        ow1 = W - dw if W - dw < OW else OW
                        if ow1 <= ow0:
                            continue
                        for f in range(F):
                            wv = w[f, c, kh, kw]
                            for oh in range(oh0, oh1):
                                for ow in range(ow0, ow1):
                                    out[n, f, oh, ow] += wv * x[n, c, oh + dh, ow + dw]


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_backward_input(floating[:, :, :, ::1] gout, floating[:, :, :, ::1] w,
                          int ph, int pw, floating[:, :, :, ::1] gx):
    cdef Py_ssize_t N = gx.shape[0], C = gx.shape[1], H = gx.shape[2], W = gx.shape[3]
    cdef Py_ssize_t F = w.shape[0], KH = w.shape[2], KW = w.shape[3]
    cdef Py_ssize_t OH = gout.shape[2], OW = gout.shape[3]
    cdef Py_ssize_t n, f, c, kh, kw, oh, ow, oh0, oh1, ow0, ow1, dh, dw
    cdef floating wv

    with nogil:
        for n in prange(N, schedule='static'):
            for c in range(C):
                for kh in range(KH):
                    dh = kh - ph
                    oh0 = -dh if dh < 0 else 0
                    oh1 = H - dh if H - dh < OH else OH
                    if oh1 > oh0:
                        for kw in range(KW):
                            dw = kw - pw
                            ow0 = -dw if dw < 0 else 0
                            ow1 = W - dw if W - dw < OW else OW
                            if ow1 > ow0:
                                for f in range(F):
                                    wv = w[f, c, kh, kw]
                                    for oh in range(oh0, oh1):
                                        for ow in range(ow0, ow1):
                                            gx[n, c, oh + dh, ow + dw] += wv * gout[n, f, oh, ow]


@cython.boundscheck(False)
@cython.wraparound(False)
def conv2d_backward_weight(floating[:, :, :, ::1] x, floating[:, :, :, ::1] gout,
                           int ph, int pw, floating[:, :, :, ::1] gw,
                           floating[::1] gb):
    cdef Py_ssize_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t F = gw.shape[0], KH = gw.shape[2], KW = gw.shape[3]
    cdef Py_ssize_t OH = gout.shape[2], OW = gout.shape[3]
    cdef Py_ssize_t n, f, c, kh, kw, oh, ow, oh0, oh1, ow0, ow1, dh, dw
    cdef floating acc, g

    # Parallel over output filters: each thread owns disjoint rows of
    # gw and entries of gb, so no accumulation races.
    with nogil:
        for f in prange(F, schedule='static'):
            acc = 0
            for n in range(N):
                for oh in range(OH):
                    for ow in range(OW):
                        acc = acc + gout[n, f, oh, ow]
            gb[f] += acc
            for c in range(C):
                for kh in range(KH):
                    dh = kh - ph
                    oh0 = -dh if dh < 0 else 0
                    oh1 = H - dh if H - dh < OH else OH
                    if oh1 > oh0:
                        for kw in range(KW):
                            dw = kw - pw
                            ow0 = -dw if dw < 0 else 0
                            ow1 = W - dw if W - dw < OW else OW
                            if ow1 > ow0:
                                acc = 0
                                for n in range(N):
                                    for oh in range(oh0, oh1):
                                        for ow in range(ow0, ow1):
                                            acc = acc + gout[n, f, oh, ow] * x[n, c, oh + dh, ow + dw]
                                gw[f, c, kh, kw] += acc
