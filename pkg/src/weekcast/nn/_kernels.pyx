# Compiled conv/pool kernels. Signatures mirror kernels_py; arrays are
# C-contiguous float64 throughout.

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv1d_forward(double[:, :, ::1] x, double[:, :, ::1] w, double[::1] b):
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t length = x.shape[1]
    cdef Py_ssize_t channels = x.shape[2]
    cdef Py_ssize_t filters = w.shape[0]
    cdef Py_ssize_t kernel = w.shape[1]
    cdef Py_ssize_t positions = length - kernel + 1
    out = np.empty((batch, positions, filters), dtype=np.float64)
    cdef double[:, :, ::1] y = out
    cdef Py_ssize_t i, p, f, k, c
    cdef double acc
    with nogil:
        for i in range(batch):
            for p in range(positions):
                for f in range(filters):
                    acc = b[f]
                    for k in range(kernel):
                        for c in range(channels):
                            acc += x[i, p + k, c] * w[f, k, c]
                    y[i, p, f] = acc
    return out


def conv1d_backward(double[:, :, ::1] x, double[:, :, ::1] w, double[:, :, ::1] gy):
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t length = x.shape[1]
    cdef Py_ssize_t channels = x.shape[2]
    cdef Py_ssize_t filters = w.shape[0]
    cdef Py_ssize_t kernel = w.shape[1]
    cdef Py_ssize_t positions = gy.shape[1]
    gx_arr = np.zeros((batch, length, channels), dtype=np.float64)
    gw_arr = np.zeros((filters, kernel, channels), dtype=np.float64)
    gb_arr = np.zeros(filters, dtype=np.float64)
    cdef double[:, :, ::1] gx = gx_arr
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t i, p, f, k, c
    cdef double g
    with nogil:
        for i in range(batch):
            for p in range(positions):
                for f in range(filters):
                    g = gy[i, p, f]
                    gb[f] += g
                    for k in range(kernel):
                        for c in range(channels):
                            gw[f, k, c] += g * x[i, p + k, c]
                            gx[i, p + k, c] += g * w[f, k, c]
    return gx_arr, gw_arr, gb_arr


def maxpool1d_forward(double[:, :, ::1] x, Py_ssize_t pool):
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t length = x.shape[1]
    cdef Py_ssize_t channels = x.shape[2]
    cdef Py_ssize_t out_len = length // pool
    vals_arr = np.empty((batch, out_len, channels), dtype=np.float64)
    idx_arr = np.zeros((batch, out_len, channels), dtype=np.int64)
    cdef double[:, :, ::1] vals = vals_arr
    cdef cnp.int64_t[:, :, ::1] idx = idx_arr
    cdef Py_ssize_t i, q, c, k, best_k
    cdef double best, cand
    with nogil:
        for i in range(batch):
            for q in range(out_len):
                for c in range(channels):
                    best = x[i, q * pool, c]
                    best_k = 0
                    for k in range(1, pool):
                        cand = x[i, q * pool + k, c]
                        if cand > best:  # ties keep the first maximal index
                            best = cand
                            best_k = k
                    vals[i, q, c] = best
                    idx[i, q, c] = best_k
    return vals_arr, idx_arr


def maxpool1d_backward(cnp.int64_t[:, :, ::1] idx, double[:, :, ::1] gy,
                       Py_ssize_t length, Py_ssize_t pool):
    cdef Py_ssize_t batch = gy.shape[0]
    cdef Py_ssize_t out_len = gy.shape[1]
    cdef Py_ssize_t channels = gy.shape[2]
    gx_arr = np.zeros((batch, length, channels), dtype=np.float64)
    cdef double[:, :, ::1] gx = gx_arr
    cdef Py_ssize_t i, q, c
    with nogil:
        for i in range(batch):
            for q in range(out_len):
                for c in range(channels):
                    gx[i, q * pool + idx[i, q, c], c] += gy[i, q, c]
    return gx_arr
