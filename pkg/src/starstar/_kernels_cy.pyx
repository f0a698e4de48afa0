# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel for consecutive-pair expansion and pair aggregation.

Contract mirrors `starstar._kernels_py`; see there for argument semantics.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


def build_edges(cnp.int64_t[::1] obj_events, cnp.int64_t[::1] obj_offsets, cnp.int64_t[::1] timestamps):
    cdef Py_ssize_t n_obj = obj_offsets.shape[0] - 1
    cdef Py_ssize_t o, j, start, end
    cdef Py_ssize_t n_edges = 0
    for o in range(n_obj):
        if obj_offsets[o + 1] - obj_offsets[o] > 1:
            n_edges += obj_offsets[o + 1] - obj_offsets[o] - 1

    edge_obj_arr = np.empty(n_edges, dtype=np.int64)
    edge_pos_arr = np.empty(n_edges, dtype=np.int64)
    edge_in_arr = np.empty(n_edges, dtype=np.int64)
    edge_out_arr = np.empty(n_edges, dtype=np.int64)
    edge_perf_arr = np.empty(n_edges, dtype=np.int64)
    cdef cnp.int64_t[::1] edge_obj = edge_obj_arr
    cdef cnp.int64_t[::1] edge_pos = edge_pos_arr
    cdef cnp.int64_t[::1] edge_in = edge_in_arr
    cdef cnp.int64_t[::1] edge_out = edge_out_arr
    cdef cnp.int64_t[::1] edge_perf = edge_perf_arr

    cdef Py_ssize_t idx = 0
    cdef cnp.int64_t prev, cur
    for o in range(n_obj):
        start = obj_offsets[o]
        end = obj_offsets[o + 1]
        for j in range(start + 1, end):
            prev = obj_events[j - 1]
            cur = obj_events[j]
            edge_obj[idx] = o
            edge_pos[idx] = j - start + 1
            edge_in[idx] = prev
            edge_out[idx] = cur
            edge_perf[idx] = timestamps[cur] - timestamps[prev]
            idx += 1
    return edge_obj_arr, edge_pos_arr, edge_in_arr, edge_out_arr, edge_perf_arr


def aggregate_pairs(
    cnp.int64_t[::1] edge_obj,
    cnp.int64_t[::1] edge_in,
    cnp.int64_t[::1] edge_out,
    cnp.int64_t[::1] edge_perf,
    double[::1] obj_weights,
    cnp.int64_t[::1] act_codes,
    cnp.int64_t[::1] class_codes,
    long long n_acts,
):
    cdef Py_ssize_t n = edge_obj.shape[0]
    cdef Py_ssize_t k
    cdef cnp.int64_t o, key
    cdef dict acc = {}
    for k in range(n):
        o = edge_obj[k]
        key = (class_codes[o] * n_acts + act_codes[edge_in[k]]) * n_acts + act_codes[edge_out[k]]
        hit = acc.get(key)
        if hit is None:
            acc[key] = [1, obj_weights[o], edge_perf[k]]
        else:
            hit[0] += 1
            hit[1] += obj_weights[o]
            hit[2] += edge_perf[k]
    return acc
