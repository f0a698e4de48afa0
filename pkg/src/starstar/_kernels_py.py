"""Pure-Python kernel for consecutive-pair expansion and pair aggregation.

Same contract as the compiled module `starstar._kernels_cy`; selected as a
fallback by :mod:`starstar.kernels` when the extension is unavailable.
Inputs are int64/float64 numpy arrays; results are bit-identical to the
compiled path (same iteration and accumulation order).
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure-python"


def build_edges(obj_events, obj_offsets, timestamps):
    """Expand per-object ordered event runs into consecutive-pair edges.

    obj_events: event index per (object, position), grouped by object and
    ascending within each object's slice; obj_offsets delimits the slices.
    Returns (edge_obj, edge_pos, edge_in, edge_out, edge_perf) int64 arrays,
    edge_pos being the 2-based position of the pair inside its object run.
    """
    events = obj_events.tolist()
    offsets = obj_offsets.tolist()
    ts = timestamps.tolist()
    edge_obj, edge_pos, edge_in, edge_out, edge_perf = [], [], [], [], []
    for o in range(len(offsets) - 1):
        start, end = offsets[o], offsets[o + 1]
        for j in range(start + 1, end):
            prev, cur = events[j - 1], events[j]
            edge_obj.append(o)
            edge_pos.append(j - start + 1)
            edge_in.append(prev)
            edge_out.append(cur)
            edge_perf.append(ts[cur] - ts[prev])
    return (
        np.asarray(edge_obj, dtype=np.int64),
        np.asarray(edge_pos, dtype=np.int64),
        np.asarray(edge_in, dtype=np.int64),
        np.asarray(edge_out, dtype=np.int64),
        np.asarray(edge_perf, dtype=np.int64),
    )


def aggregate_pairs(edge_obj, edge_in, edge_out, edge_perf, obj_weights, act_codes, class_codes, n_acts):
    """Group edges by (object class, in-activity, out-activity).

    Returns {composite_key: [count, weight_sum, perf_sum]} where
    composite_key = (class_code * n_acts + in_act_code) * n_acts + out_act_code.
    """
    n_acts = int(n_acts)
    eo = edge_obj.tolist()
    ei = edge_in.tolist()
    eout = edge_out.tolist()
    ep = edge_perf.tolist()
    ow = obj_weights.tolist()
    ac = act_codes.tolist()
    cc = class_codes.tolist()
    acc = {}
    for k in range(len(eo)):
        o = eo[k]
        key = (cc[o] * n_acts + ac[ei[k]]) * n_acts + ac[eout[k]]
        hit = acc.get(key)
        if hit is None:
            acc[key] = [1, ow[o], ep[k]]
        else:
            hit[0] += 1
            hit[1] += ow[o]
            hit[2] += ep[k]
    return acc
