"""Per-node loop reference implementations of the two layer propagations.

No matrix products over the node dimension: each node's output is assembled
from explicit neighbor sums, independently of the engine's vectorized path.
"""

from __future__ import annotations

import math

import numpy as np

from vargraph.mlgraph import MlGraph


def reference_gcn_forward(graph: MlGraph, weights, biases) -> np.ndarray:
    n = graph.num_nodes
    adj = {}  # (v, u) -> weight, with self loops
    for (u, v), w in zip(graph.edges, graph.edge_weights):
        adj[(int(v), int(u))] = adj.get((int(v), int(u)), 0.0) + float(w)
    for v in range(n):
        adj[(v, v)] = adj.get((v, v), 0.0) + 1.0
    degree = [0.0] * n
    for (v, _u), w in adj.items():
        degree[v] += w

    h = [row.copy() for row in graph.node_features]
    last = len(weights) - 1
    for layer, (w_mat, b_vec) in enumerate(zip(weights, biases)):
        transformed = [row @ w_mat for row in h]
        new_h = []
        for v in range(n):
            acc = np.zeros(w_mat.shape[1])
            for u in range(n):
                weight = adj.get((v, u))
                if weight:
                    acc += weight / math.sqrt(degree[v] * degree[u]) * transformed[u]
            acc += b_vec
            if layer != last:
                acc = np.maximum(acc, 0.0)
            new_h.append(acc)
        h = new_h
    return np.vstack(h)


def reference_sage_forward(graph: MlGraph, weights, biases) -> np.ndarray:
    n = graph.num_nodes
    in_neighbors: dict[int, list[int]] = {v: [] for v in range(n)}
    for u, v in graph.edges:
        in_neighbors[int(v)].append(int(u))

    h = [row.copy() for row in graph.node_features]
    last = len(weights) - 1
    for layer, (w_mat, b_vec) in enumerate(zip(weights, biases)):
        new_h = []
        for v in range(n):
            if in_neighbors[v]:
                mean = sum(h[u] for u in in_neighbors[v]) / len(in_neighbors[v])
            else:
                mean = np.zeros_like(h[v])
            combined = np.concatenate([h[v], mean])
            out = combined @ w_mat + b_vec
            if layer != last:
                out = np.maximum(out, 0.0)
            new_h.append(out)
        h = new_h
    return np.vstack(h)
