"""Independent brute-force oracles used only by the test suite."""

from __future__ import annotations

import numpy as np


def balance_equation_solve(birth_rates, death_rates) -> np.ndarray:
    """Stationary distribution from the full rate matrix via dense GTH
    elimination (state-reduction); subtraction-free, so it stays accurate on
    chains whose probabilities span many orders of magnitude.  Independent of
    the product-form path it checks."""
    births = np.asarray(birth_rates, dtype=float)
    deaths = np.asarray(death_rates, dtype=float)
    n = len(births) + 1
    q = np.zeros((n, n))
    for i in range(n - 1):
        q[i, i + 1] = births[i]
        q[i + 1, i] = deaths[i]

    for k in range(n - 1, 0, -1):
        s = q[k, :k].sum()
        q[:k, k] /= s
        for i in range(k):
            if q[i, k]:
                q[i, :k] += q[i, k] * q[k, :k]
                q[i, i] = 0.0
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ q[:k, k]
    return pi / pi.sum()


def erlang_b_direct(servers: int, offered: float) -> float:
    """Erlang-B from the definition, via exact term accumulation."""
    from math import factorial

    terms = [offered**k / factorial(k) for k in range(servers + 1)]
    return terms[-1] / sum(terms)


def greedy_layer_packing(budget, sessions):
    """Round-robin layer distribution by priority rank.

    Start every session at its minimum; hand out one enhanced layer at a
    time, highest-priority session first, while the budget allows.
    Returns the per-session layer counts.
    """
    layers = [s.min_layers for s in sessions]
    spent = sum(s.base_bw + s.layer_bw * s.min_layers for s in sessions)
    while True:
        progressed = False
        for idx, s in enumerate(sessions):
            if layers[idx] < s.max_layers and spent + s.layer_bw <= budget + 1e-12:
                layers[idx] += 1
                spent += s.layer_bw
                progressed = True
        if not progressed:
            break
    return layers


def pairwise_edge_conflicts(plan, topo):
    """Exhaustive O(n^2) scan for interfering pairs sharing an edge band."""
    ids = sorted(plan.femto_assignment)
    bad = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if plan._interfering(topo, a, b):
                ea = plan.femto_assignment[a].edge_label
                eb = plan.femto_assignment[b].edge_label
                if ea == eb:
                    bad.append((a, b))
    return bad
