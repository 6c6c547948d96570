"""Exact offline optimum for release-dated instances.

The server starts at the origin at time 0 and may wait; for a fixed service
order the cheapest feasible schedule is the waiting fold

    t_j = max(t_{j-1} + d(prev, next), release_j),   t_0 = 0 at the origin,

and the closed variant appends the return leg after the last service.  Any
trajectory induces the service order of its serve events, and its completion
is bounded below by that order's fold (the fold only ever waits at request
positions, which is enough: shifting any other waiting later along the same
order never hurts).  Minimizing the fold over all orders is therefore exact,
which the subset dynamic program below does in O(2^n * n^2); a factorial
brute force over the same fold serves as an independent cross-check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .instance import CLOSED, Instance

DP_CAP = 18
BRUTE_CAP = 10


@dataclass(frozen=True)
class OptResult:
    makespan: float
    order: tuple
    per_step_times: tuple


def _geometry(inst: Instance):
    space = inst.space
    pts = [r.point for r in inst.requests]
    o = space.origin()
    d0 = [space.distance(o, p) for p in pts]
    dret = [space.distance(p, o) for p in pts]
    dmat = [[space.distance(a, b) for b in pts] for a in pts]
    rel = [r.release for r in inst.requests]
    return d0, dret, dmat, rel


def _fold(order, d0, dret, dmat, rel, closed: bool):
    t = 0.0
    times = []
    prev = None
    for j in order:
        step = d0[j] if prev is None else dmat[prev][j]
        t = max(t + step, rel[j])
        times.append(t)
        prev = j
    if closed and prev is not None:
        t += dret[prev]
    return t, times


def opt_makespan(inst: Instance) -> OptResult:
    """Exact optimum via subset DP keyed on (visited mask, last request)."""
    n = inst.n
    if n == 0:
        return OptResult(0.0, (), ())
    if n > DP_CAP:
        raise ValueError(f"oracle cap exceeded: n={n} > {DP_CAP}")
    d0, dret, dmat, rel = _geometry(inst)
    closed = inst.variant == CLOSED
    if n <= 3:
        return _best_by_enumeration(inst, d0, dret, dmat, rel, closed)

    full = (1 << n) - 1
    dist = np.asarray(dmat)
    relv = np.asarray(rel)
    dp = np.full((full + 1, n), np.inf)
    parent = np.full((full + 1, n), -1, dtype=np.int8)
    for j in range(n):
        dp[1 << j, j] = max(d0[j], rel[j])

    for layer in _masks_by_popcount(n):
        if layer.ndim == 0 or len(layer) == 0:
            continue
        for j in range(n):
            bit = 1 << j
            sel = layer[(layer & bit) != 0]
            if len(sel) == 0:
                continue
            prev = sel ^ bit
            cand = np.maximum(dp[prev] + dist[:, j], relv[j])
            best = np.argmin(cand, axis=1)
            rows = np.arange(len(sel))
            dp[sel, j] = cand[rows, best]
            parent[sel, j] = best

    finals = dp[full] + (np.asarray(dret) if closed else 0.0)
    last = int(np.argmin(finals))
    makespan = float(finals[last])

    order = []
    mask, j = full, last
    while j >= 0:
        order.append(j)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj if mask else -1
    order.reverse()
    _, times = _fold(order, d0, dret, dmat, rel, closed)
    return OptResult(makespan, tuple(i + 1 for i in order), tuple(times))


def _best_by_enumeration(inst, d0, dret, dmat, rel, closed):
    n = inst.n
    best = None
    for perm in itertools.permutations(range(n)):
        t, times = _fold(perm, d0, dret, dmat, rel, closed)
        if best is None or t < best[0]:
            best = (t, perm, times)
    t, perm, times = best
    return OptResult(t, tuple(i + 1 for i in perm), tuple(times))


def opt_bruteforce(inst: Instance) -> OptResult:
    """Same contract as :func:`opt_makespan` via explicit n! enumeration."""
    n = inst.n
    if n == 0:
        return OptResult(0.0, (), ())
    if n > BRUTE_CAP:
        raise ValueError(f"brute-force cap exceeded: n={n} > {BRUTE_CAP}")
    d0, dret, dmat, rel = _geometry(inst)
    return _best_by_enumeration(inst, d0, dret, dmat, rel, inst.variant == CLOSED)


@lru_cache(maxsize=None)
def _masks_by_popcount(n: int):
    """All masks over n bits with popcount >= 2, grouped and ordered by popcount."""
    masks = np.arange(1 << n, dtype=np.int64)
    pops = np.zeros(1 << n, dtype=np.int8)
    for j in range(n):
        pops += ((masks >> j) & 1).astype(np.int8)
    return tuple(masks[pops == k] for k in range(2, n + 1))
