"""Recursive bisection engine behind the parametric and weighted solvers.

One pass of the engine computes the optimal pseudoflow alpha* whose
reduction vector is the (weighted) minimum-norm point, by recursively
splitting node blocks with minimum cuts at pivot levels:

* a block with positive total weight pivots at sum(r) / sum(w), the unique
  level that zero-sums the shifted unary terms;
* a block of all-zero weights is the uniform-epsilon limit of the weighted
  problem, which degenerates to the unweighted rule (pivot at mean r);
* a block containing anchored nodes pivots at the mean anchor value, and
  anchors are pinned to a side with infinite terminal arcs.

When a block's cut is trivial the block is one level set; the final cut's
flow already routes every node's excess, so the equalizing interior flows
are harvested from it directly.  Crossing edges of nontrivial cuts are
saturated and folded into the diagonal of the high-side endpoint.

The engine records, per node, the level its block terminated at and the
flip thresholds governing level-set membership:
``i in U1(beta) iff beta > flip_lo[i]`` and
``i in U2(beta) iff beta >= flip_hi[i]``.
For positive-weight nodes both flips equal r_i / w_i.  Zero-weight nodes
fused into a mixed block flip with the block; zero-weight nodes resolved
inside an all-zero block get +/-inf flips by the sign of their reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .maxflow import FlowNetwork, max_flow, min_cut
from .qbm import QuadraticBinaryProblem

TERM_TOL = 1e-9  # relative tolerance for "block is one level set"
ZERO_W_TOL = 1e-12


@dataclass
class ParametricSolution:
    """Full output of a parametric solve."""

    problem: QuadraticBinaryProblem
    weights: np.ndarray
    alpha: np.ndarray
    levels: np.ndarray      # target reduction value per node
    flip_lo: np.ndarray     # i in U1(beta)  iff  beta >  flip_lo[i]
    flip_hi: np.ndarray     # i in U2(beta)  iff  beta >= flip_hi[i]
    anchor_mask: np.ndarray | None = None

    def interior(self) -> np.ndarray:
        """Mask of non-anchor nodes."""
        if self.anchor_mask is None:
            return np.ones(self.problem.n, dtype=bool)
        return ~self.anchor_mask

    def u1(self, beta: float) -> set:
        m = (beta > self.flip_lo) & self.interior()
        return set(int(i) for i in np.nonzero(m)[0])

    def u2(self, beta: float) -> set:
        m = (beta >= self.flip_hi) & self.interior()
        return set(int(i) for i in np.nonzero(m)[0])

    def breakpoints(self) -> np.ndarray:
        f = self.flip_hi[self.interior()]
        return np.unique(f[np.isfinite(f)])


def _build_block_network(a_vals, inf_src, inf_snk, lu, lv, caps) -> FlowNetwork:
    src = np.where(inf_src, np.inf, np.maximum(a_vals, 0.0))
    snk = np.where(inf_snk, np.inf, np.maximum(-a_vals, 0.0))
    u = np.concatenate([lu, lv])
    v = np.concatenate([lv, lu])
    c = np.concatenate([0.5 * caps, 0.5 * caps])
    return FlowNetwork(len(a_vals), src, snk, u, v, c)


def solve_parametric(problem: QuadraticBinaryProblem, weights=None,
                     anchor_mask=None, anchor_values=None,
                     method: str = "auto") -> ParametricSolution:
    """Run the recursive bisection to optimality.

    Parameters
    ----------
    problem : QuadraticBinaryProblem
    weights : array of nonnegative node weights, default all ones.
    anchor_mask, anchor_values : optional anchored-node specification.
        Anchored nodes are pinned at their value: their membership flips
        exactly there regardless of flow (infinite-weight limit).
    method : flow solver backend passed through to max_flow.
    """
    n = problem.n
    if weights is None:
        weights = np.ones(n)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise DimensionMismatch(f"weights must have length {n}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DimensionMismatch("weights must be finite and nonnegative")
    if anchor_mask is None:
        anchor_mask = np.zeros(n, dtype=bool)
        anchor_values = np.zeros(n)
    anchor_mask = np.asarray(anchor_mask, dtype=bool)
    anchor_values = np.asarray(anchor_values, dtype=np.float64)

    cap = np.where(problem.ties, np.inf, -problem.edge_q)  # alpha box bounds
    static_q = np.where(problem.ties, 0.0, problem.edge_q)
    eu, ev = problem.edge_u, problem.edge_v

    diag = problem.diag.copy()
    alpha = np.zeros(problem.n_edges)
    levels = np.zeros(n)
    flip_lo = np.zeros(n)
    flip_hi = np.zeros(n)
    loc = np.full(n, -1, dtype=np.int64)  # scratch: global -> block-local

    # per-node magnitude bound: |r_i| never exceeds |q_ii| plus half the
    # incident coupling mass, so this scales the fuse tolerance safely
    half_mass = np.zeros(n)
    np.add.at(half_mass, eu, 0.5 * np.abs(static_q))
    np.add.at(half_mass, ev, 0.5 * np.abs(static_q))
    bound = np.abs(diag) + half_mass
    scale = max(1.0, float(bound[~anchor_mask].max()) if (~anchor_mask).any()
                else 1.0)

    def finalize(nodes, mu, zero_mode, w_eff, fin_mask):
        tol0 = TERM_TOL * max(1.0, abs(mu), scale)
        if zero_mode:
            for i in nodes[fin_mask]:
                levels[i] = mu
                if mu > tol0:
                    flip_lo[i] = flip_hi[i] = np.inf
                elif mu < -tol0:
                    flip_lo[i] = flip_hi[i] = -np.inf
                else:
                    flip_lo[i] = np.inf   # never strictly below zero
                    flip_hi[i] = -np.inf  # always weakly below
        else:
            levels[nodes[fin_mask]] = mu * w_eff[fin_mask]
            flip_lo[nodes[fin_mask]] = mu
            flip_hi[nodes[fin_mask]] = mu
        anch = nodes[~fin_mask]
        levels[anch] = anchor_values[anch]
        flip_lo[anch] = anchor_values[anch]
        flip_hi[anch] = anchor_values[anch]

    # work stack of (node index array, edge index array)
    all_nodes = np.arange(n, dtype=np.int64)
    stack = [(all_nodes, np.arange(problem.n_edges, dtype=np.int64))]

    while stack:
        nodes, edges = stack.pop()
        m = len(nodes)
        fin_mask = ~anchor_mask[nodes]
        anch_vals = anchor_values[nodes[~fin_mask]]
        w_blk = w[nodes]

        # reductions of finite nodes under current diagonal and zero
        # internal flow
        r_loc = diag[nodes].copy()
        if len(edges):
            loc[nodes] = np.arange(m)
            lu = loc[eu[edges]]
            lv = loc[ev[edges]]
            half = 0.5 * static_q[edges]
            np.add.at(r_loc, lu, half)
            np.add.at(r_loc, lv, half)
        else:
            lu = lv = np.zeros(0, dtype=np.int64)

        has_anchors = (~fin_mask).any()
        zero_mode = False
        if has_anchors:
            mu = float(anch_vals.mean())
            w_eff = w_blk
        else:
            sw = float(w_blk.sum())
            if sw > ZERO_W_TOL:
                mu = float(r_loc[fin_mask].sum()) / sw
                w_eff = w_blk
            else:
                zero_mode = True
                mu = float(r_loc[fin_mask].mean()) if fin_mask.any() else 0.0
                w_eff = np.ones(m)

        unary = np.where(fin_mask, r_loc - mu * w_eff, 0.0)
        tol = TERM_TOL * max(1.0, abs(mu), scale)

        if m == 1 or (not has_anchors and float(np.abs(unary).max(initial=0.0)) <= tol):
            finalize(nodes, mu, zero_mode, w_eff, fin_mask)
            continue

        tie_tol = TERM_TOL * max(1.0, abs(mu))
        at_pivot = ~fin_mask & (np.abs(anchor_values[nodes] - mu) <= tie_tol)
        inf_snk = ~fin_mask & (anchor_values[nodes] <= mu + tie_tol)
        inf_src = ~fin_mask & ~inf_snk
        net = _build_block_network(unary, inf_src, inf_snk, lu, lv, cap[edges])
        state = max_flow(net, method=method)
        s_min, s_max = min_cut(net, state)

        if not (0 < len(s_max) < m) and not (0 < len(s_min) < m) and at_pivot.any():
            # anchors exactly at the pivot sit in U2 but not U1; the strict
            # split needs them pinned high
            net2 = _build_block_network(unary, inf_src | at_pivot,
                                        inf_snk & ~at_pivot, lu, lv, cap[edges])
            s_min, _ = min_cut(net2, max_flow(net2, method=method))

        if 0 < len(s_max) < m:
            low = s_max
        elif 0 < len(s_min) < m:
            low = s_min
        else:
            # single level set: harvest the equalizing interior flows from
            # the final (fully saturating) cut solve
            if len(edges):
                z_fwd = state.z_arc[:len(edges)]
                z_bwd = state.z_arc[len(edges):]
                a_new = 2.0 * (z_fwd - z_bwd)
                alpha[edges] = np.clip(a_new, -cap[edges], cap[edges])
            finalize(nodes, mu, zero_mode, w_eff, fin_mask)
            continue

        low_mask = np.zeros(m, dtype=bool)
        low_mask[list(low)] = True

        if len(edges):
            u_low = low_mask[lu]
            v_low = low_mask[lv]
            cross = u_low != v_low
            # u < v globally: low-u means alpha at -cap (flow v -> u),
            # low-v means alpha at +cap (flow u -> v); the high endpoint
            # absorbs the static coupling into its diagonal
            cu = cross & u_low
            cv = cross & v_low
            alpha[edges[cu]] = -cap[edges[cu]]
            alpha[edges[cv]] = cap[edges[cv]]
            np.add.at(diag, ev[edges[cu]], static_q[edges[cu]])
            np.add.at(diag, eu[edges[cv]], static_q[edges[cv]])
            inner_low = edges[u_low & v_low]
            inner_high = edges[~u_low & ~v_low]
        else:
            inner_low = inner_high = edges

        low_nodes = nodes[low_mask]
        high_nodes = nodes[~low_mask]
        stack.append((low_nodes, inner_low))
        stack.append((high_nodes, inner_high))

    sol = ParametricSolution(problem, w, alpha, levels, flip_lo, flip_hi,
                             anchor_mask if anchor_mask.any() else None)
    return sol


def bisection_cut(problem: QuadraticBinaryProblem, weights, T, alpha,
                  method: str = "auto", tol: float = TERM_TOL):
    """One weighted bisection step on node subset T (exposed primitive).

    Computes the pivot level for T from the current reductions, shifts the
    unary terms, and returns the maximal minimum-cut set (a subset of T,
    possibly empty or all of T).  Returns an empty set immediately when
    every shifted unary term vanishes within tolerance.  When the total
    weight on T is zero the cut splits positive from negative reductions
    (the beta = 0 cut), per the zero-weight branch of the weighted
    bisection rule.

    The current pseudoflow must vanish on edges internal to T.
    """
    from .parametric import reductions

    w = np.asarray(weights, dtype=np.float64)
    T = np.asarray(sorted(T), dtype=np.int64)
    r = reductions(problem, alpha).r[T]
    w_T = w[T]
    sw = float(w_T.sum())
    if sw > ZERO_W_TOL:
        mu = float(r.sum()) / sw
        unary = r - mu * w_T
    else:
        mu = 0.0
        unary = r.copy()
    scale = max(1.0, float(np.abs(r).max(initial=0.0)))
    if float(np.abs(unary).max(initial=0.0)) <= tol * scale:
        return set()

    loc = {int(g): k for k, g in enumerate(T)}
    in_T = np.zeros(problem.n, dtype=bool)
    in_T[T] = True
    sel = in_T[problem.edge_u] & in_T[problem.edge_v]
    edges = np.nonzero(sel)[0]
    lu = np.array([loc[int(g)] for g in problem.edge_u[edges]], dtype=np.int64)
    lv = np.array([loc[int(g)] for g in problem.edge_v[edges]], dtype=np.int64)
    caps = np.where(problem.ties[edges], np.inf, -problem.edge_q[edges])
    net = _build_block_network(unary, np.zeros(len(T), dtype=bool),
                               np.zeros(len(T), dtype=bool), lu, lv, caps)
    state = max_flow(net, method=method)
    _, s_max = min_cut(net, state)
    return set(int(T[k]) for k in s_max)
