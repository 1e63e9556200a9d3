"""Quadratic binary problems and their cut-graph form.

The canonical object is :class:`QuadraticBinaryProblem`: a set function

    f(S) = sum_{i<j in S} q_ij + sum_{i in S} (q_ii - beta * w_i)

with all off-diagonal couplings q_ij <= 0, which makes f submodular.  The
same problem can be written as an energy table over binary labels or as an
s-t cut graph; the converters here move between the three forms while
tracking the constant objective offsets, so tests can compare values and
not just argmins.

Conventions
-----------
* Node indices are 0-based.  Edges are stored once with u < v.
* A coupling of -inf marks a hard tie: both endpoints must take the same
  label, and any set splitting them evaluates to +inf.
* The optimal set of the cut problem is the set of interior nodes on the
  *sink* side of a minimum cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonSubmodularEnergy

REL_TOL = 1e-9


def _as_edge_arrays(edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalize {(i, j): value} or (u, v, val) triples to sorted arrays."""
    if isinstance(edges, dict):
        items = [(min(i, j), max(i, j), float(q)) for (i, j), q in edges.items()]
    else:
        items = [(min(i, j), max(i, j), float(q)) for i, j, q in edges]
    items.sort(key=lambda t: (t[0], t[1]))
    if not items:
        return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.float64))
    u, v, q = zip(*items)
    return (np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64),
            np.asarray(q, dtype=np.float64))


@dataclass
class EnergyTable:
    """Unary/pairwise energy tables over binary labels.

    Parameters
    ----------
    n : int
        Node count.
    unary : array, shape (n, 2)
        unary[i, x] is the cost of labeling node i with x in {0, 1}.
    pairwise : dict
        Maps (i, j), i < j, to a 2x2 table t with t[xi, xj] the pairwise
        cost.  Every table must satisfy t[0,0] + t[1,1] <= t[0,1] + t[1,0].
    """

    n: int
    unary: np.ndarray
    pairwise: dict = field(default_factory=dict)

    def __post_init__(self):
        self.unary = np.asarray(self.unary, dtype=np.float64).reshape(self.n, 2)
        clean = {}
        for (i, j), tbl in self.pairwise.items():
            if not (0 <= i < j < self.n):
                raise DimensionMismatch(f"edge ({i}, {j}) out of range for n={self.n}")
            clean[(i, j)] = np.asarray(tbl, dtype=np.float64).reshape(2, 2)
        self.pairwise = clean

    def is_submodular(self, tol: float = REL_TOL) -> bool:
        for tbl in self.pairwise.values():
            gap = tbl[0, 0] + tbl[1, 1] - tbl[0, 1] - tbl[1, 0]
            if gap > tol * max(1.0, float(np.abs(tbl).max())):
                return False
        return True

    def energy(self, x) -> float:
        """Total energy of a binary labeling x."""
        x = np.asarray(x, dtype=np.int64)
        val = float(self.unary[np.arange(self.n), x].sum())
        for (i, j), tbl in self.pairwise.items():
            val += float(tbl[x[i], x[j]])
        return val


@dataclass
class QuadraticBinaryProblem:
    """Submodular quadratic form over binary indicator vectors.

    diag holds q_ii; edges hold q_ij <= 0 for i < j (q_ij = -inf marks a
    hard tie).  Instances are immutable after construction and safe to
    share across solver invocations.
    """

    n: int
    diag: np.ndarray
    edge_u: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    edge_v: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    edge_q: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))
    offset: float = 0.0

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=np.float64)
        if self.diag.shape != (self.n,):
            raise DimensionMismatch(f"diag must have length {self.n}")
        self.edge_u = np.asarray(self.edge_u, dtype=np.int64)
        self.edge_v = np.asarray(self.edge_v, dtype=np.int64)
        self.edge_q = np.asarray(self.edge_q, dtype=np.float64)
        if not (len(self.edge_u) == len(self.edge_v) == len(self.edge_q)):
            raise DimensionMismatch("edge arrays must have equal length")
        if np.any(self.edge_u >= self.edge_v):
            raise DimensionMismatch("edges must be stored with u < v")
        if len(self.edge_u) and (self.edge_u.min() < 0 or self.edge_v.max() >= self.n):
            raise DimensionMismatch("edge endpoint out of range")
        bad = np.nonzero(self.edge_q > 0.0)[0]
        if bad.size:
            k = int(bad[0])
            raise NonSubmodularEnergy(int(self.edge_u[k]), int(self.edge_v[k]),
                                      float(self.edge_q[k]))
        for arr in (self.diag, self.edge_u, self.edge_v, self.edge_q):
            arr.setflags(write=False)

    @classmethod
    def from_parts(cls, diag, edges, offset: float = 0.0) -> "QuadraticBinaryProblem":
        """Build from a diagonal vector and an edge mapping or triple list."""
        diag = np.asarray(diag, dtype=np.float64)
        u, v, q = _as_edge_arrays(edges)
        return cls(len(diag), diag, u, v, q, offset)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    @property
    def ties(self) -> np.ndarray:
        """Boolean mask of hard-tie (infinite-coupling) edges."""
        return np.isneginf(self.edge_q)

    def offdiag(self) -> dict:
        """Couplings as a {(i, j): q_ij} dict with i < j."""
        return {(int(i), int(j)): float(q)
                for i, j, q in zip(self.edge_u, self.edge_v, self.edge_q)}

    def degree_half_sums(self) -> np.ndarray:
        """Per-node value (1/2) * sum of incident finite couplings."""
        half = np.zeros(self.n)
        finite = ~self.ties
        np.add.at(half, self.edge_u[finite], 0.5 * self.edge_q[finite])
        np.add.at(half, self.edge_v[finite], 0.5 * self.edge_q[finite])
        return half


def from_energies(energies: EnergyTable) -> QuadraticBinaryProblem:
    """Convert an energy table to quadratic binary form.

    The returned problem has the same minimizer sets; its objective differs
    from the energy by the constant sum_i E_i(0) + sum_{ij} E_ij(0,0),
    which is recorded in ``offset``.

    Raises
    ------
    NonSubmodularEnergy
        If any pairwise table violates the submodularity inequality.
    """
    n = energies.n
    diag = energies.unary[:, 1] - energies.unary[:, 0]
    offset = float(energies.unary[:, 0].sum())
    edges = {}
    for (i, j), tbl in sorted(energies.pairwise.items()):
        gap = tbl[1, 1] + tbl[0, 0] - tbl[0, 1] - tbl[1, 0]
        if gap > REL_TOL * max(1.0, float(np.abs(tbl[np.isfinite(tbl)]).max())
                               if np.isfinite(tbl).any() else 1.0):
            raise NonSubmodularEnergy(i, j, float(gap))
        q = min(gap, 0.0)
        edges[(i, j)] = q
        diag = diag.copy()
        diag[i] += tbl[1, 0] - tbl[0, 0]
        diag[j] += tbl[0, 1] - tbl[0, 0]
        offset += float(tbl[0, 0])
    return QuadraticBinaryProblem.from_parts(diag, edges, offset)


@dataclass
class CutGraph:
    """s-t cut graph equivalent to a quadratic binary problem.

    Terminal arcs are stored as one signed number per node: a_i > 0 is a
    source arc of capacity a_i, a_i < 0 a sink arc of capacity -a_i.  The
    cut cost of sink-side set S equals f(S) + const, with
    const = sum_i [a_i]^-.  Interior capacities are -q_ij / 2 >= 0;
    infinite capacities mark nodes that must share a side.
    """

    n: int
    a: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_cap: np.ndarray

    @property
    def source_caps(self) -> np.ndarray:
        return np.maximum(self.a, 0.0)

    @property
    def sink_caps(self) -> np.ndarray:
        return np.maximum(-self.a, 0.0)

    @property
    def cut_constant(self) -> float:
        """Additive constant between cut cost and f(sink side)."""
        return float(self.sink_caps[np.isfinite(self.a)].sum())


def terminal_values(problem: QuadraticBinaryProblem, beta: float,
                    weights) -> np.ndarray:
    """Signed terminal capacities a_i = (1/2)*sum_j q_ij + q_ii - beta*w_i.

    Hard ties contribute nothing here; their infinite halves cancel against
    the infinite diagonal folds and are handled structurally by the flow
    solver.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (problem.n,):
        raise DimensionMismatch(f"weights must have length {problem.n}")
    return problem.degree_half_sums() + problem.diag - beta * w


def to_cut_graph(problem: QuadraticBinaryProblem, beta: float = 0.0,
                 weights=None) -> CutGraph:
    """Build the cut graph whose sink-side minimum cuts minimize
    f(S) - beta * w(S)."""
    if weights is None:
        weights = np.ones(problem.n)
    a = terminal_values(problem, beta, weights)
    cap = np.where(problem.ties, np.inf, -0.5 * problem.edge_q)
    return CutGraph(problem.n, a, problem.edge_u.copy(), problem.edge_v.copy(), cap)


def evaluate(problem: QuadraticBinaryProblem, S, beta: float = 0.0,
             weights=None) -> float:
    """f(S) - beta * w(S).  Returns +inf if S splits a hard tie."""
    if weights is None:
        weights = np.ones(problem.n)
    w = np.asarray(weights, dtype=np.float64)
    mask = np.zeros(problem.n, dtype=bool)
    idx = np.fromiter(S, dtype=np.int64) if not isinstance(S, np.ndarray) else S
    if len(idx):
        mask[idx] = True
    inside = mask[problem.edge_u] & mask[problem.edge_v]
    ties = problem.ties
    if np.any(ties & (mask[problem.edge_u] != mask[problem.edge_v])):
        return float("inf")
    val = float((problem.diag[mask] - beta * w[mask]).sum())
    val += float(problem.edge_q[inside & ~ties].sum())
    return val


def normalize_directed(arcs, source_caps, sink_caps) -> QuadraticBinaryProblem:
    """Convert an arbitrary directed min-cut problem to quadratic form.

    Parameters
    ----------
    arcs : list of (i, j, capacity)
        Directed interior arcs, capacities >= 0.  Both directions may be
        present with different capacities.
    source_caps, sink_caps : arrays, length n
        Capacities of s->i and i->t arcs.

    For each node pair the two directed capacities are replaced by their
    average, and half the difference is rerouted through an s->j->i->t
    path (absorbed by the terminal arcs).  Every s-t cut cost changes by
    the same constant, so the sink-side minimizer sets are preserved; the
    returned problem's minimizers (via :func:`evaluate`) equal them.
    """
    c_si = np.asarray(source_caps, dtype=np.float64).copy()
    c_it = np.asarray(sink_caps, dtype=np.float64).copy()
    if c_si.shape != c_it.shape:
        raise DimensionMismatch("source and sink capacity lengths differ")
    n = len(c_si)

    directed: dict[tuple[int, int], float] = {}
    for i, j, c in arcs:
        if i == j:
            continue
        directed[(i, j)] = directed.get((i, j), 0.0) + float(c)

    sym: dict[tuple[int, int], float] = {}
    for (i, j) in list(directed):
        if (min(i, j), max(i, j)) in sym:
            continue
        cf = directed.get((i, j), 0.0)
        cb = directed.get((j, i), 0.0)
        if cf < cb:
            i, j, cf, cb = j, i, cb, cf
        delta = cf - cb
        # path s -> j -> i -> t at half strength equalizes both directions
        c_si[j] += 0.5 * delta
        c_it[i] += 0.5 * delta
        sym[(min(i, j), max(i, j))] = 0.5 * (cf + cb)

    edges = {(i, j): -2.0 * c for (i, j), c in sym.items() if c > 0.0}
    diag = c_si - c_it
    for (i, j), c in sym.items():
        diag[i] += c
        diag[j] += c
    return QuadraticBinaryProblem.from_parts(diag, edges)
