"""Directed graphs on labelled vertices {1, ..., n}, stored as edge bitsets.

Conventions:

* No self-loops.  A_jk = 1 iff the ordered edge (j, k) is present, read as
  "k receives input from j".
* The canonical bit order pairs the two directions of each unordered pair,
  pairs sorted by (max, min): (1,2),(2,1),(1,3),(3,1),(2,3),(3,2),(1,4),...
  For n = 3 the bitset read little-endian is exactly the graph number
  nu(H) = A12 + 2*A21 + 4*A13 + 8*A31 + 16*A23 + 32*A32.
* Vertex labels are 1-based everywhere in the public API.

The Laplacian used for stability certificates has zero column sums:
L_kk = sum_{l != k} A_lk (weighted in-degree), L_jk = -A_jk for j != k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .angles import circle_dist
from .errors import PreconditionError, UsageError

GROUP_N_CAP = 8  # exhaustive S_N enumeration cap
SPECTRUM_N_CAP = 12  # dense characteristic polynomial cap


def edge_bit(n: int, j: int, k: int) -> int:
    """Bit index of ordered edge (j, k) in the canonical order."""
    if j == k or not (1 <= j <= n and 1 <= k <= n):
        raise PreconditionError(f"invalid edge ({j},{k}) for n={n}")
    i, m = min(j, k), max(j, k)
    pair = (m - 1) * (m - 2) // 2 + (i - 1)
    return 2 * pair + (0 if j < k else 1)


def _all_edges(n: int) -> list[tuple[int, int]]:
    """All ordered edges in canonical bit order."""
    out = []
    for m in range(2, n + 1):
        for i in range(1, m):
            out.append((i, m))
            out.append((m, i))
    return out


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable directed graph without self-loops on vertices {1..n}."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("graph needs at least one vertex")
        if not 0 <= self.bits < (1 << (self.n * (self.n - 1))):
            raise PreconditionError(f"edge bitset out of range for n={self.n}")

    # -- constructors

    @classmethod
    def empty(cls, n: int) -> "DirectedGraph":
        return cls(n, 0)

    @classmethod
    def complete(cls, n: int) -> "DirectedGraph":
        return cls(n, (1 << (n * (n - 1))) - 1)

    @classmethod
    def from_edges(cls, n: int, edges) -> "DirectedGraph":
        bits = 0
        for j, k in edges:
            bits |= 1 << edge_bit(n, j, k)
        return cls(n, bits)

    @classmethod
    def from_nu(cls, nu: int) -> "DirectedGraph":
        if not 0 <= nu <= 63:
            raise PreconditionError(f"graph number must be in [0, 63], got {nu}")
        return cls(3, nu)

    # -- queries

    def has_edge(self, j: int, k: int) -> bool:
        return bool(self.bits >> edge_bit(self.n, j, k) & 1)

    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(e for e in _all_edges(self.n) if self.bits >> edge_bit(self.n, *e) & 1)

    @property
    def edge_count(self) -> int:
        return bin(self.bits).count("1")

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with A[j-1, k-1] = 1 iff edge (j, k) present."""
        a = np.zeros((self.n, self.n), dtype=float)
        for j, k in self.edges():
            a[j - 1, k - 1] = 1.0
        return a

    def is_subgraph_of(self, other: "DirectedGraph") -> bool:
        return self.n == other.n and self.bits & ~other.bits == 0

    def is_undirected(self) -> bool:
        return all(self.has_edge(k, j) for j, k in self.edges())

    def transpose(self) -> "DirectedGraph":
        return DirectedGraph.from_edges(self.n, ((k, j) for j, k in self.edges()))

    def union(self, other: "DirectedGraph") -> "DirectedGraph":
        if self.n != other.n:
            raise PreconditionError("vertex count mismatch")
        return DirectedGraph(self.n, self.bits | other.bits)

    def in_degree(self, k: int) -> int:
        return sum(1 for j in range(1, self.n + 1) if j != k and self.has_edge(j, k))

    def successors(self, j: int) -> list[int]:
        return [k for k in range(1, self.n + 1) if k != j and self.has_edge(j, k)]

    # -- literals

    def to_literal(self) -> str:
        return f"{self.n};" + ",".join(f"{j}>{k}" for j, k in self.edges())

    def __str__(self) -> str:
        return self.to_literal()


def parse_graph_literal(text: str, n_for_nu: int = 3) -> DirectedGraph:
    """Parse "N;j>k,j>k,..." or, for N=3, a bare graph number in [0, 63]."""
    s = str(text).strip()
    if ";" not in s:
        try:
            nu = int(s)
        except ValueError as exc:
            raise UsageError(f"cannot parse graph literal {text!r}") from exc
        if n_for_nu != 3:
            raise UsageError("bare graph numbers are only defined for n=3")
        return DirectedGraph.from_nu(nu)
    head, _, body = s.partition(";")
    try:
        n = int(head)
    except ValueError as exc:
        raise UsageError(f"bad vertex count in graph literal {text!r}") from exc
    edges = []
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            j, k = item.split(">")
            edges.append((int(j), int(k)))
        except ValueError as exc:
            raise UsageError(f"bad edge {item!r} in graph literal {text!r}") from exc
    for j, k in edges:
        if j == k or not (1 <= j <= n and 1 <= k <= n):
            raise UsageError(f"edge ({j},{k}) out of range in graph literal {text!r}")
    return DirectedGraph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# Standard families


def _check_labels(n: int, labels) -> list[int]:
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise PreconditionError(f"repeated vertex labels {labels}")
    for p in labels:
        if not 1 <= p <= n:
            raise PreconditionError(f"vertex label {p} out of range for n={n}")
    return labels


def path_graph(n: int, labels) -> DirectedGraph:
    p = _check_labels(n, labels)
    return DirectedGraph.from_edges(n, zip(p, p[1:]))


def cycle_graph(n: int, labels) -> DirectedGraph:
    p = _check_labels(n, labels)
    if len(p) < 2:
        raise PreconditionError("a directed cycle needs at least two vertices")
    return DirectedGraph.from_edges(n, list(zip(p, p[1:])) + [(p[-1], p[0])])


def undirected_path_graph(n: int, labels) -> DirectedGraph:
    g = path_graph(n, labels)
    return g.union(g.transpose())


def undirected_cycle_graph(n: int, labels) -> DirectedGraph:
    g = cycle_graph(n, labels)
    return g.union(g.transpose())


def complete_subgraph(n: int, labels) -> DirectedGraph:
    p = _check_labels(n, labels)
    return DirectedGraph.from_edges(n, ((a, b) for a in p for b in p if a != b))


def standard_graph(family: str, n: int, labels=None) -> DirectedGraph:
    """Dispatch by family name: K, empty, path, cycle, upath, ucycle, K_sub."""
    table = {
        "path": path_graph,
        "cycle": cycle_graph,
        "upath": undirected_path_graph,
        "ucycle": undirected_cycle_graph,
        "K_sub": complete_subgraph,
    }
    if family == "K":
        return DirectedGraph.complete(n)
    if family == "empty":
        return DirectedGraph.empty(n)
    if family in table:
        if labels is None:
            labels = range(1, n + 1)
        return table[family](n, labels)
    raise PreconditionError(f"unknown graph family {family!r}")


# ---------------------------------------------------------------------------
# Permutations and isotropy


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; images[k-1] = gamma(k)."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise PreconditionError(f"not a permutation of 1..{len(self.images)}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for k, img in enumerate(self.images, start=1):
            inv[img - 1] = k
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """(self . other)(k) = self(other(k))."""
        return Permutation(tuple(self(other(k)) for k in range(1, self.n + 1)))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def is_even(self) -> bool:
        seen = [False] * self.n
        parity = 0
        for k in range(1, self.n + 1):
            if seen[k - 1]:
                continue
            length = 0
            cur = k
            while not seen[cur - 1]:
                seen[cur - 1] = True
                cur = self(cur)
                length += 1
            parity ^= (length - 1) & 1
        return parity == 0


def symmetric_group(n: int) -> list[Permutation]:
    if n > GROUP_N_CAP:
        raise PreconditionError(f"exhaustive S_n enumeration capped at n={GROUP_N_CAP}")
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


def apply_permutation(gamma: Permutation, h: DirectedGraph) -> DirectedGraph:
    """Image graph with edges {(gamma(j), gamma(k)) : (j,k) in E(h)}."""
    if gamma.n != h.n:
        raise PreconditionError("permutation and graph size mismatch")
    return DirectedGraph.from_edges(h.n, ((gamma(j), gamma(k)) for j, k in h.edges()))


def graph_isotropy(h: DirectedGraph, group) -> list[Permutation]:
    """Subgroup of `group` fixing h setwise."""
    return [g for g in group if apply_permutation(g, h) == h]


def automorphism_group(a: DirectedGraph) -> list[Permutation]:
    """Gamma(A): isotropy of A inside the full symmetric group."""
    return graph_isotropy(a, symmetric_group(a.n))


def point_isotropy(theta, group, tol: float = 1e-12) -> list[Permutation]:
    """Permutations gamma with theta_{gamma(k)} = theta_k (mod 2*pi) for all k."""
    vals = [float(v) for v in theta]
    out = []
    for g in group:
        if all(circle_dist(vals[g(k) - 1], vals[k - 1]) <= tol for k in range(1, g.n + 1)):
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# Connectivity


def _reach(h: DirectedGraph, root: int, undirected: bool = False) -> set[int]:
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in range(1, h.n + 1):
            if w in seen or w == v:
                continue
            fwd = h.has_edge(v, w)
            if fwd or (undirected and h.has_edge(w, v)):
                seen.add(w)
                stack.append(w)
    return seen


def has_spanning_diverging_tree(h: DirectedGraph) -> bool:
    """True iff some root reaches every vertex along directed edges."""
    return any(len(_reach(h, r)) == h.n for r in range(1, h.n + 1))


def spanning_diverging_tree(h: DirectedGraph) -> DirectedGraph | None:
    """A witness tree (root with no incoming edge, everyone else exactly one)."""
    for r in range(1, h.n + 1):
        parent: dict[int, int] = {r: 0}
        queue = [r]
        while queue:
            v = queue.pop(0)
            for w in h.successors(v):
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        if len(parent) == h.n:
            return DirectedGraph.from_edges(h.n, ((p, v) for v, p in parent.items() if p))
    return None


def connectivity_class(h: DirectedGraph) -> str:
    """"strongly" | "weakly" | "disconnected" per the usual directed notions."""
    if h.n == 1:
        return "strongly"
    if all(len(_reach(h, r)) == h.n for r in range(1, h.n + 1)):
        return "strongly"
    if len(_reach(h, 1, undirected=True)) == h.n:
        return "weakly"
    return "disconnected"


def weak_components(h: DirectedGraph) -> list[tuple[int, ...]]:
    """Partition of vertices into weakly connected components (sorted)."""
    left = set(range(1, h.n + 1))
    out = []
    while left:
        comp = _reach(h, min(left), undirected=True)
        out.append(tuple(sorted(comp)))
        left -= comp
    return sorted(out)


# ---------------------------------------------------------------------------
# Laplacian spectra


def laplacian(h: DirectedGraph) -> np.ndarray:
    """Column-sum-zero Laplacian: L_kk = in-degree, L_jk = -A_jk off-diagonal."""
    a = h.adjacency()
    lap = -a.copy()
    np.fill_diagonal(lap, 0.0)
    for k in range(h.n):
        lap[k, k] = a[:, k].sum() - a[k, k]
    return lap


def char_poly(m: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients by the Faddeev-LeVerrier recurrence.

    Returns c with p(x) = sum_i c[i] * x^i, c[n] = 1 (monic).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise PreconditionError("matrix must be square")
    if n > SPECTRUM_N_CAP:
        raise PreconditionError(f"dense characteristic polynomial capped at n={SPECTRUM_N_CAP}")
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    mk = np.eye(n)
    for k in range(1, n + 1):
        am = m @ mk
        ck = -np.trace(am) / k
        coeffs[n - k] = ck
        mk = am + ck * np.eye(n)
    return coeffs


def zero_eigenvalue_multiplicity(m: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Algebraic multiplicity of eigenvalue 0: trailing ~zero coefficients."""
    coeffs = char_poly(m)
    scale = np.max(np.abs(coeffs))
    mult = 0
    for c in coeffs[:-1]:
        if abs(c) < rel_tol * scale:
            mult += 1
        else:
            break
    return mult


def eigenvalues_oracle(m: np.ndarray) -> np.ndarray:
    """QR-iteration eigenvalues (LAPACK), used only as a cross-check oracle."""
    return np.linalg.eigvals(np.asarray(m, dtype=float))


# ---------------------------------------------------------------------------
# n = 3 graph numbers and colours


def graph_number(h: DirectedGraph) -> int:
    """Little-endian read of the canonical bitset; defined for n = 3 only."""
    if h.n != 3:
        raise PreconditionError("graph numbers are defined for n=3 graphs only")
    return h.bits


# each unordered pair owns a subtractive colour channel; within a pair the
# cyclic-forward direction (1>2, 2>3, 3>1) carries shade 1.0, the reverse 0.5
_CHANNEL = {frozenset({1, 2}): 0, frozenset({1, 3}): 1, frozenset({2, 3}): 2}
_FORWARD = {(1, 2), (2, 3), (3, 1)}
SHADE_FORWARD = 1.0
SHADE_BACKWARD = 0.5


def color_channels(h: DirectedGraph) -> tuple[float, float, float]:
    """Unclamped per-channel CMY sums (0, 0.5, 1.0 or 1.5 each)."""
    if h.n != 3:
        raise PreconditionError("graph colours are defined for n=3 graphs only")
    cmy = [0.0, 0.0, 0.0]
    for j, k in h.edges():
        shade = SHADE_FORWARD if (j, k) in _FORWARD else SHADE_BACKWARD
        cmy[_CHANNEL[frozenset({j, k})]] += shade
    return tuple(cmy)


def graph_color(h: DirectedGraph) -> tuple[float, float, float]:
    """Colour of an n=3 graph: contributions add per CMY channel, clamp, to RGB."""
    return tuple(1.0 - min(1.0, c) for c in color_channels(h))


# ---------------------------------------------------------------------------
# Random graphs (seeded helpers for experiments and property tests)


def random_graph(n: int, rng: np.random.Generator) -> DirectedGraph:
    return DirectedGraph(n, int(rng.integers(0, 1 << (n * (n - 1)))))


def random_graph_with_spanning_tree(n: int, rng: np.random.Generator) -> DirectedGraph:
    """Rejection-sample a graph admitting a spanning diverging tree."""
    for _ in range(10_000):
        h = random_graph(n, rng)
        if has_spanning_diverging_tree(h):
            return h
    raise RuntimeError("unreachable: spanning-tree graphs are plentiful")


def random_supergraph(h: DirectedGraph, rng: np.random.Generator) -> DirectedGraph:
    """A uniformly random graph containing h."""
    extra = int(rng.integers(0, 1 << (h.n * (h.n - 1))))
    return DirectedGraph(h.n, h.bits | extra)
