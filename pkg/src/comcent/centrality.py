"""Classical (community-agnostic) centrality measures.

Every measure takes a :class:`~comcent.graph.Graph` and returns a
:class:`CentralityVector` indexed by node.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import UNREACHABLE, Graph, all_pairs_distances


class CentralityError(RuntimeError):
    pass


@dataclass(frozen=True)
class CentralityParams:
    katz_fraction: float = 0.85
    pagerank_damping: float = 0.85
    diffusion_lambda: float = 1.0
    convergence_tol: float = 1e-9
    max_iters: int = 1000

    def __post_init__(self):
        if not 0 < self.katz_fraction < 1:
            raise ValueError("katz_fraction must lie in (0, 1)")
        if not 0 < self.pagerank_damping < 1:
            raise ValueError("pagerank_damping must lie in (0, 1)")
        if not self.diffusion_lambda > 0:
            raise ValueError("diffusion_lambda must be positive")
        if not self.convergence_tol > 0 or self.max_iters < 1:
            raise ValueError("convergence_tol and max_iters must be positive")

    def as_dict(self):
        return asdict(self)


DEFAULT_PARAMS = CentralityParams()


@dataclass
class CentralityVector:
    measure: str
    scores: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if not np.all(np.isfinite(self.scores)):
            raise CentralityError(f"{self.measure}: non-finite scores")

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, i):
        return self.scores[i]


# -- helpers -------------------------------------------------------------

def _neighbor_sum(g: Graph, values: np.ndarray) -> np.ndarray:
    if g.m == 0:
        return np.zeros(g.n)
    return g.to_csr() @ np.asarray(values, dtype=np.float64)


def _safe_div(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


def spectral_radius(g: Graph, tol: float = 1e-9, max_iters: int = 10000) -> float:
    """Largest adjacency eigenvalue by power iteration on ``A + I``.

    The unit shift keeps bipartite graphs (eigenvalues +/-lambda) from
    oscillating.  Convergence is judged on the Rayleigh quotient.
    """
    if g.m == 0:
        return 0.0
    a = g.to_csr()
    x = np.ones(g.n) / np.sqrt(g.n)
    lam = 0.0
    for _ in range(max_iters):
        y = a @ x + x
        new_lam = float(x @ y)
        norm = np.linalg.norm(y)
        x = y / norm
        if abs(new_lam - lam) < tol * max(1.0, abs(new_lam)):
            return new_lam - 1.0
        lam = new_lam
    raise CentralityError("power iteration for the spectral radius did not converge")


# -- measures -------------------------------------------------------------

def degree(g: Graph) -> CentralityVector:
    return CentralityVector("d", g.degree.astype(np.float64))


def brandes_dependencies(g: Graph, chunk: int = 256) -> np.ndarray:
    """Unnormalized betweenness, sources processed in dense blocks.

    Breadth-first levels are expanded for a block of sources at once with a
    sparse product; path counts and dependencies then follow the usual
    Brandes recurrences level by level.  Unordered pairs are counted once.
    """
    n = g.n
    bc = np.zeros(n)
    if g.m == 0:
        return bc
    a = g.to_csr()
    for start in range(0, n, chunk):
        src = np.arange(start, min(n, start + chunk))
        rows = np.arange(len(src))
        dist = np.full((len(src), n), -1, dtype=np.int32)
        sigma = np.zeros((len(src), n))
        dist[rows, src] = 0
        sigma[rows, src] = 1.0
        frontier = sigma.copy()
        level = 0
        while True:
            reach = np.asarray(a @ frontier.T).T
            new = (dist < 0) & (reach > 0)
            if not new.any():
                break
            level += 1
            dist[new] = level
            sigma[new] = reach[new]
            frontier = np.where(new, sigma, 0.0)
        delta = np.zeros_like(sigma)
        safe_sigma = np.where(sigma > 0, sigma, 1.0)
        for lvl in range(level, 0, -1):
            coeff = np.where(dist == lvl, (1.0 + delta) / safe_sigma, 0.0)
            pulled = np.asarray(a @ coeff.T).T
            delta += np.where(dist == lvl - 1, sigma * pulled, 0.0)
        delta[rows, src] = 0.0
        bc += delta.sum(axis=0)
    return bc / 2.0


def betweenness(g: Graph) -> CentralityVector:
    return CentralityVector("b", brandes_dependencies(g), {"normalized": False})


def closeness(g: Graph) -> CentralityVector:
    """Closeness with the Wasserman-Faust component correction."""
    n = g.n
    scores = np.zeros(n)
    if n <= 1 or g.m == 0:
        return CentralityVector("c", scores, {"correction": "wasserman-faust"})
    dist = all_pairs_distances(g)
    reach = dist != UNREACHABLE
    comp_size = reach.sum(axis=1)
    total = np.where(reach, dist, 0).sum(axis=1).astype(np.float64)
    k = comp_size - 1
    ok = total > 0
    scores[ok] = (k[ok] / (n - 1)) * (k[ok] / total[ok])
    return CentralityVector("c", scores, {"correction": "wasserman-faust"})


def katz_fixed_point(g: Graph, attenuation: float, tol: float = 1e-9,
                     max_iters: int = 1000) -> np.ndarray:
    """Iterate ``x <- attenuation * A x + 1`` until the max change < tol."""
    a = g.to_csr()
    x = np.ones(g.n)
    for _ in range(max_iters):
        new = attenuation * (a @ x) + 1.0
        if np.max(np.abs(new - x), initial=0.0) < tol:
            return new
        x = new
    raise CentralityError(f"katz did not converge in {max_iters} iterations")


def katz(g: Graph, params: CentralityParams = DEFAULT_PARAMS) -> CentralityVector:
    if g.m == 0:
        raise CentralityError("katz needs at least one edge")
    lam = spectral_radius(g, tol=params.convergence_tol)
    att = params.katz_fraction / lam
    x = katz_fixed_point(g, att, params.convergence_tol, params.max_iters)
    return CentralityVector("k", x, {"katz_fraction": params.katz_fraction,
                                     "attenuation": att, "lambda_max": lam})


def pagerank(g: Graph, params: CentralityParams = DEFAULT_PARAMS) -> CentralityVector:
    n = g.n
    if n == 0:
        return CentralityVector("p", np.zeros(0))
    d = params.pagerank_damping
    k = g.degree.astype(np.float64)
    dangling = k == 0
    inv_k = _safe_div(1.0, k)
    a = g.to_csr()
    x = np.full(n, 1.0 / n)
    for _ in range(params.max_iters):
        new = d * (a @ (x * inv_k)) + (d * x[dangling].sum() + 1.0 - d) / n
        if np.max(np.abs(new - x)) < params.convergence_tol:
            return CentralityVector("p", new / new.sum(), {"damping": d})
        x = new
    raise CentralityError(f"pagerank did not converge in {params.max_iters} iterations")


def subgraph_centrality(g: Graph) -> CentralityVector:
    """Diagonal of ``exp(A)`` from the symmetric eigendecomposition."""
    if g.n == 0:
        return CentralityVector("s", np.zeros(0))
    a = g.to_csr().toarray()
    try:
        lam, vec = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise CentralityError(f"eigensolver failed: {exc}") from exc
    return CentralityVector("s", (vec ** 2) @ np.exp(lam))


def mnc(g: Graph) -> CentralityVector:
    """Size of the largest component among each node's neighbours."""
    adj = g.adjacency
    scores = np.zeros(g.n)
    for i in range(g.n):
        nbrs = adj[i]
        if not nbrs:
            continue
        inside = set(nbrs)
        parent = {v: v for v in nbrs}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for v in nbrs:
            for w in adj[v]:
                if w > v and w in inside:
                    rv, rw = find(v), find(w)
                    if rv != rw:
                        parent[rv] = rw
        counts: dict = {}
        for v in nbrs:
            r = find(v)
            counts[r] = counts.get(r, 0) + 1
        scores[i] = max(counts.values())
    return CentralityVector("m", scores)


def leverage(g: Graph) -> CentralityVector:
    k = g.degree.astype(np.float64)
    total = np.zeros(g.n)
    for u, v in g.edges:
        r = (k[u] - k[v]) / (k[u] + k[v])
        total[u] += r
        total[v] -= r
    return CentralityVector("lev", _safe_div(total, k))


def diffusion_degree(g: Graph, params: CentralityParams = DEFAULT_PARAMS) -> CentralityVector:
    lam = params.diffusion_lambda
    k = g.degree.astype(np.float64)
    return CentralityVector("dif", lam * k + lam * _neighbor_sum(g, k), {"lambda": lam})


def laplacian_centrality(g: Graph) -> CentralityVector:
    """Drop in Laplacian energy ``sum k^2 + 2m`` when a node is removed."""
    k = g.degree.astype(np.float64)
    return CentralityVector("lap", k ** 2 + k + 2.0 * _neighbor_sum(g, k))


def laplacian_energy(g: Graph) -> float:
    return float(np.sum(g.degree.astype(np.float64) ** 2) + 2 * g.m)


CLASSICAL_IDS = ("d", "b", "c", "k", "p", "s", "m", "lev", "dif", "lap")

_MEASURES = {
    "d": lambda g, p: degree(g),
    "b": lambda g, p: betweenness(g),
    "c": lambda g, p: closeness(g),
    "k": katz,
    "p": pagerank,
    "s": lambda g, p: subgraph_centrality(g),
    "m": lambda g, p: mnc(g),
    "lev": lambda g, p: leverage(g),
    "dif": diffusion_degree,
    "lap": lambda g, p: laplacian_centrality(g),
}


def classical(g: Graph, measure: str, params: CentralityParams = DEFAULT_PARAMS) -> CentralityVector:
    try:
        fn = _MEASURES[measure]
    except KeyError:
        raise KeyError(f"unknown classical measure {measure!r}") from None
    return fn(g, params)


def all_classical(g: Graph, params: CentralityParams = DEFAULT_PARAMS) -> dict[str, CentralityVector]:
    return {mid: classical(g, mid, params) for mid in CLASSICAL_IDS}

