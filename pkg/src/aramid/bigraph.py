"""Bipartite regular graphs: construction, edge indexing, spectral checks.

A graph is stored as delta matchings (permutations of [0, n)); edge u--v with
slot i exists when matchings[i][u] == v. Edge ids are e = u*delta + i, so the
left sub-block of an edge word is a contiguous reshape and the right sub-block
is a precomputed gather. The spectral ratio gamma is the second singular value
of the biadjacency matrix divided by delta, measured numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DENSE_EIG_LIMIT = 512  # dense eigensolver up to this many vertices per side
GAMMA_TOL = 1e-6


class GammaTargetError(RuntimeError):
    """Spectral target unreachable; carries the best ratio seen."""

    def __init__(self, target: float, best: float, attempts: int):
        super().__init__(
            f"gamma target {target} unreachable after {attempts} attempts; "
            f"best measured gamma = {best:.6f}"
        )
        self.target = target
        self.best = best


@dataclass
class SpectralProfile:
    lambda2: float  # second-largest eigenvalue of X^T X
    gamma: float  # sqrt(lambda2) / delta


class BipartiteRegularGraph:
    """A delta-regular bipartite graph on n + n vertices."""

    def __init__(self, matchings: np.ndarray, seed: int | None = None):
        m = np.asarray(matchings, dtype=np.int64)
        if m.ndim != 2:
            raise ValueError("matchings must be a (delta, n) array")
        delta, n = m.shape
        if n < 2 or delta < 1 or delta > n:
            raise ValueError(f"need 1 <= delta <= n and n > 1, got delta={delta} n={n}")
        ref = np.arange(n)
        for i in range(delta):
            if not np.array_equal(np.sort(m[i]), ref):
                raise ValueError(f"matching {i} is not a permutation of [0, {n})")
        self.n = n
        self.delta = delta
        self.matchings = m
        self.seed = seed
        if not self._connected():
            raise ValueError("graph is not connected")
        # Hard-wired adjacency: right_edges[v] lists edge ids at v in slot order.
        inv = np.empty_like(m)
        for i in range(delta):
            inv[i, m[i]] = ref
        self.right_edges = (inv.T * delta + np.arange(delta)[None, :]).astype(np.int64)
        self.cross_index = np.empty(n * delta, dtype=np.int64)
        self.cross_index[self.right_edges.reshape(-1)] = np.tile(
            np.arange(delta), n
        )
        self._profile: SpectralProfile | None = None

    # -- structure ----------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return self.n * self.delta

    def left_neighbors(self, u: int) -> np.ndarray:
        """N(u) for u in V', in slot order."""
        return self.matchings[:, u]

    def left_edges(self, u: int) -> np.ndarray:
        """Edge ids of E(u) for u in V'."""
        return u * self.delta + np.arange(self.delta)

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        u, i = divmod(e, self.delta)
        return u, int(self.matchings[i, u])

    def is_simple(self) -> bool:
        """No parallel edges: every left vertex has delta distinct neighbors."""
        for u in range(self.n):
            if len(set(self.matchings[:, u].tolist())) != self.delta:
                return False
        return True

    def _connected(self) -> bool:
        n = self.n
        seen_l = np.zeros(n, dtype=bool)
        seen_r = np.zeros(n, dtype=bool)
        stack = [(0, 0)]  # (side, vertex); side 0 = V'
        seen_l[0] = True
        while stack:
            side, v = stack.pop()
            if side == 0:
                for w in self.matchings[:, v]:
                    if not seen_r[w]:
                        seen_r[w] = True
                        stack.append((1, int(w)))
            else:
                for i in range(self.delta):
                    w = int(np.flatnonzero(self.matchings[i] == v)[0])
                    if not seen_l[w]:
                        seen_l[w] = True
                        stack.append((0, w))
        return bool(seen_l.all() and seen_r.all())

    def biadjacency(self) -> np.ndarray:
        """X[u, v] = edge multiplicity between u in V' and v in V''."""
        x = np.zeros((self.n, self.n), dtype=np.int64)
        for i in range(self.delta):
            np.add.at(x, (np.arange(self.n), self.matchings[i]), 1)
        return x

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "matchings": self.matchings.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BipartiteRegularGraph":
        return cls(np.array(obj["matchings"], dtype=np.int64), seed=obj.get("seed"))


# -- spectral measurement ------------------------------------------------------


def gamma(
    graph: BipartiteRegularGraph,
    tol: float = GAMMA_TOL,
    max_iter: int = 20000,
) -> SpectralProfile:
    """Measure lambda2(X^T X) on the complement of the all-ones vector.

    Uses a dense symmetric eigensolver for n <= 512 and deflated power
    iteration above. Also asserts the top eigenpair structure: X^T X has
    largest eigenvalue delta^2 with the all-ones eigenvector.
    """
    if graph._profile is not None:
        return graph._profile
    x = graph.biadjacency().astype(np.float64)
    m = x.T @ x
    d2 = float(graph.delta**2)
    ones = np.ones(graph.n)
    residual = np.abs(m @ ones - d2 * ones).max()
    if residual > 1e-9 * max(d2, 1.0):
        raise AssertionError(f"top eigenpair residual {residual} too large")
    if graph.n <= DENSE_EIG_LIMIT:
        ev = np.linalg.eigvalsh(m)
        lam2 = float(ev[-2]) if graph.n > 1 else 0.0
        lam1 = float(ev[-1])
        if abs(lam1 - d2) > 1e-6 * d2:
            raise AssertionError(f"largest eigenvalue {lam1} != delta^2 {d2}")
    else:
        lam2 = _deflated_power_iteration(m, d2, graph.n, tol, max_iter)
    if lam2 < 1e-12 * d2:  # numerically zero relative to the top eigenvalue
        lam2 = 0.0
    lam2 = max(lam2, 0.0)
    prof = SpectralProfile(lambda2=lam2, gamma=math.sqrt(lam2) / graph.delta)
    graph._profile = prof
    return prof


def _deflated_power_iteration(m, top, n, tol, max_iter) -> float:
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    ones = np.ones(n) / math.sqrt(n)
    v -= (v @ ones) * ones
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        w -= (w @ ones) * ones  # deflate the top eigenvector exactly
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        w /= nw
        new_lam = float(w @ (m @ w))
        if abs(new_lam - lam) <= tol * max(abs(new_lam), 1.0):
            return new_lam
        lam = new_lam
        v = w
    raise RuntimeError(
        f"power iteration did not converge within {max_iter} iterations "
        f"(last residual {abs(new_lam - lam):.3e})"
    )


def ramanujan_bound(delta: int) -> float:
    return 2.0 * math.sqrt(delta - 1) / delta


# -- constructions --------------------------------------------------------------


def random_regular_bipartite(
    n: int,
    delta: int,
    seed: int,
    gamma_target: float | None = None,
    max_resamples: int = 200,
    simple: bool | None = None,
) -> BipartiteRegularGraph:
    """Union of delta uniformly random permutations, deterministic given seed.

    Resamples until connected, simple (when requested and n > delta), and,
    if gamma_target is given, until the measured gamma is within target.
    """
    if not (1 <= delta <= n and n > 1):
        raise ValueError(f"need 1 <= delta <= n and n > 1, got delta={delta} n={n}")
    if simple is None:
        simple = n > delta
    rng = np.random.default_rng(seed)
    best = math.inf
    for attempt in range(max_resamples):
        m = np.array([rng.permutation(n) for _ in range(delta)], dtype=np.int64)
        if simple:
            m = _repair_parallel_edges(m, rng)
            if m is None:
                continue
        try:
            g = BipartiteRegularGraph(m, seed=seed)
        except ValueError:
            continue
        if gamma_target is None:
            return g
        prof = gamma(g)
        if prof.gamma <= gamma_target:
            return g
        best = min(best, prof.gamma)
    if gamma_target is None:
        raise RuntimeError(f"no connected graph found in {max_resamples} attempts")
    raise GammaTargetError(gamma_target, best, max_resamples)


def _repair_parallel_edges(m: np.ndarray, rng, max_passes: int = 200):
    """Swap entries within matchings until every left vertex has distinct
    neighbors. Each swap preserves the permutation property."""
    delta, n = m.shape
    for _ in range(max_passes):
        collisions = 0
        for u in range(n):
            seen: dict[int, int] = {}
            for i in range(delta):
                v = int(m[i, u])
                if v in seen:
                    j = int(rng.integers(n))
                    m[i, u], m[i, j] = m[i, j], m[i, u]
                    collisions += 1
                else:
                    seen[v] = i
        if collisions == 0:
            return m
    return None


def circulant_bipartite(
    n: int, shifts, seed: int | None = None
) -> BipartiteRegularGraph:
    """Union of shift permutations u -> u + s (mod n), one per s in shifts."""
    shifts = sorted(int(s) % n for s in shifts)
    if len(set(shifts)) != len(shifts):
        raise ValueError("shifts must be distinct mod n")
    base = np.arange(n, dtype=np.int64)
    m = np.array([(base + s) % n for s in shifts], dtype=np.int64)
    return BipartiteRegularGraph(m, seed=seed)


def _circulant_connected(n: int, shifts) -> bool:
    g = n
    s0 = shifts[0]
    for s in shifts[1:]:
        g = math.gcd(g, (s - s0) % n)
    return g == 1


def anneal_circulant_bipartite(
    n: int,
    delta: int,
    seed: int,
    gamma_target: float | None = None,
    iters: int = 20000,
) -> BipartiteRegularGraph:
    """Search shift sets whose circulant graph has small measured gamma.

    The singular values of a circulant biadjacency are the DFT magnitudes of
    the shift-set indicator, so the annealing cost is one FFT per move.
    Deterministic given seed; raises GammaTargetError when the target is
    out of reach.
    """
    if not (1 <= delta <= n and n > 1):
        raise ValueError(f"need 1 <= delta <= n and n > 1, got delta={delta} n={n}")
    rng = np.random.default_rng(seed)
    ind = np.zeros(n)
    ind[rng.choice(n, size=delta, replace=False)] = 1.0

    def cost(v) -> float:
        f = np.abs(np.fft.fft(v))
        return float(f[1:].max())

    cur = cost(ind)
    best, best_ind = cur, ind.copy()
    target_lam = None if gamma_target is None else gamma_target * delta
    t0, t1 = 1.0, 0.01
    for it in range(iters):
        if target_lam is not None and best < target_lam:
            break
        temp = t0 * (t1 / t0) ** (it / iters)
        ones = np.flatnonzero(ind == 1)
        zeros = np.flatnonzero(ind == 0)
        if zeros.size == 0:
            break
        i = int(rng.choice(ones))
        j = int(rng.choice(zeros))
        ind[i], ind[j] = 0.0, 1.0
        c = cost(ind)
        if c <= cur or rng.random() < math.exp(-(c - cur) / temp):
            cur = c
            if c < best:
                best, best_ind = c, ind.copy()
        else:
            ind[i], ind[j] = 1.0, 0.0
    shifts = np.flatnonzero(best_ind).tolist()
    if not _circulant_connected(n, shifts):
        raise GammaTargetError(gamma_target or 0.0, best / delta, iters)
    g = circulant_bipartite(n, shifts, seed=seed)
    prof = gamma(g)
    if gamma_target is not None and prof.gamma > gamma_target:
        raise GammaTargetError(gamma_target, prof.gamma, iters)
    return g


# -- spectral lemma checks -------------------------------------------------------


def _chi_arrays(graph, chi_left, chi_right):
    cl = np.asarray(chi_left, dtype=np.float64)
    cr = np.asarray(chi_right, dtype=np.float64)
    if cl.shape != (graph.n,) or cr.shape != (graph.n,):
        raise ValueError("chi must assign a value to every vertex on each side")
    if np.any(cl < 0) or np.any(cl > 1) or np.any(cr < 0) or np.any(cr > 1):
        raise ValueError("chi values must lie in [0, 1]")
    return cl, cr


def check_mixing_lemma(
    graph: BipartiteRegularGraph,
    chi_left,
    chi_right,
    slack: float = 1e-9,
) -> tuple[float, float, float]:
    """Edge-average bound for [0,1]-valued vertex functions.

    Returns (lhs, bound1, bound2) where
      lhs    = (1/(delta n)) sum_{u in V'} sum_{v in N(u)} chi(u) chi(v),
      bound1 = s*t + gamma*sqrt(s(1-s)t(1-t)),
      bound2 = (1-gamma)*s*t + gamma*sqrt(s*t),
    and asserts lhs <= bound1 <= bound2 (up to slack).
    """
    cl, cr = _chi_arrays(graph, chi_left, chi_right)
    g = gamma(graph).gamma
    n, delta = graph.n, graph.delta
    lhs = 0.0
    for i in range(delta):
        lhs += float(cl @ cr[graph.matchings[i]])
    lhs /= delta * n
    s = float(cl.mean())
    t = float(cr.mean())
    bound1 = s * t + g * math.sqrt(max(s * (1 - s) * t * (1 - t), 0.0))
    bound2 = (1 - g) * s * t + g * math.sqrt(max(s * t, 0.0))
    if lhs > bound1 + slack or bound1 > bound2 + slack:
        raise AssertionError(
            f"mixing bound violated: lhs={lhs} bound1={bound1} bound2={bound2}"
        )
    return lhs, bound1, bound2


def check_degree_sum(
    graph: BipartiteRegularGraph,
    left_set,
    right_set,
    slack: float = 1e-9,
) -> tuple[int, float]:
    """Induced-subgraph degree sum against 2((1-g)st + g sqrt(st)) delta n."""
    sel_l = np.zeros(graph.n, dtype=bool)
    sel_l[list(left_set)] = True
    sel_r = np.zeros(graph.n, dtype=bool)
    sel_r[list(right_set)] = True
    if not sel_l.any() and not sel_r.any():
        raise ValueError("S and T must not both be empty")
    g = gamma(graph).gamma
    n, delta = graph.n, graph.delta
    edges = 0
    for i in range(delta):
        edges += int(np.count_nonzero(sel_l & sel_r[graph.matchings[i]]))
    degree_sum = 2 * edges
    s = sel_l.sum() / n
    t = sel_r.sum() / n
    bound = 2 * ((1 - g) * s * t + g * math.sqrt(s * t)) * delta * n
    if degree_sum > bound + slack:
        raise AssertionError(
            f"degree-sum bound violated: sum={degree_sum} bound={bound}"
        )
    return degree_sum, bound


def check_expansion_lemma(
    graph: BipartiteRegularGraph,
    chi_left,
    chi_right,
    delta_threshold: float,
    slack: float = 1e-9,
) -> tuple[float, float] | None:
    """sqrt(s/t) >= ((d/2) - (1-g)s)/g for conforming chi; None when the
    hypothesis does not apply (chi zero on V'' or a neighborhood sum too
    small). Requires gamma > 0."""
    cl, cr = _chi_arrays(graph, chi_left, chi_right)
    g = gamma(graph).gamma
    if g <= 0:
        raise ValueError("expansion bound requires positive gamma")
    if not np.any(cr > 0):
        return None
    # Hypothesis: chi(v) > 0 implies sum_{u in N(v)} chi(u) >= d*delta/2.
    nbr_sum = np.zeros(graph.n)
    for i in range(graph.delta):
        np.add.at(nbr_sum, graph.matchings[i], cl)
    need = delta_threshold * graph.delta / 2.0
    if np.any((cr > 0) & (nbr_sum < need - 1e-12)):
        return None
    s = float(cl.mean())
    t = float(cr.mean())
    sqrt_ratio = math.sqrt(s / t)
    bound = (delta_threshold / 2.0 - (1 - g) * s) / g
    if sqrt_ratio < bound - slack:
        raise AssertionError(
            f"expansion bound violated: sqrt(s/t)={sqrt_ratio} bound={bound}"
        )
    return sqrt_ratio, bound
