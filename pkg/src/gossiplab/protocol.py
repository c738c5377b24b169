"""Broadcast gossip update rules with companion accumulators.

One step: a broadcaster k wakes up and transmits (x_k, y_k); every node j
that can hear k applies, with all reads taken before any write,

    x_j <- (1 - a_jk) x_j + a_jk x_k + eps * d_jk * y_j
    y_j <- a_jk (x_j - x_k) + (1 - eps * d_jk) y_j + b_jk * y_k

while the broadcaster keeps x_k and resets y_k to zero, and everyone
else is untouched.  The companion value y_j accumulates the asymmetry a
broadcast introduces, and the eps-coupling bleeds it back into x so the
network can settle on the exact average (or a weighted average fixed by
the stationary vector of B) instead of a biased one.

Weight schemes
--------------
All schemes put d_jk = 1 / in_degree(j) on edges.  The three unbiased
variants share column-stochastic B_jk = 1 / out_degree(k) and differ in
the mixing weights: constant 1/2, 1/in_degree(j), or 1/out_degree(j).
The biased variant uses row-stochastic B_jk = A_jk = 1/in_degree(j),
which frees nodes from knowing their out-degree but tilts the limit
toward the stationary weights of B.  The classic variant is the plain
memoryless broadcast rule: eps = 0, B = 0, d = 0, a_jk = gamma.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import InvalidEpsilon, NotStronglyConnected
from .graph import DiGraph, is_strongly_connected


class SchemeKind(Enum):
    UBGA1 = "ubga1"
    UBGA2 = "ubga2"
    UBGA3 = "ubga3"
    BBGA = "bbga"
    CLASSIC = "classic"

    @property
    def is_unbiased(self) -> bool:
        return self in (SchemeKind.UBGA1, SchemeKind.UBGA2, SchemeKind.UBGA3)

    @property
    def label(self) -> str:
        return self.value


@dataclass(frozen=True)
class ParamScheme:
    """Frozen weight matrices for one protocol instance.

    a, b are n x n with entry (j, k) used when j hears k's broadcast;
    d holds the companion decay rates with column k = the rates applied
    during k's broadcast.  All three share the graph's zero pattern.
    """

    kind: SchemeKind
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    epsilon: float
    gamma: float = 0.5

    def __post_init__(self):
        for name in ("a", "b", "d"):
            m = np.array(getattr(self, name), dtype=float)
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @cached_property
    def receivers(self) -> tuple:
        """Per broadcaster (0-based), the 0-based indices of its hearers."""
        return tuple(np.flatnonzero(self.a[:, k] != 0.0) for k in range(self.n))


@dataclass
class GossipState:
    """Mutable network state: values x, companions y, step counter t."""

    x: np.ndarray
    y: np.ndarray
    t: int = 0

    @classmethod
    def initial(cls, x0) -> "GossipState":
        x0 = np.array(x0, dtype=float)
        return cls(x=x0, y=np.zeros_like(x0), t=0)

    def stacked(self) -> np.ndarray:
        """Concatenated (x, y) vector of length 2n."""
        return np.concatenate([self.x, self.y])


def build_scheme(kind: SchemeKind, g: DiGraph, epsilon: float,
                 gamma: float = 0.5, a_matrix: np.ndarray | None = None) -> ParamScheme:
    """Assemble the weight matrices of a named scheme on a strongly
    connected digraph.

    epsilon must be positive for companion-coupled kinds and exactly 0
    for CLASSIC; gamma in (0, 1] is the CLASSIC mixing weight.  An
    explicit ``a_matrix`` overrides the kind's mixing rule; it must match
    the graph's zero pattern with entries in (0, 1].
    """
    if isinstance(kind, str):
        kind = SchemeKind(kind.lower())
    if not is_strongly_connected(g):
        raise NotStronglyConnected("scheme needs a strongly connected digraph")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if kind is SchemeKind.CLASSIC:
        if epsilon != 0.0:
            raise InvalidEpsilon("classic broadcast gossip runs with epsilon = 0")
    elif not epsilon > 0.0:
        raise InvalidEpsilon("companion coupling needs epsilon > 0")

    n = g.n
    adj = g.adjacency()
    indeg = adj.sum(axis=1)       # how many nodes j hears
    outdeg = adj.sum(axis=0)      # how many nodes hear k
    if np.any(indeg == 0) or np.any(outdeg == 0):
        # unreachable for strongly connected inputs; guards direct misuse
        raise NotStronglyConnected("every node needs in- and out-neighbors")

    inv_in = 1.0 / indeg
    inv_out = 1.0 / outdeg

    if kind is SchemeKind.CLASSIC:
        a = gamma * adj
        b = np.zeros((n, n))
        d = np.zeros((n, n))
    else:
        d = adj * inv_in[:, None]
        if kind is SchemeKind.BBGA:
            a = adj * inv_in[:, None]
            b = a.copy()
        else:
            b = adj * inv_out[None, :]
            if kind is SchemeKind.UBGA1:
                a = 0.5 * adj
            elif kind is SchemeKind.UBGA2:
                a = adj * inv_in[:, None]
            else:
                a = adj * inv_out[:, None]

    if a_matrix is not None:
        a = np.asarray(a_matrix, dtype=float)
        if a.shape != (n, n):
            raise ValueError(f"a_matrix must have shape ({n}, {n})")
        on_edges = adj != 0.0
        if np.any(a[~on_edges] != 0.0):
            raise ValueError("a_matrix has weight off the graph's edges")
        vals = a[on_edges]
        if np.any(vals <= 0.0) or np.any(vals > 1.0):
            raise ValueError("a_matrix edge weights must lie in (0, 1]")

    return ParamScheme(kind=kind, a=a, b=b, d=d, epsilon=float(epsilon),
                       gamma=float(gamma))


def local_update(state: GossipState, k: int, scheme: ParamScheme) -> GossipState:
    """Apply one broadcast by node k (1-based) and return the new state.

    Receivers read the pre-broadcast state simultaneously; the
    broadcaster's companion resets to zero.
    """
    if not 1 <= k <= scheme.n:
        raise ValueError(f"broadcaster {k} outside 1..{scheme.n}")
    x = state.x.copy()
    y = state.y.copy()
    kk = k - 1
    recv = scheme.receivers[kk]
    if recv.size:
        a = scheme.a[recv, kk]
        b = scheme.b[recv, kk]
        d = scheme.d[recv, kk]
        xr = state.x[recv]
        yr = state.y[recv]
        eps = scheme.epsilon
        x[recv] = (1.0 - a) * xr + a * state.x[kk] + eps * d * yr
        y[recv] = a * (xr - state.x[kk]) + (1.0 - eps * d) * yr + b * state.y[kk]
    y[kk] = 0.0
    return GossipState(x=x, y=y, t=state.t + 1)


def assemble_Wk(scheme: ParamScheme, k: int) -> np.ndarray:
    """The 2n x 2n linear map of one broadcast by node k, acting on the
    stacked (x, y) vector.  local_update(s, k) equals this matrix applied
    to s.stacked()."""
    if not 1 <= k <= scheme.n:
        raise ValueError(f"broadcaster {k} outside 1..{scheme.n}")
    n = scheme.n
    kk = k - 1
    ak = np.zeros((n, n))
    ak[:, kk] = scheme.a[:, kk]
    lk = np.diag(ak.sum(axis=1)) - ak
    bk = np.zeros((n, n))
    bk[:, kk] = scheme.b[:, kk]
    sk = np.eye(n)
    sk[kk, kk] = 0.0
    sk += bk
    dk = np.diag(scheme.d[:, kk])
    eps = scheme.epsilon
    top = np.hstack([np.eye(n) - lk, eps * dk])
    bot = np.hstack([lk, sk - eps * dk])
    return np.vstack([top, bot])


def step(state: GossipState, scheme: ParamScheme,
         rng: np.random.Generator) -> tuple:
    """Draw a uniform broadcaster and apply its broadcast.  Returns the
    new state and the broadcaster id (1-based)."""
    k = int(rng.integers(1, scheme.n + 1))
    return local_update(state, k, scheme), k
