"""Code parameters, derived quantities and the storage/bandwidth bounds.

All arithmetic is exact: integers, plus :class:`fractions.Fraction` for the
storage overhead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import networkx as nx

from .errors import ParameterError


class Mode(str, enum.Enum):
    MSRR = "msrr"
    MBRR = "mbrr"


@dataclass(frozen=True)
class CodeParams:
    """(n, u, k, l, dbar) of a rack-aware code with n = nbar * u nodes."""

    n: int
    u: int
    k: int
    l: int
    dbar: int

    def __post_init__(self):
        n, u, k, l, dbar = self.n, self.u, self.k, self.l, self.dbar
        if u < 1:
            raise ParameterError(f"u={u} must be positive", "u >= 1")
        if n % u:
            raise ParameterError(f"n={n} is not a multiple of u={u}", "n = nbar*u")
        if n // u < 2:
            raise ParameterError(f"nbar={n // u} must be at least 2", "nbar >= 2")
        if not u <= k < n:
            raise ParameterError(f"k={k} must satisfy u <= k < n", "u <= k < n")
        if not 0 <= l < u:
            raise ParameterError(f"l={l} must satisfy 0 <= l < u", "0 <= l < u")
        if not 0 <= dbar < k // u:
            raise ParameterError(
                f"dbar={dbar} must satisfy 0 <= dbar < kbar={k // u}", "dbar < kbar"
            )

    @property
    def nbar(self) -> int:
        return self.n // self.u

    @property
    def kbar(self) -> int:
        return self.k // self.u

    @property
    def u0(self) -> int:
        return self.k - self.kbar * self.u

    @property
    def u0_tilde(self) -> int:
        return min(self.u0, self.l)

    @property
    def k_hat(self) -> int:
        """kbar*u + u0_tilde: the dimension of the GRS supercode / rows of M."""
        return self.kbar * self.u + self.u0_tilde

    def label(self, j: int) -> tuple[int, int]:
        return divmod(j, self.u)

    def index(self, e: int, g: int) -> int:
        return e * self.u + g


@dataclass(frozen=True)
class DerivedParams:
    nbar: int
    kbar: int
    u0: int
    u0_tilde: int
    mode: Mode
    alpha: int
    beta: int
    B: int

    def overhead(self, n: int) -> Fraction:
        """Storage overhead n*alpha/B."""
        return Fraction(n * self.alpha, self.B)

    def repair_bandwidth(self, dbar: int) -> int:
        """Cross-rack symbols per repaired node, dbar*beta."""
        return dbar * self.beta


def mbrr_file_size(p: CodeParams) -> int:
    twice = p.dbar * (2 * (p.kbar * p.l + p.u0_tilde) + (p.u - p.l) * (p.dbar + 1))
    assert twice % 2 == 0
    return twice // 2


def derive(p: CodeParams, mode: Mode | str) -> DerivedParams:
    mode = Mode(mode)
    base = p.kbar * p.l + p.u0_tilde
    if mode is Mode.MSRR:
        B = base + (p.u - p.l) * p.dbar
        alpha, beta = 1, (1 if p.dbar else 0)
    else:
        if p.dbar < 1:
            raise ParameterError("MBRR codes need dbar >= 1", "dbar >= 1")
        B = mbrr_file_size(p)
        alpha, beta = p.dbar, 1
    if B < 1:
        raise ParameterError("file size B is zero (l = 0 and dbar = 0)", "B >= 1")
    return DerivedParams(p.nbar, p.kbar, p.u0, p.u0_tilde, mode, alpha, beta, B)


def general_cutset_bound(n: int, u: int, k: int, l: int, dbar: int, alpha: int, beta: int) -> int:
    """Maximum file size; valid without the dbar < kbar restriction."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    kbar, u0 = divmod(k, u)
    total = (kbar * l + min(u0, l)) * alpha
    for i in range(1, min(dbar, kbar) + 1):
        total += (u - l) * min((dbar - i + 1) * beta, alpha)
    return total


def cutset_bound(p: CodeParams, alpha: int, beta: int) -> int:
    return general_cutset_bound(p.n, p.u, p.k, p.l, p.dbar, alpha, beta)


def lrc_dmin_bound(n: int, B: int, r: int, delta: int) -> int:
    """Distance bound for a length-n, dimension-B code with (r, delta) locality."""
    if r < 1 or not 1 <= B <= n:
        raise ValueError("need r >= 1 and 1 <= B <= n")
    return n - B + 1 - (ceil(B / r) - 1) * (delta - 1)


FLOWGRAPH_MAX_NBAR = 8
FLOWGRAPH_MAX_U = 5


def build_flowgraph(p: CodeParams, alpha: int, beta: int) -> nx.DiGraph:
    """Information-flow graph seen by the worst-case data collector.

    The collector reads kbar full racks and u0 nodes of one more rack.  Within
    each of those racks nodes g < l are original and nodes g >= l are
    replacements, repaired from the l original nodes (infinite edges) and
    dbar helper racks.  Racks are repaired in order, so rack i may use the
    first min(i, dbar) collector racks as helpers; the remaining helpers are
    fresh racks that the collector never reads, one set per replacement node.
    A fresh rack of u original nodes is collapsed into a single vertex fed
    with capacity u*alpha.
    """
    if p.nbar > FLOWGRAPH_MAX_NBAR or p.u > FLOWGRAPH_MAX_U:
        raise ParameterError(
            f"flow-graph oracle limited to nbar <= {FLOWGRAPH_MAX_NBAR}, u <= {FLOWGRAPH_MAX_U}",
            "small instance",
        )
    inf = (p.n + p.n * p.dbar) * p.u * max(alpha, beta, 1) + 1
    G = nx.DiGraph()
    fresh = 0

    def node(e, g):
        return ("in", e, g), ("out", e, g)

    racks = [(e, p.u) for e in range(p.kbar)]
    if p.u0:
        racks.append((p.kbar, p.u0))

    for e, width in racks:
        for g in range(width):
            x_in, x_out = node(e, g)
            G.add_edge(x_in, x_out, capacity=alpha)
            G.add_edge(x_out, "C", capacity=inf)
            if g < p.l:
                G.add_edge("S", x_in, capacity=inf)
                continue
            for lg in range(p.l):
                G.add_edge(node(e, lg)[1], x_in, capacity=inf)
            earlier = list(range(min(e, p.dbar)))
            for h in earlier:
                G.add_edge(("rack", h), x_in, capacity=beta)
            for _ in range(p.dbar - len(earlier)):
                v = ("fresh", fresh)
                fresh += 1
                G.add_edge("S", v, capacity=p.u * alpha)
                G.add_edge(v, x_in, capacity=beta)

    for e in range(min(p.kbar, p.dbar)):
        for g in range(p.u):
            G.add_edge(node(e, g)[1], ("rack", e), capacity=inf)
    return G


def flowgraph_mincut(p: CodeParams, alpha: int, beta: int) -> int:
    """Max-flow from source to collector on :func:`build_flowgraph`."""
    G = build_flowgraph(p, alpha, beta)
    if "C" not in G or "S" not in G:
        return 0
    return int(nx.maximum_flow_value(G, "S", "C"))


def valid_params(nbar_range, u_range):
    """Every CodeParams with nbar, u in the given ranges (test sweeps)."""
    for nbar in nbar_range:
        for u in u_range:
            n = nbar * u
            for k in range(u, n):
                for l in range(u):
                    for dbar in range(k // u):
                        yield CodeParams(n, u, k, l, dbar)
