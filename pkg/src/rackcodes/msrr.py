"""The scalar minimum-storage code (alpha = beta = 1).

A codeword is a length-n vector, node (e, g) at flat index e*u + g.  The code
is the B-dimensional subcode of an [n, kbar*u + u0_tilde] GRS code cut out by
the Vandermonde parity rows indexed by :func:`parity_exponents`.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from . import linalg
from .base import RackAwareCode, RepairPlan
from .errors import InconsistentDataError, InsufficientDataError, ParameterError
from .gf import Field
from .params import CodeParams, Mode

MAX_ENUMERATION = 10**7


def parity_exponents(p: CodeParams) -> list[int]:
    """Sorted exponent set T: the GRS block [0, n - k_hat - 1] plus one
    arithmetic progression i + j*u per rack-level index i < u - l."""
    T = set(range(p.n - p.k_hat))
    for i in range(p.u - p.l):
        for j in range(p.nbar - p.kbar, p.nbar - p.dbar):
            t = i + j * p.u
            assert t not in T
            T.add(t)
    return sorted(T)


def msrr_info_set(p: CodeParams) -> list[int]:
    """Flat indices of X: racks < dbar whole, racks dbar..kbar-1 on nodes < l,
    and the first u0_tilde nodes of rack kbar."""
    X = [p.index(e, g) for e in range(p.dbar) for g in range(p.u)]
    X += [p.index(e, g) for e in range(p.dbar, p.kbar) for g in range(p.l)]
    X += [p.index(p.kbar, g) for g in range(p.u0_tilde)]
    return X


def min_distance(field: Field, G: np.ndarray, batch: int = 1 << 16) -> int:
    """Minimum Hamming weight over all nonzero codewords of the row space of G."""
    B, n = G.shape
    q = field.order
    total = q**B
    if total > MAX_ENUMERATION:
        raise ParameterError(f"{total} codewords is too many to enumerate", "q^B <= 1e7")
    powers = q ** np.arange(B - 1, -1, -1, dtype=np.int64)
    best = n + 1
    for start in range(1, total, batch):
        ids = np.arange(start, min(start + batch, total), dtype=np.int64)
        msgs = (ids[:, None] // powers[None, :]) % q
        weights = np.count_nonzero(field.matmul(msgs, G), axis=1)
        best = min(best, int(weights.min()))
    return best


class MsrrCode(RackAwareCode):
    mode = Mode.MSRR

    def __init__(self, params: CodeParams, field: Field | None = None):
        super().__init__(params, field)
        p, F = self.params, self.field
        self.parity_rows = parity_exponents(p)
        self.H = linalg.vandermonde(F, self.locators, self.parity_rows)
        if len(self.parity_rows) != p.n - self.B or linalg.rank(F, self.H) != p.n - self.B:
            raise AssertionError("parity-check matrix is not of full rank n - B")
        # rows 0..n-k_hat-1 of H: the GRS supercode
        self._grs_check = self.H[: p.n - p.k_hat]
        self._rack_eval = np.stack([
            linalg.vandermonde(F, self.locators[self.rack_nodes(e)], range(p.u - p.l))
            for e in range(p.nbar)
        ])
        self.rack_locators = np.array([int(F.pow(self.xi, e * p.u)) for e in range(p.nbar)])
        self.rack_check = linalg.vandermonde(F, self.rack_locators, range(p.nbar - p.dbar))
        self._rack_gen = linalg.nullspace(F, self.rack_check)
        self._info = np.array(msrr_info_set(p), dtype=np.int64)

    @property
    def info_set(self) -> np.ndarray:
        return self._info

    def is_codeword(self, c) -> bool:
        c = np.asarray(c, dtype=np.int64).reshape(-1, 1)
        return not np.any(self.field.matmul(self.H, c))

    def rack_eval(self, e: int) -> np.ndarray:
        """(u-l) x u matrix mapping rack e's symbols to its rack-level values."""
        return self._rack_eval[e]

    # -- encoding -----------------------------------------------------------
    def encode_systematic(self, data) -> np.ndarray:
        """Codeword whose information set X carries ``data`` in ascending node order."""
        F, p = self.field, self.params
        data = F.asarray(data)
        if data.shape != (self.B,):
            raise ValueError(f"expected {self.B} data symbols, got shape {data.shape}")
        c = F.zeros(p.n)
        c[self._info] = data
        W = F.zeros((p.u - p.l, p.nbar))
        for e in range(p.dbar):
            W[:, e] = F.matmul(self._rack_eval[e], c[self.rack_nodes(e)][:, None])[:, 0]
        G = self._rack_gen
        coeffs = linalg.solve(F, G[:, : p.dbar], G[:, p.dbar: p.kbar])
        W[:, p.dbar: p.kbar] = F.matmul(W[:, : p.dbar], coeffs)
        for e in range(p.dbar, p.kbar):
            V = self._rack_eval[e]
            nodes = self.rack_nodes(e)
            rhs = F.sub(W[:, e], F.matmul(V[:, : p.l], c[nodes[: p.l]][:, None])[:, 0])
            c[nodes[p.l:]] = linalg.solve(F, V[:, p.l:], rhs)
        first = list(range(p.k_hat))
        return self._complete(c[first], first)

    def nonsystematic_generator(self) -> np.ndarray:
        return linalg.nullspace(self.field, self.H)

    def encode(self, data, systematic: bool = True) -> np.ndarray:
        if systematic:
            return self.encode_systematic(data)
        data = self.field.asarray(data)
        if data.shape != (self.B,):
            raise ValueError(f"expected {self.B} data symbols, got shape {data.shape}")
        return self.field.matmul(data[None, :], self.nonsystematic_generator())[0]

    # -- reconstruction -----------------------------------------------------
    def _complete(self, values: np.ndarray, nodes: Sequence[int]) -> np.ndarray:
        F = self.field
        known = list(nodes)
        unknown = [j for j in range(self.n) if j not in set(known)]
        c = F.zeros(self.n)
        c[known] = values
        if unknown:
            Hk = self._grs_check[:, known]
            rhs = F.neg(F.matmul(Hk, np.asarray(values)[:, None])[:, 0])
            c[unknown] = linalg.solve(F, self._grs_check[:, unknown], rhs)
        return c

    def completion_matrix(self, nodes) -> np.ndarray:
        F = self.field
        known, _ = self._select_nodes(nodes)
        unknown = [j for j in range(self.n) if j not in set(known)]
        E = F.zeros((len(known), self.n))
        E[:, known] = F.eye(len(known))
        if unknown:
            X = linalg.solve(F, self._grs_check[:, unknown], self._grs_check[:, known])
            E[:, unknown] = F.neg(X.T)
        return E

    def reconstruct(self, coords: Mapping) -> np.ndarray:
        """Full codeword from at least k_hat node symbols keyed by (e, g) or flat index."""
        supplied = {self.node_index(k): int(v) for k, v in coords.items()}
        solve_on, extra = self._select_nodes(supplied)
        c = self._complete(np.array([supplied[j] for j in solve_on], dtype=np.int64), solve_on)
        self._check_extra(c, supplied, extra)
        if not self.is_codeword(c):
            raise InconsistentDataError("symbols do not satisfy the subcode parity checks")
        return c

    def decode(self, coords: Mapping, systematic: bool = True) -> np.ndarray:
        c = self.reconstruct(coords)
        if systematic:
            return c[self._info]
        G = self.nonsystematic_generator()
        Xinv = linalg.inverse(self.field, G[:, self._info])
        return self.field.matmul(c[self._info][None, :], Xinv)[0]

    # -- rack-level code ----------------------------------------------------
    def rack_level(self, c, i: int) -> np.ndarray:
        """w_e = sum_g lambda_(e,g)^i c_(e,g) for every rack e."""
        p, F = self.params, self.field
        if not 0 <= i < p.u - p.l:
            raise ValueError(f"rack-level index {i} outside [0, {p.u - p.l - 1}]")
        c = np.asarray(c, dtype=np.int64).reshape(p.nbar, p.u)
        lam_i = F.pow(self.locators.reshape(p.nbar, p.u), i)
        return np.array([F.dot(lam_i[e], c[e]) for e in range(p.nbar)], dtype=np.int64)

    def in_rack_code(self, w) -> bool:
        """Whether a length-nbar word lies in the [nbar, dbar] MDS rack-level code."""
        w = np.asarray(w, dtype=np.int64).reshape(-1, 1)
        return not np.any(self.field.matmul(self.rack_check, w))

    # -- repair -------------------------------------------------------------
    def repair_plan(self, host: int, failed, local_helpers, helper_racks) -> RepairPlan:
        F = self.field
        failed, local, racks, idle = self._validate_plan_sets(host, failed, local_helpers, helper_racks)
        V = self._rack_eval[host]
        A = linalg.partial_identity_transform(F, V, failed, idle)
        AV = F.matmul(A, V)
        G = self._rack_gen
        interp = linalg.solve(F, G[:, list(racks)], G[:, host])
        return RepairPlan(host, failed, local, racks, A, AV[:, list(local)], interp)

    def helper_contribution(self, plan: RepairPlan, rack: int, rack_symbols) -> np.ndarray:
        """The h symbols rack ``rack`` sends to the host: A* applied to its rack-level values."""
        if rack not in plan.helper_racks:
            raise ValueError(f"rack {rack} is not a helper in this plan")
        F = self.field
        sym = F.asarray(rack_symbols).reshape(self.params.u, 1)
        w = F.matmul(self._rack_eval[rack], sym)
        return F.matmul(plan.transform, w)[:, 0]

    def repair(self, plan: RepairPlan, contributions, local_symbols) -> np.ndarray:
        """Failed symbols (in ``plan.failed`` order) from d-bar contributions and l local symbols."""
        F = self.field
        contribs = _keyed(contributions, plan.helper_racks)
        local = F.asarray(local_symbols).reshape(-1)
        if local.shape != (len(plan.local_helpers),):
            raise ValueError(f"expected {len(plan.local_helpers)} local symbols")
        v_host = F.zeros(plan.h)
        for coef, e in zip(plan.interp, plan.helper_racks):
            v_host = F.add(v_host, F.mul(int(coef), F.asarray(contribs[e]).reshape(-1)))
        if plan.local_helpers:
            v_host = F.sub(v_host, F.matmul(plan.local_coeffs, local[:, None])[:, 0])
        return v_host

    def dmin_bruteforce(self) -> int:
        return min_distance(self.field, self.nonsystematic_generator())


def _keyed(contributions, racks) -> dict:
    if isinstance(contributions, Mapping):
        out = dict(contributions)
    else:
        contributions = list(contributions)
        if len(contributions) != len(racks):
            raise InsufficientDataError(f"expected {len(racks)} contributions, got {len(contributions)}")
        out = dict(zip(racks, contributions))
    missing = [e for e in racks if e not in out]
    if missing:
        raise InsufficientDataError(f"missing contributions from helper racks {missing}")
    return out


def build(params: CodeParams, field: Field | None = None) -> MsrrCode:
    return MsrrCode(params, field)
