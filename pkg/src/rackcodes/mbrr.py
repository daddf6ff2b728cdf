"""The minimum-bandwidth code (alpha = dbar, beta = 1).

Each node stores a dbar-vector; a codeword is the n x dbar matrix C = Lambda M
where M (k_hat x dbar) holds the data, with dbar x dbar symmetric blocks on the
rows of I_1..I_{u-l}.  Rack-level words are Gamma S, a product-matrix MBR code.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from . import linalg
from .base import RackAwareCode, RepairPlan
from .errors import InconsistentDataError
from .gf import Field
from .msrr import _keyed
from .params import CodeParams, Mode


def message_row_sets(p: CodeParams) -> list[list[int]]:
    """[I_0, I_1, ..., I_{u-l}]: I_i (i >= 1) are rows delta*u + i + l - 1."""
    sets = [[d * p.u + (i + p.l - 1) for d in range(p.kbar)] for i in range(1, p.u - p.l + 1)]
    taken = {r for s in sets for r in s}
    return [[r for r in range(p.k_hat) if r not in taken]] + sets


def mbrr_info_set(p: CodeParams) -> list[int]:
    """Flat coordinates node*dbar + a of X, ascending."""
    X = []
    for j in range(p.k_hat):
        e, g = p.label(j)
        for a in range(p.dbar):
            if e == p.kbar or g < p.l or (e < p.dbar and a >= e):
                X.append(j * p.dbar + a)
    return X


def recover_symmetric(field: Field, gamma: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Symmetric S with ``gamma @ S == W`` using only W[e, a] for a >= e.

    Columns are solved right to left; entries below the diagonal of the current
    column are already known by symmetry from the columns to its right.
    """
    d = gamma.shape[0]
    S = field.zeros((d, d))
    for c in range(d - 1, -1, -1):
        known = field.matmul(gamma[: c + 1, c + 1:], S[c + 1:, c][:, None])[:, 0]
        rhs = field.sub(W[: c + 1, c], known)
        S[: c + 1, c] = linalg.solve(field, gamma[: c + 1, : c + 1], rhs)
        S[c, :c] = S[:c, c]
    return S


class MbrrCode(RackAwareCode):
    mode = Mode.MBRR

    def __init__(self, params: CodeParams, field: Field | None = None):
        super().__init__(params, field)
        p, F = self.params, self.field
        d = p.dbar
        self.row_sets = message_row_sets(p)
        self.Lambda = linalg.vandermonde(F, self.locators, range(p.k_hat)).T.copy()
        self.rack_locators = np.array([int(F.pow(self.xi, e * p.u)) for e in range(p.nbar)])
        self.Gamma = linalg.vandermonde(F, self.rack_locators, range(d)).T.copy()
        u_inv = int(F.inv(F.embed(p.u)))
        self._delta = np.empty((p.nbar, p.u - p.l, p.u), dtype=np.int64)
        for e in range(p.nbar):
            for i in range(p.u - p.l):
                s = p.l + i
                scale = int(F.mul(u_inv, F.pow(self.xi, -e * s)))
                row = np.array([int(F.pow(self.eta, -s * g)) for g in range(p.u)])
                self._delta[e, i] = F.mul(scale, row)
        self._info = np.array(mbrr_info_set(p), dtype=np.int64)
        self._slots = self._fill_slots()
        if len(self._slots) != self.B or len(self._info) != self.B:
            raise AssertionError("message layout does not hold B symbols")

    @property
    def info_set(self) -> np.ndarray:
        return self._info

    def delta(self, e: int) -> np.ndarray:
        """(u-l) x u matrix with delta(e) @ C_e stacking rack e's rack-level rows."""
        return self._delta[e]

    # -- message matrix -------------------------------------------------------
    def _fill_slots(self) -> list[list[tuple[int, int]]]:
        """Positions of M written by each data symbol, walking rows in order.

        A row in I_0 takes dbar fresh symbols.  Row delta of block S_i takes
        fresh symbols on its upper-triangular part (a >= delta) and mirrors
        each one to (a, delta); rows delta >= dbar of a block stay zero.
        """
        p = self.params
        block_of = {r: i for i, rows in enumerate(self.row_sets) for r in rows}
        slots = []
        for r in range(p.k_hat):
            i = block_of[r]
            if i == 0:
                slots += [[(r, a)] for a in range(p.dbar)]
                continue
            delta = r // p.u
            if delta >= p.dbar:
                continue
            for a in range(delta, p.dbar):
                mirror = a * p.u + (i + p.l - 1)
                slots.append([(r, a)] if a == delta else [(r, a), (mirror, delta)])
        return slots

    def fill_message(self, data) -> np.ndarray:
        F = self.field
        data = F.asarray(data)
        if data.shape != (self.B,):
            raise ValueError(f"expected {self.B} data symbols, got shape {data.shape}")
        M = F.zeros((self.k_hat, self.params.dbar))
        for s, positions in zip(data, self._slots):
            for r, a in positions:
                M[r, a] = s
        return M

    def check_message(self, M) -> None:
        """Raise InconsistentDataError unless M has symmetric blocks and zero tails."""
        p = self.params
        M = np.asarray(M)
        for i, rows in enumerate(self.row_sets[1:], start=1):
            S = M[rows[: p.dbar]]
            if not np.array_equal(S, S.T):
                raise InconsistentDataError(f"block S_{i} is not symmetric")
            if np.any(M[rows[p.dbar:]]):
                raise InconsistentDataError(f"zero rows of block {i} are nonzero")

    def extract_message(self, M) -> np.ndarray:
        self.check_message(M)
        return np.array([M[pos[0]] for pos in self._slots], dtype=np.int64)

    def symmetric_block(self, M, i: int) -> np.ndarray:
        """S_i for i in 1..u-l."""
        return np.asarray(M)[self.row_sets[i][: self.params.dbar]]

    # -- encoding -----------------------------------------------------------
    def encode(self, M) -> np.ndarray:
        M = self.field.asarray(M)
        if M.shape != (self.k_hat, self.params.dbar):
            raise ValueError(f"message matrix must be {self.k_hat}x{self.params.dbar}, got {M.shape}")
        return self.field.matmul(self.Lambda, M)

    def encode_data(self, data, systematic: bool = True) -> np.ndarray:
        if systematic:
            return self.encode_systematic(data)
        return self.encode(self.fill_message(data))

    def nonsystematic_generator(self) -> np.ndarray:
        return linalg.linear_map_matrix(
            self.field, lambda x: self.encode(self.fill_message(x)), self.B
        )

    def encode_systematic(self, data) -> np.ndarray:
        """Codeword with C_X = data, X taken in ascending (node, coordinate) order."""
        F, p = self.field, self.params
        d, ul = p.dbar, p.u - p.l
        data = F.asarray(data)
        if data.shape != (self.B,):
            raise ValueError(f"expected {self.B} data symbols, got shape {data.shape}")
        C = F.zeros((p.n, d))
        C.reshape(-1)[self._info] = data

        W = F.zeros((ul, p.nbar, d))
        for e in range(d):
            Ce = C[self.rack_nodes(e)]
            for a in range(e, d):
                W[:, e, a] = self._rack_value(e, Ce[:, a])
        for i in range(ul):
            S = recover_symmetric(F, self.Gamma[:d], W[i, :d])
            full = F.matmul(self.Gamma[: p.kbar], S)
            assert all(np.array_equal(full[e, e:], W[i, e, e:]) for e in range(d))
            W[i, : p.kbar] = full

        for e in range(p.kbar):
            nodes = self.rack_nodes(e)
            D = self._delta[e]
            for a in range(e if e < d else d):
                rhs = F.sub(W[:, e, a], F.matmul(D[:, : p.l], C[nodes[: p.l], a][:, None])[:, 0])
                C[nodes[p.l:], a] = linalg.solve(F, D[:, p.l:], rhs)

        M = linalg.solve(F, self.Lambda[: p.k_hat], C[: p.k_hat])
        return self.encode(M)

    def _rack_value(self, e: int, column) -> np.ndarray:
        """Delta(e) applied to one coordinate column of rack e."""
        return self.field.matmul(self._delta[e], np.asarray(column)[:, None])[:, 0]

    # -- reconstruction -----------------------------------------------------
    def _rows(self, rows: Mapping) -> dict[int, np.ndarray]:
        d = self.params.dbar
        out = {}
        for k, v in rows.items():
            vec = self.field.asarray(v).reshape(-1)
            if vec.shape != (d,):
                raise ValueError(f"node {k}: expected a {d}-vector")
            out[self.node_index(k)] = vec
        return out

    def reconstruct(self, rows: Mapping) -> np.ndarray:
        """Message matrix M from at least k_hat node vectors keyed by (e, g) or flat index."""
        supplied = self._rows(rows)
        solve_on, extra = self._select_nodes(supplied)
        CR = np.vstack([supplied[j] for j in solve_on])
        M = linalg.solve(self.field, self.Lambda[solve_on], CR)
        if extra:
            self._check_extra(self.field.matmul(self.Lambda, M), supplied, extra)
        self.check_message(M)
        return M

    def reconstruct_codeword(self, rows: Mapping) -> np.ndarray:
        return self.encode(self.reconstruct(rows))

    def decode(self, rows: Mapping, systematic: bool = True) -> np.ndarray:
        M = self.reconstruct(rows)
        if systematic:
            return self.encode(M).reshape(-1)[self._info]
        return self.extract_message(M)

    def completion_matrix(self, nodes) -> np.ndarray:
        F = self.field
        known, _ = self._select_nodes(nodes)
        T = F.matmul(self.Lambda, linalg.inverse(F, self.Lambda[known]))
        return np.kron(T.T, np.eye(self.params.dbar, dtype=np.int64))

    # -- rack-level code ----------------------------------------------------
    def rack_level(self, C, i: int) -> np.ndarray:
        """nbar x dbar word: w_e = u^-1 xi^(-e(l+i)) sum_g eta^(-(l+i)g) c_(e,g)."""
        p, F = self.params, self.field
        if not 0 <= i < p.u - p.l:
            raise ValueError(f"rack-level index {i} outside [0, {p.u - p.l - 1}]")
        C = np.asarray(C, dtype=np.int64)
        s = p.l + i
        u_inv = F.inv(F.embed(p.u))
        out = F.zeros((p.nbar, p.dbar))
        for e in range(p.nbar):
            acc = F.zeros(p.dbar)
            for g in range(p.u):
                coef = F.pow(self.eta, -s * g)
                acc = F.add(acc, F.mul(coef, C[p.index(e, g)]))
            out[e] = F.mul(F.mul(u_inv, F.pow(self.xi, -e * s)), acc)
        return out

    # -- repair -------------------------------------------------------------
    def repair_plan(self, host: int, failed, local_helpers, helper_racks) -> RepairPlan:
        F = self.field
        failed, local, racks, idle = self._validate_plan_sets(host, failed, local_helpers, helper_racks)
        D = self._delta[host]
        A = linalg.partial_identity_transform(F, D, failed, idle)
        AD = F.matmul(A, D)
        interp = linalg.inverse(F, self.Gamma[list(racks)])
        return RepairPlan(host, failed, local, racks, A, AD[:, list(local)], interp)

    def helper_contribution(self, plan: RepairPlan, rack: int, rack_symbols) -> np.ndarray:
        """h symbols: for each transformed rack-level row v, the MBR repair symbol v . Gamma_host."""
        if rack not in plan.helper_racks:
            raise ValueError(f"rack {rack} is not a helper in this plan")
        F, p = self.field, self.params
        Ce = F.asarray(rack_symbols).reshape(p.u, p.dbar)
        V = F.matmul(plan.transform, F.matmul(self._delta[rack], Ce))
        return F.matmul(V, self.Gamma[plan.host][:, None])[:, 0]

    def repair(self, plan: RepairPlan, contributions, local_symbols) -> np.ndarray:
        """Failed node vectors (h x dbar, rows in ``plan.failed`` order)."""
        F, p = self.field, self.params
        contribs = _keyed(contributions, plan.helper_racks)
        local = F.asarray(local_symbols).reshape(-1, p.dbar) if p.l else F.zeros((0, p.dbar))
        if local.shape[0] != len(plan.local_helpers):
            raise ValueError(f"expected {len(plan.local_helpers)} local node vectors")
        received = np.vstack([F.asarray(contribs[e]).reshape(1, plan.h) for e in plan.helper_racks])
        # column i: S'_i Gamma_host^T, which equals (Gamma_host S'_i)^T by symmetry
        v_host = F.matmul(plan.interp, received).T
        if plan.local_helpers:
            v_host = F.sub(v_host, F.matmul(plan.local_coeffs, local))
        return v_host


def build(params: CodeParams, field: Field | None = None) -> MbrrCode:
    return MbrrCode(params, field)
