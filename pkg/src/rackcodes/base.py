"""Machinery shared by the MSRR and MBRR codes: locators, node labels,
repair-plan validation and the linear maps used for bulk (striped) coding."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from .errors import InconsistentDataError, InsufficientDataError, ParameterError
from .gf import Field, check_code_field, default_field, unity_root
from .params import CodeParams, DerivedParams, Mode, derive

Label = tuple[int, int]


@dataclass(frozen=True)
class RepairPlan:
    """Everything needed to repair ``failed`` nodes of rack ``host``.

    ``transform`` is the h x (u-l) matrix turning the host's rack-level
    relations into an identity on the failed nodes and zeros on the idle
    survivors; ``local_coeffs`` are the resulting coefficients on the local
    helpers; ``interp`` maps helper-rack symbols to the host's rack-level value.
    """

    host: int
    failed: tuple[int, ...]
    local_helpers: tuple[int, ...]
    helper_racks: tuple[int, ...]
    transform: np.ndarray = dc_field(repr=False)
    local_coeffs: np.ndarray = dc_field(repr=False)
    interp: np.ndarray = dc_field(repr=False)

    @property
    def h(self) -> int:
        return len(self.failed)

    @property
    def cross_rack_symbols(self) -> int:
        return self.h * len(self.helper_racks)


class RackAwareCode:
    """Common state: parameters, field, xi, eta and the node locators."""

    mode: Mode

    def __init__(self, params: CodeParams, field: Field | None = None):
        self.params = params
        self.derived: DerivedParams = derive(params, self.mode)
        self.field = field if field is not None else default_field(params.n, params.u)
        check_code_field(self.field, params.n, params.u)
        F = self.field
        self.xi = F.primitive
        self.eta = unity_root(F, params.u)
        p = params
        lam = np.empty(p.n, dtype=np.int64)
        for e in range(p.nbar):
            xe = int(F.pow(self.xi, e))
            for g in range(p.u):
                lam[p.index(e, g)] = int(F.mul(xe, F.pow(self.eta, g)))
        if len(set(lam.tolist())) != p.n:
            raise AssertionError("node locators are not distinct")
        self.locators = lam

    # -- shorthand -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.params.n

    @property
    def B(self) -> int:
        return self.derived.B

    @property
    def alpha(self) -> int:
        return self.derived.alpha

    @property
    def k_hat(self) -> int:
        return self.params.k_hat

    def __repr__(self):
        p = self.params
        return (
            f"{type(self).__name__}(n={p.n}, u={p.u}, k={p.k}, l={p.l}, "
            f"dbar={p.dbar}, B={self.B}, field={self.field.spec})"
        )

    def node_index(self, node) -> int:
        if isinstance(node, (tuple, list)):
            e, g = node
            if not (0 <= e < self.params.nbar and 0 <= g < self.params.u):
                raise ValueError(f"node {node} outside the {self.params.nbar}x{self.params.u} grid")
            return self.params.index(e, g)
        j = int(node)
        if not 0 <= j < self.n:
            raise ValueError(f"node index {j} out of range")
        return j

    def rack_nodes(self, e: int) -> list[int]:
        return [self.params.index(e, g) for g in range(self.params.u)]

    # -- reconstruction helpers -----------------------------------------
    def _select_nodes(self, nodes: Iterable) -> tuple[list[int], list[int]]:
        """Split supplied nodes into the solving set (first k_hat) and the rest."""
        idx = sorted({self.node_index(x) for x in nodes})
        if len(idx) < self.k_hat:
            raise InsufficientDataError(
                f"need at least {self.k_hat} nodes, got {len(idx)}"
            )
        return idx[: self.k_hat], idx[self.k_hat:]

    def _check_extra(self, full: np.ndarray, supplied: Mapping[int, np.ndarray], extra: list[int]) -> None:
        for j in extra:
            if not np.array_equal(np.asarray(full[j]), np.asarray(supplied[j])):
                raise InconsistentDataError(
                    f"node {self.params.label(j)} disagrees with the reconstructed codeword"
                )

    # -- repair-plan validation -----------------------------------------
    def _validate_plan_sets(self, host, failed, local_helpers, helper_racks):
        p = self.params
        if not 0 <= host < p.nbar:
            raise ParameterError(f"host rack {host} out of range", "0 <= host < nbar")
        failed = tuple(sorted(set(failed)))
        local = tuple(sorted(set(local_helpers)))
        racks = tuple(helper_racks)
        if not 1 <= len(failed) <= p.u - p.l:
            raise ParameterError(
                f"{len(failed)} failures; a rack repair handles 1..{p.u - p.l}", "1 <= h <= u-l"
            )
        if any(not 0 <= g < p.u for g in failed + local):
            raise ParameterError("in-rack node index out of range", "0 <= g < u")
        if len(local) != p.l or len(local) != len(local_helpers):
            raise ParameterError(f"need exactly l={p.l} distinct local helpers", "|local| = l")
        if set(local) & set(failed):
            raise ParameterError("local helpers overlap the failed set", "local disjoint from failed")
        if len(set(racks)) != p.dbar or len(racks) != p.dbar:
            raise ParameterError(f"need exactly dbar={p.dbar} distinct helper racks", "|helpers| = dbar")
        if host in racks or any(not 0 <= e < p.nbar for e in racks):
            raise ParameterError("helper racks must be valid racks other than the host", "helper != host")
        idle = tuple(g for g in range(p.u) if g not in failed and g not in local)
        return failed, local, racks, idle

    # -- bulk linear maps ---------------------------------------------------
    def nonsystematic_generator(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def info_set(self) -> np.ndarray:
        """Flat coordinates (node*alpha + a) of the information set."""
        raise NotImplementedError

    def generator_matrix(self, systematic: bool = True) -> np.ndarray:
        """B x (n*alpha) matrix; row-vector data times it is the flattened codeword."""
        G = self.nonsystematic_generator()
        if not systematic:
            return G
        return self.field.matmul(linalg.inverse(self.field, G[:, self.info_set]), G)

    def completion_matrix(self, nodes: Iterable) -> np.ndarray:
        """(k_hat*alpha) x (n*alpha) matrix mapping the first k_hat given nodes'
        flattened symbols (ascending node order) to the whole flattened codeword."""
        raise NotImplementedError

    def decoding_matrix(self, nodes: Iterable, systematic: bool = True) -> np.ndarray:
        """(k_hat*alpha) x B matrix from surviving nodes' symbols to the data."""
        E = self.completion_matrix(nodes)
        if systematic:
            return E[:, self.info_set]
        G = self.nonsystematic_generator()
        return self.field.matmul(E[:, self.info_set], linalg.inverse(self.field, G[:, self.info_set]))

    def repair_matrix(self, plan: RepairPlan) -> np.ndarray:
        """Linear map for a whole repair.

        Input row vector: the helper racks' symbols (plan order, each rack's u
        nodes flattened) followed by the local helpers' symbols; output: the
        failed nodes' symbols, flattened.
        """
        p, a = self.params, self.alpha
        rack_len = p.u * a

        def fn(x):
            contribs = {}
            for r, e in enumerate(plan.helper_racks):
                block = x[r * rack_len:(r + 1) * rack_len].reshape(p.u, a)
                contribs[e] = self.helper_contribution(plan, e, block if a > 1 else block[:, 0])
            local = x[p.dbar * rack_len:].reshape(p.l, a)
            out = self.repair(plan, contribs, local if a > 1 else local[:, 0])
            return np.asarray(out).ravel()

        return linalg.linear_map_matrix(self.field, fn, p.dbar * rack_len + p.l * a)
