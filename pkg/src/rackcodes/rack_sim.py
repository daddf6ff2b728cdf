"""Deterministic rack-aware cluster simulator.

A :class:`Cluster` holds one encoded stripe on an nbar x u grid.  Failures
are injected as a :class:`FailurePattern`, classified, and repaired either
rack by rack with the code's optimal repair or by the naive fallback
(reconstruct from k survivors, re-encode).  Every symbol that moves is counted
as it is produced; nothing in the ledger is computed from a formula.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field as dc_field

import numpy as np

from .base import RackAwareCode
from .errors import UnrecoverableError
from .mbrr import MbrrCode
from .params import CodeParams

HelperPolicy = Callable[[Sequence[int], int, int], list[int]]


class RepairClass(str, enum.Enum):
    OPTIMAL = "optimal"
    NAIVE = "naive"
    UNRECOVERABLE = "unrecoverable"


@dataclass(frozen=True)
class FailurePattern:
    failed: frozenset = frozenset()

    @classmethod
    def of(cls, labels: Iterable[tuple[int, int]]) -> "FailurePattern":
        return cls(frozenset((int(e), int(g)) for e, g in labels))

    @classmethod
    def spread(cls, racks: int, per_rack: int) -> "FailurePattern":
        """Nodes 0..per_rack-1 of racks 0..racks-1."""
        return cls.of((e, g) for e in range(racks) for g in range(per_rack))

    @classmethod
    def random(cls, params: CodeParams, failures: int, rng: np.random.Generator) -> "FailurePattern":
        picks = rng.choice(params.n, size=failures, replace=False)
        return cls.of(params.label(int(j)) for j in picks)

    def by_rack(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for e, g in sorted(self.failed):
            out.setdefault(e, []).append(g)
        return out

    def __len__(self):
        return len(self.failed)


def classify(params: CodeParams, pattern: FailurePattern) -> RepairClass:
    racks = pattern.by_rack()
    if any(not (0 <= e < params.nbar and 0 <= g < params.u) for e, g in pattern.failed):
        raise ValueError("failure pattern contains nodes outside the grid")
    optimal = len(racks) <= params.nbar - params.dbar and all(
        len(gs) <= params.u - params.l and params.u - len(gs) >= params.l for gs in racks.values()
    )
    if optimal:
        return RepairClass.OPTIMAL
    if params.n - len(pattern) >= params.k:
        return RepairClass.NAIVE
    return RepairClass.UNRECOVERABLE


def lowest_index(candidates: Sequence[int], count: int, host: int) -> list[int]:
    return sorted(candidates)[:count]


def seeded_random(seed: int) -> HelperPolicy:
    """Policy drawing helpers uniformly from a generator seeded once."""
    rng = np.random.default_rng(seed)

    def policy(candidates, count, host):
        picks = rng.choice(sorted(candidates), size=count, replace=False)
        return sorted(int(x) for x in picks)

    return policy


@dataclass
class RepairEvent:
    mode: str
    host: int
    failed: tuple[tuple[int, int], ...]
    local_helpers: tuple[tuple[int, int], ...]
    helper_racks: tuple[int, ...]
    cross_rack: int
    intra_rack: int

    @property
    def h(self) -> int:
        return len(self.failed)

    def record(self) -> str:
        """One line, fixed key order."""
        fields = [
            ("event", "repair"),
            ("mode", self.mode),
            ("host", self.host),
            ("failed", _join(f"{e}.{g}" for e, g in self.failed)),
            ("h", self.h),
            ("local", _join(f"{e}.{g}" for e, g in self.local_helpers)),
            ("helpers", _join(self.helper_racks)),
            ("cross_rack", self.cross_rack),
            ("intra_rack", self.intra_rack),
        ]
        return " ".join(f"{k}={v}" for k, v in fields)


@dataclass
class RepairReport:
    mode: RepairClass
    failures: int
    cross_rack_symbols: int = 0
    intra_rack_symbols: int = 0
    per_rack_breakdown: list[RepairEvent] = dc_field(default_factory=list)

    def records(self) -> list[str]:
        lines = [ev.record() for ev in self.per_rack_breakdown]
        lines.append(
            f"event=summary class={self.mode.value} failures={self.failures} "
            f"cross_rack={self.cross_rack_symbols} intra_rack={self.intra_rack_symbols} "
            f"events={len(self.per_rack_breakdown)}"
        )
        return lines


def _join(items) -> str:
    items = [str(x) for x in items]
    return ",".join(items) if items else "-"


class Cluster:
    """One codeword stored across an nbar x u grid of nodes.

    ``store[j]`` is node j's alpha-vector; ``reference`` keeps the pre-failure
    codeword for heal checks.  With ``debug`` set, live nodes are compared to
    the reference after every operation.
    """

    def __init__(self, code: RackAwareCode, data=None, *, seed: int = 0, systematic: bool = True,
                 debug: bool = False):
        self.code = code
        p = code.params
        self.topology = (p.nbar, p.u)
        if data is None:
            data = code.field.random(code.B, np.random.default_rng(seed))
        self.data = code.field.asarray(data)
        if isinstance(code, MbrrCode):
            cw = code.encode_data(self.data, systematic=systematic)
        else:
            cw = code.encode(self.data, systematic=systematic)[:, None]
        self.reference = np.array(cw, dtype=np.int64).reshape(p.n, code.alpha)
        self.store = self.reference.copy()
        self.alive = np.ones(p.n, dtype=bool)
        self.debug = debug

    @property
    def params(self) -> CodeParams:
        return self.code.params

    def pattern(self) -> FailurePattern:
        return FailurePattern.of(self.params.label(int(j)) for j in np.flatnonzero(~self.alive))

    def inject(self, pattern: FailurePattern) -> None:
        for e, g in pattern.failed:
            j = self.params.index(e, g)
            self.alive[j] = False
            self.store[j] = 0
        self._debug_check()

    def heal_check(self) -> bool:
        return bool(self.alive.all()) and np.array_equal(self.store, self.reference)

    def _debug_check(self):
        if self.debug:
            assert np.array_equal(self.store[self.alive], self.reference[self.alive]), \
                "live nodes diverged from the reference codeword"

    def classify(self, pattern: FailurePattern | None = None) -> RepairClass:
        return classify(self.params, self.pattern() if pattern is None else pattern)

    def run_repair(self, pattern: FailurePattern | None = None,
                   helper_policy: HelperPolicy = lowest_index) -> RepairReport:
        if pattern is not None:
            self.inject(pattern)
        current = self.pattern()
        cls = classify(self.params, current)
        report = RepairReport(cls, len(current))
        if cls is RepairClass.UNRECOVERABLE:
            raise UnrecoverableError(
                f"{len(current)} failures leave fewer than k={self.params.k} survivors"
            )
        if len(current) == 0:
            return report
        if cls is RepairClass.OPTIMAL:
            for host, gs in current.by_rack().items():
                self._repair_rack(host, gs, helper_policy, report)
        else:
            self._repair_naive(report)
        self._debug_check()
        return report

    def _repair_rack(self, host, gs, helper_policy, report):
        code, p = self.code, self.params
        a = code.alpha
        survivors = [g for g in range(p.u) if self.alive[p.index(host, g)]]
        local = survivors[: p.l]
        healthy = [
            e for e in range(p.nbar)
            if e != host and all(self.alive[code.rack_nodes(e)])
        ]
        if len(healthy) < p.dbar:
            raise UnrecoverableError(f"rack {host}: only {len(healthy)} failure-free helper racks")
        racks = list(helper_policy(healthy, p.dbar, host))
        plan = code.repair_plan(host, gs, local, racks)

        cross = intra = 0
        contributions = {}
        for e in plan.helper_racks:
            rack_symbols = self.store[code.rack_nodes(e)]
            intra += (p.u - 1) * a
            sent = np.asarray(code.helper_contribution(plan, e, _squeeze(rack_symbols, a)))
            cross += sent.size
            contributions[e] = sent
        local_symbols = self.store[[p.index(host, g) for g in plan.local_helpers]]
        intra += local_symbols.size
        repaired = np.asarray(code.repair(plan, contributions, _squeeze(local_symbols, a)))
        for g, vec in zip(plan.failed, repaired.reshape(plan.h, a)):
            j = p.index(host, g)
            self.store[j] = vec
            self.alive[j] = True

        report.cross_rack_symbols += cross
        report.intra_rack_symbols += intra
        report.per_rack_breakdown.append(
            RepairEvent("optimal", host, tuple((host, g) for g in plan.failed),
                        tuple((host, g) for g in plan.local_helpers), plan.helper_racks, cross, intra)
        )

    def _repair_naive(self, report):
        code, p = self.code, self.params
        a = code.alpha
        site, read = naive_reads(p, self.alive)
        supplied = {p.label(j): _squeeze(self.store[j], a) for j in read}
        if isinstance(code, MbrrCode):
            full = code.reconstruct_codeword(supplied)
        else:
            full = code.reconstruct(supplied)[:, None]
        failed = [int(j) for j in np.flatnonzero(~self.alive)]
        for j in failed:
            self.store[j] = full[j]
            self.alive[j] = True
        event = naive_event(p, a, site, read, failed)
        report.cross_rack_symbols += event.cross_rack
        report.intra_rack_symbols += event.intra_rack
        report.per_rack_breakdown.append(event)


def naive_reads(params: CodeParams, alive) -> tuple[int, list[int]]:
    """Reconstruction site (lowest-index rack with a live node) and the k nodes
    read there: the site's own live nodes first, then other racks ascending."""
    live = [int(j) for j in np.flatnonzero(np.asarray(alive))]
    if len(live) < params.k:
        raise UnrecoverableError(f"{len(live)} live nodes, need k={params.k}")
    site = params.label(live[0])[0]
    local = [j for j in live if params.label(j)[0] == site]
    remote = [j for j in live if params.label(j)[0] != site]
    return site, (local + remote)[: params.k]


def naive_event(params: CodeParams, alpha: int, site: int, read, failed) -> RepairEvent:
    """Ledger for a naive repair: reads and regenerated nodes cost alpha each,
    counted cross-rack unless they sit in the site rack."""
    cross = intra = 0
    for j in list(read) + list(failed):
        if params.label(j)[0] == site:
            intra += alpha
        else:
            cross += alpha
    racks = tuple(sorted({params.label(j)[0] for j in read} - {site}))
    return RepairEvent("naive", site, tuple(params.label(j) for j in failed), (), racks, cross, intra)


def _squeeze(x, alpha):
    x = np.asarray(x)
    return x[..., 0] if alpha == 1 else x
