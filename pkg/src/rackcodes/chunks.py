"""Chunk files: striping a byte stream over n nodes and back.

A file becomes a sequence of stripes, each one codeword carrying B data
symbols of ``field.data_bits`` raw bits (the last stripe zero-padded).  Node
(e, g) gets one chunk file: a fixed header followed by alpha symbols per
stripe, each symbol ``field.symbol_bytes`` wide, big-endian.  All coding goes
through the code's linear maps so that a stripe batch is one matrix product.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .base import RackAwareCode
from .codes import build_code
from .errors import ChunkFormatError, InsufficientDataError, InconsistentDataError, ParameterError, \
    UnrecoverableError
from .gf import Field, FieldSpec, make_field
from .params import CodeParams, Mode
from .rack_sim import FailurePattern, RepairClass, RepairEvent, classify, naive_event, naive_reads

MAGIC = b"METRRC01"
FLAG_SYSTEMATIC = 0x01
_KIND_CODES = {"prime": 0, "binary": 1}
_MODE_CODES = {Mode.MSRR: 0, Mode.MBRR: 1}
# magic, mode, flags, field kind, m, p-or-polynomial, n u k l dbar, payload bytes, e g
_HEADER = struct.Struct(">8sBBBBI5HQ2H")


@dataclass(frozen=True)
class ChunkHeader:
    mode: Mode
    systematic: bool
    field: FieldSpec
    params: CodeParams
    payload_length: int
    node: tuple[int, int]

    SIZE = _HEADER.size

    def pack(self) -> bytes:
        f, p = self.field, self.params
        value = f.p if f.kind == "prime" else f.polynomial
        m = 0 if f.kind == "prime" else f.m
        try:
            return _HEADER.pack(
                MAGIC, _MODE_CODES[Mode(self.mode)], FLAG_SYSTEMATIC if self.systematic else 0,
                _KIND_CODES[f.kind], m, value, p.n, p.u, p.k, p.l, p.dbar,
                self.payload_length, *self.node,
            )
        except struct.error as exc:
            raise ParameterError(f"header field out of range: {exc}", "header field widths") from exc

    @classmethod
    def unpack(cls, buf: bytes) -> "ChunkHeader":
        if len(buf) < cls.SIZE:
            raise ChunkFormatError(f"chunk header truncated ({len(buf)} < {cls.SIZE} bytes)")
        (magic, mode, flags, kind, m, value, n, u, k, l, dbar,
         length, e, g) = _HEADER.unpack(buf[: cls.SIZE])
        if magic != MAGIC:
            raise ChunkFormatError(f"bad magic {magic!r}")
        if mode not in (0, 1) or kind not in (0, 1):
            raise ChunkFormatError(f"unknown mode {mode} or field kind {kind}")
        spec = FieldSpec.prime(value) if kind == 0 else FieldSpec.binary(m, value)
        params = CodeParams(n, u, k, l, dbar)
        if not (e < params.nbar and g < u):
            raise ChunkFormatError(f"node ({e}, {g}) outside the grid")
        return cls(Mode.MSRR if mode == 0 else Mode.MBRR, bool(flags & FLAG_SYSTEMATIC),
                   spec, params, length, (e, g))

    def same_stripe_set(self, other: "ChunkHeader") -> bool:
        return replace(self, node=(0, 0)) == replace(other, node=(0, 0))


# -- byte <-> symbol conversion ------------------------------------------------

def bytes_to_data_symbols(data: bytes, bits: int, count: int) -> np.ndarray:
    """Split ``data`` into ``count`` symbols of ``bits`` bits each (zero padded)."""
    raw = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if raw.size > count * bits:
        raise ValueError("too many bytes for the requested symbol count")
    padded = np.zeros(count * bits, dtype=np.int64)
    padded[: raw.size] = raw
    weights = np.int64(1) << np.arange(bits - 1, -1, -1, dtype=np.int64)
    return padded.reshape(count, bits) @ weights


def data_symbols_to_bytes(symbols: np.ndarray, bits: int, length: int) -> bytes:
    symbols = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if symbols.size and symbols.max() >= (1 << bits):
        raise InconsistentDataError("decoded symbol exceeds the data alphabet")
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    raw = ((symbols[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(raw)[:length].tobytes()


def symbols_to_bytes(symbols: np.ndarray, width: int) -> bytes:
    shifts = 8 * np.arange(width - 1, -1, -1, dtype=np.int64)
    v = np.asarray(symbols, dtype=np.int64).reshape(-1)
    return ((v[:, None] >> shifts) & 0xFF).astype(np.uint8).tobytes()


def bytes_to_symbols(buf: bytes, width: int) -> np.ndarray:
    shifts = 8 * np.arange(width - 1, -1, -1, dtype=np.int64)
    raw = np.frombuffer(buf, dtype=np.uint8).astype(np.int64).reshape(-1, width)
    return (raw << shifts).sum(axis=1)


# -- stripe codec ---------------------------------------------------------------

class StripeCodec:
    """Batch encode/decode/repair of many stripes through the code's linear maps."""

    def __init__(self, code: RackAwareCode, systematic: bool = True):
        self.code = code
        self.field: Field = code.field
        self.systematic = systematic
        self.bits = self.field.data_bits
        if self.bits < 1:
            raise ParameterError("field too small to carry data bits", "q >= 2")
        self._G = None

    @property
    def generator(self) -> np.ndarray:
        if self._G is None:
            self._G = self.code.generator_matrix(self.systematic)
        return self._G

    def stripe_count(self, length: int) -> int:
        per_stripe = self.code.B * self.bits
        return -(-8 * length // per_stripe)

    def encode(self, data: bytes) -> np.ndarray:
        """(stripes, n, alpha) array of node symbols."""
        S = self.stripe_count(len(data))
        c = self.code
        if S == 0:
            return np.zeros((0, c.n, c.alpha), dtype=np.int64)
        msgs = bytes_to_data_symbols(data, self.bits, S * c.B).reshape(S, c.B)
        return self.field.matmul(msgs, self.generator).reshape(S, c.n, c.alpha)

    def decode(self, nodes: dict[int, np.ndarray], length: int) -> bytes:
        """Bytes from {flat node: (stripes, alpha) symbols}; every supplied node is
        checked against the re-encoded stripes."""
        c, F = self.code, self.field
        S = self.stripe_count(length)
        if len(nodes) < c.k_hat:
            raise InsufficientDataError(f"need at least {c.k_hat} chunks, got {len(nodes)}")
        if S == 0:
            return b""
        order = sorted(nodes)
        solve_on = order[: c.k_hat]
        D = c.decoding_matrix(solve_on, self.systematic)
        X = np.concatenate([nodes[j].reshape(S, c.alpha) for j in solve_on], axis=1)
        msgs = F.matmul(X, D)
        check = F.matmul(msgs, self.generator).reshape(S, c.n, c.alpha)
        for j in order:
            if not np.array_equal(check[:, j], nodes[j].reshape(S, c.alpha)):
                raise InconsistentDataError(f"chunk {c.params.label(j)} disagrees with the decoded stripes")
        return data_symbols_to_bytes(msgs, self.bits, length)


# -- chunk files -------------------------------------------------------------------

def chunk_path(directory: Path, node: tuple[int, int]) -> Path:
    return Path(directory) / f"node_{node[0]:03d}_{node[1]:03d}.chunk"


def write_chunk(path: Path, header: ChunkHeader, symbols: np.ndarray, width: int) -> None:
    Path(path).write_bytes(header.pack() + symbols_to_bytes(symbols, width))


def read_chunk(path: Path) -> tuple[ChunkHeader, np.ndarray]:
    buf = Path(path).read_bytes()
    header = ChunkHeader.unpack(buf)
    field = make_field(header.field)
    alpha = _alpha(header)
    width = field.symbol_bytes
    body = buf[ChunkHeader.SIZE:]
    per_stripe = alpha * width
    if len(body) % per_stripe:
        raise ChunkFormatError(f"{path}: payload is not a whole number of stripes")
    symbols = bytes_to_symbols(body, width).reshape(-1, alpha)
    if symbols.size and symbols.max() >= field.order:
        raise ChunkFormatError(f"{path}: symbol outside the field")
    return header, symbols


def _alpha(header: ChunkHeader) -> int:
    return 1 if header.mode is Mode.MSRR else header.params.dbar


def encode_file(data: bytes, outdir: Path, mode: Mode | str, params: CodeParams,
                field: Field | None = None, systematic: bool = True) -> list[Path]:
    code = build_code(mode, params, field)
    codec = StripeCodec(code, systematic)
    stripes = codec.encode(data)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for j in range(params.n):
        node = params.label(j)
        header = ChunkHeader(Mode(mode), systematic, code.field.spec, params, len(data), node)
        path = chunk_path(outdir, node)
        write_chunk(path, header, stripes[:, j], code.field.symbol_bytes)
        paths.append(path)
    return paths


@dataclass
class ChunkSet:
    """Headers and symbols of whichever chunk files a directory holds."""

    header: ChunkHeader
    symbols: dict[int, np.ndarray]

    @property
    def params(self) -> CodeParams:
        return self.header.params

    def code(self) -> RackAwareCode:
        return build_code(self.header.mode, self.params, make_field(self.header.field))


def load_chunks(directory: Path) -> ChunkSet:
    paths = sorted(Path(directory).glob("node_*.chunk"))
    if not paths:
        raise FileNotFoundError(f"no chunk files in {directory}")
    template = None
    symbols: dict[int, np.ndarray] = {}
    stripes = None
    for path in paths:
        header, sym = read_chunk(path)
        if template is None:
            template = header
        elif not template.same_stripe_set(header):
            raise ParameterError(f"{path.name}: header does not match the stripe set", "matching chunk headers")
        if stripes is not None and sym.shape[0] != stripes:
            raise ChunkFormatError(f"{path.name}: stripe count differs from its siblings")
        stripes = sym.shape[0]
        j = template.params.index(*header.node)
        if j in symbols:
            raise ChunkFormatError(f"duplicate chunk for node {header.node}")
        symbols[j] = sym
    return ChunkSet(template, symbols)


def decode_dir(directory: Path) -> bytes:
    cs = load_chunks(directory)
    codec = StripeCodec(cs.code(), cs.header.systematic)
    expected = codec.stripe_count(cs.header.payload_length)
    for j, sym in cs.symbols.items():
        if sym.shape[0] != expected:
            raise ChunkFormatError(f"chunk {cs.params.label(j)} holds {sym.shape[0]} stripes, expected {expected}")
    return codec.decode(cs.symbols, cs.header.payload_length)


def repair_dir(directory: Path, failed=None, helper_racks=None) -> list[RepairEvent]:
    """Regenerate failed (or missing) chunk files in place.

    Optimal patterns are repaired rack by rack with the code's repair map; other
    recoverable patterns fall back to full decoding.  Returned events carry
    per-stripe symbol counts.
    """
    directory = Path(directory)
    cs = load_chunks(directory)
    p = cs.params
    code = cs.code()
    a = code.alpha
    width = code.field.symbol_bytes
    alive = np.zeros(p.n, dtype=bool)
    alive[list(cs.symbols)] = True
    if failed is not None:
        for node in failed:
            alive[code.node_index(node)] = False
    pattern = FailurePattern.of(p.label(int(j)) for j in np.flatnonzero(~alive))
    cls = classify(p, pattern)
    if cls is RepairClass.UNRECOVERABLE:
        raise UnrecoverableError(f"failures={len(pattern)} leave fewer than k={p.k} chunks")
    store = {j: cs.symbols[j] for j in np.flatnonzero(alive)}
    stripes = next(iter(store.values())).shape[0] if store else 0
    events: list[RepairEvent] = []

    def emit(j, sym):
        store[j] = sym
        alive[j] = True
        write_chunk(chunk_path(directory, p.label(j)), replace(cs.header, node=p.label(j)), sym, width)

    if cls is RepairClass.NAIVE:
        site, read = naive_reads(p, alive)
        lost = [int(j) for j in np.flatnonzero(~alive)]
        codec = StripeCodec(code, cs.header.systematic)
        subset = {j: store[j] for j in read}
        D = code.decoding_matrix(sorted(subset), cs.header.systematic)
        X = np.concatenate([subset[j] for j in sorted(subset)[: code.k_hat]], axis=1)
        full = code.field.matmul(code.field.matmul(X, D), codec.generator).reshape(stripes, p.n, a)
        for j in lost:
            emit(j, full[:, j])
        return [naive_event(p, a, site, read, lost)]

    for host, gs in pattern.by_rack().items():
        local = [g for g in range(p.u) if alive[p.index(host, g)]][: p.l]
        if helper_racks is None:
            racks = [e for e in range(p.nbar) if e != host and all(alive[code.rack_nodes(e)])][: p.dbar]
        else:
            racks = list(helper_racks)
            missing = [e for e in racks if not all(alive[code.rack_nodes(e)])]
            if missing:
                raise UnrecoverableError(f"helper racks {missing} are missing chunks")
        plan = code.repair_plan(host, gs, local, racks)
        R = code.repair_matrix(plan)
        parts = [store[j] for e in plan.helper_racks for j in code.rack_nodes(e)]
        parts += [store[p.index(host, g)] for g in plan.local_helpers]
        X = np.concatenate(parts, axis=1) if parts else np.zeros((stripes, 0), dtype=np.int64)
        out = code.field.matmul(X, R).reshape(stripes, plan.h, a)
        for t, g in enumerate(plan.failed):
            emit(p.index(host, g), out[:, t])
        intra = (p.u - 1) * a * len(plan.helper_racks) + a * len(plan.local_helpers)
        events.append(RepairEvent(
            "optimal", host, tuple((host, g) for g in plan.failed),
            tuple((host, g) for g in plan.local_helpers), plan.helper_racks,
            plan.cross_rack_symbols, intra,
        ))
    return events
