"""Padded field-major table of phase-pair subterms, and the expression codecs.

A table with ``m`` terms of at most ``n_max`` subterms has ``R = m * n_max``
rows; term ``i`` owns rows ``i*n_max .. (i+1)*n_max - 1``.  Short terms are
padded with dummy rows whose fields are all zero (``live == 0``).  Storage is
field-major: element ``(row r, field f)`` lives at linear offset ``f*R + r``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .phase import MAX_PARAMS, ParamPhase
from .ring import RingQuad
from .scalar import PAIR_CONVENTION, ScalarExpression, Term, phase_pair

FIELDS = ("live", "k_alpha", "psi_mask", "k_beta", "phi_mask")
_DTYPES = {"live": np.uint8, "k_alpha": np.uint8, "psi_mask": np.uint64, "k_beta": np.uint8, "phi_mask": np.uint64}

MAGIC = b"PZX1"
VERSION = 1
_HEADER = struct.Struct("<4sHHIIIQI")  # magic, version, reserved, n, m, n_max, R, metadata length


class CodecError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BitTable:
    param_names: tuple[str, ...]
    n_max: int
    constants: np.ndarray  # (m, 5) int64: a, b, c, d, exp
    live: np.ndarray
    k_alpha: np.ndarray
    psi_mask: np.ndarray
    k_beta: np.ndarray
    phi_mask: np.ndarray

    def __post_init__(self) -> None:
        R = self.m * self.n_max
        for name in FIELDS:
            col = getattr(self, name)
            if col.shape != (R,) or col.dtype != _DTYPES[name]:
                raise CodecError(f"field {name} must be a {_DTYPES[name].__name__} vector of length {R}")
        if self.constants.shape != (self.m, 5):
            raise CodecError("constants must have shape (m, 5)")
        dummy = self.live == 0
        if np.any(dummy & ((self.k_alpha != 0) | (self.k_beta != 0) | (self.psi_mask != 0) | (self.phi_mask != 0))):
            raise CodecError("dummy rows must have all-zero fields")
        if np.any(self.k_alpha > 7) or np.any(self.k_beta > 7):
            raise CodecError("phase constants must lie in [0, 7]")
        n = len(self.param_names)
        if n > MAX_PARAMS:
            raise CodecError(f"at most {MAX_PARAMS} parameters are supported")
        if n < MAX_PARAMS:
            high = np.uint64(~((1 << n) - 1) & (2**64 - 1))
            if np.any(self.psi_mask & high) or np.any(self.phi_mask & high):
                raise CodecError("mask bits beyond the parameter count")

    @property
    def m(self) -> int:
        return int(self.constants.shape[0])

    @property
    def R(self) -> int:
        return self.m * self.n_max

    @property
    def num_params(self) -> int:
        return len(self.param_names)

    def columns(self) -> list[np.ndarray]:
        return [getattr(self, f) for f in FIELDS]

    def offset(self, row: int, field: int) -> int:
        return field * self.R + row

    def element(self, row: int, field: int) -> int:
        """Value stored at linear offset ``field*R + row`` of the field-major table."""
        flat = self.offset(row, field)
        f, r = divmod(flat, self.R)
        return int(self.columns()[f][r])

    def constant(self, i: int) -> RingQuad:
        return RingQuad(*(int(x) for x in self.constants[i]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitTable):
            return NotImplemented
        return (
            self.param_names == other.param_names
            and self.n_max == other.n_max
            and np.array_equal(self.constants, other.constants)
            and all(np.array_equal(a, b) for a, b in zip(self.columns(), other.columns()))
        )

    # identity hash: tables are immutable, and kernels cache per-table data
    __hash__ = object.__hash__


def compile_bit_table(e: ScalarExpression) -> BitTable:
    if e.num_params > MAX_PARAMS:
        raise CodecError(f"at most {MAX_PARAMS} parameters are supported")
    n_max = max(1, e.n_max)
    R = e.m * n_max
    cols = {f: np.zeros(R, dtype=_DTYPES[f]) for f in FIELDS}
    constants = np.zeros((e.m, 5), dtype=np.int64)
    for i, t in enumerate(e.terms):
        constants[i] = t.constant.coeffs
        for j, s in enumerate(t.pairs):
            r = i * n_max + j
            cols["live"][r] = 1
            cols["k_alpha"][r] = s.psi.k
            cols["psi_mask"][r] = s.psi.mask
            cols["k_beta"][r] = s.phi.k
            cols["phi_mask"][r] = s.phi.mask
    return BitTable(e.param_names, n_max, constants, **cols)


def decompile_bit_table(t: BitTable) -> ScalarExpression:
    terms = []
    for i in range(t.m):
        rows = range(i * t.n_max, (i + 1) * t.n_max)
        pairs = tuple(
            phase_pair(
                ParamPhase(int(t.k_alpha[r]), int(t.psi_mask[r])),
                ParamPhase(int(t.k_beta[r]), int(t.phi_mask[r])),
            )
            for r in rows
            if t.live[r]
        )
        terms.append(Term(t.constant(i), pairs))
    return ScalarExpression(t.param_names, terms)


# -- JSON ---------------------------------------------------------------------


def expression_to_json(e: ScalarExpression) -> str:
    doc = {
        "format": "pzx-expr",
        "version": VERSION,
        "convention": PAIR_CONVENTION,
        "params": list(e.param_names),
        "terms": [
            {"c": list(t.constant.coeffs), "pairs": [[s.psi.k, s.psi.mask, s.phi.k, s.phi.mask] for s in t.pairs]}
            for t in e.terms
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _check_doc(doc, fmt: str) -> None:
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise CodecError(f"not a {fmt} document")
    if doc.get("version") != VERSION:
        raise CodecError(f"unsupported {fmt} version {doc.get('version')!r}")
    if doc.get("convention", PAIR_CONVENTION) != PAIR_CONVENTION:
        raise CodecError(f"unknown subterm convention {doc.get('convention')!r}")


def expression_from_json(text: str | bytes) -> ScalarExpression:
    try:
        doc = json.loads(text)
        _check_doc(doc, "pzx-expr")
        terms = [
            Term(
                RingQuad(*(int(x) for x in t["c"])),
                tuple(phase_pair(ParamPhase(ka, ma), ParamPhase(kb, mb)) for ka, ma, kb, mb in t["pairs"]),
            )
            for t in doc["terms"]
        ]
        return ScalarExpression(tuple(doc["params"]), terms)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CodecError):
            raise
        raise CodecError(f"malformed expression document: {exc}") from exc


def table_to_json(t: BitTable) -> str:
    doc = {
        "format": "pzx-table",
        "version": VERSION,
        "convention": PAIR_CONVENTION,
        "params": list(t.param_names),
        "m": t.m,
        "n_max": t.n_max,
        "R": t.R,
        "constants": t.constants.tolist(),
    }
    for f in FIELDS:
        doc[f] = [int(x) for x in getattr(t, f)]
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def table_from_json(text: str | bytes) -> BitTable:
    try:
        doc = json.loads(text)
        _check_doc(doc, "pzx-table")
        m, n_max = int(doc["m"]), int(doc["n_max"])
        if int(doc["R"]) != m * n_max:
            raise CodecError("row count R does not equal m * n_max")
        constants = np.array(doc["constants"], dtype=np.int64).reshape(m, 5)
        cols = {f: np.array(doc[f], dtype=_DTYPES[f]) for f in FIELDS}
        return BitTable(tuple(doc["params"]), n_max, constants, **cols)
    except (KeyError, TypeError, ValueError, OverflowError) as exc:
        if isinstance(exc, CodecError):
            raise
        raise CodecError(f"malformed table document: {exc}") from exc


# -- binary -------------------------------------------------------------------


def table_to_bytes(t: BitTable) -> bytes:
    meta = json.dumps({"params": list(t.param_names), "convention": PAIR_CONVENTION}).encode()
    parts = [
        _HEADER.pack(MAGIC, VERSION, 0, t.num_params, t.m, t.n_max, t.R, len(meta)),
        meta,
        t.constants.astype("<i8").tobytes(),
    ]
    for f in FIELDS:
        parts.append(getattr(t, f).astype(np.dtype(_DTYPES[f]).newbyteorder("<")).tobytes())
    return b"".join(parts)


def table_from_bytes(data: bytes) -> BitTable:
    if len(data) < _HEADER.size:
        raise CodecError("truncated table: header incomplete")
    magic, version, _, n, m, n_max, R, meta_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CodecError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CodecError(f"unsupported table version {version}")
    if R != m * n_max:
        raise CodecError("row count R does not equal m * n_max")
    widths = [np.dtype(_DTYPES[f]).itemsize for f in FIELDS]
    expected = _HEADER.size + meta_len + 40 * m + R * sum(widths)
    if len(data) != expected:
        kind = "truncated" if len(data) < expected else "oversized"
        raise CodecError(f"{kind} table: {len(data)} bytes, expected {expected}")
    pos = _HEADER.size
    try:
        meta = json.loads(data[pos : pos + meta_len])
        params = tuple(meta["params"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CodecError(f"malformed table metadata: {exc}") from exc
    if meta.get("convention") != PAIR_CONVENTION:
        raise CodecError(f"unknown subterm convention {meta.get('convention')!r}")
    if len(params) != n:
        raise CodecError("parameter count does not match the metadata")
    pos += meta_len
    constants = np.frombuffer(data, dtype="<i8", count=5 * m, offset=pos).reshape(m, 5).astype(np.int64)
    pos += 40 * m
    cols = {}
    for f, w in zip(FIELDS, widths):
        cols[f] = np.frombuffer(data, dtype=np.dtype(_DTYPES[f]).newbyteorder("<"), count=R, offset=pos).astype(_DTYPES[f])
        pos += w * R
    return BitTable(params, n_max, constants, **cols)


def serialize(e: ScalarExpression, fmt: str = "binary") -> bytes:
    """Encode an expression as ``"json"`` text or the packed ``"binary"`` table."""
    if fmt == "json":
        return expression_to_json(e).encode()
    if fmt == "binary":
        return table_to_bytes(compile_bit_table(e))
    raise ValueError(f"unknown format {fmt!r}")


def deserialize(data: bytes) -> ScalarExpression:
    """Inverse of :func:`serialize`; the format is detected from the content."""
    if data[:4] == MAGIC:
        return decompile_bit_table(table_from_bytes(data))
    if data[:1] == b"{":
        text = data.decode()
        doc_format = json.loads(text).get("format") if text.strip() else None
        if doc_format == "pzx-table":
            return decompile_bit_table(table_from_json(text))
        return expression_from_json(text)
    raise CodecError("unrecognised expression encoding")


def load_table(data: bytes) -> BitTable:
    """Read a table from either the binary or the JSON mirror encoding."""
    if data[:4] == MAGIC:
        return table_from_bytes(data)
    if data[:1] == b"{":
        doc = json.loads(data)
        if doc.get("format") == "pzx-expr":
            return compile_bit_table(expression_from_json(data))
        return table_from_json(data)
    raise CodecError("unrecognised table encoding")
