"""The public transcript and its portable ASCII serialization.

Each record is written as ``<length>:<body>\\n`` where ``<length>`` is the
number of characters in ``<body>`` and ``<body>`` is
``<label>|<sender>|<kind>|<data>``. Kinds:

    bits   '0'/'1' characters
    trits  '0'/'1'/'e' characters
    idx    comma-separated decimal indices (order preserved)
    mat    '<rows>x<cols>:' then row-major bits packed 4 per hex digit
    hash   a hash function, written as its matrix
    int    a decimal integer
    text   free ASCII text without newlines
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from ..channel import trits_from_str, trits_to_str
from ..gf2 import BitMatrix, bits_to_str, bitvec
from ..hashing import HashFn


@dataclass(frozen=True)
class Record:
    label: str
    sender: str
    kind: str
    payload: Any

    def data(self) -> str:
        return encode_payload(self.kind, self.payload)


def _hex_bits(bits: np.ndarray) -> str:
    flat = np.asarray(bits, dtype=np.uint8).ravel()
    return np.packbits(flat).tobytes().hex()[:(flat.size + 3) // 4]


def _unhex_bits(text: str, count: int) -> np.ndarray:
    padded = text + "0" * (len(text) % 2)
    return np.unpackbits(np.frombuffer(bytes.fromhex(padded), dtype=np.uint8))[:count]


def infer_kind(payload) -> str:
    if isinstance(payload, HashFn):
        return "hash"
    if isinstance(payload, BitMatrix):
        return "mat"
    if isinstance(payload, str):
        return "text"
    if isinstance(payload, (int, np.integer)):
        return "int"
    arr = np.asarray(payload)
    if arr.dtype.kind in "iu" and arr.dtype.itemsize >= 4:
        return "idx"
    return "bits"


def encode_payload(kind: str, payload) -> str:
    if kind == "bits":
        return bits_to_str(payload)
    if kind == "trits":
        return trits_to_str(payload)
    if kind == "idx":
        return ",".join(str(int(i)) for i in np.asarray(payload).tolist())
    if kind in ("mat", "hash"):
        m = payload.matrix if isinstance(payload, HashFn) else payload
        return f"{m.rows}x{m.cols}:{_hex_bits(m.to_bits())}"
    if kind == "int":
        return str(int(payload))
    if kind == "text":
        if "\n" in payload:
            raise ValueError("text payloads cannot contain newlines")
        return payload
    raise ValueError(f"unknown record kind {kind!r}")


def decode_payload(kind: str, data: str):
    if kind == "bits":
        return bitvec([int(c) for c in data])
    if kind == "trits":
        return trits_from_str(data)
    if kind == "idx":
        return np.array([int(v) for v in data.split(",")] if data else [], dtype=np.int64)
    if kind in ("mat", "hash"):
        shape, _, hexdata = data.partition(":")
        rows, cols = (int(v) for v in shape.split("x"))
        m = BitMatrix.from_bits(_unhex_bits(hexdata, rows * cols).reshape(rows, cols))
        return HashFn(m) if kind == "hash" else m
    if kind == "int":
        return int(data)
    if kind == "text":
        return data
    raise ValueError(f"unknown record kind {kind!r}")


class Transcript:
    """Append-only list of public records, seen by every party."""

    def __init__(self, records=()):
        self._records: list[Record] = list(records)

    def append(self, label: str, sender: str, payload, kind: str | None = None) -> Record:
        for field in (label, sender):
            if "|" in field or "\n" in field:
                raise ValueError("labels and senders cannot contain '|' or newlines")
        rec = Record(label, sender, kind or infer_kind(payload), payload)
        self._records.append(rec)
        return rec

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self._records)

    def __getitem__(self, i):
        return self._records[i]

    def prefix(self, length: int) -> "Transcript":
        return Transcript(self._records[:length])

    def get(self, label: str, default=None):
        """Payload of the latest record with this label."""
        for rec in reversed(self._records):
            if rec.label == label:
                return rec.payload
        return default

    def has(self, label: str) -> bool:
        return any(rec.label == label for rec in self._records)

    def labels(self) -> list[str]:
        return [rec.label for rec in self._records]

    def dumps(self) -> str:
        out = []
        for rec in self._records:
            body = f"{rec.label}|{rec.sender}|{rec.kind}|{rec.data()}"
            out.append(f"{len(body)}:{body}\n")
        return "".join(out)

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        records = []
        pos = 0
        while pos < len(text):
            colon = text.index(":", pos)
            size = int(text[pos:colon])
            body = text[colon + 1:colon + 1 + size]
            if len(body) != size or text[colon + 1 + size:colon + 2 + size] != "\n":
                raise ValueError(f"truncated record at offset {pos}")
            label, sender, kind, data = body.split("|", 3)
            records.append(Record(label, sender, kind, decode_payload(kind, data)))
            pos = colon + 2 + size
        return cls(records)
