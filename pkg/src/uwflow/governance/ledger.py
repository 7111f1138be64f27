"""Append-only, hash-chained audit ledger (JSONL).

Each record's hash covers the previous hash plus the canonical JSON of the
record's content (seq, case_id, event_kind, payload), so flipping any byte
of any persisted field breaks verification at that exact seq. The file
opens with a header line naming the digest algorithm.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

LEDGER_VERSION = 1
HASH_ALG = "sha256"
GENESIS_HASH = "0" * 64


class EventKind(str, Enum):
    INGESTED = "Ingested"
    TOOL_CALL = "ToolCall"
    AGENT_OUTPUT = "AgentOutput"
    CRITIQUE_ISSUED = "CritiqueIssued"
    REVISION = "Revision"
    GUARD_EVALUATED = "GuardEvaluated"
    ESCALATION = "Escalation"
    HUMAN_DECISION = "HumanDecision"
    RECORDED = "Recorded"


class PersistenceFailure(RuntimeError):
    """An append could not be made durable; the surrounding step must fail."""


def canonical_json(payload: Any) -> str:
    """Canonical form hashed into the chain: UTF-8, sorted keys, no
    insignificant whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    case_id: str
    event_kind: str
    payload: Any
    prev_hash: str
    this_hash: str

    def content(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "case_id": self.case_id,
            "event_kind": self.event_kind,
            "payload": self.payload,
        }

    def to_line(self) -> str:
        body = self.content()
        body["prev_hash"] = self.prev_hash
        body["this_hash"] = self.this_hash
        return canonical_json(body)


def chain_hash(prev_hash: str, content: dict[str, Any]) -> str:
    digest = hashlib.sha256()
    digest.update(bytes.fromhex(prev_hash))
    digest.update(canonical_json(content).encode("utf-8"))
    return digest.hexdigest()


@dataclass(frozen=True)
class VerificationReport:
    clean: bool
    records_verified: int
    first_bad_seq: int | None = None
    detail: str = ""


def header_line() -> str:
    return canonical_json({"version": LEDGER_VERSION, "hash_alg": HASH_ALG})


class MemoryLedgerStore:
    """In-memory persistence; used by the simulation harness at scale."""

    def __init__(self):
        self.lines: list[str] = [header_line()]

    def append_line(self, line: str) -> None:
        self.lines.append(line)

    def read_lines(self) -> list[str]:
        return list(self.lines)


class FileLedgerStore:
    """JSONL persistence: one header line then one record per line.

    Every append is flushed before returning; ``fsync`` per append is
    available where the stronger durability guarantee is worth the cost.
    """

    def __init__(self, path: str, fsync: bool = False):
        self.path = path
        self.fsync = fsync
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        if not os.path.exists(path) or os.path.getsize(path) == 0:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(header_line() + "\n")
                fh.flush()
                if fsync:
                    os.fsync(fh.fileno())

    def append_line(self, line: str) -> None:
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise PersistenceFailure(f"ledger append failed: {exc}") from exc

    def read_lines(self) -> list[str]:
        with open(self.path, "r", encoding="utf-8") as fh:
            return [line.rstrip("\n") for line in fh if line != ""]


class AuditLedger:
    """Totally ordered, hash-chained event log shared by many cases."""

    def __init__(self, store: MemoryLedgerStore | FileLedgerStore | None = None):
        self.store = store if store is not None else MemoryLedgerStore()
        self._lock = threading.Lock()
        self._records: list[AuditRecord] = []
        self._last_hash = GENESIS_HASH
        # Rehydrate from an existing store so appends continue the chain.
        existing = self.store.read_lines()
        for line in existing[1:]:
            record = _parse_record_line(line)
            self._records.append(record)
            self._last_hash = record.this_hash

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[AuditRecord, ...]:
        return tuple(self._records)

    def append(self, event_kind: EventKind | str, payload: Any, case_id: str = "") -> AuditRecord:
        kind = event_kind.value if isinstance(event_kind, EventKind) else str(event_kind)
        if kind not in {e.value for e in EventKind}:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            seq = len(self._records) + 1
            content = {"seq": seq, "case_id": case_id, "event_kind": kind, "payload": payload}
            this_hash = chain_hash(self._last_hash, content)
            record = AuditRecord(
                seq=seq,
                case_id=case_id,
                event_kind=kind,
                payload=payload,
                prev_hash=self._last_hash,
                this_hash=this_hash,
            )
            self.store.append_line(record.to_line())
            self._records.append(record)
            self._last_hash = this_hash
            return record

    def for_case(self, case_id: str) -> list[AuditRecord]:
        return [r for r in self._records if r.case_id == case_id]

    def export_case_bundle(self, case_id: str) -> dict[str, Any]:
        """Self-verifying trace for one case: the full chain segment metadata
        plus the case's records; verification covers the whole ledger."""
        report = verify_chain(self)
        return {
            "case_id": case_id,
            "ledger_header": {"version": LEDGER_VERSION, "hash_alg": HASH_ALG},
            "verification": {
                "clean": report.clean,
                "records_verified": report.records_verified,
                "first_bad_seq": report.first_bad_seq,
            },
            "records": [json.loads(r.to_line()) for r in self.for_case(case_id)],
        }


def append(ledger: AuditLedger, event_kind: EventKind | str, payload: Any,
           case_id: str = "") -> AuditRecord:
    return ledger.append(event_kind, payload, case_id=case_id)


def _parse_record_line(line: str) -> AuditRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record line is not an object")
    return AuditRecord(
        seq=int(obj["seq"]),
        case_id=str(obj["case_id"]),
        event_kind=str(obj["event_kind"]),
        payload=obj["payload"],
        prev_hash=str(obj["prev_hash"]),
        this_hash=str(obj["this_hash"]),
    )


def _verify_lines(lines: list[str]) -> VerificationReport:
    if not lines:
        return VerificationReport(clean=False, records_verified=0, first_bad_seq=0,
                                  detail="missing header line")
    try:
        header = json.loads(lines[0])
        if header.get("hash_alg") != HASH_ALG:
            return VerificationReport(clean=False, records_verified=0, first_bad_seq=0,
                                      detail="unsupported or corrupted header")
    except (json.JSONDecodeError, AttributeError):
        return VerificationReport(clean=False, records_verified=0, first_bad_seq=0,
                                  detail="unreadable header line")

    prev_hash = GENESIS_HASH
    verified = 0
    for i, line in enumerate(lines[1:], start=1):
        try:
            record = _parse_record_line(line)
        except (ValueError, KeyError, TypeError):
            return VerificationReport(clean=False, records_verified=verified,
                                      first_bad_seq=i, detail="unparseable record line")
        if record.seq != i:
            return VerificationReport(clean=False, records_verified=verified,
                                      first_bad_seq=i, detail=f"seq {record.seq} where {i} expected")
        if record.prev_hash != prev_hash:
            return VerificationReport(clean=False, records_verified=verified,
                                      first_bad_seq=i, detail="prev_hash does not chain")
        try:
            expected = chain_hash(prev_hash, record.content())
        except ValueError:
            return VerificationReport(clean=False, records_verified=verified,
                                      first_bad_seq=i, detail="prev_hash is not hex")
        if record.this_hash != expected:
            return VerificationReport(clean=False, records_verified=verified,
                                      first_bad_seq=i, detail="record hash mismatch")
        prev_hash = record.this_hash
        verified += 1
    return VerificationReport(clean=True, records_verified=verified)


def verify_chain(ledger: AuditLedger) -> VerificationReport:
    """Recompute every hash from persisted bytes; clean iff nothing was
    modified. An empty ledger (header only) verifies vacuously clean."""
    return _verify_lines(ledger.store.read_lines())


def verify_ledger_file(path: str) -> VerificationReport:
    """Verify a ledger file on disk without constructing a live ledger.

    A trailing partial line (mid-record truncation) is reported as a
    divergence at the seq that record would have held.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    text = data.decode("utf-8", errors="replace")
    lines = text.split("\n")
    # A well-formed file ends with a newline, leaving one empty tail entry.
    if lines and lines[-1] == "":
        lines = lines[:-1]
        return _verify_lines(lines)
    # No trailing newline: the final line was cut mid-record.
    report = _verify_lines(lines[:-1])
    if not report.clean:
        return report
    return VerificationReport(
        clean=False,
        records_verified=report.records_verified,
        first_bad_seq=report.records_verified + 1,
        detail="file truncated mid-record",
    )


def iter_case_ids(ledger: AuditLedger) -> Iterable[str]:
    seen = set()
    for record in ledger.records:
        if record.case_id and record.case_id not in seen:
            seen.add(record.case_id)
            yield record.case_id
