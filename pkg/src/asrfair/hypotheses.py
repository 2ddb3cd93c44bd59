"""Hypothesis transcripts: file ingestion and seeded corruption simulation.

A hypothesis set maps utterance ids to token sequences. Ingestion accepts
either a delimited file with header ``utterance_id,text`` or a directory of
``<utterance_id>.txt`` files. An empty transcript is a present entry with
zero tokens, distinct from a missing one.

The simulator stands in for an external recognizer at desk scale: tokens
are dropped / substituted / followed by insertions with per-severity
probabilities. Randomness comes from PCG64 streams seeded per utterance
from (profile seed, blake2b(utterance_id)), so output is reproducible
across runs, platforms and processing order.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import HypothesisFormatError
from .manifest import Severity, UtteranceRecord

HYPOTHESES_FORMAT_VERSION = 1


class Provenance(str, Enum):
    EXTERNAL = "external"
    SIMULATED = "simulated"


@dataclass(frozen=True)
class HypothesisSet:
    entries: Mapping[str, tuple[str, ...]]
    provenance: Provenance = Provenance.EXTERNAL

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, utterance_id: str) -> bool:
        return utterance_id in self.entries

    def get(self, utterance_id: str) -> tuple[str, ...] | None:
        return self.entries.get(utterance_id)

    def ids(self) -> tuple[str, ...]:
        return tuple(self.entries)


def load_hypotheses(source: str | Path, format: str | None = None) -> HypothesisSet:
    """Read hypotheses from a delimited file or a directory of .txt files.

    ``format`` is ``"delimited"`` or ``"directory"``; None auto-detects
    from the path.
    """
    path = Path(source)
    if format is None:
        format = "directory" if path.is_dir() else "delimited"
    if format == "directory":
        if not path.is_dir():
            raise HypothesisFormatError(f"not a directory: {path}")
        entries: dict[str, tuple[str, ...]] = {}
        for txt in sorted(path.glob("*.txt")):
            entries[txt.stem] = tuple(txt.read_text(encoding="utf-8").split())
        return HypothesisSet(entries=entries, provenance=Provenance.EXTERNAL)
    if format != "delimited":
        raise ValueError(f"unknown hypothesis format {format!r}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise HypothesisFormatError(f"unreadable hypothesis file: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise HypothesisFormatError("empty hypothesis file: missing header row") from None
    if header != ["utterance_id", "text"]:
        raise HypothesisFormatError(
            f"bad header {header!r}; expected utterance_id,text"
        )
    entries = {}
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise HypothesisFormatError(f"row {row_num}: expected 2 fields, got {len(row)}")
        utt_id, transcript = row
        if utt_id in entries:
            raise HypothesisFormatError(f"row {row_num}: duplicate utterance_id {utt_id!r}")
        entries[utt_id] = tuple(transcript.split())
    return HypothesisSet(entries=entries, provenance=Provenance.EXTERNAL)


def save_hypotheses(hypotheses: HypothesisSet, path: str | Path) -> None:
    """Write the delimited form, rows sorted by id for byte-stable output."""
    lines = ["utterance_id,text"]
    for utt_id in sorted(hypotheses.entries):
        text = " ".join(hypotheses.entries[utt_id])
        if any(c in text for c in ',"\n') or any(c in utt_id for c in ',"\n'):
            text = '"' + text.replace('"', '""') + '"'
            utt_id = '"' + utt_id.replace('"', '""') + '"'
        lines.append(f"{utt_id},{text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SeverityRates:
    substitution_prob: float = 0.0
    deletion_prob: float = 0.0
    insertion_prob: float = 0.0

    def __post_init__(self) -> None:
        for name in ("substitution_prob", "deletion_prob", "insertion_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.substitution_prob + self.deletion_prob > 1.0:
            raise ValueError("substitution_prob + deletion_prob must not exceed 1")


@dataclass(frozen=True)
class CorruptionProfile:
    """Per-severity corruption rates; normal utterances use the ``none`` row."""

    rates: Mapping[Severity, SeverityRates]
    vocabulary: tuple[str, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.vocabulary:
            raise ValueError("vocabulary must be non-empty")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    def rates_for(self, severity: Severity) -> SeverityRates:
        return self.rates.get(severity, SeverityRates())

    @classmethod
    def with_substitution(
        cls,
        vocabulary: Sequence[str],
        seed: int = 0,
        normal: float = 0.0,
        mild: float = 0.0,
        moderate: float = 0.0,
        severe: float = 0.0,
    ) -> "CorruptionProfile":
        return cls(
            rates={
                Severity.NONE: SeverityRates(substitution_prob=normal),
                Severity.MILD: SeverityRates(substitution_prob=mild),
                Severity.MODERATE: SeverityRates(substitution_prob=moderate),
                Severity.SEVERE: SeverityRates(substitution_prob=severe),
            },
            vocabulary=tuple(vocabulary),
            seed=seed,
        )


def load_profile(path: str | Path) -> CorruptionProfile:
    """Read a corruption profile from JSON.

    Schema: ``{"seed": int, "vocabulary": [...],
    "rates": {"none"|"mild"|"moderate"|"severe":
    {"substitution": p, "deletion": p, "insertion": p}}}``.
    """
    import json

    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    rates = {}
    for key, spec in obj.get("rates", {}).items():
        rates[Severity(key)] = SeverityRates(
            substitution_prob=float(spec.get("substitution", 0.0)),
            deletion_prob=float(spec.get("deletion", 0.0)),
            insertion_prob=float(spec.get("insertion", 0.0)),
        )
    return CorruptionProfile(
        rates=rates,
        vocabulary=tuple(obj["vocabulary"]),
        seed=int(obj.get("seed", 0)),
    )


def _utterance_rng(seed: int, utterance_id: str) -> np.random.Generator:
    digest = hashlib.blake2b(utterance_id.encode("utf-8"), digest_size=16).digest()
    words = [int.from_bytes(digest[k : k + 4], "little") for k in range(0, 16, 4)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *words])))


def _corrupt(
    tokens: Sequence[str], rates: SeverityRates, vocabulary: tuple[str, ...], rng
) -> tuple[str, ...]:
    out: list[str] = []
    for token in tokens:
        u = rng.random()
        if u < rates.deletion_prob:
            pass
        elif u < rates.deletion_prob + rates.substitution_prob:
            candidates = [w for w in vocabulary if w != token]
            if candidates:
                out.append(candidates[rng.integers(len(candidates))])
            else:
                out.append(token)
        else:
            out.append(token)
        if rng.random() < rates.insertion_prob:
            out.append(vocabulary[rng.integers(len(vocabulary))])
    return tuple(out)


def simulate_hypotheses(
    records: Iterable[UtteranceRecord], profile: CorruptionProfile
) -> HypothesisSet:
    """Corrupt each record's reference words per its severity's rates.

    Per token: delete with p_del, else substitute (uniformly over the
    vocabulary minus the token) with p_sub, else keep; after every
    reference position insert a uniform vocabulary token with p_ins.
    """
    entries: dict[str, tuple[str, ...]] = {}
    for record in records:
        rng = _utterance_rng(profile.seed, record.utterance_id)
        rates = profile.rates_for(record.severity)
        entries[record.utterance_id] = _corrupt(
            record.reference_words, rates, profile.vocabulary, rng
        )
    return HypothesisSet(entries=entries, provenance=Provenance.SIMULATED)
