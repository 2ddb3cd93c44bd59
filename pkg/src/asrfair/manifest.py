"""Corpus data model: utterance records, manifest I/O, validation, splits.

A manifest is a flat list of utterances tagged with speaker, group
(normal vs CLP) and clinical severity. Two on-disk formats are supported:

* delimited: UTF-8 CSV with header
  ``utterance_id,speaker_id,dataset_id,group,severity,words,phonemes,audio_path``
  (an optional trailing ``partition`` column carries split assignments);
  transcript fields are quoted, tokens space-separated inside the field;
  group literals ``normal|clp``, severity literals ``none|mild|moderate|severe``.
* jsonl: one JSON object per line with the same field names; ``words`` and
  ``phonemes`` are token arrays.
"""

from __future__ import annotations

import io
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleSplitError, ManifestFormatError, ManifestInvariantError

MANIFEST_FORMAT_VERSION = 1

_CSV_HEADER = (
    "utterance_id",
    "speaker_id",
    "dataset_id",
    "group",
    "severity",
    "words",
    "phonemes",
    "audio_path",
)


class Group(str, Enum):
    NORMAL = "normal"
    CLP = "clp"


class Severity(str, Enum):
    NONE = "none"
    MILD = "mild"
    MODERATE = "moderate"
    SEVERE = "severe"


class Partition(str, Enum):
    TRAIN = "train"
    DEV = "dev"
    EVAL = "eval"


class Category(str, Enum):
    """Cells of the training-composition grid: normal plus each CLP severity."""

    NORMAL = "normal"
    MILD = "mild"
    MODERATE = "moderate"
    SEVERE = "severe"


# Canonical ordering used in composition labels: severities first, normal last.
CATEGORY_ORDER = (Category.MILD, Category.MODERATE, Category.SEVERE, Category.NORMAL)

_SHORT_CATEGORY = {
    Category.MILD: "Mi",
    Category.MODERATE: "Mo",
    Category.SEVERE: "Se",
    Category.NORMAL: "No",
}


def composition_label(composition: Iterable[Category], short: bool = False) -> str:
    """Render a composition set as e.g. ``Mild+Moderate+Severe+Normal`` (or ``Mi+Mo+Se+No``)."""
    cats = set(composition)
    parts = [c for c in CATEGORY_ORDER if c in cats]
    if short:
        return "+".join(_SHORT_CATEGORY[c] for c in parts)
    return "+".join(c.value.capitalize() for c in parts)


@dataclass(frozen=True)
class UtteranceRecord:
    """One utterance with its reference transcript and group/severity tags."""

    utterance_id: str
    speaker_id: str
    dataset_id: str
    group: Group
    severity: Severity
    reference_words: tuple[str, ...]
    reference_phonemes: tuple[str, ...] | None = None
    audio_path: str | None = None
    partition: Partition | None = None

    @property
    def category(self) -> Category:
        if self.group is Group.NORMAL:
            return Category.NORMAL
        return Category(self.severity.value)

    def consistent_tags(self) -> bool:
        """Group and severity agree: normal <-> none, clp <-> mild/moderate/severe."""
        if self.group is Group.NORMAL:
            return self.severity is Severity.NONE
        return self.severity in (Severity.MILD, Severity.MODERATE, Severity.SEVERE)


@dataclass(frozen=True)
class CorpusManifest:
    dataset_id: str
    records: tuple[UtteranceRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def by_partition(self, partition: Partition) -> tuple[UtteranceRecord, ...]:
        return tuple(r for r in self.records if r.partition is partition)


@dataclass(frozen=True)
class SplitSpec:
    """Parameters of the deterministic train/dev/eval split.

    ``test_fraction`` of the corpus goes to eval; of the remainder,
    ``dev_fraction_of_train`` goes to dev. The shuffle uses a PCG64
    generator seeded with ``seed``, so the assignment is a pure function
    of (manifest, spec).
    """

    test_fraction: float = 0.2
    dev_fraction_of_train: float = 0.2
    seed: int = 0
    speaker_disjoint: bool = False

    def __post_init__(self) -> None:
        for name in ("test_fraction", "dev_fraction_of_train"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class Violation:
    code: str
    utterance_id: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    total_records: int
    counts_by_category: dict[tuple[Group, Severity], int]
    counts_by_partition: dict[Partition | None, int]
    violations: tuple[Violation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, group: Group, severity: Severity | None = None) -> int:
        return sum(
            n
            for (g, s), n in self.counts_by_category.items()
            if g is group and (severity is None or s is severity)
        )

    def render(self) -> str:
        lines = [f"records: {self.total_records}"]
        for (group, severity), n in sorted(
            self.counts_by_category.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
        ):
            lines.append(f"  {group.value}/{severity.value}: {n}")
        part_bits = []
        for part in (Partition.TRAIN, Partition.DEV, Partition.EVAL, None):
            if part in self.counts_by_partition:
                name = part.value if part is not None else "unassigned"
                part_bits.append(f"{name}={self.counts_by_partition[part]}")
        if part_bits:
            lines.append("partitions: " + " ".join(part_bits))
        if self.violations:
            lines.append(f"violations: {len(self.violations)}")
            for v in self.violations:
                lines.append(f"  [{v.code}] {v.utterance_id}: {v.message}")
        else:
            lines.append("violations: none")
        return "\n".join(lines)


def _record_violations(records: Sequence[UtteranceRecord]) -> list[Violation]:
    violations: list[Violation] = []
    seen: Counter[str] = Counter(r.utterance_id for r in records)
    flagged_dupes = set()
    dataset_ids = {r.dataset_id for r in records}
    for r in records:
        if seen[r.utterance_id] > 1 and r.utterance_id not in flagged_dupes:
            flagged_dupes.add(r.utterance_id)
            violations.append(
                Violation(
                    "duplicate_id",
                    r.utterance_id,
                    f"utterance_id appears {seen[r.utterance_id]} times",
                )
            )
        if not r.consistent_tags():
            violations.append(
                Violation(
                    "severity_group_mismatch",
                    r.utterance_id,
                    f"group={r.group.value} is inconsistent with severity={r.severity.value}",
                )
            )
        if not r.reference_words:
            violations.append(
                Violation("empty_reference", r.utterance_id, "reference transcript is empty")
            )
    if len(dataset_ids) > 1:
        violations.append(
            Violation(
                "dataset_id_mismatch",
                "",
                f"records carry {len(dataset_ids)} distinct dataset_ids: {sorted(dataset_ids)}",
            )
        )
    return violations


def validate_manifest(manifest: CorpusManifest) -> ValidationReport:
    """Count records per (group, severity) and per partition; flag every invariant violation.

    Violations are reported as data, never raised.
    """
    counts_by_category: Counter[tuple[Group, Severity]] = Counter()
    counts_by_partition: Counter[Partition | None] = Counter()
    for r in manifest.records:
        counts_by_category[(r.group, r.severity)] += 1
        counts_by_partition[r.partition] += 1
    return ValidationReport(
        total_records=len(manifest.records),
        counts_by_category=dict(counts_by_category),
        counts_by_partition=dict(counts_by_partition),
        violations=tuple(_record_violations(manifest.records)),
    )


def _parse_enum(enum_cls, literal: str, row: int, what: str):
    try:
        return enum_cls(literal)
    except ValueError:
        allowed = "|".join(m.value for m in enum_cls)
        raise ManifestFormatError(
            f"row {row}: bad {what} literal {literal!r} (expected {allowed})"
        ) from None


def _row_to_record(fields: dict[str, str], row: int) -> UtteranceRecord:
    words = tuple(fields.get("words", "").split())
    phonemes_raw = fields.get("phonemes", "")
    partition_raw = fields.get("partition", "")
    return UtteranceRecord(
        utterance_id=fields.get("utterance_id", ""),
        speaker_id=fields.get("speaker_id", ""),
        dataset_id=fields.get("dataset_id", ""),
        group=_parse_enum(Group, fields.get("group", ""), row, "group"),
        severity=_parse_enum(Severity, fields.get("severity", ""), row, "severity"),
        reference_words=words,
        reference_phonemes=tuple(phonemes_raw.split()) if phonemes_raw else None,
        audio_path=fields.get("audio_path") or None,
        partition=_parse_enum(Partition, partition_raw, row, "partition")
        if partition_raw
        else None,
    )


def _parse_delimited(text: str) -> list[UtteranceRecord]:
    import csv

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestFormatError("empty manifest: missing header row") from None
    expected = list(_CSV_HEADER)
    if header != expected and header != expected + ["partition"]:
        raise ManifestFormatError(
            f"bad header {header!r}; expected {','.join(expected)} (optional trailing partition)"
        )
    records = []
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ManifestFormatError(
                f"row {row_num}: expected {len(header)} fields, got {len(row)}"
            )
        records.append(_row_to_record(dict(zip(header, row)), row_num))
    return records


def _parse_jsonl(text: str) -> list[UtteranceRecord]:
    records = []
    for row_num, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestFormatError(f"row {row_num}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise ManifestFormatError(f"row {row_num}: expected a JSON object")
        fields = {}
        for key in (*_CSV_HEADER, "partition"):
            value = obj.get(key)
            if value is None:
                fields[key] = ""
            elif isinstance(value, list):
                fields[key] = " ".join(str(t) for t in value)
            else:
                fields[key] = str(value)
        records.append(_row_to_record(fields, row_num))
    return records


def load_manifest(
    source: str | Path | io.TextIOBase,
    format: str = "delimited",
    strict: bool = True,
) -> CorpusManifest:
    """Read a manifest from a path or text stream.

    With ``strict`` (the default), duplicate ids, group/severity
    mismatches and empty references raise ManifestInvariantError;
    with ``strict=False`` the offending records are kept so that
    validate_manifest can report them.
    """
    if format not in ("delimited", "jsonl"):
        raise ValueError(f"unknown manifest format {format!r}")
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    records = _parse_delimited(text) if format == "delimited" else _parse_jsonl(text)
    if strict:
        violations = _record_violations(records)
        if violations:
            v = violations[0]
            raise ManifestInvariantError(f"[{v.code}] {v.utterance_id}: {v.message}")
    dataset_id = records[0].dataset_id if records else ""
    return CorpusManifest(dataset_id=dataset_id, records=tuple(records))


def _quote(token_field: str) -> str:
    return '"' + token_field.replace('"', '""') + '"'


def _csv_field(value: str) -> str:
    if any(c in value for c in ',"\n'):
        return _quote(value)
    return value


def save_manifest(manifest: CorpusManifest, path: str | Path, format: str = "delimited") -> None:
    """Write a manifest; output bytes are a pure function of the manifest."""
    if format == "delimited":
        with_partition = any(r.partition is not None for r in manifest.records)
        header = list(_CSV_HEADER) + (["partition"] if with_partition else [])
        lines = [",".join(header)]
        for r in manifest.records:
            row = [
                _csv_field(r.utterance_id),
                _csv_field(r.speaker_id),
                _csv_field(r.dataset_id),
                r.group.value,
                r.severity.value,
                _quote(" ".join(r.reference_words)),
                _quote(" ".join(r.reference_phonemes)) if r.reference_phonemes else '""',
                _csv_field(r.audio_path or ""),
            ]
            if with_partition:
                row.append(r.partition.value if r.partition else "")
            lines.append(",".join(row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif format == "jsonl":
        lines = []
        for r in manifest.records:
            obj = {
                "utterance_id": r.utterance_id,
                "speaker_id": r.speaker_id,
                "dataset_id": r.dataset_id,
                "group": r.group.value,
                "severity": r.severity.value,
                "words": list(r.reference_words),
                "phonemes": list(r.reference_phonemes) if r.reference_phonemes else None,
                "audio_path": r.audio_path,
            }
            if r.partition is not None:
                obj["partition"] = r.partition.value
            lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=False))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown manifest format {format!r}")


def _greedy_speaker_split(
    manifest: CorpusManifest, spec: SplitSpec, rng: np.random.Generator
) -> list[Partition]:
    n = len(manifest.records)
    speakers: dict[str, list[int]] = {}
    for idx, r in enumerate(manifest.records):
        speakers.setdefault(r.speaker_id, []).append(idx)
    max_count = max(len(v) for v in speakers.values())
    if max_count > (1.0 - spec.test_fraction) * n:
        raise InfeasibleSplitError(
            f"infeasible split: one speaker holds {max_count}/{n} utterances, "
            f"more than the non-test share (test_fraction={spec.test_fraction})"
        )
    speaker_ids = list(speakers)
    order = [speaker_ids[i] for i in rng.permutation(len(speaker_ids))]

    assignment = [Partition.TRAIN] * n
    eval_target = int(round(n * spec.test_fraction))
    # Greedy: in shuffled order take whole speakers into eval while that
    # moves the count closer to the target, then likewise for dev.
    pos = 0
    taken = 0
    while pos < len(order) and taken < eval_target:
        size = len(speakers[order[pos]])
        if abs(taken + size - eval_target) > abs(taken - eval_target):
            break
        for idx in speakers[order[pos]]:
            assignment[idx] = Partition.EVAL
        taken += size
        pos += 1
    dev_target = int(round((n - taken) * spec.dev_fraction_of_train))
    dev_taken = 0
    while pos < len(order) and dev_taken < dev_target:
        size = len(speakers[order[pos]])
        if abs(dev_taken + size - dev_target) > abs(dev_taken - dev_target):
            break
        for idx in speakers[order[pos]]:
            assignment[idx] = Partition.DEV
        dev_taken += size
        pos += 1
    return assignment


def split_corpus(manifest: CorpusManifest, spec: SplitSpec) -> CorpusManifest:
    """Assign train/dev/eval partitions; deterministic for a fixed spec.

    Default mode shuffles utterances with a seeded PCG64 generator and
    slices off round(N * test_fraction) for eval, then
    round(remaining * dev_fraction_of_train) for dev. Speaker-disjoint
    mode assigns whole speakers greedily instead, so counts only
    approximate the fractions.
    """
    n = len(manifest.records)
    if n == 0:
        return manifest
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.speaker_disjoint:
        assignment = _greedy_speaker_split(manifest, spec, rng)
    else:
        perm = rng.permutation(n)
        n_eval = int(round(n * spec.test_fraction))
        n_dev = int(round((n - n_eval) * spec.dev_fraction_of_train))
        assignment = [Partition.TRAIN] * n
        for idx in perm[:n_eval]:
            assignment[idx] = Partition.EVAL
        for idx in perm[n_eval : n_eval + n_dev]:
            assignment[idx] = Partition.DEV
    new_records = tuple(
        replace(r, partition=p) for r, p in zip(manifest.records, assignment)
    )
    return CorpusManifest(dataset_id=manifest.dataset_id, records=new_records)


def select_training_composition(
    manifest: CorpusManifest, composition: Iterable[Category]
) -> tuple[UtteranceRecord, ...]:
    """Train-partition records whose category is in the composition set."""
    cats = frozenset(composition)
    if not cats:
        raise ValueError("empty composition")
    if not any(r.partition is not None for r in manifest.records):
        raise ValueError("manifest has no partition assignments; run split_corpus first")
    return tuple(
        r
        for r in manifest.records
        if r.partition is Partition.TRAIN and r.category in cats
    )
