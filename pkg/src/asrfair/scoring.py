"""Test-set scoring: corpus-level WER/PER stratified by group and severity.

Rates are corpus-level: S/D/I counts are summed within each stratum and
divided by that stratum's total reference length (never averaged per
utterance). Missing hypotheses are either excluded (with their count
reported) or scored as empty output, i.e. all deletions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .alignment import AlignmentOutcome, align_tokens, normalize_tokens
from .errors import PerUnavailableError
from .hypotheses import HypothesisSet
from .manifest import Group, Severity, UtteranceRecord


class MissingPolicy(str, Enum):
    EXCLUDE = "exclude"
    SCORE_AS_EMPTY = "empty"


class ScoringLevel(str, Enum):
    WORD = "word"
    PHONEME = "phoneme"


@dataclass(frozen=True)
class ErrorRateReport:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    hits: int = 0
    ref_tokens: int = 0
    n_utterances: int = 0
    n_missing_hypotheses: int = 0

    @property
    def error_percent(self) -> float | None:
        """100 * (S + D + I) / total reference tokens; None when no tokens scored."""
        if self.ref_tokens == 0:
            return None
        return 100.0 * (self.substitutions + self.deletions + self.insertions) / self.ref_tokens

    def add(self, outcome: AlignmentOutcome) -> "ErrorRateReport":
        return ErrorRateReport(
            substitutions=self.substitutions + outcome.substitutions,
            deletions=self.deletions + outcome.deletions,
            insertions=self.insertions + outcome.insertions,
            hits=self.hits + outcome.hits,
            ref_tokens=self.ref_tokens + outcome.ref_len,
            n_utterances=self.n_utterances + 1,
            n_missing_hypotheses=self.n_missing_hypotheses,
        )

    def add_missing(self) -> "ErrorRateReport":
        return ErrorRateReport(
            substitutions=self.substitutions,
            deletions=self.deletions,
            insertions=self.insertions,
            hits=self.hits,
            ref_tokens=self.ref_tokens,
            n_utterances=self.n_utterances,
            n_missing_hypotheses=self.n_missing_hypotheses + 1,
        )


@dataclass(frozen=True)
class GroupErrorReport:
    by_group: Mapping[Group, ErrorRateReport]
    by_severity: Mapping[Severity, ErrorRateReport]
    overall: ErrorRateReport
    level: ScoringLevel

    @property
    def w_n(self) -> float | None:
        report = self.by_group.get(Group.NORMAL)
        return report.error_percent if report else None

    @property
    def w_c(self) -> float | None:
        report = self.by_group.get(Group.CLP)
        return report.error_percent if report else None

    def severity_percent(self, severity: Severity) -> float | None:
        report = self.by_severity.get(severity)
        return report.error_percent if report else None

    def render(self) -> str:
        def line(name: str, r: ErrorRateReport) -> str:
            rate = f"{r.error_percent:.2f}" if r.error_percent is not None else "n/a"
            return (
                f"  {name}: rate={rate} S={r.substitutions} D={r.deletions} "
                f"I={r.insertions} ref_tokens={r.ref_tokens} "
                f"utts={r.n_utterances} missing={r.n_missing_hypotheses}"
            )

        lines = [f"level: {self.level.value}"]
        for group in (Group.NORMAL, Group.CLP):
            if group in self.by_group:
                lines.append(line(group.value, self.by_group[group]))
        for severity in (Severity.MILD, Severity.MODERATE, Severity.SEVERE):
            if severity in self.by_severity:
                lines.append(line(severity.value, self.by_severity[severity]))
        lines.append(line("overall", self.overall))
        return "\n".join(lines)


def _reference_tokens(
    record: UtteranceRecord, level: ScoringLevel, normalize: bool
) -> tuple[str, ...]:
    if level is ScoringLevel.PHONEME:
        if record.reference_phonemes is None:
            raise PerUnavailableError(
                f"PER unavailable: record {record.utterance_id!r} has no phoneme reference"
            )
        return record.reference_phonemes
    return normalize_tokens(record.reference_words) if normalize else record.reference_words


def score_testset(
    references: Iterable[UtteranceRecord],
    hypotheses: HypothesisSet,
    missing_policy: MissingPolicy = MissingPolicy.EXCLUDE,
    level: ScoringLevel = ScoringLevel.WORD,
    normalize: bool = True,
) -> GroupErrorReport:
    """Align every record against its hypothesis and pool counts per stratum.

    Case/punctuation normalization applies at word level only. Hypothesis
    entries whose ids are not among the given records are ignored, so a
    set covering a whole corpus can score any subset. The result is
    independent of record order (pure order-independent reduction).
    """
    by_group: dict[Group, ErrorRateReport] = {}
    by_severity: dict[Severity, ErrorRateReport] = {}
    overall = ErrorRateReport()

    def apply(record: UtteranceRecord, update) -> None:
        nonlocal overall
        by_group[record.group] = update(by_group.get(record.group, ErrorRateReport()))
        by_severity[record.severity] = update(
            by_severity.get(record.severity, ErrorRateReport())
        )
        overall = update(overall)

    for record in references:
        ref = _reference_tokens(record, level, normalize)
        hyp = hypotheses.get(record.utterance_id)
        if hyp is None:
            if missing_policy is MissingPolicy.EXCLUDE:
                apply(record, lambda r: r.add_missing())
                continue
            hyp = ()
        if level is ScoringLevel.WORD and normalize:
            hyp = normalize_tokens(hyp)
        outcome = align_tokens(ref, hyp)
        apply(record, lambda r: r.add(outcome))

    return GroupErrorReport(
        by_group=by_group, by_severity=by_severity, overall=overall, level=level
    )


def macro_pooled_wer(w_a: float, w_b: float) -> float:
    """Unweighted mean of two group error rates."""
    if w_a < 0 or w_b < 0:
        raise ValueError("error rates must be non-negative")
    return (w_a + w_b) / 2.0


def micro_pooled_wer(report: GroupErrorReport) -> float | None:
    """Corpus-level pooling: sum all counts, then divide."""
    return report.overall.error_percent
