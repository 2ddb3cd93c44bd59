"""Minimal-edit token alignment and per-utterance error rates.

Unit-cost substitutions, deletions and insertions; the alignment trace
is made deterministic by a fixed backtrace preference (substitution,
then deletion, then insertion). Counts satisfy
``hits + substitutions + deletions == len(reference)`` by construction.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyReferenceError


@dataclass(frozen=True)
class AlignmentOutcome:
    substitutions: int
    deletions: int
    insertions: int
    hits: int
    ref_len: int
    trace: tuple[tuple[str, str | None, str | None], ...]

    @property
    def total_errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def normalize_tokens(tokens: Sequence[str]) -> tuple[str, ...]:
    """Lowercase and strip trailing punctuation; drop tokens that become empty."""
    out = []
    for token in tokens:
        t = token.lower().rstrip(string.punctuation)
        if t:
            out.append(t)
    return tuple(out)


def align_tokens(reference: Sequence[str], hypothesis: Sequence[str]) -> AlignmentOutcome:
    """Minimal unit-cost alignment of hypothesis tokens against a reference.

    The empty hypothesis is allowed (all deletions); an empty reference
    raises EmptyReferenceError because the error-rate denominator would
    be undefined.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    if not ref:
        raise EmptyReferenceError("undefined error rate denominator: reference is empty")

    n, m = len(ref), len(hyp)
    # dist[i][j] = minimal cost aligning ref[:i] with hyp[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row = dist[i]
        prev = dist[i - 1]
        r_tok = ref[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (r_tok != hyp[j - 1])
            dele = prev[j] + 1
            ins = row[j - 1] + 1
            row[j] = sub if sub <= dele and sub <= ins else (dele if dele <= ins else ins)

    # Backtrace preference on ties: diagonal (match/sub), then deletion,
    # then insertion. Counts are tie-break invariant; the trace is not.
    ops: list[tuple[str, str | None, str | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost_sub = dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])
            if dist[i][j] == cost_sub:
                op = "match" if ref[i - 1] == hyp[j - 1] else "sub"
                ops.append((op, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(("del", ref[i - 1], None))
            i -= 1
            continue
        ops.append(("ins", None, hyp[j - 1]))
        j -= 1
    ops.reverse()

    counts = {"match": 0, "sub": 0, "del": 0, "ins": 0}
    for op, _, _ in ops:
        counts[op] += 1
    return AlignmentOutcome(
        substitutions=counts["sub"],
        deletions=counts["del"],
        insertions=counts["ins"],
        hits=counts["match"],
        ref_len=n,
        trace=tuple(ops),
    )


def error_rate(outcome: AlignmentOutcome) -> float:
    """100 * (S + D + I) / ref_len; may exceed 100 with insertion-heavy output."""
    if outcome.ref_len == 0:
        raise EmptyReferenceError("undefined error rate denominator: ref_len is 0")
    return 100.0 * outcome.total_errors / outcome.ref_len
