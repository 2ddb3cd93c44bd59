"""Two-group fairness scoring over error rates.

The score is the weighted negative combination of the groups' mean error
and their absolute error gap:

    score = -alpha * (e1 + e2) / 2 - beta * |e1 - e2|

It is always <= 0 for non-negative inputs; values closer to zero mean a
fairer system. Group 1 is the normal group, group 2 the CLP group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class FairnessWeights:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("weights must be non-negative")

    def label(self) -> str:
        return f"a={self.alpha:g},b={self.beta:g}"


@dataclass(frozen=True)
class FairnessResult:
    error_g1: float
    error_g2: float
    weights: FairnessWeights
    average_error: float
    disparity: float
    score: float


def _check_rates(*rates: float) -> None:
    for e in rates:
        if e < 0:
            raise ValueError(f"error rates must be non-negative, got {e}")


def average_error_rate(e1: float, e2: float) -> float:
    _check_rates(e1, e2)
    return (e1 + e2) / 2.0


def error_disparity(e1: float, e2: float) -> float:
    _check_rates(e1, e2)
    return abs(e1 - e2)


def fairness_score(e1: float, e2: float, weights: FairnessWeights) -> FairnessResult:
    """Score a (normal, CLP) error-rate pair under one weight pair."""
    avg = average_error_rate(e1, e2)
    gap = error_disparity(e1, e2)
    return FairnessResult(
        error_g1=e1,
        error_g2=e2,
        weights=weights,
        average_error=avg,
        disparity=gap,
        score=-weights.alpha * avg - weights.beta * gap,
    )


def fairness_sweep(
    e1: float, e2: float, weight_list: Sequence[FairnessWeights]
) -> tuple[FairnessResult, ...]:
    """One result per weight pair, input order preserved."""
    if not weight_list:
        raise ValueError("weight list must be non-empty")
    return tuple(fairness_score(e1, e2, w) for w in weight_list)


def relative_fairness_improvement(fs_baseline: float, fs_new: float) -> float:
    """Percent shrinkage of the score magnitude; positive means fairer.

    100 * (|baseline| - |new|) / |baseline|, both scores must be <= 0.
    """
    if fs_baseline > 0 or fs_new > 0:
        raise ValueError("fairness scores must be non-positive")
    if fs_baseline == 0:
        raise ValueError("zero baseline: relative improvement undefined")
    return 100.0 * (abs(fs_baseline) - abs(fs_new)) / abs(fs_baseline)


def max_pairwise_disparity(errors: Sequence[float]) -> float:
    _check_rates(*errors)
    if not errors:
        raise ValueError("need at least one error rate")
    return max(errors) - min(errors)


def multigroup_fairness_score(
    errors: Sequence[float], weights: FairnessWeights
) -> float:
    """Extension beyond the two-group score: mean error and max pairwise gap.

    Reduces to the two-group score when len(errors) == 2.
    """
    _check_rates(*errors)
    if len(errors) < 2:
        raise ValueError("need at least two groups")
    avg = sum(errors) / len(errors)
    return -weights.alpha * avg - weights.beta * max_pairwise_disparity(errors)


def parse_weight_list(text: str) -> tuple[FairnessWeights, ...]:
    """Parse ``"0.5:0.5,0.1:0.9"`` into weight pairs."""
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        alpha, _, beta = chunk.partition(":")
        if not _:
            raise ValueError(f"bad weight pair {chunk!r}; expected alpha:beta")
        pairs.append(FairnessWeights(alpha=float(alpha), beta=float(beta)))
    if not pairs:
        raise ValueError("no weight pairs given")
    return tuple(pairs)


def sweep_rows_csv(results: Iterable[FairnessResult]) -> str:
    """Delimited export: ``alpha,beta,error_normal,error_clp,average,disparity,fs``."""
    lines = ["alpha,beta,error_normal,error_clp,average,disparity,fs"]
    for r in results:
        lines.append(
            f"{r.weights.alpha:g},{r.weights.beta:g},"
            f"{r.error_g1:.2f},{r.error_g2:.2f},"
            f"{r.average_error:.2f},{r.disparity:.2f},{r.score:.2f}"
        )
    return "\n".join(lines) + "\n"
