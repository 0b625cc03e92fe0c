"""Ranking metrics for binary outcome prediction: AUROC and AUPRC.

Pure-Python, exact. AUROC is the tie-credited pairwise probability that a
positive outranks a negative (computed via average ranks). AUPRC is average
precision with step-wise interpolation; ties are broken by stable input
order.
"""

from __future__ import annotations

from .errors import ValidationError


def _validate(scores, labels) -> tuple[list[float], list[int]]:
    scores = [float(s) for s in scores]
    labels = [int(l) for l in labels]
    if len(scores) != len(labels):
        raise ValidationError("scores and labels differ in length")
    if any(l not in (0, 1) for l in labels):
        raise ValidationError("labels must be 0 or 1")
    return scores, labels


def auroc(scores, labels) -> float:
    """Probability a random positive outranks a random negative; ties 0.5.

    Raises on single-class input (the metric is undefined).
    """
    scores, labels = _validate(scores, labels)
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("undefined metric: auroc requires both classes")
    # Average ranks over tie groups give the exact tie-credited statistic.
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        avg_rank = (i + j) / 2 + 1  # 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg_rank
        i = j + 1
    rank_sum = sum(r for r, l in zip(ranks, labels) if l == 1)
    u_statistic = rank_sum - n_pos * (n_pos + 1) / 2
    return u_statistic / (n_pos * n_neg)


def auprc(scores, labels) -> float:
    """Average precision: mean precision at each positive's rank.

    Items are ranked by descending score with stable input order inside tie
    groups. Raises when there are no positives.
    """
    scores, labels = _validate(scores, labels)
    n_pos = sum(labels)
    if n_pos == 0:
        raise ValidationError("undefined metric: auprc requires at least one positive")
    order = sorted(range(len(scores)), key=lambda i: -scores[i])  # stable
    hits = 0
    total = 0.0
    for rank, idx in enumerate(order, start=1):
        if labels[idx] == 1:
            hits += 1
            total += hits / rank
    return total / n_pos
