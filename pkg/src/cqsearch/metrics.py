"""Retrieval metrics over a ranking plus sparse 1-4 relevance ratings.

Relevant means rated 3 or 4.  Unrated results occupy ranks and count as
non-relevant for reciprocal rank and average precision; NDCG is computed
over the rated subset only (compacted positions, linear gain).
"""

from __future__ import annotations

import math

from .vecsearch import RankedResults

RELEVANT_MIN_RATING = 3


class MetricError(Exception):
    pass


def _ids(ranking: RankedResults | list[str]) -> list[str]:
    if isinstance(ranking, RankedResults):
        return ranking.ids()
    return list(ranking)


def reciprocal_rank(ranking: RankedResults | list[str], judgments: dict[str, int]) -> float:
    """1/rank of the first relevant result; 0 when none is relevant."""
    for rank, fid in enumerate(_ids(ranking), start=1):
        if judgments.get(fid, 0) >= RELEVANT_MIN_RATING:
            return 1.0 / rank
    return 0.0


def average_precision(ranking: RankedResults | list[str], judgments: dict[str, int]) -> float:
    """Mean precision at each relevant result's absolute rank."""
    precisions = []
    seen_relevant = 0
    for rank, fid in enumerate(_ids(ranking), start=1):
        if judgments.get(fid, 0) >= RELEVANT_MIN_RATING:
            seen_relevant += 1
            precisions.append(seen_relevant / rank)
    if not precisions:
        raise MetricError("average precision needs at least one relevant result")
    return sum(precisions) / len(precisions)


def ndcg_rated(ranking: RankedResults | list[str], judgments: dict[str, int]) -> float:
    """NDCG over the rated subset at compacted positions with linear gain."""
    ratings = [judgments[fid] for fid in _ids(ranking) if fid in judgments]
    if not ratings:
        raise MetricError("NDCG needs at least one rated result")
    dcg = sum(r / math.log2(i + 1) for i, r in enumerate(ratings, start=1))
    ideal = sum(
        r / math.log2(i + 1) for i, r in enumerate(sorted(ratings, reverse=True), start=1))
    return dcg / ideal
