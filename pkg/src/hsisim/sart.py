"""Subjective situation-awareness rating (ten-construct form).

Ten 1..7 ratings in fixed construct order, grouped into attentional demand
(D), attentional supply (S) and understanding (U); total = U - (D - S).
"""

from __future__ import annotations

from dataclasses import dataclass

CONSTRUCTS = (
    "instability", "complexity", "variability",          # demand
    "arousal", "concentration", "division_of_attention", "spare_capacity",
    "information_quantity", "information_quality", "familiarity",  # understanding
)
_DEMAND = slice(0, 3)
_SUPPLY = slice(3, 7)
_UNDERSTANDING = slice(7, 10)


@dataclass(frozen=True)
class SartScore:
    ratings: tuple
    demand: int
    supply: int
    understanding: int
    total: int
    mean_rating: float   # loose "average of all responses" variant, for comparison


def score_sart(ratings) -> SartScore:
    ratings = tuple(ratings)
    if len(ratings) != len(CONSTRUCTS):
        raise ValueError(f"expected {len(CONSTRUCTS)} ratings, got {len(ratings)}")
    for r in ratings:
        if not isinstance(r, int) or not (1 <= r <= 7):
            raise ValueError(f"rating {r!r} outside 1..7")
    d = sum(ratings[_DEMAND])
    s = sum(ratings[_SUPPLY])
    u = sum(ratings[_UNDERSTANDING])
    return SartScore(ratings, d, s, u, u - (d - s), sum(ratings) / len(ratings))
