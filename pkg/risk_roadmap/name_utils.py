"""Helpers for normalizing user-typed algorithm ids."""

from __future__ import annotations

import difflib
import string
from typing import Optional, Sequence, Tuple

from .config import ALGORITHMS
from .errors import InvalidParameter

_ID_PUNCT = string.punctuation.replace("-", "").replace("_", "") + "–—"

# common spellings people type for each planner
ALGORITHM_ALIASES = {
    "rasp": "incremental",
    "incr": "incremental",
    "a*": "astar",
    "a-star": "astar",
    "a_star": "astar",
    "precomputed": "precompute",
    "apsp": "precompute",
    "shortest": "dijkstra",
    "min-risk": "minrisk",
    "min_risk": "minrisk",
}


def _sanitize_token(token: str) -> str:
    """Strip punctuation around a token and lowercase it."""
    return token.strip(_ID_PUNCT + " ").lower()


def _pick_best_match(candidate: str, options: Sequence[str]) -> Tuple[Optional[str], float]:
    """Return the best matching option and the similarity score."""
    if not options:
        return None, 0.0
    best_name = None
    best_ratio = 0.0
    for opt in options:
        ratio = difflib.SequenceMatcher(None, candidate, opt).ratio()
        if ratio > best_ratio:
            best_ratio = ratio
            best_name = opt
    return best_name, best_ratio


def suggest_algorithm(token: str, known: Sequence[str] = ALGORITHMS) -> Optional[str]:
    """Closest known id for a near miss, or None when nothing is close enough."""
    cleaned = _sanitize_token(token)
    if not cleaned:
        return None
    best_name, score = _pick_best_match(cleaned, list(known))
    min_ratio = 0.6 if len(cleaned) > 4 else 0.75
    if best_name and score >= min_ratio:
        return best_name
    return None


def resolve_algorithm(token: str, known: Sequence[str] = ALGORITHMS) -> str:
    """Canonical algorithm id; raises ``InvalidParameter`` with a hint otherwise."""
    cleaned = _sanitize_token(token or "")
    if cleaned in known:
        return cleaned
    # aliases like "a*" end in punctuation the sanitizer strips
    alias = ALGORITHM_ALIASES.get((token or "").strip().lower()) or ALGORITHM_ALIASES.get(cleaned)
    if alias in known:
        return alias
    hint = suggest_algorithm(cleaned, known)
    message = f"unknown algorithm '{token}'"
    if hint:
        message += f" (did you mean '{hint}'?)"
    else:
        message += f"; choose one of {', '.join(known)}"
    raise InvalidParameter(message)


__all__ = ["ALGORITHM_ALIASES", "suggest_algorithm", "resolve_algorithm"]
