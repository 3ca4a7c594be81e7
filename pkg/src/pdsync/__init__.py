"""Synchronizing words for deterministic pushdown, counter and finite automata."""

from pdsync.automata import (
    BOTTOM,
    Dbca,
    Dca,
    Dfa,
    Dpbca,
    Dpda,
    Kind,
    PartialDfa,
    SequentialTransducer,
    StackModel,
    validate,
)
from pdsync.pdasync import Verdict, check_n_turn_sync_word, check_sync_word, sync_search_bounded

__version__ = "0.1.0"

__all__ = [
    "BOTTOM",
    "Dbca",
    "Dca",
    "Dfa",
    "Dpbca",
    "Dpda",
    "Kind",
    "PartialDfa",
    "SequentialTransducer",
    "StackModel",
    "Verdict",
    "check_n_turn_sync_word",
    "check_sync_word",
    "sync_search_bounded",
    "validate",
]
