import functools
import unicodedata


def _is_edge_char(c: str) -> bool:
    return c.isspace() or unicodedata.category(c).startswith("P")


@functools.lru_cache(maxsize=1 << 16)
def normalize_label(text: str) -> str:
    """Canonical form of a categorical answer.

    Case-folds, collapses runs of whitespace to one space and strips
    punctuation and whitespace from both ends.  Interior punctuation is kept,
    so ``"Don't know."`` becomes ``"don't know"``.  Idempotent.

    >>> normalize_label("  Oracle   ERP ")
    'oracle erp'
    """
    s = " ".join(text.casefold().split())
    start, end = 0, len(s)
    while start < end and _is_edge_char(s[start]):
        start += 1
    while end > start and _is_edge_char(s[end - 1]):
        end -= 1
    return s[start:end]
