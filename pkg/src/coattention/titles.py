"""Article title normalization shared by every ingestion path.

Click logs use underscores, page-view dumps use underscores, portal wikitext
uses spaces; internally everything is spaces with the wiki first-letter
capitalization convention applied.
"""

from __future__ import annotations

_WS = ("_", " ")


def normalize_title(raw: str) -> str:
    """Return the canonical internal form of an article title.

    Underscores become spaces, runs of whitespace collapse, and the first
    character is uppercased (titles differing only in first-letter case are
    the same page).
    """
    text = raw
    for ch in _WS:
        text = text.replace(ch, " ")
    text = " ".join(text.split())
    if not text:
        return ""
    return text[0].upper() + text[1:]


def title_to_dump_form(title: str) -> str:
    """Spaces back to underscores, the form used in raw dump files."""
    return title.replace(" ", "_")
