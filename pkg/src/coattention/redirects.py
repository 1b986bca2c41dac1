"""Alias-to-canonical title mapping with idempotence validation."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from pathlib import Path

from .titles import normalize_title


class RedirectError(ValueError):
    """Raised when a redirect map chains or cycles instead of being flat."""


class RedirectMap:
    """Many-to-one alias -> canonical map.

    One application is guaranteed to be a fixed point: canonical titles never
    map elsewhere, so resolve(resolve(t)) == resolve(t) holds for every title.
    """

    def __init__(self, mapping: Mapping[str, str] | None = None):
        cleaned: dict[str, str] = {}
        for alias, canonical in (mapping or {}).items():
            alias_n = normalize_title(alias)
            canon_n = normalize_title(canonical)
            if alias_n == canon_n:
                continue
            cleaned[alias_n] = canon_n
        for alias, canonical in cleaned.items():
            if canonical in cleaned:
                raise RedirectError(
                    f"redirect target {canonical!r} (from {alias!r}) is itself an alias"
                )
        self._map = cleaned
        self._groups: dict[str, set[str]] | None = None

    def resolve(self, title: str) -> str:
        t = normalize_title(title)
        return self._map.get(t, t)

    def group(self, canonical: str) -> set[str]:
        """All titles (aliases plus the canonical itself) that resolve here."""
        if self._groups is None:
            groups: dict[str, set[str]] = {}
            for alias, canon in self._map.items():
                groups.setdefault(canon, set()).add(alias)
            self._groups = groups
        canon = self.resolve(canonical)
        return self._groups.get(canon, set()) | {canon}

    def __len__(self) -> int:
        return len(self._map)

    def __contains__(self, title: str) -> bool:
        return normalize_title(title) in self._map

    def items(self) -> Iterable[tuple[str, str]]:
        return self._map.items()

    @classmethod
    def identity(cls) -> "RedirectMap":
        return cls({})

    @classmethod
    def from_tsv(cls, path: str | Path) -> "RedirectMap":
        """Load an ``alias<TAB>canonical`` file."""
        mapping: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise RedirectError(f"{path}:{lineno}: expected 2 columns")
                mapping[parts[0]] = parts[1]
        return cls(mapping)

    def to_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for alias in sorted(self._map):
                fh.write(f"{alias}\t{self._map[alias]}\n")
