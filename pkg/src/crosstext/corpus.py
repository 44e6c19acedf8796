"""Dataset ingestion: label canonicalization, tokenization, TSV parsing.

Dataset files are UTF-8 text with one record per line:
``id<TAB>text[<TAB>label{,label}*]``. Labels are comma-separated with no
surrounding spaces; entirely empty lines are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, UnknownLabelError, UsageError

# The five canonical classes, in lexicographic order.
CANONICAL_LABELS: tuple[str, ...] = (
    "bug",
    "comment",
    "complaint",
    "meaningless",
    "request",
)

# Label strings observed in the wild that are typos/placeholders for
# "meaningless" (matched case-insensitively).
TYPO_LABELS: frozenset[str] = frozenset(
    {"undetermined", "undefined", "nonsense", "noneless"}
)

LANGUAGES: tuple[str, ...] = ("en", "es", "fr", "jp")

SPLIT_NAMES: tuple[str, ...] = ("train", "dev", "test")


@dataclass
class RawRecord:
    """One dataset line before canonicalization."""

    id: str
    text: str
    raw_labels: list[str] = field(default_factory=list)


@dataclass
class LabeledDoc:
    """A tokenized document; ``label`` is None for unlabeled input."""

    id: str
    language: str
    tokens: list[str]
    label: str | None = None


@dataclass
class DatasetSplit:
    name: str
    docs: list[LabeledDoc]

    def __len__(self) -> int:
        return len(self.docs)


def is_canonical_label(value: str) -> bool:
    return value in CANONICAL_LABELS


def normalize_label(raw_labels: list[str]) -> str:
    """Reduce a raw label list to one canonical label.

    Only the first listed label is kept; known typo strings map to
    "meaningless". Matching is case-insensitive, the stored label is
    canonical lowercase.
    """
    if not raw_labels:
        raise ValueError("raw_labels must be non-empty")
    first = raw_labels[0]
    low = first.lower()
    if low in TYPO_LABELS:
        return "meaningless"
    if low in CANONICAL_LABELS:
        return low
    raise UnknownLabelError(f"unknown label {first!r}")


# --- western tokenizer (en/es/fr) ------------------------------------------
#
# Deterministic rule set: whitespace separates tokens; URLs, @mentions,
# #hashtags, emoticons and numbers are kept whole; remaining punctuation
# runs become their own tokens. Joining the output with single spaces and
# re-tokenizing reproduces the token list.

_EYES = r"[:;=8xX]"
_NOSE = r"[-o*']?"
_MOUTH = r"[)(\]\[dDpP/\\}{|@]"

_WESTERN_PATTERN = re.compile(
    r"""
    https?://\S+ | www\.\S+            # URLs
    | {eyes}{nose}{mouth}+(?!\w)       # emoticons, forward
    | {mouth}+{nose}{eyes}[<>]?(?!\w)  # emoticons, reverse
    | <3+(?!\w)                        # hearts
    | [@\#]\w+                         # mentions / hashtags
    | \d+(?:[.,]\d+)+                  # numbers with separators
    | \w+(?:['’-]\w+)*                 # words, incl. contractions/hyphens
    | [^\w\s]+                         # punctuation runs
    """.format(eyes=_EYES, nose=_NOSE, mouth=_MOUTH),
    re.VERBOSE,
)


def _tokenize_western(text: str) -> list[str]:
    return _WESTERN_PATTERN.findall(text)


# --- Japanese segmentation ---------------------------------------------------
#
# If the input contains an ASCII space it is treated as pre-segmented.
# Otherwise a character-class segmenter inserts boundaries at script
# transitions (kanji / hiragana / katakana / latin / digit / punct).

_KANJI_EXTRA = frozenset("々〆〇")


def _jp_char_class(ch: str) -> str | None:
    if ch.isspace():
        return None
    o = ord(ch)
    if 0x3041 <= o <= 0x309F:
        return "hiragana"
    if 0x30A0 <= o <= 0x30FF or 0x31F0 <= o <= 0x31FF or 0xFF66 <= o <= 0xFF9F:
        return "katakana"
    if 0x3400 <= o <= 0x9FFF or 0xF900 <= o <= 0xFAFF or ch in _KANJI_EXTRA:
        return "kanji"
    if ch.isdigit():
        return "digit"
    if ch.isalpha():
        return "latin"
    return "punct"


def _tokenize_japanese(text: str) -> list[str]:
    if " " in text:
        return text.split()
    tokens: list[str] = []
    current: list[str] = []
    current_class: str | None = None
    for ch in text:
        cls = _jp_char_class(ch)
        if cls is None:
            if current:
                tokens.append("".join(current))
                current, current_class = [], None
            continue
        if cls != current_class and current:
            tokens.append("".join(current))
            current = []
        current.append(ch)
        current_class = cls
    if current:
        tokens.append("".join(current))
    return tokens


def tokenize(text: str, language: str) -> list[str]:
    """Tokenize ``text`` with the rule set for ``language``.

    Never returns empty-string tokens.
    """
    if language in ("en", "es", "fr"):
        return _tokenize_western(text)
    if language == "jp":
        return _tokenize_japanese(text)
    raise UsageError(f"unknown language code {language!r}")


# --- TSV parsing -------------------------------------------------------------


def parse_line(line: str, lineno: int) -> RawRecord:
    fields = line.split("\t")
    if len(fields) == 2:
        return RawRecord(id=fields[0], text=fields[1])
    if len(fields) == 3:
        return RawRecord(id=fields[0], text=fields[1], raw_labels=fields[2].split(","))
    raise ParseError(
        f"line {lineno}: expected 2 or 3 tab-separated fields, got {len(fields)}"
    )


def infer_split_name(path: Path) -> str:
    stem = path.name.lower()
    for name in SPLIT_NAMES:
        if name in stem:
            return name
    return "train"


def parse_dataset(path: str | Path, language: str, name: str | None = None) -> DatasetSplit:
    """Read a dataset file into tokenized, label-canonicalized documents.

    Line order is preserved. ``name`` defaults to whichever of
    train/dev/test appears in the filename, falling back to "train".
    """
    path = Path(path)
    if language not in LANGUAGES:
        raise UsageError(f"unknown language code {language!r}")
    docs: list[LabeledDoc] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            record = parse_line(line, lineno)
            label: str | None = None
            if record.raw_labels:
                try:
                    label = normalize_label(record.raw_labels)
                except UnknownLabelError as exc:
                    raise UnknownLabelError(f"line {lineno}: {exc}") from None
            docs.append(
                LabeledDoc(
                    id=record.id,
                    language=language,
                    tokens=tokenize(record.text, language),
                    label=label,
                )
            )
    return DatasetSplit(name=name or infer_split_name(path), docs=docs)
