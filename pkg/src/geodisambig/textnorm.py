"""Name canonicalisation applied to every raw name before matching.

The rules are deliberately lossy: lowercase everything, turn each accented
letter into a literal ``x`` (so dropping an accent costs one edit while a
changed accent costs none), turn symbols into spaces, delete one-character
tokens, and remove a role-specific stopword list.  Inventor names are
additionally split at a ``c/o`` / ``c/-`` marker; the trailing tokens are
kept out of the match words because they usually name the employer.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources

ROLE_INVENTOR = "inventor"
ROLE_ASSIGNEE = "assignee"

_CARE_OF_MARKERS = ("c/o", "c/-")


@dataclass(frozen=True)
class NormalizedName:
    """Canonical token form of one raw name."""

    words: tuple[str, ...]
    had_care_of: bool = False
    care_of_suffix: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return not self.words

    @property
    def key(self) -> str:
        """Exact-match key: all informative tokens, care-of suffix included."""
        return " ".join(self.words + self.care_of_suffix)


def _load_packaged_list(filename: str) -> frozenset[str]:
    text = resources.files("geodisambig.data").joinpath(filename).read_text("utf-8")
    return frozenset(_parse_wordlist(text.splitlines()))


def _parse_wordlist(lines) -> set[str]:
    words: set[str] = set()
    for line in lines:
        token = line.split("#", 1)[0].strip()
        if token:
            words.update(tokenize(token))
    return words


def load_wordlist(path) -> frozenset[str]:
    """Read a one-token-per-line UTF-8 wordlist ('#' starts a comment).

    Entries are passed through the same character rules as names, so an
    accented entry matches the folded form seen in normalized tokens.
    """
    with open(path, encoding="utf-8") as fh:
        return frozenset(_parse_wordlist(fh))


def default_assignee_stopwords() -> frozenset[str]:
    return _load_packaged_list("assignee_stopwords.txt")


def default_inventor_stopwords() -> frozenset[str]:
    return _load_packaged_list("inventor_stopwords.txt")


def fold_chars(raw: str) -> str:
    """Lowercase, accent-fold to 'x', and convert symbols to spaces.

    Any letter carrying a combining mark becomes a literal ``x``; characters
    that are not letters, digits, or spaces become spaces.  Digits survive.
    """
    out: list[str] = []
    for ch in unicodedata.normalize("NFD", raw.lower()):
        if unicodedata.combining(ch):
            if out and out[-1].isalpha():
                out[-1] = "x"
            continue
        if ch.isalpha() or ch.isdigit():
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out)


def tokenize(raw: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Apply the character rules, split, and drop 1-char and stoplist tokens."""
    tokens = fold_chars(raw).split()
    return [t for t in tokens if len(t) > 1 and t not in stopwords]


def _split_care_of(raw: str) -> tuple[str, str | None]:
    # Search and slice the lowered string so positions cannot drift for
    # characters whose lowercase form changes length.
    lowered = raw.lower()
    cut = -1
    for marker in _CARE_OF_MARKERS:
        pos = lowered.find(marker)
        if pos >= 0 and (cut < 0 or pos < cut):
            cut = pos
    if cut < 0:
        return lowered, None
    return lowered[:cut], lowered[cut + 3 :]


def normalize(
    raw: str,
    role: str,
    assignee_stopwords: frozenset[str] | None = None,
    inventor_stopwords: frozenset[str] | None = None,
) -> NormalizedName:
    """Canonicalize one raw name for the given role.

    Returns a degenerate NormalizedName (no words) when nothing informative
    survives; callers treat such mentions as singletons.
    """
    if role == ROLE_ASSIGNEE:
        stop = assignee_stopwords
        if stop is None:
            stop = default_assignee_stopwords()
        return NormalizedName(words=tuple(tokenize(raw, stop)))

    stop = inventor_stopwords
    if stop is None:
        stop = default_inventor_stopwords()
    head, tail = _split_care_of(raw)
    words = tuple(tokenize(head, stop))
    if tail is None:
        return NormalizedName(words=words)
    return NormalizedName(
        words=words,
        had_care_of=True,
        care_of_suffix=tuple(tokenize(tail, stop)),
    )


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert / delete / substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_distance_le_1(a: str, b: str) -> bool:
    """True iff Levenshtein(a, b) <= 1, without building the DP table.

    With equal lengths one edit can only be a substitution, so a Hamming
    scan suffices; with lengths off by one, a single two-pointer pass
    checks whether deleting one character of the longer yields the shorter.
    """
    la, lb = len(a), len(b)
    if la == lb:
        mismatches = 0
        for ca, cb in zip(a, b):
            if ca != cb:
                mismatches += 1
                if mismatches > 1:
                    return False
        return True
    if abs(la - lb) != 1:
        return False
    if la < lb:
        a, b, la, lb = b, a, lb, la
    i = j = 0
    skipped = False
    while i < la and j < lb:
        if a[i] == b[j]:
            i += 1
            j += 1
        elif skipped:
            return False
        else:
            skipped = True
            i += 1
    return True
