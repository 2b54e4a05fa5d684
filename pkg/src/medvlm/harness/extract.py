"""Rule-based option extraction from raw model output.

Rules apply in fixed order, first hit wins:
1. last answer-marker occurrence ("answer", optional "is", separator,
   optionally parenthesized letter);
2. the whole trimmed output, stripped of surrounding punctuation, is a
   single valid key;
3. the trimmed output case-insensitively equals exactly one option's text.
Anything else extracts to None, which scores as incorrect.
"""

from __future__ import annotations

import re
import string
from typing import Sequence

_MARKER = re.compile(
    r"\banswer(?:\s+is)?\s*[:\-=.,]?\s*\(?([A-Ja-j])\)?(?![A-Za-z0-9])",
    re.IGNORECASE,
)
_STRIP_CHARS = string.punctuation + string.whitespace


def extract_option(raw_output: str, options: Sequence[tuple[str, str]]) -> str | None:
    """Return the extracted option key or None; total for any string input."""
    valid = {key.upper() for key, _text in options}
    if not valid:
        return None

    hits = [m.group(1).upper() for m in _MARKER.finditer(raw_output)]
    hits = [h for h in hits if h in valid]
    if hits:
        return hits[-1]

    bare = raw_output.strip().strip(_STRIP_CHARS).upper()
    if len(bare) == 1 and bare in valid:
        return bare

    trimmed = raw_output.strip().casefold()
    if trimmed:
        matches = [key for key, text in options
                   if text.strip() and trimmed == text.strip().casefold()]
        if len(matches) == 1:
            return matches[0].upper()
    return None
