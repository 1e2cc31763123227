"""Independent brute-force classifier oracle used by the page-analysis tests.

Deliberately shares no machinery with the real analyzer: it strips
comments, lowercases, drops vendor prefixes, folds @keyframes into the
animation keyword, then substring-scans the concatenated sources.
"""

from __future__ import annotations

import re

from guadasim.pages import PageSource

KEYWORDS = (
    "canvas",
    "video",
    "object",
    "embed",
    "animation",
    "transform",
    "perspective",
    "webgl",
)

_MARKUP_COMMENTS = re.compile(r"<!--.*?-->|<!\[CDATA\[.*?\]\]>", re.DOTALL)
_BLOCK_COMMENTS = re.compile(r"/\*.*?\*/", re.DOTALL)
_LINE_COMMENTS = re.compile(r"//[^\n]*")


def substring_oracle(src: PageSource) -> bool:
    """True when any capability keyword survives comment stripping."""
    blob = "\n".join(
        [src.html]
        + [text for _, text in src.stylesheets]
        + [text for _, text in src.scripts]
    )
    blob = _MARKUP_COMMENTS.sub(" ", blob)
    blob = _BLOCK_COMMENTS.sub(" ", blob)
    blob = _LINE_COMMENTS.sub(" ", blob)
    blob = blob.lower()
    for prefix in ("-webkit-", "-moz-", "-ms-", "-o-"):
        blob = blob.replace(prefix, "")
    blob = blob.replace("@keyframes", "animation")
    return any(keyword in blob for keyword in KEYWORDS)
