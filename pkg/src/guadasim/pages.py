"""Static classification of pages as 2D-composable or 3D-requiring.

Detection is lexical, not a spec-compliant DOM/CSSOM build: element tags,
CSS property names (in external sheets, <style> blocks, and style
attributes), and script text are scanned for the capability keywords that
only the strong graphics unit can serve. Comments and CDATA never match.
Scripts are matched textually without execution, so dead but uncommented
code counts (conservative toward 3D).

Matching rules beyond the bare keyword list:
  - vendor prefixes (-webkit- -moz- -ms- -o-) are stripped before matching;
  - CSS longhands count as their family (transform-origin, animation-*,
    perspective-origin);
  - @keyframes blocks imply the animation capability;
  - the CSS transition property is NOT a trigger;
  - script triggers are a canvas-context request for "webgl" or
    "experimental-webgl", or any identifier containing webgl.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

# Canonical keyword spellings, in canonical (histogram) order.
TAG_KEYWORDS = {"canvas": "Canvas", "video": "Video", "object": "Object", "embed": "Embed"}
CSS_FAMILIES = {"animation": "Animation", "transform": "Transform", "perspective": "Perspective"}
JS_KEYWORD = "WebGL"
CANONICAL_KEYWORDS = (*TAG_KEYWORDS.values(), *CSS_FAMILIES.values(), JS_KEYWORD)

VENDOR_PREFIXES = ("-webkit-", "-moz-", "-ms-", "-o-")

_COMMENT_RE = re.compile(r"<!--.*?-->|<!\[CDATA\[.*?\]\]>", re.DOTALL)
_CSS_COMMENT_RE = re.compile(r"/\*.*?\*/", re.DOTALL)
_TAG_RE = re.compile(r"<\s*([a-zA-Z][\w:-]*)((?:[^>\"']|\"[^\"]*\"|'[^']*')*)>")
_STYLE_BLOCK_RE = re.compile(r"<\s*style\b[^>]*>(.*?)<\s*/\s*style\s*>", re.IGNORECASE | re.DOTALL)
_SCRIPT_BLOCK_RE = re.compile(
    r"<\s*script\b((?:[^>\"']|\"[^\"]*\"|'[^']*')*)>(.*?)<\s*/\s*script\s*>",
    re.IGNORECASE | re.DOTALL,
)
_STYLE_ATTR_RE = re.compile(r"""\bstyle\s*=\s*("([^"]*)"|'([^']*)')""", re.IGNORECASE)
_CSS_DECL_RE = re.compile(r"(?:(?<=[{;])|^)\s*(-?[a-zA-Z][-\w]*)\s*:", re.MULTILINE)
_KEYFRAMES_RE = re.compile(r"@(?:-webkit-|-moz-|-ms-|-o-)?keyframes\b", re.IGNORECASE)
_GET_CONTEXT_RE = re.compile(r"""getContext\s*\(\s*(['"])(.*?)\1""", re.IGNORECASE | re.DOTALL)
_IDENTIFIER_RE = re.compile(r"[A-Za-z_$][\w$]*")
_SRC_ATTR_RE = re.compile(r"""\bsrc\s*=\s*("([^"]*)"|'([^']*)')""", re.IGNORECASE)
_HREF_ATTR_RE = re.compile(r"""\bhref\s*=\s*("([^"]*)"|'([^']*)')""", re.IGNORECASE)
_REL_ATTR_RE = re.compile(r"""\brel\s*=\s*("([^"]*)"|'([^']*)')""", re.IGNORECASE)


class Category(Enum):
    HTML_TAG = "html_tag"
    CSS_PROPERTY = "css_property"
    JS_API = "js_api"


class RenderingKind(Enum):
    TWO_D = "2d"
    THREE_D = "3d"


@dataclass(frozen=True)
class Requirement3D:
    """One detected occurrence of a 3D-only capability keyword."""

    category: Category
    keyword: str
    source: str
    offset: int

    def __post_init__(self) -> None:
        if self.keyword not in CANONICAL_KEYWORDS:
            raise ValueError(f"{self.keyword!r} is not a recognized capability keyword")


@dataclass(frozen=True)
class RenderingRequirement:
    kind: RenderingKind
    reasons: tuple[Requirement3D, ...]

    def __post_init__(self) -> None:
        if (self.kind is RenderingKind.THREE_D) != bool(self.reasons):
            raise ValueError("kind is THREE_D exactly when reasons are present")

    @classmethod
    def from_reasons(cls, reasons: tuple[Requirement3D, ...]) -> "RenderingRequirement":
        kind = RenderingKind.THREE_D if reasons else RenderingKind.TWO_D
        return cls(kind=kind, reasons=tuple(reasons))


TWO_D = RenderingRequirement(RenderingKind.TWO_D, ())


@dataclass(frozen=True)
class PageSource:
    """Raw page text: the HTML document plus named stylesheets and scripts."""

    html: str
    stylesheets: tuple[tuple[str, str], ...] = ()
    scripts: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.html:
            raise ValueError("html must be non-empty")
        object.__setattr__(self, "stylesheets", tuple(self.stylesheets))
        object.__setattr__(self, "scripts", tuple(self.scripts))
        for label, entries in (("stylesheet", self.stylesheets), ("script", self.scripts)):
            names = [name for name, _ in entries]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate {label} names: {names}")


class MutationKind(Enum):
    ADD_ELEMENT = "add_element"
    ADD_CSS_DECLARATION = "add_css_declaration"
    SCRIPT_CALL = "script_call"


@dataclass(frozen=True)
class Mutation:
    """A dynamic page change: new element, new CSS declaration, or API call."""

    timestamp_ms: float
    kind: MutationKind
    value: str

    def __post_init__(self) -> None:
        if self.timestamp_ms < 0:
            raise ValueError("mutation timestamp must be >= 0")


def _blank(text: str, pattern: re.Pattern) -> str:
    """Replace every pattern match with spaces, preserving offsets."""
    return pattern.sub(lambda m: " " * len(m.group(0)), text)


def strip_css_prefix(prop: str) -> str:
    prop = prop.lower()
    for prefix in VENDOR_PREFIXES:
        if prop.startswith(prefix):
            return prop[len(prefix):]
    return prop


def css_property_keyword(prop: str) -> str | None:
    """Canonical keyword for a CSS property name, or None if it is no trigger.

    Longhands map to their family: transform-origin -> Transform. The
    transition property is deliberately not a trigger.
    """
    base = strip_css_prefix(prop)
    for family, canonical in CSS_FAMILIES.items():
        if base == family or base.startswith(family + "-"):
            return canonical
    return None


def html_tag_keyword(tag: str) -> str | None:
    return TAG_KEYWORDS.get(tag.lower())


def _scan_css(css: str, source: str, base_offset: int) -> list[Requirement3D]:
    css = _blank(css, _CSS_COMMENT_RE)
    reasons = []
    for m in _KEYFRAMES_RE.finditer(css):
        reasons.append(Requirement3D(Category.CSS_PROPERTY, "Animation", source, base_offset + m.start()))
    for m in _CSS_DECL_RE.finditer(css):
        keyword = css_property_keyword(m.group(1))
        if keyword is not None:
            reasons.append(Requirement3D(Category.CSS_PROPERTY, keyword, source, base_offset + m.start(1)))
    reasons.sort(key=lambda r: r.offset)
    return reasons


def _scan_style_attr(declarations: str, source: str, base_offset: int) -> list[Requirement3D]:
    # a style attribute holds bare declarations with no surrounding braces
    reasons = []
    for part_offset, part in _split_declarations(declarations):
        name = part.split(":", 1)[0].strip()
        if not name:
            continue
        keyword = css_property_keyword(name)
        if keyword is not None:
            reasons.append(Requirement3D(Category.CSS_PROPERTY, keyword, source, base_offset + part_offset))
    return reasons


def _split_declarations(text: str):
    offset = 0
    for part in text.split(";"):
        yield offset + len(part) - len(part.lstrip()), part
        offset += len(part) + 1


def _blank_js_comments(js: str) -> str:
    """Blank // and /* */ comments without touching string literals."""
    out = list(js)
    i = 0
    n = len(js)
    while i < n:
        ch = js[i]
        if ch in "\"'`":
            quote = ch
            i += 1
            while i < n:
                if js[i] == "\\":
                    i += 2
                    continue
                if js[i] == quote:
                    i += 1
                    break
                i += 1
        elif ch == "/" and i + 1 < n and js[i + 1] == "/":
            while i < n and js[i] != "\n":
                out[i] = " "
                i += 1
        elif ch == "/" and i + 1 < n and js[i + 1] == "*":
            end = js.find("*/", i + 2)
            end = n if end == -1 else end + 2
            for j in range(i, end):
                if out[j] != "\n":
                    out[j] = " "
            i = end
        else:
            i += 1
    return "".join(out)


def _blank_js_strings(js: str) -> str:
    out = list(js)
    i = 0
    n = len(js)
    while i < n:
        ch = js[i]
        if ch in "\"'`":
            quote = ch
            out[i] = " "
            i += 1
            while i < n:
                if js[i] == "\\":
                    out[i] = " "
                    if i + 1 < n:
                        out[i + 1] = " "
                    i += 2
                    continue
                if js[i] == quote:
                    out[i] = " "
                    i += 1
                    break
                if out[i] != "\n":
                    out[i] = " "
                i += 1
        else:
            i += 1
    return "".join(out)


def _scan_js(js: str, source: str, base_offset: int) -> list[Requirement3D]:
    code = _blank_js_comments(js)
    reasons = []
    for m in _GET_CONTEXT_RE.finditer(code):
        if m.group(2).strip().lower() in ("webgl", "experimental-webgl"):
            reasons.append(Requirement3D(Category.JS_API, JS_KEYWORD, source, base_offset + m.start()))
    no_strings = _blank_js_strings(code)
    for m in _IDENTIFIER_RE.finditer(no_strings):
        if "webgl" in m.group(0).lower():
            reasons.append(Requirement3D(Category.JS_API, JS_KEYWORD, source, base_offset + m.start()))
    reasons.sort(key=lambda r: r.offset)
    return reasons


def _scan_html(html: str, source: str = "html") -> list[Requirement3D]:
    text = _blank(html, _COMMENT_RE)
    reasons = []
    # carve out <style> and <script> bodies first so their contents are
    # scanned with the right rules, not as markup
    carved = text
    for m in _STYLE_BLOCK_RE.finditer(text):
        reasons.extend(_scan_css(m.group(1), source, m.start(1)))
        carved = carved[: m.start(1)] + " " * len(m.group(1)) + carved[m.end(1):]
    for m in _SCRIPT_BLOCK_RE.finditer(text):
        if not _SRC_ATTR_RE.search(m.group(1)):
            reasons.extend(_scan_js(m.group(2), source, m.start(2)))
        carved = carved[: m.start(2)] + " " * len(m.group(2)) + carved[m.end(2):]
    for m in _TAG_RE.finditer(carved):
        keyword = html_tag_keyword(m.group(1))
        if keyword is not None:
            reasons.append(Requirement3D(Category.HTML_TAG, keyword, source, m.start()))
        attrs = m.group(2)
        style = _STYLE_ATTR_RE.search(attrs)
        if style:
            value = style.group(2) if style.group(2) is not None else style.group(3)
            value_offset = m.start(2) + style.start() + style.group(0).index(value) if value else 0
            reasons.extend(_scan_style_attr(value or "", source, value_offset))
    reasons.sort(key=lambda r: r.offset)
    return reasons


def analyze(src: PageSource) -> RenderingRequirement:
    """Classify a page; reasons are reported in document order."""
    reasons: list[Requirement3D] = []
    reasons.extend(_scan_html(src.html))
    for name, text in src.stylesheets:
        reasons.extend(_scan_css(text, name, 0))
    for name, text in src.scripts:
        reasons.extend(_scan_js(text, name, 0))
    return RenderingRequirement.from_reasons(tuple(reasons))


def apply_mutation(req: RenderingRequirement, m: Mutation) -> RenderingRequirement:
    """Re-classify after a dynamic change; classification never downgrades."""
    keyword: str | None = None
    category = Category.HTML_TAG
    if m.kind is MutationKind.ADD_ELEMENT:
        keyword = html_tag_keyword(m.value)
    elif m.kind is MutationKind.ADD_CSS_DECLARATION:
        keyword = css_property_keyword(m.value.split(":", 1)[0].strip())
        category = Category.CSS_PROPERTY
    elif m.kind is MutationKind.SCRIPT_CALL:
        if "webgl" in m.value.lower():
            keyword = JS_KEYWORD
        category = Category.JS_API
    if keyword is None:
        return req
    reason = Requirement3D(category, keyword, "mutation", int(m.timestamp_ms))
    return RenderingRequirement.from_reasons(req.reasons + (reason,))


@dataclass(frozen=True)
class CorpusStats:
    total: int
    two_d_count: int
    three_d_count: int
    reason_histogram: dict[str, int]


def corpus_stats(pages: list[PageSource]) -> CorpusStats:
    """Aggregate classification counts over a page corpus.

    The histogram counts detected reasons per keyword, in canonical
    keyword order, so parallel per-page analysis merges deterministically.
    """
    if not pages:
        raise ValueError("corpus_stats requires at least one page")
    histogram = {k: 0 for k in CANONICAL_KEYWORDS}
    three_d = 0
    for page in pages:
        req = analyze(page)
        if req.kind is RenderingKind.THREE_D:
            three_d += 1
        for reason in req.reasons:
            histogram[reason.keyword] += 1
    return CorpusStats(
        total=len(pages),
        two_d_count=len(pages) - three_d,
        three_d_count=three_d,
        reason_histogram={k: v for k, v in histogram.items() if v},
    )


def load_page(path: str | Path) -> tuple[PageSource, list[str]]:
    """Load an .html file plus stylesheets/scripts it references relatively.

    References are resolved against the page's own directory. Missing or
    non-relative references produce warnings, not errors; the classifier
    then sees only the inline content.
    """
    path = Path(path)
    try:
        html = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if not html:
        raise ValueError(f"{path} is empty")
    warnings: list[str] = []
    stylesheets: list[tuple[str, str]] = []
    scripts: list[tuple[str, str]] = []
    text = _blank(html, _COMMENT_RE)
    for m in _TAG_RE.finditer(text):
        tag = m.group(1).lower()
        attrs = m.group(2)
        if tag == "link":
            rel = _REL_ATTR_RE.search(attrs)
            rel_value = (rel.group(2) or rel.group(3) or "") if rel else ""
            if "stylesheet" not in rel_value.lower():
                continue
            ref = _HREF_ATTR_RE.search(attrs)
        elif tag == "script":
            ref = _SRC_ATTR_RE.search(attrs)
        else:
            continue
        if not ref:
            continue
        target = (ref.group(2) or ref.group(3) or "").strip()
        if not target:
            continue
        entry = _load_reference(path.parent, target, warnings)
        if entry is None:
            continue
        bucket = stylesheets if tag == "link" else scripts
        if any(name == entry[0] for name, _ in bucket):
            continue
        bucket.append(entry)
    return PageSource(html=html, stylesheets=tuple(stylesheets), scripts=tuple(scripts)), warnings


def _load_reference(base_dir: Path, target: str, warnings: list[str]) -> tuple[str, str] | None:
    if re.match(r"^[a-zA-Z][\w+.-]*:", target) or target.startswith("/"):
        warnings.append(f"skipping non-relative reference {target!r}")
        return None
    resolved = base_dir / target
    if not resolved.is_file():
        warnings.append(f"missing referenced file {target!r}")
        return None
    return target, resolved.read_text(encoding="utf-8", errors="replace")
