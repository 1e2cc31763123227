from __future__ import annotations

import json
import random
import re

import pytest
from hypothesis import given, strategies as st

from oracle_support import substring_oracle

from guadasim.pages import (
    Category,
    Mutation,
    MutationKind,
    PageSource,
    RenderingKind,
    analyze,
    apply_mutation,
    corpus_stats,
    load_page,
)


def _page(html: str, **kwargs) -> PageSource:
    return PageSource(html=html, **kwargs)


class TestAnalyze:
    def test_plain_markup_is_2d(self):
        req = analyze(_page("<html><body><p>x</p><div><img src='a.jpg'></div></body></html>"))
        assert req.kind is RenderingKind.TWO_D
        assert req.reasons == ()

    def test_canvas_tag(self):
        req = analyze(_page("<html><body><canvas id='c'></canvas></body></html>"))
        assert req.kind is RenderingKind.THREE_D
        assert [(r.category, r.keyword) for r in req.reasons] == [(Category.HTML_TAG, "Canvas")]

    def test_vendor_prefixed_css_property(self):
        req = analyze(
            _page(
                "<html><body></body></html>",
                stylesheets=(("site.css", "div { -webkit-transform: rotate(3deg); }"),),
            )
        )
        assert [(r.category, r.keyword) for r in req.reasons] == [
            (Category.CSS_PROPERTY, "Transform")
        ]
        assert req.reasons[0].source == "site.css"

    @pytest.mark.parametrize("tag,keyword", [
        ("canvas", "Canvas"), ("VIDEO", "Video"), ("Object", "Object"), ("embed", "Embed"),
    ])
    def test_all_tag_keywords_any_case(self, tag, keyword):
        req = analyze(_page(f"<html><body><{tag}></{tag}></body></html>"))
        assert req.reasons[0].keyword == keyword

    @pytest.mark.parametrize("prop,keyword", [
        ("animation", "Animation"),
        ("animation-name", "Animation"),
        ("-moz-animation-duration", "Animation"),
        ("transform", "Transform"),
        ("transform-origin", "Transform"),
        ("-ms-transform", "Transform"),
        ("perspective", "Perspective"),
        ("perspective-origin", "Perspective"),
        ("-o-transform", "Transform"),
    ])
    def test_css_property_families(self, prop, keyword):
        req = analyze(_page(f"<html><head><style>p {{ {prop}: x; }}</style></head></html>"))
        assert req.reasons[0].keyword == keyword

    @pytest.mark.parametrize("prop", ["transition", "text-decoration", "color", "翻transformer"])
    def test_non_triggers(self, prop):
        req = analyze(_page(f"<html><head><style>p {{ {prop}: x; }}</style></head></html>"))
        assert req.kind is RenderingKind.TWO_D

    def test_keyframes_imply_animation(self):
        req = analyze(_page("<html><head><style>@keyframes s { }</style></head></html>"))
        assert req.reasons[0].keyword == "Animation"

    def test_style_attribute_scanned(self):
        req = analyze(_page('<html><body><div style="perspective: 40em">x</div></body></html>'))
        assert req.reasons[0].keyword == "Perspective"

    def test_comments_never_match(self):
        html = (
            "<html><head><style>/* transform: x */ p { color: red }</style>"
            "<script>// getContext('webgl')\nvar a = 1;</script></head>"
            "<body><!-- <canvas> --></body></html>"
        )
        assert analyze(_page(html)).kind is RenderingKind.TWO_D

    def test_webgl_context_requests(self):
        for arg in ('"webgl"', "'webgl'", '"experimental-webgl"'):
            req = analyze(_page(f"<html><script>s.getContext({arg});</script></html>"))
            assert req.reasons[0].keyword == "WebGL"

    def test_webgl_identifier(self):
        req = analyze(_page("<html><script>if (window.WebGLRenderingContext) go();</script></html>"))
        assert req.reasons[0].keyword == "WebGL"

    def test_2d_context_is_not_webgl(self):
        req = analyze(_page("<html><script>s.getContext('2d');</script></html>"))
        assert req.kind is RenderingKind.TWO_D

    def test_reasons_in_document_order(self):
        html = (
            "<html><head><style>div { transform: none; }</style></head>"
            "<body><canvas></canvas><video></video></body></html>"
        )
        req = analyze(_page(html))
        assert [r.keyword for r in req.reasons] == ["Transform", "Canvas", "Video"]
        offsets = [r.offset for r in req.reasons]
        assert offsets == sorted(offsets)

    def test_analyze_is_pure(self):
        src = _page("<html><body><canvas></canvas><div style='transform: x'></div></body></html>")
        assert analyze(src) == analyze(src)

    def test_empty_html_rejected(self):
        with pytest.raises(ValueError):
            PageSource(html="")

    def test_duplicate_sheet_names_rejected(self):
        with pytest.raises(ValueError):
            PageSource(html="<p>x</p>", stylesheets=(("a.css", ""), ("a.css", "")))


class TestApplyMutation:
    def test_css_animation_mutation_upgrades(self):
        req = analyze(_page("<html><body><p>x</p></body></html>"))
        out = apply_mutation(req, Mutation(100.0, MutationKind.ADD_CSS_DECLARATION, "animation"))
        assert out.kind is RenderingKind.THREE_D
        assert out.reasons[-1].keyword == "Animation"

    def test_neutral_element_keeps_3d(self):
        req = analyze(_page("<html><body><canvas></canvas></body></html>"))
        out = apply_mutation(req, Mutation(5.0, MutationKind.ADD_ELEMENT, "p"))
        assert out == req

    def test_neutral_element_keeps_2d(self):
        req = analyze(_page("<html><body><p>x</p></body></html>"))
        out = apply_mutation(req, Mutation(5.0, MutationKind.ADD_ELEMENT, "span"))
        assert out.kind is RenderingKind.TWO_D

    def test_script_call_webgl(self):
        req = analyze(_page("<html><body><p>x</p></body></html>"))
        out = apply_mutation(req, Mutation(1.0, MutationKind.SCRIPT_CALL, "getContext('webgl')"))
        assert out.kind is RenderingKind.THREE_D

    @given(
        st.lists(
            st.sampled_from(
                [
                    (MutationKind.ADD_ELEMENT, "p"),
                    (MutationKind.ADD_ELEMENT, "span"),
                    (MutationKind.ADD_ELEMENT, "canvas"),
                    (MutationKind.ADD_ELEMENT, "video"),
                    (MutationKind.ADD_CSS_DECLARATION, "color"),
                    (MutationKind.ADD_CSS_DECLARATION, "transform"),
                    (MutationKind.ADD_CSS_DECLARATION, "-webkit-animation"),
                    (MutationKind.SCRIPT_CALL, "resize()"),
                    (MutationKind.SCRIPT_CALL, "getContext('webgl')"),
                ]
            ),
            max_size=40,
        )
    )
    def test_kind_never_downgrades(self, steps):
        req = analyze(_page("<html><body><p>x</p></body></html>"))
        was_3d = False
        for i, (kind, value) in enumerate(steps):
            req = apply_mutation(req, Mutation(float(i), kind, value))
            if was_3d:
                assert req.kind is RenderingKind.THREE_D
            was_3d = req.kind is RenderingKind.THREE_D


class TestCorpusStats:
    def test_nine_plain_one_video(self):
        pages = [_page(f"<html><body><p>page {i}</p></body></html>") for i in range(9)]
        pages.append(_page("<html><body><video controls></video></body></html>"))
        stats = corpus_stats(pages)
        assert stats.total == 10
        assert stats.two_d_count == 9
        assert stats.three_d_count == 1
        assert stats.reason_histogram == {"Video": 1}

    def test_single_empty_body(self):
        stats = corpus_stats([_page("<html><body></body></html>")])
        assert stats.two_d_count == 1
        assert stats.two_d_count + stats.three_d_count == stats.total

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            corpus_stats([])


class TestCommittedCorpus:
    def test_expected_classification(self, corpus_dir):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        assert len(manifest) >= 40
        for name, expected in sorted(manifest.items()):
            src, _ = load_page(corpus_dir / name)
            assert analyze(src).kind.value == expected, name

    def test_oracle_equivalence(self, corpus_dir):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        for name in sorted(manifest):
            src, _ = load_page(corpus_dir / name)
            flagged = analyze(src).kind is RenderingKind.THREE_D
            assert flagged == substring_oracle(src), name

    def test_every_keyword_covered(self, corpus_dir):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        pages = [load_page(corpus_dir / name)[0] for name in sorted(manifest)]
        stats = corpus_stats(pages)
        assert set(stats.reason_histogram) == {
            "Canvas", "Video", "Object", "Embed",
            "Animation", "Transform", "Perspective", "WebGL",
        }

    def test_keyword_removal_yields_2d(self, corpus_dir):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        scrub = re.compile(
            "canvas|video|object|embed|animation|transform|perspective|webgl|keyframes",
            re.IGNORECASE,
        )
        for name, expected in sorted(manifest.items()):
            if expected != "3d":
                continue
            src, _ = load_page(corpus_dir / name)
            scrubbed = PageSource(
                html=scrub.sub("zz", src.html),
                stylesheets=tuple((n, scrub.sub("zz", t)) for n, t in src.stylesheets),
                scripts=tuple((n, scrub.sub("zz", t)) for n, t in src.scripts),
            )
            assert analyze(scrubbed).kind is RenderingKind.TWO_D, name

    def test_missing_references_warn_not_fail(self, corpus_dir):
        src, warnings = load_page(corpus_dir / "21_missing_ref.html")
        assert len(warnings) == 2
        assert analyze(src).kind is RenderingKind.TWO_D


def test_random_mutation_sequences_monotone(corpus_dir):
    rng = random.Random(7)
    base = analyze(PageSource(html="<html><body><p>seed</p></body></html>"))
    choices = [
        (MutationKind.ADD_ELEMENT, "p"),
        (MutationKind.ADD_ELEMENT, "table"),
        (MutationKind.ADD_ELEMENT, "embed"),
        (MutationKind.ADD_ELEMENT, "object"),
        (MutationKind.ADD_CSS_DECLARATION, "margin"),
        (MutationKind.ADD_CSS_DECLARATION, "perspective"),
        (MutationKind.ADD_CSS_DECLARATION, "-o-transform-origin"),
        (MutationKind.SCRIPT_CALL, "layout()"),
        (MutationKind.SCRIPT_CALL, "getContext('experimental-webgl')"),
    ]
    for _ in range(300):
        req = base
        was_3d = False
        for step in range(20):
            kind, value = choices[rng.randrange(len(choices))]
            req = apply_mutation(req, Mutation(float(step), kind, value))
            if was_3d:
                assert req.kind is RenderingKind.THREE_D
            was_3d = req.kind is RenderingKind.THREE_D
