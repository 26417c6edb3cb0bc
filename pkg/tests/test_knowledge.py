import json
import random

import pytest

from rtlforge.knowledge import (
    EmptyKnowledgeBase,
    FocusStrategy,
    KbCategory,
    KnowledgeEntry,
    ReferenceModule,
    RetrievalQuery,
    content_words,
    format_context,
    index_reference_library,
    load_knowledge_base,
    load_library,
    retrieve,
    save_library,
    score_entry,
)
from rtlforge.verilog import find_modules


def make_entry(**kw):
    base = dict(
        id="e1",
        title="unrelated words here",
        description="nothing shared either",
        category=KbCategory.PATTERN,
        keywords=(),
        template=None,
    )
    base.update(kw)
    return KnowledgeEntry(**base)


QUERY_WORDS = content_words("gray counter encoding rollover")


class TestScoreWeights:
    def test_title_only_scores_exactly_point_four(self):
        e = make_entry(title="gray counter encoding rollover")
        assert score_entry(e, QUERY_WORDS) == pytest.approx(0.4)

    def test_description_only_scores_exactly_point_two(self):
        e = make_entry(description="gray counter encoding rollover")
        assert score_entry(e, QUERY_WORDS) == pytest.approx(0.2)

    def test_keywords_only_score_exactly_point_three(self):
        e = make_entry(keywords=("gray", "counter"))
        assert score_entry(e, QUERY_WORDS) == pytest.approx(0.3)

    def test_template_adds_point_one_only_alongside_another_match(self):
        with_match = make_entry(title="gray counter encoding rollover", template="module m; endmodule")
        assert score_entry(with_match, QUERY_WORDS) == pytest.approx(0.5)
        template_alone = make_entry(template="module m; endmodule")
        assert score_entry(template_alone, QUERY_WORDS) == 0.0

    def test_full_match_scores_one(self):
        e = make_entry(
            title="gray counter encoding rollover",
            description="gray counter encoding rollover",
            keywords=("gray", "counter", "encoding", "rollover"),
            template="module m; endmodule",
        )
        assert score_entry(e, QUERY_WORDS) == pytest.approx(1.0)

    def test_no_overlap_scores_zero(self):
        assert score_entry(make_entry(), QUERY_WORDS) == 0.0

    def test_title_fraction(self):
        # 2 of the 4 query words in the title: 0.4 * 0.5
        e = make_entry(title="gray counter only")
        assert score_entry(e, QUERY_WORDS) == pytest.approx(0.2)

    def test_keyword_fraction_counts_entry_side(self):
        # one of two entry keywords appears in the query: 0.3 * 0.5
        e = make_entry(keywords=("gray", "пиксель"))
        score = score_entry(e, QUERY_WORDS)
        assert score == pytest.approx(0.15)


class TestContentWords:
    def test_filters_stop_words_and_short_tokens(self):
        words = content_words("Design a 4-bit FSM for the UART module")
        assert "uart" in words and "fsm" in words and "bit" in words
        assert "the" not in words and "for" not in words and "a" not in words

    def test_case_insensitive(self):
        assert content_words("GRAY Gray gray") == frozenset({"gray"})


CORPUS = [
    KnowledgeEntry("a1", "fifo depth pointer", "queue storage", KbCategory.PATTERN, ("fifo",)),
    KnowledgeEntry("a2", "fifo depth pointer", "queue storage", KbCategory.PATTERN, ("fifo",)),
    KnowledgeEntry("b1", "arbiter fairness", "rotating grant", KbCategory.ARCHITECTURE, ("arbiter",)),
    KnowledgeEntry("c1", "fifo area tricks", "smaller fifo", KbCategory.OPTIMIZATION, ("fifo",)),
    KnowledgeEntry("z1", "totally unrelated", "zilch", KbCategory.PATTERN, ("quux",)),
]


class TestRetrieve:
    def test_zero_score_entries_dropped(self):
        got = retrieve(CORPUS, RetrievalQuery("fifo depth pointer queue", k=10))
        assert all(e.id != "z1" for e in got)

    def test_ties_break_by_id_ascending(self):
        got = retrieve(CORPUS, RetrievalQuery("fifo depth pointer queue storage", k=10))
        ids = [e.id for e in got]
        assert ids.index("a1") < ids.index("a2")

    def test_k_caps_results(self):
        got = retrieve(CORPUS, RetrievalQuery("fifo depth pointer queue storage", k=3))
        assert len(got) == 3

    def test_k_bounds_enforced(self):
        with pytest.raises(ValueError):
            RetrievalQuery("x", k=2)
        with pytest.raises(ValueError):
            RetrievalQuery("x", k=21)

    def test_empty_base_raises(self):
        with pytest.raises(EmptyKnowledgeBase):
            retrieve([], RetrievalQuery("fifo"))

    def test_prefix_property_over_seeded_queries(self):
        entries = load_knowledge_base()
        vocab = sorted({w for e in entries for w in content_words(e.title + " " + e.description)})
        rng = random.Random(7)
        for _ in range(40):
            text = " ".join(rng.choices(vocab, k=rng.randint(2, 8)))
            full = retrieve(entries, RetrievalQuery(text, k=20))
            for k in (3, 5, 11):
                assert retrieve(entries, RetrievalQuery(text, k=k)) == full[:k]


class TestFocus:
    def test_pattern_focus_restricts_category(self):
        got = retrieve(CORPUS, RetrievalQuery("fifo arbiter grant", focus=FocusStrategy.PATTERN_FOCUSED, k=10))
        assert got and all(e.category is KbCategory.PATTERN for e in got)

    def test_synthesis_focus_boosts_optimization(self):
        # a1 wins on raw score (full title match); the 1.5x ranking boost
        # lifts the optimization entry past it without changing its score
        plain = retrieve(CORPUS, RetrievalQuery("fifo depth pointer", k=10))
        boosted = retrieve(CORPUS, RetrievalQuery("fifo depth pointer", focus=FocusStrategy.SYNTHESIS_FOCUSED, k=10))
        assert plain[0].id == "a1"
        assert boosted[0].id == "c1"

    def test_architecture_focus_boosts_architecture(self):
        got = retrieve(CORPUS, RetrievalQuery("fifo arbiter", focus=FocusStrategy.ARCHITECTURE_FOCUSED, k=10))
        assert got[0].id == "b1"

    def test_error_focus_folds_in_error_context(self):
        q = RetrievalQuery(
            "blinker",
            focus=FocusStrategy.ERROR_FOCUSED,
            k=10,
            error_context="arbiter grant rotating fairness",
        )
        got = retrieve(CORPUS, q)
        assert any(e.id == "b1" for e in got)

    def test_comprehensive_mixes_reference_library(self):
        mod = ReferenceModule(
            id="lib/widget.v",
            name="widget_core",
            domain="datapath",
            source="local",
            synopsis="widget datapath with saturating add",
            ports=("clk", "a", "b", "q"),
            body="module widget_core(input clk); endmodule",
            line_count=1,
        )
        got = retrieve(CORPUS, RetrievalQuery("widget saturating datapath", k=10), reference_modules=[mod])
        assert any(e.id == "ref:lib/widget.v" for e in got)
        only = retrieve(
            CORPUS,
            RetrievalQuery("widget saturating datapath", focus=FocusStrategy.PATTERN_FOCUSED, k=10),
            reference_modules=[mod],
        )
        assert not any(e.id.startswith("ref:") for e in only)


class TestPackagedCorpus:
    def test_loads_with_unique_ids_and_all_categories(self):
        entries = load_knowledge_base()
        assert len(entries) >= 30
        assert len({e.id for e in entries}) == len(entries)
        assert {e.category for e in entries} == set(KbCategory)

    def test_templates_are_well_formed_modules(self):
        for e in load_knowledge_base():
            if e.template:
                decls = find_modules(e.template)
                assert decls, f"{e.id} template has no module"
                assert e.template.count("endmodule") >= len(decls)

    def test_common_lookups_hit(self):
        entries = load_knowledge_base()
        got = retrieve(entries, RetrievalQuery("synchronous fifo with full and empty flags", k=5))
        assert got[0].id == "pat-005"
        got = retrieve(entries, RetrievalQuery("round robin arbiter grant", k=5))
        assert got[0].id == "pat-017"


class TestFormatContext:
    def test_sections_in_rank_order_with_fences(self):
        text = format_context(
            [
                KnowledgeEntry("x", "First Title", "first body", KbCategory.PATTERN, (), "module m; endmodule"),
                KnowledgeEntry("y", "Second Title", "second body", KbCategory.OPTIMIZATION),
            ]
        )
        assert text.index("First Title") < text.index("Second Title")
        assert "```verilog\nmodule m; endmodule\n```" in text
        assert "[optimization]" in text


GOOD_MODULE = """\
// Saturating accumulator for the datapath tests.
module sat_acc (
    input wire clk,
    input wire [7:0] d,
    output reg [7:0] q
);
    always @(posedge clk)
        q <= (q > 8'hF0) ? 8'hFF : q + d;
endmodule
"""


class TestIndexing:
    def make_tree(self, tmp_path):
        (tmp_path / "datapath").mkdir()
        (tmp_path / "datapath" / "sat_acc.v").write_text(GOOD_MODULE)
        (tmp_path / "orphan.v").write_text(GOOD_MODULE)
        (tmp_path / "datapath" / "prose.v").write_text("this file has no hardware in it\n")
        (tmp_path / "datapath" / "huge.v").write_text("// big\n" * 50 + GOOD_MODULE)
        return tmp_path

    def test_accept_and_reject_paths(self, tmp_path):
        root = self.make_tree(tmp_path)
        result = index_reference_library(root, max_lines=40)
        accepted = {m.id for m in result.modules}
        assert "datapath/sat_acc.v" in accepted
        reasons = dict(result.rejected)
        assert reasons["orphan.v"] == "attribution"
        assert reasons["datapath/prose.v"] == "parse"
        assert reasons["datapath/huge.v"] == "size"

    def test_manifest_overrides_directory(self, tmp_path):
        (tmp_path / "misc").mkdir()
        (tmp_path / "misc" / "eccgen.v").write_text(GOOD_MODULE)
        (tmp_path / "attribution.json").write_text(
            json.dumps({"misc/eccgen.v": {"domain": "ecc", "source": "course notes"}})
        )
        result = index_reference_library(tmp_path)
        assert len(result.modules) == 1
        mod = result.modules[0]
        assert mod.domain == "ecc" and mod.source == "course notes"
        assert mod.synopsis.startswith("Saturating accumulator")
        assert mod.ports == ("clk", "d", "q")

    def test_linter_rejections(self, tmp_path):
        (tmp_path / "datapath").mkdir()
        (tmp_path / "datapath" / "sat_acc.v").write_text(GOOD_MODULE)
        result = index_reference_library(tmp_path, linter=lambda src: False)
        assert result.modules == ()
        assert result.rejected == (("datapath/sat_acc.v", "lint"),)

    def test_unknown_manifest_domain_rejected(self, tmp_path):
        (tmp_path / "x.v").write_text(GOOD_MODULE)
        (tmp_path / "attribution.json").write_text(
            json.dumps({"x.v": {"domain": "kitchen_sink"}})
        )
        result = index_reference_library(tmp_path)
        assert result.rejected == (("x.v", "attribution"),)

    def test_save_load_round_trip(self, tmp_path):
        (tmp_path / "datapath").mkdir()
        (tmp_path / "datapath" / "sat_acc.v").write_text(GOOD_MODULE)
        result = index_reference_library(tmp_path)
        out = tmp_path / "library.jsonl"
        save_library(result.modules, out)
        assert load_library(out) == list(result.modules)
