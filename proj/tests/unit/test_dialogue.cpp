// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>

#include "srforge/chain.hpp"
#include "srforge/corpus.hpp"
#include "srforge/dialogue.hpp"
#include "srforge/error.hpp"
#include "srforge/parse.hpp"

using namespace srforge;

namespace {

ChainEntry entry(std::size_t gen, const char* pre, double r) { return {gen, parse_expression(pre), {}, r}; }

InferenceChain worked_chain()
{
    InferenceChain c;
    c.entries = {entry(0, "[sin, x]", 0.2), entry(1, "[+, sin, x, x]", 0.6), entry(2, "[*, cos, x, x]", 0.5),
                 entry(3, "[+, sin, x, cos, x]", 1.0)};
    return c;
}

const SamplingSpec kSpec = SamplingSpec::uniform(-3, 3, 50);

} // namespace

TEST_CASE("OCOI sorts ascending and keeps the top T")
{
    auto o = build_ocoi(worked_chain(), 2);
    REQUIRE(o.entries.size() == 2);
    CHECK(o.entries[0].tree.to_string() == "[+, sin, x1, x1]");
    CHECK(o.entries[0].reward == 0.6);
    CHECK(o.entries[1].tree.to_string() == "[+, sin, x1, cos, x1]");
    CHECK(o.entries[1].reward == 1.0);

    auto all = build_ocoi(worked_chain(), 10);
    REQUIRE(all.entries.size() == 4);
    CHECK(all.entries[1].reward == 0.5);
    CHECK(rewards_nondecreasing(all.entries));

    InferenceChain ties;
    ties.entries = {entry(0, "[x]", 0.5), entry(1, "[sin, x]", 0.5), entry(2, "[cos, x]", 0.1)};
    auto t = build_ocoi(ties, 2);
    CHECK(t.entries[0].tree.to_string() == "[x1]");
    CHECK(t.entries[1].tree.to_string() == "[sin, x1]");
    CHECK_THROWS_AS(build_ocoi(InferenceChain{}, 2), ConfigError);
    CHECK_THROWS_AS(build_ocoi(worked_chain(), 0), ConfigError);
}

TEST_CASE("the worked OCOI renders as a periodicity follow-up")
{
    Rng rng(1);
    auto r = render_multi_turn(build_ocoi(worked_chain(), 2), kSpec, rng);
    r.id = "dlg-test";
    r.data_ref = "expr-test";
    REQUIRE(r.turns.size() == 4);
    CHECK(r.turns[0].text.rfind("<Data>", 0) == 0);
    CHECK(r.turns[1].text.find("[+, sin, x1, x1]") != std::string::npos);
    REQUIRE(r.turn_meta[1].constraint);
    CHECK(r.turn_meta[1].constraint->kind == TemplateKind::Property);
    CHECK(r.turn_meta[1].constraint->label->to_string() == "periodic-in(x1)");
    CHECK(r.turns[2].text.find("periodic in x1") != std::string::npos);
    CHECK(validate_record(r).ok());
}

TEST_CASE("every single-turn kind renders a valid record")
{
    auto target = parse_expression("[+, *, C, sin, x1, *, x1, x1]");
    std::vector<double> c = {1.5};
    for (auto kind : single_turn_kinds()) {
        for (std::uint64_t s = 0; s < 30; ++s) {
            Rng rng(s);
            TemplateParams p;
            p.kind = kind;
            p.label = PropertyLabel::parse("symmetric-even");
            if (kind == TemplateKind::Property) p.label = PropertyLabel::parse("monotone-increasing");
            p.noise_sigma = 0.05;
            if (kind == TemplateKind::Property) {
                CHECK_THROWS_AS(render_single_turn(target, c, p, kSpec, rng), InconsistentParams);
                p.label = PropertyLabel::parse("bounded");
            }
            auto r = render_single_turn(target, c, p, kSpec, rng);
            r.id = "dlg-x";
            r.data_ref = "expr-x";
            if (kind == TemplateKind::NoisyRobust) {
                Dataset ds;
                ds.X = Matrix::from_rows({{0.0}, {1.0}});
                ds.y = {0.0, 1.0};
                r.inline_data = ds;
            }
            auto v = validate_record(r);
            INFO(to_string(kind), " ", to_json(r).dump());
            CHECK(v.ok());
            REQUIRE(r.turn_meta.size() == 1);
            if (kind == TemplateKind::LengthBound) {
                CHECK(r.turn_meta[0].constraint->max_length >= target.size());
                CHECK(r.turn_meta[0].constraint->max_length <= target.size() + 20);
            }
            if (kind == TemplateKind::MustContain) CHECK(r.turn_meta[0].constraint->symbols.size() < target.size());
        }
    }
}

TEST_CASE("must-contain rejects k outside its range")
{
    auto target = parse_expression("[+, x1, x1]");
    Rng rng(0);
    TemplateParams p;
    p.kind = TemplateKind::MustContain;
    p.k = 3;
    CHECK_THROWS_AS(render_single_turn(target, {}, p, kSpec, rng), InconsistentParams);
    p.k = 2;
    CHECK_NOTHROW(render_single_turn(target, {}, p, kSpec, rng));
    CHECK_THROWS_AS(render_single_turn(parse_expression("x1"), {}, p, kSpec, rng), InconsistentParams);
}

TEST_CASE("the validator catches tampered records")
{
    auto target = parse_expression("[+, sin, x1, x1]");
    Rng rng(3);
    TemplateParams p;
    p.kind = TemplateKind::RestrictedVocab;
    auto r = render_single_turn(target, {}, p, kSpec, rng);
    r.id = "dlg-t";
    r.data_ref = "expr-t";
    REQUIRE(validate_record(r).ok());

    auto bad_vocab = r;
    bad_vocab.turns[1].text = "The answer is [+, cos, x1, x1].";
    CHECK_FALSE(validate_record(bad_vocab).ok());

    auto unparsable = r;
    unparsable.turns[1].text = "The answer is [+, sin, x1].";
    CHECK_FALSE(validate_record(unparsable).ok());

    auto two_sentinels = r;
    two_sentinels.turns[1].text += " <Data>";
    CHECK_FALSE(validate_record(two_sentinels).ok());

    auto roles = r;
    std::swap(roles.turns[0], roles.turns[1]);
    CHECK_FALSE(validate_record(roles).ok());

    Rng r2(1);
    auto mt = render_multi_turn(build_ocoi(worked_chain(), 3), kSpec, r2);
    mt.id = "dlg-m";
    mt.data_ref = "expr-m";
    REQUIRE(validate_record(mt).ok());
    mt.turn_meta[2].reward = 0.1;
    CHECK_FALSE(validate_record(mt).ok());
}

TEST_CASE("records round-trip through JSON byte for byte")
{
    Rng rng(4);
    auto r = render_multi_turn(build_ocoi(worked_chain(), 3), kSpec, rng);
    r.id = "dlg-0000001";
    r.data_ref = "expr-0000001";
    auto text = to_json(r).dump();
    CHECK(to_json(dialogue_from_json(nlohmann::json::parse(text))).dump() == text);

    TemplateParams p;
    p.kind = TemplateKind::NoisyRobust;
    p.noise_sigma = 0.1;
    auto n = render_single_turn(parse_expression("x1"), {}, p, kSpec, rng);
    n.id = "dlg-2";
    Dataset ds;
    ds.X = Matrix::from_rows({{0.25}, {-1.5}});
    ds.y = {0.3, -1.4};
    n.inline_data = ds;
    text = to_json(n).dump();
    CHECK(to_json(dialogue_from_json(nlohmann::json::parse(text))).dump() == text);
}

TEST_CASE("building from a corpus covers the requested kinds and counts skips")
{
    auto gen = GenConfig::defaults(OperatorRegistry::primitives(), 1);
    gen.seed = 11;
    auto corpus = generate_corpus(gen, 40);
    DialogueConfig cfg;
    cfg.per_expression = 2;
    cfg.seed = 5;
    DialogueStats st;
    auto recs = build_dialogues(corpus, cfg, &st);
    CHECK(recs.size() + st.skipped == 2 * corpus.size());
    CHECK(recs.size() == 2 * corpus.size());
    for (const auto& r : recs) {
        auto v = validate_record(r);
        INFO(to_json(r).dump());
        CHECK(v.ok());
    }
    CHECK(st.per_kind.size() == 7);

    DialogueConfig only_prop;
    only_prop.kinds = {TemplateKind::Property};
    std::vector<CorpusRecord> flat(1);
    flat[0].id = "expr-flat";
    flat[0].tree = parse_expression("[sin, *, x1, x1]");
    flat[0].spec = SamplingSpec::uniform(0, 3, 20);
    DialogueStats st2;
    auto none = build_dialogues(flat, only_prop, &st2);
    CHECK(none.empty());
    CHECK(st2.skipped == 1);

    cfg.workers = 3;
    auto again = build_dialogues(corpus, cfg);
    REQUIRE(again.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(to_json(again[i]).dump() == to_json(recs[i]).dump());

    auto path = std::filesystem::temp_directory_path() / "srforge_dialogues_test.jsonl";
    auto es = emit_corpus(recs, path);
    CHECK(es.records == recs.size());
    auto back = read_dialogues(path);
    REQUIRE(back.size() == recs.size());
    CHECK(to_json(back[3]).dump() == to_json(recs[3]).dump());
    std::filesystem::remove(path);
}
