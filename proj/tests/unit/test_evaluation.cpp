#include "courtside/evaluation.hpp"
#include "courtside/memory.hpp"

#include "unit/fixtures.hpp"
#include "unit/rally_builders.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace courtside;
using namespace courtside::eval;
using events::ServeAttempt;
using events::ShotOutcome;
using events::Stroke;
using match::PlayerId;

namespace {

std::vector<CaptionPair> minicorpus()
{
    const auto j = nlohmann::json::parse(testing::read_golden("metrics_minicorpus.json"));
    std::vector<CaptionPair> out;
    for (const auto& p : j.at("pairs"))
    {
        out.push_back({p.at("candidate").get<std::string>(), p.at("references").get<std::vector<std::string>>()});
    }
    return out;
}

bool has_kind(const SanityReport& r, ViolationKind kind)
{
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const SanityViolation& v) { return v.kind == kind; });
}

events::RallyRecord ace_at(int server_points, int returner_points)
{
    auto score = match::MatchScore::fresh();
    score.points = {server_points, returner_points};
    return testing::make_rally({testing::serve(PlayerId::One, ServeAttempt::First, ShotOutcome::Winner, 0.5)}, score);
}

std::string replace_all(std::string text, std::string_view from, std::string_view to)
{
    for (auto at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size()))
    {
        text.replace(at, from.size(), to);
    }
    return text;
}

}  // namespace

TEST_CASE("tokenizer")
{
    CHECK(tokenize("  Ace!  Down the T.") == std::vector<std::string>{"ace", "down", "the", "t"});
    CHECK(tokenize("“Müller’s” forehand…") == std::vector<std::string>{"müller’s", "forehand"});
    CHECK(tokenize("ÉCLAIR Kovač") == std::vector<std::string>{"éclair", "kovač"});
    CHECK(tokenize(" -- ").empty());
    CHECK(tokenize("cross-court 30-all") == std::vector<std::string>{"cross-court", "30-all"});
}

TEST_CASE("metric identities")
{
    const std::vector<std::string> same{"ivanova fires an ace down the t"};
    CHECK(bleu4("Ivanova fires an ace down the T", same) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rouge_l("ivanova fires an ace", "ivanova fires an ace") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bleu4("completely unrelated words", same) == 0.0);
    CHECK(rouge_l("x y z", "a b c") == 0.0);
    CHECK(rouge_l("", "a b c") == 0.0);
    CHECK(bleu4("", same) == 0.0);

    // LCS of "a b c d" and "a c d e" is "a c d": P = R = 3/4.
    CHECK(rouge_l("a b c d", "a c d e") == doctest::Approx(0.75).epsilon(1e-12));

    const std::vector<CaptionPair> twins{{"a b c d e", {"a b c d e"}}, {"f g h i j", {"f g h i j"}}};
    const auto scores = cider_scores(twins);
    CHECK(scores[0] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(10.0).epsilon(1e-9));

    CHECK_THROWS_AS(cider_scores(std::span(twins).first(1)), EvalError);
}

TEST_CASE("metrics match the frozen oracle")
{
    const auto j = nlohmann::json::parse(testing::read_golden("metrics_minicorpus.json"));
    const auto pairs = minicorpus();
    const auto report = evaluate_corpus(pairs, Execution::Serial);
    REQUIRE(report.pairs.size() == pairs.size());
    CHECK(report.has_cider);
    double b = 0, r = 0, c = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
    {
        const auto& g = j["pairs"][i];
        CAPTURE(i);
        CHECK(std::abs(report.pairs[i].bleu4 - g["bleu4"].get<double>()) <= 1e-6);
        CHECK(std::abs(report.pairs[i].rouge_l - g["rouge_l"].get<double>()) <= 1e-6);
        CHECK(std::abs(report.pairs[i].cider - g["cider"].get<double>()) <= 1e-6);
        b += g["bleu4"].get<double>();
        r += g["rouge_l"].get<double>();
        c += g["cider"].get<double>();
    }
    const auto n = static_cast<double>(pairs.size());
    CHECK(std::abs(report.bleu4 - b / n) <= 1e-6);
    CHECK(std::abs(report.rouge_l - r / n) <= 1e-6);
    CHECK(std::abs(report.cider - c / n) <= 1e-6);
    CHECK(std::abs(cider(pairs) - c / n) <= 1e-6);
}

TEST_CASE("parallel evaluation equals the serial reference")
{
    auto pairs = minicorpus();
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k)
    {
        auto p = pairs[rng() % pairs.size()];
        std::swap(p.candidate, p.references.front());
        pairs.push_back(p);
    }
    const auto serial = evaluate_corpus(pairs, Execution::Serial);
    const auto parallel = evaluate_corpus(pairs, Execution::Parallel);
    CHECK(serial.pairs == parallel.pairs);
    CHECK(serial.bleu4 == parallel.bleu4);
    CHECK(serial.rouge_l == parallel.rouge_l);
    CHECK(serial.cider == parallel.cider);
}

TEST_CASE("single pair has no corpus statistics")
{
    const std::vector<CaptionPair> one{{"an ace", {"an ace out wide"}}};
    const auto report = evaluate_corpus(one);
    CHECK_FALSE(report.has_cider);
    CHECK(report.cider == 0.0);
    CHECK(report.rouge_l > 0.0);
    CHECK(evaluate_corpus({}).evaluated == 0);
}

TEST_CASE("judge prompts are verbatim")
{
    CHECK(kJudgeSystemPrompt == testing::read_golden("judge_system_prompt.txt"));
    CHECK(kJudgeUserTemplate == testing::read_golden("judge_user_template.txt"));
}

TEST_CASE("judge slots are filled once")
{
    const auto bundle = build_judge_prompt("{\"clip_id\":\"x\"}", "ref says {prediction}", "pred");
    CHECK(bundle.system_text == kJudgeSystemPrompt);
    CHECK_FALSE(bundle.prior_interaction.has_value());
    CHECK(bundle.user_text.find("**METADATA (Ground Truth):** {\"clip_id\":\"x\"}") != std::string::npos);
    CHECK(bundle.user_text.find("\"ref says {prediction}\"") != std::string::npos);
    CHECK(bundle.user_text.find("(Target to Evaluate):** \"pred\"") != std::string::npos);
    CHECK(bundle.user_text.find("{metadata}") == std::string::npos);
    CHECK(bundle.user_text.find("{reference}") == std::string::npos);
    // The rubric's own braces survive.
    CHECK(bundle.user_text.find("\"total_score\": <int>") != std::string::npos);
}

TEST_CASE("scorecard parsing")
{
    const auto card = parse_scorecard(R"({"scores": {"accuracy": 18, "coherence": 17, "excitement": 12,
        "professionalism": 15, "pacing": 19}, "total_score": 81})");
    CHECK(card.accuracy == 18);
    CHECK(card.pacing == 19);
    CHECK(card.total == 81);
    CHECK_FALSE(card.corrected);
    CHECK(parse_scorecard(render(card)) == card);

    SUBCASE("python dict and code fence")
    {
        const auto c = parse_scorecard("```python\n{'scores': {'accuracy': 1, 'coherence': 2, 'excitement': 3, "
                                       "'professionalism': 4, 'pacing': 5}, 'total_score': 15}\n```");
        CHECK(c.total == 15);
    }
    SUBCASE("wrong total is recomputed")
    {
        const auto c = parse_scorecard(R"({"scores": {"accuracy": 10, "coherence": 10, "excitement": 10,
            "professionalism": 10, "pacing": 10}, "total_score": 99})");
        CHECK(c.total == 50);
        CHECK(c.corrected);
    }
    auto code_of = [](std::string_view text) {
        try
        {
            parse_scorecard(text);
        }
        catch (const EvalError& e)
        {
            return e.code();
        }
        FAIL("expected an error");
        return EvalErrc::EmptyInput;
    };
    CHECK(code_of("") == EvalErrc::UnparsableOutput);
    CHECK(code_of("great commentary, 8/10") == EvalErrc::UnparsableOutput);
    CHECK(code_of(R"({"total_score": 10})") == EvalErrc::MissingKey);
    CHECK(code_of(R"({"scores": {"accuracy": 1, "coherence": 2, "excitement": 3, "professionalism": 4},
        "total_score": 10})") == EvalErrc::MissingKey);
    CHECK(code_of(R"({"scores": {"accuracy": 1, "coherence": 2, "excitement": 3, "professionalism": 4,
        "pacing": 5}})") == EvalErrc::MissingKey);
    CHECK(code_of(R"({"scores": {"accuracy": 21, "coherence": 2, "excitement": 3, "professionalism": 4,
        "pacing": 5}, "total_score": 35})") == EvalErrc::CriterionOutOfRange);
    CHECK(code_of(R"({"scores": {"accuracy": -1, "coherence": 2, "excitement": 3, "professionalism": 4,
        "pacing": 5}, "total_score": 13})") == EvalErrc::CriterionOutOfRange);
    CHECK(code_of(R"({"scores": {"accuracy": 7.5, "coherence": 2, "excitement": 3, "professionalism": 4,
        "pacing": 5}, "total_score": 21})") == EvalErrc::UnparsableOutput);
}

TEST_CASE("mock judge")
{
    MockJudgeClient judge;
    const std::string text = "Ivanova fires a forehand winner down the line!";
    prompt::GenerationRequest request;
    request.prompt = build_judge_prompt("{}", text, text);
    const auto card = parse_scorecard(judge.complete(request).text);
    CHECK(card.accuracy == kCriterionMax);
    CHECK(card.pacing == kCriterionMax);
    CHECK(card.coherence == kCriterionMax);
    CHECK_FALSE(card.corrected);
    CHECK(card.total <= 100);

    request.prompt = build_judge_prompt("{}", text, "");
    const auto empty = parse_scorecard(judge.complete(request).text);
    CHECK(empty.accuracy == 0);
    CHECK(empty.total < card.total);
}

TEST_CASE("aggregate equals a direct recount")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> score(0, kCriterionMax);
    std::vector<JudgeScorecard> cards(100);
    long sums[6] = {};
    for (auto& c : cards)
    {
        c = {score(rng), score(rng), score(rng), score(rng), score(rng)};
        c.total = c.accuracy + c.coherence + c.excitement + c.professionalism + c.pacing;
        const int fields[6] = {c.accuracy, c.coherence, c.excitement, c.professionalism, c.pacing, c.total};
        for (int k = 0; k < 6; ++k)
        {
            sums[k] += fields[k];
        }
    }
    std::vector<SanityReport> sanity(8);
    sanity[3].passed = false;
    const auto s = aggregate(cards, {}, sanity);
    CHECK(s.scorecards == 100);
    CHECK(s.accuracy == doctest::Approx(sums[0] / 100.0));
    CHECK(s.coherence == doctest::Approx(sums[1] / 100.0));
    CHECK(s.excitement == doctest::Approx(sums[2] / 100.0));
    CHECK(s.professionalism == doctest::Approx(sums[3] / 100.0));
    CHECK(s.pacing == doctest::Approx(sums[4] / 100.0));
    CHECK(s.total == doctest::Approx(sums[5] / 100.0));
    REQUIRE(s.sanity_pass_rate.has_value());
    CHECK(*s.sanity_pass_rate == doctest::Approx(7.0 / 8.0));

    const auto j = summary_to_json(s);
    CHECK(j["judge"]["scorecards"] == 100);
    CHECK(j["sanity"]["pass_rate"].get<double>() == doctest::Approx(0.875));
    CHECK(aggregate({}, {}).total == 0.0);
    CHECK_FALSE(aggregate({}, {}).sanity_pass_rate.has_value());
}

TEST_CASE("fold removes case and diacritics")
{
    CHECK(fold("Müller") == "muller");
    CHECK(fold("KOVAČ") == "kovac");
    CHECK(fold("Søren Łukasz") == "soren lukasz");
    CHECK(fold("Straße") == "strasse");
}

TEST_CASE("mock commentary passes the sanity check")
{
    std::mt19937_64 rng(21);
    const auto log = testing::random_log(rng, 600);
    memory::MatchMemory m(4);
    for (std::size_t t = 0; t < log.size(); ++t)
    {
        const auto view = memory::memory_snapshot(m);
        const auto text = prompt::mock_commentary(log[t], prompt::serialize_memory(view, log[t].match_info));
        const auto report = sanity_check(text, log[t]);
        CAPTURE(text);
        CAPTURE(match::score_summary(log[t].initial_score));
        if (!report.passed)
        {
            CAPTURE(report.violations.front().detail);
            CHECK(report.passed);
        }
        m.record(memory::make_entry(static_cast<std::int64_t>(t + 1), log[t], text));
    }
}

TEST_CASE("sanity check catches planted errors")
{
    const auto rally = ace_at(3, 1);  // 40-15, Ivanova serving
    const auto good = prompt::mock_commentary(rally, "");
    REQUIRE(sanity_check(good, rally).passed);

    SUBCASE("winner swapped")
    {
        const auto bad = replace_all(good, "Ana Ivanova fires", "Bea Lopez fires");
        const auto r = sanity_check(bad, rally);
        CHECK_FALSE(r.passed);
        CHECK(has_kind(r, ViolationKind::PlayerName));
    }
    SUBCASE("wrong score")
    {
        const auto r = sanity_check("At 30-30 Ana Ivanova fires an ace.", rally);
        CHECK_FALSE(r.passed);
        CHECK(has_kind(r, ViolationKind::ScoreMention));
        CHECK(sanity_check("At 40-15 Ana Ivanova fires an ace.", rally).passed);
        CHECK(sanity_check("At forty-fifteen, Ivanova fires an ace.", rally).passed);
    }
    SUBCASE("deuce and advantage")
    {
        CHECK(has_kind(sanity_check("Deuce once more.", rally), ViolationKind::ScoreMention));
        CHECK(has_kind(sanity_check("Advantage Lopez.", rally), ViolationKind::ScoreMention));
        const auto at_deuce = ace_at(3, 3);
        CHECK(sanity_check("From deuce, advantage Ivanova.", at_deuce).passed);
        CHECK(has_kind(sanity_check("Advantage Lopez.", at_deuce), ViolationKind::ScoreMention));
    }
    SUBCASE("unknown player")
    {
        const auto r = sanity_check("Roger Federer fires an ace.", rally);
        CHECK(has_kind(r, ViolationKind::PlayerName));
        CHECK(sanity_check("She fires an ace.", rally).passed);
    }
    SUBCASE("shot that never happened")
    {
        const auto r = sanity_check("Ivanova with a backhand volley.", rally);
        CHECK(has_kind(r, ViolationKind::ShotTerm));
        CHECK(r.violations.size() == 2);
        CHECK(has_kind(sanity_check("A double fault from Lopez.", rally), ViolationKind::ShotTerm));
    }
    SUBCASE("holds and breaks")
    {
        CHECK(sanity_check("Ivanova holds serve.", rally).passed);
        CHECK_FALSE(sanity_check("Ivanova breaks serve.", rally).passed);
        CHECK_FALSE(sanity_check("Ivanova holds serve.", ace_at(1, 0)).passed);
    }
    SUBCASE("loser terms")
    {
        auto score = match::MatchScore::fresh();
        const auto dfault = testing::make_rally(
            {testing::serve(PlayerId::One, ServeAttempt::First, ShotOutcome::Fault, 0.5),
             testing::serve(PlayerId::One, ServeAttempt::Second, ShotOutcome::Fault, 1.5)},
            score);
        CHECK(sanity_check("A double fault from Ivanova.", dfault).passed);
        CHECK(has_kind(sanity_check("A double fault from Lopez. Lopez with a double fault.", dfault),
                       ViolationKind::PlayerName));
    }
    SUBCASE("accented names")
    {
        auto r = rally;
        r.match_info.players[0].name = "Zoë Müller";
        CHECK(sanity_check("Zoe Muller fires an ace.", r).passed);
        CHECK(sanity_check("MÜLLER fires an ace.", r).passed);
    }
}

TEST_CASE("scorecard bounds and sum rule")
{
    const auto top = parse_scorecard(R"({"scores": {"accuracy": 20, "coherence": 20, "excitement": 20,
        "professionalism": 20, "pacing": 20}, "total_score": 100})");
    CHECK(top.total == 100);
    CHECK_FALSE(top.corrected);

    const auto fixed = parse_scorecard(R"({"scores": {"accuracy": 18, "coherence": 18, "excitement": 17,
        "professionalism": 18, "pacing": 17}, "total_score": 85})");
    CHECK(fixed.total == 88);
    CHECK(fixed.corrected);

    CHECK_THROWS_AS(parse_scorecard(R"({"scores": {"accuracy": 25, "coherence": 18, "excitement": 17,
        "professionalism": 18, "pacing": 17}, "total_score": 95})"), EvalError);
}
