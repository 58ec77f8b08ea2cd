#include "courtside/pipeline.hpp"

#include "oracles/stat_recount.hpp"
#include "unit/fixtures.hpp"
#include "unit/flaky_client.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace courtside;
using namespace courtside::pipeline;

namespace {

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("courtside_test_" + name);
}

std::string dump_all(const std::vector<events::RallyRecord>& records)
{
    std::ostringstream out;
    write_dataset(out, records);
    return out.str();
}

prompt::GenerateOptions no_sleep()
{
    prompt::GenerateOptions o;
    o.sleep = [](std::chrono::milliseconds) {};
    return o;
}

}  // namespace

TEST_CASE("simulation is deterministic and legal")
{
    for (int best_of : {3, 5})
    {
        match::ScoringConfig config;
        config.best_of = best_of;
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            const auto a = simulate_match(seed, config);
            const auto b = simulate_match(seed, config);
            REQUIRE(dump_all(a) == dump_all(b));
            REQUIRE_FALSE(a.empty());
            for (std::size_t i = 0; i < a.size(); ++i)
            {
                const auto violations = record_violations(a[i]);
                CAPTURE(a[i].clip_id);
                REQUIRE(violations.empty());
                if (i + 1 < a.size())
                {
                    REQUIRE(a[i + 1].initial_score == match::advance_point(a[i].initial_score, a[i].outcome.point_winner));
                }
            }
            const auto end = match::advance_point(a.back().initial_score, a.back().outcome.point_winner);
            REQUIRE(match::is_terminal(end).has_value());
        }
    }
    CHECK(dump_all(simulate_match(1)) != dump_all(simulate_match(2)));
}

TEST_CASE("session spans several matches between the same players")
{
    const auto s = simulate_session(3, 500);
    REQUIRE(s.size() == 500);
    for (const auto& r : s)
    {
        REQUIRE(r.match_info == s.front().match_info);
        REQUIRE(record_violations(r).empty());
    }
    CHECK(dump_all(s) == dump_all(simulate_session(3, 500)));
}

TEST_CASE("parallel simulation equals serial")
{
    const auto serial = simulate_matches(11, 6, {}, Execution::Serial);
    const auto parallel = simulate_matches(11, 6, {}, Execution::Parallel);
    REQUIRE(serial.size() == 6);
    for (std::size_t i = 0; i < serial.size(); ++i)
    {
        CHECK(dump_all(serial[i]) == dump_all(parallel[i]));
    }
}

TEST_CASE("dataset loading")
{
    SUBCASE("listing record")
    {
        const auto path = temp_file("listing.jsonl");
        {
            std::ofstream out(path);
            out << nlohmann::json::parse(testing::read_golden("listing_record.json")).dump() << '\n';
        }
        const auto data = load_dataset(path);
        CHECK(data.errors.empty());
        CHECK(data.records.size() == 1);
    }
    SUBCASE("thousand records keep their order")
    {
        const auto records = simulate_session(5, 1000);
        const auto path = temp_file("thousand.jsonl");
        {
            std::ofstream out(path);
            write_dataset(out, records);
        }
        const auto data = load_dataset(path);
        CHECK(data.errors.empty());
        REQUIRE(data.records.size() == 1000);
        // The file form carries set counts, not per-set game history.
        CHECK(dump_all(data.records) == dump_all(records));
        for (std::size_t i = 0; i < records.size(); ++i)
        {
            auto expected = records[i];
            expected.initial_score.set_games.clear();
            REQUIRE(data.records[i] == expected);
        }
    }
    SUBCASE("bad lines are reported with their numbers")
    {
        const auto records = simulate_match(9);
        auto broken = events::rally_to_json(records[1]);
        broken.erase("clip_id");
        auto illegal = records[2];
        illegal.shots.front().hitter = match::other(illegal.shots.front().hitter);
        const auto path = temp_file("broken.jsonl");
        {
            std::ofstream out(path);
            out << events::rally_to_json(records[0]).dump() << '\n'
                << broken.dump() << '\n'
                << "{not json\n"
                << events::rally_to_json(illegal).dump() << '\n'
                << events::rally_to_json(records[3]).dump() << '\n';
        }
        const auto data = load_dataset(path);
        CHECK(data.records.size() == 2);
        REQUIRE(data.errors.size() == 3);
        CHECK(data.errors[0].line == 2);
        CHECK(data.errors[0].message.find("clip_id") != std::string::npos);
        CHECK(data.errors[1].line == 3);
        CHECK(data.errors[2].line == 4);
    }
    try
    {
        load_dataset("/nonexistent/courtside.jsonl");
        FAIL("expected FileNotFound");
    }
    catch (const PipelineError& e)
    {
        CHECK(e.code() == PipelineErrc::FileNotFound);
    }
}

TEST_CASE("ten rally replay matches the recount")
{
    const auto records = simulate_session(17, 10);
    prompt::MockClient mock;
    const auto report = replay_match(records, mock, {});
    REQUIRE(report.rallies.size() == 10);
    for (const auto& r : report.rallies)
    {
        CHECK(r.ok);
        REQUIRE(r.commentary.has_value());
        CHECK_FALSE(r.commentary->empty());
        REQUIRE(r.sanity.has_value());
        CHECK(r.sanity->passed);
    }
    CHECK(report.final_memory.lines == oracle::recount(records));
    CHECK(report.final_memory.rallies_consolidated == 10);
    REQUIRE(report.evaluation.has_value());
    CHECK(report.evaluation->metric_pairs == 10);
}

TEST_CASE("window contents at rally seven")
{
    const auto records = simulate_session(4, 7);
    prompt::MockClient mock;
    MatchReplayer replayer(mock, {});
    for (std::size_t i = 0; i < 6; ++i)
    {
        replayer.step(records[i]);
    }
    // The snapshot rally 7 is built from.
    const auto view = memory::memory_snapshot(replayer.memory());
    REQUIRE(view.recent.size() == 4);
    CHECK(view.recent.front().index == 3);
    CHECK(view.recent.back().index == 6);
    CHECK(view.rallies_consolidated == 2);
}

TEST_CASE("empty match")
{
    prompt::MockClient mock;
    const auto report = replay_match({}, mock, {});
    CHECK(report.rallies.empty());
    CHECK_FALSE(report.evaluation.has_value());
    CHECK(report.final_memory.rallies_consolidated == 0);
}

TEST_CASE("replay is deterministic")
{
    const auto records = simulate_match(23);
    prompt::MockClient a;
    prompt::MockClient b;
    const auto first = run_report_to_json(replay_match(records, a, {})).dump();
    const auto second = run_report_to_json(replay_match(records, b, {})).dump();
    CHECK(first == second);
    CHECK(first.find("engine_ms") == std::string::npos);
    CHECK(run_report_to_json(replay_match(records, a, {}), true).dump().find("engine_ms") != std::string::npos);
}

TEST_CASE("failed generations keep metadata but no commentary")
{
    const auto records = simulate_session(31, 40);
    testing::FlakyClient flaky({3, 4, 10, 25});
    ReplayOptions options;
    options.generate = no_sleep();
    MatchReplayer replayer(flaky, {}, options);
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        const auto& r = replayer.step(records[i]);
        const auto& latest = replayer.memory().short_term().entries().back();
        CHECK(latest.index == static_cast<std::int64_t>(i + 1));
        CHECK(latest.commentary.has_value() == r.ok);
        if (r.ok)
        {
            CHECK(latest.commentary == r.commentary);
        }
    }
    const auto report = replayer.finish();
    CHECK(report.failures() == 4);
    CHECK_FALSE(report.rallies[2].ok);
    CHECK(report.rallies[2].error.rfind("request_rejected", 0) == 0);
    CHECK_FALSE(report.rallies[2].sanity.has_value());
    CHECK(report.final_memory.lines == oracle::recount(records));
    CHECK(report.evaluation->metric_pairs == 36);
}

TEST_CASE("failed rally shows as unavailable in the next prompt")
{
    const auto records = simulate_session(8, 3);
    testing::FlakyClient flaky({1});
    MatchReplayer replayer(flaky, {});
    replayer.step(records[0]);
    const auto view = memory::memory_snapshot(replayer.memory());
    const auto bundle = prompt::build_commentary_prompt(records[1], view, std::nullopt);
    CHECK(bundle.user_text.find("[commentary unavailable]") != std::string::npos);
}

TEST_CASE("transport failures are retried before failing the rally")
{
    const auto records = simulate_session(8, 2);
    testing::FlakyClient flaky({1, 2}, prompt::PromptErrc::TransportFailure);
    ReplayOptions options;
    options.generate = no_sleep();
    const auto report = replay_match(records, flaky, {}, options);
    CHECK(report.rallies[0].ok);
    CHECK(report.rallies[0].attempts == 3);
}

TEST_CASE("prompts stay under the token cap")
{
    const auto records = simulate_session(41, 200);
    prompt::MockClient mock;
    PipelineConfig config;
    const auto report = replay_match(records, mock, config);
    for (const auto& r : report.rallies)
    {
        REQUIRE(r.prompt_tokens <= config.token_cap);
    }
    config.token_cap = 50;
    const auto starved = replay_match(records, mock, config);
    CHECK(starved.failures() == records.size());
    CHECK(starved.rallies[0].error.rfind("budget_exceeded", 0) == 0);
}

TEST_CASE("mixed matches are refused")
{
    const auto a = simulate_match(1);
    const auto b = simulate_match(2);
    prompt::MockClient mock;
    MatchReplayer replayer(mock, {});
    replayer.step(a[0]);
    CHECK_THROWS_AS(replayer.step(b[0]), PipelineError);
}

TEST_CASE("parallel multi-match replay equals serial")
{
    const auto matches = simulate_matches(2, 4, {}, Execution::Serial);
    auto factory = [] { return std::make_unique<prompt::MockClient>(); };
    const auto serial = replay_matches(matches, factory, {}, Execution::Serial);
    const auto parallel = replay_matches(matches, factory, {}, Execution::Parallel);
    REQUIRE(serial.size() == 4);
    for (std::size_t i = 0; i < serial.size(); ++i)
    {
        CHECK(run_report_to_json(serial[i]).dump() == run_report_to_json(parallel[i]).dump());
        CHECK(serial[i].final_memory.lines == oracle::recount(matches[i]));
    }
}

TEST_CASE("configuration")
{
    const auto c = config_from_json(nlohmann::json::parse(
        R"({"k": 6, "token_cap": 9000, "client": "http", "scoring": {"best_of": 5}, "segmentation": {"max_gap": 2.5}})"));
    CHECK(c.k == 6);
    CHECK(c.token_cap == 9000);
    CHECK(c.client == ClientKind::Http);
    CHECK(c.scoring.best_of == 5);
    CHECK(c.segmentation.max_gap == 2.5);
    CHECK(c.segmentation.min_hits == 2);
    CHECK(config_from_json(config_to_json(c)).k == 6);

    auto code_of = [](const char* text) {
        try
        {
            config_from_json(nlohmann::json::parse(text));
        }
        catch (const PipelineError& e)
        {
            return e.code();
        }
        return PipelineErrc::FileNotFound;
    };
    CHECK(code_of(R"({"k": 0})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"token_cap": 0})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"api_key": "sk-123"})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"colour": "red"})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"client": "carrier pigeon"})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"scoring": {"best_of": 4}})") == PipelineErrc::InvalidConfig);
    CHECK(code_of(R"({"k": "four"})") == PipelineErrc::InvalidConfig);
}

TEST_CASE("evaluation items")
{
    std::istringstream in(R"({"clip_id": "a_1_2", "prediction": "ace", "reference": "an ace"}
{"clip_id": "a_3_4", "prediction": "ace", "reference": ["an ace", "ace out wide"]}
{"clip_id": "a_5_6", "reference": "x"}
)");
    std::vector<LineError> errors;
    const auto items = read_evaluation_items(in, errors);
    REQUIRE(items.size() == 2);
    CHECK(items[1].references.size() == 2);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].line == 3);
}
