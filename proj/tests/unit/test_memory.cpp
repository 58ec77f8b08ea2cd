#include "courtside/memory.hpp"

#include "oracles/stat_recount.hpp"
#include "unit/rally_builders.hpp"

#include <doctest.h>

#include <random>

using namespace courtside;
using namespace courtside::memory;
using events::ServeAttempt;
using events::ShotOutcome;
using match::PlayerId;

namespace {

MemoryEntry entry_at(std::int64_t index, events::RallyRecord r = testing::make_rally(
                                             {testing::serve(PlayerId::One, ServeAttempt::First, ShotOutcome::Winner, 0.5)}))
{
    return make_entry(index, std::move(r), "commentary " + std::to_string(index));
}

}  // namespace

TEST_CASE("fifo window")
{
    ShortTermMemory s(4);
    CHECK_FALSE(s.push(entry_at(1)).has_value());
    REQUIRE(s.size() == 1);
    CHECK(s.entries().front().index == 1);
    for (int i = 2; i <= 4; ++i)
    {
        CHECK_FALSE(s.push(entry_at(i)).has_value());
    }
    const auto evicted = s.push(entry_at(5));
    REQUIRE(evicted.has_value());
    CHECK(evicted->index == 1);
    REQUIRE(s.size() == 4);
    CHECK(s.entries().front().index == 2);
    CHECK(s.entries().back().index == 5);

    try
    {
        (void)s.push(entry_at(3));
        FAIL("expected OutOfOrderEntry");
    }
    catch (const MemoryError& e)
    {
        CHECK(e.code() == MemoryErrc::OutOfOrderEntry);
    }
    // An index evicted earlier is also refused.
    CHECK_THROWS_AS((void)s.push(entry_at(1)), MemoryError);
    CHECK_THROWS_AS((void)s.push(entry_at(5)), MemoryError);
}

TEST_CASE("entries need a reference")
{
    auto r = testing::make_rally({testing::serve(PlayerId::One, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
    r.clip_id.clear();
    CHECK_THROWS_AS((void)make_entry(1, r, std::nullopt), MemoryError);
}

TEST_CASE("zero capacity evicts immediately")
{
    ShortTermMemory s(0);
    const auto e = s.push(entry_at(1));
    REQUIRE(e.has_value());
    CHECK(e->index == 1);
    CHECK(s.empty());
}

TEST_CASE("ace consolidation")
{
    const auto ace = entry_at(1);
    const auto l = consolidate(LongTermMemory{}, ace);
    const auto& p1 = l.line(PlayerId::One);
    const auto& p2 = l.line(PlayerId::Two);
    CHECK(p1.aces == 1);
    CHECK(p1.serve_points == 1);
    CHECK(p1.serve_points_won == 1);
    CHECK(p1.points_won == 1);
    CHECK(p1.first_serves_in == 1);
    CHECK(p2.return_points == 1);
    CHECK(p2.points_won == 0);
    CHECK(p2.aces == 0);
    CHECK(l.rallies_consolidated == 1);
    REQUIRE(l.last_consolidated_score.has_value());
    CHECK(l.last_consolidated_score->points == match::ScorePair{1, 0});

    try
    {
        (void)consolidate(l, entry_at(3));
        FAIL("expected NonSequentialConsolidation");
    }
    catch (const MemoryError& e)
    {
        CHECK(e.code() == MemoryErrc::NonSequentialConsolidation);
    }
    CHECK_THROWS_AS((void)consolidate(l, entry_at(1)), MemoryError);
}

TEST_CASE("ratios are absent without a denominator")
{
    const ContextView fresh = memory_snapshot(ShortTermMemory{}, LongTermMemory{});
    CHECK(fresh.recent.empty());
    CHECK(fresh.rallies_consolidated == 0);
    for (int p = 0; p < 2; ++p)
    {
        CHECK(fresh.lines[p] == PlayerStatLine{});
        CHECK_FALSE(fresh.ratios[p].first_serve_pct.has_value());
        CHECK_FALSE(fresh.ratios[p].serve_points_won_pct.has_value());
        CHECK_FALSE(fresh.ratios[p].return_points_won_pct.has_value());
    }

    LongTermMemory l;
    l.lines[0].serve_points = 7;
    l.lines[0].first_serves_in = 5;
    l.lines[0].serve_points_won = 4;
    const auto view = memory_snapshot(ShortTermMemory{}, l);
    CHECK(*view.ratios[0].first_serve_pct == 5.0 / 7.0);
    CHECK(*view.ratios[0].serve_points_won_pct == 4.0 / 7.0);
    CHECK_FALSE(view.ratios[0].return_points_won_pct.has_value());
}

TEST_CASE("window bookkeeping")
{
    std::mt19937_64 rng(21);
    const auto log = testing::random_log(rng, 40);
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{4}, std::size_t{7}})
    {
        MatchMemory m(k);
        for (std::size_t t = 1; t <= log.size(); ++t)
        {
            m.record(make_entry(static_cast<std::int64_t>(t), log[t - 1], std::nullopt));
            const auto view = memory_snapshot(m);
            const auto expected_short = std::min(t, k);
            CHECK(view.recent.size() == expected_short);
            CHECK(view.rallies_consolidated == static_cast<std::int64_t>(t - expected_short));
            // Every rally seen so far lives in exactly one of the two places.
            const auto& l = m.long_term();
            CHECK(l.lines[0].points_won + l.lines[1].points_won == l.rallies_consolidated);
            if (!view.recent.empty())
            {
                CHECK(view.recent.front().index == l.rallies_consolidated + 1);
                CHECK(view.recent.back().index == static_cast<std::int64_t>(t));
            }
            CHECK(l.lines[0].bound_violation().empty());
            CHECK(l.lines[1].bound_violation().empty());
        }
        m.flush();
        CHECK(m.short_term().empty());
        CHECK(m.long_term().rallies_consolidated == static_cast<std::int64_t>(log.size()));
    }

    MatchMemory six;
    for (int t = 1; t <= 6; ++t)
    {
        six.record(make_entry(t, log[static_cast<std::size_t>(t - 1)], std::nullopt));
    }
    const auto view = memory_snapshot(six);
    CHECK(view.recent.size() == 4);
    CHECK(view.rallies_consolidated == 2);
}

TEST_CASE("sequential consolidation equals batch recount")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto log = testing::random_log(rng, 200);
        MatchMemory m(4);
        for (std::size_t t = 0; t < log.size(); ++t)
        {
            m.record(make_entry(static_cast<std::int64_t>(t + 1), log[t], std::nullopt));
        }
        m.flush();
        const auto expected = oracle::recount(log);
        for (int p = 0; p < 2; ++p)
        {
            for (const auto& field : kStatFields)
            {
                CAPTURE(field.name);
                CHECK(m.long_term().lines[p].*field.member == expected[p].*field.member);
            }
        }
        // Stepwise: after each eviction the long-term state equals a recount of the evicted prefix.
        MatchMemory step(4);
        for (std::size_t t = 0; t < 60; ++t)
        {
            step.record(make_entry(static_cast<std::int64_t>(t + 1), log[t], std::nullopt));
            const auto prefix = static_cast<std::size_t>(step.long_term().rallies_consolidated);
            const auto partial = oracle::recount(std::span(log).first(prefix));
            CHECK(step.long_term().lines == partial);
        }
    }
}

TEST_CASE("missing commentary does not change statistics")
{
    std::mt19937_64 rng(77);
    const auto log = testing::random_log(rng, 120);
    MatchMemory with_text;
    MatchMemory with_gaps;
    for (std::size_t t = 0; t < log.size(); ++t)
    {
        const auto i = static_cast<std::int64_t>(t + 1);
        with_text.record(make_entry(i, log[t], "text"));
        with_gaps.record(make_entry(i, log[t], t % 3 == 0 ? std::nullopt : std::optional<std::string>("text")));
    }
    with_text.flush();
    with_gaps.flush();
    CHECK(with_text.long_term() == with_gaps.long_term());
}

TEST_CASE("consolidation is pure and deterministic")
{
    std::mt19937_64 rng(5);
    const auto log = testing::random_log(rng, 10);
    const LongTermMemory start;
    const auto e = make_entry(1, log[0], std::nullopt);
    const auto a = consolidate(start, e);
    const auto b = consolidate(start, e);
    CHECK(a == b);
    CHECK(start == LongTermMemory{});
}

TEST_CASE("stats report")
{
    std::mt19937_64 rng(8);
    const auto log = testing::random_log(rng, 30);
    MatchMemory m;
    for (std::size_t t = 0; t < log.size(); ++t)
    {
        m.record(make_entry(static_cast<std::int64_t>(t + 1), log[t], std::nullopt));
    }
    m.flush();
    const auto report = stats_report(m.long_term(), log.front().match_info);
    CHECK(report["rallies_consolidated"] == 30);
    REQUIRE(report["players"].size() == 2);
    CHECK(report["players"][0]["id"] == "player_1");
    CHECK(report["players"][0]["name"] == "Ana Ivanova");
    CHECK(report["players"][1]["name"] == "Bea Lopez");
    std::vector<std::string> keys;
    for (const auto& [key, value] : report["players"][0]["stats"].items())
    {
        keys.push_back(key);
    }
    REQUIRE(keys.size() == kStatFields.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
    {
        CHECK(keys[i] == kStatFields[i].name);
    }
    for (int p = 0; p < 2; ++p)
    {
        CHECK(stat_line_from_json(report["players"][p]["stats"]) == m.long_term().lines[p]);
    }
    CHECK(report["final_score"].is_string());

    const auto empty = stats_report(LongTermMemory{}, log.front().match_info);
    CHECK(empty["players"][0]["ratios"]["first_serve_pct"].is_null());
    CHECK(empty["final_score"].is_null());
}
