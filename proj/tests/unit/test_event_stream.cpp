#include "courtside/event_stream.hpp"
#include "oracles/edit_distance.hpp"
#include "oracles/stat_recount.hpp"
#include "unit/rally_builders.hpp"

#include <doctest.h>


#include <random>

using namespace courtside;
using namespace courtside::events;
using courtside::match::PlayerId;
using testing::make_rally;
using testing::serve;
using testing::shot;

constexpr auto P1 = PlayerId::One;
constexpr auto P2 = PlayerId::Two;

TEST_CASE("minimal legal rally")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 0.5),
                         shot(P2, Stroke::Forehand, ShotOutcome::Winner, 1.4)});
    CHECK(validate_rally(r).ok());
    CHECK(r.outcome.point_winner == P2);
    CHECK(r.outcome.reason == PointReason::Winner);
}

TEST_CASE("hitter alternation")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 0.5),
                         shot(P2, Stroke::Forehand, ShotOutcome::In, 1.4),
                         shot(P2, Stroke::Backhand, ShotOutcome::Winner, 2.1)});
    CHECK(validate_rally(r).mentions("hitter alternation"));
}

TEST_CASE("double fault")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Fault, 0.5),
                         serve(P1, ServeAttempt::Second, ShotOutcome::Fault, 8.0)});
    CHECK(validate_rally(r).ok());
    CHECK(r.outcome == RallyOutcome{P2, P1, PointReason::DoubleFault});
}

TEST_CASE("structural violations")
{
    SUBCASE("must open with a serve")
    {
        auto r = make_rally({shot(P1, Stroke::Forehand, ShotOutcome::Winner, 0.5)});
        CHECK(validate_rally(r).mentions("first event must be a serve"));
    }
    SUBCASE("timestamps strictly increase")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 1.5),
                             shot(P2, Stroke::Forehand, ShotOutcome::Winner, 1.5)});
        CHECK(validate_rally(r).mentions("strictly increasing"));
    }
    SUBCASE("serve_attempt only on serves")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 0.5),
                             shot(P2, Stroke::Forehand, ShotOutcome::Winner, 1.5)});
        r.shots[1].serve_attempt = ServeAttempt::First;
        CHECK(validate_rally(r).mentions("serve_attempt"));
    }
    SUBCASE("outcome must agree")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
        r.outcome = {P2, P1, PointReason::Winner};
        CHECK(validate_rally(r).mentions("outcome disagrees"));
    }
    SUBCASE("bad clip id")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
        r.clip_id = "match_9_3";
        CHECK(validate_rally(r).mentions("start must precede end"));
        r.clip_id = "nounderscores";
        CHECK(validate_rally(r).mentions("clip_id"));
    }
    SUBCASE("wrong server")
    {
        auto r = make_rally({serve(P2, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
        CHECK(validate_rally(r).mentions("scoreboard server"));
    }
    SUBCASE("let then retry with the same attempt is fine")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Let, 0.5),
                             serve(P1, ServeAttempt::First, ShotOutcome::Winner, 9.0)});
        CHECK(validate_rally(r).ok());
    }
    SUBCASE("bounce outside the clip")
    {
        auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
        r.bounces.push_back({42.0, CourtHalf::Far, std::nullopt});
        CHECK(validate_rally(r).mentions("bounce"));
    }
}

TEST_CASE("clip ids keep underscores in the match id")
{
    auto clip = parse_clip_id("wimbledon_2023_final_3605.25_3611.5");
    REQUIRE(clip);
    CHECK(clip->match_id == "wimbledon_2023_final");
    CHECK(clip->start == 3605.25);
    CHECK(clip->end == 3611.5);
    CHECK_FALSE(parse_clip_id("x_y_z"));
}

TEST_CASE("derive_outcome agrees with the rule table over every terminal combination")
{
    // hitter-relative: +1 hitter wins, -1 opponent wins, 0 incomplete
    struct Row
    {
        Stroke stroke;
        ShotOutcome outcome;
        std::optional<ServeAttempt> attempt;
        bool touched;
        int sign;
        PointReason reason;
    };
    std::vector<Row> table;
    const auto F = ServeAttempt::First;
    const auto S = ServeAttempt::Second;
    for (auto a : {F, S})
    {
        table.push_back({Stroke::Serve, ShotOutcome::Winner, a, false, +1, PointReason::Ace});
        table.push_back({Stroke::Serve, ShotOutcome::Winner, a, true, +1, PointReason::ServiceWinner});
        table.push_back({Stroke::Serve, ShotOutcome::In, a, false, 0, {}});
        table.push_back({Stroke::Serve, ShotOutcome::Let, a, false, 0, {}});
        table.push_back({Stroke::Serve, ShotOutcome::UnforcedError, a, false, -1, PointReason::UnforcedError});
        table.push_back({Stroke::Serve, ShotOutcome::ForcedError, a, false, -1, PointReason::ForcedError});
    }
    table.push_back({Stroke::Serve, ShotOutcome::Fault, F, false, 0, {}});
    table.push_back({Stroke::Serve, ShotOutcome::Net, F, false, 0, {}});
    table.push_back({Stroke::Serve, ShotOutcome::Fault, S, false, -1, PointReason::DoubleFault});
    table.push_back({Stroke::Serve, ShotOutcome::Net, S, false, -1, PointReason::DoubleFault});
    for (auto st : {Stroke::Forehand, Stroke::Backhand})
    {
        table.push_back({st, ShotOutcome::Winner, std::nullopt, false, +1, PointReason::Winner});
        table.push_back({st, ShotOutcome::UnforcedError, std::nullopt, false, -1, PointReason::UnforcedError});
        table.push_back({st, ShotOutcome::ForcedError, std::nullopt, false, -1, PointReason::ForcedError});
        table.push_back({st, ShotOutcome::Net, std::nullopt, false, -1, PointReason::UnforcedError});
        table.push_back({st, ShotOutcome::Fault, std::nullopt, false, -1, PointReason::UnforcedError});
        table.push_back({st, ShotOutcome::In, std::nullopt, false, 0, {}});
        table.push_back({st, ShotOutcome::Let, std::nullopt, false, 0, {}});
    }
    CHECK(table.size() == 2 * 6 + 4 + 2 * 7);

    for (const auto& row : table)
    {
        for (PlayerId hitter : {P1, P2})
        {
            ShotEvent last;
            last.hitter = hitter;
            last.stroke = row.stroke;
            last.outcome = row.outcome;
            last.serve_attempt = row.attempt;
            last.return_touched = row.touched;
            const std::vector<ShotEvent> shots{last};
            CAPTURE(to_string(row.stroke));
            CAPTURE(to_string(row.outcome));
            if (row.sign == 0)
            {
                CHECK_THROWS_AS(derive_outcome(shots), EventError);
                continue;
            }
            const auto got = derive_outcome(shots);
            const PlayerId expected_winner = row.sign > 0 ? hitter : match::other(hitter);
            CHECK(got.point_winner == expected_winner);
            CHECK(got.point_loser == match::other(expected_winner));
            CHECK(got.reason == row.reason);
        }
    }
}

TEST_CASE("six-shot rally ending in a forced error")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 0.4),
                         shot(P2, Stroke::Backhand, ShotOutcome::In, 1.3),
                         shot(P1, Stroke::Forehand, ShotOutcome::In, 2.2),
                         shot(P2, Stroke::Forehand, ShotOutcome::In, 3.1),
                         shot(P1, Stroke::Forehand, ShotOutcome::In, 4.0),
                         shot(P2, Stroke::Backhand, ShotOutcome::ForcedError, 4.9)});
    CHECK(r.outcome == RallyOutcome{P1, P2, PointReason::ForcedError});
    CHECK(validate_rally(r).ok());
}

TEST_CASE("empty rally")
{
    CHECK_THROWS_AS(derive_outcome(std::vector<ShotEvent>{}), EventError);
}

namespace {

std::size_t dp_distance(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    // Full-table Wagner-Fischer.
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i)
        d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j)
        d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    return d[a.size()][b.size()];
}

}  // namespace

TEST_CASE("edit score")
{
    const std::vector<std::string> five{"a", "b", "c", "d", "e"};
    CHECK(edit_score(five, five) == 100.0);

    const std::vector<std::string> x{"s", "f", "b", "f"};
    const std::vector<std::string> y{"s", "f", "f", "f"};
    CHECK(dp_distance(x, y) == 1);
    CHECK(edit_score(x, y) == doctest::Approx(75.0));

    const std::vector<std::string> none;
    const std::vector<std::string> three{"a", "b", "c"};
    CHECK(edit_score(none, three) == 0.0);
    CHECK(edit_score(none, none) == 100.0);

    std::mt19937 rng(11);
    for (int trial = 0; trial < 1000; ++trial)
    {
        std::vector<std::string> a(rng() % 9), b(rng() % 9);
        for (auto& t : a)
            t = std::string(1, static_cast<char>('a' + rng() % 4));
        for (auto& t : b)
            t = std::string(1, static_cast<char>('a' + rng() % 4));
        const auto longest = std::max(a.size(), b.size());
        const double expected = longest == 0 ? 100.0 : 100.0 * (1.0 - double(dp_distance(a, b)) / double(longest));
        REQUIRE(edit_score(a, b) == expected);
        REQUIRE(edit_score(a, b) == edit_score(b, a));
        REQUIRE(edit_score(a, b) >= 0.0);
        REQUIRE(edit_score(a, b) <= 100.0);
    }
}

TEST_CASE("classify_point on an ace")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Winner, 0.5)});
    const auto lines = classify_point(r);
    const auto& s = lines[0];
    const auto& ret = lines[1];
    CHECK(s.serve_points == 1);
    CHECK(s.first_serves_in == 1);
    CHECK(s.aces == 1);
    CHECK(s.points_won == 1);
    CHECK(s.serve_points_won == 1);
    CHECK(ret.return_points == 1);
    CHECK(ret.points_won == 0);
    CHECK(s.winners == 0);
}

TEST_CASE("classify_point on a double fault")
{
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::Fault, 0.5),
                         serve(P1, ServeAttempt::Second, ShotOutcome::Fault, 8.0)});
    const auto lines = classify_point(r);
    CHECK(lines[0].serve_points == 1);
    CHECK(lines[0].double_faults == 1);
    CHECK(lines[0].first_serves_in == 0);
    CHECK(lines[1].return_points == 1);
    CHECK(lines[1].return_points_won == 1);
    CHECK(lines[1].points_won == 1);
}

TEST_CASE("break point faced and converted")
{
    auto score = match::MatchScore::fresh();
    score.points = {2, 3};  // 30-40
    auto r = make_rally({serve(P1, ServeAttempt::First, ShotOutcome::In, 0.5),
                         shot(P2, Stroke::Forehand, ShotOutcome::Winner, 1.5)},
                        score);
    const auto lines = classify_point(r);
    CHECK(lines[0].break_points_faced == 1);
    CHECK(lines[0].break_points_saved == 0);
    CHECK(lines[1].break_points_converted == 1);
}

TEST_CASE("classify_point sums match the recount oracle over synthetic rallies")
{
    std::mt19937_64 rng(5);
    auto score = match::MatchScore::fresh();
    std::vector<RallyRecord> log;
    std::array<PlayerStatLine, 2> summed{};
    for (int i = 0; i < 20; ++i)
    {
        auto r = testing::random_rally(rng, score);
        REQUIRE(validate_rally(r).ok());
        const auto inc = classify_point(r);
        CHECK(inc[0].points_won + inc[1].points_won == 1);
        CHECK(inc[0].serve_points + inc[1].serve_points == 1);
        CHECK(inc[0].return_points + inc[1].return_points == 1);
        CHECK(inc[match::index(r.initial_score.server)].serve_points == 1);
        summed[0] += inc[0];
        summed[1] += inc[1];
        log.push_back(r);
        score = match::advance_point(score, r.outcome.point_winner);
    }
    auto expected = oracle::recount(log);
    expected[0].games_won = expected[1].games_won = 0;
    CHECK(summed[0] == expected[0]);
    CHECK(summed[1] == expected[1]);
}

TEST_CASE("record JSON round trip")
{
    std::mt19937_64 rng(9);
    auto score = match::MatchScore::fresh();
    for (int i = 0; i < 50; ++i)
    {
        auto r = testing::random_rally(rng, score);
        r.shots[0].hitter_position = geometry::PixelPoint{640.25, 700.5};
        r.bounces.push_back({0.75, CourtHalf::Far, geometry::PixelPoint{600.0, 300.0}});
        if (i % 2)
            r.commentary = "What a point.";
        const auto text = rally_to_json(r).dump();
        const auto back = rally_from_json(nlohmann::ordered_json::parse(text));
        REQUIRE(back == r);
        score = match::advance_point(score, r.outcome.point_winner);
        score.set_games.clear();
    }
}

TEST_CASE("listing-shaped record ingests")
{
    const auto j = nlohmann::ordered_json::parse(R"({
        "clip_id": "m01_10.0_18.5",
        "match_info": {"tournament": "Wimbledon", "round": "QF", "surface": "grass",
                       "player_1": {"name": "Player A", "handedness": "right"},
                       "player_2": {"name": "Player B", "handedness": "left"}},
        "scoreboard": {"Player A": [1, 2, 30], "Player B": [0, 3, 15], "server": "Player A"},
        "audio_transcript": "...",
        "shot_sequence": [{"hitter": "player_1", "stroke": "serve", "serve_attempt": "first", "outcome": "winner", "t": 0.4}],
        "commentary": "..."
    })");
    const auto r = rally_from_json(j);
    CHECK(r.initial_score.sets_won == match::ScorePair{1, 0});
    CHECK(r.initial_score.games == match::ScorePair{2, 3});
    CHECK(r.initial_score.points == match::ScorePair{2, 1});
    CHECK(r.initial_score.server == P1);
    CHECK(r.outcome.reason == PointReason::Ace);
    CHECK(validate_rally(r).ok());

    auto missing = j;
    missing.erase("clip_id");
    try
    {
        rally_from_json(missing);
        FAIL("expected a schema violation");
    }
    catch (const EventError& e)
    {
        CHECK(std::string(e.what()).find("clip_id") != std::string::npos);
    }
}

TEST_CASE("edit score")
{
    using V = std::vector<std::string>;
    CHECK(levenshtein(V{"serve", "forehand", "backhand"}, V{"serve", "backhand"}) == 1);
    CHECK(edit_score(V{}, V{}) == 100.0);
    CHECK(edit_score(V{"a"}, V{}) == 0.0);
    CHECK(edit_score(V{"a", "b", "c", "d"}, V{"a", "b", "x", "d"}) == doctest::Approx(75.0));

    std::mt19937_64 rng(8);
    const V alphabet{"serve", "forehand", "backhand", "volley", "smash"};
    for (int trial = 0; trial < 1000; ++trial)
    {
        V a(rng() % 13);
        V b(rng() % 13);
        for (auto& x : a)
        {
            x = alphabet[rng() % alphabet.size()];
        }
        for (auto& x : b)
        {
            x = alphabet[rng() % alphabet.size()];
        }
        const auto d = oracle::edit_distance(a, b);
        REQUIRE(levenshtein(a, b) == d);
        const auto longest = std::max(a.size(), b.size());
        const double expected = longest == 0 ? 100.0 : 100.0 * (1.0 - static_cast<double>(d) / longest);
        REQUIRE(edit_score(a, b) == expected);
    }
}
