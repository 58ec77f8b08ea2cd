#include "courtside/match_model.hpp"
#include "oracles/tennis_oracle.hpp"

#include <doctest.h>

#include <random>

using namespace courtside::match;

namespace {

MatchScore with_points(int a, int b, PlayerId server = PlayerId::One)
{
    MatchScore s = MatchScore::fresh({}, server);
    s.points = {a, b};
    return s;
}

}  // namespace

TEST_CASE("first point of a game goes to 15-0 and keeps the server")
{
    const auto s = MatchScore::fresh();
    const auto next = advance_point(s, PlayerId::One);
    CHECK(next.points == ScorePair{1, 0});
    CHECK(next.server == PlayerId::One);
    CHECK(next.games == ScorePair{0, 0});
}

TEST_CASE("receiver at AD wins the game")
{
    // server player_1 at 40, receiver player_2 at AD
    const auto s = with_points(3, 4);
    const auto next = advance_point(s, PlayerId::Two);
    CHECK(next.games == ScorePair{0, 1});
    CHECK(next.points == ScorePair{0, 0});
    CHECK(next.server == PlayerId::Two);
}

TEST_CASE("single-game transitions match the count oracle exhaustively")
{
    for (bool ad : {true, false})
    {
        ScoringConfig cfg;
        cfg.ad_scoring = ad;
        for (auto counts : oracle::open_game_states(ad))
        {
            for (int w = 0; w < 2; ++w)
            {
                auto [la, lb] = oracle::ladder_of(counts);
                MatchScore s = MatchScore::fresh(cfg);
                s.points = {la, lb};

                oracle::GameCounts after = counts;
                (w == 0 ? after.a : after.b) += 1;
                const int winner = oracle::game_winner(after, ad);

                const auto next = advance_point(s, w == 0 ? PlayerId::One : PlayerId::Two);
                CAPTURE(la);
                CAPTURE(lb);
                CAPTURE(w);
                if (winner == -1)
                {
                    auto [ea, eb] = oracle::ladder_of(after);
                    CHECK(next.points == ScorePair{ea, eb});
                    CHECK(next.games == ScorePair{0, 0});
                    CHECK(next.server == s.server);
                }
                else
                {
                    ScorePair games{0, 0};
                    ++games[winner];
                    CHECK(next.games == games);
                    CHECK(next.points == ScorePair{0, 0});
                    CHECK(next.server == other(s.server));
                }
            }
        }
    }
}

TEST_CASE("tiebreak needs a two-point margin")
{
    MatchScore s = MatchScore::fresh();
    s.games = {6, 6};
    s.in_tiebreak = true;
    s.points = {6, 6};
    s.server = tiebreak_server(PlayerId::One, 12);
    const auto next = advance_point(s, PlayerId::One);
    CHECK(next.in_tiebreak);
    CHECK(next.points == ScorePair{7, 6});
    CHECK(oracle::tiebreak_winner(7, 6, 7) == -1);

    const auto won = advance_point(next, PlayerId::One);
    CHECK_FALSE(won.in_tiebreak);
    CHECK(won.sets_won == ScorePair{1, 0});
    CHECK(won.set_games.back() == ScorePair{7, 6});
    CHECK(oracle::tiebreak_winner(8, 6, 7) == 0);
}

TEST_CASE("tiebreak rotation is one point then two each")
{
    CHECK(tiebreak_server(PlayerId::One, 0) == PlayerId::One);
    CHECK(tiebreak_server(PlayerId::One, 1) == PlayerId::Two);
    CHECK(tiebreak_server(PlayerId::One, 2) == PlayerId::Two);
    CHECK(tiebreak_server(PlayerId::One, 3) == PlayerId::One);
    CHECK(tiebreak_server(PlayerId::One, 4) == PlayerId::One);
    CHECK(tiebreak_server(PlayerId::One, 5) == PlayerId::Two);

    // Walk a tiebreak and check the server field against the rotation.
    MatchScore s = MatchScore::fresh();
    s.games = {6, 6};
    s.in_tiebreak = true;
    s.server = PlayerId::Two;
    std::mt19937 rng(7);
    int k = 0;
    while (s.in_tiebreak)
    {
        CHECK(s.server == tiebreak_server(PlayerId::Two, k));
        s = advance_point(s, rng() % 2 ? PlayerId::One : PlayerId::Two);
        ++k;
    }
    // The player who received first opens the next set.
    CHECK(s.server == PlayerId::One);
}

TEST_CASE("final set uses the long tiebreak")
{
    MatchScore s = MatchScore::fresh();
    s.sets_won = {1, 1};
    s.set_games = {{6, 3}, {4, 6}};
    s.games = {6, 6};
    s.in_tiebreak = true;
    for (int i = 0; i < 7; ++i)
    {
        s = advance_point(s, PlayerId::One);
    }
    CHECK(s.in_tiebreak);
    CHECK(s.points == ScorePair{7, 0});
    for (int i = 0; i < 3; ++i)
    {
        s = advance_point(s, PlayerId::One);
    }
    CHECK(is_terminal(s) == PlayerId::One);
    CHECK(s.set_games.back() == ScorePair{7, 6});
}

TEST_CASE("break points")
{
    CHECK(is_break_point(with_points(2, 3)));   // 30-40
    CHECK_FALSE(is_break_point(with_points(3, 3)));  // deuce
    CHECK(is_break_point(with_points(3, 4)));   // 40-AD
    CHECK_FALSE(is_break_point(with_points(3, 2)));
    CHECK_FALSE(is_break_point(with_points(4, 3)));

    ScoringConfig no_ad;
    no_ad.ad_scoring = false;
    MatchScore deciding = MatchScore::fresh(no_ad);
    deciding.points = {3, 3};
    CHECK(is_break_point(deciding));

    // Cross-check against advance_point for every ladder state.
    for (auto counts : oracle::open_game_states(true))
    {
        auto [a, b] = oracle::ladder_of(counts);
        const auto s = with_points(a, b);
        const auto next = advance_point(s, PlayerId::Two);
        CHECK(is_break_point(s) == (next.games[1] == 1));
    }
}

TEST_CASE("terminal detection")
{
    MatchScore s = MatchScore::fresh();
    CHECK_FALSE(is_terminal(s));
    s.sets_won = {2, 0};
    CHECK(is_terminal(s) == PlayerId::One);

    ScoringConfig five;
    five.best_of = 5;
    MatchScore t = MatchScore::fresh(five);
    t.sets_won = {2, 2};
    CHECK_FALSE(is_terminal(t));

    CHECK_THROWS_AS(advance_point(s, PlayerId::One), MatchError);
}

TEST_CASE("validate_scoreboard")
{
    CHECK(validate_scoreboard(MatchScore::fresh()).ok());

    auto both_ad = with_points(4, 4);
    auto report = validate_scoreboard(both_ad);
    CHECK_FALSE(report.ok());
    CHECK(report.mentions("both players at AD"));

    auto lonely_ad = with_points(4, 2);
    CHECK(validate_scoreboard(lonely_ad).mentions("AD without opponent at 40"));

    MatchScore eight_two = MatchScore::fresh();
    eight_two.games = {8, 2};
    CHECK_FALSE(validate_scoreboard(eight_two).ok());
}

TEST_CASE("game reachability agrees with the breadth-first oracle")
{
    const auto reachable = oracle::reachable_games(6);
    for (int a = 0; a <= 9; ++a)
    {
        for (int b = 0; b <= 9; ++b)
        {
            const bool open = reachable.count({a, b}) && oracle::set_winner(a, b, 6) == -1;
            MatchScore s = MatchScore::fresh();
            s.games = {a, b};
            s.in_tiebreak = a == 6 && b == 6;
            CAPTURE(a);
            CAPTURE(b);
            CHECK(validate_scoreboard(s).ok() == open);
        }
    }
}

TEST_CASE("completed sets must be legal set results")
{
    MatchScore s = MatchScore::fresh();
    s.sets_won = {1, 0};
    s.set_games = {{6, 5}};
    CHECK_FALSE(validate_scoreboard(s).ok());
    s.set_games = {{7, 5}};
    CHECK(validate_scoreboard(s).ok());
    s.set_games = {{7, 6}};
    CHECK(validate_scoreboard(s).ok());
}

TEST_CASE("long tiebreaks stay reachable")
{
    MatchScore s = MatchScore::fresh();
    s.games = {6, 6};
    s.in_tiebreak = true;
    s.points = {23, 22};
    CHECK(validate_scoreboard(s).ok());
    s.points = {23, 20};
    CHECK_FALSE(validate_scoreboard(s).ok());
}

TEST_CASE("score summary canonical form and round trip")
{
    const auto fresh = MatchScore::fresh();
    CHECK(score_summary(fresh) == "0\xE2\x80\x93" "0, 0\xE2\x80\x93" "0, 0:0, server player_1");
    CHECK(parse_score_summary(score_summary(fresh)) == fresh);

    MatchScore listing = MatchScore::fresh();
    listing.sets_won = {1, 0};
    listing.games = {2, 3};
    listing.points = {2, 1};
    CHECK(parse_score_summary(score_summary(listing)) == listing);

    CHECK_THROWS_AS(parse_score_summary("nonsense"), MatchError);
}

TEST_CASE("random walks stay valid, round-trip through the summary, and terminate")
{
    std::mt19937_64 rng(2024);
    for (int walk = 0; walk < 500; ++walk)
    {
        ScoringConfig cfg;
        cfg.best_of = walk % 2 ? 5 : 3;
        cfg.ad_scoring = walk % 7 != 0;
        MatchScore s = MatchScore::fresh(cfg, rng() % 2 ? PlayerId::One : PlayerId::Two);
        int steps = 0;
        while (!is_terminal(s))
        {
            s = advance_point(s, rng() % 2 ? PlayerId::One : PlayerId::Two);
            ++steps;
            REQUIRE(steps < 2000);
            REQUIRE(parse_score_summary(score_summary(s), cfg) == s);
        }
        REQUIRE(validate_scoreboard(s).ok());
        REQUIRE(parse_score_summary(score_summary(s), cfg) == s);
    }
}
