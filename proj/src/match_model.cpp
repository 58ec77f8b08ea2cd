/*
 * SPDX-FileCopyrightText: Copyright (c) 2026, The Courtside Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "courtside/match_model.hpp"

#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

namespace courtside::match {

namespace {

constexpr std::string_view kDash = "\xE2\x80\x93";  // en dash

constexpr int kAd = static_cast<int>(GamePoint::Advantage);
constexpr int kForty = static_cast<int>(GamePoint::Forty);

}  // namespace

std::string_view to_string(PlayerId p) noexcept
{
    return p == PlayerId::One ? "player_1" : "player_2";
}

std::optional<PlayerId> player_id_from_string(std::string_view text) noexcept
{
    if (text == "player_1")
    {
        return PlayerId::One;
    }
    if (text == "player_2")
    {
        return PlayerId::Two;
    }
    return std::nullopt;
}

std::string_view to_string(Handedness h) noexcept
{
    return h == Handedness::Left ? "left" : "right";
}

std::optional<Handedness> handedness_from_string(std::string_view text) noexcept
{
    if (text == "left" || text == "L" || text == "left-handed")
    {
        return Handedness::Left;
    }
    if (text == "right" || text == "R" || text == "right-handed")
    {
        return Handedness::Right;
    }
    return std::nullopt;
}

void ScoringConfig::validate() const
{
    if (best_of != 3 && best_of != 5)
    {
        throw MatchError(MatchErrc::InvalidConfig, "best_of must be 3 or 5, got " + std::to_string(best_of));
    }
    if (tiebreak_trigger_games < 1)
    {
        throw MatchError(MatchErrc::InvalidConfig, "tiebreak trigger must be at least 1 game");
    }
    if (tiebreak_target < 1 || final_set_tiebreak_target < 1)
    {
        throw MatchError(MatchErrc::InvalidConfig, "tiebreak targets must be at least 1 point");
    }
}

std::string_view point_label(int ladder) noexcept
{
    switch (ladder)
    {
    case 0:
        return "0";
    case 1:
        return "15";
    case 2:
        return "30";
    case 3:
        return "40";
    case 4:
        return "AD";
    default:
        return "?";
    }
}

std::optional<int> ladder_from_label(std::string_view label) noexcept
{
    for (int i = 0; i <= kAd; ++i)
    {
        if (label == point_label(i))
        {
            return i;
        }
    }
    if (label == "Ad" || label == "ad" || label == "A")
    {
        return kAd;
    }
    return std::nullopt;
}

MatchScore MatchScore::fresh(const ScoringConfig& config, PlayerId first_server)
{
    config.validate();
    MatchScore score;
    score.config = config;
    score.server = first_server;
    return score;
}

bool MatchScore::in_final_set() const noexcept
{
    const int last = config.sets_to_win() - 1;
    return sets_won[0] == last && sets_won[1] == last;
}

int MatchScore::active_tiebreak_target() const noexcept
{
    return in_final_set() ? config.final_set_tiebreak_target : config.tiebreak_target;
}

PlayerId tiebreak_server(PlayerId first_server, int point_number) noexcept
{
    return ((point_number + 1) / 2) % 2 == 0 ? first_server : other(first_server);
}

PlayerId tiebreak_first_server(const MatchScore& score) noexcept
{
    const int played = score.points[0] + score.points[1];
    return ((played + 1) / 2) % 2 == 0 ? score.server : other(score.server);
}

std::optional<PlayerId> is_terminal(const MatchScore& score) noexcept
{
    const int need = score.config.sets_to_win();
    if (score.sets_won[0] >= need)
    {
        return PlayerId::One;
    }
    if (score.sets_won[1] >= need)
    {
        return PlayerId::Two;
    }
    return std::nullopt;
}

namespace {

/// Invariants that can be checked locally, without the reachability closure.
void check_structure(const MatchScore& s, ValidityReport& report)
{
    const auto& cfg = s.config;
    const int trigger = cfg.tiebreak_trigger_games;

    for (int i = 0; i < 2; ++i)
    {
        if (s.sets_won[i] < 0 || s.games[i] < 0 || s.points[i] < 0)
        {
            report.add("negative score component");
            return;
        }
    }
    if (s.sets_won[0] > cfg.sets_to_win() || s.sets_won[1] > cfg.sets_to_win())
    {
        report.add("sets won exceed the match length");
    }
    if (s.sets_won[0] >= cfg.sets_to_win() && s.sets_won[1] >= cfg.sets_to_win())
    {
        report.add("both players hold the winning number of sets");
    }
    if (s.games[0] > trigger + 1 || s.games[1] > trigger + 1)
    {
        report.add("games exceed tiebreak trigger + 1");
    }
    const bool at_trigger = s.games[0] == trigger && s.games[1] == trigger;
    if (s.in_tiebreak != at_trigger)
    {
        report.add(s.in_tiebreak ? "tiebreak flag set outside trigger-trigger games"
                                 : "games at trigger-trigger without tiebreak flag");
    }
    if (!s.in_tiebreak)
    {
        if (s.points[0] > kAd || s.points[1] > kAd)
        {
            report.add("point value outside 0/15/30/40/AD");
        }
        else if (s.points[0] == kAd && s.points[1] == kAd)
        {
            report.add("both players at AD");
        }
        else
        {
            for (int i = 0; i < 2; ++i)
            {
                if (s.points[i] == kAd)
                {
                    if (!cfg.ad_scoring)
                    {
                        report.add("AD under no-ad scoring");
                    }
                    if (s.points[1 - i] != kForty)
                    {
                        report.add("AD without opponent at 40");
                    }
                }
            }
        }
    }
    if (!s.set_games.empty() && !s.history_known())
    {
        report.add("set history length disagrees with sets won");
    }
    if (s.history_known() && !s.set_games.empty())
    {
        ScorePair tally{0, 0};
        for (const auto& set : s.set_games)
        {
            if (set[0] > set[1])
            {
                ++tally[0];
            }
            else if (set[1] > set[0])
            {
                ++tally[1];
            }
        }
        if (tally != s.sets_won)
        {
            report.add("set history winners disagree with sets won");
        }
    }
    if (is_terminal(s) && (s.games != ScorePair{0, 0} || s.points != ScorePair{0, 0} || s.in_tiebreak))
    {
        report.add("play recorded after the match was decided");
    }
}

struct SetClosure
{
    /// (games_a, games_b, points_a, points_b, in_tiebreak), tiebreak points normalised.
    std::set<std::tuple<int, int, int, int, bool>> live;
    std::set<ScorePair> closing;
};

ScorePair normalise_tiebreak_points(ScorePair points, int target)
{
    const int floor = target - 1;
    if (points[0] >= floor && points[1] >= floor)
    {
        const int shift = std::min(points[0], points[1]) - floor;
        points[0] -= shift;
        points[1] -= shift;
    }
    return points;
}

SetClosure build_closure(const ScoringConfig& config, bool final_set)
{
    MatchScore start = MatchScore::fresh(config);
    if (final_set)
    {
        const int last = config.sets_to_win() - 1;
        start.sets_won = {last, last};
    }
    const int target = start.active_tiebreak_target();

    SetClosure closure;
    std::vector<MatchScore> frontier{start};
    closure.live.insert({0, 0, 0, 0, false});
    while (!frontier.empty())
    {
        const MatchScore state = frontier.back();
        frontier.pop_back();
        for (PlayerId winner : {PlayerId::One, PlayerId::Two})
        {
            MatchScore next = advance_point(state, winner);
            if (next.sets_won != state.sets_won)
            {
                ScorePair closing = state.games;
                ++closing[index(winner)];
                closure.closing.insert(closing);
                continue;
            }
            if (next.in_tiebreak)
            {
                next.points = normalise_tiebreak_points(next.points, target);
            }
            auto key = std::make_tuple(next.games[0], next.games[1], next.points[0], next.points[1], next.in_tiebreak);
            if (closure.live.insert(key).second)
            {
                frontier.push_back(next);
            }
        }
    }
    return closure;
}

const SetClosure& closure_for(const ScoringConfig& config, bool final_set)
{
    static std::mutex mutex;
    static std::map<std::pair<ScoringConfig, bool>, SetClosure> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(config, final_set);
    auto it = cache.find(key);
    if (it == cache.end())
    {
        it = cache.emplace(key, build_closure(config, final_set)).first;
    }
    return it->second;
}

}  // namespace

ValidityReport validate_scoreboard(const MatchScore& score)
{
    ValidityReport report;
    try
    {
        score.config.validate();
    }
    catch (const MatchError& e)
    {
        report.add(e.what());
        return report;
    }
    check_structure(score, report);
    if (!report.ok())
    {
        return report;
    }

    const auto& regular = closure_for(score.config, false);
    for (std::size_t i = 0; i < score.set_games.size(); ++i)
    {
        const auto& set = score.set_games[i];
        const bool closes_regular = regular.closing.count(set) > 0;
        const bool closes_final = closure_for(score.config, true).closing.count(set) > 0;
        if (!closes_regular && !closes_final)
        {
            report.add("completed set " + std::to_string(i + 1) + " (" + std::to_string(set[0]) + "-" +
                       std::to_string(set[1]) + ") is not a reachable set result");
        }
    }
    if (score.history_known() && !score.set_games.empty())
    {
        ScorePair tally{0, 0};
        for (std::size_t i = 0; i < score.set_games.size(); ++i)
        {
            if (i > 0 && (tally[0] >= score.config.sets_to_win() || tally[1] >= score.config.sets_to_win()))
            {
                report.add("set played after the match was decided");
                break;
            }
            const auto& set = score.set_games[i];
            ++tally[set[0] > set[1] ? 0 : 1];
        }
    }

    if (!is_terminal(score))
    {
        const auto& current = closure_for(score.config, score.in_final_set());
        ScorePair points = score.points;
        if (score.in_tiebreak)
        {
            points = normalise_tiebreak_points(points, score.active_tiebreak_target());
        }
        auto key = std::make_tuple(score.games[0], score.games[1], points[0], points[1], score.in_tiebreak);
        if (current.live.count(key) == 0)
        {
            report.add("current set state " + std::to_string(score.games[0]) + "-" + std::to_string(score.games[1]) +
                       " is unreachable from 0-0 under this config");
        }
    }
    return report;
}

bool point_closes_game(const MatchScore& score, PlayerId winner)
{
    const int w = score.points[index(winner)];
    const int l = score.points[index(other(winner))];
    if (score.in_tiebreak)
    {
        return w + 1 >= score.active_tiebreak_target() && w + 1 - l >= 2;
    }
    if (w == kAd)
    {
        return true;
    }
    if (w == kForty)
    {
        return l < kForty || (l == kForty && !score.config.ad_scoring);
    }
    return false;
}

bool is_break_point(const MatchScore& score) noexcept
{
    if (score.in_tiebreak || is_terminal(score))
    {
        return false;
    }
    return point_closes_game(score, score.returner());
}

namespace {

void close_set(MatchScore& s, PlayerId winner)
{
    if (s.history_known())
    {
        s.set_games.push_back(s.games);
    }
    ++s.sets_won[index(winner)];
    s.games = {0, 0};
    s.points = {0, 0};
    s.in_tiebreak = false;
}

}  // namespace

MatchScore advance_point(const MatchScore& score, PlayerId winner)
{
    if (is_terminal(score))
    {
        throw MatchError(MatchErrc::TerminalState, "match already decided: " + score_summary(score));
    }
    ValidityReport structure;
    check_structure(score, structure);
    if (!structure.ok())
    {
        throw MatchError(MatchErrc::InvalidState, structure.violations.front());
    }

    MatchScore next = score;
    const std::size_t w = index(winner);
    const std::size_t l = index(other(winner));
    const int trigger = score.config.tiebreak_trigger_games;

    if (score.in_tiebreak)
    {
        const PlayerId first = tiebreak_first_server(score);
        const int played = score.points[0] + score.points[1];
        ++next.points[w];
        if (next.points[w] >= score.active_tiebreak_target() && next.points[w] - next.points[l] >= 2)
        {
            ++next.games[w];
            close_set(next, winner);
            next.server = other(first);
        }
        else
        {
            next.server = tiebreak_server(first, played + 1);
        }
        return next;
    }

    if (!point_closes_game(score, winner))
    {
        if (next.points[l] == kAd)
        {
            next.points[l] = kForty;
        }
        else if (next.points[w] == kForty)
        {
            next.points[w] = kAd;
        }
        else
        {
            ++next.points[w];
        }
        return next;
    }

    next.points = {0, 0};
    ++next.games[w];
    next.server = other(score.server);
    if (next.games[w] >= trigger && next.games[w] - next.games[l] >= 2)
    {
        close_set(next, winner);
    }
    else if (next.games[0] == trigger && next.games[1] == trigger)
    {
        next.in_tiebreak = true;
    }
    return next;
}

namespace {

std::string pair_text(const ScorePair& p)
{
    std::string out = std::to_string(p[0]);
    out += kDash;
    out += std::to_string(p[1]);
    return out;
}

std::string points_text(const MatchScore& s)
{
    if (s.in_tiebreak)
    {
        return std::to_string(s.points[0]) + ":" + std::to_string(s.points[1]) + " tiebreak";
    }
    return std::string(point_label(s.points[0])) + ":" + std::string(point_label(s.points[1]));
}

}  // namespace

std::string score_summary(const MatchScore& score)
{
    std::string out = pair_text(score.sets_won);
    if (!score.set_games.empty())
    {
        out += " [";
        for (std::size_t i = 0; i < score.set_games.size(); ++i)
        {
            if (i > 0)
            {
                out += ' ';
            }
            out += pair_text(score.set_games[i]);
        }
        out += ']';
    }
    out += ", ";
    out += pair_text(score.games);
    out += ", ";
    out += points_text(score);
    out += ", server ";
    out += to_string(score.server);
    return out;
}

MatchScore parse_score_summary(std::string_view text, const ScoringConfig& config)
{
    // sets [history], games, points[ tiebreak], server player_N
    static const std::regex pattern(
        "^(\\d+)\xE2\x80\x93(\\d+)(?: \\[([0-9\xE2\x80\x93 ]+)\\])?, (\\d+)\xE2\x80\x93(\\d+), "
        "(0|15|30|40|AD|\\d+):(0|15|30|40|AD|\\d+)( tiebreak)?, server (player_1|player_2)$");
    const std::string input(text);
    std::smatch m;
    if (!std::regex_match(input, m, pattern))
    {
        throw MatchError(MatchErrc::MalformedSummary, "unrecognised score summary: " + input);
    }
    MatchScore score;
    score.config = config;
    score.sets_won = {std::stoi(m[1]), std::stoi(m[2])};
    if (m[3].matched)
    {
        static const std::regex set_pattern("(\\d+)\xE2\x80\x93(\\d+)");
        const std::string history = m[3];
        for (auto it = std::sregex_iterator(history.begin(), history.end(), set_pattern); it != std::sregex_iterator();
             ++it)
        {
            score.set_games.push_back({std::stoi((*it)[1]), std::stoi((*it)[2])});
        }
    }
    score.games = {std::stoi(m[4]), std::stoi(m[5])};
    score.in_tiebreak = m[8].matched;
    for (int i = 0; i < 2; ++i)
    {
        const std::string token = m[6 + i];
        if (score.in_tiebreak)
        {
            if (token == "AD")
            {
                throw MatchError(MatchErrc::MalformedSummary, "AD inside a tiebreak: " + input);
            }
            score.points[i] = std::stoi(token);
        }
        else
        {
            auto ladder = ladder_from_label(token);
            if (!ladder)
            {
                throw MatchError(MatchErrc::MalformedSummary, "bad point value '" + token + "' in: " + input);
            }
            score.points[i] = *ladder;
        }
    }
    score.server = *player_id_from_string(std::string(m[9]));
    return score;
}

}  // namespace courtside::match
