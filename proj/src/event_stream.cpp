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

#include "courtside/event_stream.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace courtside::events {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Stroke, 3> kStrokes{{
    {Stroke::Serve, "serve"},
    {Stroke::Forehand, "forehand"},
    {Stroke::Backhand, "backhand"},
}};

constexpr NameTable<Direction, 8> kDirections{{
    {Direction::CrossCourt, "cross-court"},
    {Direction::DownTheLine, "down-the-line"},
    {Direction::DownTheMiddle, "down-the-middle"},
    {Direction::InsideOut, "inside-out"},
    {Direction::InsideIn, "inside-in"},
    {Direction::Body, "body"},
    {Direction::Wide, "wide"},
    {Direction::T, "T"},
}};

constexpr NameTable<ShotOutcome, 7> kShotOutcomes{{
    {ShotOutcome::In, "in"},
    {ShotOutcome::Winner, "winner"},
    {ShotOutcome::ForcedError, "forced_error"},
    {ShotOutcome::UnforcedError, "unforced_error"},
    {ShotOutcome::Fault, "fault"},
    {ShotOutcome::Let, "let"},
    {ShotOutcome::Net, "net"},
}};

constexpr NameTable<ServeAttempt, 2> kAttempts{{
    {ServeAttempt::First, "first"},
    {ServeAttempt::Second, "second"},
}};

constexpr NameTable<CourtHalf, 2> kHalves{{
    {CourtHalf::Near, "near"},
    {CourtHalf::Far, "far"},
}};

constexpr NameTable<PointReason, 6> kReasons{{
    {PointReason::Ace, "ace"},
    {PointReason::DoubleFault, "double_fault"},
    {PointReason::Winner, "winner"},
    {PointReason::ForcedError, "forced_error"},
    {PointReason::UnforcedError, "unforced_error"},
    {PointReason::ServiceWinner, "service_winner"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) noexcept
{
    for (const auto& [v, name] : table)
    {
        if (v == value)
        {
            return name;
        }
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const NameTable<E, N>& table, std::string_view name) noexcept
{
    for (const auto& [v, n] : table)
    {
        if (n == name)
        {
            return v;
        }
    }
    return std::nullopt;
}

bool is_serve_fault(const ShotEvent& shot) noexcept
{
    return shot.stroke == Stroke::Serve && (shot.outcome == ShotOutcome::Fault || shot.outcome == ShotOutcome::Net);
}

bool ends_point(const ShotEvent& shot) noexcept
{
    switch (shot.outcome)
    {
    case ShotOutcome::In:
    case ShotOutcome::Let:
        return false;
    case ShotOutcome::Fault:
    case ShotOutcome::Net:
        if (shot.stroke == Stroke::Serve)
        {
            return shot.serve_attempt == ServeAttempt::Second;
        }
        return true;
    default:
        return true;
    }
}

}  // namespace

std::string_view to_string(Stroke v) noexcept
{
    return name_of(kStrokes, v);
}
std::string_view to_string(Direction v) noexcept
{
    return name_of(kDirections, v);
}
std::string_view to_string(ShotOutcome v) noexcept
{
    return name_of(kShotOutcomes, v);
}
std::string_view to_string(ServeAttempt v) noexcept
{
    return name_of(kAttempts, v);
}
std::string_view to_string(CourtHalf v) noexcept
{
    return name_of(kHalves, v);
}
std::string_view to_string(PointReason v) noexcept
{
    return name_of(kReasons, v);
}

std::optional<Stroke> stroke_from_string(std::string_view s) noexcept
{
    return value_of(kStrokes, s);
}
std::optional<Direction> direction_from_string(std::string_view s) noexcept
{
    return value_of(kDirections, s);
}
std::optional<ShotOutcome> shot_outcome_from_string(std::string_view s) noexcept
{
    return value_of(kShotOutcomes, s);
}
std::optional<ServeAttempt> serve_attempt_from_string(std::string_view s) noexcept
{
    return value_of(kAttempts, s);
}
std::optional<CourtHalf> court_half_from_string(std::string_view s) noexcept
{
    return value_of(kHalves, s);
}
std::optional<PointReason> point_reason_from_string(std::string_view s) noexcept
{
    return value_of(kReasons, s);
}

std::optional<ClipId> parse_clip_id(std::string_view text)
{
    const auto last = text.rfind('_');
    if (last == std::string_view::npos || last == 0)
    {
        return std::nullopt;
    }
    const auto middle = text.rfind('_', last - 1);
    if (middle == std::string_view::npos || middle == 0)
    {
        return std::nullopt;
    }
    auto number = [](std::string_view s) -> std::optional<double> {
        if (s.empty())
        {
            return std::nullopt;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
        {
            return std::nullopt;
        }
        return value;
    };
    auto start = number(text.substr(middle + 1, last - middle - 1));
    auto end = number(text.substr(last + 1));
    if (!start || !end)
    {
        return std::nullopt;
    }
    return ClipId{std::string(text.substr(0, middle)), *start, *end};
}

RallyOutcome derive_outcome(std::span<const ShotEvent> shots)
{
    if (shots.empty())
    {
        throw EventError(EventErrc::EmptyRally, "rally has no events");
    }
    const ShotEvent& last = shots.back();
    const PlayerId hitter = last.hitter;
    const PlayerId opponent = match::other(hitter);
    auto lost_by_hitter = [&](PointReason reason) { return RallyOutcome{opponent, hitter, reason}; };

    switch (last.outcome)
    {
    case ShotOutcome::Winner:
        if (last.stroke == Stroke::Serve)
        {
            return {hitter, opponent, last.return_touched ? PointReason::ServiceWinner : PointReason::Ace};
        }
        return {hitter, opponent, PointReason::Winner};
    case ShotOutcome::UnforcedError:
        return lost_by_hitter(PointReason::UnforcedError);
    case ShotOutcome::ForcedError:
        return lost_by_hitter(PointReason::ForcedError);
    case ShotOutcome::Net:
        if (last.stroke != Stroke::Serve)
        {
            return lost_by_hitter(PointReason::UnforcedError);
        }
        [[fallthrough]];
    case ShotOutcome::Fault:
        if (last.stroke != Stroke::Serve || last.serve_attempt == ServeAttempt::Second)
        {
            return lost_by_hitter(last.stroke == Stroke::Serve ? PointReason::DoubleFault : PointReason::UnforcedError);
        }
        throw EventError(EventErrc::IncompleteRally, "rally ends on a first-serve fault");
    case ShotOutcome::In:
    case ShotOutcome::Let:
        break;
    }
    throw EventError(EventErrc::IncompleteRally,
                     "rally ends on a shot with outcome '" + std::string(to_string(last.outcome)) + "'");
}

ValidityReport validate_rally(const RallyRecord& rally)
{
    ValidityReport report;

    const auto clip = parse_clip_id(rally.clip_id);
    if (!clip)
    {
        report.add("clip_id '" + rally.clip_id + "' is not matchID_start_end");
    }
    else if (!(clip->start < clip->end))
    {
        report.add("clip_id start must precede end");
    }

    const auto& players = rally.match_info.players;
    if (players[0].name.empty() || players[1].name.empty())
    {
        report.add("player names must be non-empty");
    }
    else if (players[0].name == players[1].name)
    {
        report.add("player names must be distinct");
    }
    if (players[0].id != PlayerId::One || players[1].id != PlayerId::Two)
    {
        report.add("player roster ids must be player_1 then player_2");
    }

    for (const auto& v : match::validate_scoreboard(rally.initial_score).violations)
    {
        report.add("scoreboard: " + v);
    }

    if (rally.shots.empty())
    {
        report.add("shot sequence is empty");
        return report;
    }

    const ShotEvent& opening = rally.shots.front();
    if (opening.stroke != Stroke::Serve)
    {
        report.add("first event must be a serve");
    }
    if (opening.hitter != rally.initial_score.server)
    {
        report.add("first serve is not hit by the scoreboard server");
    }

    const PlayerId server = opening.hitter;
    bool expecting_serve = true;
    ServeAttempt expected_attempt = ServeAttempt::First;
    PlayerId expected_hitter = server;
    bool finished = false;

    for (std::size_t i = 0; i < rally.shots.size(); ++i)
    {
        const ShotEvent& shot = rally.shots[i];
        const std::string at = "shot " + std::to_string(i) + ": ";

        if (shot.index != static_cast<int>(i))
        {
            report.add(at + "index " + std::to_string(shot.index) + " out of sequence");
        }
        if (!std::isfinite(shot.timestamp) || shot.timestamp < 0.0)
        {
            report.add(at + "timestamp must be finite and non-negative");
        }
        if (i > 0 && !(shot.timestamp > rally.shots[i - 1].timestamp))
        {
            report.add(at + "timestamps must be strictly increasing");
        }
        if ((shot.stroke == Stroke::Serve) != shot.serve_attempt.has_value())
        {
            report.add(at + "serve_attempt must be present exactly on serves");
        }
        if (shot.return_touched && !(shot.stroke == Stroke::Serve && shot.outcome == ShotOutcome::Winner))
        {
            report.add(at + "return_touched is only meaningful on serve winners");
        }
        if (shot.technique.find_first_of(" \t\n,") != std::string::npos ||
            direction_from_string(shot.technique).has_value())
        {
            report.add(at + "technique must be a single token distinct from direction names");
        }
        if (finished)
        {
            report.add(at + "event after the point ended");
            continue;
        }

        if (expecting_serve)
        {
            if (shot.stroke != Stroke::Serve)
            {
                report.add(at + "expected a serve");
            }
            if (shot.hitter != expected_hitter)
            {
                report.add(at + "serve retry by a different player");
            }
            if (shot.serve_attempt && *shot.serve_attempt != expected_attempt)
            {
                report.add(at + "serve attempt out of order");
            }
            switch (shot.outcome)
            {
            case ShotOutcome::In:
                expecting_serve = false;
                expected_hitter = match::other(server);
                break;
            case ShotOutcome::Let:
                break;
            case ShotOutcome::Fault:
            case ShotOutcome::Net:
                if (expected_attempt == ServeAttempt::First)
                {
                    expected_attempt = ServeAttempt::Second;
                }
                else
                {
                    finished = true;
                }
                break;
            case ShotOutcome::Winner:
                finished = true;
                break;
            case ShotOutcome::ForcedError:
            case ShotOutcome::UnforcedError:
                report.add(at + "serve outcome must be in, winner, fault, net or let");
                finished = true;
                break;
            }
            continue;
        }

        if (shot.stroke == Stroke::Serve)
        {
            report.add(at + "serve during an open rally");
        }
        if (shot.hitter != expected_hitter)
        {
            report.add(at + "hitter alternation broken");
        }
        expected_hitter = match::other(shot.hitter);
        if (shot.outcome == ShotOutcome::Fault || shot.outcome == ShotOutcome::Let)
        {
            report.add(at + "fault/let outcome on a rally shot");
        }
        if (ends_point(shot))
        {
            finished = true;
        }
    }

    if (!finished)
    {
        report.add("rally does not end the point");
    }
    else
    {
        try
        {
            if (derive_outcome(rally.shots) != rally.outcome)
            {
                report.add("outcome disagrees with the shot sequence");
            }
        }
        catch (const EventError& e)
        {
            report.add(e.what());
        }
    }
    if (rally.outcome.point_winner == rally.outcome.point_loser)
    {
        report.add("point winner equals point loser");
    }

    if (clip)
    {
        for (std::size_t i = 0; i < rally.bounces.size(); ++i)
        {
            const double t = rally.bounces[i].timestamp;
            if (!(t >= 0.0 && t <= clip->duration()))
            {
                report.add("bounce " + std::to_string(i) + ": timestamp outside the clip");
            }
        }
    }
    return report;
}

std::array<PlayerStatLine, 2> classify_point(const RallyRecord& rally)
{
    std::array<PlayerStatLine, 2> lines{};
    if (rally.shots.empty())
    {
        return lines;
    }
    const PlayerId server = rally.shots.front().hitter;
    const PlayerId returner = match::other(server);
    auto& srv = lines[match::index(server)];
    auto& ret = lines[match::index(returner)];

    srv.serve_points = 1;
    ret.return_points = 1;

    for (const auto& shot : rally.shots)
    {
        ++lines[match::index(shot.hitter)].total_shots;
        if (shot.stroke == Stroke::Serve && shot.serve_attempt == ServeAttempt::First &&
            shot.outcome != ShotOutcome::Let)
        {
            if (!is_serve_fault(shot))
            {
                srv.first_serves_in = 1;
            }
        }
    }

    const RallyOutcome& outcome = rally.outcome;
    auto& winner = lines[match::index(outcome.point_winner)];
    auto& loser = lines[match::index(outcome.point_loser)];
    switch (outcome.reason)
    {
    case PointReason::Ace:
        ++winner.aces;
        break;
    case PointReason::DoubleFault:
        ++loser.double_faults;
        break;
    case PointReason::Winner:
        ++winner.winners;
        break;
    case PointReason::UnforcedError:
        ++loser.unforced_errors;
        break;
    case PointReason::ForcedError:
        ++loser.forced_errors_conceded;
        break;
    case PointReason::ServiceWinner:
        break;
    }

    winner.points_won = 1;
    if (outcome.point_winner == server)
    {
        srv.serve_points_won = 1;
    }
    else
    {
        ret.return_points_won = 1;
    }

    if (match::is_break_point(rally.initial_score))
    {
        srv.break_points_faced = 1;
        if (outcome.point_winner == server)
        {
            srv.break_points_saved = 1;
        }
        else
        {
            ret.break_points_converted = 1;
        }
    }
    return lines;
}

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
    {
        row[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i)
    {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
        {
            const std::size_t above = row[j];
            const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
            diagonal = above;
        }
    }
    return row[b.size()];
}

double edit_score(std::span<const std::string> predicted, std::span<const std::string> reference)
{
    const std::size_t longest = std::max(predicted.size(), reference.size());
    if (longest == 0)
    {
        return 100.0;
    }
    const double distance = static_cast<double>(levenshtein(predicted, reference));
    return 100.0 * (1.0 - distance / static_cast<double>(longest));
}

std::string event_class_token(const ShotEvent& shot)
{
    std::string token(match::to_string(shot.hitter));
    token += ':';
    token += to_string(shot.stroke);
    token += ':';
    token += shot.technique;
    token += ':';
    token += shot.direction ? to_string(*shot.direction) : "";
    token += ':';
    token += to_string(shot.outcome);
    return token;
}

}  // namespace courtside::events
