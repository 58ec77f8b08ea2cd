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

#pragma once

#include "courtside/court_types.hpp"
#include "courtside/error.hpp"
#include "courtside/match_model.hpp"
#include "courtside/stat_line.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace courtside::events {

using match::PlayerId;

enum class Stroke
{
    Serve,
    Forehand,
    Backhand,
};

enum class Direction
{
    CrossCourt,
    DownTheLine,
    DownTheMiddle,
    InsideOut,
    InsideIn,
    Body,
    Wide,
    T,
};

enum class ShotOutcome
{
    In,
    Winner,
    ForcedError,
    UnforcedError,
    Fault,
    Let,
    Net,
};

enum class ServeAttempt
{
    First,
    Second,
};

enum class CourtHalf
{
    Near,
    Far,
};

enum class PointReason
{
    Ace,
    DoubleFault,
    Winner,
    ForcedError,
    UnforcedError,
    ServiceWinner,
};

std::string_view to_string(Stroke v) noexcept;
std::string_view to_string(Direction v) noexcept;
std::string_view to_string(ShotOutcome v) noexcept;
std::string_view to_string(ServeAttempt v) noexcept;
std::string_view to_string(CourtHalf v) noexcept;
std::string_view to_string(PointReason v) noexcept;

std::optional<Stroke> stroke_from_string(std::string_view s) noexcept;
std::optional<Direction> direction_from_string(std::string_view s) noexcept;
std::optional<ShotOutcome> shot_outcome_from_string(std::string_view s) noexcept;
std::optional<ServeAttempt> serve_attempt_from_string(std::string_view s) noexcept;
std::optional<CourtHalf> court_half_from_string(std::string_view s) noexcept;
std::optional<PointReason> point_reason_from_string(std::string_view s) noexcept;

struct ShotEvent
{
    int index{0};
    PlayerId hitter{PlayerId::One};
    Stroke stroke{Stroke::Serve};
    /// Open vocabulary (topspin, slice, volley, ...); empty when unknown.
    std::string technique;
    std::optional<Direction> direction;
    ShotOutcome outcome{ShotOutcome::In};
    /// Seconds from clip start.
    double timestamp{0.0};
    std::optional<ServeAttempt> serve_attempt;
    /// Serve winners only: the returner got a racquet on the ball.
    bool return_touched{false};
    std::optional<geometry::PixelPoint> hitter_position;
    std::optional<geometry::PixelPoint> ball_position;

    bool operator==(const ShotEvent&) const = default;
};

struct BounceEvent
{
    double timestamp{0.0};
    CourtHalf court_half{CourtHalf::Near};
    std::optional<geometry::PixelPoint> position;

    bool operator==(const BounceEvent&) const = default;
};

struct RallyOutcome
{
    PlayerId point_winner{PlayerId::One};
    PlayerId point_loser{PlayerId::Two};
    PointReason reason{PointReason::Winner};

    bool operator==(const RallyOutcome&) const = default;
};

struct MatchInfo
{
    std::string tournament;
    std::string round;
    std::string surface;
    std::array<match::PlayerRef, 2> players{match::PlayerRef{PlayerId::One, "", match::Handedness::Right},
                                            match::PlayerRef{PlayerId::Two, "", match::Handedness::Right}};

    const match::PlayerRef& player(PlayerId id) const noexcept
    {
        return players[match::index(id)];
    }

    bool operator==(const MatchInfo&) const = default;
};

/// "matchID_start_end"; the match id may itself contain underscores.
struct ClipId
{
    std::string match_id;
    double start{0.0};
    double end{0.0};

    double duration() const noexcept
    {
        return end - start;
    }
};

std::optional<ClipId> parse_clip_id(std::string_view text);

/// One annotated rally.
struct RallyRecord
{
    std::string clip_id;
    MatchInfo match_info;
    match::MatchScore initial_score;
    std::vector<ShotEvent> shots;
    std::vector<BounceEvent> bounces;
    RallyOutcome outcome;
    std::string transcript;
    std::optional<std::string> commentary;

    bool operator==(const RallyRecord&) const = default;
};

enum class EventErrc
{
    EmptyRally,
    IncompleteRally,
    SchemaViolation,
};

using EventError = CodedError<EventErrc>;

/// Last-event dispatch. Throws EventError(IncompleteRally) when the final event
/// leaves the point open (in, let, or a first-serve fault).
RallyOutcome derive_outcome(std::span<const ShotEvent> shots);

/// Serve order, timestamp monotonicity, hitter alternation, outcome agreement,
/// clip id, bounce timing, player roster and the initial scoreboard.
ValidityReport validate_rally(const RallyRecord& rally);

/// Per-rally statistic increments, indexed by PlayerId. games_won stays zero:
/// game closure is decided from score transitions by the consolidator.
std::array<PlayerStatLine, 2> classify_point(const RallyRecord& rally);

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);

/// 100 * (1 - levenshtein / max(|predicted|, |reference|)); 100 when both are empty.
double edit_score(std::span<const std::string> predicted, std::span<const std::string> reference);

/// Class token of a shot for sequence metrics, e.g. "player_1:forehand:topspin:cross-court:in".
std::string event_class_token(const ShotEvent& shot);

// JSONL record schema: clip_id, match_info, scoreboard, audio_transcript,
// shot_sequence, commentary, outcome, and optionally bounces.

nlohmann::ordered_json rally_to_json(const RallyRecord& rally);

/// Throws EventError(SchemaViolation) naming the offending field.
RallyRecord rally_from_json(const nlohmann::ordered_json& object, const match::ScoringConfig& config = {});

nlohmann::ordered_json match_info_to_json(const MatchInfo& info);
MatchInfo match_info_from_json(const nlohmann::ordered_json& object);

nlohmann::ordered_json shot_to_json(const ShotEvent& shot);
ShotEvent shot_from_json(const nlohmann::ordered_json& object, int position);

nlohmann::ordered_json bounce_to_json(const BounceEvent& bounce);
BounceEvent bounce_from_json(const nlohmann::ordered_json& object);

/// Scoreboard object keyed by player name, e.g. {"A": [1, 2, 30], "B": [0, 3, 15], "server": "A"}.
nlohmann::ordered_json scoreboard_to_json(const match::MatchScore& score, const MatchInfo& info);
match::MatchScore scoreboard_from_json(const nlohmann::ordered_json& object,
                                       const MatchInfo& info,
                                       const match::ScoringConfig& config);

}  // namespace courtside::events
