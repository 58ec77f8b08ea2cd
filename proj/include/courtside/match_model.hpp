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

#include "courtside/error.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace courtside::match {

enum class PlayerId : std::uint8_t
{
    One = 0,
    Two = 1,
};

constexpr PlayerId other(PlayerId p) noexcept
{
    return p == PlayerId::One ? PlayerId::Two : PlayerId::One;
}

constexpr std::size_t index(PlayerId p) noexcept
{
    return static_cast<std::size_t>(p);
}

/// "player_1" / "player_2"
std::string_view to_string(PlayerId p) noexcept;
std::optional<PlayerId> player_id_from_string(std::string_view text) noexcept;

enum class Handedness : std::uint8_t
{
    Right,
    Left,
};

std::string_view to_string(Handedness h) noexcept;
std::optional<Handedness> handedness_from_string(std::string_view text) noexcept;

struct PlayerRef
{
    PlayerId id{PlayerId::One};
    std::string name;
    Handedness handedness{Handedness::Right};

    bool operator==(const PlayerRef&) const = default;
};

enum class MatchErrc
{
    TerminalState,
    InvalidState,
    InvalidConfig,
    MalformedSummary,
};

using MatchError = CodedError<MatchErrc>;

/// Rules for one match. Defaults follow the harmonised Grand Slam format:
/// 7-point tiebreaks at 6-6 and a 10-point tiebreak at 6-6 in the deciding set.
struct ScoringConfig
{
    int best_of{3};
    int tiebreak_trigger_games{6};
    int tiebreak_target{7};
    int final_set_tiebreak_target{10};
    bool ad_scoring{true};

    int sets_to_win() const noexcept
    {
        return best_of / 2 + 1;
    }

    /// Throws MatchError(InvalidConfig).
    void validate() const;

    auto operator<=>(const ScoringConfig&) const = default;
};

using ScorePair = std::array<int, 2>;

/// Position on the standard-game ladder 0, 15, 30, 40, AD.
enum class GamePoint : int
{
    Love = 0,
    Fifteen = 1,
    Thirty = 2,
    Forty = 3,
    Advantage = 4,
};

/// "0", "15", "30", "40" or "AD" for ladder positions 0..4.
std::string_view point_label(int ladder) noexcept;
std::optional<int> ladder_from_label(std::string_view label) noexcept;

/// Complete scoring state of a match.
///
/// `points` holds ladder positions (see GamePoint) in a standard game and raw
/// point counts while `in_tiebreak` is set. `set_games` is the per-set game
/// history when it is known; scoreboards that only show sets won leave it
/// empty while `sets_won` stays authoritative.
struct MatchScore
{
    ScorePair sets_won{0, 0};
    std::vector<ScorePair> set_games;
    ScorePair games{0, 0};
    ScorePair points{0, 0};
    PlayerId server{PlayerId::One};
    bool in_tiebreak{false};
    ScoringConfig config;

    static MatchScore fresh(const ScoringConfig& config = {}, PlayerId first_server = PlayerId::One);

    bool history_known() const noexcept
    {
        return static_cast<int>(set_games.size()) == sets_won[0] + sets_won[1];
    }

    /// True when both players are one set away from the match.
    bool in_final_set() const noexcept;

    int active_tiebreak_target() const noexcept;

    PlayerId returner() const noexcept
    {
        return other(server);
    }

    bool operator==(const MatchScore&) const = default;
};

/// Server of the tiebreak point numbered `point_number` (0-based) when
/// `first_server` served the opening point: one point, then two each.
PlayerId tiebreak_server(PlayerId first_server, int point_number) noexcept;

/// Recovers who opened the current tiebreak from the current server and the
/// number of points already played.
PlayerId tiebreak_first_server(const MatchScore& score) noexcept;

/// Applies one point. Throws MatchError(TerminalState) once the match is
/// decided and MatchError(InvalidState) on a structurally broken state.
MatchScore advance_point(const MatchScore& score, PlayerId winner);

/// True iff the returner wins the current game by winning the next point.
/// Always false inside a tiebreak.
bool is_break_point(const MatchScore& score) noexcept;

/// True iff `winner` winning the next point closes the current game (or tiebreak).
bool point_closes_game(const MatchScore& score, PlayerId winner);

std::optional<PlayerId> is_terminal(const MatchScore& score) noexcept;

/// Lists every violated invariant. Reachability of the current set and of each
/// completed set is checked against the forward closure of advance_point.
ValidityReport validate_scoreboard(const MatchScore& score);

/// Canonical rendering, e.g. "1–0 [6–4], 2–3, 30:15, server player_1".
std::string score_summary(const MatchScore& score);

/// Inverse of score_summary. Throws MatchError(MalformedSummary).
MatchScore parse_score_summary(std::string_view text, const ScoringConfig& config = {});

}  // namespace courtside::match
