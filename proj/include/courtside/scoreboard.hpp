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

#include "courtside/match_model.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace courtside::match {

/// Broadcast scoreboard families with distinct column conventions.
enum class Layout
{
    AoUso,         ///< name, serve icon, set games..., current games, points
    RolandGarros,  ///< serve slash, name, set games..., current games, points
    Wimbledon,     ///< name, serve triangle, sets won, games, [points]
};

std::string_view to_string(Layout layout) noexcept;
std::optional<Layout> layout_from_string(std::string_view text) noexcept;

enum class ScoreboardErrc
{
    UnknownLayout,
    RowLengthMismatch,
    IllegalToken,
    AmbiguousServer,
};

using ScoreboardError = CodedError<ScoreboardErrc>;

struct ScoreboardRow
{
    std::string name;
    std::vector<std::string> columns;
    bool serving{false};

    bool operator==(const ScoreboardRow&) const = default;
};

/// Column structure already extracted from a scoreboard crop. Row 0 is player_1.
struct RawScoreboard
{
    Layout layout{Layout::AoUso};
    std::array<ScoreboardRow, 2> rows;

    bool operator==(const RawScoreboard&) const = default;
};

/// Interprets the columns left to right as completed sets, current-set games
/// and points, applying the AD/"40" fill and the Wimbledon hidden-points rule.
MatchScore parse_scoreboard(const RawScoreboard& raw, const ScoringConfig& config = {});

/// Renders a score back into the column lists the layout would print, e.g.
/// {"6","1","1","40"} / {"4","6","2","AD"} for AO/USO.
std::array<std::vector<std::string>, 2> scoreboard_columns(const MatchScore& score, Layout layout);

/// Reads the extraction JSON format { "NAME_1": [...], "NAME_2": [...], "server": "NAME" }.
/// Row order follows key order. Values may be strings or integers. An optional
/// "layout" key overrides `layout`.
RawScoreboard raw_scoreboard_from_json(const nlohmann::ordered_json& object, Layout layout);

nlohmann::ordered_json raw_scoreboard_to_json(const RawScoreboard& raw);

/// Builds a RawScoreboard from rows that still carry the layout's marker
/// column ("icon" for AO/USO, "/" or "//" for RG, "<" for Wimbledon) as
/// their first cell. The marker cell is stripped and turned into `serving`.
RawScoreboard raw_scoreboard_from_marked_rows(Layout layout,
                                              const std::string& name_1,
                                              std::vector<std::string> marked_1,
                                              const std::string& name_2,
                                              std::vector<std::string> marked_2);

}  // namespace courtside::match
