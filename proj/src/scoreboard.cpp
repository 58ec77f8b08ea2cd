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

#include "courtside/scoreboard.hpp"

#include <algorithm>
#include <cctype>

namespace courtside::match {

namespace {

std::string trim(std::string text)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    text.erase(text.begin(), std::find_if(text.begin(), text.end(), not_space));
    text.erase(std::find_if(text.rbegin(), text.rend(), not_space).base(), text.end());
    return text;
}

std::string normalise_token(std::string text)
{
    text = trim(std::move(text));
    std::string upper = text;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "AD" || upper == "A")
    {
        return "AD";
    }
    return text;
}

bool is_digits(const std::string& text)
{
    return !text.empty() && text.size() <= 4 &&
           std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); });
}

int games_value(const std::string& token, const std::string& where)
{
    if (!is_digits(token))
    {
        throw ScoreboardError(ScoreboardErrc::IllegalToken, "illegal token '" + token + "' in " + where);
    }
    return std::stoi(token);
}

}  // namespace

std::string_view to_string(Layout layout) noexcept
{
    switch (layout)
    {
    case Layout::AoUso:
        return "AO_USO";
    case Layout::RolandGarros:
        return "RG";
    case Layout::Wimbledon:
        return "WIMBLEDON";
    }
    return "?";
}

std::optional<Layout> layout_from_string(std::string_view text) noexcept
{
    if (text == "AO_USO" || text == "AO" || text == "USO")
    {
        return Layout::AoUso;
    }
    if (text == "RG")
    {
        return Layout::RolandGarros;
    }
    if (text == "WIMBLEDON")
    {
        return Layout::Wimbledon;
    }
    return std::nullopt;
}

MatchScore parse_scoreboard(const RawScoreboard& raw, const ScoringConfig& config)
{
    config.validate();
    if (raw.layout != Layout::AoUso && raw.layout != Layout::RolandGarros && raw.layout != Layout::Wimbledon)
    {
        throw ScoreboardError(ScoreboardErrc::UnknownLayout, "unknown scoreboard layout");
    }
    if (raw.rows[0].serving == raw.rows[1].serving)
    {
        throw ScoreboardError(ScoreboardErrc::AmbiguousServer,
                              raw.rows[0].serving ? "server marker on both rows" : "server marker on neither row");
    }

    std::array<std::vector<std::string>, 2> cols;
    for (int i = 0; i < 2; ++i)
    {
        for (const auto& cell : raw.rows[i].columns)
        {
            cols[i].push_back(normalise_token(cell));
        }
    }

    // A blank cell opposite an "AD" may be dropped entirely by the extractor.
    for (int i = 0; i < 2; ++i)
    {
        auto& longer = cols[i];
        auto& shorter = cols[1 - i];
        if (longer.size() == shorter.size() + 1 && longer.back() == "AD")
        {
            shorter.emplace_back();
        }
    }
    if (cols[0].size() != cols[1].size())
    {
        throw ScoreboardError(ScoreboardErrc::RowLengthMismatch,
                              "rows have " + std::to_string(cols[0].size()) + " and " +
                                  std::to_string(cols[1].size()) + " columns");
    }

    if (raw.layout == Layout::Wimbledon)
    {
        const auto n = cols[0].size();
        if (n == 2)
        {
            cols[0].emplace_back("0");
            cols[1].emplace_back("0");
        }
        else if (n == 3 && cols[0].back().empty() && cols[1].back().empty())
        {
            cols[0].back() = "0";
            cols[1].back() = "0";
        }
        else if (n != 3)
        {
            throw ScoreboardError(ScoreboardErrc::RowLengthMismatch,
                                  "Wimbledon rows need 2 or 3 columns, got " + std::to_string(n));
        }
    }
    else if (cols[0].size() < 2)
    {
        throw ScoreboardError(ScoreboardErrc::RowLengthMismatch, "scoreboard needs at least games and points columns");
    }

    // "AD" on one row leaves the other row's points cell empty: it reads 40.
    for (int i = 0; i < 2; ++i)
    {
        if (cols[i].back() == "AD" && cols[1 - i].back().empty())
        {
            cols[1 - i].back() = "40";
        }
    }

    const std::size_t n = cols[0].size();
    MatchScore score;
    score.config = config;
    score.server = raw.rows[0].serving ? PlayerId::One : PlayerId::Two;

    if (raw.layout == Layout::Wimbledon)
    {
        for (int i = 0; i < 2; ++i)
        {
            score.sets_won[i] = games_value(cols[i][0], raw.rows[i].name + " sets column");
        }
    }
    else
    {
        for (std::size_t c = 0; c + 2 < n; ++c)
        {
            ScorePair set{games_value(cols[0][c], "set column " + std::to_string(c + 1)),
                          games_value(cols[1][c], "set column " + std::to_string(c + 1))};
            score.set_games.push_back(set);
            if (set[0] != set[1])
            {
                ++score.sets_won[set[0] > set[1] ? 0 : 1];
            }
        }
    }
    for (int i = 0; i < 2; ++i)
    {
        score.games[i] = games_value(cols[i][n - 2], raw.rows[i].name + " games column");
    }

    const int trigger = config.tiebreak_trigger_games;
    score.in_tiebreak = score.games[0] == trigger && score.games[1] == trigger;
    for (int i = 0; i < 2; ++i)
    {
        const std::string& token = cols[i][n - 1];
        if (score.in_tiebreak)
        {
            score.points[i] = games_value(token, raw.rows[i].name + " tiebreak points");
            continue;
        }
        auto ladder = ladder_from_label(token);
        if (!ladder)
        {
            throw ScoreboardError(ScoreboardErrc::IllegalToken,
                                  "illegal point value '" + token + "' for " + raw.rows[i].name);
        }
        score.points[i] = *ladder;
    }
    return score;
}

std::array<std::vector<std::string>, 2> scoreboard_columns(const MatchScore& score, Layout layout)
{
    std::array<std::vector<std::string>, 2> out;
    for (int i = 0; i < 2; ++i)
    {
        auto& row = out[i];
        if (layout == Layout::Wimbledon)
        {
            row.push_back(std::to_string(score.sets_won[i]));
        }
        else
        {
            for (const auto& set : score.set_games)
            {
                row.push_back(std::to_string(set[i]));
            }
        }
        row.push_back(std::to_string(score.games[i]));
        row.push_back(score.in_tiebreak ? std::to_string(score.points[i]) : std::string(point_label(score.points[i])));
    }
    return out;
}

RawScoreboard raw_scoreboard_from_json(const nlohmann::ordered_json& object, Layout layout)
{
    if (!object.is_object())
    {
        throw ScoreboardError(ScoreboardErrc::IllegalToken, "scoreboard must be a JSON object");
    }
    RawScoreboard raw;
    raw.layout = layout;
    if (auto it = object.find("layout"); it != object.end())
    {
        auto parsed = it->is_string() ? layout_from_string(it->get<std::string>()) : std::nullopt;
        if (!parsed)
        {
            throw ScoreboardError(ScoreboardErrc::UnknownLayout, "unknown layout " + it->dump());
        }
        raw.layout = *parsed;
    }

    int row = 0;
    for (const auto& [key, value] : object.items())
    {
        if (key == "server" || key == "layout")
        {
            continue;
        }
        if (row == 2)
        {
            throw ScoreboardError(ScoreboardErrc::RowLengthMismatch, "scoreboard has more than two player rows");
        }
        if (!value.is_array())
        {
            throw ScoreboardError(ScoreboardErrc::IllegalToken, "row for " + key + " is not a list");
        }
        raw.rows[row].name = key;
        for (const auto& cell : value)
        {
            if (cell.is_string())
            {
                raw.rows[row].columns.push_back(cell.get<std::string>());
            }
            else if (cell.is_number_integer())
            {
                raw.rows[row].columns.push_back(std::to_string(cell.get<long long>()));
            }
            else if (cell.is_null())
            {
                raw.rows[row].columns.emplace_back();
            }
            else
            {
                throw ScoreboardError(ScoreboardErrc::IllegalToken, "illegal cell " + cell.dump() + " for " + key);
            }
        }
        ++row;
    }
    if (row != 2)
    {
        throw ScoreboardError(ScoreboardErrc::RowLengthMismatch, "scoreboard needs exactly two player rows");
    }

    auto server = object.find("server");
    if (server == object.end() || !server->is_string())
    {
        throw ScoreboardError(ScoreboardErrc::AmbiguousServer, "scoreboard has no server");
    }
    const auto name = server->get<std::string>();
    raw.rows[0].serving = raw.rows[0].name == name;
    raw.rows[1].serving = raw.rows[1].name == name;
    return raw;
}

nlohmann::ordered_json raw_scoreboard_to_json(const RawScoreboard& raw)
{
    nlohmann::ordered_json out;
    for (const auto& row : raw.rows)
    {
        out[row.name] = row.columns;
    }
    for (const auto& row : raw.rows)
    {
        if (row.serving)
        {
            out["server"] = row.name;
        }
    }
    return out;
}

RawScoreboard raw_scoreboard_from_marked_rows(Layout layout,
                                              const std::string& name_1,
                                              std::vector<std::string> marked_1,
                                              const std::string& name_2,
                                              std::vector<std::string> marked_2)
{
    auto is_marker = [layout](const std::string& cell) {
        const auto token = trim(cell);
        switch (layout)
        {
        case Layout::AoUso:
            return token == "icon" || token == "*";
        case Layout::RolandGarros:
            return token == "/" || token == "//";
        case Layout::Wimbledon:
            return token == "<";
        }
        return false;
    };

    RawScoreboard raw;
    raw.layout = layout;
    const std::array<const std::string*, 2> names{&name_1, &name_2};
    std::array<std::vector<std::string>*, 2> cells{&marked_1, &marked_2};
    for (int i = 0; i < 2; ++i)
    {
        auto& row = *cells[i];
        if (row.empty())
        {
            throw ScoreboardError(ScoreboardErrc::RowLengthMismatch, "row for " + *names[i] + " has no marker cell");
        }
        const std::string marker = row.front();
        if (!trim(marker).empty() && !is_marker(marker))
        {
            throw ScoreboardError(ScoreboardErrc::IllegalToken,
                                  "'" + marker + "' is not a server marker for " + std::string(to_string(layout)));
        }
        raw.rows[i].name = *names[i];
        raw.rows[i].serving = is_marker(marker);
        raw.rows[i].columns.assign(row.begin() + 1, row.end());
    }
    return raw;
}

}  // namespace courtside::match
