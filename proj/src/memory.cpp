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

#include "courtside/memory.hpp"

namespace courtside::memory {

MemoryEntry make_entry(std::int64_t index, events::RallyRecord metadata, std::optional<std::string> commentary)
{
    if (metadata.clip_id.empty())
    {
        throw MemoryError(MemoryErrc::InvalidEntry, "memory entry needs a non-empty rally reference");
    }
    MemoryEntry entry;
    entry.index = index;
    entry.rally_ref = metadata.clip_id;
    entry.metadata = std::move(metadata);
    entry.commentary = std::move(commentary);
    return entry;
}

std::optional<MemoryEntry> ShortTermMemory::push(MemoryEntry entry)
{
    if (entry.index <= m_last_index)
    {
        throw MemoryError(MemoryErrc::OutOfOrderEntry, "rally " + std::to_string(entry.index) +
                                                           " pushed after rally " + std::to_string(m_last_index));
    }
    m_last_index = entry.index;
    m_entries.push_back(std::move(entry));
    if (m_entries.size() <= m_capacity)
    {
        return std::nullopt;
    }
    MemoryEntry evicted = std::move(m_entries.front());
    m_entries.pop_front();
    return evicted;
}

std::vector<MemoryEntry> ShortTermMemory::drain()
{
    std::vector<MemoryEntry> out(std::make_move_iterator(m_entries.begin()), std::make_move_iterator(m_entries.end()));
    m_entries.clear();
    return out;
}

LongTermMemory consolidate(const LongTermMemory& long_term, const MemoryEntry& evicted)
{
    if (evicted.index != long_term.rallies_consolidated + 1)
    {
        throw MemoryError(MemoryErrc::NonSequentialConsolidation,
                          "expected rally " + std::to_string(long_term.rallies_consolidated + 1) + ", got " +
                              std::to_string(evicted.index));
    }
    const auto& rally = evicted.metadata;
    const auto increments = events::classify_point(rally);

    LongTermMemory next = long_term;
    next.lines[0] += increments[0];
    next.lines[1] += increments[1];
    const PlayerId winner = rally.outcome.point_winner;
    if (match::point_closes_game(rally.initial_score, winner))
    {
        next.lines[match::index(winner)].games_won += 1;
    }
    next.rallies_consolidated += 1;
    next.last_consolidated_score = match::advance_point(rally.initial_score, winner);
    return next;
}

void MatchMemory::record(MemoryEntry entry)
{
    if (auto evicted = m_short.push(std::move(entry)))
    {
        m_long = consolidate(m_long, *evicted);
    }
}

void MatchMemory::flush()
{
    for (const auto& entry : m_short.drain())
    {
        m_long = consolidate(m_long, entry);
    }
}

DerivedRatios derive_ratios(const PlayerStatLine& line) noexcept
{
    return {line.first_serve_pct(), line.serve_points_won_pct(), line.return_points_won_pct()};
}

ContextView memory_snapshot(const ShortTermMemory& short_term, const LongTermMemory& long_term)
{
    ContextView view;
    view.recent.reserve(short_term.size());
    for (const auto& entry : short_term.entries())
    {
        view.recent.push_back({entry.index, entry.metadata, entry.commentary});
    }
    view.lines = long_term.lines;
    view.ratios = {derive_ratios(long_term.lines[0]), derive_ratios(long_term.lines[1])};
    view.rallies_consolidated = long_term.rallies_consolidated;
    return view;
}

nlohmann::ordered_json stat_line_to_json(const PlayerStatLine& line)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& field : kStatFields)
    {
        out[std::string(field.name)] = line.*field.member;
    }
    return out;
}

PlayerStatLine stat_line_from_json(const nlohmann::ordered_json& object)
{
    if (!object.is_object())
    {
        throw Error("stat line must be an object");
    }
    PlayerStatLine line;
    for (const auto& field : kStatFields)
    {
        auto it = object.find(std::string(field.name));
        if (it == object.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0)
        {
            throw Error("stat line field " + std::string(field.name) + " must be a non-negative integer");
        }
        line.*field.member = it->get<std::int64_t>();
    }
    return line;
}

namespace {

nlohmann::ordered_json ratio_json(const std::optional<double>& value)
{
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json stats_report(const LongTermMemory& long_term, const events::MatchInfo& info)
{
    nlohmann::ordered_json report;
    report["tournament"] = info.tournament;
    report["round"] = info.round;
    report["rallies_consolidated"] = long_term.rallies_consolidated;
    report["final_score"] = long_term.last_consolidated_score
                                ? nlohmann::ordered_json(match::score_summary(*long_term.last_consolidated_score))
                                : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json players = nlohmann::ordered_json::array();
    for (PlayerId id : {PlayerId::One, PlayerId::Two})
    {
        const auto& line = long_term.line(id);
        const auto ratios = derive_ratios(line);
        nlohmann::ordered_json player;
        player["id"] = std::string(match::to_string(id));
        player["name"] = info.player(id).name;
        player["stats"] = stat_line_to_json(line);
        player["ratios"] = {{"first_serve_pct", ratio_json(ratios.first_serve_pct)},
                            {"serve_points_won_pct", ratio_json(ratios.serve_points_won_pct)},
                            {"return_points_won_pct", ratio_json(ratios.return_points_won_pct)}};
        players.push_back(std::move(player));
    }
    report["players"] = std::move(players);
    return report;
}

}  // namespace courtside::memory
