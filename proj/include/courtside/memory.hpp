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
#include "courtside/event_stream.hpp"
#include "courtside/match_model.hpp"
#include "courtside/stat_line.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace courtside::memory {

using match::PlayerId;

enum class MemoryErrc
{
    OutOfOrderEntry,
    NonSequentialConsolidation,
    InvalidEntry,
};

using MemoryError = CodedError<MemoryErrc>;

/// One processed rally. `index` is the 1-based position in the match stream;
/// `commentary` stays empty when generation failed for this rally.
struct MemoryEntry
{
    std::int64_t index{0};
    std::string rally_ref;
    events::RallyRecord metadata;
    std::optional<std::string> commentary;
};

/// rally_ref is taken from the clip id; throws MemoryError(InvalidEntry) when it is empty.
MemoryEntry make_entry(std::int64_t index, events::RallyRecord metadata, std::optional<std::string> commentary);

inline constexpr std::size_t kDefaultCapacity = 4;

/// Capacity-K FIFO of the most recent rallies, oldest first.
class ShortTermMemory
{
  public:
    explicit ShortTermMemory(std::size_t capacity = kDefaultCapacity) : m_capacity(capacity)
    {
    }

    /// Appends `entry`; returns the evicted oldest entry once the window overflows.
    /// Throws MemoryError(OutOfOrderEntry) unless entry.index exceeds every stored
    /// index and every index pushed before.
    std::optional<MemoryEntry> push(MemoryEntry entry);

    /// Removes and returns all entries, oldest first.
    std::vector<MemoryEntry> drain();

    std::size_t capacity() const noexcept
    {
        return m_capacity;
    }
    std::size_t size() const noexcept
    {
        return m_entries.size();
    }
    bool empty() const noexcept
    {
        return m_entries.empty();
    }
    const std::deque<MemoryEntry>& entries() const noexcept
    {
        return m_entries;
    }

  private:
    std::size_t m_capacity;
    std::deque<MemoryEntry> m_entries;
    std::int64_t m_last_index{0};
};

/// Consolidated per-player counters for every rally that has left the window.
struct LongTermMemory
{
    std::array<PlayerStatLine, 2> lines{};
    std::int64_t rallies_consolidated{0};
    /// Score after the most recently consolidated rally.
    std::optional<match::MatchScore> last_consolidated_score;

    const PlayerStatLine& line(PlayerId id) const noexcept
    {
        return lines[match::index(id)];
    }

    bool operator==(const LongTermMemory&) const = default;
};

/// Adds the rally's point classification and any game it closed. Pure.
/// Throws MemoryError(NonSequentialConsolidation) unless
/// evicted.index == rallies_consolidated + 1.
LongTermMemory consolidate(const LongTermMemory& long_term, const MemoryEntry& evicted);

/// Short and long memory for one match, consolidating on eviction.
class MatchMemory
{
  public:
    explicit MatchMemory(std::size_t capacity = kDefaultCapacity) : m_short(capacity)
    {
    }

    void record(MemoryEntry entry);

    /// Consolidates whatever is still in the window; used at match end.
    void flush();

    const ShortTermMemory& short_term() const noexcept
    {
        return m_short;
    }
    const LongTermMemory& long_term() const noexcept
    {
        return m_long;
    }

  private:
    ShortTermMemory m_short;
    LongTermMemory m_long;
};

struct RecentRally
{
    std::int64_t index{0};
    events::RallyRecord metadata;
    std::optional<std::string> commentary;
};

struct DerivedRatios
{
    std::optional<double> first_serve_pct;
    std::optional<double> serve_points_won_pct;
    std::optional<double> return_points_won_pct;
};

DerivedRatios derive_ratios(const PlayerStatLine& line) noexcept;

/// Read-only copy of the memory state as the prompt sees it.
struct ContextView
{
    std::vector<RecentRally> recent;
    std::array<PlayerStatLine, 2> lines{};
    std::array<DerivedRatios, 2> ratios{};
    std::int64_t rallies_consolidated{0};
};

ContextView memory_snapshot(const ShortTermMemory& short_term, const LongTermMemory& long_term);

inline ContextView memory_snapshot(const MatchMemory& memory)
{
    return memory_snapshot(memory.short_term(), memory.long_term());
}

nlohmann::ordered_json stat_line_to_json(const PlayerStatLine& line);
PlayerStatLine stat_line_from_json(const nlohmann::ordered_json& object);

/// The `stats` report: counters and ratios per player plus the consolidated count.
nlohmann::ordered_json stats_report(const LongTermMemory& long_term, const events::MatchInfo& info);

}  // namespace courtside::memory
