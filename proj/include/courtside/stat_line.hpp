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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace courtside {

/// Cumulative broadcast statistics for one player. All counters are plain
/// integers; ratios are derived on demand and never stored.
struct PlayerStatLine
{
    std::int64_t aces{0};
    std::int64_t double_faults{0};
    std::int64_t first_serves_in{0};
    std::int64_t serve_points{0};
    std::int64_t serve_points_won{0};
    std::int64_t return_points{0};
    std::int64_t return_points_won{0};
    std::int64_t winners{0};
    std::int64_t unforced_errors{0};
    std::int64_t forced_errors_conceded{0};
    std::int64_t break_points_faced{0};
    std::int64_t break_points_saved{0};
    std::int64_t break_points_converted{0};
    std::int64_t points_won{0};
    std::int64_t games_won{0};
    std::int64_t total_shots{0};

    PlayerStatLine& operator+=(const PlayerStatLine& rhs) noexcept;
    bool operator==(const PlayerStatLine&) const = default;

    /// first_serves_in / serve_points; absent when no serve points were played.
    std::optional<double> first_serve_pct() const noexcept;
    std::optional<double> serve_points_won_pct() const noexcept;
    std::optional<double> return_points_won_pct() const noexcept;

    /// Names the first violated bound invariant, or empty.
    std::string_view bound_violation() const noexcept;
};

struct StatField
{
    std::string_view name;
    std::int64_t PlayerStatLine::*member;
};

/// Field table in report order; the single source for JSON reports and prompt tables.
inline constexpr std::array<StatField, 16> kStatFields{{
    {"aces", &PlayerStatLine::aces},
    {"double_faults", &PlayerStatLine::double_faults},
    {"first_serves_in", &PlayerStatLine::first_serves_in},
    {"serve_points", &PlayerStatLine::serve_points},
    {"serve_points_won", &PlayerStatLine::serve_points_won},
    {"return_points", &PlayerStatLine::return_points},
    {"return_points_won", &PlayerStatLine::return_points_won},
    {"winners", &PlayerStatLine::winners},
    {"unforced_errors", &PlayerStatLine::unforced_errors},
    {"forced_errors_conceded", &PlayerStatLine::forced_errors_conceded},
    {"break_points_faced", &PlayerStatLine::break_points_faced},
    {"break_points_saved", &PlayerStatLine::break_points_saved},
    {"break_points_converted", &PlayerStatLine::break_points_converted},
    {"points_won", &PlayerStatLine::points_won},
    {"games_won", &PlayerStatLine::games_won},
    {"total_shots", &PlayerStatLine::total_shots},
}};

}  // namespace courtside
