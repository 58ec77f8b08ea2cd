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

#include "courtside/stat_line.hpp"

namespace courtside {

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) noexcept
{
    if (den == 0)
    {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

PlayerStatLine& PlayerStatLine::operator+=(const PlayerStatLine& rhs) noexcept
{
    for (const auto& field : kStatFields)
    {
        this->*field.member += rhs.*field.member;
    }
    return *this;
}

std::optional<double> PlayerStatLine::first_serve_pct() const noexcept
{
    return ratio(first_serves_in, serve_points);
}

std::optional<double> PlayerStatLine::serve_points_won_pct() const noexcept
{
    return ratio(serve_points_won, serve_points);
}

std::optional<double> PlayerStatLine::return_points_won_pct() const noexcept
{
    return ratio(return_points_won, return_points);
}

std::string_view PlayerStatLine::bound_violation() const noexcept
{
    for (const auto& field : kStatFields)
    {
        if (this->*field.member < 0)
        {
            return field.name;
        }
    }
    if (first_serves_in > serve_points)
    {
        return "first_serves_in > serve_points";
    }
    if (serve_points_won > serve_points)
    {
        return "serve_points_won > serve_points";
    }
    if (return_points_won > return_points)
    {
        return "return_points_won > return_points";
    }
    if (break_points_saved > break_points_faced)
    {
        return "break_points_saved > break_points_faced";
    }
    return {};
}

}  // namespace courtside
