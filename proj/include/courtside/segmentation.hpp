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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace courtside::segmentation {

enum class SegmentationErrc
{
    InvalidParams,
    FlagCountMismatch,
    MalformedInput,
};

using SegmentationError = CodedError<SegmentationErrc>;

struct ImpactEvent
{
    double timestamp{0.0};
    double confidence{0.0};

    bool operator==(const ImpactEvent&) const = default;
};

struct SegmentationParams
{
    double confidence_threshold{0.5};
    double max_gap{3.0};
    int min_hits{2};
    double padding{1.0};

    /// Throws SegmentationError(InvalidParams).
    void validate() const;
};

/// Half-open [start, end) so touching neighbours stay disjoint.
struct RallyInterval
{
    double start{0.0};
    double end{0.0};
    int hit_count{0};

    bool operator==(const RallyInterval&) const = default;
};

struct ViewFlags
{
    bool broadcast_view{false};
    bool scoreboard_visible{false};
};

/// Groups confident impacts whose consecutive gaps are at most max_gap. Padding
/// that would overlap a neighbour is cut at the midpoint between the two groups.
std::vector<RallyInterval> cluster_impacts(std::span<const ImpactEvent> events, const SegmentationParams& params = {});

std::vector<RallyInterval> filter_intervals(std::span<const RallyInterval> intervals, std::span<const ViewFlags> flags);

struct LineError
{
    std::size_t line{0};
    std::string message;
};

struct ImpactStream
{
    std::vector<ImpactEvent> events;
    std::vector<LineError> errors;
};

/// JSONL of {"t": seconds, "conf": [0,1]}. Bad lines are collected, not thrown.
ImpactStream read_impacts(std::istream& in);

/// JSONL of {"broadcast_view": bool, "scoreboard_visible": bool}.
std::vector<ViewFlags> read_view_flags(std::istream& in);

/// JSONL of {"start", "end", "hits"} with millisecond precision.
void write_intervals(std::ostream& out, std::span<const RallyInterval> intervals);

std::vector<RallyInterval> read_intervals(std::istream& in);

}  // namespace courtside::segmentation
