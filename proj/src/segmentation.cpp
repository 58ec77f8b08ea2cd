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

#include "courtside/segmentation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace courtside::segmentation {

using nlohmann::json;

void SegmentationParams::validate() const
{
    if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
    {
        throw SegmentationError(SegmentationErrc::InvalidParams, "confidence threshold must lie in [0, 1]");
    }
    if (!(max_gap >= 0.0) || !(padding >= 0.0))
    {
        throw SegmentationError(SegmentationErrc::InvalidParams, "max gap and padding must be non-negative");
    }
    if (min_hits < 1)
    {
        throw SegmentationError(SegmentationErrc::InvalidParams, "min hits must be at least 1");
    }
}

std::vector<RallyInterval> cluster_impacts(std::span<const ImpactEvent> events, const SegmentationParams& params)
{
    params.validate();
    std::vector<double> times;
    for (const auto& e : events)
    {
        if (e.confidence >= params.confidence_threshold)
        {
            times.push_back(e.timestamp);
        }
    }
    std::sort(times.begin(), times.end());

    struct Group
    {
        double first, last;
        int hits;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < times.size();)
    {
        std::size_t j = i + 1;
        while (j < times.size() && times[j] - times[j - 1] <= params.max_gap)
        {
            ++j;
        }
        const int hits = static_cast<int>(j - i);
        if (hits >= params.min_hits)
        {
            groups.push_back({times[i], times[j - 1], hits});
        }
        i = j;
    }

    std::vector<RallyInterval> out;
    out.reserve(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k)
    {
        double start = std::max(0.0, groups[k].first - params.padding);
        double end = groups[k].last + params.padding;
        if (k > 0)
        {
            start = std::max(start, 0.5 * (groups[k - 1].last + groups[k].first));
        }
        if (k + 1 < groups.size())
        {
            end = std::min(end, 0.5 * (groups[k].last + groups[k + 1].first));
        }
        out.push_back({start, end, groups[k].hits});
    }
    return out;
}

std::vector<RallyInterval> filter_intervals(std::span<const RallyInterval> intervals, std::span<const ViewFlags> flags)
{
    if (intervals.size() != flags.size())
    {
        throw SegmentationError(SegmentationErrc::FlagCountMismatch,
                                std::to_string(intervals.size()) + " intervals but " + std::to_string(flags.size()) +
                                    " flag pairs");
    }
    std::vector<RallyInterval> out;
    for (std::size_t i = 0; i < intervals.size(); ++i)
    {
        if (flags[i].broadcast_view && flags[i].scoreboard_visible)
        {
            out.push_back(intervals[i]);
        }
    }
    return out;
}

namespace {

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

double millis(double seconds)
{
    return std::round(seconds * 1000.0) / 1000.0;
}

}  // namespace

ImpactStream read_impacts(std::istream& in)
{
    ImpactStream stream;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number)
    {
        if (blank(line))
        {
            continue;
        }
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
        {
            stream.errors.push_back({number, "not a JSON object"});
            continue;
        }
        const auto t = j.find("t");
        const auto conf = j.find("conf");
        if (t == j.end() || !t->is_number() || conf == j.end() || !conf->is_number())
        {
            stream.errors.push_back({number, "expected numeric \"t\" and \"conf\""});
            continue;
        }
        const ImpactEvent e{t->get<double>(), conf->get<double>()};
        if (!(e.timestamp >= 0.0) || !std::isfinite(e.timestamp))
        {
            stream.errors.push_back({number, "timestamp must be a finite value >= 0"});
            continue;
        }
        if (!(e.confidence >= 0.0 && e.confidence <= 1.0))
        {
            stream.errors.push_back({number, "confidence must lie in [0, 1]"});
            continue;
        }
        stream.events.push_back(e);
    }
    return stream;
}

std::vector<ViewFlags> read_view_flags(std::istream& in)
{
    std::vector<ViewFlags> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number)
    {
        if (blank(line))
        {
            continue;
        }
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("broadcast_view") || !j.contains("scoreboard_visible") ||
            !j["broadcast_view"].is_boolean() || !j["scoreboard_visible"].is_boolean())
        {
            throw SegmentationError(SegmentationErrc::MalformedInput,
                                    "line " + std::to_string(number) + ": expected boolean view flags");
        }
        out.push_back({j["broadcast_view"].get<bool>(), j["scoreboard_visible"].get<bool>()});
    }
    return out;
}

void write_intervals(std::ostream& out, std::span<const RallyInterval> intervals)
{
    char buf[96];
    for (const auto& r : intervals)
    {
        std::snprintf(buf, sizeof buf, "{\"start\":%.3f,\"end\":%.3f,\"hits\":%d}\n", r.start, r.end, r.hit_count);
        out << buf;
    }
}

std::vector<RallyInterval> read_intervals(std::istream& in)
{
    std::vector<RallyInterval> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number)
    {
        if (blank(line))
        {
            continue;
        }
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("start") || !j.contains("end") || !j.contains("hits"))
        {
            throw SegmentationError(SegmentationErrc::MalformedInput,
                                    "line " + std::to_string(number) + ": expected start, end and hits");
        }
        out.push_back({millis(j["start"].get<double>()), millis(j["end"].get<double>()), j["hits"].get<int>()});
    }
    return out;
}

}  // namespace courtside::segmentation
