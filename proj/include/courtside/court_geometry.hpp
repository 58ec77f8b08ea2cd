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

#include <Eigen/Core>
#include <json.hpp>

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace courtside::geometry {

enum class GeometryErrc
{
    InsufficientPoints,
    DegenerateConfiguration,
    AtInfinity,
    MalformedInput,
};

using GeometryError = CodedError<GeometryErrc>;

/// Standard court dimensions in metres.
namespace court {
inline constexpr double kDoublesWidth = 10.97;
inline constexpr double kSinglesWidth = 8.23;
inline constexpr double kLength = 23.77;
inline constexpr double kServiceLineFromNet = 6.40;
inline constexpr double kAlley = (kDoublesWidth - kSinglesWidth) / 2.0;
inline constexpr double kSinglesLeft = kAlley;
inline constexpr double kSinglesRight = kDoublesWidth - kAlley;
inline constexpr double kNetY = kLength / 2.0;
inline constexpr double kCentreX = kDoublesWidth / 2.0;
inline constexpr double kNearServiceY = kNetY - kServiceLineFromNet;
inline constexpr double kFarServiceY = kNetY + kServiceLineFromNet;
}  // namespace court

/// Planar projective map from broadcast pixels to court metres.
///
/// Stored with unit Frobenius norm and a positive bottom-right entry (or, when
/// that entry vanishes, a positive largest-magnitude entry).
class Homography
{
  public:
    /// Normalises `m`; throws GeometryError(DegenerateConfiguration) if singular.
    explicit Homography(const Eigen::Matrix3d& m);

    static Homography identity();

    const Eigen::Matrix3d& matrix() const noexcept
    {
        return m_matrix;
    }

    Homography inverse() const;

    /// Homogeneous transform and perspective divide. Throws GeometryError(AtInfinity)
    /// when the third coordinate falls below 1e-12 in magnitude.
    Eigen::Vector2d apply(const Eigen::Vector3d& homogeneous) const;
    Eigen::Vector2d apply(double x, double y) const
    {
        return apply(Eigen::Vector3d(x, y, 1.0));
    }

    /// Row-major entries.
    std::array<double, 9> entries() const noexcept;

  private:
    Eigen::Matrix3d m_matrix;
};

struct Correspondence
{
    PixelPoint pixel;
    CourtPoint court;
};

/// Normalised direct linear transform over the stacked 2n x 9 system; the
/// solution is the right singular vector of the smallest singular value.
/// Needs at least four pairs, and no three collinear when exactly four.
Homography estimate_homography(std::span<const Correspondence> pairs);

CourtPoint project(const Homography& h, PixelPoint p);

/// Court position back into the broadcast frame through the inverse map.
PixelPoint project_to_image(const Homography& h, CourtPoint p);

/// Root-mean-square court-plane distance in metres. `pairs` must be non-empty.
double reprojection_error(const Homography& h, std::span<const Correspondence> pairs);

enum class CourtRegion
{
    Singles,
    Doubles,
    NearServiceBoxes,
    FarServiceBoxes,
};

std::string_view to_string(CourtRegion region) noexcept;

/// Inclusive rectangle containment.
bool in_bounds(CourtPoint p, CourtRegion region) noexcept;

struct CourtKeypoint
{
    std::string_view name;
    CourtPoint position;
};

/// The 14 line intersections used for court registration.
const std::array<CourtKeypoint, 14>& canonical_keypoints() noexcept;

/// {"pixel": [x, y], "court": [x, y]}
Correspondence correspondence_from_json(const nlohmann::json& object);
nlohmann::json correspondence_to_json(const Correspondence& pair);

/// Row-major, 9 decimal digits: [h00, h01, ..., h22].
std::string format_homography(const Homography& h);
Homography parse_homography(std::string_view text);

}  // namespace courtside::geometry
