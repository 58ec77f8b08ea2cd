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

#include "courtside/court_geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <vector>

namespace courtside::geometry {

namespace {

constexpr double kAtInfinity = 1e-12;
constexpr double kRankTolerance = 1e-10;

Eigen::Matrix3d normalise(const Eigen::Matrix3d& m)
{
    const double norm = m.norm();
    if (!std::isfinite(norm) || norm == 0.0)
    {
        throw GeometryError(GeometryErrc::DegenerateConfiguration, "homography has zero or non-finite norm");
    }
    Eigen::Matrix3d out = m / norm;
    double pivot = out(2, 2);
    if (std::abs(pivot) <= kAtInfinity)
    {
        Eigen::Index r = 0;
        Eigen::Index c = 0;
        out.cwiseAbs().maxCoeff(&r, &c);
        pivot = out(r, c);
    }
    if (pivot < 0.0)
    {
        out = -out;
    }
    return out;
}

/// Isotropic scaling: centroid to the origin, mean distance sqrt(2).
Eigen::Matrix3d conditioning(const std::vector<Eigen::Vector2d>& points)
{
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : points)
    {
        centroid += p;
    }
    centroid /= static_cast<double>(points.size());
    double mean_distance = 0.0;
    for (const auto& p : points)
    {
        mean_distance += (p - centroid).norm();
    }
    mean_distance /= static_cast<double>(points.size());
    if (mean_distance <= 0.0)
    {
        throw GeometryError(GeometryErrc::DegenerateConfiguration, "all points coincide");
    }
    const double s = std::sqrt(2.0) / mean_distance;
    Eigen::Matrix3d t;
    t << s, 0.0, -s * centroid.x(), 0.0, s, -s * centroid.y(), 0.0, 0.0, 1.0;
    return t;
}

bool has_collinear_triple(const std::vector<Eigen::Vector2d>& pts)
{
    double scale = 0.0;
    for (const auto& p : pts)
    {
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    const double tolerance = 1e-9 * std::max(1.0, scale * scale);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        for (std::size_t j = i + 1; j < pts.size(); ++j)
        {
            for (std::size_t k = j + 1; k < pts.size(); ++k)
            {
                const Eigen::Vector2d a = pts[j] - pts[i];
                const Eigen::Vector2d b = pts[k] - pts[i];
                if (std::abs(a.x() * b.y() - a.y() * b.x()) <= tolerance)
                {
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m) : m_matrix(normalise(m))
{
    const double det = m_matrix.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14)
    {
        throw GeometryError(GeometryErrc::DegenerateConfiguration, "homography is singular");
    }
}

Homography Homography::identity()
{
    return Homography(Eigen::Matrix3d::Identity());
}

Homography Homography::inverse() const
{
    return Homography(m_matrix.inverse());
}

Eigen::Vector2d Homography::apply(const Eigen::Vector3d& homogeneous) const
{
    const Eigen::Vector3d q = m_matrix * homogeneous;
    if (!(std::abs(q.z()) >= kAtInfinity))
    {
        throw GeometryError(GeometryErrc::AtInfinity, "point maps to infinity");
    }
    return {q.x() / q.z(), q.y() / q.z()};
}

std::array<double, 9> Homography::entries() const noexcept
{
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r)
    {
        for (int c = 0; c < 3; ++c)
        {
            out[static_cast<std::size_t>(3 * r + c)] = m_matrix(r, c);
        }
    }
    return out;
}

Homography estimate_homography(std::span<const Correspondence> pairs)
{
    const auto n = pairs.size();
    if (n < 4)
    {
        throw GeometryError(GeometryErrc::InsufficientPoints,
                            "need at least 4 correspondences, got " + std::to_string(n));
    }
    std::vector<Eigen::Vector2d> src;
    std::vector<Eigen::Vector2d> dst;
    src.reserve(n);
    dst.reserve(n);
    for (const auto& pair : pairs)
    {
        if (!std::isfinite(pair.pixel.x) || !std::isfinite(pair.pixel.y) || !std::isfinite(pair.court.x) ||
            !std::isfinite(pair.court.y))
        {
            throw GeometryError(GeometryErrc::MalformedInput, "non-finite coordinate");
        }
        src.emplace_back(pair.pixel.x, pair.pixel.y);
        dst.emplace_back(pair.court.x, pair.court.y);
    }
    if (n == 4 && (has_collinear_triple(src) || has_collinear_triple(dst)))
    {
        throw GeometryError(GeometryErrc::DegenerateConfiguration, "three of the four points are collinear");
    }

    const Eigen::Matrix3d t_src = conditioning(src);
    const Eigen::Matrix3d t_dst = conditioning(dst);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i)
    {
        const Eigen::Vector3d p = t_src * src[i].homogeneous();
        const Eigen::Vector3d q = t_dst * dst[i].homogeneous();
        const double x = p.x() / p.z();
        const double y = p.y() / p.z();
        const double u = q.x() / q.z();
        const double v = q.y() / q.z();
        const auto r = static_cast<Eigen::Index>(2 * i);
        a.row(r) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
        a.row(r + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    // Rank 8 is required: the second-smallest direction must be well separated from zero.
    if (sigma(0) <= 0.0 || sigma(7) / sigma(0) < kRankTolerance)
    {
        throw GeometryError(GeometryErrc::DegenerateConfiguration, "correspondence system is rank deficient");
    }
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d conditioned;
    conditioned << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

    return Homography(t_dst.inverse() * conditioned * t_src);
}

CourtPoint project(const Homography& h, PixelPoint p)
{
    const auto q = h.apply(p.x, p.y);
    return {q.x(), q.y()};
}

PixelPoint project_to_image(const Homography& h, CourtPoint p)
{
    const auto q = h.inverse().apply(p.x, p.y);
    return {q.x(), q.y()};
}

double reprojection_error(const Homography& h, std::span<const Correspondence> pairs)
{
    if (pairs.empty())
    {
        throw GeometryError(GeometryErrc::InsufficientPoints, "reprojection error needs at least one pair");
    }
    double sum = 0.0;
    for (const auto& pair : pairs)
    {
        const auto q = project(h, pair.pixel);
        const double dx = q.x - pair.court.x;
        const double dy = q.y - pair.court.y;
        sum += dx * dx + dy * dy;
    }
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}

std::string_view to_string(CourtRegion region) noexcept
{
    switch (region)
    {
    case CourtRegion::Singles:
        return "singles";
    case CourtRegion::Doubles:
        return "doubles";
    case CourtRegion::NearServiceBoxes:
        return "near_service_boxes";
    case CourtRegion::FarServiceBoxes:
        return "far_service_boxes";
    }
    return "?";
}

bool in_bounds(CourtPoint p, CourtRegion region) noexcept
{
    using namespace court;
    auto inside = [&](double x0, double x1, double y0, double y1) {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    };
    switch (region)
    {
    case CourtRegion::Singles:
        return inside(kSinglesLeft, kSinglesRight, 0.0, kLength);
    case CourtRegion::Doubles:
        return inside(0.0, kDoublesWidth, 0.0, kLength);
    case CourtRegion::NearServiceBoxes:
        return inside(kSinglesLeft, kSinglesRight, kNearServiceY, kNetY);
    case CourtRegion::FarServiceBoxes:
        return inside(kSinglesLeft, kSinglesRight, kNetY, kFarServiceY);
    }
    return false;
}

const std::array<CourtKeypoint, 14>& canonical_keypoints() noexcept
{
    using namespace court;
    static const std::array<CourtKeypoint, 14> points{{
        {"near_left_doubles", {0.0, 0.0}},
        {"near_right_doubles", {kDoublesWidth, 0.0}},
        {"far_left_doubles", {0.0, kLength}},
        {"far_right_doubles", {kDoublesWidth, kLength}},
        {"near_left_singles", {kSinglesLeft, 0.0}},
        {"near_right_singles", {kSinglesRight, 0.0}},
        {"far_left_singles", {kSinglesLeft, kLength}},
        {"far_right_singles", {kSinglesRight, kLength}},
        {"near_service_left", {kSinglesLeft, kNearServiceY}},
        {"near_service_right", {kSinglesRight, kNearServiceY}},
        {"far_service_left", {kSinglesLeft, kFarServiceY}},
        {"far_service_right", {kSinglesRight, kFarServiceY}},
        {"near_service_centre", {kCentreX, kNearServiceY}},
        {"far_service_centre", {kCentreX, kFarServiceY}},
    }};
    return points;
}

namespace {

std::array<double, 2> read_pair(const nlohmann::json& object, const char* key)
{
    auto it = object.find(key);
    if (it == object.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    {
        throw GeometryError(GeometryErrc::MalformedInput, std::string("expected \"") + key + "\": [x, y]");
    }
    return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

}  // namespace

Correspondence correspondence_from_json(const nlohmann::json& object)
{
    if (!object.is_object())
    {
        throw GeometryError(GeometryErrc::MalformedInput, "correspondence must be an object");
    }
    const auto px = read_pair(object, "pixel");
    const auto ct = read_pair(object, "court");
    return {{px[0], px[1]}, {ct[0], ct[1]}};
}

nlohmann::json correspondence_to_json(const Correspondence& pair)
{
    return {{"pixel", {pair.pixel.x, pair.pixel.y}}, {"court", {pair.court.x, pair.court.y}}};
}

std::string format_homography(const Homography& h)
{
    std::string out = "[";
    char buffer[64];
    const auto e = h.entries();
    for (std::size_t i = 0; i < e.size(); ++i)
    {
        std::snprintf(buffer, sizeof(buffer), "%s%.9f", i ? ", " : "", e[i] == 0.0 ? 0.0 : e[i]);
        out += buffer;
    }
    out += "]";
    return out;
}

Homography parse_homography(std::string_view text)
{
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array() || j.size() != 9)
    {
        throw GeometryError(GeometryErrc::MalformedInput, "homography must be a list of 9 numbers");
    }
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i)
    {
        if (!j[static_cast<std::size_t>(i)].is_number())
        {
            throw GeometryError(GeometryErrc::MalformedInput, "homography entries must be numbers");
        }
        m(i / 3, i % 3) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return Homography(m);
}

}  // namespace courtside::geometry
