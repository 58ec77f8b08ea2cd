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

namespace courtside::geometry {

/// Broadcast-frame pixel coordinates.
struct PixelPoint
{
    double x{0.0};
    double y{0.0};

    bool operator==(const PixelPoint&) const = default;
};

/// Metres on the court plane. Origin at the near-left doubles corner, x across
/// the court, y increasing toward the far baseline.
struct CourtPoint
{
    double x{0.0};
    double y{0.0};

    bool operator==(const CourtPoint&) const = default;
};

}  // namespace courtside::geometry
