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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace courtside {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Exception carrying a module-specific error code.
template <typename CodeT>
class CodedError : public Error
{
  public:
    CodedError(CodeT code, const std::string& what) : Error(what), m_code(code) {}

    CodeT code() const noexcept
    {
        return m_code;
    }

  private:
    CodeT m_code;
};

/// Report-valued validation result. Empty means valid.
struct ValidityReport
{
    std::vector<std::string> violations;

    bool ok() const noexcept
    {
        return violations.empty();
    }

    void add(std::string violation)
    {
        violations.push_back(std::move(violation));
    }

    bool mentions(std::string_view needle) const
    {
        for (const auto& v : violations)
        {
            if (v.find(needle) != std::string::npos)
            {
                return true;
            }
        }
        return false;
    }
};

}  // namespace courtside
