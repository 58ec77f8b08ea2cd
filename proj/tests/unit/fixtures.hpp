#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testing {

inline std::string golden_path(const std::string& name)
{
    return std::string(COURTSIDE_GOLDEN_DIR) + "/" + name;
}

inline std::string read_golden(const std::string& name)
{
    std::ifstream in(golden_path(name), std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("missing golden file " + name);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace testing
