#pragma once

#include <string>

namespace besic {

// Lower-case hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

} // namespace besic
