// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace fscs
{

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view data);
/// Throws MalformedEncoding.
std::string base64_decode(std::string_view text);

} // namespace fscs
