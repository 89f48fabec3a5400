// SPDX-License-Identifier: Apache-2.0
#include "fscs/hashing.hpp"

#include "fscs/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>

namespace fscs
{

std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest {};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i)
    {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::string base64_encode(std::string_view data)
{
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    auto const n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                   reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string base64_decode(std::string_view text)
{
    std::string clean;
    clean.reserve(text.size());
    for (char c: text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            clean.push_back(c);

    if (clean.size() % 4 != 0)
        throw Error(ErrorCode::MalformedEncoding, "base64 length is not a multiple of 4");
    if (clean.empty())
        return {};

    std::string out(3 * clean.size() / 4, '\0');
    auto const n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                   reinterpret_cast<const unsigned char*>(clean.data()), static_cast<int>(clean.size()));
    if (n < 0)
        throw Error(ErrorCode::MalformedEncoding, "invalid base64");

    // EVP_DecodeBlock keeps the bytes produced by '=' padding.
    auto padding = std::size_t {0};
    if (clean.back() == '=')
        ++padding;
    if (clean.size() >= 2 && clean[clean.size() - 2] == '=')
        ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

} // namespace fscs
