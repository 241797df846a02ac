#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace surprobe {

// SHA-256 over length-prefixed fields. The length prefix keeps distinct field
// tuples from colliding by concatenation ("ab","c" vs "a","bc").
inline std::string sha256_hex(std::initializer_list<std::string_view> fields) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    for (std::string_view f : fields) {
        std::uint64_t len = f.size();
        unsigned char prefix[8];
        for (int i = 0; i < 8; ++i) prefix[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
        EVP_DigestUpdate(ctx, prefix, sizeof(prefix));
        EVP_DigestUpdate(ctx, f.data(), f.size());
    }
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int out_len = 0;
    EVP_DigestFinal_ex(ctx, out, &out_len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string result;
    result.reserve(out_len * 2);
    for (unsigned int i = 0; i < out_len; ++i) {
        result.push_back(hex[out[i] >> 4]);
        result.push_back(hex[out[i] & 0xf]);
    }
    return result;
}

inline std::string sha256_hex(std::string_view data) { return sha256_hex({data}); }

// FNV-1a 64-bit. Used where a stable, platform-independent hash is needed but
// collision resistance is not (mock logits).
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : std::string_view(data)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace surprobe
