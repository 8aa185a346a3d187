#ifndef HLP_DIGEST_H_
#define HLP_DIGEST_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace hlp {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

}  // namespace hlp

#endif  // HLP_DIGEST_H_
