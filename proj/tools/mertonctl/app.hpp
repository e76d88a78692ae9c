#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace mertonctl {

/// Runs one mertonctl invocation and returns the process exit code:
/// 0 ok, 1 usage/config/dependency, 2 data, 3 numerical, 4 I/O.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for input digests in run manifests.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

}  // namespace mertonctl
