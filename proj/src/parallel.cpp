// SPDX-License-Identifier: MIT
#include "tensorcs/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace tensorcs {

std::size_t resolve_threads(std::size_t requested) {
    std::size_t n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TENSORCS_THREADS"); env != nullptr && *env != '\0') {
        std::size_t cap = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec == std::errc() && cap > 0) n = std::min(n, cap);
    }
    return std::max<std::size_t>(n, 1);
}

}  // namespace tensorcs
