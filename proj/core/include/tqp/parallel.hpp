#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace tqp {

inline constexpr const char* kThreadsEnv = "TQP_THREADS";

/// Positive integer from the TQP_THREADS environment variable, if set.
/// Throws std::invalid_argument for a malformed value.
std::optional<std::size_t> threads_from_env();

/// Precedence: explicit flag, then TQP_THREADS, then config, then 1.
std::size_t resolve_threads(std::optional<std::size_t> flag, std::optional<std::size_t> config);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// assigned round-robin; the first exception thrown is rethrown after all
/// workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace tqp
