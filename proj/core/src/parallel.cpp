#include "tqp/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tqp {

std::optional<std::size_t> threads_from_env() {
  const char* v = std::getenv(kThreadsEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n <= 0) throw std::invalid_argument(std::string(kThreadsEnv) + " must be a positive integer");
  return static_cast<std::size_t>(n);
}

std::size_t resolve_threads(std::optional<std::size_t> flag, std::optional<std::size_t> config) {
  if (flag && *flag > 0) return *flag;
  if (auto env = threads_from_env()) return *env;
  if (config && *config > 0) return *config;
  return 1;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min(threads, count);
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace tqp
