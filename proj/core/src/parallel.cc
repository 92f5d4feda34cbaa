#include "gscodec/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gsc {

namespace {

int defaultThreads() {
  if (const char *env = std::getenv("GSC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> gThreads{0};
std::atomic<int> gLogLevel{static_cast<int>(LogLevel::kWarning)};
std::mutex gLogMutex;

}  // namespace

int threadCount() {
  int n = gThreads.load();
  if (n <= 0) {
    n = defaultThreads();
    gThreads.store(n);
  }
  return n;
}

void setThreadCount(int n) { gThreads.store(std::max(1, n)); }

void parallelFor(std::size_t begin, std::size_t end, std::size_t grain,
                 const std::function<void(std::size_t, std::size_t)> &fn) {
  if (end <= begin) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t chunks = (end - begin + grain - 1) / grain;
  const int workers = static_cast<int>(std::min<std::size_t>(chunks, threadCount()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t b = begin + c * grain;
      fn(b, std::min(end, b + grain));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      std::size_t b = begin + c * grain;
      try {
        fn(b, std::min(end, b + grain));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failureMutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void setLogLevel(LogLevel level) { gLogLevel.store(static_cast<int>(level)); }
LogLevel logLevel() { return static_cast<LogLevel>(gLogLevel.load()); }

void logWarning(std::string_view message) {
  if (gLogLevel.load() < static_cast<int>(LogLevel::kWarning)) return;
  std::lock_guard<std::mutex> lock(gLogMutex);
  std::fprintf(stderr, "gscodec warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

void logInfo(std::string_view message) {
  if (gLogLevel.load() < static_cast<int>(LogLevel::kInfo)) return;
  std::lock_guard<std::mutex> lock(gLogMutex);
  std::fprintf(stderr, "%.*s\n", static_cast<int>(message.size()), message.data());
}

}  // namespace gsc
