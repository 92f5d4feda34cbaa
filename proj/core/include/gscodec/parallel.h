#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace gsc {

// Number of worker threads used by parallelFor. Defaults to GSC_THREADS from
// the environment, else std::thread::hardware_concurrency().
int threadCount();
void setThreadCount(int n);

// Runs fn(chunkBegin, chunkEnd) over [begin, end) split into chunks of `grain`
// items. Chunk boundaries depend only on `grain`, never on the thread count, so
// any per-chunk reduction merged in chunk order is bit-stable.
void parallelFor(std::size_t begin, std::size_t end, std::size_t grain,
                 const std::function<void(std::size_t, std::size_t)> &fn);

enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };
void setLogLevel(LogLevel level);
LogLevel logLevel();
void logWarning(std::string_view message);
void logInfo(std::string_view message);

}  // namespace gsc
