#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace monoflow {

/// Diagnostic verbosity, read once from the MONOFLOW_LOG environment variable:
/// unset/0 = quiet, 1 = info, 2 = debug.
int log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/// Runs fn(i) for i in [0, count). With workers <= 1 the calls happen inline,
/// in order; otherwise a transient pool of `workers` threads pulls indices
/// from a shared atomic counter. fn must be safe to call concurrently.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Number of hardware threads, at least 1.
int default_workers();

}  // namespace monoflow
