#pragma once

#include <functional>
#include <string>

namespace ringburst {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a process-wide warning sink and returns the previous one.
/// The default handler prints "warning: ..." to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

} // namespace ringburst
