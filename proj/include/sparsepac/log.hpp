#pragma once

#include <functional>
#include <string>

namespace sparsepac {

using WarningHandler = std::function<void(const std::string&)>;

// Library warnings go to stderr unless a handler is installed. Returns the
// previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace sparsepac
