// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <string>

namespace smg {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the SMG_LOG environment variable
// (quiet|warn|info|debug, default info).
LogLevel log_level();

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace smg
