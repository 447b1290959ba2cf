#include "vrkg/error.hpp"

#include <iostream>

namespace vrkg {

namespace {
bool g_quiet = false;
}

void set_quiet(bool quiet) { g_quiet = quiet; }

void log_warning(const std::string& message) {
    if (!g_quiet) std::cerr << "[warn] " << message << '\n';
}

void log_info(const std::string& message) {
    if (!g_quiet) std::cerr << "[info] " << message << '\n';
}

}  // namespace vrkg
