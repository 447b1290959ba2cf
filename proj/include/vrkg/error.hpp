#pragma once

#include <stdexcept>
#include <string>

namespace vrkg {

// Categories double as CLI exit codes.
enum class ErrorKind { Config = 1, Data = 2, Numeric = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::Config, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::Data, what); }
inline Error numeric_error(const std::string& what) { return Error(ErrorKind::Numeric, what); }

void log_warning(const std::string& message);
void log_info(const std::string& message);
void set_quiet(bool quiet);

}  // namespace vrkg
