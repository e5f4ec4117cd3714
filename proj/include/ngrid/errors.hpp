#pragma once

#include <stdexcept>
#include <string>

namespace ngrid {

// Input that breaks a documented invariant (maps to CLI exit code 1).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system failures, always carrying the offending path (CLI exit code 2).
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace ngrid
