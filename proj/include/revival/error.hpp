#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revival {

/// Base error for every precondition or data failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure with file location attached.
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace revival
