#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uniclass {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
    Usage,     // bad invocation or config shape
    Data,      // malformed or inconsistent input data
    Io,        // filesystem, store, or provider failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : DataError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class CorruptStoreError : public IoError {
public:
    CorruptStoreError(const std::string& path, std::uint64_t offset, const std::string& what)
        : IoError("corrupt embedding store " + path + " at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class ProviderError : public IoError {
public:
    explicit ProviderError(const std::string& what) : IoError(what) {}
};

}  // namespace uniclass
