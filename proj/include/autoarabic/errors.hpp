// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace autoarabic {

/// Base of every error raised by the library. The CLI maps subclasses to
/// exit codes: input problems exit 1, runtime problems exit 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: violated precondition, malformed value, unknown id.
class ValidationError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A source file that does not parse. Carries file and 1-based line.
class ParseError : public ValidationError {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : ValidationError(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Semantic validation failure that names the offending record ids.
class RecordValidationError : public ValidationError {
public:
    RecordValidationError(const std::string& what, std::vector<std::string> ids)
        : ValidationError(what + join(ids)), ids_(std::move(ids)) {}

    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    static std::string join(const std::vector<std::string>& ids) {
        std::string out;
        for (const auto& id : ids) {
            out += out.empty() ? ": " : ", ";
            out += id;
        }
        return out;
    }
    std::vector<std::string> ids_;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Stored data is damaged or truncated.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// File header names a format version this build cannot read.
class IncompatibleVersionError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

/// Illegal lifecycle transition, missing task, or stale version.
class ConflictError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace autoarabic
