#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dyad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A corpus or data file violates its schema. Carries the offending
/// dialogue id (empty for file-level problems) and the field path.
class SchemaError : public Error {
public:
    SchemaError(std::string dialogue_id, std::string field, const std::string& detail)
        : Error(format(dialogue_id, field, detail)),
          dialogue_id_(std::move(dialogue_id)),
          field_(std::move(field)) {}

    const std::string& dialogue_id() const noexcept { return dialogue_id_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& id, const std::string& field,
                              const std::string& detail) {
        std::string msg = "schema error";
        if (!id.empty()) msg += " in dialogue '" + id + "'";
        if (!field.empty()) msg += " at " + field;
        return msg + ": " + detail;
    }

    std::string dialogue_id_;
    std::string field_;
};

class DuplicateIdError : public SchemaError {
public:
    explicit DuplicateIdError(const std::string& id)
        : SchemaError(id, "id", "duplicate dialogue id") {}
};

/// A self-report needed by an analysis is absent.
class MissingReportError : public Error {
public:
    using Error::Error;
};

}  // namespace dyad
