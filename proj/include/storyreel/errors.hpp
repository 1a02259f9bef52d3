#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace storyreel {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// asset memory
class SchemaMismatch : public Error { public: using Error::Error; };
class WriteDenied : public Error { public: using Error::Error; };
class NotFound : public Error { public: using Error::Error; };
class BranchExists : public Error { public: using Error::Error; };
class UnknownTable : public Error { public: using Error::Error; };

// tool registry
class DuplicateTool : public Error { public: using Error::Error; };
class NoTools : public Error { public: using Error::Error; };

// protocol
class ParseError : public Error { public: using Error::Error; };

class ValidationFailed : public Error {
public:
    ValidationFailed(std::string path, const std::string& reason)
        : Error("validation failed at '" + path + "': " + reason), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ProvenanceConflict : public Error { public: using Error::Error; };

// planning and execution
class PlanningError : public Error { public: using Error::Error; };

class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> nodes);
    const std::vector<std::string>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::string> nodes_;
};

class DependencyError : public Error { public: using Error::Error; };
class ContractViolation : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class AdapterError : public Error { public: using Error::Error; };

class RunFailure : public Error {
public:
    RunFailure(std::string task_id, const std::string& reason)
        : Error(task_id.empty() ? reason : "task " + task_id + ": " + reason),
          task_id_(std::move(task_id)) {}
    const std::string& task_id() const noexcept { return task_id_; }

private:
    std::string task_id_;
};

} // namespace storyreel
