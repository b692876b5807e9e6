#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace hyperfall {

// Every error carries the module and operation it originated from so the
// CLI can name them in its message.
class Error : public std::runtime_error {
  public:
    Error(std::string module, std::string operation, const std::string &what)
        : std::runtime_error(module + "::" + operation + ": " + what), module_(std::move(module)),
          operation_(std::move(operation)) {}

    const std::string &module() const noexcept { return module_; }
    const std::string &operation() const noexcept { return operation_; }

  private:
    std::string module_;
    std::string operation_;
};

class ConfigError : public Error {
    using Error::Error;
};
class GeometryError : public Error {
    using Error::Error;
};
class DomainError : public Error {
    using Error::Error;
};
class SingularEvaluationError : public Error {
    using Error::Error;
};
class OracleError : public Error {
  public:
    OracleError(std::string module, std::string operation, const std::string &what, double achieved)
        : Error(std::move(module), std::move(operation), what), achieved_(achieved) {}
    double achieved_tolerance() const noexcept { return achieved_; }

  private:
    double achieved_;
};
class AssemblyError : public Error {
    using Error::Error;
};
class SolverError : public Error {
  public:
    SolverError(std::string module, std::string operation, const std::string &what, double rcond)
        : Error(std::move(module), std::move(operation), what), rcond_(rcond) {}
    // Reciprocal condition estimate of the failed factorization.
    double rcond() const noexcept { return rcond_; }

  private:
    double rcond_;
};
class ConvergenceError : public Error {
    using Error::Error;
};
class DegeneracyError : public Error {
  public:
    DegeneracyError(std::string module, std::string operation, const std::string &what, std::array<double, 3> null_dir)
        : Error(std::move(module), std::move(operation), what), null_dir_(null_dir) {}
    const std::array<double, 3> &null_direction() const noexcept { return null_dir_; }

  private:
    std::array<double, 3> null_dir_;
};
class ConsistencyError : public Error {
    using Error::Error;
};
class MassModelError : public Error {
    using Error::Error;
};
class InstabilityError : public Error {
  public:
    InstabilityError(std::string module, std::string operation, const std::string &what, long step)
        : Error(std::move(module), std::move(operation), what), step_(step) {}
    long step() const noexcept { return step_; }

  private:
    long step_;
};

} // namespace hyperfall
