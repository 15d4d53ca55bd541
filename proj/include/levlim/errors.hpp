#pragma once

#include <stdexcept>
#include <string>

namespace levlim {

/// Invalid parameter or evaluation at a pole / outside the admissible domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Quadrature or accumulation failure; carries the accuracy actually reached.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, double achieved)
        : std::runtime_error(msg + " (achieved tolerance " + std::to_string(achieved) + ")"),
          achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

/// Newton iteration did not converge; carries the last iterate.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double zm, double zp, double resid, int iters)
        : std::runtime_error(msg),
          zeta_minus_last(zm), zeta_plus_last(zp),
          residual_norm(resid), iterations(iters) {}
    double zeta_minus_last;
    double zeta_plus_last;
    double residual_norm;
    int iterations;
};

} // namespace levlim
