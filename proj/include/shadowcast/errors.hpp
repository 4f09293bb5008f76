#ifndef SHADOWCAST_ERRORS_HPP
#define SHADOWCAST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shadowcast {

// Exit-code contract: 0 success, 1 config error, 2 analysis non-convergence, 3 I/O error.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct nonconvergence_error : std::runtime_error {
    explicit nonconvergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when asked for a laser-cooling equilibrium at zero or blue detuning.
// Callers treat the ion as undetectable (it heats out of the trap volume).
struct no_cooling_equilibrium : std::domain_error {
    explicit no_cooling_equilibrium(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace shadowcast

#endif
