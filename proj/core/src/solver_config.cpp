#include "noma/solver_config.hpp"

#include <stdexcept>

namespace noma {

void SolverConfig::validate() const {
    if (!(eps_outer > 0.0) || !(eps_inner > 0.0)) throw std::invalid_argument("solver tolerances must be positive");
    if (max_iter_outer < 1 || max_iter_inner < 1) throw std::invalid_argument("iteration caps must be at least 1");
    if (discrete_t < 0) throw std::invalid_argument("discrete_t must be non-negative");
}

std::string AllocationMode::name() const {
    switch (kind) {
        case Kind::kPowerOnly: return "PA";
        case Kind::kContinuous: return "PARA";
        case Kind::kDiscrete: return "discrete(" + std::to_string(units_per_slot) + ")";
    }
    return "?";
}

}  // namespace noma
