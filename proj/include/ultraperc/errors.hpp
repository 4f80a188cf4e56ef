#pragma once

#include <stdexcept>
#include <string>

namespace ultraperc {

// Thrown when a requested lattice scale cannot be materialized (e.g. the
// point count of a ball exceeds the simulation cap).  The CLI maps this to
// exit code 3; plain std::invalid_argument / std::overflow_error map to 2.
struct infeasible_scale_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ultraperc
