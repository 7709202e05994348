#pragma once

#include <stdexcept>
#include <string>

namespace csb {

// Base class for recoverable numerical / domain failures. Everything the
// library throws on bad-but-representable input derives from this; genuine
// programming errors use the standard logic_error family instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |<f|i>| fell at or below the configured threshold; two-boundary
// quantities diverge as the overlap vanishes.
struct ZeroOverlap : Error {
    using Error::Error;
};

// Conditioning on a measurement branch whose amplitude is zero.
struct ZeroBranch : Error {
    using Error::Error;
};

// Measurement axes closer than the guard angle to antiparallel; the
// hidden spin vector's magnitude diverges there.
struct AntiparallelAxes : Error {
    using Error::Error;
};

// Requested packet does not satisfy the grid-tail decay invariant.
struct PacketTooWide : Error {
    using Error::Error;
};

// Evolution step rejected: invalid step size or the state reached the
// grid boundary (periodic wrap-around would corrupt it).
struct UnstableStep : Error {
    using Error::Error;
};

// Local probability density below threshold; guidance velocity undefined.
struct NodeEncounter : Error {
    using Error::Error;
};

// Integrated path left the interior of the spatial grid.
struct GridExit : Error {
    using Error::Error;
};

// Both components of a 4-current vanish; no direction defined.
struct ZeroCurrent : Error {
    using Error::Error;
};

// Basis handed to the weighted-average identity does not resolve the
// identity on the grid.
struct IncompleteBasis : Error {
    using Error::Error;
};

// Final measurement packets still overlap beyond tolerance; outcome
// regions are not well defined.
struct PacketsNotSeparated : Error {
    using Error::Error;
};

// Configuration file failed schema validation.
struct ConfigInvalid : Error {
    using Error::Error;
};

}  // namespace csb
