#pragma once

#include <stdexcept>
#include <string>

namespace srblab {

// Base class for all numerical/analysis failures the laboratory can emit.
// Anything derived from Error maps to CLI exit code 3; configuration and
// I/O problems use std::invalid_argument / std::ios_base::failure instead.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Power iteration for the invariant splitting did not settle below tolerance.
struct NonConvergence : Error { using Error::Error; };

// An operation required its base point to lie in Omega_0 = Omega \ B(S, eps1).
struct NotInOmega0 : Error { using Error::Error; };

// A qualifying-time sequence came out empty within the horizon.
struct EmptySequence : Error { using Error::Error; };

// A measured graph-transform hypothesis (Lipschitz proximity, Lip1
// membership, monotone projection) failed on the working ball.
struct HypothesisViolated : Error { using Error::Error; };

// The transformed graph covers no symmetric ball around the base point.
struct DomainCollapse : Error { using Error::Error; };

// The orbit segment handed to a multi-step transform does not have the
// required region itinerary (ends in Omega_0, interior in B(S, eps1)).
struct BadItinerary : Error { using Error::Error; };

// Manifold growth drove the patch radius below representable size.
struct ManifoldCollapse : Error { using Error::Error; };

// No hyperbolic return time within the iteration cap.
struct NoReturn : Error { using Error::Error; };

// The seed measure for the particle pipeline is unusable.
struct DegenerateSeed : Error { using Error::Error; };

// The return-time sample fails the integrability verdict.
struct NotIntegrable : Error { using Error::Error; };

// A statistic was requested from fewer samples than its floor.
struct TooFewSamples : Error { using Error::Error; };

}  // namespace srblab
