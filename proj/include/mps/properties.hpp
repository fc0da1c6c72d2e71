#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "mps/checker.hpp"
#include "mps/explore.hpp"
#include "mps/session.hpp"

namespace mps {

enum class PropertyStatus { Holds, Fails, Inconclusive };

std::string to_string(PropertyStatus s);

struct Counterexample {
  Trace trace;             // replayable path from the initial session
  std::string state;       // the violating state, pretty-printed
  std::string obligation;  // what could not be discharged there
};

struct Coverage {
  std::size_t states = 0;
  std::size_t truncated = 0;
};

struct PropertyVerdict {
  std::string property;
  PropertyStatus status = PropertyStatus::Holds;
  std::optional<Counterexample> counterexample;
  Coverage coverage;

  bool holds() const { return status == PropertyStatus::Holds; }
};

// Every participant of every reachable state can eventually perform a
// communication. A violation whose forward region touches truncated states
// is reported as inconclusive rather than as a failure.
PropertyVerdict check_lock_freedom(const Session& s, const ExploreBounds& bounds = {});

// Every reachable state with a final network has an empty queue.
PropertyVerdict check_orphan_freedom(const Session& s, const ExploreBounds& bounds = {});

// Every channel head in every reachable state can eventually be consumed.
PropertyVerdict check_eventual_reception(const Session& s, const ExploreBounds& bounds = {});

// Walks the explored session graph in lockstep with type configurations:
// every session transition must be mirrored by the type configuration and
// the successor pair must type again.
PropertyVerdict cross_check_subject_reduction(const Global& g, const Session& s,
                                              const CheckBounds& cbounds = {},
                                              const ExploreBounds& ebounds = {});

// The mirror direction: every type-configuration transition must be enabled
// in the session and the successor pair must type again.
PropertyVerdict cross_check_session_fidelity(const Global& g, const Session& s,
                                             const CheckBounds& cbounds = {},
                                             const ExploreBounds& ebounds = {});

// For every player of the type, some transition sequence of the type
// configuration reaches a label played by it.
PropertyVerdict cross_check_type_progress(const Global& g, const Queue& q,
                                          const CheckBounds& bounds = {});

// Random sessions: stepping a label never unsatisfies an uninvolved
// satisfied participant. A failure would localize an implementation bug.
PropertyVerdict fuzz_satisfaction_preservation(std::uint64_t seed, std::size_t count);

nlohmann::json to_json(const PropertyVerdict& v);

}  // namespace mps
