#pragma once

#include <cstdint>
#include <random>

#include "mps/session.hpp"
#include "mps/term.hpp"

namespace mps {

struct GenOptions {
  std::size_t max_participants = 4;
  std::size_t max_tags = 3;
  std::size_t max_width = 3;   // branches per choice
  std::size_t max_depth = 5;   // graph depth before forcing termination
  std::size_t max_queue_messages = 3;
  std::size_t max_chain = 8;   // communications in a generated choreography
};

// Seeded generator of random well-formed terms and sessions. Each generated
// value owns a fresh arena.
class SessionGenerator {
 public:
  explicit SessionGenerator(std::uint64_t seed, GenOptions options = {});

  // Unconstrained random session: arbitrary processes plus a random queue.
  // Most of these are not typable; they exercise the semantics layer.
  Session random_session();

  // A session obtained by projecting a random linear (optionally looping)
  // sequence of communications onto its participants. These are typable by
  // construction and exercise inference.
  Session random_choreography_session();

  Process random_process();
  Global random_global();

 private:
  std::size_t pick(std::size_t upper);  // uniform in [0, upper)
  Participant participant(std::size_t i) const;
  Tag tag(std::size_t i) const;

  std::mt19937_64 rng_;
  GenOptions options_;
};

// Runs a seeded scheduler: repeatedly fires a uniformly random enabled
// label, stopping after `steps` labels or when nothing is enabled.
Trace random_schedule(const Session& s, std::size_t steps, std::uint64_t seed);

}  // namespace mps
