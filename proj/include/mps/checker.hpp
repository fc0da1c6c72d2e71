#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mps/session.hpp"
#include "mps/term.hpp"

namespace mps {

enum class CheckStatus { Accepted, Rejected, Inconclusive };

enum class CheckReason {
  EndMismatch,
  CoherenceViolation,
  PlayersMismatch,
  BranchStepUndefined,
  SoundnessViolation,
  BoundExceeded,
  OrphanAtEnd,
};

std::string to_string(CheckStatus s);
std::string to_string(CheckReason r);

struct CheckWitness {
  Session session;
  Global global;
  std::vector<CommLabel> labels;
};

struct CheckStats {
  std::size_t visited = 0;    // distinct (type node, session) pairs examined
  std::size_t memo_hits = 0;  // pairs accepted by revisit
};

struct Verdict {
  CheckStatus status = CheckStatus::Accepted;
  std::optional<CheckReason> reason;      // present unless accepted
  std::optional<CheckWitness> witness;    // present when rejected
  std::optional<std::string> bound_hit;   // present when inconclusive
  CheckStats stats;

  bool accepted() const { return status == CheckStatus::Accepted; }
};

struct CheckBounds {
  std::size_t max_pairs = 100000;
  std::size_t max_queue = 8;
};

// The coinductive typing judgment, decided by memoized pair exploration:
// a pair that is in progress or already examined is accepted on revisit.
// With sound_mode every communication node additionally requires the
// configuration (type, queue) to be sound.
Verdict check(const Global& g, const Session& s, const CheckBounds& bounds = {},
              bool sound_mode = false);

enum class InferStrategy { SatisfiedFirst, FullSetOnly };

struct InferResult {
  std::optional<Global> type;  // present iff verdict accepted
  Verdict verdict;
};

// Synthesizes a global type by depth-first search over coherent label sets,
// tying back-edges for revisited in-progress states; backtracks on failure.
// A branch cut by a bound makes an otherwise failed search inconclusive
// rather than rejected.
InferResult infer(const Session& s, const CheckBounds& bounds = {},
                  InferStrategy strategy = InferStrategy::SatisfiedFirst);

// JSON rendering of a verdict, including a replay of the witness.
nlohmann::json check_report(const Verdict& v);

}  // namespace mps
