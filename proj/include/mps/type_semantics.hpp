#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "mps/session.hpp"
#include "mps/term.hpp"

namespace mps {

// A global type running against a queue.
struct TypeConfiguration {
  Global global;
  Queue queue;
};

// Naturals extended with infinity; only increment and minimum are needed.
class ExtNat {
 public:
  static ExtNat infinity() { return ExtNat{}; }
  static ExtNat finite(std::uint64_t n) {
    ExtNat e;
    e.finite_ = true;
    e.value_ = n;
    return e;
  }

  bool is_finite() const { return finite_; }
  std::uint64_t value() const { return value_; }

  ExtNat succ() const { return finite_ ? finite(value_ + 1) : infinity(); }

  friend ExtNat min(const ExtNat& a, const ExtNat& b) {
    if (!a.finite_) return b;
    if (!b.finite_) return a;
    return a.value_ <= b.value_ ? a : b;
  }

  bool operator==(const ExtNat& o) const {
    return finite_ == o.finite_ && (!finite_ || value_ == o.value_);
  }
  bool operator<(const ExtNat& o) const {
    if (!o.finite_) return finite_;
    return finite_ && value_ < o.value_;
  }

 private:
  bool finite_ = false;
  std::uint64_t value_ = 0;
};

std::string to_string(const ExtNat& n);

// One transition of the type-configuration transition system. An exact
// branch match consumes that branch; otherwise the label is pushed under
// every branch provided its player differs from each branch's player, it
// occurs in each continuation's capabilities, and the rewrite succeeds
// recursively. The recursion over the cyclic graph memoizes in-progress
// nodes with placeholder results, so revisiting a node ties a cycle in the
// output. nullopt when no rule applies at some required node or the queue
// update does not.
std::optional<Global> gt_step(const TypeConfiguration& c, const CommLabel& label);

// Convenience wrapper returning the full successor configuration.
std::optional<TypeConfiguration> gt_step_config(const TypeConfiguration& c, const CommLabel& label);

// Exactly the capability labels with a defined gt_step.
std::set<CommLabel> gt_enabled(const TypeConfiguration& c);

enum class WeightMode {
  NodeIdentity,  // visited branches compared by graph-node identity
  UpToBisim,     // visited branches compared up to bisimilarity
};

// Minimal number of guarding communications before the type consumes the
// message; infinity when some branch can postpone it forever.
ExtNat weight(const GlobalNode* g, const Message& m, WeightMode mode = WeightMode::NodeIdentity);

// Every message occurring in the queue has finite weight.
bool is_sound(const TypeConfiguration& c);

}  // namespace mps
