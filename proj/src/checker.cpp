#include "mps/checker.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <vector>

#include "mps/print.hpp"
#include "mps/type_semantics.hpp"

namespace mps {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Accepted: return "accepted";
    case CheckStatus::Rejected: return "rejected";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(CheckReason r) {
  switch (r) {
    case CheckReason::EndMismatch: return "end-mismatch";
    case CheckReason::CoherenceViolation: return "coherence-violation";
    case CheckReason::PlayersMismatch: return "players-mismatch";
    case CheckReason::BranchStepUndefined: return "branch-step-undefined";
    case CheckReason::SoundnessViolation: return "soundness-violation";
    case CheckReason::BoundExceeded: return "bound-exceeded";
    case CheckReason::OrphanAtEnd: return "orphan-at-end";
  }
  return "?";
}

Verdict check(const Global& g, const Session& s, const CheckBounds& bounds, bool sound_mode) {
  CheckStats stats;
  auto players_by_node = players_map(g.node);
  using Pair = std::pair<const GlobalNode*, Session>;
  std::set<Pair> memo;
  std::vector<Pair> todo{{g.node, s}};

  auto reject = [&](CheckReason reason, const Pair& at, std::vector<CommLabel> labels) {
    Verdict v;
    v.status = CheckStatus::Rejected;
    v.reason = reason;
    v.witness = CheckWitness{at.second, Global{g.arena, at.first}, std::move(labels)};
    v.stats = stats;
    return v;
  };
  auto inconclusive = [&](const std::string& bound) {
    Verdict v;
    v.status = CheckStatus::Inconclusive;
    v.reason = CheckReason::BoundExceeded;
    v.bound_hit = bound;
    v.stats = stats;
    return v;
  };

  while (!todo.empty()) {
    Pair cur = std::move(todo.back());
    todo.pop_back();
    if (memo.count(cur)) {
      ++stats.memo_hits;
      continue;
    }
    if (memo.size() >= bounds.max_pairs) return inconclusive("max-pairs");
    if (cur.second.queue.longest_channel() > bounds.max_queue) return inconclusive("max-queue");
    memo.insert(cur);
    ++stats.visited;

    const GlobalNode* node = cur.first;
    const Session& state = cur.second;

    if (state.final()) {
      if (!node->is_end()) return reject(CheckReason::EndMismatch, cur, {});
      if (!state.queue.empty()) return reject(CheckReason::OrphanAtEnd, cur, {});
      continue;
    }
    if (node->is_end()) return reject(CheckReason::EndMismatch, cur, {});

    std::vector<CommLabel> labels;
    std::set<CommLabel> label_set;
    for (const auto& b : node->branches) {
      labels.push_back(b.label);
      label_set.insert(b.label);
    }

    if (players_by_node.at(node) != state.plays())
      return reject(CheckReason::PlayersMismatch, cur, labels);

    auto coherent = coherent_sets(state);
    if (std::find(coherent.begin(), coherent.end(), label_set) == coherent.end())
      return reject(CheckReason::CoherenceViolation, cur, labels);

    std::vector<Session> successors;
    for (const auto& b : node->branches) {
      auto next = step(state, b.label);
      if (!next) return reject(CheckReason::BranchStepUndefined, cur, {b.label});
      successors.push_back(std::move(*next));
    }

    if (sound_mode) {
      TypeConfiguration conf{Global{g.arena, node}, state.queue};
      if (!is_sound(conf)) return reject(CheckReason::SoundnessViolation, cur, labels);
    }

    // Push in reverse so branches are examined in declaration order.
    for (std::size_t i = node->branches.size(); i-- > 0;)
      todo.emplace_back(node->branches[i].target, std::move(successors[i]));
  }

  Verdict v;
  v.status = CheckStatus::Accepted;
  v.stats = stats;
  return v;
}

namespace {

struct Fail {};          // unwinds one derivation branch
struct BoundCut {};      // like Fail, but caused by a bound
struct SearchAbort {};   // unwinds the whole search (pair budget exhausted)

class Inferer {
 public:
  Inferer(const Session& root, const CheckBounds& bounds, InferStrategy strategy)
      : root_(root), bounds_(bounds), strategy_(strategy) {
    arena_ = std::make_shared<TermArena>();
    arena_->retain(root.arena);
  }

  InferResult run() {
    InferResult out;
    const GlobalNode* node = nullptr;
    try {
      node = derive(root_, 0).node;
    } catch (const Fail&) {
    } catch (const BoundCut&) {
    } catch (const SearchAbort&) {
      bound_cut_seen_ = true;
    }
    out.verdict.stats.visited = visited_;
    out.verdict.stats.memo_hits = memo_hits_;
    if (node) {
      out.type = Global{arena_, node};
      out.verdict.status = CheckStatus::Accepted;
      return out;
    }
    if (bound_cut_seen_) {
      out.verdict.status = CheckStatus::Inconclusive;
      out.verdict.reason = CheckReason::BoundExceeded;
      out.verdict.bound_hit = "max-pairs/max-queue";
    } else {
      out.verdict.status = CheckStatus::Rejected;
      out.verdict.reason = root_.final() && !root_.queue.empty() ? CheckReason::OrphanAtEnd
                                                                 : CheckReason::CoherenceViolation;
    }
    return out;
  }

 private:
  struct Derived {
    const GlobalNode* node;
    std::size_t min_back;  // shallowest in-progress frame referenced below
  };

  // Returns the synthesized node for this state plus the shallowest stack
  // depth it refers back to. A completed state is cached only when its
  // subgraph references no frame above it, so cache entries never point at
  // abandoned placeholders from failed candidates.
  Derived derive(const Session& state, std::size_t depth) {
    if (auto it = done_.find(state); it != done_.end()) {
      ++memo_hits_;
      return {it->second, SIZE_MAX};
    }
    if (auto it = in_progress_.find(state); it != in_progress_.end()) {
      ++memo_hits_;
      return {it->second.first, it->second.second};
    }
    if (state.final()) {
      if (state.queue.empty()) return {arena_->end_node(), SIZE_MAX};
      throw Fail{};
    }
    if (++visited_ > bounds_.max_pairs) throw SearchAbort{};
    if (state.queue.longest_channel() > bounds_.max_queue) {
      bound_cut_seen_ = true;
      throw BoundCut{};
    }

    std::vector<std::set<CommLabel>> candidates;
    if (strategy_ == InferStrategy::FullSetOnly) {
      auto all = enabled_labels(state);
      if (!all.empty()) candidates.push_back(std::move(all));
    } else {
      candidates = coherent_sets(state);
    }

    auto plays = state.plays();
    for (const auto& candidate : candidates) {
      // The players equation, checked locally: the players introduced by
      // the chosen labels plus the players of every successor network must
      // give back exactly this network's players.
      std::vector<Session> successors;
      std::set<Participant> covered;
      for (const auto& label : candidate) {
        auto next = step(state, label);
        assert(next);  // coherent sets only contain enabled labels
        covered.insert(label.player);
        for (const auto& p : next->plays()) covered.insert(p);
        successors.push_back(std::move(*next));
      }
      if (covered != plays) continue;

      GlobalNode* placeholder = arena_->make_global();
      in_progress_[state] = {placeholder, depth};
      std::size_t min_back = SIZE_MAX;
      std::vector<GlobalBranch> branches;
      bool failed = false;
      std::size_t i = 0;
      for (const auto& label : candidate) {
        try {
          auto child = derive(successors[i], depth + 1);
          branches.push_back(GlobalBranch{label, child.node});
          min_back = std::min(min_back, child.min_back);
        } catch (const Fail&) {
          failed = true;
        } catch (const BoundCut&) {
          failed = true;
        }
        if (failed) break;
        ++i;
      }
      in_progress_.erase(state);
      if (failed) continue;
      placeholder->branches = std::move(branches);
      if (min_back >= depth) {
        done_[state] = placeholder;
        return {placeholder, SIZE_MAX};
      }
      return {placeholder, min_back};
    }
    throw Fail{};
  }

  Session root_;
  CheckBounds bounds_;
  InferStrategy strategy_;
  std::shared_ptr<TermArena> arena_;
  std::map<Session, std::pair<GlobalNode*, std::size_t>> in_progress_;
  std::map<Session, const GlobalNode*> done_;
  std::size_t visited_ = 0;
  std::size_t memo_hits_ = 0;
  bool bound_cut_seen_ = false;
};

}  // namespace

InferResult infer(const Session& s, const CheckBounds& bounds, InferStrategy strategy) {
  Inferer inferer(s, bounds, strategy);
  InferResult result = inferer.run();
  if (result.type) {
    // The synthesized derivation satisfies the typing judgment by
    // construction; validate it anyway and fail loudly on a mismatch.
    Verdict validation = check(*result.type, s, bounds, false);
    if (!validation.accepted()) {
      result.type.reset();
      result.verdict = validation;
    }
  }
  return result;
}

nlohmann::json check_report(const Verdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  if (v.reason) j["reason"] = to_string(*v.reason);
  if (v.witness) {
    nlohmann::json w;
    w["session"] = display(v.witness->session);
    w["global"] = display(v.witness->global.node);
    w["labels"] = nlohmann::json::array();
    for (const auto& l : v.witness->labels) w["labels"].push_back(to_string(l));
    if (v.reason == CheckReason::CoherenceViolation) {
      w["coherent_sets"] = nlohmann::json::array();
      for (const auto& set : coherent_sets(v.witness->session)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& l : set) arr.push_back(to_string(l));
        w["coherent_sets"].push_back(arr);
      }
    }
    j["witness"] = w;
  }
  if (v.bound_hit) j["bound"] = *v.bound_hit;
  j["stats"] = {{"visited", v.stats.visited}, {"memo_hits", v.stats.memo_hits}};
  return j;
}

}  // namespace mps
