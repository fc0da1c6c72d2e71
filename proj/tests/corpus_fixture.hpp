#pragma once

#include <stdexcept>
#include <string>

#include "mps/parse.hpp"

namespace mps::testing {

inline const Corpus& corpus() {
  static Corpus c = load_corpus(MPS_CORPUS_DIR);
  if (!c.errors.empty()) {
    std::string msg = "corpus errors:";
    for (const auto& e : c.errors) msg += " " + e.file + ": " + e.message;
    throw std::runtime_error(msg);
  }
  return c;
}

inline const Module& corpus_file(const std::string& name) {
  auto it = corpus().modules.find(name);
  if (it == corpus().modules.end()) throw std::runtime_error("no corpus file " + name);
  return it->second;
}

}  // namespace mps::testing
