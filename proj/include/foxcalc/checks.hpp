#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "foxcalc/group.hpp"
#include "foxcalc/group_ring.hpp"
#include "foxcalc/hmodule.hpp"
#include "foxcalc/lie.hpp"

namespace foxcalc {

enum class CheckStatus { pass, fail, skip };

std::string to_string(CheckStatus s);

// One verification record: verdict, every abelian group computed along the
// way (label -> invariant description), a witness explaining a failure, and
// free-form notes (skip reasons, declared limitations).
struct CheckResult {
  std::string id;
  std::string instance;
  CheckStatus status = CheckStatus::skip;
  std::vector<std::pair<std::string, std::string>> invariants;
  std::string witness;
  std::string detail;
};

// A corpus entry resolved to live objects: a group, a subgroup of it, and a
// chain on the group. The shared owner keeps derived groups alive.
struct Instance {
  std::shared_ptr<const FiniteGroup> G;
  Subgroup h;
  Series s;
  std::string label;
};

struct CheckDef {
  std::string id;
  std::string summary;
  bool per_instance = true;
  std::function<CheckResult(const Instance&)> fn;
};

// All checks, in canonical report order.
const std::vector<CheckDef>& check_registry();
const CheckDef* find_check(const std::string& id);

// Homomorphism pinned down by prescribed images on a spanning family: row t
// of spans (dom coordinates) must map to row t of images (cod coordinates).
// Solves for the matrix, validates it, and replays every prescribed row;
// throws std::runtime_error when no such homomorphism exists.
AbMap map_on_spanning(const FgAbGroup& dom, const FgAbGroup& cod, const Mat& spans,
                      const Mat& images);

// Whether the surjection admits a section (split epimorphism).
bool splits(const AbMap& pi);

// A minimal-ish generating list for a subgroup (greedy).
std::vector<int> generating_set(const FiniteGroup& g, const Subgroup& s);

// Square builders shared with the negative controls: the degree-two
// comparison square for a chosen K, and the middle square of the two-step
// relative row for a chosen K and J = I^jpow(H).
DiagramSquare degree2_square(const Instance& in, const Subgroup& k);
DiagramSquare relative_square(const Instance& in, const Subgroup& k, int jpow);

} // namespace foxcalc
