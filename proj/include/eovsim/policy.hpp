#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eovsim/types.hpp"

namespace eovsim {

// Endorsement policy tree: either a signed-by leaf naming an org, or an
// n-of node over children.
struct PolicyNode {
  int n = 0;                         // n-of; ignored for leaves
  std::vector<PolicyNode> children;  // empty for leaves
  int org = -1;                      // leaf org id; -1 for n-of nodes

  bool is_leaf() const { return children.empty(); }
};

enum class PolicyId { kP0, kP1, kP2, kP3, kCustom };

const char* to_string(PolicyId id);
PolicyId policy_id_from_string(const std::string& s);

// Builds one of the four benchmark policies for num_orgs orgs (>= 2, else
// throws std::invalid_argument "UNSUPPORTED_N"):
//   P0: num_orgs-of all orgs
//   P1: 2-of [signed-by 0, 1-of [orgs 1..N-1]]
//   P2: 2-of [1-of [orgs 0..N/2], 1-of [orgs N/2+1..N-1]]
//   P3: (N/2+1)-of all orgs
PolicyNode expand_builtin(PolicyId id, int num_orgs);

// Orgs referenced by the policy, ascending and deduplicated.
std::vector<int> policy_orgs(const PolicyNode& node);

// Indices into `endorsements` forming a subset that satisfies the tree by org
// membership and whose read sets, range observations and write sets are
// pairwise identical. nullopt when no such subset exists. Exploits that
// pairwise identity partitions the endorsements into groups, so only whole
// groups need checking.
std::optional<std::vector<size_t>> satisfying_subset(
    const PolicyNode& node, const std::vector<Endorsement>& endorsements);

// n-of nodes strictly below the root n-of (P0 -> 0, P1 -> 1, P2 -> 2).
int sub_policy_count(const PolicyNode& node);

// Minimum number of leaf signatures that can satisfy the tree.
int min_signatures(const PolicyNode& node);

struct VsccCostModel {
  double base_ms = 1.0;
  double per_subpolicy_ms = 0.5;
  double per_signature_ms = 0.1;
};

double vscc_cost_ms(const PolicyNode& node, const VsccCostModel& m);

// Parses the textual policy syntax, e.g.
//   "2-of": [ { "signed-by": 0 }, "1-of": [ "signed-by": 1 ] ]
// Braces around entries are optional. Throws std::invalid_argument on
// malformed input.
PolicyNode parse_policy(const std::string& text);

std::string format_policy(const PolicyNode& node);

}  // namespace eovsim
