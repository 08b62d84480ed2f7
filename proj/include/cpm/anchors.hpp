#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpm/dataset.hpp"

namespace cpm {

enum class TermKind { LowestCell, InteriorCell, HighestCell, LowerTail, UpperTail };

std::string_view to_string(TermKind kind);

// Marks a missing cell edge: alpha = -inf on the left, +inf on the right.
inline constexpr int kNoAlpha = -1;

// Likelihood term of one observation, written as the probability of the cell
// (alpha_lower - eta, alpha_upper - eta] on the latent scale. Edge values are
// positions in the estimated alpha vector (0-based), kNoAlpha for an open edge.
// `category` is the anchor index j in a_0..a_{J+1} numbering: the observed
// anchor for cells, j with F(alpha_j) for lower tails, and j with
// 1 - F(alpha_{j-1}) for upper tails.
struct TermAssignment {
  TermKind kind = TermKind::InteriorCell;
  int lower = kNoAlpha;
  int upper = kNoAlpha;
  int category = 0;

  friend bool operator==(const TermAssignment&, const TermAssignment&) = default;
};

// Ordered category scaffold a_0 < a_1 < ... < a_J < a_{J+1} supporting the
// nonparametric likelihood. values holds a_1..a_J; a_0 and a_{J+1} are
// symbolic tail categories anchored at the detection limits l and u.
struct AnchorSet {
  std::vector<double> values;
  bool has_lower_cat = false;
  bool has_upper_cat = false;
  std::optional<double> lower_limit;  // l: smallest lower DL in the data
  std::optional<double> upper_limit;  // u: largest upper DL in the data
  std::string lower_label;
  std::string upper_label;
  std::vector<TermAssignment> assignment;  // empty when reloaded from a document
  std::vector<std::string> diagnostics;

  int J() const { return static_cast<int>(values.size()); }
  int n_alpha() const { return J() - 1 + (has_lower_cat ? 1 : 0) + (has_upper_cat ? 1 : 0); }

  // Position in the alpha vector of alpha_j (a_0..a_{J+1} numbering), or
  // kNoAlpha when alpha_j is not a parameter (it is then -inf or +inf).
  int alpha_position(int j) const;
  // Inverse of alpha_position.
  int anchor_index(int alpha_pos) const { return alpha_pos + (has_lower_cat ? 0 : 1); }

  // Value used for a_j on the outcome scale: a_0 -> l and a_{J+1} -> u.
  double anchor_value(int j) const;
  std::string anchor_label(int j) const;

  // Same anchor structure and per-observation terms.
  bool same_structure(const AnchorSet& other) const;
};

AnchorSet build_anchor_set(const Dataset& dataset);

// Shortest decimal text that reads back to the same double.
std::string format_shortest(double value);

}  // namespace cpm
