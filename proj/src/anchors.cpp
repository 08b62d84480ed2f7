#include "cpm/anchors.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "cpm/error.hpp"

namespace cpm {

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::LowestCell: return "LowestCell";
    case TermKind::InteriorCell: return "InteriorCell";
    case TermKind::HighestCell: return "HighestCell";
    case TermKind::LowerTail: return "LowerTail";
    case TermKind::UpperTail: return "UpperTail";
  }
  return "Unknown";
}

std::string format_shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, end);
}

int AnchorSet::alpha_position(int j) const {
  const int first = has_lower_cat ? 0 : 1;
  const int last = has_upper_cat ? J() : J() - 1;
  if (j < first || j > last) return kNoAlpha;
  return j - first;
}

double AnchorSet::anchor_value(int j) const {
  if (j <= 0) return has_lower_cat ? *lower_limit : values.front();
  if (j > J()) return has_upper_cat ? *upper_limit : values.back();
  return values[static_cast<std::size_t>(j - 1)];
}

std::string AnchorSet::anchor_label(int j) const {
  if (j == 0 && has_lower_cat) return lower_label;
  if (j == J() + 1 && has_upper_cat) return upper_label;
  return format_shortest(anchor_value(j));
}

bool AnchorSet::same_structure(const AnchorSet& other) const {
  return values == other.values && has_lower_cat == other.has_lower_cat &&
         has_upper_cat == other.has_upper_cat && lower_limit == other.lower_limit &&
         upper_limit == other.upper_limit && assignment == other.assignment;
}

AnchorSet build_anchor_set(const Dataset& dataset) {
  AnchorSet set;
  const std::size_t n = dataset.size();

  for (std::size_t i = 0; i < n; ++i) {
    const double z = dataset.z(i);
    switch (dataset.delta(i)) {
      case CensorCode::Observed: set.values.push_back(z); break;
      case CensorCode::BelowDL:
        if (!set.lower_limit || z < *set.lower_limit) set.lower_limit = z;
        break;
      case CensorCode::AboveDL:
        if (!set.upper_limit || z > *set.upper_limit) set.upper_limit = z;
        break;
    }
  }
  if (set.values.empty()) {
    throw Error(ErrorKind::NoUncensoredValues, "no uncensored outcomes: cannot build anchor points");
  }
  std::sort(set.values.begin(), set.values.end());
  set.values.erase(std::unique(set.values.begin(), set.values.end()), set.values.end());

  const int J = set.J();
  set.has_lower_cat = set.lower_limit && *set.lower_limit <= set.values.front();
  set.has_upper_cat = set.upper_limit && *set.upper_limit >= set.values.back();
  if (set.lower_limit) set.lower_label = "<" + format_shortest(*set.lower_limit);
  if (set.upper_limit) set.upper_label = ">" + format_shortest(*set.upper_limit);

  const auto& a = set.values;
  set.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = dataset.z(i);
    TermAssignment term;
    switch (dataset.delta(i)) {
      case CensorCode::Observed: {
        const int j = static_cast<int>(std::lower_bound(a.begin(), a.end(), z) - a.begin()) + 1;
        term.category = j;
        term.lower = set.alpha_position(j - 1);
        term.upper = set.alpha_position(j);
        if (term.lower != kNoAlpha && term.upper != kNoAlpha) {
          term.kind = TermKind::InteriorCell;
        } else if (term.lower != kNoAlpha) {
          term.kind = TermKind::HighestCell;
        } else {
          term.kind = TermKind::LowestCell;
        }
        break;
      }
      case CensorCode::BelowDL: {
        term.kind = TermKind::LowerTail;
        int j;
        if (set.has_lower_cat && z == *set.lower_limit) {
          j = 0;
        } else {
          // a_j = max{a in S : a < z}; a_0 sits below l and therefore below z.
          j = static_cast<int>(std::lower_bound(a.begin(), a.end(), z) - a.begin());
          if (j == 0 && !set.has_lower_cat) {
            throw Error(ErrorKind::InternalAssignmentError,
                        "lower-censored observation " + std::to_string(i) + " has no anchor below it");
          }
          if (j == J) {
            set.diagnostics.push_back("lower DL " + format_shortest(z) + " at observation " +
                                      std::to_string(i) + " exceeds every uncensored value");
          }
        }
        term.category = j;
        term.upper = set.alpha_position(j);
        break;
      }
      case CensorCode::AboveDL: {
        term.kind = TermKind::UpperTail;
        int j;
        if (set.has_upper_cat && z == *set.upper_limit) {
          j = J + 1;
        } else {
          // a_j = min{a in S : a > z}; a_{J+1} sits above u and therefore above z.
          j = static_cast<int>(std::upper_bound(a.begin(), a.end(), z) - a.begin()) + 1;
          if (j == J + 1 && !set.has_upper_cat) {
            throw Error(ErrorKind::InternalAssignmentError,
                        "upper-censored observation " + std::to_string(i) + " has no anchor above it");
          }
          if (j == 1) {
            set.diagnostics.push_back("upper DL " + format_shortest(z) + " at observation " +
                                      std::to_string(i) + " lies below every uncensored value");
          }
        }
        term.category = j;
        term.lower = set.alpha_position(j - 1);
        break;
      }
    }
    set.assignment[i] = term;
  }
  return set;
}

}  // namespace cpm
