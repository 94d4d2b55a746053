#pragma once

// Finite M-covers of an NFG and the degree-M Bethe partition sum
//   Z_{Bethe,M} = (mean of Z over all M-covers)^(1/M).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/nfg.hpp"
#include "bethe/rng.hpp"

namespace bethe {

/// Images of 0..M-1 (zero-based internally; the text form is one-based).
using Permutation = std::vector<std::uint32_t>;

/// One permutation per full edge, stored by edge index; half edges hold an
/// empty permutation.
struct CoverSpec {
  std::size_t degree = 1;
  std::vector<Permutation> perms;

  bool operator==(const CoverSpec&) const = default;
};

/// Throws ValidationError unless spec has a degree-M bijection for every
/// full edge of nfg and nothing for half edges.
void check_cover_spec(const Nfg& nfg, const CoverSpec& spec);

[[nodiscard]] CoverSpec identity_cover(const Nfg& nfg, std::size_t degree);

/// Copy i of node v is node v*M + i ("<id>#<i+1>"); full edge e with
/// permutation s joins copy i of its first endpoint to copy s(i) of its
/// second; half edges are replicated per copy. Edge e copy i is edge e*M + i.
[[nodiscard]] Nfg build_cover(const Nfg& nfg, const CoverSpec& spec);

/// Text form: `e1:(1 2), e3:(2 1)`; one-line permutations, one-based.
/// Full edges missing from the text get the identity.
[[nodiscard]] std::string format_cover_spec(const Nfg& nfg, const CoverSpec& spec);
[[nodiscard]] CoverSpec parse_cover_spec(const Nfg& nfg, std::size_t degree, std::string_view text);

struct CoverLimits {
  std::size_t max_two_cover_edges = 20;
  double max_covers = 1e6;          // cap on (M!)^{#full edges} for exhaustive averages
  EnumerationLimits per_cover{};    // cap on the per-cover partition sum
};

/// Visits every M-cover spec in lexicographic order of (edge index,
/// permutation rank), the first full edge being the most significant digit.
class CoverEnumerator {
 public:
  CoverEnumerator(const Nfg& nfg, std::size_t degree);

  [[nodiscard]] const CoverSpec& current() const noexcept { return spec_; }
  /// Advances; returns false after the last spec.
  bool next();
  [[nodiscard]] double count() const noexcept { return count_; }

 private:
  CoverSpec spec_;
  std::vector<std::size_t> full_edges_;
  double count_ = 1.0;
};

/// All 2^{#full edges} 2-covers (each edge identity or swap).
[[nodiscard]] std::vector<CoverSpec> enumerate_two_covers(const Nfg& nfg, const CoverLimits& limits = {});

/// Number of M-covers, (M!)^{#full edges}, as a double.
[[nodiscard]] double cover_count(const Nfg& nfg, std::size_t degree);

/// Independent uniform permutation per full edge, drawn in edge order.
[[nodiscard]] CoverSpec random_cover(const Nfg& nfg, std::size_t degree, SplitMix64& rng);

struct DegreeMEstimate {
  double point = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool exhaustive = false;
};

/// Exact Z_{Bethe,M}; throws InfeasibleError (pointing at the Monte-Carlo
/// variant) when the cover count or per-cover enumeration exceeds the caps.
[[nodiscard]] DegreeMEstimate degree_m_bethe_exact(const Nfg& nfg, std::size_t degree,
                                                   const CoverLimits& limits = {});

/// Sampled Z_{Bethe,M}: (sample mean of Z)^(1/M), with the delta-method
/// standard error (1/M) mean^(1/M - 1) sd / sqrt(samples).
[[nodiscard]] DegreeMEstimate degree_m_bethe_mc(const Nfg& nfg, std::size_t degree, std::size_t samples,
                                                std::uint64_t seed, const CoverLimits& limits = {});

}  // namespace bethe
