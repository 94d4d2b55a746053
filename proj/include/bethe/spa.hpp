#pragma once

// Sum-product algorithm on NFGs, the Bethe partition sum at its fixed points,
// and the closed-form fixed-point analysis of the symmetric f0 class, where
// every message is (Lambda, 1) / (Lambda + 1).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bethe/nfg.hpp"
#include "bethe/rng.hpp"

namespace bethe {

using Message = std::array<double, 2>;

/// Node-to-edge messages, one per (edge, side): side s is the message
/// emitted by the node at edge.ends[s]. The node at side s receives the
/// message of side 1-s. Half edges hold the fixed uniform message and feed
/// the all-ones vector into their node.
class MessageSet {
 public:
  static MessageSet uniform(const Nfg& nfg);
  /// Every full-edge message set to (lambda, 1)/(lambda + 1); +infinity gives (1, 0).
  static MessageSet with_ratio(const Nfg& nfg, double lambda);
  /// First entry of each message drawn uniformly from [0.05, 0.95].
  static MessageSet random(const Nfg& nfg, SplitMix64& rng);

  [[nodiscard]] const Message& outgoing(std::size_t edge, std::size_t side) const { return msgs_.at(edge).at(side); }
  /// Normalizes before storing; throws Error on a zero total.
  void set(std::size_t edge, std::size_t side, Message m);

  [[nodiscard]] std::size_t edge_count() const noexcept { return msgs_.size(); }
  [[nodiscard]] const std::vector<std::array<Message, 2>>& raw() const noexcept { return msgs_; }

 private:
  explicit MessageSet(std::size_t edges) : msgs_(edges, {Message{0.5, 0.5}, Message{0.5, 0.5}}) {}
  std::vector<std::array<Message, 2>> msgs_;
};

/// One synchronous sweep. Each node-to-edge message is the table-weighted
/// sum over the other ports' incoming messages, normalized, then mixed as
/// (1 - damping) * new + damping * old. Throws Error("message annihilated")
/// on a zero normalizer.
[[nodiscard]] MessageSet spa_update(const Nfg& nfg, const MessageSet& msgs, double damping = 0.0);

struct SpaOptions {
  double damping = 0.0;
  double tol = 1e-10;
  std::size_t max_iters = 100000;
};

struct SpaFixedPoint {
  MessageSet messages;
  double residual;
  std::size_t iterations;
  /// Common ratio mu(0)/mu(1) when every full-edge message agrees within tol.
  std::optional<double> lambda;
};

struct NoConvergence {
  double residual;
  std::size_t iterations;
};

using SpaOutcome = std::variant<SpaFixedPoint, NoConvergence>;

/// Iterates spa_update until the max-norm change is <= tol.
[[nodiscard]] SpaOutcome run_spa(const Nfg& nfg, const MessageSet& init, const SpaOptions& options = {});

/// prod_f Z_f / prod_e Z_e with Z_f = sum_a f(a) prod incoming, Z_e =
/// sum_a mu_forward(a) mu_backward(a) over full edges.
[[nodiscard]] double bethe_z_at_fixed_point(const Nfg& nfg, const MessageSet& messages);

/// Default seed for the random starts of bethe_partition_sum.
inline constexpr std::uint64_t kMultistartSeed = 0x5EEDBE7E5EEDBE7Eull;

struct MultistartPolicy {
  bool uniform = true;
  std::size_t random_starts = 8;
  std::uint64_t seed = kMultistartSeed;
  /// Adds with_ratio(Lambda+) and with_ratio(Lambda-) starts for f0 models with theta < 1/5.
  bool symmetric_seeds = true;
  SpaOptions spa{};
};

struct StartResult {
  std::string label;
  bool converged;
  double residual;
  std::size_t iterations;
  std::optional<double> z_bethe;
  std::optional<double> lambda;
};

struct BetheResult {
  double z_bethe;
  std::size_t best_start;
  std::vector<StartResult> starts;
  SpaFixedPoint best;
};

/// Runs every start in the fixed order uniform, random #1..#k, Lambda+,
/// Lambda-, and keeps the converged fixed point with the largest Bethe value
/// (values within 1e-12 relative count as ties and go to the earliest start).
/// Throws Error if no start converges.
[[nodiscard]] BetheResult bethe_partition_sum(const Nfg& nfg, const MultistartPolicy& policy = {});

/// Text report: one line per (edge, direction) with mu(0) and mu(1), then
/// the ratio and residual.
[[nodiscard]] std::string format_fixed_point(const Nfg& nfg, const SpaFixedPoint& fp);

// Symmetric f0 analysis.

struct SymmetricFixedPoint {
  std::string name;  // "Lambda0", "Lambda+", "Lambda-"
  double lambda;
  bool stable;
};

/// {Lambda0 = 1 (stable)} for theta >= 1/5; otherwise Lambda0 (unstable) and
/// Lambda+- = (1 - 3 theta +- sqrt(5 theta^2 - 6 theta + 1)) / (2 theta) (stable).
[[nodiscard]] std::vector<SymmetricFixedPoint> symmetric_fixed_points(double theta);

struct LambdaStep {
  double value;
  double derivative;
  bool stable;  // |derivative| < 1
};

/// Lambda -> (Lambda^2 + 2 theta Lambda + theta) / (theta Lambda^2 + 2 theta Lambda + 1).
[[nodiscard]] LambdaStep lambda_update(double theta, double lambda);

/// Lambda^3 + (2 - 1/theta) Lambda^2 + (1/theta - 2) Lambda - 1, evaluated in
/// extended precision.
[[nodiscard]] double fixed_point_cubic(double theta, double lambda);

}  // namespace bethe
