#pragma once

// Experiment drivers behind the bethe-covers command line. Each command
// writes plain text or CSV to a stream; run() parses arguments and maps
// errors to exit codes (0 ok, 1 failed check, 2 validation, 3 infeasible).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/models.hpp"
#include "bethe/nfg.hpp"
#include "bethe/spa.hpp"

namespace bethe::cli {

enum class ModelKind { single_cycle, f0, nfg };

struct ModelSpec {
  ModelKind kind = ModelKind::f0;
  IncidenceMatrix matrix;  // f0 only
  Nfg fixed;               // nfg only; theta is ignored
};

/// "builtin:appendix_d", "builtin:theta", "builtin:k4" or a file path.
[[nodiscard]] IncidenceMatrix resolve_matrix(std::string_view source);

/// The model's NFG at theta.
[[nodiscard]] Nfg model_nfg(const ModelSpec& spec, double theta);

/// "a:step:b" (inclusive, rounded to the step) or a comma list. Sorted ascending.
[[nodiscard]] std::vector<double> parse_grid(std::string_view text);

enum class Bethe2Method { automatic, dct, exact, mc };

[[nodiscard]] Bethe2Method parse_bethe2_method(std::string_view name);

struct Bethe2Value {
  double value;
  double standard_error;
  std::string method;  // "dct", "exhaustive" or "monte-carlo"
};

/// Z_{Bethe,2}. automatic picks the pair-state sum for degree-3 models with
/// at most 14 edges, exhaustive cover averaging when feasible, sampling otherwise.
[[nodiscard]] Bethe2Value bethe2_value(const ModelSpec& spec, double theta, Bethe2Method method,
                                       std::size_t samples, std::uint64_t seed);

struct SweepOptions {
  Bethe2Method method = Bethe2Method::automatic;
  std::size_t samples = 64;
  std::uint64_t seed = 1;
  MultistartPolicy policy{};
};

struct SweepRow {
  double theta;
  double log2_z;
  double log2_zbethe2;
  double log2_zbethe;
  double log2_rho;
  std::string error;  // empty on success; the numeric fields are NaN otherwise
};

[[nodiscard]] std::vector<SweepRow> sweep(const ModelSpec& spec, const std::vector<double>& grid,
                                          const SweepOptions& options = {});

/// Header plus one line per row, 12 significant digits, LF endings.
[[nodiscard]] std::string format_sweep_csv(const std::vector<SweepRow>& rows);

struct TelescopeRow {
  std::size_t k;
  std::size_t m;
  double zb_m;
  double standard_error;
  std::optional<double> eta;  // zb_M / zb_{2M}, absent on the last row
  double predicted_eta;       // eta_0^(1/2^k)
  double z_over_zb_m;
  double predicted_z_over_zb_m;  // eta_0^(2(1 - 1/M))
  std::string method;            // "dct", "exhaustive" or "monte-carlo"
};

struct TelescopeReport {
  std::vector<TelescopeRow> rows;
  std::vector<std::string> notices;
};

/// Z_{Bethe,M} for M = 1, 2, 4, ..., 2^k_max. M = 2 uses the pair-state sum
/// when it applies; otherwise exhaustive when (M!)^{#full edges} <=
/// limits.max_covers and the total number of cover configurations is at most
/// 2^28, sampled otherwise. Stops early with a notice
/// when even one cover is too large to enumerate.
[[nodiscard]] TelescopeReport telescope(const Nfg& nfg, std::size_t k_max, std::size_t samples, std::uint64_t seed,
                                        const CoverLimits& limits = {});

[[nodiscard]] std::string format_telescope(const TelescopeReport& report);

struct RuozziReport {
  std::size_t covers;
  bool exhaustive;
  double max_ratio;     // Z(cover) / Z^2
  double median_ratio;
  double fraction_close;  // ratio >= 0.99
  bool holds;             // max_ratio <= 1 + 1e-12
};

/// Z(cover) / Z^2 over all 2-covers (exhaustive) or `samples` random ones.
/// Throws ValidationError unless nfg is an f0 model.
[[nodiscard]] RuozziReport ruozzi_check(const Nfg& nfg, std::size_t samples, std::uint64_t seed, bool exhaustive);

[[nodiscard]] std::string format_ruozzi(const RuozziReport& report);

/// Formats x with 12 significant digits; values below 1e-12 in magnitude print as 0.
[[nodiscard]] std::string fmt(double x);

/// Full command line (args[0] is the subcommand, no program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bethe::cli
