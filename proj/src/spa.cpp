#include "bethe/spa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bethe/models.hpp"
#include "bethe/parallel.hpp"

namespace bethe {

namespace {

constexpr Message kAllOnes{1.0, 1.0};

Message normalized(Message m) {
  const double total = m[0] + m[1];
  if (total == 0.0 || !std::isfinite(total)) throw Error("message annihilated");
  return Message{m[0] / total, m[1] / total};
}

// (edge, side) attached to each port of each node
struct PortLink {
  std::size_t edge;
  std::size_t side;
  bool half;
};

std::vector<std::vector<PortLink>> port_links(const Nfg& nfg) {
  std::vector<std::vector<PortLink>> out(nfg.node_count());
  for (std::size_t i = 0; i < nfg.node_count(); ++i) out[i].resize(nfg.node(i).ports);
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    const Edge& edge = nfg.edge(e);
    for (std::size_t s = 0; s < edge.ends.size(); ++s) {
      out.at(edge.ends[s].node).at(edge.ends[s].port) = PortLink{e, s, edge.kind == EdgeKind::half};
    }
  }
  return out;
}

const Message& incoming(const MessageSet& msgs, const PortLink& link) {
  return link.half ? kAllOnes : msgs.outgoing(link.edge, 1 - link.side);
}

std::optional<double> common_ratio(const Nfg& nfg, const MessageSet& msgs, double tol) {
  const Message* first = nullptr;
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind != EdgeKind::full) continue;
    for (std::size_t s = 0; s < 2; ++s) {
      const Message& m = msgs.outgoing(e, s);
      if (!first) {
        first = &m;
      } else if (std::abs(m[0] - (*first)[0]) > tol || std::abs(m[1] - (*first)[1]) > tol) {
        return std::nullopt;
      }
    }
  }
  if (!first) return std::nullopt;
  if ((*first)[1] == 0.0) return std::numeric_limits<double>::infinity();
  return (*first)[0] / (*first)[1];
}

double max_change(const MessageSet& a, const MessageSet& b) {
  double r = 0.0;
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t k = 0; k < 2; ++k) r = std::max(r, std::abs(a.outgoing(e, s)[k] - b.outgoing(e, s)[k]));
    }
  }
  return r;
}

}  // namespace

MessageSet MessageSet::uniform(const Nfg& nfg) { return MessageSet(nfg.edge_count()); }

MessageSet MessageSet::with_ratio(const Nfg& nfg, double lambda) {
  if (!(lambda >= 0.0)) throw ValidationError("message ratio must be nonnegative");
  MessageSet out(nfg.edge_count());
  const Message m = std::isinf(lambda) ? Message{1.0, 0.0} : Message{lambda / (lambda + 1.0), 1.0 / (lambda + 1.0)};
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind == EdgeKind::full) out.msgs_[e] = {m, m};
  }
  return out;
}

MessageSet MessageSet::random(const Nfg& nfg, SplitMix64& rng) {
  MessageSet out(nfg.edge_count());
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind != EdgeKind::full) continue;
    for (std::size_t s = 0; s < 2; ++s) {
      const double p = 0.05 + 0.9 * rng.unit();
      out.msgs_[e][s] = Message{p, 1.0 - p};
    }
  }
  return out;
}

void MessageSet::set(std::size_t edge, std::size_t side, Message m) { msgs_.at(edge).at(side) = normalized(m); }

MessageSet spa_update(const Nfg& nfg, const MessageSet& msgs, double damping) {
  if (!(damping >= 0.0 && damping < 1.0)) throw ValidationError("damping must lie in [0, 1)");
  if (msgs.edge_count() != nfg.edge_count()) throw ValidationError("message set does not match the NFG");
  const auto links = port_links(nfg);
  MessageSet out = msgs;
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    const auto& table = nfg.node(i).table;
    const std::size_t arity = links[i].size();
    for (std::size_t p = 0; p < arity; ++p) {
      const PortLink& target = links[i][p];
      if (target.half) continue;
      Message sum{0.0, 0.0};
      for (std::size_t idx = 0; idx < table.values().size(); ++idx) {
        double w = table.values()[idx];
        if (w == 0.0) continue;
        for (std::size_t q = 0; q < arity && w != 0.0; ++q) {
          if (q == p) continue;
          w *= incoming(msgs, links[i][q])[(idx >> (arity - 1 - q)) & 1u];
        }
        sum[(idx >> (arity - 1 - p)) & 1u] += w;
      }
      const Message fresh = normalized(sum);
      const Message& old = msgs.outgoing(target.edge, target.side);
      out.set(target.edge, target.side,
              Message{(1.0 - damping) * fresh[0] + damping * old[0], (1.0 - damping) * fresh[1] + damping * old[1]});
    }
  }
  return out;
}

SpaOutcome run_spa(const Nfg& nfg, const MessageSet& init, const SpaOptions& options) {
  require_valid(nfg);
  if (!(options.tol > 0.0)) throw ValidationError("SPA tolerance must be positive");
  MessageSet current = init;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iters; ++it) {
    MessageSet next = spa_update(nfg, current, options.damping);
    residual = max_change(next, current);
    current = std::move(next);
    if (residual <= options.tol) {
      auto lambda = common_ratio(nfg, current, options.tol);
      return SpaFixedPoint{std::move(current), residual, it, lambda};
    }
  }
  return NoConvergence{residual, options.max_iters};
}

double bethe_z_at_fixed_point(const Nfg& nfg, const MessageSet& messages) {
  require_valid(nfg);
  const auto links = port_links(nfg);
  double numerator = 1.0;
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    const auto& table = nfg.node(i).table;
    const std::size_t arity = links[i].size();
    double zf = 0.0;
    for (std::size_t idx = 0; idx < table.values().size(); ++idx) {
      double w = table.values()[idx];
      for (std::size_t q = 0; q < arity && w != 0.0; ++q) {
        w *= incoming(messages, links[i][q])[(idx >> (arity - 1 - q)) & 1u];
      }
      zf += w;
    }
    numerator *= zf;
  }
  double denominator = 1.0;
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind != EdgeKind::full) continue;
    const Message& a = messages.outgoing(e, 0);
    const Message& b = messages.outgoing(e, 1);
    const double ze = a[0] * b[0] + a[1] * b[1];
    if (ze == 0.0) throw Error("edge " + nfg.edge(e).id + " has Z_e = 0");
    denominator *= ze;
  }
  return numerator / denominator;
}

BetheResult bethe_partition_sum(const Nfg& nfg, const MultistartPolicy& policy) {
  require_valid(nfg);
  std::vector<std::pair<std::string, MessageSet>> inits;
  if (policy.uniform) inits.emplace_back("uniform", MessageSet::uniform(nfg));
  SplitMix64 rng(policy.seed);
  for (std::size_t k = 0; k < policy.random_starts; ++k) {
    inits.emplace_back("random#" + std::to_string(k + 1), MessageSet::random(nfg, rng));
  }
  if (policy.symmetric_seeds) {
    if (const auto theta = f0_parameter(nfg); theta && *theta < 0.2) {
      for (const auto& fp : symmetric_fixed_points(*theta)) {
        if (fp.name != "Lambda0") inits.emplace_back(fp.name, MessageSet::with_ratio(nfg, fp.lambda));
      }
    }
  }
  if (inits.empty()) throw ValidationError("multistart policy has no starts");

  struct Run {
    StartResult summary;
    std::optional<SpaFixedPoint> fp;
  };
  auto runs = ordered_map<Run>(inits.size(), [&](std::size_t k) {
    Run run{StartResult{inits[k].first, false, 0.0, 0, std::nullopt, std::nullopt}, std::nullopt};
    try {
      auto outcome = run_spa(nfg, inits[k].second, policy.spa);
      if (auto* fp = std::get_if<SpaFixedPoint>(&outcome)) {
        run.summary.converged = true;
        run.summary.residual = fp->residual;
        run.summary.iterations = fp->iterations;
        run.summary.lambda = fp->lambda;
        run.summary.z_bethe = bethe_z_at_fixed_point(nfg, fp->messages);
        run.fp = std::move(*fp);
      } else {
        const auto& nc = std::get<NoConvergence>(outcome);
        run.summary.residual = nc.residual;
        run.summary.iterations = nc.iterations;
      }
    } catch (const Error&) {
      run.summary.converged = false;
      run.fp.reset();
    }
    return run;
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].fp || !runs[k].summary.z_bethe) continue;
    if (!best || *runs[k].summary.z_bethe > *runs[*best].summary.z_bethe * (1.0 + 1e-12)) best = k;
  }
  std::vector<StartResult> summaries;
  for (const auto& r : runs) summaries.push_back(r.summary);
  if (!best) {
    std::string msg = "SPA did not converge from any start:";
    for (const auto& s : summaries) {
      msg += "\n  " + s.label + ": residual " + std::to_string(s.residual) + " after " + std::to_string(s.iterations) +
             " iterations";
    }
    throw Error(msg);
  }
  return BetheResult{*summaries[*best].z_bethe, *best, std::move(summaries), std::move(*runs[*best].fp)};
}

std::string format_fixed_point(const Nfg& nfg, const SpaFixedPoint& fp) {
  std::string out;
  char buf[256];
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    const Edge& edge = nfg.edge(e);
    if (edge.kind == EdgeKind::half) {
      std::snprintf(buf, sizeof buf, "%s (open)->%s %.12g %.12g\n", edge.id.c_str(),
                    nfg.node(edge.ends[0].node).id.c_str(), 0.5, 0.5);
      out += buf;
      continue;
    }
    for (std::size_t s = 0; s < 2; ++s) {
      const Message& m = fp.messages.outgoing(e, s);
      std::snprintf(buf, sizeof buf, "%s %s->%s %.12g %.12g\n", edge.id.c_str(),
                    nfg.node(edge.ends[s].node).id.c_str(), nfg.node(edge.ends[1 - s].node).id.c_str(), m[0], m[1]);
      out += buf;
    }
  }
  if (fp.lambda) {
    std::snprintf(buf, sizeof buf, "lambda %.12g\n", *fp.lambda);
  } else {
    std::snprintf(buf, sizeof buf, "lambda none\n");
  }
  out += buf;
  std::snprintf(buf, sizeof buf, "residual %.6g\niterations %zu\n", fp.residual, fp.iterations);
  out += buf;
  return out;
}

std::vector<SymmetricFixedPoint> symmetric_fixed_points(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
  if (theta >= 0.2) return {SymmetricFixedPoint{"Lambda0", 1.0, true}};
  const long double t = theta;
  const long double disc = std::sqrt(5.0L * t * t - 6.0L * t + 1.0L);
  const long double plus = (1.0L - 3.0L * t + disc) / (2.0L * t);
  const long double minus = 1.0L / plus;  // roots of the quadratic factor multiply to 1
  return {SymmetricFixedPoint{"Lambda0", 1.0, false},
          SymmetricFixedPoint{"Lambda+", static_cast<double>(plus), true},
          SymmetricFixedPoint{"Lambda-", static_cast<double>(minus), true}};
}

LambdaStep lambda_update(double theta, double lambda) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
  if (std::isinf(lambda)) return LambdaStep{1.0 / theta, 0.0, true};
  if (lambda == 1.0) {
    const double d = (2.0 - 2.0 * theta) / (1.0 + 3.0 * theta);
    return LambdaStep{1.0, d, std::abs(d) < 1.0};
  }
  const double num = lambda * lambda + 2.0 * theta * lambda + theta;
  const double den = theta * lambda * lambda + 2.0 * theta * lambda + 1.0;
  const double dnum = 2.0 * lambda + 2.0 * theta;
  const double dden = 2.0 * theta * lambda + 2.0 * theta;
  const double derivative = (dnum * den - num * dden) / (den * den);
  return LambdaStep{num / den, derivative, std::abs(derivative) < 1.0};
}

double fixed_point_cubic(double theta, double lambda) {
  const long double inv = 1.0L / static_cast<long double>(theta);
  const long double l = lambda;
  return static_cast<double>(((l + (2.0L - inv)) * l + (inv - 2.0L)) * l - 1.0L);
}

}  // namespace bethe
