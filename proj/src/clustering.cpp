#include "pcshift/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace pcshift {

void ClusteringInstance::validate() const {
  if (labels.size() != size()) throw ValidationError("points and labels differ in length");
  if (k < 2 || k > size()) throw ValidationError("need 2 <= k <= number of points");
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) {
      throw ValidationError("label " + std::to_string(l) + " outside 0..k-1");
    }
  }
}

std::size_t ClusteringInstance::distinct_points() const {
  std::set<std::pair<double, double>> seen;
  for (Eigen::Index i = 0; i < points.rows(); ++i) seen.emplace(points(i, 0), points(i, 1));
  return seen.size();
}

ClusteringScenario parse_clustering_scenario(std::string_view name) {
  if (name == "two_phase") return ClusteringScenario::two_phase;
  if (name == "k_shift") return ClusteringScenario::k_shift;
  if (name == "static") return ClusteringScenario::static_mix;
  throw ValidationError("unknown clustering scenario '" + std::string(name) + "'");
}

std::string_view to_string(ClusteringScenario scenario) {
  switch (scenario) {
    case ClusteringScenario::two_phase: return "two_phase";
    case ClusteringScenario::k_shift: return "k_shift";
    case ClusteringScenario::static_mix: return "static";
  }
  return "unknown";
}

std::vector<std::size_t> active_components(ClusteringScenario scenario, std::size_t t,
                                           std::size_t T, const MixtureOptions& options) {
  std::vector<std::size_t> out;
  switch (scenario) {
    case ClusteringScenario::two_phase: {
      const std::size_t parity = 2 * (t - 1) < T ? 0 : 1;
      for (std::size_t c = parity; c < options.classes; c += 2) out.push_back(c);
      break;
    }
    case ClusteringScenario::static_mix:
      for (std::size_t c = 0; c < options.classes; c += 2) out.push_back(c);
      break;
    case ClusteringScenario::k_shift: {
      constexpr std::size_t kClasses = 5;
      const std::size_t omitted = std::min(kClasses - 1, (t - 1) * kClasses / T);
      for (std::size_t c = 0; c < kClasses; ++c) {
        if (c != omitted) out.push_back(c);
      }
      break;
    }
  }
  return out;
}

ClusteringInstance sample_mixture(std::span<const std::size_t> components,
                                  const MixtureOptions& options, Rng& rng) {
  const std::size_t k = components.size();
  if (k < 2) throw ParameterError("a mixture needs at least two components");
  const std::size_t n = options.points_per_round;

  // Centers by rejection in a box that comfortably fits k separated points.
  const double side = options.separation * std::sqrt(static_cast<double>(k)) * 1.6;
  std::vector<Eigen::Vector2d> centers;
  for (std::size_t attempt = 0; centers.size() < k; ++attempt) {
    if (attempt > 10000) throw ResourceError("could not place separated mixture centers");
    const Eigen::Vector2d c(rng.uniform() * side, rng.uniform() * side);
    bool ok = true;
    for (const auto& o : centers) ok = ok && (c - o).norm() >= options.separation;
    if (ok) centers.push_back(c);
  }

  std::vector<double> weight(k);
  for (std::size_t j = 0; j < k; ++j) {
    weight[j] = components[j] % 2 == 0 ? 1.0 + static_cast<double>((components[j] / 2) % 4) : 1.0;
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<std::size_t> count(k);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < k; ++j) {
    count[j] = std::max<std::size_t>(1, static_cast<std::size_t>(
                                            static_cast<double>(n) * weight[j] / total));
    assigned += count[j];
  }
  for (std::size_t j = 0; assigned < n; j = (j + 1) % k, ++assigned) ++count[j];

  ClusteringInstance inst;
  inst.k = k;
  inst.points.resize(static_cast<Eigen::Index>(assigned), 2);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const bool noisy = components[j] % 2 == 1;
    for (std::size_t i = 0; i < count[j]; ++i, ++row) {
      Eigen::Vector2d p = centers[j];
      if (noisy && rng.uniform() < options.outlier_rate) {
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        p += options.outlier_distance * Eigen::Vector2d(std::cos(angle), std::sin(angle));
      } else {
        p += options.spread * Eigen::Vector2d(rng.normal(), rng.normal());
      }
      inst.points.row(row) = p.transpose();
      inst.labels.push_back(static_cast<int>(j));
    }
  }
  return inst;
}

ClusteringInstance load_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open point file " + path.string());
  std::vector<Eigen::Vector2d> pts;
  std::vector<long> raw;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0;
    double y = 0.0;
    long label = 0;
    if (!(row >> x >> y >> label)) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("malformed point row: " + line);
    }
    first = false;
    pts.emplace_back(x, y);
    raw.push_back(label);
  }
  std::map<long, int> remap;
  for (long l : raw) remap.emplace(l, 0);
  int next = 0;
  for (auto& [l, id] : remap) id = next++;

  ClusteringInstance inst;
  inst.k = remap.size();
  inst.points.resize(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    inst.points.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    inst.labels.push_back(remap[raw[i]]);
  }
  inst.validate();
  return inst;
}

std::vector<std::size_t> max_assignment(const Eigen::MatrixXd& score) {
  // Hungarian method on cost = max - score, 1-based potentials.
  const auto n = static_cast<std::size_t>(score.rows());
  const double top = n == 0 ? 0.0 : score.maxCoeff();
  auto cost = [&](std::size_t i, std::size_t j) {
    return top - score(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

double hamming_cost(std::span<const int> predicted, std::span<const int> target, std::size_t k) {
  if (predicted.size() != target.size() || target.empty()) {
    throw ValidationError("hamming cost needs equal nonempty labelings");
  }
  const auto K = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t i = 0; i < target.size(); ++i) confusion(predicted[i], target[i]) += 1.0;
  const auto match = max_assignment(confusion);
  double agree = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    agree += confusion(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(match[r]));
  }
  return 1.0 - agree / static_cast<double>(target.size());
}

namespace {

std::vector<int> assign(const PointMatrix& pts, const PointMatrix& centers) {
  std::vector<int> out(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    Eigen::Index best = 0;
    (centers.rowwise() - pts.row(i)).rowwise().squaredNorm().minCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

void lloyd_step(const PointMatrix& pts, PointMatrix& centers) {
  const auto labels = assign(pts, centers);
  PointMatrix sum = PointMatrix::Zero(centers.rows(), 2);
  Eigen::VectorXd n = Eigen::VectorXd::Zero(centers.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    sum.row(labels[static_cast<std::size_t>(i)]) += pts.row(i);
    n[labels[static_cast<std::size_t>(i)]] += 1.0;
  }
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    if (n[c] > 0.0) centers.row(c) = sum.row(c) / n[c];
  }
}

}  // namespace

std::vector<double> lloyds_payoffs(const ClusteringInstance& instance,
                                   std::span<const double> alpha_bars, Rng& rng) {
  instance.validate();
  const auto& pts = instance.points;
  const auto n = pts.rows();
  const std::size_t k = instance.k;
  std::vector<double> draws(k);
  for (double& d : draws) d = rng.uniform();

  std::vector<double> out;
  out.reserve(alpha_bars.size());
  Eigen::ArrayXd dmin(n);
  Eigen::ArrayXd logw(n);
  for (double a : alpha_bars) {
    PointMatrix centers(static_cast<Eigen::Index>(k), 2);
    auto first = static_cast<Eigen::Index>(draws[0] * static_cast<double>(n));
    centers.row(0) = pts.row(std::min(first, n - 1));
    dmin = (pts.rowwise() - centers.row(0)).rowwise().norm().array();
    for (std::size_t c = 1; c < k; ++c) {
      // Weight d^a in log scale; points already chosen (d = 0) get weight 0.
      for (Eigen::Index i = 0; i < n; ++i) {
        logw[i] = dmin[i] > 0.0 ? a * std::log(dmin[i])
                                : -std::numeric_limits<double>::infinity();
      }
      const double m = logw.maxCoeff();
      Eigen::Index pick = 0;
      if (std::isfinite(m)) {
        const Eigen::ArrayXd w = (logw - m).exp();
        const double target = draws[c] * w.sum();
        double cum = 0.0;
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          cum += w[i];
          if (target < cum) {
            pick = i;
            break;
          }
        }
        while (w[pick] == 0.0 && pick > 0) --pick;
      }
      centers.row(static_cast<Eigen::Index>(c)) = pts.row(pick);
      dmin = dmin.min((pts.rowwise() - pts.row(pick)).rowwise().norm().array());
    }
    lloyd_step(pts, centers);
    lloyd_step(pts, centers);
    const auto labels = assign(pts, centers);
    out.push_back(1.0 - hamming_cost(labels, instance.labels, k));
  }
  return out;
}

PiecewiseConstant grid_step_function(std::span<const double> cell_values) {
  if (cell_values.empty()) throw ParameterError("grid needs at least one cell");
  const double n = static_cast<double>(cell_values.size());
  std::vector<double> bp;
  std::vector<double> v{cell_values[0]};
  for (std::size_t i = 1; i < cell_values.size(); ++i) {
    if (cell_values[i] != v.back()) {
      bp.push_back(static_cast<double>(i) / n);
      v.push_back(cell_values[i]);
    }
  }
  return PiecewiseConstant(std::move(bp), std::move(v));
}

std::vector<double> alpha_grid(std::size_t grid_n) {
  std::vector<double> out(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    out[i] = 10.0 * static_cast<double>(i) / static_cast<double>(grid_n);
  }
  return out;
}

UtilityStream clustering_stream(ClusteringScenario scenario, std::size_t T, std::size_t grid_n,
                                Rng& rng, const MixtureOptions& options) {
  if (T == 0) throw ParameterError("clustering stream needs T >= 1");
  if (grid_n < 64) throw ParameterError("clustering grid needs grid_n >= 64");
  const auto alphas = alpha_grid(grid_n);
  UtilityStream out;
  for (std::size_t t = 1; t <= T; ++t) {
    const auto comps = active_components(scenario, t, T, options);
    ClusteringInstance inst;
    do {
      Rng round(rng());
      inst = sample_mixture(comps, options, round);
    } while (inst.distinct_points() < inst.k);
    Rng seeding(rng());
    out.functions.push_back(grid_step_function(lloyds_payoffs(inst, alphas, seeding)));
  }
  out.declared_beta = 0.5;
  out.provenance = {{"generator", "clustering"},
                    {"params",
                     {{"scenario", to_string(scenario)},
                      {"T", T},
                      {"grid_n", grid_n},
                      {"points_per_round", options.points_per_round},
                      {"separation", options.separation},
                      {"spread", options.spread},
                      {"outlier_rate", options.outlier_rate},
                      {"outlier_distance", options.outlier_distance},
                      {"classes", options.classes}}},
                    {"alpha_bar_scale", 10.0}};
  return out;
}

UtilityStream clustering_stream(const ClusteringInstance& pool, std::size_t T,
                                std::size_t grid_n, Rng& rng, std::size_t points_per_round) {
  pool.validate();
  if (grid_n < 64) throw ParameterError("clustering grid needs grid_n >= 64");
  if (points_per_round < pool.k || points_per_round > pool.size()) {
    throw ParameterError("points_per_round must lie in [k, pool size]");
  }
  const auto alphas = alpha_grid(grid_n);
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  UtilityStream out;
  for (std::size_t t = 1; t <= T; ++t) {
    ClusteringInstance inst;
    std::size_t attempts = 0;
    do {
      if (++attempts > 1000) throw ValidationError("point pool has too few distinct points");
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<int> present(pool.k, -1);
      inst.points.resize(static_cast<Eigen::Index>(points_per_round), 2);
      inst.labels.clear();
      int next = 0;
      for (std::size_t i = 0; i < points_per_round; ++i) {
        inst.points.row(static_cast<Eigen::Index>(i)) =
            pool.points.row(static_cast<Eigen::Index>(idx[i]));
        int& id = present[static_cast<std::size_t>(pool.labels[idx[i]])];
        if (id < 0) id = next++;
        inst.labels.push_back(id);
      }
      inst.k = static_cast<std::size_t>(next);
    } while (inst.k < 2 || inst.distinct_points() < inst.k);
    Rng seeding(rng());
    out.functions.push_back(grid_step_function(lloyds_payoffs(inst, alphas, seeding)));
  }
  out.declared_beta = 0.5;
  out.provenance = {{"generator", "clustering_points"},
                    {"params", {{"T", T}, {"grid_n", grid_n}, {"points", points_per_round}}},
                    {"alpha_bar_scale", 10.0}};
  return out;
}

}  // namespace pcshift
