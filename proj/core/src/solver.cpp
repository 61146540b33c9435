#include "eoflab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "eoflab/errors.hpp"
#include "eoflab/rng.hpp"

namespace eoflab {

namespace {

constexpr double kWeightFloor = 1e-14;

/// Spectral data of the state being decomposed: columns sqrt(lambda_k)|e_k>.
struct EigenEnsemble {
  Mat scaled;       // d x r
  la::RVec values;  // descending, length r
  int rank() const { return static_cast<int>(scaled.cols()); }
};

EigenEnsemble eigen_ensemble(const DensityOperator& rho) {
  la::Eigensystem es = la::hermitian_eig(rho.mat());
  int d = rho.dim();
  double cut = la::kRankCut * std::max(0.0, es.values[d - 1]);
  std::vector<int> kept;
  for (int i = d - 1; i >= 0; --i) {
    if (es.values[i] > cut) kept.push_back(i);
  }
  EigenEnsemble out;
  out.scaled.resize(d, static_cast<int>(kept.size()));
  out.values.resize(static_cast<int>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.values[static_cast<int>(k)] = es.values[kept[k]];
    out.scaled.col(static_cast<int>(k)) =
        std::sqrt(es.values[kept[k]]) * es.vectors.col(kept[k]);
  }
  return out;
}

/// theta (m^2 reals) -> Hermitian m x m.
void fill_hermitian(const std::vector<double>& theta, Mat& h) {
  int m = static_cast<int>(h.rows());
  int idx = 0;
  for (int i = 0; i < m; ++i) {
    h(i, i) = theta[static_cast<std::size_t>(idx++)];
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double re = theta[static_cast<std::size_t>(idx++)];
      double im = theta[static_cast<std::size_t>(idx++)];
      h(i, j) = Cplx(re, im);
      h(j, i) = Cplx(re, -im);
    }
  }
}

/// Objective over the chart W(theta) = exp(i H(theta)) W0.
class Objective {
 public:
  Objective(const EigenEnsemble& ens, int members,
            const std::function<double(const Vec&)>& member_entropy)
      : ens_(ens),
        m_(members),
        entropy_(member_entropy),
        w0_(Mat::Zero(members, ens.rank())),
        h_(members, members) {
    w0_.topRows(ens.rank()) = Mat::Identity(ens.rank(), ens.rank());
  }

  int members() const { return m_; }
  int param_count() const { return m_ * m_; }
  const Mat& base() const { return w0_; }
  void set_base(const Mat& w0) { w0_ = w0; }

  Mat mixing(const std::vector<double>& theta) const {
    Mat h(m_, m_);
    fill_hermitian(theta, h);
    return la::exp_i_hermitian(h) * w0_;
  }

  double operator()(const std::vector<double>& theta) const {
    ++evals_;
    fill_hermitian(theta, h_);
    Mat w = la::exp_i_hermitian(h_) * w0_;
    // members_i = sum_k W_ik sqrt(lambda_k) |e_k>
    Mat members = ens_.scaled * w.transpose();
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      double wi = members.col(i).squaredNorm();
      if (wi <= kWeightFloor) continue;
      total += wi * entropy_(Vec(members.col(i) / std::sqrt(wi)));
    }
    return total;
  }

  long evals() const { return evals_; }
  void reset_evals() { evals_ = 0; }

 private:
  const EigenEnsemble& ens_;
  int m_;
  const std::function<double(const Vec&)>& entropy_;
  Mat w0_;
  mutable Mat h_;
  mutable long evals_ = 0;
};

/// Plain Nelder-Mead on the chart parameters. Returns best point found.
struct NmOutcome {
  std::vector<double> point;
  double value = 0.0;
  bool tol_converged = false;
};

NmOutcome nelder_mead(const Objective& f, std::vector<double> start,
                      double step, double tol, long max_evals) {
  int n = static_cast<int>(start.size());
  if (static_cast<long>(n) + 1 > max_evals) {
    // the simplex alone would blow the budget; report the start point and
    // let the gradient stage take over
    NmOutcome out;
    out.value = f(start);
    out.point = std::move(start);
    return out;
  }
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  pts.push_back(start);
  vals.push_back(f(start));
  for (int j = 0; j < n; ++j) {
    std::vector<double> p = start;
    p[static_cast<std::size_t>(j)] += step;
    pts.push_back(p);
    vals.push_back(f(p));
  }
  long used = n + 1;
  auto order = [&] {
    std::vector<int> idx(static_cast<std::size_t>(n) + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return vals[static_cast<std::size_t>(a)] <
             vals[static_cast<std::size_t>(b)];
    });
    std::vector<std::vector<double>> np;
    std::vector<double> nv;
    for (int i : idx) {
      np.push_back(pts[static_cast<std::size_t>(i)]);
      nv.push_back(vals[static_cast<std::size_t>(i)]);
    }
    pts = std::move(np);
    vals = std::move(nv);
  };
  order();

  NmOutcome out;
  while (used < max_evals) {
    if (vals.back() - vals.front() < tol) {
      out.tol_converged = true;
      break;
    }
    // centroid of all but the worst
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        c[static_cast<std::size_t>(j)] +=
            pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / n;
      }
    }
    auto blend = [&](double coef) {
      std::vector<double> p(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        p[static_cast<std::size_t>(j)] =
            c[static_cast<std::size_t>(j)] +
            coef * (pts.back()[static_cast<std::size_t>(j)] -
                    c[static_cast<std::size_t>(j)]);
      }
      return p;
    };
    std::vector<double> refl = blend(-1.0);
    double frefl = f(refl);
    ++used;
    if (frefl < vals.front()) {
      std::vector<double> expd = blend(-2.0);
      double fexpd = f(expd);
      ++used;
      if (fexpd < frefl) {
        pts.back() = expd;
        vals.back() = fexpd;
      } else {
        pts.back() = refl;
        vals.back() = frefl;
      }
    } else if (frefl < vals[static_cast<std::size_t>(n) - 1]) {
      pts.back() = refl;
      vals.back() = frefl;
    } else {
      std::vector<double> contr = blend(0.5);
      double fcontr = f(contr);
      ++used;
      if (fcontr < vals.back()) {
        pts.back() = contr;
        vals.back() = fcontr;
      } else {
        // shrink toward the best vertex
        for (int i = 1; i <= n; ++i) {
          for (int j = 0; j < n; ++j) {
            pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                0.5 * (pts[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(j)] +
                       pts[0][static_cast<std::size_t>(j)]);
          }
          vals[static_cast<std::size_t>(i)] =
              f(pts[static_cast<std::size_t>(i)]);
          ++used;
        }
      }
    }
    order();
  }
  out.point = pts.front();
  out.value = vals.front();
  return out;
}

/// Central-difference gradient descent with backtracking, polishing the
/// simplex result. Returns true when it stopped on the tolerance.
bool fd_refine(const Objective& f, std::vector<double>& theta, double& value,
               int max_iters, double tol, long max_evals) {
  int n = static_cast<int>(theta.size());
  if (2L * n + 16 > max_evals) return false;  // one gradient would overrun
  const double h = 1e-5;
  double step = 0.5;
  long used = 0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> grad(static_cast<std::size_t>(n));
    double gnorm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      std::vector<double> p = theta;
      p[static_cast<std::size_t>(j)] += h;
      double fp = f(p);
      p[static_cast<std::size_t>(j)] -= 2 * h;
      double fm = f(p);
      used += 2;
      grad[static_cast<std::size_t>(j)] = (fp - fm) / (2 * h);
      gnorm2 += grad[static_cast<std::size_t>(j)] *
                grad[static_cast<std::size_t>(j)];
    }
    if (gnorm2 < 1e-18) return true;
    bool improved = false;
    double trial_step = step;
    for (int ls = 0; ls < 14; ++ls) {
      std::vector<double> p = theta;
      for (int j = 0; j < n; ++j) {
        p[static_cast<std::size_t>(j)] -=
            trial_step * grad[static_cast<std::size_t>(j)];
      }
      double fp = f(p);
      ++used;
      if (fp < value - 1e-16) {
        double gain = value - fp;
        theta = std::move(p);
        value = fp;
        step = trial_step * 1.5;
        improved = true;
        if (gain < tol) return true;
        break;
      }
      trial_step *= 0.35;
    }
    if (!improved) return true;  // no descent direction left at this scale
    if (used >= max_evals) return false;
  }
  return false;
}

struct RestartPlanEntry {
  Mat base;       // W0 for this restart
  int index = 0;  // restart index inside its member count, for tie breaks
};

}  // namespace

namespace detail {

EofResult minimize_average_entropy(
    const DensityOperator& rho,
    const std::function<double(const Vec&)>& member_entropy,
    const SolverConfig& cfg) {
  EofResult result;
  result.seed = cfg.seed;

  EigenEnsemble ens = eigen_ensemble(rho);
  int r = ens.rank();

  // pure states need no search: the only decomposition is the state itself
  if (r == 1) {
    Vec k = ens.scaled.col(0) / ens.scaled.col(0).norm();
    result.argmin = PureDecomposition({1.0}, {Ket(k)});
    result.value = member_entropy(k);
    result.converged = true;
    result.best_member_count = 1;
    result.best_restart = 0;
    result.trace.restarts.push_back({1, 0, result.value, 1, true});
    result.trace.total_evals = 1;
    return result;
  }

  int cap = cfg.max_members > 0 ? cfg.max_members : r * r;
  cap = std::max(cap, r);
  std::vector<int> counts;
  if (!cfg.member_counts.empty()) {
    counts = cfg.member_counts;
  } else {
    // the r^2 rung only stays in the default ladder while it is affordable;
    // high-rank states would otherwise ask for m^2 = r^4 chart parameters
    counts = {r, r + 1, 2 * r};
    if (r * r <= 24) counts.push_back(r * r);
  }
  std::erase_if(counts, [&](int m) { return m < r || m > cap; });
  // caller-supplied starting decompositions must fit into some swept count
  for (const PureDecomposition& d : cfg.warm_starts) {
    if (d.size() >= r && d.dim() == rho.dim()) counts.push_back(d.size());
  }
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  if (counts.empty()) counts = {r};

  // warm starts supplied by the caller become W0 charts; a decomposition
  // with m members maps onto the smallest swept count >= m (padded rows)
  auto warm_base = [&](const PureDecomposition& d, int m) -> Mat {
    Mat w = Mat::Zero(m, r);
    for (int i = 0; i < d.size() && i < m; ++i) {
      Vec member = std::sqrt(d.weights[static_cast<std::size_t>(i)]) *
                   d.kets[static_cast<std::size_t>(i)].amps;
      for (int k = 0; k < r; ++k) {
        // coefficients against the scaled eigenbasis
        double lk = ens.values[k];
        w(i, k) = (ens.scaled.col(k).adjoint() * member)(0, 0) / lk;
      }
    }
    // polish to an exact isometry through the Hermitian kernel
    Mat gram = w.adjoint() * w;
    la::Eigensystem es = la::hermitian_eig(gram);
    la::RVec inv(es.values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      inv[i] = es.values[i] > 1e-14 ? 1.0 / std::sqrt(es.values[i]) : 0.0;
    }
    return w * es.vectors * inv.asDiagonal() * es.vectors.adjoint();
  };

  double best_value = std::numeric_limits<double>::infinity();
  Mat best_w;
  int best_m = 0, best_restart = -1;
  bool best_converged = false;
  Mat chain_w;  // best mixing of the previous member count

  for (std::size_t ci = 0; ci < counts.size(); ++ci) {
    int m = counts[ci];
    int n = m * m;
    bool first_round = (ci == 0);
    long nm_budget = cfg.nm_max_evals > 0
                         ? cfg.nm_max_evals
                         : (first_round ? std::min<long>(240L * n, 6000L)
                                        : std::min<long>(60L * n, 1500L));
    long fd_budget = first_round ? std::min<long>(400L * n, 24000L)
                                 : std::min<long>(60L * n, 4000L);
    int restarts = first_round ? cfg.restarts : std::max(1, cfg.sweep_restarts);
    if (n > 100) restarts = std::max(3, restarts / 4);  // large charts

    std::vector<RestartPlanEntry> plan;
    // warm starts first, then the previous count's champion, then the
    // eigen-ensemble chart, then seeded random charts
    for (const PureDecomposition& d : cfg.warm_starts) {
      bool fits_here = d.size() <= m && d.dim() == rho.dim() &&
                       (first_round || d.size() > counts[ci - 1]);
      if (fits_here) {
        plan.push_back({warm_base(d, m), static_cast<int>(plan.size())});
      }
    }
    if (!first_round && chain_w.size() > 0) {
      Mat padded = Mat::Zero(m, r);
      padded.topRows(chain_w.rows()) = chain_w;
      plan.push_back({padded, static_cast<int>(plan.size())});
    }
    {
      Mat eye = Mat::Zero(m, r);
      eye.topRows(r) = Mat::Identity(r, r);
      plan.push_back({eye, static_cast<int>(plan.size())});
    }
    int random_needed = std::max(0, restarts - static_cast<int>(plan.size()));
    for (int k = 0; k < random_needed; ++k) {
      Rng rng(Rng::derive(cfg.seed, 1000 * static_cast<std::uint64_t>(m) +
                                        static_cast<std::uint64_t>(k)));
      plan.push_back(
          {MixingMatrix::random(m, r, rng).m, static_cast<int>(plan.size())});
    }

    struct RestartOutcome {
      RestartRecord record;
      Mat final_w;
    };
    auto run_restart = [&](const RestartPlanEntry& entry) -> RestartOutcome {
      Objective local(ens, m, member_entropy);
      local.set_base(entry.base);
      std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
      NmOutcome nm = nelder_mead(local, theta, 0.35, cfg.tol, nm_budget);
      // recenter the chart on the simplex result before polishing
      local.set_base(local.mixing(nm.point));
      std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
      double value = local(zero);
      bool tol_stop =
          fd_refine(local, zero, value, cfg.max_iters, cfg.tol, fd_budget);
      Mat final_w = local.mixing(zero);
      RestartRecord rec;
      rec.member_count = m;
      rec.restart_index = entry.index;
      rec.value = value;
      rec.evals = local.evals();
      rec.converged = tol_stop;
      return {rec, final_w};
    };

    std::vector<RestartOutcome> outcomes(plan.size());
    if (cfg.threads > 1) {
      std::vector<std::future<RestartOutcome>> futs;
      futs.reserve(plan.size());
      for (const auto& entry : plan) {
        futs.push_back(std::async(std::launch::async, run_restart, entry));
      }
      for (std::size_t i = 0; i < futs.size(); ++i) {
        outcomes[i] = futs[i].get();
      }
    } else {
      for (std::size_t i = 0; i < plan.size(); ++i) {
        outcomes[i] = run_restart(plan[i]);
      }
    }

    // deterministic reduction: min by value, ties to the lower restart index
    Mat round_best_w;
    double round_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const RestartRecord& rec = outcomes[i].record;
      result.trace.restarts.push_back(rec);
      result.trace.total_evals += rec.evals;
      if (rec.value < round_best) {
        round_best = rec.value;
        round_best_w = outcomes[i].final_w;
      }
      // noise-level improvements at a larger member count do not displace
      // the incumbent, so the reported count is the smallest one attaining
      // the minimum
      if (rec.value < best_value - 5e-10) {
        best_value = rec.value;
        best_w = outcomes[i].final_w;
        best_m = m;
        best_restart = rec.restart_index;
        best_converged = rec.converged;
      }
    }
    chain_w = round_best_w;
  }

  result.value = best_value;
  result.best_member_count = best_m;
  result.best_restart = best_restart;
  result.converged = best_converged;
  result.hit_member_cap = (best_m == counts.back() && counts.back() == cap);

  // assemble the argmin decomposition from the winning mixing matrix
  Mat members = ens.scaled * best_w.transpose();
  std::vector<double> weights;
  std::vector<Ket> kets;
  for (int i = 0; i < members.cols(); ++i) {
    double wi = members.col(i).squaredNorm();
    if (wi <= 1e-12) continue;
    weights.push_back(wi);
    kets.push_back(Ket(Vec(members.col(i))));
  }
  result.argmin = PureDecomposition(std::move(weights), std::move(kets));
  // report the exact average of the assembled argmin, not the optimizer's
  // running value, so the EofResult invariant holds by construction
  double exact = 0.0;
  for (int i = 0; i < result.argmin.size(); ++i) {
    exact += result.argmin.weights[static_cast<std::size_t>(i)] *
             member_entropy(result.argmin.kets[static_cast<std::size_t>(i)].amps);
  }
  result.value = exact;
  return result;
}

}  // namespace detail

double average_entanglement(const PureDecomposition& d,
                            const FactorLayout& layout) {
  if (d.size() == 0) {
    throw ParameterError("average over an empty decomposition");
  }
  layout.check_against(d.dim());
  la::IndexSplit split(layout.dims, layout.keep);
  double total = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    total += d.weights[static_cast<std::size_t>(i)] *
             la::entropy_bits(la::reduced_from_ket(
                 d.kets[static_cast<std::size_t>(i)].amps, split));
  }
  return total;
}

EofResult eof(const DensityOperator& rho, const FactorLayout& layout,
              const SolverConfig& cfg) {
  layout.check_against(rho.dim());
  la::IndexSplit split(layout.dims, layout.keep);
  auto member_entropy = [&split](const Vec& psi) {
    return la::entropy_bits(la::reduced_from_ket(psi, split));
  };
  return detail::minimize_average_entropy(rho, member_entropy, cfg);
}

SubalgebraEntropyResult entropy_of_subalgebra(const DensityOperator& rho,
                                              const FactorLayout& layout,
                                              const SolverConfig& cfg) {
  SubalgebraEntropyResult out;
  out.restricted_entropy = von_neumann_entropy(restrict_state(rho, layout));
  out.minimization = eof(rho, layout, cfg);
  out.value = out.restricted_entropy - out.minimization.value;
  return out;
}

SubalgebraEntropyResult entropy_of_subalgebra(const DensityOperator& rho,
                                              const SubalgebraMap& map,
                                              const SolverConfig& cfg) {
  if (map.dim() != rho.dim()) {
    throw ParameterError("subalgebra map dimension does not match the state");
  }
  SubalgebraEntropyResult out;
  out.restricted_entropy = la::shannon_bits(map.apply(rho.mat()));
  auto member_entropy = [&map](const Vec& psi) {
    return la::shannon_bits(map.apply_ket(psi));
  };
  out.minimization = detail::minimize_average_entropy(rho, member_entropy, cfg);
  out.value = out.restricted_entropy - out.minimization.value;
  return out;
}

AccessibleInfoResult accessible_information(const Ensemble& e,
                                            const SolverConfig& cfg) {
  SubalgebraMap map = subalgebra_map_from_ensemble(e);
  AccessibleInfoResult out;
  out.label_entropy = la::shannon_bits(map.apply(e.mixture.mat()));
  auto member_entropy = [&map](const Vec& psi) {
    return la::shannon_bits(map.apply_ket(psi));
  };
  out.minimization =
      detail::minimize_average_entropy(e.mixture, member_entropy, cfg);
  out.value = out.label_entropy - out.minimization.value;
  return out;
}

double average_label_entropy(const PureDecomposition& d,
                             const SubalgebraMap& map) {
  if (d.size() == 0) {
    throw ParameterError("average over an empty decomposition");
  }
  double total = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    total += d.weights[static_cast<std::size_t>(i)] *
             la::shannon_bits(
                 map.apply_ket(d.kets[static_cast<std::size_t>(i)].amps));
  }
  return total;
}

}  // namespace eoflab
