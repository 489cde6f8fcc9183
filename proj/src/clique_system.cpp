#include "gmlm/clique_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace gmlm {

namespace {

// log C(a, m) via a running log-factorial table; a <= 64.
struct LogBinom {
  double lfact[65];
  explicit LogBinom(int a) {
    lfact[0] = 0.0;
    for (int i = 1; i <= a; ++i) lfact[i] = lfact[i - 1] + std::log(static_cast<double>(i));
  }
  double operator()(int a, int m) const { return lfact[a] - lfact[m] - lfact[a - m]; }
};

// Class weights for resampling `a` clique sites with the remaining clique
// spins summing to s_fix: w(m) = C(a,m) exp(h_c t + J (t^2/2 + t s_fix)),
// t = 2m - a. Constant terms are dropped; the result is normalized.
FiniteDistribution class_distribution(const CliqueSystem& sys, int a, int s_fix) {
  const LogBinom lb(a);
  std::vector<double> lw(a + 1);
  LogSumExp acc;
  for (int m = 0; m <= a; ++m) {
    const double t = 2.0 * m - a;
    lw[m] = lb(a, m) + sys.clique_field * t + sys.coupling * (0.5 * t * t + t * s_fix);
    acc.add(lw[m]);
  }
  const double lz = acc.value();
  FiniteDistribution out;
  out.p.resize(a + 1);
  for (int m = 0; m <= a; ++m) out.p[m] = std::exp(lw[m] - lz);
  return out;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void CliqueSystem::validate() const {
  require(n >= 2 && n <= 64, ErrKind::Capacity, "wide system: n must be in [2, 64]");
  require(clique.size() >= 2, ErrKind::Validation, "wide system: clique needs >= 2 members");
  require(fields.size() == static_cast<std::size_t>(n), ErrKind::Validation,
          "wide system: fields size must equal n");
  for (double v : fields)
    require(std::isfinite(v), ErrKind::Validation, "wide system: fields must be finite");
  require(std::isfinite(coupling), ErrKind::Validation, "wide system: coupling must be finite");
  WideConfig mask = 0;
  int prev = -1;
  for (int i : clique) {
    require(i > prev, ErrKind::Validation, "wide system: clique must ascend without repeats");
    require(i >= 0 && i < n, ErrKind::Validation, "wide system: clique member out of range");
    require(fields[i] == clique_field, ErrKind::Validation,
            "wide system: clique fields must all equal clique_field");
    mask |= WideConfig{1} << i;
    prev = i;
  }
  require(mask == cmask, ErrKind::Validation, "wide system: cmask out of sync with clique");
}

CliqueScales CliqueSystem::scales() const {
  CliqueScales v;
  v.n = n;
  v.cmask = n <= 32 ? static_cast<std::uint32_t>(cmask) : 0;
  v.c = clique_size();
  v.coupling = coupling;
  v.h_g = clique_field * clique_size();
  v.h_l1 = 0.0;
  v.h_out = 0.0;
  for (int i = 0; i < n; ++i) {
    v.h_l1 += std::abs(fields[i]);
    if (!((cmask >> i) & 1u)) v.h_out += std::abs(fields[i]);
  }
  v.j0 = coupling - v.h_l1;
  return v;
}

CliqueSystem make_clique_system(int n, std::vector<int> clique, double coupling,
                                std::vector<double> fields) {
  CliqueSystem sys;
  sys.n = n;
  sys.clique = std::move(clique);
  sys.coupling = coupling;
  sys.fields = std::move(fields);
  require(!sys.clique.empty() && !sys.fields.empty(), ErrKind::Validation,
          "wide system: clique and fields must be nonempty");
  require(sys.clique.front() >= 0 &&
              sys.clique.front() < static_cast<int>(sys.fields.size()),
          ErrKind::Validation, "wide system: clique member out of range");
  sys.clique_field = sys.fields[sys.clique.front()];
  for (int i : sys.clique) sys.cmask |= WideConfig{1} << i;
  sys.validate();
  return sys;
}

double wide_log_weight(const CliqueSystem& sys, WideConfig x) {
  const int c = sys.clique_size();
  const int t = 2 * std::popcount(x & sys.cmask) - c;
  double acc = sys.coupling * 0.5 * (static_cast<double>(t) * t - c);
  for (int i = 0; i < sys.n; ++i) acc += sys.fields[i] * wide_spin(x, i);
  return acc;
}

WideConfig clique_kgibbs_step(const CliqueSystem& sys, WideConfig x, int k, RngStream& rng) {
  require(k >= 1 && k <= sys.n, ErrKind::Validation, "wide k-Gibbs: k out of range");
  // Uniform size-k block.
  int perm[64];
  std::iota(perm, perm + sys.n, 0);
  WideConfig block = 0;
  for (int t = 0; t < k; ++t) {
    const int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.n - t)));
    std::swap(perm[t], perm[j]);
    block |= WideConfig{1} << perm[t];
  }
  // Clique part: class, then a uniform subset of that size.
  const WideConfig resampled = block & sys.cmask;
  const int a = std::popcount(resampled);
  const int kept = std::popcount(x & sys.cmask & ~block);
  const int s_fix = 2 * kept - (sys.clique_size() - a);
  WideConfig y = x & ~block;
  if (a > 0) {
    const FiniteDistribution cls = class_distribution(sys, a, s_fix);
    const int m = static_cast<int>(cls.sample(rng));
    int members[64];
    int cnt = 0;
    for (int i : sys.clique)
      if ((block >> i) & 1u) members[cnt++] = i;
    for (int t = 0; t < m; ++t) {
      const int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(a - t)));
      std::swap(members[t], members[j]);
      y |= WideConfig{1} << members[t];
    }
  }
  // Independent outside sites, ascending.
  for (int i = 0; i < sys.n; ++i) {
    if (!((block >> i) & 1u) || ((sys.cmask >> i) & 1u)) continue;
    if (rng.uniform01() < sigmoid(2.0 * sys.fields[i])) y |= WideConfig{1} << i;
  }
  return y;
}

WideConfig clique_independent_parallel_step(const CliqueSystem& sys, WideConfig x,
                                            RngStream& rng) {
  const int c = sys.clique_size();
  const int t = 2 * std::popcount(x & sys.cmask) - c;
  WideConfig y = 0;
  for (int i = 0; i < sys.n; ++i) {
    double local = sys.fields[i];
    if ((sys.cmask >> i) & 1u) local += sys.coupling * (t - wide_spin(x, i));
    if (rng.uniform01() < sigmoid(2.0 * local)) y |= WideConfig{1} << i;
  }
  return y;
}

FiniteDistribution clique_block_conditional(const CliqueSystem& sys, WideConfig x,
                                            WideConfig block) {
  sys.validate();
  require(block != 0 && (sys.n == 64 || (block >> sys.n) == 0), ErrKind::Validation,
          "wide conditional: block must be a nonempty subset of the sites");
  const int k = std::popcount(block);
  require(k <= 13, ErrKind::Capacity, "wide conditional: |block| capped at 13");
  const WideConfig resampled = block & sys.cmask;
  const int a = std::popcount(resampled);
  const int kept = std::popcount(x & sys.cmask & ~block);
  const int s_fix = 2 * kept - (sys.clique_size() - a);
  const FiniteDistribution cls =
      a > 0 ? class_distribution(sys, a, s_fix) : FiniteDistribution{{1.0}};
  const LogBinom lb(a);
  // Block members ascending; per completion, multiply the class mass split
  // uniformly over its subsets with the independent outside-site masses.
  std::vector<int> members;
  for (int i = 0; i < sys.n; ++i)
    if ((block >> i) & 1u) members.push_back(i);
  FiniteDistribution out;
  out.p.assign(std::size_t{1} << k, 0.0);
  for (std::size_t idx = 0; idx < out.p.size(); ++idx) {
    double prob = 1.0;
    int m = 0;
    for (int b = 0; b < k; ++b) {
      const int site = members[b];
      const bool plus = (idx >> b) & 1u;
      if ((sys.cmask >> site) & 1u) {
        if (plus) ++m;
      } else {
        const double p_plus = sigmoid(2.0 * sys.fields[site]);
        prob *= plus ? p_plus : 1.0 - p_plus;
      }
    }
    if (a > 0) prob *= cls.p[m] * std::exp(-lb(a, m));
    out.p[idx] = prob;
  }
  return out;
}

bool clique_in_mode(const CliqueSystem& sys, int sign, WideConfig x) {
  return sign > 0 ? (x & sys.cmask) == sys.cmask : (x & sys.cmask) == 0;
}

WideHittingTrials clique_hitting_trials(const CliqueSystem& sys, bool k_gibbs, int k,
                                        WideConfig start,
                                        const std::function<bool(WideConfig)>& target,
                                        int steps, int trials, const RngStream& root) {
  require(trials >= 1 && steps >= 0, ErrKind::Validation,
          "wide hitting trials: need at least one trial and a nonnegative budget");
  WideHittingTrials out;
  out.trials = trials;
  out.hit_step.assign(trials, -1);
  for (int t = 0; t < trials; ++t) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(t));
    WideConfig x = start;
    if (target(x)) {
      out.hit_step[t] = 0;
    } else {
      for (int s = 1; s <= steps; ++s) {
        x = k_gibbs ? clique_kgibbs_step(sys, x, k, rng)
                    : clique_independent_parallel_step(sys, x, rng);
        if (target(x)) {
          out.hit_step[t] = s;
          break;
        }
      }
    }
    if (out.hit_step[t] >= 0) ++out.hits;
  }
  return out;
}

}  // namespace gmlm
