#include "gmlm/ising.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

namespace gmlm {

namespace {

constexpr int kMaxExactN = 20;

std::size_t config_count(int n) { return std::size_t{1} << n; }

std::vector<double> all_log_weights(const IsingModel& m) {
  std::vector<double> lw(config_count(m.n));
  for (std::size_t x = 0; x < lw.size(); ++x) lw[x] = log_weight(m, static_cast<SpinConfig>(x));
  return lw;
}

double lse_over(const std::vector<double>& lw) {
  LogSumExp acc;
  for (double v : lw) acc.add(v);
  return acc.value();
}

}  // namespace

void CliqueParams::validate(int max_n) const {
  require(n >= 1 && n <= max_n, ErrKind::Capacity,
          "clique params: n must be in [1, " + std::to_string(max_n) + "]");
  require(static_cast<int>(fields.size()) == n, ErrKind::Validation,
          "clique params: fields size must equal n");
  require(clique.size() >= 2, ErrKind::Validation, "clique params: clique needs >= 2 members");
  std::set<int> seen;
  for (int i : clique) {
    require(i >= 0 && i < n, ErrKind::Validation, "clique params: member out of range");
    require(seen.insert(i).second, ErrKind::Validation, "clique params: duplicate member");
  }
  for (double f : fields)
    require(std::isfinite(f), ErrKind::Validation, "clique params: non-finite field");
  require(std::isfinite(coupling), ErrKind::Validation, "clique params: non-finite coupling");
}

void IsingModel::validate() const {
  require(n >= 1, ErrKind::Validation, "model: n must be >= 1");
  require(n <= kMaxExactN, ErrKind::Capacity, "model: n exceeds exact-enumeration cap 20");
  require(static_cast<int>(h.size()) == n, ErrKind::Validation, "model: field count != n");
  for (double v : h) require(std::isfinite(v), ErrKind::Validation, "model: non-finite field");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    require(e.i >= 0 && e.i < e.j && e.j < n, ErrKind::Validation,
            "model: edge endpoints must satisfy 0 <= i < j < n");
    require(std::isfinite(e.j_val), ErrKind::Validation, "model: non-finite coupling");
    require(seen.insert({e.i, e.j}).second, ErrKind::Validation, "model: duplicate edge");
  }
  if (clique) {
    require(clique->members.size() >= 2, ErrKind::Validation, "model: clique needs >= 2 members");
    for (int i : clique->members)
      require(i >= 0 && i < n, ErrKind::Validation, "model: clique member out of range");
    require(std::is_sorted(clique->members.begin(), clique->members.end()),
            ErrKind::Validation, "model: clique members must be ascending");
  }
}

std::uint32_t IsingModel::clique_mask() const {
  require(clique.has_value(), ErrKind::Validation, "model carries no clique structure");
  std::uint32_t m = 0;
  for (int i : clique->members) m |= 1u << i;
  return m;
}

int theta_dim(int n) { return n + n * (n - 1) / 2; }

int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return n + i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::vector<double> theta_from_model(const IsingModel& m) {
  std::vector<double> theta(theta_dim(m.n), 0.0);
  for (int i = 0; i < m.n; ++i) theta[i] = m.h[i];
  for (const auto& e : m.edges) theta[pair_index(m.n, e.i, e.j)] = e.j_val;
  return theta;
}

IsingModel model_from_theta(int n, const std::vector<double>& theta) {
  require(static_cast<int>(theta.size()) == theta_dim(n), ErrKind::Validation,
          "theta length does not match n");
  IsingModel m;
  m.n = n;
  m.h.assign(theta.begin(), theta.begin() + n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      m.edges.push_back({i, j, theta[pair_index(n, i, j)]});
  m.validate();
  return m;
}

void fill_phi(int n, SpinConfig x, std::vector<double>& phi) {
  phi.resize(theta_dim(n));
  for (int i = 0; i < n; ++i) phi[i] = spin(x, i);
  int idx = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) phi[idx++] = spin(x, i) * spin(x, j);
}

IsingModel build_clique_ising(const CliqueParams& p) {
  p.validate(kMaxExactN);
  IsingModel m;
  m.n = p.n;
  m.h = p.fields;
  std::vector<int> members = p.clique;
  std::sort(members.begin(), members.end());
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      m.edges.push_back({members[a], members[b], p.coupling});
  m.clique = CliqueSpec{members, p.coupling};
  m.validate();
  return m;
}

double log_weight(const IsingModel& m, SpinConfig x) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i) s += m.h[i] * spin(x, i);
  for (const auto& e : m.edges) s += e.j_val * spin(x, e.i) * spin(x, e.j);
  return s;
}

double partition_function_log(const IsingModel& m) {
  m.validate();
  return lse_over(all_log_weights(m));
}

FiniteDistribution joint_table(const IsingModel& m) {
  m.validate();
  std::vector<double> lw = all_log_weights(m);
  const double lz = lse_over(lw);
  FiniteDistribution d;
  d.p.resize(lw.size());
  for (std::size_t x = 0; x < lw.size(); ++x) d.p[x] = std::exp(lw[x] - lz);
  return d;
}

FiniteDistribution block_conditional(const IsingModel& m, SpinConfig x, std::uint32_t block) {
  require(block != 0, ErrKind::Validation, "block_conditional: empty block");
  require((block >> m.n) == 0, ErrKind::Validation, "block_conditional: block outside [0, n)");
  const int k = std::popcount(block);
  const SpinConfig rest = x & ~block;
  std::vector<double> lw(std::size_t{1} << k);
  for (std::size_t a = 0; a < lw.size(); ++a)
    lw[a] = log_weight(m, rest | deposit_bits(static_cast<std::uint32_t>(a), block));
  const double lz = lse_over(lw);
  FiniteDistribution d;
  d.p.resize(lw.size());
  for (std::size_t a = 0; a < lw.size(); ++a) d.p[a] = std::exp(lw[a] - lz);
  return d;
}

double single_site_conditional(const IsingModel& m, SpinConfig x, int i) {
  require(i >= 0 && i < m.n, ErrKind::Validation, "single_site_conditional: site out of range");
  double field = m.h[i];
  for (const auto& e : m.edges) {
    if (e.i == i) field += e.j_val * spin(x, e.j);
    if (e.j == i) field += e.j_val * spin(x, e.i);
  }
  return 1.0 / (1.0 + std::exp(-2.0 * field));
}

ExactSampler::ExactSampler(const IsingModel& m) {
  FiniteDistribution joint = joint_table(m);
  cdf_.resize(joint.size());
  double c = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    c += joint.p[i];
    cdf_[i] = c;
  }
  cdf_.back() = 1.0;
}

SpinConfig ExactSampler::draw(RngStream& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<SpinConfig>(it - cdf_.begin());
}

std::vector<SpinConfig> exact_sample(const IsingModel& m, RngStream& rng, int count) {
  require(count >= 0, ErrKind::Validation, "exact_sample: negative count");
  ExactSampler s(m);
  std::vector<SpinConfig> out(count);
  for (int i = 0; i < count; ++i) out[i] = s.draw(rng);
  return out;
}

bool in_mode(std::uint32_t cmask, int sign, SpinConfig x) {
  return sign > 0 ? (x & cmask) == cmask : (x & cmask) == 0;
}

std::vector<SpinConfig> mode_region(const IsingModel& m, int sign) {
  require(sign == 1 || sign == -1, ErrKind::Validation, "mode_region: sign must be +1 or -1");
  const std::uint32_t cmask = m.clique_mask();
  std::vector<SpinConfig> out;
  for (std::size_t x = 0; x < config_count(m.n); ++x)
    if (in_mode(cmask, sign, static_cast<SpinConfig>(x))) out.push_back(static_cast<SpinConfig>(x));
  return out;
}

CliqueScales clique_scales(const IsingModel& m) {
  m.validate();
  require(m.clique.has_value(), ErrKind::Validation, "model carries no clique structure");
  const auto& members = m.clique->members;
  const std::size_t expected_edges = members.size() * (members.size() - 1) / 2;
  require(m.edges.size() == expected_edges, ErrKind::Validation,
          "clique checks require edges to be exactly the clique pairs");
  std::uint32_t cmask = 0;
  for (int i : members) cmask |= 1u << i;
  for (const auto& e : m.edges) {
    require((cmask >> e.i) & 1u, ErrKind::Validation, "edge endpoint outside clique");
    require((cmask >> e.j) & 1u, ErrKind::Validation, "edge endpoint outside clique");
    require(e.j_val == m.clique->coupling, ErrKind::Validation,
            "clique coupling must be uniform across clique pairs");
  }
  CliqueScales v;
  v.n = m.n;
  v.cmask = cmask;
  v.c = static_cast<int>(members.size());
  v.coupling = m.clique->coupling;
  v.h_g = 0.0;
  v.h_out = 0.0;
  v.h_l1 = 0.0;
  for (int i = 0; i < m.n; ++i) {
    v.h_l1 += std::abs(m.h[i]);
    if ((cmask >> i) & 1u)
      v.h_g += m.h[i];
    else
      v.h_out += std::abs(m.h[i]);
  }
  v.j0 = v.coupling - v.h_l1;
  return v;
}

AssumptionReport check_strongly_ferromagnetic(const CliqueScales& v) {
  AssumptionReport r;
  r.assumption = "strongly_ferromagnetic";
  r.checks.push_back({"clique_fields_dominate_outside", v.h_g, v.h_out, v.h_g > v.h_out});
  r.checks.push_back({"coupling_margin_positive", v.j0, 0.0, v.j0 > 0.0});
  r.holds = r.checks[0].ok && r.checks[1].ok;
  r.values["h_g"] = v.h_g;
  r.values["j0"] = v.j0;
  r.values["h_l1"] = v.h_l1;
  r.values["clique_size"] = v.c;
  return r;
}

AssumptionReport check_strongly_ferromagnetic(const IsingModel& m) {
  return check_strongly_ferromagnetic(clique_scales(m));
}

AssumptionReport check_strong_interactions(const CliqueScales& v, int big_m, double delta) {
  require(big_m >= 1, ErrKind::Validation, "check_strong_interactions: M must be >= 1");
  require(delta > 0.0 && delta < 1.0, ErrKind::Validation,
          "check_strong_interactions: delta must lie in (0,1)");
  AssumptionReport base = check_strongly_ferromagnetic(v);
  AssumptionReport r;
  r.assumption = "strong_interactions";
  r.checks.push_back({"strongly_ferromagnetic", base.holds ? 1.0 : 0.0, 1.0, base.holds});
  r.checks.push_back({"clique_size", static_cast<double>(v.c),
                      8.0 * (1.0 + std::log(4.0 * big_m / delta)),
                      v.c >= 8.0 * (1.0 + std::log(4.0 * big_m / delta))});
  r.checks.push_back({"clique_field_sum", v.h_g, 0.5 * std::log(2.0 * (4.0 - delta) / delta),
                      v.h_g >= 0.5 * std::log(2.0 * (4.0 - delta) / delta)});
  r.checks.push_back(
      {"coupling_margin", v.j0, 0.5 * v.c * std::log(2.0), v.j0 >= 0.5 * v.c * std::log(2.0)});
  r.holds = true;
  for (const auto& c : r.checks) r.holds = r.holds && c.ok;
  r.values = base.values;
  return r;
}

AssumptionReport check_strong_interactions(const IsingModel& m, int big_m, double delta) {
  return check_strong_interactions(clique_scales(m), big_m, delta);
}

AssumptionReport check_large_k(int n, int clique_size, int k, double delta) {
  require(n >= 1 && clique_size >= 1 && clique_size <= n, ErrKind::Validation,
          "check_large_k: bad sizes");
  require(k >= 1 && k <= n, ErrKind::Validation, "check_large_k: k out of range");
  require(delta > 0.0 && delta < 1.0, ErrKind::Validation, "check_large_k: delta in (0,1)");
  const double bound =
      n - delta * (n + 1.0) / ((4.0 - delta) * clique_size + delta);
  AssumptionReport r;
  r.assumption = "large_k";
  r.checks.push_back({"k_at_least_clique", static_cast<double>(k),
                      static_cast<double>(clique_size), k >= clique_size});
  r.checks.push_back({"k_at_least_size_bound", static_cast<double>(k), bound, k >= bound});
  r.holds = r.checks[0].ok && r.checks[1].ok;
  r.values["bound"] = std::max(static_cast<double>(clique_size), bound);
  return r;
}

ModeOrderingReport verify_mode_ordering(const IsingModel& m) {
  const CliqueScales v = clique_scales(m);
  const double inf = std::numeric_limits<double>::infinity();
  double min_plus = inf, max_minus = -inf, min_minus = inf, max_rest = -inf;
  bool has_rest = false;
  double bij_dev = 0.0;
  for (std::size_t xi = 0; xi < config_count(m.n); ++xi) {
    const auto x = static_cast<SpinConfig>(xi);
    const double lw = log_weight(m, x);
    if (in_mode(v.cmask, +1, x)) {
      min_plus = std::min(min_plus, lw);
      const double flipped = log_weight(m, x ^ v.cmask);
      bij_dev = std::max(bij_dev, std::abs(lw - flipped - 2.0 * v.h_g));
    } else if (in_mode(v.cmask, -1, x)) {
      max_minus = std::max(max_minus, lw);
      min_minus = std::min(min_minus, lw);
    } else {
      has_rest = true;
      max_rest = std::max(max_rest, lw);
    }
  }
  ModeOrderingReport r;
  r.h_g = v.h_g;
  r.j0 = v.j0;
  r.margin_plus_over_minus = min_plus - max_minus;
  r.margin_minus_over_rest = has_rest ? min_minus - max_rest - 2.0 * v.j0 : inf;
  r.bijection_max_dev = bij_dev;
  r.ordered = r.margin_plus_over_minus > 0.0 && (!has_rest || r.margin_minus_over_rest > 0.0);
  return r;
}

std::string model_to_json(const IsingModel& m) {
  m.validate();
  nlohmann::json j;
  j["n"] = m.n;
  j["h"] = m.h;
  auto arr = nlohmann::json::array();
  for (const auto& e : m.edges) arr.push_back({e.i, e.j, e.j_val});
  j["J"] = arr;
  if (m.clique) {
    j["clique"] = m.clique->members;
    j["J_clique"] = m.clique->coupling;
  }
  return j.dump(2) + "\n";
}

IsingModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("model json: ") + e.what());
  }
  IsingModel m;
  try {
    m.n = j.at("n").get<int>();
    m.h = j.at("h").get<std::vector<double>>();
    for (const auto& e : j.at("J")) {
      require(e.is_array() && e.size() == 3, ErrKind::Validation,
              "model json: J entries must be [i, j, value]");
      m.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    if (j.contains("clique")) {
      CliqueSpec spec;
      spec.members = j.at("clique").get<std::vector<int>>();
      spec.coupling = j.at("J_clique").get<double>();
      std::sort(spec.members.begin(), spec.members.end());
      m.clique = spec;
    }
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("model json: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace gmlm
