#include "condensate/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace condensate {

bool kingman_equal(const KingmanVector& a, const KingmanVector& b, double tol) {
  const size_t n = std::max(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    const double va = i < a.size() ? a[i] : 0.0;
    const double vb = i < b.size() ? b[i] : 0.0;
    if (std::abs(va - vb) > tol) return false;
  }
  return true;
}

double phi_m(const KingmanVector& x, int m) {
  double s = 0.0;
  for (double v : x) s += std::pow(v, m);
  return s;
}

Configuration::Configuration(const RateSpec& spec,
                             std::vector<long long> occupations)
    : spec_(spec),
      eta_(std::move(occupations)),
      slots_(static_cast<size_t>(spec.A) + 1),
      pos_(eta_.size(), -1),
      fen_(static_cast<int>(eta_.size())) {
  if (eta_.empty()) throw ConfigError("configuration: needs at least one site");
  for (long long n : eta_) {
    if (n < 0) throw ConfigError("configuration: negative occupation");
    N_ += n;
  }
  for (int i = 0; i < L(); ++i) insert_site(i);
}

void Configuration::insert_site(int site) {
  const long long n = eta_[static_cast<size_t>(site)];
  if (n > spec_.A) {
    pos_[static_cast<size_t>(site)] = static_cast<int>(fast_sites_.size());
    fast_sites_.push_back(site);
    fen_.add(site, n - spec_.A);
    excess_total_ += n - spec_.A;
  } else {
    auto& list = slots_[static_cast<size_t>(n)];
    pos_[static_cast<size_t>(site)] = static_cast<int>(list.size());
    list.push_back(site);
  }
}

void Configuration::remove_site(int site) {
  const long long n = eta_[static_cast<size_t>(site)];
  std::vector<int>* list;
  if (n > spec_.A) {
    fen_.add(site, -(n - spec_.A));
    excess_total_ -= n - spec_.A;
    list = &fast_sites_;
  } else {
    list = &slots_[static_cast<size_t>(n)];
  }
  const int idx = pos_[static_cast<size_t>(site)];
  const int last = list->back();
  (*list)[static_cast<size_t>(idx)] = last;
  pos_[static_cast<size_t>(last)] = idx;
  list->pop_back();
}

long long Configuration::slow_count(int k) const {
  return static_cast<long long>(slots_[static_cast<size_t>(k)].size());
}

double Configuration::gamma_N() const {
  if (N_ == 0) return 0.0;
  return static_cast<double>(excess_total_) / static_cast<double>(N_);
}

double Configuration::S1() const {
  double s = static_cast<double>(excess_total_);
  for (int k = 1; k <= spec_.A; ++k)
    s += spec_.q_at(k) * static_cast<double>(slots_[static_cast<size_t>(k)].size()) / L();
  return s;
}

double Configuration::S2() const {
  double s = static_cast<double>(excess_total_);
  for (int k = 0; k <= spec_.A; ++k)
    s += spec_.r_at(k) * static_cast<double>(slots_[static_cast<size_t>(k)].size()) / L();
  if (spec_.kind == RateKind::Inclusion)
    s += *spec_.theta_cap * static_cast<double>(fast_sites_.size()) / L();
  return s;
}

double Configuration::diagonal_mass() const {
  double s = 0.0;
  for (int k = 0; k <= spec_.A; ++k)
    s += static_cast<double>(slots_[static_cast<size_t>(k)].size()) *
         u1(spec_, L(), k) * u2(spec_, L(), k);
  for (int site : fast_sites_) {
    const long long n = eta_[static_cast<size_t>(site)];
    s += u1(spec_, L(), n) * u2(spec_, L(), n);
  }
  return s;
}

void Configuration::move_particle(int from, int to) {
  long long n = eta_[static_cast<size_t>(from)];
  if (n <= 0) throw std::logic_error("move_particle: source site is empty");
  if (n > spec_.A + 1) {
    // stays fast, only its excess weight changes
    fen_.add(from, -1);
    --excess_total_;
    eta_[static_cast<size_t>(from)] = n - 1;
  } else {
    remove_site(from);
    --eta_[static_cast<size_t>(from)];
    insert_site(from);
  }
  n = eta_[static_cast<size_t>(to)];
  if (n > spec_.A) {
    fen_.add(to, +1);
    ++excess_total_;
    eta_[static_cast<size_t>(to)] = n + 1;
  } else {
    remove_site(to);
    ++eta_[static_cast<size_t>(to)];
    insert_site(to);
  }
}

int Configuration::sample_u1_site(RngStream& rng) const {
  double target = rng.uniform() * S1();
  for (int k = 1; k <= spec_.A; ++k) {
    const auto& list = slots_[static_cast<size_t>(k)];
    if (list.empty()) continue;
    const double w = spec_.q_at(k) * static_cast<double>(list.size()) / L();
    if (target < w) return list[rng.below(list.size())];
    target -= w;
  }
  if (excess_total_ > 0)
    return fen_.sample(static_cast<long long>(
        rng.below(static_cast<std::uint64_t>(excess_total_))));
  // rounding pushed target past the last category; fall back to it
  for (int k = spec_.A; k >= 1; --k) {
    const auto& list = slots_[static_cast<size_t>(k)];
    if (!list.empty()) return list[rng.below(list.size())];
  }
  throw Frozen("sample_u1_site: no site can send");
}

int Configuration::sample_u2_site(RngStream& rng) const {
  double target = rng.uniform() * S2();
  for (int k = 0; k <= spec_.A; ++k) {
    const auto& list = slots_[static_cast<size_t>(k)];
    if (list.empty()) continue;
    const double w = spec_.r_at(k) * static_cast<double>(list.size()) / L();
    if (target < w) return list[rng.below(list.size())];
    target -= w;
  }
  if (spec_.kind == RateKind::Inclusion && !fast_sites_.empty()) {
    const double w =
        *spec_.theta_cap * static_cast<double>(fast_sites_.size()) / L();
    if (target < w) return fast_sites_[rng.below(fast_sites_.size())];
    target -= w;
  }
  if (excess_total_ > 0)
    return fen_.sample(static_cast<long long>(
        rng.below(static_cast<std::uint64_t>(excess_total_))));
  for (int k = spec_.A; k >= 0; --k) {
    const auto& list = slots_[static_cast<size_t>(k)];
    if (!list.empty()) return list[rng.below(list.size())];
  }
  if (!fast_sites_.empty()) return fast_sites_[rng.below(fast_sites_.size())];
  throw Frozen("sample_u2_site: no site can receive");
}

EmbeddedState Configuration::embed() const {
  EmbeddedState e;
  e.x.reserve(fast_sites_.size());
  const double n = static_cast<double>(N_);
  for (int site : fast_sites_)
    e.x.push_back(static_cast<double>(eta_[static_cast<size_t>(site)] - spec_.A) / n);
  std::sort(e.x.begin(), e.x.end(), std::greater<double>());
  e.y.y.resize(static_cast<size_t>(spec_.A));
  for (int k = 0; k < spec_.A; ++k)
    e.y.y[static_cast<size_t>(k)] =
        static_cast<double>(slots_[static_cast<size_t>(k)].size()) / L();
  return e;
}

std::map<long long, long long> Configuration::histogram() const {
  std::map<long long, long long> h;
  for (long long n : eta_) ++h[n];
  return h;
}

void Configuration::recount_and_check() const {
  std::vector<long long> counts(static_cast<size_t>(spec_.A) + 1, 0);
  long long fast = 0, excess = 0, total = 0;
  for (size_t i = 0; i < eta_.size(); ++i) {
    const long long n = eta_[i];
    total += n;
    const long long w = fen_.prefix(static_cast<int>(i) + 1) -
                        fen_.prefix(static_cast<int>(i));
    if (n > spec_.A) {
      ++fast;
      excess += n - spec_.A;
      if (w != n - spec_.A)
        throw std::logic_error("recount: prefix tree weight mismatch");
      if (fast_sites_[static_cast<size_t>(pos_[i])] != static_cast<int>(i))
        throw std::logic_error("recount: fast index mismatch");
    } else {
      ++counts[static_cast<size_t>(n)];
      if (w != 0) throw std::logic_error("recount: stale prefix tree weight");
      if (slots_[static_cast<size_t>(n)][static_cast<size_t>(pos_[i])] !=
          static_cast<int>(i))
        throw std::logic_error("recount: slot index mismatch");
    }
  }
  if (total != N_) throw std::logic_error("recount: particle number drifted");
  if (excess != excess_total_) throw std::logic_error("recount: excess drifted");
  if (fast != fast_count()) throw std::logic_error("recount: fast count drifted");
  for (int k = 0; k <= spec_.A; ++k)
    if (counts[static_cast<size_t>(k)] != slow_count(k))
      throw std::logic_error("recount: category count drifted");
}

double total_rate_c(const Configuration& config, int site) {
  const double a = u1(config.spec(), config.L(), config.occupation(site));
  const double b = u2(config.spec(), config.L(), config.occupation(site));
  return a * (config.S2() - b) + b * (config.S1() - a);
}

double up_probability_p(const Configuration& config, int site) {
  const double c = total_rate_c(config, site);
  if (!(c > 0.0)) throw ZeroRate("up_probability_p: total rate is zero");
  const double a = u1(config.spec(), config.L(), config.occupation(site));
  const double b = u2(config.spec(), config.L(), config.occupation(site));
  return b * (config.S1() - a) / c;
}

CouplingReport check_coupling_bounds(const Configuration& config, double delta,
                                     int site, bool throw_on_fail) {
  const RateSpec& spec = config.spec();
  CouplingReport rep;
  const double rho = static_cast<double>(config.N()) / config.L();
  const long long n = config.occupation(site);
  rep.fast_branch = n > spec.A;
  rep.c = total_rate_c(config, site);
  if (rep.fast_branch) {
    rep.p = up_probability_p(config, site);
    rep.p_bound = 0.5 + 15.0 * spec.zeta(config.L());
    const double qfloor = spec.q.empty() ? 1.0 : std::max(spec.q_min(), 1.0);
    rep.c_lower = 0.25 * static_cast<double>(config.N()) * qfloor * delta;
    rep.pass = rep.p <= rep.p_bound + 1e-12 &&
               rep.c >= rep.c_lower * (1.0 - 1e-12);
  } else {
    rep.c_upper = 4.0 * rho * (spec.r_max() + 1.0);
    rep.pass = rep.c <= rep.c_upper * (1.0 + 1e-12);
  }
  if (!rep.pass && throw_on_fail) {
    std::ostringstream msg;
    msg << "coupling bound failed at site " << site << " (occupation " << n
        << ", L=" << config.L() << ", N=" << config.N() << "): ";
    if (rep.fast_branch)
      msg << "p=" << rep.p << " vs " << rep.p_bound << ", c=" << rep.c
          << " vs lower " << rep.c_lower;
    else
      msg << "c=" << rep.c << " vs upper " << rep.c_upper;
    msg << "; histogram " << histogram_to_string(config.histogram());
    throw BoundViolation(msg.str());
  }
  return rep;
}

std::string histogram_to_string(const std::map<long long, long long>& h) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, count] : h) {
    if (!first) out << ' ';
    out << k << ':' << count;
    first = false;
  }
  return out.str();
}

std::map<long long, long long> histogram_from_string(const std::string& text) {
  std::map<long long, long long> h;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    const size_t colon = word.find(':');
    if (colon == std::string::npos)
      throw ConfigError("histogram: expected k:count, got '" + word + "'");
    long long k = 0, count = 0;
    try {
      k = std::stoll(word.substr(0, colon));
      count = std::stoll(word.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("histogram: bad integer in '" + word + "'");
    }
    if (k < 0 || count < 0)
      throw ConfigError("histogram: negative level or count in '" + word + "'");
    h[k] += count;
  }
  return h;
}

}  // namespace condensate
