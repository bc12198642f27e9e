#pragma once

#include <map>
#include <string>
#include <vector>

#include "condensate/model.hpp"
#include "condensate/rng.hpp"

namespace condensate {

// A cluster size vector: finitely many nonzero entries, sorted descending.
// Trailing zeros are never stored; kingman_equal ignores them anyway.
using KingmanVector = std::vector<double>;

bool kingman_equal(const KingmanVector& a, const KingmanVector& b,
                   double tol = 0.0);

// sum of m-th powers over the support
double phi_m(const KingmanVector& x, int m);

struct EmbeddedState {
  KingmanVector x;  // excess mass fractions (eta_i - A)+ / N, descending
  ControlState y;   // slow profile #_k / L for k < A
};

// prefix-sum tree over nonnegative integer weights, used to sample a site
// with probability proportional to its excess occupation
class FenwickTree {
 public:
  explicit FenwickTree(int n) : n_(n), tree_(static_cast<size_t>(n) + 1, 0) {}

  void add(int i, long long delta) {
    for (int j = i + 1; j <= n_; j += j & -j) tree_[static_cast<size_t>(j)] += delta;
  }

  // sum of weights over indices [0, i)
  long long prefix(int i) const {
    long long s = 0;
    for (int j = i; j > 0; j -= j & -j) s += tree_[static_cast<size_t>(j)];
    return s;
  }

  long long total() const { return prefix(n_); }

  // smallest index whose cumulative weight exceeds target (0 <= target < total)
  int sample(long long target) const {
    int pos = 0;
    int pw = 1;
    while ((pw << 1) <= n_) pw <<= 1;
    for (; pw > 0; pw >>= 1) {
      const int next = pos + pw;
      if (next <= n_ && tree_[static_cast<size_t>(next)] <= target) {
        pos = next;
        target -= tree_[static_cast<size_t>(next)];
      }
    }
    return pos;
  }

 private:
  int n_;
  std::vector<long long> tree_;
};

// Occupation state of L sites carrying N particles, with the category
// bookkeeping needed to run events in O(A + log L): per level k <= A a list
// of sites at that level, a list of fast sites, and an integer prefix tree
// over the excess weights (eta_i - A)+.
//
// The aggregate send and receive rates S1, S2 are recomputed from the
// integer category counts on demand, so they cannot drift under the
// differential updates.
class Configuration {
 public:
  Configuration(const RateSpec& spec, std::vector<long long> occupations);

  const RateSpec& spec() const { return spec_; }
  int L() const { return static_cast<int>(eta_.size()); }
  long long N() const { return N_; }
  long long occupation(int site) const { return eta_[static_cast<size_t>(site)]; }
  const std::vector<long long>& occupations() const { return eta_; }

  long long slow_count(int k) const;  // sites at level k, 0 <= k <= A
  long long fast_count() const { return static_cast<long long>(fast_sites_.size()); }
  long long excess_total() const { return excess_total_; }

  double gamma_N() const;  // excess_total / N
  double S1() const;       // sum_i u1(eta_i)
  double S2() const;       // sum_i u2(eta_i)
  double diagonal_mass() const;  // sum_i u1(eta_i) u2(eta_i), for diagnostics

  // move one particle; touches two category entries and the prefix tree
  void move_particle(int from, int to);

  // site drawn with probability u1(eta_i) / S1, resp. u2(eta_i) / S2
  int sample_u1_site(RngStream& rng) const;
  int sample_u2_site(RngStream& rng) const;

  EmbeddedState embed() const;
  std::map<long long, long long> histogram() const;

  // validator used by tests: rebuilds every cache from eta and compares
  void recount_and_check() const;

 private:
  void insert_site(int site);  // register eta_[site] in the category caches
  void remove_site(int site);

  RateSpec spec_;
  std::vector<long long> eta_;
  long long N_ = 0;
  std::vector<std::vector<int>> slots_;  // per level k <= A
  std::vector<int> fast_sites_;
  std::vector<int> pos_;  // index of each site inside its current list
  FenwickTree fen_;
  long long excess_total_ = 0;
};

// total rate of moves that change the tracked site (default: site 0)
double total_rate_c(const Configuration& config, int site = 0);

// probability that the next move touching the tracked site raises it
double up_probability_p(const Configuration& config, int site = 0);

struct CouplingReport {
  bool fast_branch = false;  // tracked site was above A
  double p = 0.0;
  double c = 0.0;
  double p_bound = 0.0;  // 1/2 + 15 zeta_L           (fast branch)
  double c_lower = 0.0;  // (N/4) max(min_k q_k, 1) delta  (fast branch)
  double c_upper = 0.0;  // 4 rho (max_k r_k + 1)     (slow branch)
  bool pass = false;
};

// Rate bounds behind the single-site coupling argument. The fast branch
// additionally needs gamma_N > delta to be meaningful; the caller selects
// configurations accordingly.
CouplingReport check_coupling_bounds(const Configuration& config, double delta,
                                     int site = 0, bool throw_on_fail = true);

// "k:count" pairs, ascending in k, single spaces; exact integer round-trip
std::string histogram_to_string(const std::map<long long, long long>& h);
std::map<long long, long long> histogram_from_string(const std::string& text);

}  // namespace condensate
