#include "sos_tensor/xor.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

namespace sos_tensor {

namespace {

using Triple = std::tuple<int, int, int>;

template <class SignOf>
std::vector<Clause> draw_clauses(int d, int m, std::mt19937_64& rng, const SignOf& sign_of) {
  if (d < 1 || m < 1) throw std::invalid_argument("xor: d and m must be positive");
  std::uniform_int_distribution<int> idx(0, d - 1);
  std::map<Triple, int> seen;
  std::vector<Clause> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    Clause c;
    c.i = idx(rng);
    c.j = idx(rng);
    c.k = idx(rng);
    auto [it, fresh] = seen.emplace(Triple{c.i, c.j, c.k}, 0);
    if (fresh) it->second = sign_of(c, rng);
    c.z = it->second;
    out.push_back(c);
  }
  return out;
}

}  // namespace

void XorInstance::validate() const {
  if (d < 1) throw std::invalid_argument("XorInstance: d must be positive");
  std::map<Triple, int> sign;
  for (const auto& c : clauses) {
    if (c.i < 0 || c.j < 0 || c.k < 0 || c.i >= d || c.j >= d || c.k >= d) {
      throw std::invalid_argument("XorInstance: index out of range");
    }
    if (c.z != 1 && c.z != -1) throw std::invalid_argument("XorInstance: z must be +-1");
    auto [it, fresh] = sign.emplace(Triple{c.i, c.j, c.k}, c.z);
    if (!fresh && it->second != c.z) throw std::invalid_argument("XorInstance: repeated triple with different sign");
  }
  if (kind == XorKind::kPlanted) {
    if (static_cast<int>(assignment.size()) != d) throw std::invalid_argument("XorInstance: assignment length");
    for (int a : assignment)
      if (a != 1 && a != -1) throw std::invalid_argument("XorInstance: assignment must be +-1");
  }
}

XorInstance gen_planted(int d, int m, double eta, std::uint64_t seed, const PlantedOptions& options) {
  if (!(eta >= 0.0 && eta < 0.25)) {
    if (!options.allow_eta_out_of_range || !(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("gen_planted: eta must lie in [0, 1/4)");
    }
    std::cerr << "warning: gen_planted with eta = " << eta << " outside [0, 1/4)\n";
  }
  std::mt19937_64 rng(seed);
  XorInstance inst;
  inst.d = d;
  inst.kind = XorKind::kPlanted;
  inst.eta = eta;
  inst.seed = seed;
  if (options.assignment) {
    inst.assignment = *options.assignment;
    if (static_cast<int>(inst.assignment.size()) != d) throw std::invalid_argument("gen_planted: assignment length");
  } else {
    inst.assignment.resize(static_cast<std::size_t>(d));
    for (auto& a : inst.assignment) a = (rng() & 1u) ? 1 : -1;
  }
  std::bernoulli_distribution flip(eta);
  inst.clauses = draw_clauses(d, m, rng, [&](const Clause& c, std::mt19937_64& r) {
    const int z = inst.assignment[static_cast<std::size_t>(c.i)] * inst.assignment[static_cast<std::size_t>(c.j)] *
                  inst.assignment[static_cast<std::size_t>(c.k)];
    return flip(r) ? -z : z;
  });
  inst.validate();
  return inst;
}

XorInstance gen_random(int d, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  XorInstance inst;
  inst.d = d;
  inst.kind = XorKind::kRandom;
  inst.seed = seed;
  inst.clauses = draw_clauses(d, m, rng, [](const Clause&, std::mt19937_64& r) { return (r() & 1u) ? 1 : -1; });
  return inst;
}

Dataset to_dataset(const XorInstance& instance) {
  instance.validate();
  Dataset data;
  data.law = Law::kCompletion;
  data.d = instance.d;
  data.bound = 1.0;
  data.seed = instance.seed;
  data.model = instance.kind == XorKind::kPlanted ? "xor-planted" : "xor-random";
  for (const auto& c : instance.clauses) data.samples.push_back({Entry{c.i, c.j, c.k}, static_cast<double>(c.z)});
  return data;
}

double xor_threshold(double eta) {
  const double gamma = 1.0 - 4.0 * eta;
  return 1.0 - std::pow(gamma, 4) / 2.0;
}

ErmConfig xor_learner_config(int d, int degree) {
  ErmConfig c;
  c.tau = std::pow(static_cast<double>(d), 1.5);
  c.R = 1.0;
  c.degree = degree;
  return c;
}

std::string to_string(VerdictTag tag) { return tag == VerdictTag::kPlanted ? "Planted" : "Random"; }

Verdict distinguish(const XorInstance& instance, const ErmConfig& learner, double eta, std::uint64_t seed) {
  if (instance.size() < 2) throw std::invalid_argument("distinguish: need at least two clauses");
  const Dataset all = to_dataset(instance);
  std::vector<int> order(static_cast<std::size_t>(all.size()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Dataset train = all, holdout = all;
  train.samples.clear();
  holdout.samples.clear();
  const int half = all.size() / 2;
  for (int q = 0; q < all.size(); ++q) {
    const Sample& s = all.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])];
    (q < half ? train : holdout).samples.push_back(s);
  }

  const ErmResult fit = learner.method == ErmMethod::kDirect ? erm_direct(train, learner) : erm_frank_wolfe(train, learner);
  Verdict v;
  v.holdout_loss = empirical_risk(holdout, fit.t_hat);
  v.threshold = xor_threshold(eta);
  v.tag = v.holdout_loss <= v.threshold ? VerdictTag::kPlanted : VerdictTag::kRandom;
  return v;
}

}  // namespace sos_tensor
