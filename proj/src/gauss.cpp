#include "droplab/gauss.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <mutex>

#include "droplab/errors.hpp"

namespace droplab {

namespace {

GaussRule build_rule(int order) {
  // legendre_p_zeros returns the nonnegative zeros in increasing order.
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
  }
  if (order % 2 == 1) rule.nodes.push_back(0.0);
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
  }
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime(order, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 256) throw ParameterError("Gauss-Legendre order out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

}  // namespace droplab
