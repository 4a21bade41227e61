// Backward differentiation formula weights, derived exactly in rational
// arithmetic from the generating polynomial  sum_{l=1..q} (1-z)^l / l.
#pragma once

#include "movefem/common.hpp"
#include "movefem/rational.hpp"

namespace movefem {

inline std::vector<Rational> bdf_weights_exact(int q) {
  if (q < 1 || q > 4) throw Error("bdf_weights: order must be in [1,4]");
  std::vector<Rational> delta(q + 1, Rational(0));
  // binomial expansion of (1-z)^l, accumulated with weight 1/l
  for (int l = 1; l <= q; ++l) {
    Rational coef(1);  // C(l, j) * (-1)^j as j runs
    for (int j = 0; j <= l; ++j) {
      delta[j] = delta[j] + coef * Rational(1, l);
      coef = coef * Rational(-(l - j), j + 1);
    }
  }
  return delta;
}

inline std::vector<double> bdf_weights(int q) {
  auto exact = bdf_weights_exact(q);
  std::vector<double> w(exact.size());
  for (size_t i = 0; i < exact.size(); ++i) w[i] = exact[i].to_double();
  return w;
}

}  // namespace movefem
