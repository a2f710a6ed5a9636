#pragma once

#include <vector>

namespace qkr {

// J_0(x) .. J_n_max(x) by backward (Miller) recurrence, normalized with
// J_0 + 2 J_2 + 2 J_4 + ... = 1. Negative x is mapped through the parity
// J_n(-x) = (-1)^n J_n(x). Accuracy ~1e-13 relative for |x| <= 40.
std::vector<double> bessel_j_array(int n_max, double x);

// Single value for any integer order, J_{-n}(x) = (-1)^n J_n(x).
double bessel_j(int n, double x);

}  // namespace qkr
