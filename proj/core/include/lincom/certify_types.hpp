#pragma once

#include <map>
#include <optional>

#include "lincom/templates.hpp"

namespace lincom {

// Function on F_p given by its hermitian Fourier table.
struct FieldFunction {
  long p = 0;
  std::map<long, Cplx> coefficients;  // residues in [0, p)

  Cplx coeff(long r) const {
    long rr = ((r % p) + p) % p;
    auto it = coefficients.find(rr);
    return it == coefficients.end() ? Cplx(0, 0) : it->second;
  }
};

struct Witness {
  long p = 0;
  Int C = 0;  // projection base
  double epsilon = 0.0;
  double t_h = 0.0;      // t_L(h)
  double t_1mh = 0.0;    // t_L(1-h)
  double gap = 0.0;      // t_L(h) + t_L(1-h) - 2^{1-k}
};

struct Certificate {
  FourierTemplate g;
  SigmaReport sums;
  std::optional<Witness> witness;
  std::string construction;  // which builder produced the template
};

}  // namespace lincom
