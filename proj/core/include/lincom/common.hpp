#pragma once

#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lincom {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;
using Cplx = std::complex<double>;

// Error with a stable machine-readable code ("RankDeficient", "Degenerate", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Exact Gaussian rational a + b*i.
struct GaussQ {
  Rat re, im;
  GaussQ() : re(0), im(0) {}
  GaussQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator*(const GaussQ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussQ& operator+=(const GaussQ& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussQ conj() const { return {re, -im}; }
  bool is_zero() const { return re == 0 && im == 0; }
  Cplx to_cplx() const { return {re.get_d(), im.get_d()}; }
};

inline double to_double(const Rat& q) { return q.get_d(); }

}  // namespace lincom
