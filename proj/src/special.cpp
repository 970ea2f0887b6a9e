#include "fraclab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fraclab/error.hpp"

namespace fraclab {
namespace {

// Lanczos coefficients for g = 7, n = 9 (Godfrey).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  // valid for x >= 0.5; evaluated as Gamma(z + 1) with z = x - 1
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * sum;
}

}  // namespace

double gamma(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::PoleOrUnsupported, "non-finite argument");
  if (x == 0.0 || x == -1.0 || x < -1.0)
    throw Error(ErrorKind::PoleOrUnsupported, "Gamma(" + std::to_string(x) + ")");
  if (x < 0.0) return gamma(x + 2.0) / (x * (x + 1.0));
  if (x < 1.0) return lanczos_gamma(x + 1.0) / x;
  if (x > 171.6) throw Error(ErrorKind::PoleOrUnsupported, "Gamma overflow");
  return lanczos_gamma(x);
}

double hurwitz_zeta(double b, double a) {
  if (!(b > 1.0) || !(a > 0.0))
    throw Error(ErrorKind::ParameterOutOfRange, "hurwitz_zeta needs b > 1, a > 0");
  // Bernoulli numbers B_{2j}/(2j)!
  static constexpr std::array<double, 8> kB2jOverFact = {
      1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,        -1.0 / 1209600.0,
      1.0 / 47900160.0,    -691.0 / 1307674368000.0, 7.0 / 523069747200.0,
      -3617.0 / 10670622842880000.0};
  constexpr int kDirect = 12;
  double sum = 0.0;
  for (int m = 0; m < kDirect; ++m) sum += std::pow(a + m, -b);
  const double n = a + kDirect;
  sum += std::pow(n, 1.0 - b) / (b - 1.0) + 0.5 * std::pow(n, -b);
  // sum_j B_{2j}/(2j)! * b(b+1)...(b+2j-2) * n^{-b-2j+1}
  double rising = b;
  double npow = std::pow(n, -b - 1.0);
  for (std::size_t j = 0; j < kB2jOverFact.size(); ++j) {
    const double term = kB2jOverFact[j] * rising * npow;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    rising *= (b + 2.0 * j + 1.0) * (b + 2.0 * j + 2.0);
    npow /= n * n;
  }
  return sum;
}

double cns(int n, double s) {
  if (n < 1) throw Error(ErrorKind::OrderOutOfRange, "dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::OrderOutOfRange, "s must lie in (0, 1)");
  const double half_n = 0.5 * n;
  return std::pow(4.0, s) * gamma(half_n + s) /
         (std::abs(gamma(-s)) * std::pow(std::numbers::pi, half_n));
}

FracOrder::FracOrder(double value, OrderRole role, std::optional<int> dim)
    : value_(value), role_(role), dim_(dim) {
  if (!(value > 0.0 && value < 1.0))
    throw Error(ErrorKind::OrderOutOfRange, "order " + std::to_string(value) + " outside (0, 1)");
  gamma_neg_ = gamma(-value);
  inv_gamma_neg_ = 1.0 / gamma_neg_;
  if (role == OrderRole::s && dim) cns_ = fraclab::cns(*dim, value);
}

FracOrder FracOrder::alpha(double value) { return FracOrder(value, OrderRole::alpha, std::nullopt); }

FracOrder FracOrder::s(double value, std::optional<int> dimension) {
  return FracOrder(value, OrderRole::s, dimension);
}

}  // namespace fraclab
