#include "fraclab/weight.hpp"

#include <cmath>
#include <sstream>

#include "fraclab/error.hpp"
#include <limits>

namespace fraclab {

const char* to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::constant: return "constant";
    case WeightFamily::exp_decay: return "exp_decay";
    case WeightFamily::exp_growth: return "exp_growth";
    case WeightFamily::power: return "power";
    case WeightFamily::piecewise: return "piecewise";
    case WeightFamily::derived: return "derived";
  }
  return "?";
}

Weight::Weight(std::string name, WeightFamily family, std::size_t dim, Eval eval, double length_scale,
               std::vector<double> singular_points, bool radial_singularity)
    : name_(std::move(name)),
      family_(family),
      dim_(dim),
      eval_(std::move(eval)),
      length_scale_(length_scale),
      singular_(std::move(singular_points)),
      radial_(radial_singularity) {}

Weight Weight::power(double q) const {
  auto inner = eval_;
  std::ostringstream os;
  os << "(" << name_ << ")^" << q;
  return Weight(os.str(), WeightFamily::derived, dim_,
                [inner, q](std::span<const double> x) { return std::pow(inner(x), q); },
                q != 0.0 ? length_scale_ / std::abs(q) : length_scale_, singular_, radial_);
}

Weight Weight::reflected() const {
  auto inner = eval_;
  std::vector<double> sing;
  for (double s : singular_) sing.push_back(-s);
  return Weight("reflect(" + name_ + ")", WeightFamily::derived, dim_,
                [inner](std::span<const double> x) {
                  std::vector<double> y(x.begin(), x.end());
                  for (double& v : y) v = -v;
                  return inner(y);
                },
                length_scale_, sing, radial_);
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "weight scale must be > 0");
  auto inner = eval_;
  std::ostringstream os;
  os << c << "*" << name_;
  return Weight(os.str(), WeightFamily::derived, dim_,
                [inner, c](std::span<const double> x) { return c * inner(x); }, length_scale_, singular_,
                radial_);
}

std::vector<std::string> weight_catalog() {
  return {"constant", "exp_decay", "exp_growth", "power", "piecewise"};
}

Weight make_weight(const std::string& spec, std::size_t dim) {
  // reuse the catalog-spec grammar "name(p1,p2)"
  std::string s;
  for (char c : spec)
    if (c != ' ') s.push_back(c);
  std::string name = s.substr(0, s.find('('));
  std::vector<double> par;
  if (auto open = s.find('('); open != std::string::npos) {
    auto close = s.find(')', open);
    if (close == std::string::npos || close + 1 != s.size())
      throw Error(ErrorKind::ParameterOutOfRange, "malformed weight spec '" + spec + "'");
    std::stringstream body(s.substr(open + 1, close - open - 1));
    std::string tok;
    while (std::getline(body, tok, ',')) {
      try {
        std::size_t used = 0;
        par.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParameterOutOfRange, "bad parameter '" + tok + "' in '" + spec + "'");
      }
    }
  }
  auto arg = [&](std::size_t i, double d) { return i < par.size() ? par[i] : d; };
  if (dim < 1 || dim > 3) throw Error(ErrorKind::ParameterOutOfRange, "dimension must be 1..3");

  if (name == "constant" || name == "one") {
    const double c = arg(0, 1.0);
    if (!(c > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "constant weight must be > 0");
    return Weight(spec, WeightFamily::constant, dim, [c](std::span<const double>) { return c; },
                  std::numeric_limits<double>::infinity());
  }
  if (name == "exp_decay" || name == "exp_growth") {
    const double lam = arg(0, 1.0);
    if (!(lam > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, name + " rate must be > 0");
    const double sgn = name == "exp_decay" ? -1.0 : 1.0;
    return Weight(spec, name == "exp_decay" ? WeightFamily::exp_decay : WeightFamily::exp_growth, dim,
                  [lam, sgn](std::span<const double> x) { return std::exp(sgn * lam * x[0]); }, 1.0 / lam);
  }
  if (name == "power") {
    const double beta = arg(0, 0.5);
    return Weight(spec, WeightFamily::power, dim,
                  [beta](std::span<const double> x) {
                    double r2 = 0.0;
                    for (double v : x) r2 += v * v;
                    return std::pow(r2, 0.5 * beta);
                  },
                  1.0, {0.0}, true);
  }
  if (name == "piecewise") {
    const double a = arg(0, 1.0), b = arg(1, 2.0);
    if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "piecewise levels must be > 0");
    return Weight(spec, WeightFamily::piecewise, dim,
                  [a, b](std::span<const double> x) { return x[0] < 0.0 ? a : b; },
                  std::numeric_limits<double>::infinity(), {0.0});
  }
  throw Error(ErrorKind::UnknownFamily, "unknown weight '" + name + "'");
}

}  // namespace fraclab
