#include "fraclab/function.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fraclab/error.hpp"

namespace fraclab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// e^{-45} ~ 3e-20: gaussian support cut at sqrt(90) sigma
constexpr double kGaussCut = 9.4868329805051381;

double sq_dist(std::span<const double> x, double c) {
  double s = 0.0;
  for (double xi : x) s += (xi - c) * (xi - c);
  return s;
}

void fill_box(FunctionTraits& t, std::size_t n, double lo, double hi) {
  t.support_lo.assign(n, lo);
  t.support_hi.assign(n, hi);
}

class Gaussian final : public Function {
 public:
  Gaussian(std::size_t n, double mu, double sigma) : n_(n), mu_(mu), sigma_(sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "gaussian sigma must be > 0");
    t_.decay = DecayClass::gaussian;
    t_.length_scale = sigma;
    t_.axis_scales.assign(n, sigma);
    fill_box(t_, n, mu - kGaussCut * sigma, mu + kGaussCut * sigma);
    t_.total_mass = std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * n);
    t_.sup_abs = 1.0;
    t_.heat_limit = 0.0;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override {
    return std::exp(-sq_dist(x, mu_) / (2.0 * sigma_ * sigma_));
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    const double f = value(x), s2 = sigma_ * sigma_;
    for (std::size_t i = 0; i < n_; ++i) g[i] = -f * (x[i] - mu_) / s2;
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double f = value(x), s2 = sigma_ * sigma_;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        h[i * n_ + j] = f * ((x[i] - mu_) * (x[j] - mu_) / (s2 * s2) - (i == j ? 1.0 / s2 : 0.0));
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "gaussian(" << mu_ << "," << sigma_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double mu_, sigma_;
  FunctionTraits t_;
};

class HeatKernel final : public Function {
 public:
  HeatKernel(std::size_t n, double t0) : n_(n), t0_(t0) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "heat_kernel t0 must be > 0");
    norm_ = std::pow(4.0 * std::numbers::pi * t0, -0.5 * n);
    const double sigma = std::sqrt(2.0 * t0);
    t_.decay = DecayClass::gaussian;
    t_.length_scale = sigma;
    t_.axis_scales.assign(n, sigma);
    fill_box(t_, n, -kGaussCut * sigma, kGaussCut * sigma);
    t_.total_mass = 1.0;
    t_.sup_abs = norm_;
    t_.heat_limit = 0.0;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override {
    return norm_ * std::exp(-sq_dist(x, 0.0) / (4.0 * t0_));
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    const double f = value(x);
    for (std::size_t i = 0; i < n_; ++i) g[i] = -f * x[i] / (2.0 * t0_);
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double f = value(x), a = 1.0 / (2.0 * t0_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) h[i * n_ + j] = f * (a * a * x[i] * x[j] - (i == j ? a : 0.0));
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "heat_kernel(" << t0_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double t0_, norm_;
  FunctionTraits t_;
};

class Bump final : public Function {
 public:
  Bump(std::size_t n, double c, double r) : n_(n), c_(c), r_(r) {
    if (!(r > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "bump radius must be > 0");
    t_.decay = DecayClass::compact_support;
    t_.length_scale = 0.25 * r;
    t_.axis_scales.assign(n, 0.25 * r);
    fill_box(t_, n, c - r, c + r);
    t_.breakpoints = {c - r, c + r};
    t_.sup_abs = 1.0;
    t_.heat_limit = 0.0;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override {
    const double q = 1.0 - sq_dist(x, c_) / (r_ * r_);
    if (q <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / q);
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    const double q = 1.0 - sq_dist(x, c_) / (r_ * r_);
    if (q <= 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return;
    }
    const double f = std::exp(1.0 - 1.0 / q), r2 = r_ * r_;
    for (std::size_t i = 0; i < n_; ++i) g[i] = f * (-2.0 * (x[i] - c_) / (r2 * q * q));
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double q = 1.0 - sq_dist(x, c_) / (r_ * r_);
    if (q <= 0.0) {
      std::fill(h.begin(), h.end(), 0.0);
      return;
    }
    const double f = std::exp(1.0 - 1.0 / q), r2 = r_ * r_;
    for (std::size_t i = 0; i < n_; ++i) {
      const double yi = x[i] - c_, vi = -2.0 * yi / (r2 * q * q);
      for (std::size_t j = 0; j < n_; ++j) {
        const double yj = x[j] - c_, vj = -2.0 * yj / (r2 * q * q);
        const double dv = (i == j ? -2.0 / (r2 * q * q) : 0.0) - 8.0 * yi * yj / (r2 * r2 * q * q * q);
        h[i * n_ + j] = f * (vi * vj + dv);
      }
    }
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "bump(" << c_ << "," << r_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double c_, r_;
  FunctionTraits t_;
};

class ExpGrowth final : public Function {
 public:
  ExpGrowth(std::size_t n, double lambda) : n_(n), lambda_(lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "exp_growth lambda must be > 0");
    t_.decay = DecayClass::exponential_left;
    t_.length_scale = 1.0 / lambda;
    t_.axis_scales.assign(n, kInf);
    t_.axis_scales[0] = 1.0 / lambda;
    fill_box(t_, n, -kInf, kInf);
    t_.sup_abs = kInf;
    t_.left_decay_rate = lambda;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override { return std::exp(lambda_ * x[0]); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = lambda_ * value(x);
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    std::fill(h.begin(), h.end(), 0.0);
    h[0] = lambda_ * lambda_ * value(x);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "exp_growth(" << lambda_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double lambda_;
  FunctionTraits t_;
};

class Cosine final : public Function {
 public:
  Cosine(std::size_t n, std::vector<double> k) : n_(n), k_(std::move(k)) {
    k_.resize(n, 0.0);
    double k2 = 0.0;
    for (double ki : k_) k2 += ki * ki;
    if (!(k2 > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "cosine needs a nonzero wavevector");
    t_.decay = DecayClass::bounded;
    t_.length_scale = 1.0 / std::sqrt(k2);
    t_.axis_scales.resize(n);
    for (std::size_t i = 0; i < n; ++i) t_.axis_scales[i] = k_[i] != 0.0 ? 1.0 / std::abs(k_[i]) : kInf;
    fill_box(t_, n, -kInf, kInf);
    t_.wavevector = k_;
    t_.sup_abs = 1.0;
    t_.heat_limit = 0.0;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override { return std::cos(phase(x)); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    const double s = std::sin(phase(x));
    for (std::size_t i = 0; i < n_; ++i) g[i] = -k_[i] * s;
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double c = std::cos(phase(x));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) h[i * n_ + j] = -k_[i] * k_[j] * c;
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "cosine(";
    for (std::size_t i = 0; i < k_.size(); ++i) os << (i ? "," : "") << k_[i];
    os << ")";
    return os.str();
  }

 private:
  double phase(std::span<const double> x) const {
    double p = 0.0;
    for (std::size_t i = 0; i < n_; ++i) p += k_[i] * x[i];
    return p;
  }
  std::size_t n_;
  std::vector<double> k_;
  FunctionTraits t_;
};

class Indicator final : public Function {
 public:
  Indicator(std::size_t n, double a, double b) : n_(n), a_(a), b_(b) {
    if (!(b > a)) throw Error(ErrorKind::ParameterOutOfRange, "indicator needs a < b");
    t_.decay = DecayClass::compact_support;
    t_.length_scale = 0.5 * (b - a);
    t_.axis_scales.assign(n, 0.5 * (b - a));
    fill_box(t_, n, a, b);
    t_.breakpoints = {a, b};
    t_.sup_abs = 1.0;
    t_.smooth = false;
    t_.heat_limit = 0.0;
    const double r = 0.5 * (b - a);
    t_.total_mass = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(r, double(n));
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override {
    const double c = 0.5 * (a_ + b_), r = 0.5 * (b_ - a_);
    return sq_dist(x, c) <= r * r ? 1.0 : 0.0;
  }
  void gradient(std::span<const double>, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
  }
  void hessian(std::span<const double>, std::span<double> h) const override {
    std::fill(h.begin(), h.end(), 0.0);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "indicator(" << a_ << "," << b_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double a_, b_;
  FunctionTraits t_;
};

class Constant final : public Function {
 public:
  Constant(std::size_t n, double c) : n_(n), c_(c) {
    t_.decay = DecayClass::bounded;
    t_.length_scale = kInf;
    t_.axis_scales.assign(n, kInf);
    fill_box(t_, n, -kInf, kInf);
    t_.constant_value = c;
    t_.sup_abs = std::abs(c);
    t_.heat_limit = c;
  }
  std::size_t dim() const override { return n_; }
  double value(std::span<const double>) const override { return c_; }
  void gradient(std::span<const double>, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
  }
  void hessian(std::span<const double>, std::span<double> h) const override {
    std::fill(h.begin(), h.end(), 0.0);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "constant(" << c_ << ")";
    return os.str();
  }

 private:
  std::size_t n_;
  double c_;
  FunctionTraits t_;
};

// ---- combinators --------------------------------------------------------

class Reflected final : public Function {
 public:
  explicit Reflected(FunctionPtr f) : f_(std::move(f)) {
    t_ = f_->traits();
    std::vector<double> lo(t_.support_hi.size()), hi(t_.support_lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = -t_.support_hi[i];
      hi[i] = -t_.support_lo[i];
    }
    t_.support_lo = lo;
    t_.support_hi = hi;
    for (double& b : t_.breakpoints) b = -b;
    std::sort(t_.breakpoints.begin(), t_.breakpoints.end());
    if (t_.decay == DecayClass::exponential_left) {
      // e^{-lambda t} decays to the right, not the left
      t_.decay = DecayClass::bounded;
      t_.left_decay_rate = 0.0;
    }
  }
  std::size_t dim() const override { return f_->dim(); }
  double value(std::span<const double> x) const override {
    auto y = neg(x);
    return f_->value(y);
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    auto y = neg(x);
    f_->gradient(y, g);
    for (double& gi : g) gi = -gi;
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    auto y = neg(x);
    f_->hessian(y, h);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return "reflect(" + f_->name() + ")"; }
  const FunctionPtr& inner() const { return f_; }

 private:
  static std::vector<double> neg(std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v = -v;
    return y;
  }
  FunctionPtr f_;
  FunctionTraits t_;
};

class Combination final : public Function {
 public:
  Combination(double a, FunctionPtr f, double b, FunctionPtr g)
      : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {
    if (f_->dim() != g_->dim()) throw Error(ErrorKind::GridMismatch, "dimension mismatch");
    const auto& tf = f_->traits();
    const auto& tg = g_->traits();
    t_ = tf;
    auto rank = [](DecayClass c) {
      switch (c) {
        case DecayClass::compact_support: return 0;
        case DecayClass::gaussian: return 1;
        case DecayClass::exponential_left: return 2;
        case DecayClass::bounded: return 3;
      }
      return 3;
    };
    if (rank(tg.decay) > rank(tf.decay)) t_.decay = tg.decay;
    t_.length_scale = std::min(tf.length_scale, tg.length_scale);
    for (std::size_t i = 0; i < t_.axis_scales.size(); ++i)
      t_.axis_scales[i] = std::min(tf.axis_scales[i], tg.axis_scales[i]);
    for (std::size_t i = 0; i < t_.support_lo.size(); ++i) {
      t_.support_lo[i] = std::min(tf.support_lo[i], tg.support_lo[i]);
      t_.support_hi[i] = std::max(tf.support_hi[i], tg.support_hi[i]);
    }
    t_.breakpoints.insert(t_.breakpoints.end(), tg.breakpoints.begin(), tg.breakpoints.end());
    std::sort(t_.breakpoints.begin(), t_.breakpoints.end());
    t_.wavevector.reset();
    if (tf.wavevector && tg.wavevector && *tf.wavevector == *tg.wavevector) t_.wavevector = tf.wavevector;
    if (b == 0.0) t_.wavevector = tf.wavevector;
    if (a == 0.0) t_.wavevector = tg.wavevector;
    t_.constant_value.reset();
    if (tf.constant_value && tg.constant_value) t_.constant_value = a * *tf.constant_value + b * *tg.constant_value;
    t_.total_mass.reset();
    if (tf.total_mass && tg.total_mass) t_.total_mass = a * *tf.total_mass + b * *tg.total_mass;
    t_.sup_abs = std::abs(a) * tf.sup_abs + std::abs(b) * tg.sup_abs;
    t_.left_decay_rate = std::min(tf.decay == DecayClass::exponential_left ? tf.left_decay_rate : kInf,
                                  tg.decay == DecayClass::exponential_left ? tg.left_decay_rate : kInf);
    if (!std::isfinite(t_.left_decay_rate)) t_.left_decay_rate = 0.0;
    t_.smooth = tf.smooth && tg.smooth;
    t_.heat_limit.reset();
    if (tf.heat_limit && tg.heat_limit) t_.heat_limit = a * *tf.heat_limit + b * *tg.heat_limit;
  }
  std::size_t dim() const override { return f_->dim(); }
  double value(std::span<const double> x) const override { return a_ * f_->value(x) + b_ * g_->value(x); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    std::vector<double> tmp(g.size());
    f_->gradient(x, g);
    g_->gradient(x, tmp);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = a_ * g[i] + b_ * tmp[i];
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    std::vector<double> tmp(h.size());
    f_->hessian(x, h);
    g_->hessian(x, tmp);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = a_ * h[i] + b_ * tmp[i];
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << a_ << "*" << f_->name() << "+" << b_ << "*" << g_->name();
    return os.str();
  }
  std::vector<std::pair<double, FunctionPtr>> terms() const override { return {{a_, f_}, {b_, g_}}; }

 private:
  double a_, b_;
  FunctionPtr f_, g_;
  FunctionTraits t_;
};

class Affine final : public Function {
 public:
  // x -> f(scale * x - shift)
  Affine(FunctionPtr f, double scale, double shift) : f_(std::move(f)), scale_(scale), shift_(shift) {
    if (!(scale > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "dilation must be > 0");
    t_ = f_->traits();
    auto map_back = [&](double y) { return (y + shift_) / scale_; };
    for (double& v : t_.support_lo) v = map_back(v);
    for (double& v : t_.support_hi) v = map_back(v);
    for (double& v : t_.breakpoints) v = map_back(v);
    t_.length_scale /= scale;
    for (double& v : t_.axis_scales) v /= scale;
    if (t_.wavevector)
      for (double& k : *t_.wavevector) k *= scale;
    if (t_.total_mass) *t_.total_mass /= std::pow(scale, double(f_->dim()));
    t_.left_decay_rate *= scale;
    if (t_.wavevector) t_.wavevector.reset();  // phase shift breaks the pure-cosine form
  }
  std::size_t dim() const override { return f_->dim(); }
  double value(std::span<const double> x) const override {
    auto y = map(x);
    return f_->value(y);
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    auto y = map(x);
    f_->gradient(y, g);
    for (double& v : g) v *= scale_;
  }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    auto y = map(x);
    f_->hessian(y, h);
    for (double& v : h) v *= scale_ * scale_;
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << f_->name() << "(" << scale_ << "x-" << shift_ << ")";
    return os.str();
  }

 private:
  std::vector<double> map(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v = scale_ * v - shift_;
    return y;
  }
  FunctionPtr f_;
  double scale_, shift_;
  FunctionTraits t_;
};

class Derivative1D final : public Function {
 public:
  explicit Derivative1D(FunctionPtr f) : f_(std::move(f)) {
    if (f_->dim() != 1) throw Error(ErrorKind::ParameterOutOfRange, "derivative() is 1D only");
    t_ = f_->traits();
    t_.constant_value.reset();
    if (f_->traits().constant_value) t_.constant_value = 0.0;
    t_.total_mass = 0.0;
    t_.heat_limit = 0.0;
    t_.sup_abs = std::isfinite(t_.sup_abs) ? t_.sup_abs / std::min(1.0, t_.length_scale) : t_.sup_abs;
  }
  std::size_t dim() const override { return 1; }
  double value(std::span<const double> x) const override { return f_->d1(x[0]); }
  void gradient(std::span<const double> x, std::span<double> g) const override { g[0] = f_->d2(x[0]); }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double e = 1e-4 * std::min(1.0, t_.length_scale);
    h[0] = (f_->d2(x[0] + e) - f_->d2(x[0] - e)) / (2.0 * e);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return "d(" + f_->name() + ")"; }

 private:
  FunctionPtr f_;
  FunctionTraits t_;
};

double param(const CatalogEntry& e, std::size_t i, double fallback) {
  return i < e.parameters.size() ? e.parameters[i] : fallback;
}

}  // namespace

const char* to_string(DecayClass c) {
  switch (c) {
    case DecayClass::compact_support: return "compact_support";
    case DecayClass::gaussian: return "gaussian";
    case DecayClass::exponential_left: return "exponential_left";
    case DecayClass::bounded: return "bounded";
  }
  return "?";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::bump: return "bump";
    case Family::exp_growth: return "exp_growth";
    case Family::cosine: return "cosine";
    case Family::heat_kernel: return "heat_kernel";
    case Family::indicator: return "indicator";
    case Family::constant: return "constant";
  }
  return "?";
}

double Function::laplacian(std::span<const double> x) const {
  const std::size_t n = dim();
  std::vector<double> h(n * n);
  hessian(x, h);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += h[i * n + i];
  return s;
}

double Function::hessian_norm(std::span<const double> x) const {
  const std::size_t n = dim();
  std::vector<double> h(n * n);
  hessian(x, h);
  double s = 0.0;
  for (double v : h) s += v * v;
  return std::sqrt(s);
}

double Function::d1(double t) const {
  double g = 0.0;
  gradient(std::span<const double>(&t, 1), std::span<double>(&g, 1));
  return g;
}

double Function::d2(double t) const {
  double h = 0.0;
  hessian(std::span<const double>(&t, 1), std::span<double>(&h, 1));
  return h;
}

std::vector<std::string> function_catalog() {
  return {"gaussian", "bump", "exp_growth", "cosine", "heat_kernel", "indicator", "constant"};
}

CatalogEntry parse_entry(const std::string& spec) {
  std::string s;
  for (char c : spec)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  CatalogEntry e;
  const auto open = s.find('(');
  e.name = s.substr(0, open);
  if (open != std::string::npos) {
    const auto close = s.find(')', open);
    if (close == std::string::npos || close + 1 != s.size())
      throw Error(ErrorKind::ParameterOutOfRange, "malformed catalog spec '" + spec + "'");
    std::stringstream body(s.substr(open + 1, close - open - 1));
    std::string tok;
    while (std::getline(body, tok, ',')) {
      try {
        std::size_t used = 0;
        e.parameters.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParameterOutOfRange, "bad parameter '" + tok + "' in '" + spec + "'");
      }
    }
  }
  static const std::pair<const char*, Family> kFamilies[] = {
      {"gaussian", Family::gaussian},   {"bump", Family::bump},
      {"exp_growth", Family::exp_growth}, {"cosine", Family::cosine},
      {"heat_kernel", Family::heat_kernel}, {"indicator", Family::indicator},
      {"constant", Family::constant}};
  for (const auto& [name, fam] : kFamilies) {
    if (e.name == name) {
      e.family = fam;
      return e;
    }
  }
  throw Error(ErrorKind::UnknownFamily, "unknown catalog function '" + e.name + "'");
}

FunctionPtr make_function(const CatalogEntry& e, std::size_t dim) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::ParameterOutOfRange, "dimension must be 1..3");
  switch (e.family) {
    case Family::gaussian:
      return std::make_shared<Gaussian>(dim, param(e, 0, 0.0), param(e, 1, 1.0));
    case Family::bump:
      return std::make_shared<Bump>(dim, param(e, 0, 0.0), param(e, 1, 1.0));
    case Family::exp_growth:
      return std::make_shared<ExpGrowth>(dim, param(e, 0, 1.0));
    case Family::cosine: {
      std::vector<double> k = e.parameters.empty() ? std::vector<double>{1.0} : e.parameters;
      if (k.size() > dim) throw Error(ErrorKind::ParameterOutOfRange, "cosine wavevector longer than dimension");
      return std::make_shared<Cosine>(dim, k);
    }
    case Family::heat_kernel:
      return std::make_shared<HeatKernel>(dim, param(e, 0, 0.5));
    case Family::indicator:
      return std::make_shared<Indicator>(dim, param(e, 0, 0.0), param(e, 1, 1.0));
    case Family::constant:
      return std::make_shared<Constant>(dim, param(e, 0, 1.0));
  }
  throw Error(ErrorKind::UnknownFamily, e.name);
}

FunctionPtr make_function(const std::string& spec, std::size_t dim) {
  return make_function(parse_entry(spec), dim);
}

FunctionPtr reflect(FunctionPtr f) {
  if (auto r = std::dynamic_pointer_cast<const Reflected>(f)) return r->inner();
  return std::make_shared<Reflected>(std::move(f));
}

FunctionPtr linear_combination(double a, FunctionPtr f, double b, FunctionPtr g) {
  return std::make_shared<Combination>(a, std::move(f), b, std::move(g));
}

FunctionPtr translate(FunctionPtr f, double c) { return std::make_shared<Affine>(std::move(f), 1.0, c); }

FunctionPtr dilate(FunctionPtr f, double lambda) { return std::make_shared<Affine>(std::move(f), lambda, 0.0); }

FunctionPtr derivative(FunctionPtr f) { return std::make_shared<Derivative1D>(std::move(f)); }

}  // namespace fraclab
