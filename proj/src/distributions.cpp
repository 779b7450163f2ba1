#include "dtbh/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtbh/numerics.hpp"

namespace dtbh {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Gaussian support is truncated at +/- 8 sigma for quadrature and root
// finding; the mass beyond is ~1e-15 and irrelevant at the tolerances used.
constexpr double kGaussianSupportSigmas = 8.0;

double gaussian_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

double gaussian_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * kSqrt2));
}

}  // namespace

struct DensityModel::Impl {
  Kind kind = Kind::gaussian;
  int dim = 1;
  // gaussian
  double mean = 0.0;
  double stddev = 1.0;
  // exponential
  double rate = 1.0;
  // mixture / product (2 parts, weights 1) / shifted (1 part)
  std::vector<std::pair<double, DensityModel>> parts;
  // shifted
  double offset = 0.0;
  // radial2d
  std::function<double(double)> profile;
  Point center{0.5, 0.5};
  double radial_norm = 1.0;  // integral of profile over the unit square
  double radial_peak = 1.0;  // sup of the normalized pdf
  // tabulated
  std::vector<double> values;  // normalized density per cell
  std::vector<double> cum;     // cumulative cell masses
  int res = 0;
};

DensityModel::DensityModel(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

DensityModel::DensityModel() : DensityModel(gaussian(0.0, 1.0)) {}

DensityModel DensityModel::gaussian(double mean, double stddev) {
  if (stddev < 0.0 || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw ConfigError("gaussian: stddev must be finite and non-negative");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::gaussian;
  impl->dim = 1;
  impl->mean = mean;
  impl->stddev = stddev;
  return DensityModel(impl);
}

DensityModel DensityModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("exponential: rate must be positive");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::exponential;
  impl->dim = 1;
  impl->rate = rate;
  return DensityModel(impl);
}

DensityModel DensityModel::uniform_cube(int dimension) {
  if (dimension != 1 && dimension != 2) {
    throw ConfigError("uniform_cube: dimension must be 1 or 2");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::uniform_cube;
  impl->dim = dimension;
  return DensityModel(impl);
}

DensityModel DensityModel::mixture(
    std::vector<std::pair<double, DensityModel>> components) {
  if (components.empty()) {
    throw ConfigError("mixture: needs at least one component");
  }
  double total = 0.0;
  const int dim = components.front().second.dimension();
  for (const auto& [w, model] : components) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ConfigError("mixture: weights must be non-negative");
    }
    if (model.dimension() != dim) {
      throw ConfigError("mixture: components must share a dimension");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("mixture: weights must sum to 1");
  }
  for (auto& [w, model] : components) w /= total;  // exact renormalization
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::mixture;
  impl->dim = dim;
  impl->parts = std::move(components);
  return DensityModel(impl);
}

DensityModel DensityModel::radial2d(std::function<double(double)> profile,
                                    Point center) {
  if (!profile) throw ConfigError("radial2d: missing profile");
  if (center.dim != 2 || center.x() <= 0.0 || center.x() >= 1.0 ||
      center.y() <= 0.0 || center.y() >= 1.0) {
    throw ConfigError("radial2d: center must lie inside the unit square");
  }
  // The profile must be monotone non-increasing in the radius.
  const double r_max = std::sqrt(2.0);
  double prev = profile(0.0);
  for (int i = 1; i <= 64; ++i) {
    const double r = r_max * i / 64.0;
    const double v = profile(r);
    if (v < 0.0 || !std::isfinite(v)) {
      throw ConfigError("radial2d: profile must be finite and non-negative");
    }
    if (v > prev * (1.0 + 1e-9) + 1e-12) {
      throw ConfigError("radial2d: profile must be monotone non-increasing");
    }
    prev = v;
  }
  // Normalize over the unit square by midpoint quadrature (512 x 512 cells).
  const int n = 512;
  const double w = 1.0 / n;
  double mass = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = (iy + 0.5) * w;
    for (int ix = 0; ix < n; ++ix) {
      const double x = (ix + 0.5) * w;
      const double dx = x - center.x();
      const double dy = y - center.y();
      mass += profile(std::sqrt(dx * dx + dy * dy));
    }
  }
  mass *= w * w;
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericError("radial2d: profile does not normalize over the square");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::radial2d;
  impl->dim = 2;
  impl->profile = std::move(profile);
  impl->center = center;
  impl->radial_norm = mass;
  impl->radial_peak = impl->profile(0.0) / mass;
  return DensityModel(impl);
}

DensityModel DensityModel::tabulated(std::vector<double> cell_values,
                                     int dimension) {
  if (dimension != 1 && dimension != 2) {
    throw ConfigError("tabulated: dimension must be 1 or 2");
  }
  if (cell_values.empty()) throw ConfigError("tabulated: empty grid");
  int res;
  if (dimension == 1) {
    res = static_cast<int>(cell_values.size());
  } else {
    res = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(cell_values.size()))));
    if (static_cast<std::size_t>(res) * res != cell_values.size()) {
      throw ConfigError("tabulated: 2-D grid must be square");
    }
  }
  double cell = std::pow(1.0 / res, dimension);
  double mass = 0.0;
  for (double v : cell_values) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw ConfigError("tabulated: cell values must be finite, non-negative");
    }
    mass += v * cell;
  }
  if (!(mass > 0.0)) throw ConfigError("tabulated: zero total mass");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::tabulated;
  impl->dim = dimension;
  impl->res = res;
  impl->values = std::move(cell_values);
  impl->cum.resize(impl->values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < impl->values.size(); ++i) {
    impl->values[i] /= mass;  // renormalize so the density integrates to 1
    acc += impl->values[i] * cell;
    impl->cum[i] = acc;
  }
  impl->cum.back() = 1.0;
  return DensityModel(impl);
}

DensityModel DensityModel::product(DensityModel first, DensityModel second) {
  if (first.dimension() != 1 || second.dimension() != 1) {
    throw ConfigError("product: both factors must be 1-D");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::product;
  impl->dim = 2;
  impl->parts.emplace_back(1.0, std::move(first));
  impl->parts.emplace_back(1.0, std::move(second));
  return DensityModel(impl);
}

DensityModel DensityModel::shifted(DensityModel base, double offset) {
  if (base.dimension() != 1) throw ConfigError("shifted: base must be 1-D");
  if (!std::isfinite(offset)) throw ConfigError("shifted: offset not finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::shifted;
  impl->dim = 1;
  impl->offset = offset;
  impl->parts.emplace_back(1.0, std::move(base));
  return DensityModel(impl);
}

DensityModel::Kind DensityModel::kind() const { return impl_->kind; }
int DensityModel::dimension() const { return impl_->dim; }

bool DensityModel::degenerate() const {
  switch (impl_->kind) {
    case Kind::gaussian:
      return impl_->stddev == 0.0;
    case Kind::mixture: {
      for (const auto& [w, m] : impl_->parts) {
        if (w > 0.0 && m.degenerate()) return true;
      }
      return false;
    }
    case Kind::shifted:
      return impl_->parts.front().second.degenerate();
    default:
      return false;
  }
}

double DensityModel::pdf(const Point& x) const {
  const Impl& im = *impl_;
  if (x.dim != im.dim) {
    throw ConfigError("pdf: point dimension does not match the model");
  }
  switch (im.kind) {
    case Kind::gaussian:
      if (im.stddev == 0.0) {
        throw NumericError("pdf: degenerate (zero-spread) gaussian");
      }
      return gaussian_pdf(x.x(), im.mean, im.stddev);
    case Kind::exponential:
      return x.x() < 0.0 ? 0.0 : im.rate * std::exp(-im.rate * x.x());
    case Kind::uniform_cube:
      for (int a = 0; a < im.dim; ++a) {
        if (x[a] < 0.0 || x[a] > 1.0) return 0.0;
      }
      return 1.0;
    case Kind::mixture: {
      double v = 0.0;
      for (const auto& [w, m] : im.parts) v += w * m.pdf(x);
      return v;
    }
    case Kind::radial2d: {
      if (x.x() < 0.0 || x.x() > 1.0 || x.y() < 0.0 || x.y() > 1.0) return 0.0;
      const double dx = x.x() - im.center.x();
      const double dy = x.y() - im.center.y();
      return im.profile(std::sqrt(dx * dx + dy * dy)) / im.radial_norm;
    }
    case Kind::tabulated: {
      for (int a = 0; a < im.dim; ++a) {
        if (x[a] < 0.0 || x[a] > 1.0) return 0.0;
      }
      auto cell_of = [&](double v) {
        int c = static_cast<int>(v * im.res);
        return std::min(c, im.res - 1);
      };
      if (im.dim == 1) return im.values[cell_of(x.x())];
      return im.values[static_cast<std::size_t>(cell_of(x.y())) * im.res +
                       cell_of(x.x())];
    }
    case Kind::product:
      return im.parts[0].second.pdf(Point(x.x())) *
             im.parts[1].second.pdf(Point(x.y()));
    case Kind::shifted:
      return im.parts.front().second.pdf(Point(x.x() - im.offset));
  }
  throw NumericError("pdf: unreachable");
}

double DensityModel::cdf(double x) const {
  const Impl& im = *impl_;
  if (im.dim != 1) throw ConfigError("cdf: defined for 1-D models only");
  switch (im.kind) {
    case Kind::gaussian:
      if (im.stddev == 0.0) {
        throw NumericError("cdf: degenerate (zero-spread) gaussian");
      }
      return gaussian_cdf(x, im.mean, im.stddev);
    case Kind::exponential:
      return x < 0.0 ? 0.0 : -std::expm1(-im.rate * x);
    case Kind::uniform_cube:
      return std::clamp(x, 0.0, 1.0);
    case Kind::mixture: {
      double v = 0.0;
      for (const auto& [w, m] : im.parts) v += w * m.cdf(x);
      return v;
    }
    case Kind::tabulated: {
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      const double fx = x * im.res;
      const int c = std::min(static_cast<int>(fx), im.res - 1);
      const double before = (c == 0) ? 0.0 : im.cum[c - 1];
      return before + im.values[c] * (x - static_cast<double>(c) / im.res);
    }
    case Kind::shifted:
      return im.parts.front().second.cdf(x - im.offset);
    default:
      throw ConfigError("cdf: not defined for this model kind");
  }
}

double DensityModel::quantile(double u) const {
  const Impl& im = *impl_;
  if (im.dim != 1) throw ConfigError("quantile: 1-D models only");
  if (!(u > 0.0 && u < 1.0)) {
    throw ConfigError("quantile: u must lie strictly inside (0, 1)");
  }
  switch (im.kind) {
    case Kind::exponential:
      return -std::log1p(-u) / im.rate;
    case Kind::uniform_cube:
      return u;
    case Kind::tabulated: {
      const auto it = std::lower_bound(im.cum.begin(), im.cum.end(), u);
      const std::size_t c = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - im.cum.begin(), im.res - 1));
      const double before = (c == 0) ? 0.0 : im.cum[c - 1];
      const double inside =
          (im.values[c] > 0.0) ? (u - before) / im.values[c] : 0.0;
      return static_cast<double>(c) / im.res + inside;
    }
    case Kind::shifted:
      return im.parts.front().second.quantile(u) + im.offset;
    default: {
      // gaussian / mixture: monotone CDF inversion on the support.
      const Interval s = support();
      return bisect_increasing([this](double x) { return cdf(x); }, s.lo, s.hi,
                               u, 1e-13 * std::max(1.0, s.hi - s.lo), 200);
    }
  }
}

double DensityModel::sample1(RandomStream& rng) const {
  const Impl& im = *impl_;
  if (im.dim != 1) throw ConfigError("sample1: 1-D models only");
  switch (im.kind) {
    case Kind::gaussian:
      return im.stddev == 0.0 ? im.mean : rng.gaussian(im.mean, im.stddev);
    case Kind::exponential:
      return rng.exponential(im.rate);
    case Kind::uniform_cube:
      return rng.uniform();
    case Kind::mixture: {
      double u = rng.uniform();
      for (const auto& [w, m] : im.parts) {
        if (u < w) return m.sample1(rng);
        u -= w;
      }
      return im.parts.back().second.sample1(rng);
    }
    case Kind::tabulated:
      return quantile(rng.uniform_pos() * (1.0 - 1e-16));
    case Kind::shifted:
      return im.parts.front().second.sample1(rng) + im.offset;
    default:
      throw ConfigError("sample1: not defined for this model kind");
  }
}

Point DensityModel::sample(RandomStream& rng) const {
  const Impl& im = *impl_;
  if (im.dim == 1) return Point(sample1(rng));
  switch (im.kind) {
    case Kind::uniform_cube:
      return Point(rng.uniform(), rng.uniform());
    case Kind::mixture: {
      double u = rng.uniform();
      for (const auto& [w, m] : im.parts) {
        if (u < w) return m.sample(rng);
        u -= w;
      }
      return im.parts.back().second.sample(rng);
    }
    case Kind::radial2d: {
      // Rejection from the uniform square; the normalized peak bounds the pdf.
      for (int tries = 0; tries < 1000000; ++tries) {
        Point p(rng.uniform(), rng.uniform());
        if (rng.uniform() * im.radial_peak <= pdf(p)) return p;
      }
      throw NumericError("radial2d: rejection sampling failed to accept");
    }
    case Kind::tabulated: {
      const double u = rng.uniform_pos() * (1.0 - 1e-16);
      const auto it = std::lower_bound(im.cum.begin(), im.cum.end(), u);
      std::size_t c = static_cast<std::size_t>(it - im.cum.begin());
      if (c >= im.values.size()) c = im.values.size() - 1;
      const int iy = static_cast<int>(c) / im.res;
      const int ix = static_cast<int>(c) % im.res;
      return Point((ix + rng.uniform()) / im.res, (iy + rng.uniform()) / im.res);
    }
    case Kind::product:
      return Point(im.parts[0].second.sample1(rng),
                   im.parts[1].second.sample1(rng));
    default:
      throw ConfigError("sample: not defined for this model kind");
  }
}

Interval DensityModel::support(int axis) const {
  const Impl& im = *impl_;
  if (axis < 0 || axis >= im.dim) throw ConfigError("support: bad axis");
  switch (im.kind) {
    case Kind::gaussian: {
      const double h = kGaussianSupportSigmas * std::max(im.stddev, 0.0);
      return {im.mean - h, im.mean + h};
    }
    case Kind::exponential:
      // quantile(1 - 1e-16); mass beyond is negligible at our tolerances.
      return {0.0, 37.0 / im.rate};
    case Kind::uniform_cube:
    case Kind::radial2d:
    case Kind::tabulated:
      return {0.0, 1.0};
    case Kind::mixture: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& [w, m] : im.parts) {
        if (w <= 0.0) continue;
        const Interval s = m.support(axis);
        lo = std::min(lo, s.lo);
        hi = std::max(hi, s.hi);
      }
      return {lo, hi};
    }
    case Kind::product:
      return im.parts[static_cast<std::size_t>(axis)].second.support(0);
    case Kind::shifted: {
      Interval s = im.parts.front().second.support(0);
      return {s.lo + im.offset, s.hi + im.offset};
    }
  }
  throw NumericError("support: unreachable");
}

const std::vector<std::pair<double, DensityModel>>& DensityModel::components()
    const {
  return impl_->parts;
}

double DensityModel::radial_profile_value(double r) const {
  if (impl_->kind != Kind::radial2d) {
    throw ConfigError("radial_profile_value: not a radial2d model");
  }
  return impl_->profile(r) / impl_->radial_norm;
}

Point DensityModel::radial_center() const {
  if (impl_->kind != Kind::radial2d) {
    throw ConfigError("radial_center: not a radial2d model");
  }
  return impl_->center;
}

int DensityModel::tabulated_resolution() const {
  if (impl_->kind != Kind::tabulated) {
    throw ConfigError("tabulated_resolution: not a tabulated model");
  }
  return impl_->res;
}

const std::vector<double>& DensityModel::tabulated_values() const {
  if (impl_->kind != Kind::tabulated) {
    throw ConfigError("tabulated_values: not a tabulated model");
  }
  return impl_->values;
}

}  // namespace dtbh
