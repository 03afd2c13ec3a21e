#include "infogeo/sample_space.hpp"

#include <cmath>
#include <stdexcept>

namespace infogeo {

namespace {

void check_weights(const std::vector<double>& w) {
  if (w.empty()) throw std::invalid_argument("sample space needs at least one point");
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("base weights must be strictly positive and finite");
    }
  }
}

// Composite Simpson weights h/3 * {1,4,2,4,...,4,1} on n odd nodes.
std::vector<double> simpson_weights(double a, double b, std::size_t n) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("Simpson grid needs an odd point count >= 3");
  if (!(b > a)) throw std::invalid_argument("grid interval must have positive length");
  const double h = (b - a) / static_cast<double>(n - 1);
  std::vector<double> w(n, 0.0);
  w.front() = w.back() = h / 3.0;
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
  return w;
}

}  // namespace

std::shared_ptr<const SampleSpace> SampleSpace::finite(std::vector<std::string> labels,
                                                       std::vector<double> base_weights) {
  if (labels.empty()) throw std::invalid_argument("sample space needs at least one point");
  if (base_weights.empty()) base_weights.assign(labels.size(), 1.0);
  if (base_weights.size() != labels.size()) {
    throw std::invalid_argument("labels and base weights differ in length");
  }
  check_weights(base_weights);
  auto space = std::shared_ptr<SampleSpace>(new SampleSpace(Kind::Finite, std::move(base_weights)));
  space->labels_ = std::move(labels);
  return space;
}

std::shared_ptr<const SampleSpace> SampleSpace::finite(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return finite(std::move(labels));
}

std::shared_ptr<const SampleSpace> SampleSpace::grid(double a, double b, std::size_t n) {
  return grid_segments({Segment{a, b, n}});
}

std::shared_ptr<const SampleSpace> SampleSpace::grid_segments(const std::vector<Segment>& segments) {
  if (segments.empty()) throw std::invalid_argument("grid needs at least one segment");
  std::vector<double> xs;
  std::vector<double> ws;
  for (const Segment& seg : segments) {
    std::vector<double> sw = simpson_weights(seg.a, seg.b, seg.points);
    const double h = (seg.b - seg.a) / static_cast<double>(seg.points - 1);
    for (std::size_t i = 0; i < seg.points; ++i) {
      const double x = (i + 1 == seg.points) ? seg.b : seg.a + h * static_cast<double>(i);
      if (!xs.empty() && x == xs.back()) {
        ws.back() += sw[i];  // shared segment endpoint
      } else {
        if (!xs.empty() && !(x > xs.back())) {
          throw std::invalid_argument("grid abscissas must be strictly increasing");
        }
        xs.push_back(x);
        ws.push_back(sw[i]);
      }
    }
  }
  check_weights(ws);
  auto space = std::shared_ptr<SampleSpace>(new SampleSpace(Kind::Grid1D, std::move(ws)));
  space->abscissas_ = std::move(xs);
  return space;
}

const std::vector<double>& SampleSpace::abscissas() const {
  if (kind_ != Kind::Grid1D) throw std::logic_error("abscissas: not a Grid1D space");
  return abscissas_;
}

const std::vector<std::string>& SampleSpace::labels() const {
  if (kind_ != Kind::Finite) throw std::logic_error("labels: not a finite space");
  return labels_;
}

}  // namespace infogeo
