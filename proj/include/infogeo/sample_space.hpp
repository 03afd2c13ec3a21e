#pragma once

#include <memory>
#include <string>
#include <vector>

namespace infogeo {

/// Discretized sample space: either a finite set of labelled outcomes or a
/// 1-D quadrature grid on a truncated interval.  All integrals in the library
/// are weighted sums over the points of one of these.
class SampleSpace {
public:
  enum class Kind { Finite, Grid1D };

  /// One uniform composite-Simpson segment of a Grid1D space.
  struct Segment {
    double a = 0.0;
    double b = 1.0;
    std::size_t points = 3;  // odd, >= 3
  };

  static std::shared_ptr<const SampleSpace>
  finite(std::vector<std::string> labels, std::vector<double> base_weights = {});

  /// Finite space with outcomes "0", "1", ..., "n-1" and unit weights.
  static std::shared_ptr<const SampleSpace> finite(std::size_t n);

  /// Uniform grid on [a, b] with composite Simpson weights (n odd, >= 3).
  static std::shared_ptr<const SampleSpace> grid(double a, double b, std::size_t n);

  /// Concatenation of Simpson segments sharing endpoints; the shared node
  /// keeps a single entry with the two boundary weights added.  Used for
  /// densities that need strongly non-uniform resolution.
  static std::shared_ptr<const SampleSpace> grid_segments(const std::vector<Segment>& segments);

  Kind kind() const { return kind_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& base_weights() const { return weights_; }

  /// Grid1D only: strictly increasing abscissas.
  const std::vector<double>& abscissas() const;
  double abscissa(std::size_t i) const { return abscissas()[i]; }

  /// Finite only: outcome labels.
  const std::vector<std::string>& labels() const;

  bool same_space(const SampleSpace& other) const { return this == &other; }

private:
  SampleSpace(Kind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

  Kind kind_;
  std::vector<double> weights_;
  std::vector<double> abscissas_;     // Grid1D
  std::vector<std::string> labels_;   // Finite
};

}  // namespace infogeo
