#pragma once

// Separable value-function features psi(t,x) = kappa(t) (x) phi(x).

#include <memory>

#include "hjb/ocp.hpp"

namespace hjb {

/// (1/w) sin(w pi/2 (t-T)/T); vanishes at t = T.
double kappa(int omega, double t, double T);
/// d/dt of kappa(omega, t, T).
double kappa_dt(int omega, double t, double T);

/// (1, x1, x2, x1 x2, x1^2, x2^2). Throws DomainError unless x has size 2.
Vec phi(const Vec& x);
Mat phi_grad(const Vec& x);
Vec phi_laplacian(const Vec& x);

/// Scalar functions of time, all vanishing at the horizon.
class TemporalBasis {
 public:
  virtual ~TemporalBasis() = default;
  virtual int size() const = 0;
  virtual double horizon() const = 0;
  virtual double value(int j, double t) const = 0;
  virtual double dt(int j, double t) const = 0;
};

/// Spatial feature map with analytic Jacobian and Laplacian.
class SpatialBasis {
 public:
  virtual ~SpatialBasis() = default;
  virtual int size() const = 0;
  virtual int dim() const = 0;
  virtual Vec value(const Vec& x) const = 0;
  /// size() x dim()
  virtual Mat jacobian(const Vec& x) const = 0;
  virtual Vec laplacian(const Vec& x) const = 0;
};

/// kappa_j for omega = 1..m_t.
class SineTemporalBasis final : public TemporalBasis {
 public:
  SineTemporalBasis(int m_t, double T);
  int size() const override { return m_t_; }
  double horizon() const override { return T_; }
  double value(int j, double t) const override;
  double dt(int j, double t) const override;

 private:
  int m_t_;
  double T_;
};

/// Single function T - t.
class LinearDecayTemporalBasis final : public TemporalBasis {
 public:
  explicit LinearDecayTemporalBasis(double T);
  int size() const override { return 1; }
  double horizon() const override { return T_; }
  double value(int, double t) const override { return T_ - t; }
  double dt(int, double) const override { return -1.0; }

 private:
  double T_;
};

/// Monomials of degree <= 2: 1, x_i, x_i x_j (i<j), x_i^2. For d = 2 this is
/// exactly phi().
class QuadraticMonomials final : public SpatialBasis {
 public:
  explicit QuadraticMonomials(int d);
  int size() const override;
  int dim() const override { return d_; }
  Vec value(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  Vec laplacian(const Vec& x) const override;

 private:
  int d_;
};

/// phi(x) = 1.
class ConstantSpatialBasis final : public SpatialBasis {
 public:
  explicit ConstantSpatialBasis(int d) : d_(d) {}
  int size() const override { return 1; }
  int dim() const override { return d_; }
  Vec value(const Vec&) const override { return Vec::Ones(1); }
  Mat jacobian(const Vec&) const override { return Mat::Zero(1, d_); }
  Vec laplacian(const Vec&) const override { return Vec::Zero(1); }

 private:
  int d_;
};

/// psi_{i + phi_dim * j}(t,x) = phi_i(x) kappa_j(t).
class FeatureBasis {
 public:
  FeatureBasis(std::shared_ptr<const TemporalBasis> time,
               std::shared_ptr<const SpatialBasis> space);

  /// Sine temporal basis with quadratic monomials (m = 6 m_t when d = 2).
  static FeatureBasis sine_quadratic(int m_t, double T, int d = 2);
  /// V_theta(t,x) = theta (T - t) + M(x).
  static FeatureBasis linear_decay(double T, int d);

  int m_t() const { return time_->size(); }
  int phi_dim() const { return space_->size(); }
  int m() const { return m_t() * phi_dim(); }
  int dim() const { return space_->dim(); }
  double horizon() const { return time_->horizon(); }

  Vec psi(double t, const Vec& x) const;
  Vec psi_dt(double t, const Vec& x) const;
  /// m x d Jacobian with respect to x.
  Mat psi_jac_x(double t, const Vec& x) const;
  Vec psi_laplacian(double t, const Vec& x) const;

 private:
  std::shared_ptr<const TemporalBasis> time_;
  std::shared_ptr<const SpatialBasis> space_;
};

/// V_theta(t,x) = theta' psi(t,x) + M(x).
struct ValueModel {
  FeatureBasis basis;
  Vec theta;
  TerminalCost terminal;

  double value(double t, const Vec& x) const;
  Vec grad_x(double t, const Vec& x) const;
  double dt(double t, const Vec& x) const;
  double laplacian(double t, const Vec& x) const;

  /// Handle sharing a copy of this model.
  ValueFunction handle() const;
};

}  // namespace hjb
