#include "qfl/functional.hpp"

#include "qfl/errors.hpp"

namespace qfl {

Functional Functional::constant(double value) {
  Functional g;
  g.kind_ = Kind::constant;
  g.offset_ = value;
  return g;
}

Functional Functional::linear(ComplexMatrix f, double offset) {
  require_square(f, "Functional::linear");
  Functional g;
  g.kind_ = Kind::linear;
  g.f_ = std::move(f);
  g.offset_ = offset;
  return g;
}

Functional Functional::quadratic(ComplexMatrix c1, ComplexMatrix f, double offset) {
  require_square(c1, "Functional::quadratic");
  if (f.size() != 0) require_same_dim(c1, f, "Functional::quadratic");
  Functional g;
  g.kind_ = Kind::quadratic;
  g.c1_ = std::move(c1);
  g.f_ = std::move(f);
  g.offset_ = offset;
  return g;
}

Functional Functional::custom(std::function<double(const ComplexMatrix&)> fn) {
  if (!fn) throw InvalidArgument("Functional::custom: empty evaluator");
  Functional g;
  g.kind_ = Kind::custom;
  g.fn_ = std::move(fn);
  return g;
}

double Functional::operator()(const ComplexMatrix& rho) const {
  switch (kind_) {
    case Kind::constant:
      return offset_;
    case Kind::custom:
      return fn_(rho);
    case Kind::linear:
    case Kind::quadratic:
      break;
  }
  double v = offset_;
  if (f_.size() != 0) v += hs_inner(f_, rho).real();
  if (c1_.size() != 0) v += hs_inner(rho, c1_ * rho).real();
  return v;
}

ComplexMatrix Functional::gradient(const ComplexMatrix& rho) const {
  switch (kind_) {
    case Kind::constant:
      return ComplexMatrix::Zero(rho.rows(), rho.cols());
    case Kind::custom:
      throw InvalidArgument("Functional::gradient: custom functionals have no analytic gradient");
    case Kind::linear:
    case Kind::quadratic:
      break;
  }
  ComplexMatrix g = ComplexMatrix::Zero(rho.rows(), rho.cols());
  if (f_.size() != 0) {
    require_same_dim(f_, rho, "Functional::gradient");
    g += f_;
  }
  if (c1_.size() != 0) {
    require_same_dim(c1_, rho, "Functional::gradient");
    g += (c1_ + c1_.adjoint()) * rho;
  }
  return hermitian_part(g);
}

double Functional::second_derivative(const ComplexMatrix& tau) const {
  if (kind_ == Kind::custom) throw InvalidArgument("Functional::second_derivative: not available for custom kinds");
  if (c1_.size() == 0) return 0.0;
  return 2.0 * hs_inner(tau, c1_ * tau).real();
}

}  // namespace qfl
