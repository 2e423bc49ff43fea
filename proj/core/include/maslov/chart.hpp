#pragma once

#include "maslov/matrixkit.hpp"

namespace maslov {

/// Point of the top Schubert cell: the symmetric matrix s = p q^{-1}.
class SymmetricChart {
 public:
  SymmetricChart() = default;
  explicit SymmetricChart(RealSymmetric s);
  explicit SymmetricChart(const RealMatrix& s) : SymmetricChart(RealSymmetric(s)) {}

  static SymmetricChart zero(Eigen::Index n) { return SymmetricChart(RealSymmetric::zero(n)); }

  const RealSymmetric& symmetric() const noexcept { return s_; }
  const RealMatrix& matrix() const noexcept { return s_.matrix(); }
  Eigen::Index size() const noexcept { return s_.size(); }

 private:
  RealSymmetric s_;
};

}  // namespace maslov
