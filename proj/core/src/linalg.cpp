#include "lyapguard/linalg.hpp"

namespace lyapguard {

double induced_norm(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m);
  return svd.singularValues()(0);
}

double min_symmetric_eigenvalue(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_symmetric_eigenvalue(const Mat6& m) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace lyapguard
