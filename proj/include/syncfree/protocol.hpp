#pragma once

#include "syncfree/plant.hpp"

namespace syncfree {

enum class Scaling { none, local_bounds };

inline std::string to_string(Scaling s) { return s == Scaling::none ? "none" : "local_bounds"; }

inline Scaling parse_scaling(const std::string& s) {
  if (s == "none") return Scaling::none;
  if (s == "local_bounds") return Scaling::local_bounds;
  throw ParseError("unknown scaling '" + s + "'");
}

// Dynamic output protocol x_c^+ = A_c x_c + B_c z, u = F_c x_c + D_c z, where
// z is the raw network signal (scaling none) or the locally scaled signal
// zeta/(1+q_i) (scaling local_bounds). The strictly proper designed protocols
// have D_c = 0; a nonzero D_c encodes static protocols such as u = -zeta.
struct Protocol {
  MatrixXd Ac, Bc, Fc, Dc;
  Scaling scaling = Scaling::none;

  int nc() const { return static_cast<int>(Ac.rows()); }

  void validate_for(const LTIPlant& pl) const {
    const int nc_ = nc();
    if (Ac.cols() != nc_) throw DimensionMismatch("Ac must be square");
    if (Bc.rows() != nc_ || (nc_ > 0 && Bc.cols() != pl.p()))
      throw DimensionMismatch("Bc must be nc x p");
    if (Fc.cols() != nc_ || (nc_ > 0 && Fc.rows() != pl.m()))
      throw DimensionMismatch("Fc must be m x nc");
    if (Dc.rows() != pl.m() || Dc.cols() != pl.p()) throw DimensionMismatch("Dc must be m x p");
  }

  static Protocol zero(const LTIPlant& pl, Scaling scaling) {
    Protocol pr;
    pr.Ac = MatrixXd::Zero(0, 0);
    pr.Bc = MatrixXd::Zero(0, pl.p());
    pr.Fc = MatrixXd::Zero(pl.m(), 0);
    pr.Dc = MatrixXd::Zero(pl.m(), pl.p());
    pr.scaling = scaling;
    return pr;
  }

  static Protocol static_gain(const MatrixXd& dc, Scaling scaling) {
    Protocol pr;
    pr.Ac = MatrixXd::Zero(0, 0);
    pr.Bc = MatrixXd::Zero(0, dc.cols());
    pr.Fc = MatrixXd::Zero(dc.rows(), 0);
    pr.Dc = dc;
    pr.scaling = scaling;
    return pr;
  }
};

}  // namespace syncfree
