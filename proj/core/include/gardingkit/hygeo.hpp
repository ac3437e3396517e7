#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gardingkit/types.hpp"

namespace gk::hygeo {

/// Height field u > 0 over a regular lattice with 1 or 2 axes. One axis is a
/// radial cross-section (coordinate r), two axes a planar grid.
struct GraphField {
  int axes = 1;
  double x0 = 0.0, y0 = 0.0;
  double h = 0.0;  // spacing, shared by both axes
  int nx = 0, ny = 1;
  std::vector<double> u;  // row-major, u[iy*nx + ix]

  long nodes() const { return static_cast<long>(nx) * static_cast<long>(ny); }
  double x(int ix) const { return x0 + h * ix; }
  double y(int iy) const { return y0 + h * iy; }
  void validate() const;  // throws InvalidInput / DomainViolation
};

/// GraphField CSV: header "x,u" or "x,y,u"; the lattice is inferred and must
/// be regular. Throws FormatError on malformed input.
GraphField read_graph_csv(std::istream& in);
void write_graph_csv(std::ostream& out, const GraphField& field);

/// Per-node geometry of the graph: Euclidean data and the hyperbolic
/// principal curvatures kappa_i = u ktilde_i + nu.
struct ShapeData {
  int axes = 1;
  int nx = 0, ny = 1;
  int ncurv = 1;  // curvatures per node
  std::vector<double> u;
  std::vector<double> nu;            // upward-normal height component
  std::vector<double> grad;          // axes per node
  std::vector<double> kappa_tilde;   // ncurv per node, descending
  std::vector<double> kappa;         // ncurv per node, descending
  std::vector<double> metric_residual;  // |1 - |grad|^2_gtilde - nu^2|
  std::vector<double> eig_imag;      // imaginary residue of the 2x2 eigensolve
  std::vector<double> coord_x, coord_y;
  std::vector<double> kappa_rad, kappa_ang;  // radial profiles only (axes==1, n>1)

  long nodes() const { return static_cast<long>(nx) * static_cast<long>(ny); }
};

/// n is the hypersurface dimension: for a planar grid it must equal 2; for a
/// one-axis field with n > 1 the field is read as a radial profile u(r) and
/// every node carries kappa_rad once and kappa_ang with multiplicity n-1.
ShapeData shape_from_graph(const GraphField& field, int n);

struct RadialCurvatures {
  double rad = 0.0;  // hyperbolic, multiplicity 1
  double ang = 0.0;  // hyperbolic, multiplicity n-1
  double nu = 0.0;
  double rad_tilde = 0.0;
  double ang_tilde = 0.0;
};

/// Pointwise curvature pair of a radial graph from (u, u', u'') at radius r.
/// At r = 0, u' must vanish (SymmetryViolation otherwise) and the angular
/// curvature is continued by its limit, the radial one.
RadialCurvatures radial_curvatures(double u, double du, double ddu, double r);

/// Residuals of the second-order elliptic identity satisfied by nu along a
/// solution, evaluated on a radial profile by finite differences. Both signs
/// of the zeroth-order term k F (1 +- nu^2) are reported and the matching one
/// flagged; this is a diagnostic, the solver never consumes it.
struct EllipticResidual {
  double res_plus = 0.0;
  double res_minus = 0.0;
  std::string matched_sign;  // "+" or "-"
};

struct Diagnostics {
  double min_nu = 0.0, max_nu = 0.0;
  double max_abs_kappa = 0.0;
  double min_kappa = 0.0;
  double max_Q = 0.0;
  double gamma_k_fraction = 0.0;
  long flagged_multiplicity = 0;   // nodes with |kappa_1 - kappa_2| < 1e-9
  long nonpositive_kappa1 = 0;     // nodes where Q is undefined
  std::vector<double> Q;           // NaN at marked nodes
  std::vector<double> Pk;
  std::vector<std::uint8_t> in_gamma;
  std::optional<EllipticResidual> elliptic;  // radial profiles only

  nlohmann::json to_json() const;
};

Diagnostics diagnostics(const ShapeData& shape, int k, double L = 4.0);

/// ShapeData CSV: coordinates..., u, nu, kappa_1..kappa_n, Q.
void write_shape_csv(std::ostream& out, const ShapeData& shape, const Diagnostics& diag);

}  // namespace gk::hygeo
