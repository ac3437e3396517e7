#include "gardingkit/hygeo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "gardingkit/symfun.hpp"

namespace gk::hygeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One-dimensional stencils, order 2 everywhere (one-sided at the ends).
double d1(const std::vector<double>& f, long i, long count, double h) {
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  if (i == count - 1)
    return (3.0 * f[static_cast<std::size_t>(i)] - 4.0 * f[static_cast<std::size_t>(i - 1)] +
            f[static_cast<std::size_t>(i - 2)]) /
           (2.0 * h);
  return (f[static_cast<std::size_t>(i + 1)] - f[static_cast<std::size_t>(i - 1)]) / (2.0 * h);
}

double d2(const std::vector<double>& f, long i, long count, double h) {
  if (i == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
  if (i == count - 1)
    return (2.0 * f[static_cast<std::size_t>(i)] - 5.0 * f[static_cast<std::size_t>(i - 1)] +
            4.0 * f[static_cast<std::size_t>(i - 2)] - f[static_cast<std::size_t>(i - 3)]) /
           (h * h);
  return (f[static_cast<std::size_t>(i + 1)] - 2.0 * f[static_cast<std::size_t>(i)] +
          f[static_cast<std::size_t>(i - 1)]) /
         (h * h);
}

}  // namespace

void GraphField::validate() const {
  if (axes != 1 && axes != 2) throw InvalidInput("GraphField: axes must be 1 or 2");
  if (!(h > 0.0)) throw InvalidInput("GraphField: spacing h must be > 0");
  const int min_nodes = 4;  // one-sided second-difference stencils need 4 points
  if (nx < min_nodes || (axes == 2 && ny < min_nodes))
    throw InvalidInput("GraphField: need at least 4 nodes per axis");
  if (static_cast<long>(u.size()) != nodes())
    throw InvalidInput("GraphField: u size does not match the lattice");
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double v = u[static_cast<std::size_t>(iy) * nx + ix];
      if (!std::isfinite(v)) throw InvalidInput("GraphField: non-finite height");
      const bool boundary =
          ix == 0 || ix == nx - 1 || (axes == 2 && (iy == 0 || iy == ny - 1));
      if (boundary ? v < 0.0 : !(v > 0.0)) {
        std::ostringstream os;
        os << "GraphField: u " << (boundary ? "< 0" : "<= 0") << " at node (" << ix;
        if (axes == 2) os << "," << iy;
        os << ")";
        throw DomainViolation(os.str());
      }
    }
  }
}

GraphField read_graph_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("graph CSV: empty input");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto header = split(line);
  int axes = 0;
  if (header.size() == 2 && (header[0] == "x" || header[0] == "r") && header[1] == "u")
    axes = 1;
  else if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "u")
    axes = 2;
  else
    throw FormatError("graph CSV: header must be 'x,u' (or 'r,u') or 'x,y,u'");

  std::vector<std::array<double, 3>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto toks = split(line);
    if (static_cast<int>(toks.size()) != axes + 1)
      throw FormatError("graph CSV: wrong column count on line " + std::to_string(lineno));
    std::array<double, 3> row{0.0, 0.0, 0.0};
    for (int c = 0; c < axes + 1; ++c) {
      try {
        std::size_t used = 0;
        row[static_cast<std::size_t>(c)] = std::stod(toks[static_cast<std::size_t>(c)], &used);
        if (used != toks[static_cast<std::size_t>(c)].size()) throw std::invalid_argument("");
      } catch (...) {
        throw FormatError("graph CSV: unparsable number on line " + std::to_string(lineno));
      }
    }
    rows.push_back(row);
  }
  if (rows.size() < 4) throw FormatError("graph CSV: need at least 4 rows");

  auto unique_sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
      if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
  };

  std::vector<double> xs, ys;
  for (const auto& r : rows) xs.push_back(r[0]);
  xs = unique_sorted(xs);
  if (axes == 2) {
    for (const auto& r : rows) ys.push_back(r[1]);
    ys = unique_sorted(ys);
  } else {
    ys = {0.0};
  }
  if (xs.size() < 2) throw FormatError("graph CSV: degenerate x axis");
  // infer the spacing from the whole span; per-row jitter up to 1e-6 h is
  // accepted (CSV files often carry 6 significant digits)
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (xs.front() + h * static_cast<double>(i))) > 1e-6 * std::abs(h))
      throw FormatError("graph CSV: x axis is not a uniform lattice");
  if (axes == 2) {
    for (std::size_t i = 0; i < ys.size(); ++i)
      if (std::abs(ys[i] - (ys.front() + h * static_cast<double>(i))) > 1e-6 * std::abs(h))
        throw FormatError("graph CSV: y spacing does not match x spacing");
  }

  GraphField field;
  field.axes = axes;
  field.x0 = xs.front();
  field.y0 = axes == 2 ? ys.front() : 0.0;
  field.h = h;
  field.nx = static_cast<int>(xs.size());
  field.ny = axes == 2 ? static_cast<int>(ys.size()) : 1;
  field.u.assign(static_cast<std::size_t>(field.nodes()), kNaN);
  for (const auto& r : rows) {
    const long ix = std::lround((r[0] - field.x0) / h);
    const long iy = axes == 2 ? std::lround((r[1] - field.y0) / h) : 0;
    if (ix < 0 || ix >= field.nx || iy < 0 || iy >= field.ny)
      throw FormatError("graph CSV: node off the inferred lattice");
    field.u[static_cast<std::size_t>(iy) * field.nx + static_cast<std::size_t>(ix)] =
        r[static_cast<std::size_t>(axes)];
  }
  for (double v : field.u)
    if (std::isnan(v)) throw FormatError("graph CSV: lattice has missing nodes");
  return field;
}

void write_graph_csv(std::ostream& out, const GraphField& field) {
  out << (field.axes == 1 ? "x,u\n" : "x,y,u\n");
  for (int iy = 0; iy < field.ny; ++iy)
    for (int ix = 0; ix < field.nx; ++ix) {
      out << fmt(field.x(ix));
      if (field.axes == 2) out << ',' << fmt(field.y(iy));
      out << ',' << fmt(field.u[static_cast<std::size_t>(iy) * field.nx + ix]) << '\n';
    }
}

RadialCurvatures radial_curvatures(double u, double du, double ddu, double r) {
  if (!(u > 0.0)) throw DomainViolation("radial_curvatures: u <= 0");
  if (r < 0.0) throw InvalidInput("radial_curvatures: r < 0");
  RadialCurvatures out;
  if (r == 0.0) {
    if (std::abs(du) > 1e-4 * std::max(1.0, std::abs(u)))
      throw SymmetryViolation("radial_curvatures: u'(0) != 0 at the axis");
    du = 0.0;  // symmetry row: the discrete slope is stencil noise
  }
  const double w2 = 1.0 + du * du;
  const double w = std::sqrt(w2);
  out.nu = 1.0 / w;
  out.rad_tilde = ddu / (w2 * w);
  out.ang_tilde = r == 0.0 ? out.rad_tilde : du / (r * w);
  out.rad = u * out.rad_tilde + out.nu;
  out.ang = u * out.ang_tilde + out.nu;
  return out;
}

namespace {

ShapeData shape_planar(const GraphField& field) {
  ShapeData s;
  s.axes = 2;
  s.nx = field.nx;
  s.ny = field.ny;
  s.ncurv = 2;
  const long count = field.nodes();
  s.u = field.u;
  s.nu.resize(static_cast<std::size_t>(count));
  s.grad.resize(static_cast<std::size_t>(count) * 2);
  s.kappa_tilde.resize(static_cast<std::size_t>(count) * 2);
  s.kappa.resize(static_cast<std::size_t>(count) * 2);
  s.metric_residual.resize(static_cast<std::size_t>(count));
  s.eig_imag.resize(static_cast<std::size_t>(count));
  s.coord_x.resize(static_cast<std::size_t>(count));
  s.coord_y.resize(static_cast<std::size_t>(count));

  const int nx = field.nx, ny = field.ny;
  const double h = field.h;
  auto at = [&](int ix, int iy) { return field.u[static_cast<std::size_t>(iy) * nx + ix]; };

  // rows and columns as 1-d slices for the stencils
  std::vector<double> row(static_cast<std::size_t>(nx)), col(static_cast<std::size_t>(ny));
  std::vector<double> ux(static_cast<std::size_t>(field.nodes()));
  std::vector<double> uy(static_cast<std::size_t>(field.nodes()));
  std::vector<double> uxx(static_cast<std::size_t>(field.nodes()));
  std::vector<double> uyy(static_cast<std::size_t>(field.nodes()));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) row[static_cast<std::size_t>(ix)] = at(ix, iy);
    for (int ix = 0; ix < nx; ++ix) {
      ux[static_cast<std::size_t>(iy) * nx + ix] = d1(row, ix, nx, h);
      uxx[static_cast<std::size_t>(iy) * nx + ix] = d2(row, ix, nx, h);
    }
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) col[static_cast<std::size_t>(iy)] = at(ix, iy);
    for (int iy = 0; iy < ny; ++iy) {
      uy[static_cast<std::size_t>(iy) * nx + ix] = d1(col, iy, ny, h);
      uyy[static_cast<std::size_t>(iy) * nx + ix] = d2(col, iy, ny, h);
    }
  }
  // u_xy: x-derivative of the uy field
  std::vector<double> uxy(static_cast<std::size_t>(field.nodes()));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) row[static_cast<std::size_t>(ix)] =
        uy[static_cast<std::size_t>(iy) * nx + ix];
    for (int ix = 0; ix < nx; ++ix)
      uxy[static_cast<std::size_t>(iy) * nx + ix] = d1(row, ix, nx, h);
  }

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t id = static_cast<std::size_t>(iy) * nx + ix;
      const double px = ux[id], py = uy[id];
      const double w2 = 1.0 + px * px + py * py;
      const double w = std::sqrt(w2);
      const double nu = 1.0 / w;
      // gtilde = I + Du Du^T, htilde = D2u / w; S = gtilde^{-1} htilde
      const double g00 = 1.0 + px * px, g01 = px * py, g11 = 1.0 + py * py;
      const double h00 = uxx[id] / w, h01 = uxy[id] / w, h11 = uyy[id] / w;
      const double det_g = w2;
      const double s00 = (g11 * h00 - g01 * h01) / det_g;
      const double s01 = (g11 * h01 - g01 * h11) / det_g;
      const double s10 = (g00 * h01 - g01 * h00) / det_g;
      const double s11 = (g00 * h11 - g01 * h01) / det_g;
      const double tr = s00 + s11;
      // (a-d)^2 + 4bc form: no tr^2 cancellation at umbilic points
      const double disc = (s00 - s11) * (s00 - s11) + 4.0 * s01 * s10;
      const double root = std::sqrt(std::max(disc, 0.0));
      const double k1 = 0.5 * (tr + root), k2 = 0.5 * (tr - root);

      s.coord_x[id] = field.x(ix);
      s.coord_y[id] = field.y(iy);
      s.nu[id] = nu;
      s.grad[2 * id] = px;
      s.grad[2 * id + 1] = py;
      s.kappa_tilde[2 * id] = k1;
      s.kappa_tilde[2 * id + 1] = k2;
      const double uval = field.u[id];
      double ka = uval * k1 + nu, kb = uval * k2 + nu;
      if (ka < kb) std::swap(ka, kb);
      s.kappa[2 * id] = ka;
      s.kappa[2 * id + 1] = kb;
      // |grad u|^2 in gtilde equals |Du|^2 / w2; the identity against nu^2
      const double grad2 = (px * px + py * py) / w2;
      s.metric_residual[id] = std::abs(1.0 - grad2 - nu * nu);
      s.eig_imag[id] = 0.5 * std::sqrt(std::max(-disc, 0.0));
    }
  }
  return s;
}

ShapeData shape_one_axis(const GraphField& field, int n) {
  ShapeData s;
  s.axes = 1;
  s.nx = field.nx;
  s.ny = 1;
  s.ncurv = n;
  const long count = field.nx;
  s.u = field.u;
  s.nu.resize(static_cast<std::size_t>(count));
  s.grad.resize(static_cast<std::size_t>(count));
  s.kappa_tilde.resize(static_cast<std::size_t>(count) * static_cast<std::size_t>(n));
  s.kappa.resize(static_cast<std::size_t>(count) * static_cast<std::size_t>(n));
  s.metric_residual.resize(static_cast<std::size_t>(count));
  s.eig_imag.assign(static_cast<std::size_t>(count), 0.0);
  s.coord_x.resize(static_cast<std::size_t>(count));
  s.coord_y.assign(static_cast<std::size_t>(count), 0.0);
  if (n > 1) {
    s.kappa_rad.resize(static_cast<std::size_t>(count));
    s.kappa_ang.resize(static_cast<std::size_t>(count));
  }

  const bool radial = n > 1;
  if (radial && field.x0 < 0.0)
    throw InvalidInput("shape_from_graph: radial profile needs r >= 0");
  if (radial && field.x0 == 0.0 && !(field.u.front() > 0.0))
    throw DomainViolation("shape_from_graph: u <= 0 at the axis node");

  for (long i = 0; i < count; ++i) {
    const double x = field.x(static_cast<int>(i));
    const double du = d1(field.u, i, count, field.h);
    const double ddu = d2(field.u, i, count, field.h);
    const double uval = field.u[static_cast<std::size_t>(i)];
    s.coord_x[static_cast<std::size_t>(i)] = x;
    s.grad[static_cast<std::size_t>(i)] = du;
    if (radial) {
      RadialCurvatures rc;
      if (uval == 0.0 && i == count - 1) {
        // zero boundary trace: the curvature relation degenerates to nu
        const double w = std::sqrt(1.0 + du * du);
        rc.nu = 1.0 / w;
        rc.rad_tilde = ddu / (w * w * w);
        rc.ang_tilde = du / (x * w);
        rc.rad = rc.nu;
        rc.ang = rc.nu;
      } else {
        rc = radial_curvatures(uval, du, ddu, x);
      }
      s.nu[static_cast<std::size_t>(i)] = rc.nu;
      s.kappa_rad[static_cast<std::size_t>(i)] = rc.rad;
      s.kappa_ang[static_cast<std::size_t>(i)] = rc.ang;
      std::vector<double> kt(static_cast<std::size_t>(n), rc.ang_tilde);
      std::vector<double> kh(static_cast<std::size_t>(n), rc.ang);
      kt[0] = rc.rad_tilde;
      kh[0] = rc.rad;
      std::sort(kt.begin(), kt.end(), std::greater<double>());
      std::sort(kh.begin(), kh.end(), std::greater<double>());
      for (int c = 0; c < n; ++c) {
        s.kappa_tilde[static_cast<std::size_t>(i) * n + c] = kt[static_cast<std::size_t>(c)];
        s.kappa[static_cast<std::size_t>(i) * n + c] = kh[static_cast<std::size_t>(c)];
      }
      const double w2 = 1.0 + du * du;
      s.metric_residual[static_cast<std::size_t>(i)] =
          std::abs(1.0 - du * du / w2 - rc.nu * rc.nu);
    } else {
      const double w2 = 1.0 + du * du;
      const double w = std::sqrt(w2);
      const double nu = 1.0 / w;
      const double kt = ddu / (w2 * w);
      s.nu[static_cast<std::size_t>(i)] = nu;
      s.kappa_tilde[static_cast<std::size_t>(i)] = kt;
      s.kappa[static_cast<std::size_t>(i)] = uval * kt + nu;
      s.metric_residual[static_cast<std::size_t>(i)] = std::abs(1.0 - du * du / w2 - nu * nu);
    }
  }
  return s;
}

}  // namespace

ShapeData shape_from_graph(const GraphField& field, int n) {
  field.validate();
  if (field.axes == 2) {
    if (n != 2) throw InvalidInput("shape_from_graph: a planar grid requires n = 2");
    return shape_planar(field);
  }
  if (n < 1) throw InvalidInput("shape_from_graph: need n >= 1");
  return shape_one_axis(field, n);
}

namespace {

// The elliptic identity satisfied by nu, specialized to rotationally
// symmetric hypersurfaces: the induced metric is ds^2 + phi(s)^2 dTheta^2
// with phi = r/u, so the hyperbolic Hessian of a radial function f reduces to
// f''(s) in the radial direction and (phi'/phi) f'(s) in the angular ones.
std::optional<EllipticResidual> elliptic_radial(const ShapeData& s, int k, double h) {
  const long count = s.nx;
  if (s.kappa_rad.empty() || count < 12) return std::nullopt;
  const int n = s.ncurv;
  if (k < 1 || k > n) return std::nullopt;

  std::vector<double> nu_r(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) nu_r[static_cast<std::size_t>(i)] = s.nu[static_cast<std::size_t>(i)];

  auto ds_of = [&](long i) {  // d/ds = (u/W) d/dr
    const double du = s.grad[static_cast<std::size_t>(i)];
    return s.u[static_cast<std::size_t>(i)] / std::sqrt(1.0 + du * du);
  };

  std::vector<double> dnu_ds(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) dnu_ds[static_cast<std::size_t>(i)] = ds_of(i) * d1(nu_r, i, count, h);
  std::vector<double> d2nu_ds(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i)
    d2nu_ds[static_cast<std::size_t>(i)] = ds_of(i) * d1(dnu_ds, i, count, h);

  EllipticResidual out;
  double worst_plus = 0.0, worst_minus = 0.0;
  const long margin = std::max<long>(3, count / 64);
  for (long i = margin; i < count - margin; ++i) {
    const std::size_t id = static_cast<std::size_t>(i);
    const double r = s.coord_x[id];
    if (r <= 0.0) continue;
    const double uval = s.u[id];
    const double du = s.grad[id];
    const double nu = s.nu[id];

    std::vector<double> kv(static_cast<std::size_t>(n), s.kappa_ang[id]);
    kv[0] = s.kappa_rad[id];
    const sym::SymBundle b = sym::build_bundle(CurvatureVector(kv));
    const double F = b.sigma(k);
    const double f_rad = b.minor1(0, k - 1);
    const double f_ang = n > 1 ? b.minor1(1, k - 1) : 0.0;

    double sum_f = f_rad, sum_fk2 = f_rad * kv[0] * kv[0];
    for (int c = 1; c < n; ++c) {
      sum_f += f_ang;
      sum_fk2 += f_ang * kv[static_cast<std::size_t>(c)] * kv[static_cast<std::size_t>(c)];
    }

    // phi'/phi in arclength: (u/W) d/dr log(r/u)
    const double phi_term = ds_of(i) * (1.0 / r - du / uval);
    const double lhs = f_rad * d2nu_ds[id] + (n - 1) * f_ang * phi_term * dnu_ds[id];
    const double du_ds = ds_of(i) * du;
    const double common = -(sum_fk2 + sum_f) * nu + 2.0 * f_rad * du_ds * dnu_ds[id] / uval;
    const double plus = common + static_cast<double>(k) * F * (1.0 + nu * nu);
    const double minus = common + static_cast<double>(k) * F * (1.0 - nu * nu);
    const double scale = std::max({1.0, std::abs(lhs), std::abs(common),
                                   std::abs(static_cast<double>(k) * F * (1.0 + nu * nu))});
    worst_plus = std::max(worst_plus, std::abs(lhs - plus) / scale);
    worst_minus = std::max(worst_minus, std::abs(lhs - minus) / scale);
  }
  out.res_plus = worst_plus;
  out.res_minus = worst_minus;
  out.matched_sign = worst_plus <= worst_minus ? "+" : "-";
  return out;
}

}  // namespace

Diagnostics diagnostics(const ShapeData& shape, int k, double L) {
  if (k < 1 || k > shape.ncurv)
    throw InvalidInput("diagnostics: need 1 <= k <= curvature count");
  const long count = shape.nodes();
  Diagnostics d;
  d.Q.assign(static_cast<std::size_t>(count), kNaN);
  d.Pk.assign(static_cast<std::size_t>(count), kNaN);
  d.in_gamma.assign(static_cast<std::size_t>(count), 0);
  d.min_nu = std::numeric_limits<double>::infinity();
  d.max_nu = -d.min_nu;
  d.max_abs_kappa = 0.0;
  d.min_kappa = std::numeric_limits<double>::infinity();
  d.max_Q = -std::numeric_limits<double>::infinity();

  long in_gamma_count = 0;
  const int nc = shape.ncurv;
  std::vector<double> kv(static_cast<std::size_t>(nc));
  for (long i = 0; i < count; ++i) {
    const std::size_t id = static_cast<std::size_t>(i);
    const double nu = shape.nu[id];
    d.min_nu = std::min(d.min_nu, nu);
    d.max_nu = std::max(d.max_nu, nu);
    double k1 = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < nc; ++c) {
      kv[static_cast<std::size_t>(c)] = shape.kappa[id * static_cast<std::size_t>(nc) +
                                                    static_cast<std::size_t>(c)];
      k1 = std::max(k1, kv[static_cast<std::size_t>(c)]);
      d.max_abs_kappa = std::max(d.max_abs_kappa, std::abs(kv[static_cast<std::size_t>(c)]));
      d.min_kappa = std::min(d.min_kappa, kv[static_cast<std::size_t>(c)]);
    }
    if (nc >= 2 && std::abs(kv[0] - kv[1]) < 1e-9) ++d.flagged_multiplicity;
    const auto sig = sym::sigmas_upto(kv, k);
    d.Pk[id] = sig[static_cast<std::size_t>(k)] / sym::binom(nc, k);
    bool in_g = true;
    for (int j = 1; j <= k; ++j) in_g = in_g && sig[static_cast<std::size_t>(j)] > 0.0;
    d.in_gamma[id] = in_g ? 1 : 0;
    if (in_g) ++in_gamma_count;
    if (k1 > 0.0 && nu > 0.0) {
      d.Q[id] = std::log(k1) - L * std::log(nu);
      d.max_Q = std::max(d.max_Q, d.Q[id]);
    } else {
      ++d.nonpositive_kappa1;
    }
  }
  d.gamma_k_fraction = static_cast<double>(in_gamma_count) / static_cast<double>(count);
  if (shape.axes == 1 && !shape.kappa_rad.empty() && shape.nx >= 2) {
    const double h = shape.coord_x[1] - shape.coord_x[0];
    d.elliptic = elliptic_radial(shape, k, h);
  }
  return d;
}

nlohmann::json Diagnostics::to_json() const {
  nlohmann::json j{{"min_nu", min_nu},
                   {"max_nu", max_nu},
                   {"max_abs_kappa", max_abs_kappa},
                   {"min_kappa", min_kappa},
                   {"max_Q", max_Q},
                   {"gamma_k_fraction", gamma_k_fraction},
                   {"flagged_multiplicity", flagged_multiplicity},
                   {"nonpositive_kappa1", nonpositive_kappa1}};
  if (elliptic) {
    j["elliptic_identity"] = {{"residual_plus", elliptic->res_plus},
                              {"residual_minus", elliptic->res_minus},
                              {"matched_sign", elliptic->matched_sign}};
  }
  return j;
}

void write_shape_csv(std::ostream& out, const ShapeData& shape, const Diagnostics& diag) {
  out << (shape.axes == 1 ? "x" : "x,y") << ",u,nu";
  for (int c = 1; c <= shape.ncurv; ++c) out << ",kappa_" << c;
  out << ",Q\n";
  const long count = shape.nodes();
  for (long i = 0; i < count; ++i) {
    const std::size_t id = static_cast<std::size_t>(i);
    out << fmt(shape.coord_x[id]);
    if (shape.axes == 2) out << ',' << fmt(shape.coord_y[id]);
    out << ',' << fmt(shape.u[id]) << ',' << fmt(shape.nu[id]);
    for (int c = 0; c < shape.ncurv; ++c)
      out << ',' << fmt(shape.kappa[id * static_cast<std::size_t>(shape.ncurv) +
                                    static_cast<std::size_t>(c)]);
    out << ',' << fmt(diag.Q[id]) << '\n';
  }
}

}  // namespace gk::hygeo
