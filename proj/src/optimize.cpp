#include "gaussrd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gaussrd/errors.hpp"

namespace gaussrd {

Eigen::VectorXd halton_point(int index, int dim) {
  static const int primes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > 16) throw DimensionMismatch("halton_point supports dim <= 16");
  Eigen::VectorXd p(dim);
  for (int d = 0; d < dim; ++d) {
    int base = primes[d];
    double f = 1.0, value = 0.0;
    int i = index + 1;
    while (i > 0) {
      f /= base;
      value += f * (i % base);
      i /= base;
    }
    p[d] = value;
  }
  return p;
}

namespace {

Eigen::VectorXd clip(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           double scale, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi,
                           const NelderMeadOptions& opt) {
  const int n = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.reserve(n + 1);
  pts.push_back(clip(x0, lo, hi));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = pts[0];
    double step = scale * (hi[i] - lo[i]);
    p[i] = (p[i] + step <= hi[i]) ? p[i] + step : p[i] - step;
    pts.push_back(clip(p, lo, hi));
  }
  vals.resize(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
  };

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    sort_simplex();
    int best = order[0], worst = order[n], second = order[n - 1];

    double fspread = vals[worst] - vals[best];
    double xspread = 0.0;
    for (int i = 1; i <= n; ++i)
      xspread = std::max(xspread,
                         (pts[order[i]] - pts[best]).cwiseAbs().maxCoeff());
    if (fspread < opt.f_tol && xspread < opt.x_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    Eigen::VectorXd xr = clip(centroid + alpha * (centroid - pts[worst]), lo, hi);
    double fr = f(xr);
    if (fr < vals[best]) {
      Eigen::VectorXd xe = clip(centroid + gamma * (centroid - pts[worst]), lo, hi);
      double fe = f(xe);
      if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
      else         { pts[worst] = xr; vals[worst] = fr; }
      continue;
    }
    if (fr < vals[second]) { pts[worst] = xr; vals[worst] = fr; continue; }

    Eigen::VectorXd xc = clip(centroid + rho * (pts[worst] - centroid), lo, hi);
    double fc = f(xc);
    if (fc < vals[worst]) { pts[worst] = xc; vals[worst] = fc; continue; }

    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = clip(pts[best] + sigma * (pts[i] - pts[best]), lo, hi);
      vals[i] = f(pts[i]);
    }
  }

  sort_simplex();
  return {vals[order[0]], pts[order[0]]};
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters) {
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace gaussrd
