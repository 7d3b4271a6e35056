#include "holosplit/holo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "holosplit/error.hpp"

namespace holosplit {

struct HoloMap::Impl {
  MapRep tag = MapRep::Identity;
  std::vector<Cx> coeffs;  // difference coefficients, lowest degree first
  Field grid;
  std::shared_ptr<const Impl> outer, inner;  // composite: outer(inner(z))
  std::shared_ptr<const Impl> forward;       // inverse: the map being inverted
  std::function<Cx(Cx)> fn;
  Region domain;
  double cached_norm = 0.0;
  int degree = -1;
  std::string note;

  Cx diff(Cx z) const {
    switch (tag) {
      case MapRep::Identity:
        return Cx{0.0, 0.0};
      case MapRep::Poly: {
        Cx acc{0.0, 0.0};
        for (int k = (int)coeffs.size() - 1; k >= 0; --k) acc = acc * z + coeffs[k];
        return acc;
      }
      case MapRep::Grid:
        return grid.interp(z);
      case MapRep::Composite: {
        Cx fi = inner->diff(z);
        return fi + outer->diff(z + fi);
      }
      case MapRep::Inverse: {
        Cx s{0.0, 0.0};
        double res = 1e300;
        for (int it = 0; it < 200; ++it) {
          Cx next = -forward->diff(z + s);
          res = std::abs(next - s);
          s = next;
          if (res <= 1e-13) return s;
        }
        fail("numerical-failure",
             "inverse fixed point stalled, residual " + fmt("%.3e", res) + " at " + fmt_cx(z));
      }
      case MapRep::Callable:
        return fn(z);
    }
    fail("numerical-failure", "unknown map representation");
  }

  bool evaluable(Cx z) const {
    switch (tag) {
      case MapRep::Identity:
      case MapRep::Poly:
      case MapRep::Callable:
        return true;  // entire expressions
      case MapRep::Grid:
        return grid.interpolable(z);
      case MapRep::Composite:
        return inner->evaluable(z) && outer->evaluable(z + inner->diff(z));
      case MapRep::Inverse:
        return domain.contains(z);
    }
    return false;
  }
};

namespace {

std::shared_ptr<HoloMap::Impl> fresh(MapRep tag, Region domain) {
  auto impl = std::make_shared<HoloMap::Impl>();
  impl->tag = tag;
  impl->domain = std::move(domain);
  return impl;
}

// Construction sweep: every domain sample must evaluate; the sup over the
// sweep is the cached norm.
void seal(HoloMap::Impl& impl) {
  double norm = 0.0;
  for (auto& z : impl.domain.samples) norm = std::max(norm, std::abs(impl.diff(z)));
  impl.cached_norm = norm;
}

}  // namespace

HoloMap HoloMap::identity(Region domain) {
  auto impl = fresh(MapRep::Identity, std::move(domain));
  return HoloMap(impl);
}

HoloMap HoloMap::polynomial(const std::vector<Cx>& map_coeffs, Region domain) {
  require(!map_coeffs.empty(), "invalid-input", "polynomial map needs coefficients");
  auto impl = fresh(MapRep::Poly, std::move(domain));
  impl->coeffs = map_coeffs;
  if (impl->coeffs.size() < 2) impl->coeffs.resize(2, Cx{0.0, 0.0});
  impl->coeffs[1] -= 1.0;  // exact removal of the identity part
  while (impl->coeffs.size() > 1 && impl->coeffs.back() == Cx{0.0, 0.0}) impl->coeffs.pop_back();
  impl->degree = (int)map_coeffs.size() - 1;
  seal(*impl);
  return HoloMap(impl);
}

HoloMap HoloMap::perturbation(const std::vector<Cx>& diff_coeffs, Region domain) {
  auto impl = fresh(MapRep::Poly, std::move(domain));
  impl->coeffs = diff_coeffs;
  if (impl->coeffs.empty()) impl->coeffs.push_back(Cx{0.0, 0.0});
  int deg = 1;
  for (int k = 0; k < (int)impl->coeffs.size(); ++k)
    if (impl->coeffs[k] != Cx{0.0, 0.0} || k == 1) deg = std::max(deg, k);
  impl->degree = deg;
  seal(*impl);
  return HoloMap(impl);
}

HoloMap HoloMap::from_grid(Field diff, Region domain, std::string note) {
  auto impl = fresh(MapRep::Grid, std::move(domain));
  impl->grid = std::move(diff);
  impl->note = std::move(note);
  seal(*impl);
  return HoloMap(impl);
}

HoloMap HoloMap::callable(std::function<Cx(Cx)> diff, Region domain, std::string note) {
  auto impl = fresh(MapRep::Callable, std::move(domain));
  impl->fn = std::move(diff);
  impl->note = std::move(note);
  seal(*impl);
  return HoloMap(impl);
}

Cx HoloMap::diff(Cx z) const { return impl_->diff(z); }
bool HoloMap::evaluable(Cx z) const { return impl_->evaluable(z); }
MapRep HoloMap::rep() const { return impl_->tag; }
int HoloMap::degree() const { return impl_->degree; }
const std::vector<Cx>& HoloMap::coefficients() const {
  require(impl_->tag == MapRep::Poly, "invalid-input",
          "coefficients available for polynomial maps only");
  return impl_->coeffs;
}
const Region& HoloMap::domain() const { return impl_->domain; }
double HoloMap::domain_norm() const { return impl_->cached_norm; }
const std::string& HoloMap::note() const { return impl_->note; }

HoloMap compose(const HoloMap& g, const HoloMap& f, const Region& domain) {
  require(f.valid() && g.valid(), "invalid-input", "compose needs constructed maps");
  std::string offenders;
  int bad = 0;
  for (auto& z : domain.samples) {
    if (!f.evaluable(z)) {
      ++bad;
      if (bad <= 5) offenders += " " + fmt_cx(z);
      continue;
    }
    Cx w = f.eval(z);
    if (!g.evaluable(w)) {
      ++bad;
      if (bad <= 5) offenders += " " + fmt_cx(w);
    }
  }
  require(bad == 0, "domain-violation",
          fmt("%d", bad) + " of " + fmt("%d", (int)domain.samples.size()) +
              " sample points escape the outer map's domain, first:" + offenders);

  auto impl = fresh(MapRep::Composite, domain);
  impl->outer = g.impl_;
  impl->inner = f.impl_;
  seal(*impl);
  return HoloMap(impl);
}

double sup_norm(const std::function<Cx(Cx)>& f, const Region& r) {
  require(!r.samples.empty(), "invalid-input", "sup norm needs a nonempty sample set");
  double norm = 0.0;
  for (auto& z : r.samples) norm = std::max(norm, std::abs(f(z)));
  return norm;
}

double sup_norm(const HoloMap& f, const Region& r) {
  return sup_norm([&](Cx z) { return f.eval(z); }, r);
}

double diff_norm(const HoloMap& f, const Region& r) {
  return sup_norm([&](Cx z) { return f.diff(z); }, r);
}

namespace {

void check_segment_dilation(const Region& v, double d, Cx x, Cx y) {
  int segn = std::max(2, (int)std::ceil(std::abs(y - x) / std::max(1e-6, d / 8)));
  for (int s = 0; s <= segn; ++s) {
    Cx p = x + (double)s / segn * (y - x);
    require(v.contains(p), "precondition-violation",
            "segment point " + fmt_cx(p) + " leaves the region");
    for (int a = 0; a < 16; ++a) {
      Cx q = p + d * (1.0 - 1e-9) * std::polar(1.0, 2 * std::numbers::pi * a / 16);
      require(v.contains(q), "precondition-violation",
              "dilated segment point " + fmt_cx(q) + " leaves the region");
    }
  }
}

}  // namespace

LipschitzCheck lipschitz_bound(const std::function<Cx(Cx)>& F, const Region& V, double d, Cx x,
                               Cx y) {
  require(d > 0.0, "invalid-parameter", "distance parameter must be positive");
  check_segment_dilation(V, d, x, y);
  LipschitzCheck out;
  out.bound = sup_norm(F, V) / d * std::abs(y - x);
  out.actual = std::abs(F(y) - F(x));
  out.satisfied = out.actual <= out.bound;
  return out;
}

LipschitzCheck lipschitz_bound(const HoloMap& F, const Region& V, double d, Cx x, Cx y) {
  return lipschitz_bound([&](Cx z) { return F.eval(z); }, V, d, x, y);
}

InjectivityCertificate injectivity_margin_on(const HoloMap& phi, const Region& dilated,
                                             double r) {
  require(r > 0.0, "invalid-parameter", "injectivity margin radius must be positive");
  require(!dilated.samples.empty(), "invalid-input", "dilated region must be sampled");
  for (auto& z : dilated.samples)
    require(phi.evaluable(z), "domain-violation",
            "map not evaluable at dilation sample " + fmt_cx(z));
  InjectivityCertificate cert;
  cert.K = 0.25;
  cert.norm = diff_norm(phi, dilated);
  cert.allowance = cert.K * r;
  cert.certified = cert.norm <= cert.allowance;
  return cert;
}

InjectivityCertificate injectivity_margin(const HoloMap& phi, const Region& d_region,
                                          double r) {
  require(r > 0.0, "invalid-parameter", "injectivity margin radius must be positive");
  return injectivity_margin_on(phi, dilate(d_region, r), r);
}

HoloMap invert_near_identity(const HoloMap& phi, const Region& d_region, double delta,
                             double eps) {
  require(delta > 0.0 && eps > 0.0, "invalid-parameter", "delta and eps must be positive");
  require(eps < delta, "invalid-parameter",
          "need eps < delta, got eps = " + fmt("%g", eps) + ", delta = " + fmt("%g", delta));
  Region big = dilate(d_region, delta);
  double ndiff = diff_norm(phi, big);
  require(ndiff < eps, "precondition-violation",
          "sup |map - Id| = " + fmt("%.3e", ndiff) + " on the delta-dilation, need < eps = " +
              fmt("%.3e", eps));

  auto impl = fresh(MapRep::Inverse, dilate(d_region, delta - eps));
  impl->forward = phi.impl_;
  // Iterates stay within ndiff of the start, so the fixed-point map
  // contracts at rate bounded by the Cauchy estimate over the eps-margin.
  impl->note = "contraction estimate " + fmt("%.3e", ndiff / (eps - ndiff));
  seal(*impl);
  return HoloMap(impl);
}

HoloMap invert_near_identity_on(const HoloMap& phi, const Region& big, const Region& domain,
                                double eps) {
  require(eps > 0.0, "invalid-parameter", "eps must be positive");
  double ndiff = diff_norm(phi, big);
  require(ndiff < eps, "precondition-violation",
          "sup |map - Id| = " + fmt("%.3e", ndiff) + " on the sweep region, need < eps = " +
              fmt("%.3e", eps));
  auto impl = fresh(MapRep::Inverse, domain);
  impl->forward = phi.impl_;
  impl->note = "contraction estimate " + fmt("%.3e", ndiff / (eps - ndiff));
  seal(*impl);
  return HoloMap(impl);
}

int preimage_count(const std::function<Cx(Cx)>& phi, const std::vector<Cx>& contour, Cx w) {
  require(contour.size() >= 3, "invalid-input", "contour needs at least three points");
  auto val = [&](Cx p) {
    Cx v = phi(p) - w;
    require(std::abs(v) > 1e-10, "ill-conditioned-contour",
            "|map - w| = " + fmt("%.3e", std::abs(v)) + " at contour point " + fmt_cx(p));
    return v;
  };
  double total = 0.0;
  const int n = (int)contour.size();
  std::function<void(Cx, Cx, Cx, Cx, int)> walk = [&](Cx p, Cx q, Cx vp, Cx vq, int depth) {
    double da = std::arg(vq / vp);
    if (std::abs(da) <= std::numbers::pi / 2 || depth >= 40) {
      require(depth < 40, "ill-conditioned-contour",
              "argument jump unresolved after 40 refinements near " + fmt_cx(p));
      total += da;
      return;
    }
    Cx mid = 0.5 * (p + q), vm = val(mid);
    walk(p, mid, vp, vm, depth + 1);
    walk(mid, q, vm, vq, depth + 1);
  };
  std::vector<Cx> vals(n);
  for (int k = 0; k < n; ++k) vals[k] = val(contour[k]);
  for (int k = 0; k < n; ++k)
    walk(contour[k], contour[(k + 1) % n], vals[k], vals[(k + 1) % n], 0);
  double winding = total / (2 * std::numbers::pi);
  double nearest = std::round(winding);
  require(std::abs(winding - nearest) < 1e-6, "numerical-failure",
          "winding sum " + fmt("%.6f", winding) + " is not close to an integer");
  return (int)nearest;
}

int preimage_count(const HoloMap& phi, const std::vector<Cx>& contour, Cx w) {
  return preimage_count([&](Cx z) { return phi.eval(z); }, contour, w);
}

double dbar_residual(const Field& f) {
  const Canvas& cv = f.cv;
  double worst = -1.0;
  for (int j = 1; j + 1 < cv.ny; ++j)
    for (int i = 1; i + 1 < cv.nx; ++i) {
      int k = cv.idx(i, j);
      if (!f.valid[k] || !f.valid[k - 1] || !f.valid[k + 1] || !f.valid[k - cv.nx] ||
          !f.valid[k + cv.nx])
        continue;
      Cx dx = f.v[k + 1] - f.v[k - 1];
      Cx dy = f.v[k + cv.nx] - f.v[k - cv.nx];
      worst = std::max(worst, std::abs(dx + Cx{0.0, 1.0} * dy) / (4.0 * cv.h));
    }
  require(worst >= 0.0, "invalid-grid", "no interior lattice point with all four neighbors");
  return worst;
}

Field materialize(const HoloMap& f, const Canvas& cv, const Mask& m, bool map_values) {
  Field out(cv);
  for (int k = 0; k < cv.size(); ++k)
    if (m[k]) {
      Cx z = cv.node(k);
      out.v[k] = map_values ? f.eval(z) : f.diff(z);
      out.valid[k] = 1;
    }
  return out;
}

}  // namespace holosplit
