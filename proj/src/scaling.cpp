#include "rbm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "rbm/airy.hpp"
#include "rbm/error.hpp"
#include "rbm/hermite.hpp"
#include "rbm/parallel.hpp"
#include "rbm/quadrature.hpp"

namespace rbm {

ScaledVars scale_vars(double eps, double T, double x, double u) {
    if (!(eps > 0.0) || !(T > 0.0)) throw ArgumentError("scale_vars: need eps > 0 and T > 0");
    ScaledVars v;
    v.eps = eps;
    v.t = std::pow(eps, -1.5) * T;
    v.n_exact = v.t - 2.0 * x / eps;
    const double rn = std::round(v.n_exact);
    if (rn < 1.0) {
        std::ostringstream msg;
        msg << "scale_vars: eps = " << eps << " too large for x = " << x << " (n = " << v.n_exact << " < 1)";
        throw ArgumentError(msg.str());
    }
    if (rn > 2e9) throw ArgumentError("scale_vars: n too large");
    v.n = static_cast<int>(rn);
    v.rounding = rn - v.n_exact;
    if (std::abs(v.rounding) > 0.5) throw ArgumentError("scale_vars: rounding of n exceeds 1/2");
    v.x_eff = (v.t - v.n) * eps / 2.0;
    v.z = -2.0 * v.t + 2.0 * v.x_eff / eps + u / std::sqrt(eps);
    return v;
}

double scaled_threshold(const ScaledVars& v, double A) {
    return -2.0 * v.t + 2.0 * v.x_eff / v.eps - A / std::sqrt(v.eps);
}

std::pair<double, double> scaled_kernels(double eps, double T, double x, double v, double u) {
    const ScaledVars s = scale_vars(eps, T, x, u);
    const double eta = v / std::sqrt(eps), d = eta - s.z;
    const double pre = -0.5 * std::log(eps);
    const double S = psi_log(s.n, s.t, d).scaled(pre - 0.5 * s.t + d).value();
    const double Sb = psibar_log(s.n - 1, s.t, d).scaled(pre + 0.5 * s.t - d).value();
    return {S, Sb};
}

double fixedpoint_s(double T, double x, double w) {
    const double c = std::cbrt(T);
    const double ai = airy_ai(w / c + x * x / (c * T));
    if (ai == 0.0) return 0.0;
    return ai / c * std::exp(2.0 * x * x * x / (3.0 * T * T) + w * x / T);
}

void validate(const FixedPointSpec& spec) {
    if (!(spec.t > 0.0)) throw ArgumentError("fixed point: t must be > 0");
    if (spec.wedges.empty()) throw ArgumentError("fixed point: no wedges");
    for (std::size_t k = 0; k < spec.wedges.size(); ++k) {
        if (!std::isfinite(spec.wedges[k]) || spec.wedges[k] > 0.0)
            throw ArgumentError("fixed point: wedge positions must be finite and <= 0");
        if (k > 0 && !(spec.wedges[k] < spec.wedges[k - 1]))
            throw ArgumentError("fixed point: wedge positions must strictly decrease");
    }
    if (spec.points.empty()) throw ArgumentError("fixed point: no evaluation points");
    if (!spec.thresholds.empty() && spec.thresholds.size() != spec.points.size())
        throw ArgumentError("fixed point: one threshold per evaluation point");
    for (double x : spec.points)
        if (!std::isfinite(x)) throw ArgumentError("fixed point: evaluation points must be finite");
}

FixedPointKernel::FixedPointKernel(FixedPointSpec spec, FixedPointOptions options)
    : spec_(std::move(spec)), options_(options) {
    validate(spec_);
}

namespace {

// log |T^{-1/3} e^{2x^3/3T^2 + wx/T} Ai(.)| with the exponential Airy tail bound for large arguments
double log_envelope(double T, double x, double w) {
    const double c = std::cbrt(T);
    const double s = w / c + x * x / (c * T);
    double lai;
    if (s > 1.0)
        lai = -2.0 / 3.0 * std::pow(s, 1.5) - std::log(2.0 * std::sqrt(M_PI)) - 0.25 * std::log(s);
    else if (s > -1.0)
        lai = std::log(0.54);
    else
        lai = -0.25 * std::log(-s) - 0.5 * std::log(M_PI);
    return lai - std::log(c) + 2.0 * x * x * x / (3.0 * T * T) + w * x / T;
}

}  // namespace

Eigen::MatrixXd FixedPointKernel::chain(int i, std::span<const double> xs, int j, std::span<const double> ys) const {
    const double T = spec_.t, c = std::cbrt(T);
    const auto& a = spec_.wedges;
    const int ell = static_cast<int>(a.size());
    const Eigen::Index nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nx, ny);
    if (nx == 0 || ny == 0) return out;

    const double y_in = spec_.points[i] - a[0];
    std::vector<double> y_out(ell);
    for (int k = 0; k < ell; ++k) y_out[k] = -spec_.points[j] + a[k];
    const double total_gap = a[0] - a[ell - 1];
    double gmin = INFINITY;
    for (int k = 0; k + 1 < ell; ++k) gmin = std::min(gmin, a[k] - a[k + 1]);

    // positive side: scan until the k = 1 integrand envelope has dropped by e^{-tail}
    const double umax_x = *std::max_element(xs.begin(), xs.end()), umin_x = *std::min_element(xs.begin(), xs.end());
    const double umax_y = *std::max_element(ys.begin(), ys.end()), umin_y = *std::min_element(ys.begin(), ys.end());
    auto env = [&](double w) {
        double lx = std::max(log_envelope(T, y_in, w - umax_x), log_envelope(T, y_in, w - umin_x));
        double ly = -INFINITY;
        for (double y : y_out) ly = std::max({ly, log_envelope(T, y, w - umax_y), log_envelope(T, y, w - umin_y)});
        return lx + ly;
    };
    const double step = 0.25 * c;
    double peak = env(0.0), wp = 0.0;
    for (int it = 0; it < 100000; ++it) {
        wp += step;
        const double e = env(wp);
        peak = std::max(peak, e);
        if (e < peak - options_.tail && wp > 4.0 * c) break;
    }
    if (ell > 1) wp = std::max(wp, 12.0 * std::sqrt(2.0 * (a[0] - a[1])) + 4.0 * c);

    // negative side: Gaussian smoothing against at most e^{|w| |y| / T} growth
    double wn = 0.0;
    if (ell > 1) {
        double ymax = std::abs(y_in);
        wn = 2.0 * total_gap * ymax / T + std::sqrt(4.0 * total_gap * options_.tail) + 8.0 * c;
    }
    const double span_u = std::max(umax_x - umin_x, umax_y - umin_y);
    const double smax = (wn + span_u + std::abs(umin_x) + std::abs(umin_y)) / c + 1.0;
    double panel = std::min(0.5 * c, 2.0 * c / (std::sqrt(smax) + 1.0));
    if (ell > 1) panel = std::min(panel, 0.5 * std::sqrt(2.0 * gmin));

    const double none[1] = {0.0};
    const QuadratureRule pos = build_quadrature(Interval{0.0, wp}, std::span<const double>(none, 0), options_.inner_order, panel);
    QuadratureRule neg;
    if (ell > 1) neg = build_quadrature(Interval{-wn, 0.0}, std::span<const double>(none, 0), options_.inner_order, panel);
    const Eigen::Index np = static_cast<Eigen::Index>(pos.size()), nn = static_cast<Eigen::Index>(neg.size());

    // L on [neg | pos] for the current chain length, rows are the u_i
    Eigen::MatrixXd Lneg(nx, nn), Lpos(nx, np);
    for (Eigen::Index r = 0; r < nx; ++r) {
        for (Eigen::Index q = 0; q < nn; ++q) Lneg(r, q) = fixedpoint_s(T, y_in, neg.nodes[q] - xs[r]);
        for (Eigen::Index q = 0; q < np; ++q) Lpos(r, q) = fixedpoint_s(T, y_in, pos.nodes[q] - xs[r]);
    }
    Eigen::VectorXd wpos(np), wneg(nn);
    for (Eigen::Index q = 0; q < np; ++q) wpos[q] = pos.weights[q];
    for (Eigen::Index q = 0; q < nn; ++q) wneg[q] = neg.weights[q];

    for (int k = 0; k < ell; ++k) {
        Eigen::MatrixXd R(np, ny);
        for (Eigen::Index q = 0; q < np; ++q)
            for (Eigen::Index s = 0; s < ny; ++s) R(q, s) = wpos[q] * fixedpoint_s(T, y_out[k], pos.nodes[q] - ys[s]);
        out.noalias() += Lpos * R;
        if (k + 1 == ell) break;
        const double var = 2.0 * (a[k] - a[k + 1]);
        Eigen::MatrixXd Pn(nn, nn), Pp(nn, np);
        for (Eigen::Index q = 0; q < nn; ++q) {
            for (Eigen::Index r = 0; r < nn; ++r) Pn(q, r) = wneg[q] * gaussian(neg.nodes[r] - neg.nodes[q], var);
            for (Eigen::Index r = 0; r < np; ++r) Pp(q, r) = wneg[q] * gaussian(pos.nodes[r] - neg.nodes[q], var);
        }
        Eigen::MatrixXd nextNeg = Lneg * Pn;
        Lpos = Lneg * Pp;
        Lneg = std::move(nextNeg);
    }
    return out;
}

Eigen::MatrixXd FixedPointKernel::block(int i, std::span<const double> xs, int j, std::span<const double> ys) const {
    Eigen::MatrixXd out = chain(i, xs, j, ys);
    const double gap = spec_.points[i] - spec_.points[j];
    if (gap > 0.0)
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index s = 0; s < out.cols(); ++s) out(r, s) -= gaussian(ys[s] - xs[r], 2.0 * gap);
    return out;
}

std::shared_ptr<FixedPointKernel> fixedpoint_kernel_nw(const FixedPointSpec& spec, const FixedPointOptions& options) {
    return std::make_shared<FixedPointKernel>(spec, options);
}

DetResult fixedpoint_probability(const FixedPointSpec& spec, const DetOptions& options,
                                 const FixedPointOptions& kernel_options) {
    validate(spec);
    if (spec.thresholds.size() != spec.points.size())
        throw ArgumentError("fixed point: one threshold per evaluation point");
    FixedPointKernel kernel(spec, kernel_options);
    NystromSystem sys;
    sys.kernel = &kernel;
    double extra = 0.0;
    for (std::size_t j = 0; j < spec.points.size(); ++j) {
        sys.upper.push_back(-spec.thresholds[j]);
        double shift = INFINITY;
        for (double w : spec.wedges) shift = std::min(shift, (spec.points[j] - w) * (spec.points[j] - w) / spec.t);
        extra = std::max(extra, -(spec.thresholds[j] + shift));
    }
    sys.order = options.order;
    sys.pad = options.pad;
    sys.scale = std::cbrt(spec.t);
    sys.extra = extra;
    return fredholm_det_refined(sys, options.target, options.max_refinements);
}

std::vector<StudyRow> convergence_study(const std::vector<double>& wedges, double T, const std::vector<double>& xs,
                                        const std::vector<double>& A, const std::vector<double>& eps_list,
                                        const DetOptions& options, unsigned threads) {
    if (xs.empty() || xs.size() != A.size()) throw ArgumentError("convergence_study: one threshold per point");
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (!(xs[k] < xs[k - 1])) throw ArgumentError("convergence_study: points must strictly decrease");
    {
        FixedPointSpec probe{wedges, T, xs, A};
        validate(probe);
    }
    std::vector<StudyRow> rows(eps_list.size());
    parallel_for(rows.size(), threads, [&](std::size_t r) {
        StudyRow& row = rows[r];
        row.eps = eps_list[r];
        std::vector<double> thresholds;
        std::optional<InitialCondition> ic;
        try {
            for (double x : xs) {
                ScaledVars v = scale_vars(row.eps, T, x);
                row.n.push_back(v.n);
                row.x_eff.push_back(v.x_eff);
                thresholds.push_back(scaled_threshold(v, A[row.n.size() - 1]));
            }
            for (std::size_t k = 1; k < row.n.size(); ++k)
                if (row.n[k] <= row.n[k - 1]) throw ArgumentError("points collapse onto the same particle index");
            std::vector<int> starts = narrow_wedge_starts(wedges, row.eps);
            if (row.n.front() <= starts.front()) throw ArgumentError("particle index not beyond the first wedge block");
            ic = narrow_wedge_approx(wedges, row.eps, row.n.back());
        } catch (const ArgumentError& e) {
            row.feasible = false;
            row.note = std::string("skipped: ") + e.what();
            return;
        }
        KernelSpec spec{std::pow(row.eps, -1.5) * T, row.n, *ic, Representation::hitting, true, {}};
        spec.options.threads = 1;
        DetResult rbm = rbm_probability(spec, thresholds, options);
        DetResult fp = fixedpoint_probability(FixedPointSpec{wedges, T, row.x_eff, A}, options);
        row.feasible = true;
        row.prob_rbm = rbm.value;
        row.prob_fp = fp.value;
        row.abs_err = std::abs(rbm.value - fp.value);
        row.det_err_rbm = rbm.error_estimate;
        row.det_err_fp = fp.error_estimate;
    });
    return rows;
}

}  // namespace rbm
