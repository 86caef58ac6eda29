#include "rbm/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbm/error.hpp"

namespace rbm {

std::vector<QuadratureRule> NystromSystem::rules() const {
    std::vector<QuadratureRule> r;
    const double L = length();
    for (double a : upper) r.push_back(gauss_legendre(order, a - L, a));
    return r;
}

Eigen::MatrixXd NystromSystem::assemble() const {
    if (!kernel) throw ArgumentError("nystrom: no kernel");
    if (static_cast<int>(upper.size()) != kernel->lines()) throw ArgumentError("nystrom: one threshold per line required");
    if (order < 1 || !(length() > 0.0)) throw ArgumentError("nystrom: order and truncation length must be positive");
    const auto rs = rules();
    const int m = static_cast<int>(rs.size());
    std::vector<Eigen::Index> offset(m + 1, 0);
    for (int j = 0; j < m; ++j) offset[j + 1] = offset[j] + static_cast<Eigen::Index>(rs[j].size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(offset[m], offset[m]);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Eigen::MatrixXd K = kernel->block(i, rs[i].nodes, j, rs[j].nodes);
            for (Eigen::Index r = 0; r < K.rows(); ++r)
                for (Eigen::Index c = 0; c < K.cols(); ++c)
                    M(offset[i] + r, offset[j] + c) -= std::sqrt(rs[i].weights[r]) * K(r, c) * std::sqrt(rs[j].weights[c]);
        }
    return M;
}

double nystrom_determinant(const NystromSystem& system) {
    Eigen::MatrixXd M = system.assemble();
    if (!M.allFinite()) throw ConvergenceError("nystrom: non-finite kernel values in the assembled matrix", INFINITY);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const Eigen::MatrixXd& U = lu.matrixLU();
    double logdet = 0.0;
    int sign = lu.permutationP().determinant();
    for (Eigen::Index k = 0; k < U.rows(); ++k) {
        const double d = U(k, k);
        if (d == 0.0) return 0.0;  // exactly singular: the probability is 0 to working precision
        logdet += std::log(std::abs(d));
        if (d < 0) sign = -sign;
    }
    return sign * std::exp(logdet);
}

DetResult fredholm_det(const NystromSystem& system) {
    DetResult r;
    r.value = nystrom_determinant(system);
    r.order_used = system.order;
    r.pad_used = system.length();
    double err = 0.0;
    if (system.order >= 2) {
        NystromSystem half = system;
        half.order = system.order / 2;
        err = std::max(err, std::abs(r.value - nystrom_determinant(half)));
    }
    if (system.pad > 2.0) {
        NystromSystem shorter = system;
        shorter.pad = system.pad - 2.0;
        err = std::max(err, std::abs(r.value - nystrom_determinant(shorter)));
    }
    r.error_estimate = err;
    return r;
}

DetResult fredholm_det_refined(NystromSystem system, double target, int max_refinements) {
    DetResult r = fredholm_det(system);
    for (int k = 0; k < max_refinements && r.error_estimate > target; ++k) {
        system.order *= 2;
        system.pad += 2.0;
        r = fredholm_det(system);
    }
    if (r.error_estimate > target) {
        std::ostringstream msg;
        msg << "fredholm: error estimate " << r.error_estimate << " above target " << target << " at order "
            << r.order_used << ", truncation length " << r.pad_used << " (value " << r.value << ")";
        throw ConvergenceError(msg.str(), r.error_estimate);
    }
    return r;
}

DetResult rbm_probability(const KernelSpec& spec, const std::vector<double>& a, const DetOptions& options) {
    validate(spec);
    if (a.size() != spec.indices.size()) throw ArgumentError("rbm_probability: need one threshold per index");
    ExtendedKernel kernel(spec);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 1; i <= spec.indices.back(); ++i) {
        const double X = spec.ic.level(i);
        if (std::isfinite(X)) {
            lo = std::min(lo, X);
            hi = std::max(hi, X);
        }
    }
    NystromSystem sys;
    sys.kernel = &kernel;
    sys.upper = a;
    sys.order = options.order;
    sys.pad = options.pad;
    sys.scale = std::sqrt(spec.t);
    sys.extra = std::isfinite(lo) ? hi - lo : 0.0;
    return fredholm_det_refined(sys, options.target, options.max_refinements);
}

}  // namespace rbm
