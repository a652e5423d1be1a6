#include "levelset/evt.hpp"

#include "levelset/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

namespace levelset {

double z_of_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw usage_error("z_of_alpha: alpha must be in (0,1)");
    return -std::log(-0.5 * std::log1p(-alpha));
}

double gumbel_sup_quantile(int r, double log_h_inv, double z,
                           double tangent_integral) {
    if (r < 1) throw usage_error("gumbel_sup_quantile: r must be >= 1");
    if (!(log_h_inv > 0.0))
        throw numeric_error(
            "gumbel_sup_quantile: requires h < 1 (log h^-1 > 0)");
    if (!(tangent_integral > 0.0))
        throw numeric_error("gumbel_sup_quantile: tangent integral must be positive");
    const double rd = static_cast<double>(r);
    const double lead = std::sqrt(2.0 * rd * log_h_inv);
    const double inner =
        z + (rd / 2.0 - 0.5) * std::log(log_h_inv) +
        std::log(std::pow(2.0 * rd, (rd - 1.0) / 2.0) /
                 (std::sqrt(2.0) * std::pow(std::numbers::pi, (rd + 1.0) / 2.0)) *
                 tangent_integral);
    return lead + inner / lead;
}

double b_hat(const EvtInputs& in) {
    if (in.d < 2) throw usage_error("b_hat: defined for d >= 2");
    if (!(in.h_eff > 0.0) || in.h_eff >= 1.0)
        throw numeric_error("b_hat: requires 0 < h < 1");
    if (!(in.surface_measure > 0.0))
        throw numeric_error("b_hat: surface measure must be positive");
    const double s_k = std::sqrt(in.kconst.s_k_sq);
    const double tangent =
        std::pow(s_k, in.d - 1) * in.surface_measure;
    return gumbel_sup_quantile(in.d - 1, std::log(1.0 / in.h_eff),
                               z_of_alpha(in.alpha), tangent);
}

double a_hat(const EvtInputs& in) {
    if (!(in.alpha > 0.0) || !(in.alpha < 1.0))
        throw usage_error("a_hat: alpha must be in (0,1)");
    if (in.n < 2) throw usage_error("a_hat: needs n >= 2");
    if (!(in.c > 0.0)) throw usage_error("a_hat: level must be positive");
    const double nhd =
        static_cast<double>(in.n) * std::pow(in.h_eff, in.d);
    const double scale = std::sqrt(in.kconst.l2_norm_sq * in.c) / std::sqrt(nhd);
    if (in.d >= 2) return b_hat(in) * scale;
    if (in.n_hat < 1)
        throw numeric_error("a_hat: d=1 needs at least one contour point");
    const boost::math::normal_distribution<double> norm;
    const double p =
        std::pow(1.0 - in.alpha, 1.0 / static_cast<double>(in.n_hat));
    return boost::math::quantile(norm, p) * scale;
}

LargeSampleRegion build_cn1(std::shared_ptr<const DensityEstimator> bc,
                            const GridSpec& grid, double c, double alpha,
                            unsigned threads) {
    if (!bc) throw usage_error("build_cn1: null estimator");
    if (bc->kind() != EstimatorKind::bias_corrected)
        throw usage_error("build_cn1: needs the bias-corrected estimator");
    if (bc->dim() != 2) throw usage_error("build_cn1: d=2 estimators only");

    const auto values = bc->eval_on_grid(grid, threads);
    const Field2 field = [&bc](const Vec2& p) { return bc->eval(p); };
    Contour contour = extract_contour_from_values(values, grid, c, &field);
    if (contour.empty())
        throw numeric_error("build_cn1: the estimator does not cross the level");

    EvtInputs in;
    in.d = 2;
    in.n = bc->sample_size();
    const auto& h = bc->bandwidth();
    in.h_eff = std::sqrt(h[0] * h[1]);
    in.alpha = alpha;
    in.c = c;
    in.kconst = bc->kernel().constants();
    in.surface_measure = contour.total_length;

    LargeSampleRegion out;
    out.b = b_hat(in);
    out.a = a_hat(in);
    out.band = make_vertical(bc, c - out.a, c + out.a);
    out.pair.outer = make_vertical(bc, c - out.a,
                                   std::numeric_limits<double>::infinity());
    out.pair.inner = make_vertical(bc, c + out.a,
                                   std::numeric_limits<double>::infinity());
    out.pair.target = PairTarget::true_set;
    out.contour = std::move(contour);
    return out;
}

} // namespace levelset
