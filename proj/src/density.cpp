#include "levelset/density.hpp"

#include "levelset/errors.hpp"
#include "levelset/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levelset {

namespace {

void check_bandwidth(const std::vector<double>& bw, int dim, const char* name) {
    if (static_cast<int>(bw.size()) != dim)
        throw usage_error(std::string(name) + ": bandwidth size must equal dim");
    for (double v : bw)
        if (!(v > 0.0) || !std::isfinite(v))
            throw usage_error(std::string(name) +
                              ": bandwidth entries must be positive and finite");
}

} // namespace

DensityEstimator DensityEstimator::fit_plain(
    std::shared_ptr<const Dataset> data, const KernelSpec& kernel,
    std::vector<double> h) {
    if (!data) throw usage_error("fit: null dataset");
    if (data->n < 2) throw usage_error("fit: need at least 2 observations");
    if (data->dim != kernel.dim())
        throw usage_error("fit: kernel/dataset dimension mismatch");
    check_bandwidth(h, data->dim, "fit");

    DensityEstimator e;
    e.data_ = std::move(data);
    e.kernel_ = kernel;
    e.kind_ = EstimatorKind::plain;
    e.h_ = std::move(h);
    e.support_ = e.h_;
    e.mu2_ = kernel.constants().mu2;

    const int d = e.data_->dim;
    e.order_.resize(static_cast<std::size_t>(d));
    e.sorted_coord_.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        auto& ord = e.order_[static_cast<std::size_t>(j)];
        ord.resize(e.data_->n);
        std::iota(ord.begin(), ord.end(), 0u);
        std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double ca = e.data_->coord(a, j);
            const double cb = e.data_->coord(b, j);
            return ca < cb || (ca == cb && a < b);
        });
        auto& sc = e.sorted_coord_[static_cast<std::size_t>(j)];
        sc.resize(e.data_->n);
        for (std::size_t i = 0; i < e.data_->n; ++i)
            sc[i] = e.data_->coord(ord[i], j);
    }
    return e;
}

DensityEstimator DensityEstimator::fit_bias_corrected(
    std::shared_ptr<const Dataset> data, const KernelSpec& kernel,
    std::vector<double> h, std::vector<double> l) {
    auto e = fit_plain(data, kernel, std::move(h));
    check_bandwidth(l, e.data_->dim, "fit_bias_corrected");
    e.kind_ = EstimatorKind::bias_corrected;
    e.l_ = l;
    e.inner_ = std::make_unique<DensityEstimator>(
        fit_plain(e.data_, kernel, std::move(l)));
    return e;
}

DensityEstimator DensityEstimator::fit_bootstrap_mean(
    std::shared_ptr<const Dataset> data, const KernelSpec& kernel,
    std::vector<double> h, std::vector<double> g) {
    auto e = fit_plain(data, kernel, std::move(h));
    check_bandwidth(g, e.data_->dim, "fit_bootstrap_mean");
    e.kind_ = EstimatorKind::bootstrap_mean;
    e.g_ = std::move(g);
    for (int j = 0; j < e.data_->dim; ++j) {
        e.conv_.push_back(convolved_profile(
            kernel, e.h_[static_cast<std::size_t>(j)],
            e.g_[static_cast<std::size_t>(j)]));
        e.support_[static_cast<std::size_t>(j)] =
            e.h_[static_cast<std::size_t>(j)] +
            e.g_[static_cast<std::size_t>(j)];
    }
    return e;
}

double DensityEstimator::partial(std::span<const double> x,
                                 std::span<const int> orders,
                                 bool brute) const {
    const int d = data_->dim;
    if (static_cast<int>(x.size()) != d)
        throw usage_error("density eval: dimension mismatch");

    double norm = 1.0 / static_cast<double>(data_->n);
    for (int j = 0; j < d; ++j) {
        norm /= h_[static_cast<std::size_t>(j)];
        for (int o = 0; o < orders[static_cast<std::size_t>(j)]; ++o)
            norm /= -h_[static_cast<std::size_t>(j)];
    }

    double sum = 0.0;
    auto accumulate = [&](std::size_t i) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) {
            const double u = (data_->coord(i, j) - x[static_cast<std::size_t>(j)]) /
                             h_[static_cast<std::size_t>(j)];
            if (std::abs(u) > 1.0) return;
            prod *= kernel_.profile_deriv(u, orders[static_cast<std::size_t>(j)]);
        }
        sum += prod;
    };

    if (brute) {
        for (std::size_t i = 0; i < data_->n; ++i) accumulate(i);
    } else {
        const auto& sc = sorted_coord_[0];
        const auto& ord = order_[0];
        const double lo = x[0] - h_[0];
        const double hi = x[0] + h_[0];
        const auto first = std::lower_bound(sc.begin(), sc.end(), lo);
        const auto last = std::upper_bound(sc.begin(), sc.end(), hi);
        for (auto it = first; it != last; ++it)
            accumulate(ord[static_cast<std::size_t>(it - sc.begin())]);
    }
    return sum * norm;
}

double DensityEstimator::mean_eval(std::span<const double> x) const {
    const int d = data_->dim;
    if (static_cast<int>(x.size()) != d)
        throw usage_error("density eval: dimension mismatch");
    const auto& sc = sorted_coord_[0];
    const auto& ord = order_[0];
    const double lo = x[0] - support_[0];
    const double hi = x[0] + support_[0];
    const auto first = std::lower_bound(sc.begin(), sc.end(), lo);
    const auto last = std::upper_bound(sc.begin(), sc.end(), hi);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
        const std::size_t i = ord[static_cast<std::size_t>(it - sc.begin())];
        double prod = 1.0;
        for (int j = 0; j < d && prod != 0.0; ++j)
            prod *= conv_[static_cast<std::size_t>(j)](
                x[static_cast<std::size_t>(j)] - data_->coord(i, j));
        sum += prod;
    }
    return sum / static_cast<double>(data_->n);
}

double DensityEstimator::eval(std::span<const double> x) const {
    thread_local std::vector<int> orders;
    switch (kind_) {
        case EstimatorKind::plain: {
            orders.assign(static_cast<std::size_t>(data_->dim), 0);
            return partial(x, orders, false);
        }
        case EstimatorKind::bias_corrected: {
            orders.assign(static_cast<std::size_t>(data_->dim), 0);
            const double plain = partial(x, orders, false);
            double lap = 0.0;
            for (int j = 0; j < data_->dim; ++j) {
                orders.assign(static_cast<std::size_t>(data_->dim), 0);
                orders[static_cast<std::size_t>(j)] = 2;
                lap += h_[static_cast<std::size_t>(j)] *
                       h_[static_cast<std::size_t>(j)] *
                       inner_->partial(x, orders, false);
            }
            return plain - 0.5 * mu2_ * lap;
        }
        case EstimatorKind::bootstrap_mean:
            return mean_eval(x);
    }
    return 0.0;
}

double DensityEstimator::eval_brute(std::span<const double> x) const {
    thread_local std::vector<int> orders;
    switch (kind_) {
        case EstimatorKind::plain: {
            orders.assign(static_cast<std::size_t>(data_->dim), 0);
            return partial(x, orders, true);
        }
        case EstimatorKind::bias_corrected: {
            orders.assign(static_cast<std::size_t>(data_->dim), 0);
            const double plain = partial(x, orders, true);
            double lap = 0.0;
            for (int j = 0; j < data_->dim; ++j) {
                orders.assign(static_cast<std::size_t>(data_->dim), 0);
                orders[static_cast<std::size_t>(j)] = 2;
                lap += h_[static_cast<std::size_t>(j)] *
                       h_[static_cast<std::size_t>(j)] *
                       inner_->partial(x, orders, true);
            }
            return plain - 0.5 * mu2_ * lap;
        }
        case EstimatorKind::bootstrap_mean: {
            double sum = 0.0;
            for (std::size_t i = 0; i < data_->n; ++i) {
                double prod = 1.0;
                for (int j = 0; j < data_->dim; ++j)
                    prod *= conv_[static_cast<std::size_t>(j)](
                        x[static_cast<std::size_t>(j)] - data_->coord(i, j));
                sum += prod;
            }
            return sum / static_cast<double>(data_->n);
        }
    }
    return 0.0;
}

void DensityEstimator::eval_grad(std::span<const double> x,
                                 std::span<double> out) const {
    const int d = data_->dim;
    if (static_cast<int>(out.size()) != d)
        throw usage_error("eval_grad: output dimension mismatch");
    if (kind_ == EstimatorKind::bootstrap_mean)
        throw numeric_error("eval_grad is not provided for bootstrap_mean estimators");
    double value = 0.0;
    value_and_grad(x, value, out);
}

void DensityEstimator::value_and_grad(std::span<const double> x, double& value,
                                      std::span<double> grad) const {
    const int d = data_->dim;
    if (static_cast<int>(x.size()) != d || static_cast<int>(grad.size()) != d)
        throw usage_error("value_and_grad: dimension mismatch");
    if (kind_ == EstimatorKind::bootstrap_mean)
        throw numeric_error("value_and_grad is not provided for bootstrap_mean estimators");

    double k0[4];  // profile values per axis, order 0/1 reused below
    double k1[4];
    if (d > 4) {   // generic fallback for high dimension
        value = eval(x);
        thread_local std::vector<int> orders;
        for (int j = 0; j < d; ++j) {
            orders.assign(static_cast<std::size_t>(d), 0);
            orders[static_cast<std::size_t>(j)] = 1;
            double gj = partial(x, orders, false);
            if (kind_ == EstimatorKind::bias_corrected) {
                for (int m = 0; m < d; ++m) {
                    orders.assign(static_cast<std::size_t>(d), 0);
                    orders[static_cast<std::size_t>(j)] += 1;
                    orders[static_cast<std::size_t>(m)] += 2;
                    gj -= 0.5 * mu2_ * h_[static_cast<std::size_t>(m)] *
                          h_[static_cast<std::size_t>(m)] *
                          inner_->partial(x, orders, false);
                }
            }
            grad[static_cast<std::size_t>(j)] = gj;
        }
        return;
    }

    const auto& sc = sorted_coord_[0];
    const auto& ord = order_[0];
    double norm = 1.0 / static_cast<double>(data_->n);
    for (int j = 0; j < d; ++j) norm /= h_[static_cast<std::size_t>(j)];

    double vsum = 0.0;
    double gsum[4] = {0.0, 0.0, 0.0, 0.0};
    {
        const auto first =
            std::lower_bound(sc.begin(), sc.end(), x[0] - h_[0]);
        const auto last = std::upper_bound(sc.begin(), sc.end(), x[0] + h_[0]);
        for (auto it = first; it != last; ++it) {
            const std::size_t i = ord[static_cast<std::size_t>(it - sc.begin())];
            bool inside = true;
            for (int j = 0; j < d; ++j) {
                const double u =
                    (data_->coord(i, j) - x[static_cast<std::size_t>(j)]) /
                    h_[static_cast<std::size_t>(j)];
                if (std::abs(u) > 1.0) {
                    inside = false;
                    break;
                }
                k0[j] = kernel_.profile_deriv(u, 0);
                k1[j] = kernel_.profile_deriv(u, 1);
            }
            if (!inside) continue;
            double prod = 1.0;
            for (int j = 0; j < d; ++j) prod *= k0[j];
            vsum += prod;
            for (int j = 0; j < d; ++j) {
                double gp = 1.0;
                for (int m = 0; m < d; ++m) gp *= (m == j) ? k1[m] : k0[m];
                gsum[j] += gp * (-1.0 / h_[static_cast<std::size_t>(j)]);
            }
        }
    }
    value = vsum * norm;
    for (int j = 0; j < d; ++j) grad[static_cast<std::size_t>(j)] = gsum[j] * norm;

    if (kind_ != EstimatorKind::bias_corrected) return;

    // Bias part: B(x) = ½ μ₂ Σ_j h_j² ∂²_j f̂_l, and its gradient, fused in
    // one scan over the l-neighborhood. Axis factors up to third order.
    const auto& lsc = inner_->sorted_coord_[0];
    const auto& lord = inner_->order_[0];
    const auto& l = inner_->h_;
    double lnorm = 1.0 / static_cast<double>(data_->n);
    for (int j = 0; j < d; ++j) lnorm /= l[static_cast<std::size_t>(j)];

    double kk[4][4]; // kk[axis][order]
    double bval = 0.0;
    double bgrad[4] = {0.0, 0.0, 0.0, 0.0};
    const auto first =
        std::lower_bound(lsc.begin(), lsc.end(), x[0] - l[0]);
    const auto last = std::upper_bound(lsc.begin(), lsc.end(), x[0] + l[0]);
    for (auto it = first; it != last; ++it) {
        const std::size_t i = lord[static_cast<std::size_t>(it - lsc.begin())];
        bool inside = true;
        for (int j = 0; j < d; ++j) {
            const double u =
                (data_->coord(i, j) - x[static_cast<std::size_t>(j)]) /
                l[static_cast<std::size_t>(j)];
            if (std::abs(u) > 1.0) {
                inside = false;
                break;
            }
            for (int o = 0; o <= 3; ++o)
                kk[j][o] = kernel_.profile_deriv(u, o);
        }
        if (!inside) continue;
        for (int j = 0; j < d; ++j) {
            const double hj2 = h_[static_cast<std::size_t>(j)] *
                               h_[static_cast<std::size_t>(j)];
            const double lj = l[static_cast<std::size_t>(j)];
            // ∂²_j factor: k''(u_j)/l_j², sign (+)
            double prod = hj2 / (lj * lj);
            for (int m = 0; m < d; ++m) prod *= (m == j) ? kk[m][2] : kk[m][0];
            bval += prod;
            for (int m = 0; m < d; ++m) {
                const double lm = l[static_cast<std::size_t>(m)];
                double gp = hj2 / (lj * lj) * (-1.0 / lm);
                for (int q = 0; q < d; ++q) {
                    const int o = (q == j ? 2 : 0) + (q == m ? 1 : 0);
                    gp *= kk[q][o];
                }
                bgrad[m] += gp;
            }
        }
    }
    value -= 0.5 * mu2_ * bval * lnorm;
    for (int j = 0; j < d; ++j)
        grad[static_cast<std::size_t>(j)] -= 0.5 * mu2_ * bgrad[j] * lnorm;
}

void DensityEstimator::eval_hessian(std::span<const double> x,
                                    std::span<double> out) const {
    const auto d = static_cast<std::size_t>(data_->dim);
    if (out.size() != d * d)
        throw usage_error("eval_hessian: output size mismatch");
    if (kind_ == EstimatorKind::bootstrap_mean)
        throw numeric_error("eval_hessian is not provided for bootstrap_mean estimators");
    thread_local std::vector<int> orders;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            orders.assign(d, 0);
            orders[a] += 1;
            orders[b] += 1;
            double v = partial(x, orders, false);
            if (kind_ == EstimatorKind::bias_corrected) {
                double lap = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    orders.assign(d, 0);
                    orders[a] += 1;
                    orders[b] += 1;
                    orders[j] += 2;
                    lap += h_[j] * h_[j] * inner_->partial(x, orders, false);
                }
                v -= 0.5 * mu2_ * lap;
            }
            out[a * d + b] = v;
            out[b * d + a] = v;
        }
    }
}

std::vector<double> DensityEstimator::eval_on_grid(const GridSpec& grid,
                                                   unsigned threads) const {
    grid.validate();
    if (grid.dim != data_->dim)
        throw usage_error("eval_on_grid: grid/estimator dimension mismatch");

    const int nx = grid.nodes(0);
    const int ny = grid.dim == 2 ? grid.nodes(1) : 1;
    std::vector<double> values(static_cast<std::size_t>(nx) *
                                   static_cast<std::size_t>(ny),
                               0.0);
    const double x0 = grid.lower[0];
    const double dx = grid.step(0);

    // Row scatter: for a fixed node ordinate, every in-range data point adds
    // its per-axis factored contribution to the nodes its kernel box covers.
    // Rows are independent and points are visited in axis-sorted order, so
    // the result is identical for any thread count.
    auto row_range = [&](double coord, int axis,
                         const DensityEstimator& est) {
        const auto& sc = est.sorted_coord_[static_cast<std::size_t>(axis)];
        const double sup = est.support_[static_cast<std::size_t>(axis)];
        const auto first =
            std::lower_bound(sc.begin(), sc.end(), coord - sup);
        const auto last = std::upper_bound(sc.begin(), sc.end(), coord + sup);
        return std::pair<std::size_t, std::size_t>(
            static_cast<std::size_t>(first - sc.begin()),
            static_cast<std::size_t>(last - sc.begin()));
    };

    auto scatter_row = [&](int jrow) {
        double* row = values.data() +
                      static_cast<std::size_t>(jrow) * static_cast<std::size_t>(nx);
        const double y = grid.dim == 2 ? grid.node(1, jrow) : 0.0;

        auto splat = [&](const DensityEstimator& est, int xorder, int yorder,
                         double weight, auto&& axis_fn) {
            const double supx = est.support_[0];
            const std::size_t d1 = grid.dim == 2 ? 1 : 0;
            auto [ib, ie] = grid.dim == 2
                                ? row_range(y, 1, est)
                                : std::pair<std::size_t, std::size_t>(0, est.data_->n);
            const auto& ord = est.order_[d1];
            for (std::size_t s = ib; s != ie; ++s) {
                const std::size_t i = grid.dim == 2 ? ord[s] : s;
                double yfac = 1.0;
                if (grid.dim == 2) {
                    yfac = axis_fn(est, 1, (est.data_->coord(i, 1) - y), yorder);
                    if (yfac == 0.0) continue;
                }
                const double xi = est.data_->coord(i, 0);
                int i_lo = static_cast<int>(std::ceil((xi - supx - x0) / dx));
                int i_hi = static_cast<int>(std::floor((xi + supx - x0) / dx));
                if (i_lo < 0) i_lo = 0;
                if (i_hi > nx - 1) i_hi = nx - 1;
                for (int ixn = i_lo; ixn <= i_hi; ++ixn) {
                    const double xfac =
                        axis_fn(est, 0, xi - (x0 + dx * ixn), xorder);
                    if (xfac != 0.0)
                        row[ixn] += weight * xfac * yfac;
                }
            }
        };

        auto kde_axis = [](const DensityEstimator& est, int axis, double delta,
                           int order) {
            const double hj = est.h_[static_cast<std::size_t>(axis)];
            return est.kernel_.profile_deriv(delta / hj, order);
        };
        auto conv_axis = [](const DensityEstimator& est, int axis, double delta,
                            int /*order*/) {
            return est.conv_[static_cast<std::size_t>(axis)](delta);
        };

        switch (kind_) {
            case EstimatorKind::plain: {
                double norm = 1.0 / static_cast<double>(data_->n);
                for (int j = 0; j < data_->dim; ++j)
                    norm /= h_[static_cast<std::size_t>(j)];
                splat(*this, 0, 0, norm, kde_axis);
                break;
            }
            case EstimatorKind::bias_corrected: {
                double norm = 1.0 / static_cast<double>(data_->n);
                for (int j = 0; j < data_->dim; ++j)
                    norm /= h_[static_cast<std::size_t>(j)];
                splat(*this, 0, 0, norm, kde_axis);
                double lnorm = 1.0 / static_cast<double>(data_->n);
                for (int j = 0; j < data_->dim; ++j)
                    lnorm /= l_[static_cast<std::size_t>(j)];
                // - ½ μ₂ Σ_j h_j² ∂²_j f̂_l: one splat per axis term
                for (int j = 0; j < data_->dim; ++j) {
                    const double hj2 = h_[static_cast<std::size_t>(j)] *
                                       h_[static_cast<std::size_t>(j)];
                    const double lj = l_[static_cast<std::size_t>(j)];
                    const double w = -0.5 * mu2_ * hj2 / (lj * lj) * lnorm;
                    splat(*inner_, j == 0 ? 2 : 0, j == 1 ? 2 : 0, w, kde_axis);
                }
                break;
            }
            case EstimatorKind::bootstrap_mean: {
                splat(*this, 0, 0, 1.0 / static_cast<double>(data_->n),
                      conv_axis);
                break;
            }
        }
    };

    parallel_for(static_cast<std::size_t>(ny), threads,
                 [&](std::size_t j) { scatter_row(static_cast<int>(j)); });
    return values;
}

double bias_term(const Dataset& data, const KernelSpec& kernel,
                 std::span<const double> h, std::span<const double> l,
                 std::span<const double> x) {
    auto shared = std::make_shared<Dataset>(data);
    auto fl = DensityEstimator::fit_plain(
        shared, kernel, std::vector<double>(l.begin(), l.end()));
    std::vector<int> orders(static_cast<std::size_t>(data.dim), 0);
    double lap = 0.0;
    for (int j = 0; j < data.dim; ++j) {
        std::fill(orders.begin(), orders.end(), 0);
        orders[static_cast<std::size_t>(j)] = 2;
        if (!(h[static_cast<std::size_t>(j)] > 0.0))
            throw usage_error("bias_term: h must be positive");
        lap += h[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(j)] *
               fl.partial(x, orders, false);
    }
    return 0.5 * kernel.constants().mu2 * lap;
}

double bootstrap_mean_eval(const Dataset& data, const KernelSpec& kernel,
                           std::span<const double> h, std::span<const double> g,
                           std::span<const double> x) {
    auto shared = std::make_shared<Dataset>(data);
    auto est = DensityEstimator::fit_bootstrap_mean(
        shared, kernel, std::vector<double>(h.begin(), h.end()),
        std::vector<double>(g.begin(), g.end()));
    return est.eval(x);
}

Dataset sample_smoothed(const Dataset& data, const ProfileSampler& sampler,
                        std::span<const double> g, std::size_t count,
                        Rng& rng) {
    if (count == 0) throw usage_error("sample_smoothed: count must be >= 1");
    if (static_cast<int>(g.size()) != data.dim)
        throw usage_error("sample_smoothed: bandwidth size mismatch");
    std::vector<double> coords;
    coords.reserve(count * static_cast<std::size_t>(data.dim));
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t i = rng.uniform_index(data.n);
        for (int j = 0; j < data.dim; ++j)
            coords.push_back(data.coord(i, j) +
                             g[static_cast<std::size_t>(j)] *
                                 sampler.sample(rng.uniform01()));
    }
    return make_dataset(data.dim, std::move(coords));
}

Dataset sample_smoothed(const Dataset& data, const KernelSpec& kernel,
                        std::span<const double> g, std::size_t count,
                        Rng& rng) {
    ProfileSampler sampler(kernel);
    return sample_smoothed(data, sampler, g, count, rng);
}

} // namespace levelset
