#include "levelset/models.hpp"

#include "levelset/errors.hpp"

#include <cmath>
#include <numbers>

namespace levelset {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct MixtureComponent {
    double mx, my, var, weight;
};

// 0.5·N((-2,2)ᵀ, 1.5·I₂) + 0.5·N((1,-1)ᵀ, 0.5·I₂)
constexpr MixtureComponent mix_components[2] = {
    {-2.0, 2.0, 1.5, 0.5},
    {1.0, -1.0, 0.5, 0.5},
};

} // namespace

TrueModel TrueModel::elliptic(double a) {
    if (!(a > 0.0)) throw usage_error("elliptic model: a must be positive");
    TrueModel m;
    m.elliptic_ = true;
    m.a_ = a;
    return m;
}

TrueModel TrueModel::mixture() {
    TrueModel m;
    m.elliptic_ = false;
    return m;
}

double TrueModel::pdf(const Vec2& x) const {
    if (elliptic_) {
        const double q = a_ * a_ * x[0] * x[0] + x[1] * x[1] / (a_ * a_);
        return std::exp(-0.5 * q) / two_pi;
    }
    double sum = 0.0;
    for (const auto& cpt : mix_components) {
        const double dx = x[0] - cpt.mx;
        const double dy = x[1] - cpt.my;
        sum += cpt.weight * std::exp(-(dx * dx + dy * dy) / (2.0 * cpt.var)) /
               (two_pi * cpt.var);
    }
    return sum;
}

Vec2 TrueModel::grad_pdf(const Vec2& x) const {
    if (elliptic_) {
        const double f = pdf(x);
        return {-a_ * a_ * x[0] * f, -x[1] / (a_ * a_) * f};
    }
    Vec2 g{0.0, 0.0};
    for (const auto& cpt : mix_components) {
        const double dx = x[0] - cpt.mx;
        const double dy = x[1] - cpt.my;
        const double val = cpt.weight *
                           std::exp(-(dx * dx + dy * dy) / (2.0 * cpt.var)) /
                           (two_pi * cpt.var);
        g[0] -= val * dx / cpt.var;
        g[1] -= val * dy / cpt.var;
    }
    return g;
}

Dataset TrueModel::sample(std::size_t n, Rng& rng,
                          std::vector<int>* component_labels) const {
    if (n < 1) throw usage_error("sample: n must be >= 1");
    std::vector<double> coords;
    coords.reserve(2 * n);
    if (component_labels) {
        component_labels->clear();
        component_labels->reserve(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto [z1, z2] = rng.normal_pair();
        int label = 0;
        if (elliptic_) {
            coords.push_back(z1 / a_);
            coords.push_back(z2 * a_);
        } else {
            label = rng.uniform01() < mix_components[0].weight ? 0 : 1;
            const auto& cpt = mix_components[label];
            const double sd = std::sqrt(cpt.var);
            coords.push_back(cpt.mx + sd * z1);
            coords.push_back(cpt.my + sd * z2);
        }
        if (component_labels) component_labels->push_back(label);
    }
    return make_dataset(2, std::move(coords));
}

double TrueModel::level_of_probability(double p) const {
    if (!elliptic_)
        throw usage_error(
            "level_of_probability is defined for the elliptic model only");
    if (!(p > 0.0) || !(p < 1.0))
        throw usage_error("level_of_probability: p must be in (0,1)");
    return (1.0 - p) / two_pi;
}

double TrueModel::max_pdf() const {
    if (elliptic_) return 1.0 / two_pi;
    double best = 0.0;
    for (const auto& cpt : mix_components)
        best = std::max(best, pdf({cpt.mx, cpt.my}));
    return best;
}

GridSpec TrueModel::domain_box(int cells) const {
    GridSpec g;
    g.cells = {cells, cells};
    if (elliptic_) {
        const double rx = 6.0 / a_ + 1.0;
        const double ry = 6.0 * a_ + 1.0;
        g.lower = {-rx, -ry};
        g.upper = {rx, ry};
    } else {
        g.lower = {-8.5, -5.5};
        g.upper = {5.5, 8.5};
    }
    return g;
}

Contour TrueModel::true_contour(double c, std::size_t n_points) const {
    if (!(c > 0.0) || c >= max_pdf())
        throw numeric_error("true_contour: level must be in (0, max pdf)");
    Contour ct;
    ct.dim = 2;
    ct.level = c;
    if (elliptic_) {
        const double r0 = std::sqrt(-2.0 * std::log(two_pi * c));
        Polyline line;
        line.closed = true;
        line.vertices.reserve(n_points);
        for (std::size_t i = 0; i < n_points; ++i) {
            const double th = two_pi * static_cast<double>(i) /
                              static_cast<double>(n_points);
            line.vertices.push_back(
                {r0 * std::cos(th) / a_, a_ * r0 * std::sin(th)});
        }
        ct.components.push_back(std::move(line));
        ct.total_length = ct.components[0].length();
        return ct;
    }
    const Field2 field = [this](const Vec2& p) { return pdf(p); };
    ct = extract_contour(field, domain_box(1024), c);
    if (n_points > 0 && !ct.empty()) {
        const double spacing =
            ct.total_length / static_cast<double>(n_points);
        ct = resample(ct, spacing, &field);
    }
    return ct;
}

CasePreset case_preset(const std::string& name) {
    if (name == "case1") {
        auto m = TrueModel::elliptic(1.0);
        return {name, m, m.level_of_probability(0.5)};
    }
    if (name == "case2") {
        auto m = TrueModel::elliptic(2.0);
        return {name, m, m.level_of_probability(0.5)};
    }
    if (name == "case3") {
        auto m = TrueModel::elliptic(1.0);
        return {name, m, m.level_of_probability(0.95)};
    }
    if (name == "case4") {
        return {name, TrueModel::mixture(), 0.048};
    }
    throw usage_error("unknown case preset: " + name);
}

} // namespace levelset
