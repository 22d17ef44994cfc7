#include "kfplab/coefficient_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kfplab {

bool CoefficientField::ellipticity_ok(const PhasePoint& z, double tol) const {
    const auto [lo, hi] = symmetric_eig_range(A(z));
    if (lo < lambda - tol || hi > Lambda + tol) return false;
    const Vector b = B(z);
    double nb = 0.0, nv = 0.0;
    for (double c : b) nb += c * c;
    for (double c : z.v) nv += c * c;
    return std::sqrt(nb) <= Lambda * (1.0 + nv) + tol;
}

namespace {

CoefficientField from_scalars(std::function<double(double, double, double)> a,
                              std::function<double(double, double, double)> b,
                              double lambda, double Lambda, std::string name) {
    CoefficientField cf;
    cf.A1 = a;
    cf.B1 = b;
    cf.S1 = [](double, double, double) { return 0.0; };
    cf.lambda = lambda;
    cf.Lambda = Lambda;
    cf.name = std::move(name);
    // isotropic matrix view: A(z) = a(z) I, B(z) = (0,...,0,b(z))
    cf.A = [a](const PhasePoint& z) {
        const std::size_t d = z.dim();
        const double val = a(z.t, z.x.back(), z.v.back());
        Matrix M(d, Vector(d, 0.0));
        for (std::size_t i = 0; i < d; ++i) M[i][i] = val;
        return M;
    };
    cf.B = [b](const PhasePoint& z) {
        Vector out(z.dim(), 0.0);
        out.back() = b(z.t, z.x.back(), z.v.back());
        return out;
    };
    cf.S = [](const PhasePoint&) { return 0.0; };
    cf.tx_independent = true;
    return cf;
}

struct VTable {
    std::vector<double> v, a, b;
    double eval(const std::vector<double>& col, double vq) const {
        if (vq <= v.front()) return col.front();
        if (vq >= v.back()) return col.back();
        const auto it = std::upper_bound(v.begin(), v.end(), vq);
        const std::size_t i = static_cast<std::size_t>(it - v.begin()) - 1;
        const double w = (vq - v[i]) / (v[i + 1] - v[i]);
        return col[i] * (1.0 - w) + col[i + 1] * w;
    }
};

}  // namespace

CoefficientField make_coefficients(const std::string& name, const std::string& table_path) {
    if (name == "constant") {
        return from_scalars([](double, double, double) { return 1.0; },
                            [](double, double, double) { return 0.0; }, 1.0, 1.0, name);
    }
    if (name == "velocity-affine") {
        return from_scalars([](double, double, double) { return 1.0; },
                            [](double, double, double v) { return 0.2 - 0.5 * v; }, 1.0, 1.0,
                            name);
    }
    if (name == "user-table") {
        std::ifstream in(table_path);
        if (!in) throw std::invalid_argument("make_coefficients: cannot open table " + table_path);
        auto tab = std::make_shared<VTable>();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            double v, a, b;
            if (ls >> v >> a >> b) {
                tab->v.push_back(v);
                tab->a.push_back(a);
                tab->b.push_back(b);
            }
        }
        if (tab->v.size() < 2) throw std::invalid_argument("make_coefficients: table too short");
        for (std::size_t i = 0; i + 1 < tab->v.size(); ++i)
            if (tab->v[i] >= tab->v[i + 1])
                throw std::invalid_argument("make_coefficients: table v not increasing");
        const double lam = *std::min_element(tab->a.begin(), tab->a.end());
        const double Lam = *std::max_element(tab->a.begin(), tab->a.end());
        if (!(lam > 0.0)) throw std::invalid_argument("make_coefficients: A must be positive");
        auto cf = from_scalars(
            [tab](double, double, double v) { return tab->eval(tab->a, v); },
            [tab](double, double, double v) { return tab->eval(tab->b, v); }, lam, Lam,
            "user-table");
        return cf;
    }
    throw std::invalid_argument("make_coefficients: unknown registry entry " + name);
}

void set_source(CoefficientField& cf, const std::string& spec) {
    double val = 0.0;
    if (spec == "zero") {
        val = 0.0;
    } else if (spec == "one") {
        val = 1.0;
    } else if (spec.rfind("const:", 0) == 0) {
        val = std::stod(spec.substr(6));
    } else {
        throw std::invalid_argument("set_source: unknown source " + spec);
    }
    cf.S1 = [val](double, double, double) { return val; };
    cf.S = [val](const PhasePoint&) { return val; };
}

}  // namespace kfplab
