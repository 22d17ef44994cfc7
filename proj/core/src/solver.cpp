#include "kfplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "kfplab/barriers.hpp"
#include "kfplab/rng.hpp"

namespace kfplab {

void HalfSpaceGrid::validate() const {
    if (!(X > 0.0) || !(V > 0.0) || !(T0 < 0.0))
        throw std::invalid_argument("grid: X > 0, V > 0, T0 < 0 required");
    if (n_x < 2 || n_v < 2 || n_t < 1) throw std::invalid_argument("grid: too few cells");
    if (n_v % 2 != 0) throw std::invalid_argument("grid: n_v must be even (v = 0 on a node)");
    if (dt() * V / dx() > 1.0 + 1e-12)
        throw std::invalid_argument("grid: CFL violated (dt V / dx > 1)");
}

namespace {

double tapered_bump(double x, double v, double X, double V) {
    // peak 1 at x = -X/2, support {x <= -X/4}; smooth taper to 0 at |v| = V
    const double u = (x + X / 2.0) / (X / 4.0);
    if (std::abs(u) >= 1.0) return 0.0;
    const double gx = 0.5 * (1.0 + std::cos(3.14159265358979323846 * u));
    const double av = std::abs(v);
    double gv = 1.0;
    if (av > V / 2.0) gv = 0.5 * (1.0 + std::cos(3.14159265358979323846 * (av - V / 2.0) / (V / 2.0)));
    return gx * gv;
}

}  // namespace

BoundaryData make_boundary_data(const std::string& name, const HalfSpaceGrid& grid) {
    BoundaryData bd;
    if (name == "zero" || name == "one") {
        const double c = name == "one" ? 1.0 : 0.0;
        bd.inflow = [c](double, double) { return c; };
        bd.initial = [c](double, double) { return c; };
        bd.truncation = [c](double, double, double) { return c; };
        bd.left = [c](double, double) { return c; };
        return bd;
    }
    if (name == "psi") {
        bd.inflow = [](double t, double v) { return grazing_Psi(t, 0.0, v); };
        bd.initial = [T0 = grid.T0](double x, double v) { return grazing_Psi(T0, x, v); };
        bd.truncation = [](double t, double x, double v) { return grazing_Psi(t, x, v); };
        bd.left = [X = grid.X](double t, double v) { return grazing_Psi(t, -X, v); };
        return bd;
    }
    if (name == "bump") {
        bd.inflow = [](double, double) { return 0.0; };
        bd.initial = [X = grid.X, V = grid.V](double x, double v) {
            return tapered_bump(x, v, X, V);
        };
        bd.truncation = [](double, double, double) { return 0.0; };
        return bd;  // left absent: zero-gradient ghost
    }
    if (name.rfind("custom:", 0) == 0) {
        const std::string path = name.substr(7);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("make_boundary_data: cannot open " + path);
        auto vs = std::make_shared<std::vector<double>>();
        auto fs = std::make_shared<std::vector<double>>();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            double v, f;
            if (ls >> v >> f) {
                vs->push_back(v);
                fs->push_back(f);
            }
        }
        if (vs->size() < 2) throw std::invalid_argument("make_boundary_data: table too short");
        bd.inflow = [vs, fs](double, double v) {
            if (v <= vs->front()) return fs->front();
            if (v >= vs->back()) return fs->back();
            const auto it = std::upper_bound(vs->begin(), vs->end(), v);
            const std::size_t i = static_cast<std::size_t>(it - vs->begin()) - 1;
            const double w = (v - (*vs)[i]) / ((*vs)[i + 1] - (*vs)[i]);
            return (*fs)[i] * (1.0 - w) + (*fs)[i + 1] * w;
        };
        bd.initial = [](double, double) { return 0.0; };
        bd.truncation = [](double, double, double) { return 0.0; };
        return bd;
    }
    throw std::invalid_argument("make_boundary_data: unknown family " + name);
}

double SolutionField::at(std::size_t i, std::size_t j) const {
    return final_slice[i * (grid.n_v + 1) + j];
}

double SolutionField::sample(double x, double v) const {
    const double fx = (x + grid.X) / grid.dx();
    const double fv = (v + grid.V) / grid.dv();
    const auto clamp = [](double u, double hi) { return std::min(std::max(u, 0.0), hi); };
    const double cx = clamp(fx, static_cast<double>(grid.n_x) - 1e-12);
    const double cv = clamp(fv, static_cast<double>(grid.n_v) - 1e-12);
    const auto i = static_cast<std::size_t>(cx);
    const auto j = static_cast<std::size_t>(cv);
    const double wx = cx - static_cast<double>(i);
    const double wv = cv - static_cast<double>(j);
    return at(i, j) * (1 - wx) * (1 - wv) + at(i + 1, j) * wx * (1 - wv) +
           at(i, j + 1) * (1 - wx) * wv + at(i + 1, j + 1) * wx * wv;
}

double SolutionField::sample_stored(double t, double x, double v) const {
    if (stored_times.empty()) return sample(x, v);
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < stored_times.size(); ++k) {
        const double d = std::abs(stored_times[k] - t);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    const std::size_t stride = (grid.n_x + 1) * (grid.n_v + 1);
    SolutionField tmp;
    tmp.grid = grid;
    tmp.final_slice.assign(stored.begin() + static_cast<std::ptrdiff_t>(best * stride),
                           stored.begin() + static_cast<std::ptrdiff_t>((best + 1) * stride));
    return tmp.sample(x, v);
}

namespace {

/// Prefactored Thomas chain for a fixed tridiagonal matrix; only the rhs
/// sweep runs per column.
struct ThomasCache {
    std::vector<double> lower, cprime, inv_denom;

    void factor(const std::vector<double>& lo, const std::vector<double>& di,
                const std::vector<double>& up) {
        const std::size_t n = di.size();
        lower = lo;
        cprime.assign(n, 0.0);
        inv_denom.assign(n, 0.0);
        inv_denom[0] = 1.0 / di[0];
        cprime[0] = up[0] * inv_denom[0];
        for (std::size_t j = 1; j < n; ++j) {
            inv_denom[j] = 1.0 / (di[j] - lo[j] * cprime[j - 1]);
            cprime[j] = up[j] * inv_denom[j];
        }
    }

    void solve(std::vector<double>& rhs) const {
        const std::size_t n = rhs.size();
        rhs[0] *= inv_denom[0];
        for (std::size_t j = 1; j < n; ++j)
            rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) * inv_denom[j];
        for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= cprime[j] * rhs[j + 1];
    }
};

}  // namespace

SolutionField solve_grid(const HalfSpaceGrid& grid, const CoefficientField& coeff,
                         const BoundaryData& bdata, std::size_t store_every,
                         const StepObserver& observer) {
    grid.validate();
    if (!coeff.A1 || !coeff.B1 || !coeff.S1)
        throw std::invalid_argument("solve_grid: d=1 coefficient evaluators required");
    if (!bdata.inflow || !bdata.initial || !bdata.truncation)
        throw std::invalid_argument("solve_grid: inflow, initial and truncation data required");

    const std::size_t nx = grid.n_x, nv = grid.n_v, nt = grid.n_t;
    const std::size_t cols = nv + 1, nodes = (nx + 1) * cols;
    const double dx = grid.dx(), dv = grid.dv(), dt = grid.dt();

    SolutionField sol;
    sol.grid = grid;
    sol.store_every = store_every;
    {
        std::uint64_t h = rng::splitmix64(0x6b66ULL);
        for (char ch : coeff.name) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(ch));
        sol.coefficient_hash = h;
    }

    std::vector<double> f(nodes), g(nodes);
    double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
    const auto track = [&](double val) {
        dmin = std::min(dmin, val);
        dmax = std::max(dmax, val);
        return val;
    };
    for (std::size_t i = 0; i <= nx; ++i)
        for (std::size_t j = 0; j <= nv; ++j)
            f[i * cols + j] = track(bdata.initial(grid.x(i), grid.v(j)));
    for (std::size_t j = 0; j <= nv; ++j)
        if (grid.v(j) < 0.0) f[nx * cols + j] = track(bdata.inflow(grid.T0, grid.v(j)));

    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (double val : f) {
        fmin = std::min(fmin, val);
        fmax = std::max(fmax, val);
    }

    const auto maybe_store = [&](std::size_t k) {
        if (store_every == 0) {
            if (k != 0 && k != nt) return;
        } else if (k % store_every != 0 && k != nt) {
            return;
        }
        sol.stored_times.push_back(grid.t(k));
        sol.stored.insert(sol.stored.end(), f.begin(), f.end());
    };
    maybe_store(0);
    if (observer) observer(0, grid.T0, f);

    std::vector<double> vgrid(cols);
    for (std::size_t j = 0; j <= nv; ++j) vgrid[j] = grid.v(j);

    // cached factorizations when the coefficients depend on v only
    ThomasCache interior_cache, inflow_cache;
    std::vector<double> src_cache;
    if (coeff.tx_independent) {
        std::vector<double> lo(cols), di(cols), up(cols), loI(cols), diI(cols), upI(cols);
        src_cache.resize(cols);
        for (std::size_t j = 0; j <= nv; ++j) {
            const double vj = vgrid[j];
            src_cache[j] = coeff.S1(0.0, 0.0, vj);
            if (j == 0 || j == nv) {
                lo[j] = up[j] = 0.0;
                di[j] = 1.0;
            } else {
                const double A = coeff.A1(0.0, 0.0, vj);
                const double B = coeff.B1(0.0, 0.0, vj);
                const double dA = dt * A / (dv * dv);
                const double dBp = dt * std::max(B, 0.0) / dv;
                const double dBm = dt * std::max(-B, 0.0) / dv;
                lo[j] = -(dA + dBm);
                up[j] = -(dA + dBp);
                di[j] = 1.0 + 2.0 * dA + dBp + dBm;
            }
            const bool dirichlet = j == 0 || j == nv || vj < 0.0;
            loI[j] = dirichlet ? 0.0 : lo[j];
            upI[j] = dirichlet ? 0.0 : up[j];
            diI[j] = dirichlet ? 1.0 : di[j];
        }
        interior_cache.factor(lo, di, up);
        inflow_cache.factor(loI, diI, upI);
    }

    std::vector<double> lower(cols), diag(cols), upper(cols), rhs(cols), scratch(cols);

    for (std::size_t k = 0; k < nt; ++k) {
        const double t_now = grid.t(k), t_next = grid.t(k + 1);

        // explicit upwind transport + explicit source
        for (std::size_t i = 0; i <= nx; ++i) {
            const double xi = grid.x(i);
            const double* fr = f.data() + i * cols;
            const double* fl = i >= 1 ? f.data() + (i - 1) * cols : nullptr;
            const double* fu = i + 1 <= nx ? f.data() + (i + 1) * cols : nullptr;
            double* gr = g.data() + i * cols;
            for (std::size_t j = 0; j <= nv; ++j) {
                const double vj = vgrid[j];
                const double fc = fr[j];
                double der = 0.0;
                if (vj > 0.0) {
                    if (fl) {
                        der = (fc - fl[j]) / dx;
                    } else if (bdata.left) {
                        der = (fc - track(bdata.left(t_now, vj))) / dx;
                    }  // else zero-gradient ghost at the truncated face
                } else if (vj < 0.0 && fu) {
                    der = (fu[j] - fc) / dx;
                }
                const double s = coeff.tx_independent ? src_cache[j] : coeff.S1(t_now, xi, vj);
                gr[j] = fc - dt * vj * der + dt * s;
            }
        }

        // implicit diffusion + upwinded drift, independent per x-column
        for (std::size_t i = 0; i <= nx; ++i) {
            const double xi = grid.x(i);
            const bool inflow_col = i == nx;
            for (std::size_t j = 0; j <= nv; ++j) rhs[j] = g[i * cols + j];
            rhs[0] = track(bdata.truncation(t_next, xi, vgrid[0]));
            rhs[nv] = track(bdata.truncation(t_next, xi, vgrid[nv]));
            if (inflow_col)
                for (std::size_t j = 1; j < nv; ++j)
                    if (vgrid[j] < 0.0) rhs[j] = track(bdata.inflow(t_next, vgrid[j]));

            if (coeff.tx_independent) {
                (inflow_col ? inflow_cache : interior_cache).solve(rhs);
            } else {
                for (std::size_t j = 0; j <= nv; ++j) {
                    const double vj = vgrid[j];
                    const bool dirichlet = j == 0 || j == nv || (inflow_col && vj < 0.0);
                    if (dirichlet) {
                        lower[j] = 0.0; upper[j] = 0.0; diag[j] = 1.0;
                        continue;
                    }
                    const double A = coeff.A1(t_next, xi, vj);
                    const double B = coeff.B1(t_next, xi, vj);
                    if (!std::isfinite(A) || !std::isfinite(B))
                        throw std::runtime_error("solve_grid: non-finite coefficient");
                    const double dA = dt * A / (dv * dv);
                    const double dBp = dt * std::max(B, 0.0) / dv;  // +B d_v, forward when B > 0
                    const double dBm = dt * std::max(-B, 0.0) / dv;
                    lower[j] = -(dA + dBm);
                    upper[j] = -(dA + dBp);
                    diag[j] = 1.0 + 2.0 * dA + dBp + dBm;
                }
                scratch[0] = upper[0] / diag[0];
                rhs[0] /= diag[0];
                for (std::size_t j = 1; j <= nv; ++j) {
                    const double m = 1.0 / (diag[j] - lower[j] * scratch[j - 1]);
                    scratch[j] = upper[j] * m;
                    rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) * m;
                }
                for (std::size_t j = nv; j-- > 0;) rhs[j] -= scratch[j] * rhs[j + 1];
            }
            double* fw = f.data() + i * cols;
            for (std::size_t j = 0; j <= nv; ++j) {
                const double val = rhs[j];
                fw[j] = val;
                fmin = std::min(fmin, val);
                fmax = std::max(fmax, val);
            }
        }
        if (!std::isfinite(fmin) || !std::isfinite(fmax))
            throw std::runtime_error("solve_grid: non-finite field");
        maybe_store(k + 1);
        if (observer) observer(k + 1, t_next, f);
    }

    sol.final_slice = std::move(f);
    sol.field_min = fmin;
    sol.field_max = fmax;
    sol.data_min = dmin;
    sol.data_max = dmax;
    return sol;
}

BoundaryProfile boundary_profile(const SolutionField& sol, double v_query) {
    if (sol.final_slice.empty()) throw std::invalid_argument("boundary_profile: empty field");
    const auto& g = sol.grid;
    const double fj = (v_query + g.V) / g.dv();
    const auto j = static_cast<std::size_t>(
        std::min(std::max(std::llround(fj), 0LL), static_cast<long long>(g.n_v)));
    BoundaryProfile prof;
    prof.v_used = g.v(j);
    prof.snapped = std::abs(prof.v_used - v_query) > 1e-12 * std::max(1.0, std::abs(v_query));
    prof.points.reserve(g.n_x + 1);
    for (std::size_t i = 0; i <= g.n_x; ++i) prof.points.emplace_back(g.x(i), sol.at(i, j));
    return prof;
}

std::vector<McEstimate> solve_mc(const std::vector<PhasePoint>& points,
                                 const CoefficientField& coeff, const HalfSpaceGrid& grid,
                                 const BoundaryData& bdata, std::size_t n_particles,
                                 std::uint64_t seed, double dt_mc) {
    if (n_particles == 0) throw std::invalid_argument("solve_mc: n_particles must be positive");
    if (!(dt_mc > 0.0)) throw std::invalid_argument("solve_mc: dt_mc must be positive");

    std::vector<McEstimate> out;
    out.reserve(points.size());
    for (std::size_t q = 0; q < points.size(); ++q) {
        const PhasePoint& z = points[q];
        if (z.dim() != 1) throw std::invalid_argument("solve_mc: d = 1 query points required");
        const double tau_max = z.t - grid.T0;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t p = 0; p < n_particles; ++p) {
            double X = z.x[0], Vp = z.v[0], tau = 0.0, src = 0.0;
            double value = 0.0;
            for (std::uint64_t step = 0;; ++step) {
                if (tau >= tau_max - 1e-300) {
                    value = bdata.initial(X, Vp);
                    break;
                }
                const double h = std::min(dt_mc, tau_max - tau);
                const double tcur = z.t - tau;
                const double A = coeff.A1(tcur, X, Vp);
                const double B = coeff.B1(tcur, X, Vp);
                double n0, n1;
                rng::normal_pair(seed, q * 1000003ULL + p, step, 0, n0, n1);
                const double Xn = X - Vp * h;
                const double Vn = Vp + B * h + std::sqrt(2.0 * A * h) * n0;
                const double s_here = coeff.S1(tcur, X, Vp);

                // earliest boundary event within the step
                double theta = 1.0;
                int event = 0;  // 0 none, 1 inflow, 2 truncation
                if (Xn >= 0.0 && Xn != X) {
                    const double th = (0.0 - X) / (Xn - X);
                    if (th < theta) { theta = th; event = 1; }
                }
                if (std::abs(Vn) >= grid.V && Vn != Vp) {
                    const double edge = Vn > 0.0 ? grid.V : -grid.V;
                    const double th = (edge - Vp) / (Vn - Vp);
                    if (th >= 0.0 && th < theta) { theta = th; event = 2; }
                }
                if (event == 1) {
                    src += s_here * theta * h;
                    const double Vstar = Vp + theta * (Vn - Vp);
                    value = bdata.inflow(tcur - theta * h, Vstar < 0.0 ? Vstar : Vp);
                    break;
                }
                if (event == 2) {
                    src += s_here * theta * h;
                    const double Xstar = X + theta * (Xn - X);
                    const double edge = Vn > 0.0 ? grid.V : -grid.V;
                    value = bdata.truncation(tcur - theta * h, Xstar, edge);
                    break;
                }
                src += s_here * h;
                X = Xn;
                Vp = Vn;
                tau += h;
            }
            const double est = value + src;
            sum += est;
            sum2 += est * est;
        }
        const double n = static_cast<double>(n_particles);
        McEstimate e;
        e.mean = sum / n;
        const double var = std::max(0.0, sum2 / n - e.mean * e.mean);
        e.std_error = std::sqrt(var / n);
        out.push_back(e);
    }
    return out;
}

void write_field_dump(const SolutionField& sol, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_dump: cannot open " + path);
    const char magic[4] = {'K', 'F', 'P', 'F'};
    out.write(magic, 4);
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::uint64_t nt = sol.stored_times.size();
    const std::uint64_t nx = sol.grid.n_x + 1, nv = sol.grid.n_v + 1;
    out.write(reinterpret_cast<const char*>(&nt), sizeof nt);
    out.write(reinterpret_cast<const char*>(&nx), sizeof nx);
    out.write(reinterpret_cast<const char*>(&nv), sizeof nv);
    for (double t : sol.stored_times) out.write(reinterpret_cast<const char*>(&t), sizeof t);
    for (std::uint64_t i = 0; i < nx; ++i) {
        const double x = sol.grid.x(i);
        out.write(reinterpret_cast<const char*>(&x), sizeof x);
    }
    for (std::uint64_t j = 0; j < nv; ++j) {
        const double v = sol.grid.v(j);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    out.write(reinterpret_cast<const char*>(sol.stored.data()),
              static_cast<std::streamsize>(sol.stored.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_field_dump: write failed for " + path);
}

void write_trace_csv(const BoundaryProfile& prof, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "x,f\n";
    out.precision(17);
    for (const auto& [x, f] : prof.points) out << x << "," << f << "\n";
    if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.items.emplace_back(key, val);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const {
    for (const auto& [k, v] : items)
        if (k == key) return true;
    return false;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : items)
        if (k == key) return v;
    return fallback;
}

double KeyValueConfig::get_num(const std::string& key, double fallback) const {
    const std::string s = get(key, "");
    return s.empty() ? fallback : std::stod(s);
}

SolveSetup make_solve_setup(const KeyValueConfig& cfg) {
    SolveSetup s;
    s.grid.X = cfg.get_num("X", 1.0);
    s.grid.V = cfg.get_num("V", 2.0);
    s.grid.T0 = cfg.get_num("T0", -0.5);
    s.grid.n_x = static_cast<std::size_t>(cfg.get_num("nx", 128));
    s.grid.n_v = static_cast<std::size_t>(cfg.get_num("nv", 128));
    s.grid.n_t = static_cast<std::size_t>(cfg.get_num("nt", 1000));
    s.coeff = make_coefficients(cfg.get("coeff", "constant"), cfg.get("coeff_table", ""));
    set_source(s.coeff, cfg.get("source", "zero"));
    s.bdata = make_boundary_data(cfg.get("boundary", "zero"), s.grid);
    s.store_every = static_cast<std::size_t>(cfg.get_num("store_every", 0));
    s.grid.validate();
    return s;
}

}  // namespace kfplab
