#include "torus_atlas/kam.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"
#include "torus_atlas/spline.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

using Grid = std::vector<double>;

// Fourier multipliers on real n x n grids; Nyquist modes are always dropped.
class Spectral {
public:
    explicit Spectral(int n) : fft_(n), n_(n), buf_(fft_.spectrum_size()) {}

    template <class F>
    void apply(const double* in, double* out, F&& mult) {
        const int nc = n_ / 2 + 1;
        fft_.forward(in, buf_.data());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < nc; ++j) {
                cplx& c = buf_[std::size_t(i) * nc + j];
                if (i == n_ / 2 || j == n_ / 2)
                    c = 0.0;
                else
                    c *= mult(wavenumber(i, n_), j);
            }
        fft_.backward(buf_.data(), out);
    }

private:
    Fft2 fft_;
    int n_;
    std::vector<cplx> buf_;
};

Grid row_of(const Matrix6X& v, int c) {
    Grid g(std::size_t(v.cols()));
    for (Eigen::Index k = 0; k < v.cols(); ++k) g[k] = v(c, k);
    return g;
}

// Omega v = (-v_p, v_q) and J = Omega^T.
Eigen::Matrix<double, 6, 2> omega_times(const Eigen::Matrix<double, 6, 2>& v) {
    Eigen::Matrix<double, 6, 2> r;
    r.topRows<3>() = -v.bottomRows<3>();
    r.bottomRows<3>() = v.topRows<3>();
    return r;
}

Vec6 retract(const Vec6& x) {
    Eigen::Vector3d q = x.head<3>().normalized();
    Eigen::Vector3d p = x.tail<3>();
    p -= q.dot(p) * q;
    Vec6 r;
    r << q, p;
    return r;
}

// Derivative grids of the six components.
void derivatives(Spectral& S, const Matrix6X& v, std::array<Grid, 6>& d1, std::array<Grid, 6>& d2) {
    for (int c = 0; c < 6; ++c) {
        Grid row = row_of(v, c);
        d1[c].resize(row.size());
        d2[c].resize(row.size());
        S.apply(row.data(), d1[c].data(), [](int k1, int) { return cplx(0.0, k1); });
        S.apply(row.data(), d2[c].data(), [](int, int k2) { return cplx(0.0, k2); });
    }
}

// One Newton step of the invariance equation in the frame [DK, N, X_c]
// (tangent, symplectic normal, constraint directions). Returns the residual
// of the input.
double newton_step(Matrix6X& vals, int n, const FrequencyVector& om, const HamiltonianSpec& spec, const KamConfig& cfg) {
    const std::size_t M = std::size_t(n) * n;
    const double w1 = om.omega1, w2 = om.omega2;
    Spectral S(n);
    auto lw = [&](int k1, int k2) { return cplx(0.0, k1 * w1 + k2 * w2); };
    auto lw_inv = [&](int k1, int k2) {
        if (k1 == 0 && k2 == 0) return cplx(0.0);
        return 1.0 / cplx(0.0, k1 * w1 + k2 * w2);
    };

    std::array<Grid, 6> D1, D2;
    derivatives(S, vals, D1, D2);

    using M62 = Eigen::Matrix<double, 6, 2>;
    std::vector<M62> L(M), Nf(M), DXN(M);
    std::vector<Mat6> Pinv(M);
    std::array<Grid, 6> eta;
    for (auto& g : eta) g.resize(M);
    double residual = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        Vec6 x = vals.col(Eigen::Index(k));
        M62& Lk = L[k];
        for (int c = 0; c < 6; ++c) {
            Lk(c, 0) = D1[c][k];
            Lk(c, 1) = D2[c][k];
        }
        Vec6 E = vector_field(x, spec) - Lk * Eigen::Vector2d(w1, w2);
        residual = std::max(residual, E.cwiseAbs().maxCoeff());
        Eigen::Vector3d q = x.head<3>(), p = x.tail<3>();
        M62 Gc;
        Gc.col(0) << 2.0 * q, Eigen::Vector3d::Zero();
        Gc.col(1) << p, q;
        M62 Xc = -omega_times(Gc);
        Eigen::Matrix2d Mc = Gc.transpose() * Xc;
        Eigen::Matrix2d G = Lk.transpose() * Lk;
        M62 N0 = -omega_times(Lk) * G.inverse();
        N0 -= Xc * (Mc.inverse() * (Gc.transpose() * N0));
        Eigen::Matrix2d A = N0.transpose() * omega_times(N0);
        Nf[k] = N0 + Lk * (0.5 * A);
        Mat6 P;
        P << Lk, Nf[k], Xc;
        Pinv[k] = P.inverse();
        Vec6 e = Pinv[k] * E;
        for (int c = 0; c < 6; ++c) eta[c][k] = e[c];
        DXN[k] = vector_field_jacobian(x, spec) * Nf[k];
    }

    // L_omega N
    std::array<std::array<Grid, 2>, 6> LwN;
    {
        Grid tmp(M);
        for (int c = 0; c < 6; ++c)
            for (int l = 0; l < 2; ++l) {
                for (std::size_t k = 0; k < M; ++k) tmp[k] = Nf[k](c, l);
                LwN[c][l].resize(M);
                S.apply(tmp.data(), LwN[c][l].data(), lw);
            }
    }
    std::vector<Eigen::Matrix2d> T(M);
    Eigen::Matrix2d Tavg = Eigen::Matrix2d::Zero();
    for (std::size_t k = 0; k < M; ++k) {
        M62 B = DXN[k];
        for (int c = 0; c < 6; ++c)
            for (int l = 0; l < 2; ++l) B(c, l) -= LwN[c][l][k];
        T[k] = (Pinv[k] * B).topRows<2>();
        Tavg += T[k];
    }
    Tavg /= double(M);

    std::array<Grid, 2> xiN, xiL, rhs;
    for (int a = 0; a < 2; ++a) {
        xiN[a].resize(M);
        xiL[a].resize(M);
        rhs[a].resize(M);
        S.apply(eta[2 + a].data(), xiN[a].data(), lw_inv);
    }
    Eigen::Vector2d avg = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < M; ++k)
        avg += Eigen::Vector2d(eta[0][k], eta[1][k]) + T[k] * Eigen::Vector2d(xiN[0][k], xiN[1][k]);
    avg /= double(M);
    // mean of the normal correction makes the tangential equation solvable
    Eigen::Vector2d bar = -Tavg.partialPivLu().solve(avg);
    for (std::size_t k = 0; k < M; ++k) {
        xiN[0][k] += bar[0];
        xiN[1][k] += bar[1];
        Eigen::Vector2d r = Eigen::Vector2d(eta[0][k], eta[1][k]) + T[k] * Eigen::Vector2d(xiN[0][k], xiN[1][k]);
        rhs[0][k] = r[0];
        rhs[1][k] = r[1];
    }
    for (int a = 0; a < 2; ++a) S.apply(rhs[a].data(), xiL[a].data(), lw_inv);

    const double cut = cfg.filter_fraction * n / 2.0;
    auto filter = [cut](int k1, int k2) { return cplx(std::abs(k1) <= cut && std::abs(k2) <= cut ? 1.0 : 0.0); };
    Grid dk(M), dkf(M);
    for (int c = 0; c < 6; ++c) {
        for (std::size_t k = 0; k < M; ++k)
            dk[k] = L[k](c, 0) * xiL[0][k] + L[k](c, 1) * xiL[1][k] + Nf[k](c, 0) * xiN[0][k] +
                    Nf[k](c, 1) * xiN[1][k];
        S.apply(dk.data(), dkf.data(), filter);
        for (std::size_t k = 0; k < M; ++k) vals(c, Eigen::Index(k)) += dkf[k];
    }
    for (std::size_t k = 0; k < M; ++k) vals.col(Eigen::Index(k)) = retract(vals.col(Eigen::Index(k)));
    return residual;
}

double ledger_divisor(const FrequencyVector& om, int n, const KamConfig& cfg) {
    double best = std::numeric_limits<double>::infinity();
    for (int k1 = -(n / 2 - 1); k1 <= n / 2 - 1; ++k1)
        for (int k2 = -(n / 2 - 1); k2 <= n / 2 - 1; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            double d = std::abs(k1 * om.omega1 + k2 * om.omega2) * std::pow(double(std::abs(k1) + std::abs(k2)), cfg.tau);
            best = std::min(best, d);
        }
    return best;
}

}  // namespace

void KamConfig::validate() const {
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (max_newton < 1) throw ConfigError("max_newton must be at least 1");
    if (N < 32 || (N & (N - 1)) != 0) throw ConfigError("N must be a power of 2, at least 32");
    if (!(tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
    if (!(smallness_guard > 0.0)) throw ConfigError("smallness_guard must be positive");
    if (!(filter_fraction > 0.0 && filter_fraction <= 1.0)) throw ConfigError("filter_fraction must lie in (0, 1]");
}

double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    return r <= -kPi ? r + kTwoPi : r;
}

double invariance_residual(const TorusEmbedding& K, const FrequencyVector& om, const HamiltonianSpec& spec) {
    const int n = K.n();
    Spectral S(n);
    std::array<Grid, 6> d1, d2;
    derivatives(S, K.values(), d1, d2);
    double r = 0.0;
    for (Eigen::Index k = 0; k < K.values().cols(); ++k) {
        Vec6 X = vector_field(Vec6(K.values().col(k)), spec);
        for (int c = 0; c < 6; ++c) r = std::max(r, std::abs(om.omega1 * d1[c][k] + om.omega2 * d2[c][k] - X[c]));
    }
    return r;
}

TorusEmbedding normalize_gauge(const TorusEmbedding& K, const Eigen::Matrix2d& gauge) {
    const int n = K.n();
    const int stride = std::max(1, n / 32);
    ChartSpec cs;
    cs.gauge = gauge;
    AnglePair c{0.0, 0.0};
    TorusEmbedding cur = K;
    for (int it = 0; it < 8; ++it) {
        double m1 = 0.0, m2 = 0.0;
        int count = 0;
        for (int i = 0; i < n; i += stride)
            for (int j = 0; j < n; j += stride) {
                AnglePair a = chart_angles(project(PhasePoint::from_vec(cur.sample(i, j))), cs);
                m1 += wrap_angle(a.theta1 - kTwoPi * i / n);
                m2 += wrap_angle(a.theta2 - kTwoPi * j / n);
                ++count;
            }
        m1 /= count;
        m2 /= count;
        if (std::max(std::abs(m1), std::abs(m2)) < 1e-14) break;
        c.theta1 -= m1;
        c.theta2 -= m2;
        cur = translate_on_torus(K, c);
    }
    return cur;
}

SolvedTorus solve_invariance(const TorusEmbedding& seed, const FrequencyVector& omega, const HamiltonianSpec& spec,
                             const KamConfig& cfg, const Eigen::Matrix2d& gauge) {
    cfg.validate();
    if (!std::isfinite(omega.omega1) || !std::isfinite(omega.omega2)) throw ValidationError("frequency must be finite");
    if (std::abs(spec.epsilon) > cfg.smallness_guard)
        throw SmallnessViolated(fmt::format("epsilon {:.6g} exceeds the calibrated guard {:.6g}", spec.epsilon,
                                            cfg.smallness_guard));
    const int n = seed.n();
    SolvedTorus st;
    st.omega = omega;
    st.epsilon = spec.epsilon;
    st.perturbation = spec.perturbation;
    st.min_weighted_divisor = ledger_divisor(omega, n, cfg);
    Matrix6X vals = seed.values();
    double r = invariance_residual(seed, omega, spec);
    st.residual_history.push_back(r);

    // Failure is blamed on the grid when Newton stalled near the level that
    // the modes beyond the correction filter impose, or the spectrum has not
    // decayed there. A stall far above that level is a smallness failure.
    auto fail = [&](const std::string& why, double level) {
        TorusEmbedding cur(n, omega, vals);
        double tail = cur.tail_ratio(n / 4);
        const int band = int(cfg.filter_fraction * n / 2.0);
        double floor = cur.tail_ratio(band) * band * std::hypot(omega.omega1, omega.omega2);
        bool truncated = tail > cfg.tail_tol || floor > 0.1 * cfg.newton_tol;
        if (std::isfinite(level) && truncated && level <= 1e3 * std::max(floor, cfg.newton_tol))
            throw GridTooCoarse(fmt::format("{}; spectral tail {:.3e} (truncation floor {:.3e}) at N = {}, try N = {}",
                                            why, tail, floor, n, 2 * n),
                                2 * n);
        throw SmallnessViolated(fmt::format("{} at epsilon = {:.6g}; the perturbation is too large for this torus",
                                            why, spec.epsilon));
    };

    if (spec.epsilon != 0.0) {
        while (r > cfg.newton_tol) {
            if (st.iterations >= cfg.max_newton)
                fail(fmt::format("Newton did not reach {:.1e} in {} steps (residual {:.3e})", cfg.newton_tol,
                                 cfg.max_newton, r),
                     r);
            Matrix6X next = vals;
            newton_step(next, n, omega, spec, cfg);
            ++st.iterations;
            double rn = invariance_residual(TorusEmbedding(n, omega, next), omega, spec);
            st.residual_history.push_back(rn);
            if (!std::isfinite(rn)) fail("Newton produced non-finite values", rn);
            if (rn > 10.0 * r) fail(fmt::format("Newton diverged (residual {:.3e} -> {:.3e})", r, rn), rn);
            if (st.iterations >= 3 && rn > 0.5 * r)
                fail(fmt::format("Newton stagnated at residual {:.3e}", rn), rn);
            vals = std::move(next);
            r = rn;
        }
    }
    TorusEmbedding K(n, omega, std::move(vals));
    double tail = K.tail_ratio(n / 4);
    if (tail > cfg.tail_tol)
        throw GridTooCoarse(
            fmt::format("spectral tail {:.3e} above {:.1e} at N = {}, try N = {}", tail, cfg.tail_tol, n, 2 * n),
            2 * n);
    st.K = normalize_gauge(K, gauge);
    st.residual = invariance_residual(st.K, omega, spec);
    return st;
}

TorusEmbedding gauged_embedding(const EMValue& v, int n, const Eigen::Matrix2d& gauge) {
    TorusEmbedding K0 = integrable_embedding(v, n);
    if (gauge.isZero()) return K0;
    Eigen::Vector2d s = gauge * Eigen::Vector2d(action_J(v), v.I);
    return translate_on_torus(K0, {-s[0], -s[1]});
}

SolvedTorus solve_torus(const EMValue& v, const HamiltonianSpec& spec, const KamConfig& cfg,
                        const Eigen::Matrix2d& gauge) {
    cfg.validate();
    TorusEmbedding K0 = integrable_embedding(v, cfg.N);
    SolvedTorus st = solve_invariance(K0, K0.omega(), spec, cfg, gauge);
    st.value = v;
    return st;
}

double validate_torus(const SolvedTorus& st, const HamiltonianSpec& spec, double t_end, int samples,
                      std::uint64_t seed, double h) {
    if (!(t_end > 0.0) || samples < 1) throw ValidationError("validate_torus needs t_end > 0 and samples >= 1");
    double worst = 0.0;
    const int stride = std::max(1, int(std::lround(0.1 / h)));
    for (int s = 0; s < samples; ++s) {
        AnglePair a0{kTwoPi * counter_uniform(seed, 2, std::uint64_t(s)),
                     kTwoPi * counter_uniform(seed, 3, std::uint64_t(s))};
        PhasePoint x0 = project(PhasePoint::from_vec(st.K.evaluate(a0)));
        Trajectory tr = integrate(x0, spec, t_end, h, {Scheme::Composition6, stride});
        for (std::size_t k = 0; k < tr.size(); ++k) {
            double t = tr.time[k];
            Vec6 y = st.K.evaluate({a0.theta1 + st.omega.omega1 * t, a0.theta2 + st.omega.omega2 * t});
            worst = std::max(worst, (tr.points[k].to_vec() - y).norm());
        }
    }
    return worst;
}

GuardCalibration calibrate_guard(const EMValue& v, Perturbation f, KamConfig cfg, double eps_lo, double eps_hi,
                                 int bisections) {
    cfg.smallness_guard = std::numeric_limits<double>::infinity();
    TorusEmbedding K0 = integrable_embedding(v, cfg.N);
    GuardCalibration g;
    auto solves = [&](double eps) {
        ++g.solves;
        try {
            solve_invariance(K0, K0.omega(), HamiltonianSpec{eps, f}, cfg);
            return true;
        } catch (const NumericalError&) {
            return false;
        }
    };
    if (!solves(eps_lo))
        throw SmallnessViolated(fmt::format("guard calibration: epsilon = {:.3g} already fails", eps_lo));
    if (solves(eps_hi)) {
        g.guard = eps_hi;
        g.failing = std::numeric_limits<double>::infinity();
        return g;
    }
    double lo = eps_lo, hi = eps_hi;
    for (int k = 0; k < bisections; ++k) {
        double mid = std::sqrt(lo * hi);
        (solves(mid) ? lo : hi) = mid;
    }
    g.guard = lo;
    g.failing = hi;
    return g;
}

std::size_t LocalConjugacy::solved_count() const {
    std::size_t k = 0;
    for (const auto& t : tori_) k += t ? 1 : 0;
    return k;
}

bool LocalConjugacy::admits(const EMValue& v) const {
    if (!chart_.window.contains(v) || classify(v) != ValueClass::Regular) return false;
    FrequencyVector om = frequency_map(v);
    return shrunk_.contains(om) && is_diophantine(om, params_).accepted;
}

SolvedTorus LocalConjugacy::torus_at(const EMValue& v, bool polish) const {
    if (!admits(v))
        throw DomainError(fmt::format("({:.17g}, {:.17g}) is not a Diophantine value of chart {}", v.I, v.E, chart_.id));
    const int n = cfg_.N;
    SplineWeights sI(I_nodes_), sE(E_nodes_);
    std::vector<double> wI = sI.weights(v.I), wE = sE.weights(v.E);
    TorusEmbedding K0 = gauged_embedding(v, n, chart_.gauge);
    Matrix6X vals = K0.values();
    const int m = int(E_nodes_.size());
    for (std::size_t i = 0; i < wI.size(); ++i)
        for (std::size_t j = 0; j < wE.size(); ++j) vals += (wI[i] * wE[j]) * offsets_[i * m + j];
    for (Eigen::Index k = 0; k < vals.cols(); ++k) vals.col(k) = retract(vals.col(k));
    TorusEmbedding K(n, K0.omega(), std::move(vals));
    if (polish) {
        SolvedTorus st = solve_invariance(K, K.omega(), spec_, cfg_, chart_.gauge);
        st.value = v;
        return st;
    }
    SolvedTorus st;
    st.value = v;
    st.omega = K.omega();
    st.epsilon = spec_.epsilon;
    st.perturbation = spec_.perturbation;
    st.residual = invariance_residual(K, st.omega, spec_);
    st.residual_history = {st.residual};
    st.min_weighted_divisor = ledger_divisor(st.omega, n, cfg_);
    st.K = std::move(K);
    return st;
}

LocalConjugacy build_local_conjugacy(const ChartSpec& chart, const HamiltonianSpec& spec, const DiophantineParams& p,
                                     int n, int m, const KamConfig& cfg, int jobs) {
    cfg.validate();
    if (n < 2 || m < 2) throw ValidationError("action grid must be at least 2x2");
    if (std::abs(spec.epsilon) > cfg.smallness_guard)
        throw SmallnessViolated(fmt::format("chart {}: epsilon {:.6g} exceeds the guard {:.6g}", chart.id,
                                            spec.epsilon, cfg.smallness_guard));
    LocalConjugacy lc;
    lc.chart_ = chart;
    lc.spec_ = spec;
    lc.params_ = p;
    lc.cfg_ = cfg;
    lc.grid_ = diophantine_set_in_chart(chart, p, n, m, jobs);
    lc.shrunk_ = shrink_domain(frequency_domain(chart), p.shrink());
    for (int i = 0; i < n; ++i) lc.I_nodes_.push_back(lc.grid_.at(i, 0).value.I);
    for (int j = 0; j < m; ++j) lc.E_nodes_.push_back(lc.grid_.at(0, j).value.E);

    const std::size_t total = std::size_t(n) * m;
    lc.tori_.assign(total, std::nullopt);
    lc.offsets_.assign(total, Matrix6X());
    parallel_for(total, jobs, [&](std::size_t k) {
        const LabeledNode& node = lc.grid_.nodes[k];
        if (!node.in) return;
        const EMValue v = node.value;
        auto where = [&](const std::exception& e) {
            return fmt::format("chart {}, torus (I, E) = ({:.17g}, {:.17g}): {}", chart.id, v.I, v.E, e.what());
        };
        try {
            TorusEmbedding K0 = gauged_embedding(v, cfg.N, chart.gauge);
            TorusEmbedding seed = integrable_embedding(v, cfg.N);
            SolvedTorus st = solve_invariance(seed, seed.omega(), spec, cfg, chart.gauge);
            st.value = v;
            lc.offsets_[k] = st.K.values() - K0.values();
            lc.tori_[k] = std::move(st);
        } catch (const GridTooCoarse& e) {
            throw GridTooCoarse(where(e), e.suggested_n());
        } catch (const SmallnessViolated& e) {
            throw SmallnessViolated(where(e));
        } catch (const NumericalError& e) {
            throw NumericalError(where(e));
        }
    });
    if (lc.solved_count() == 0) throw DomainError(fmt::format("chart {} has no Diophantine grid torus", chart.id));

    // fill holes along E, then along I
    auto fill_line = [&](const std::vector<std::size_t>& idx, const std::vector<double>& coord) {
        std::vector<double> xs;
        std::vector<std::size_t> have;
        for (std::size_t a = 0; a < idx.size(); ++a)
            if (lc.offsets_[idx[a]].size() > 0) {
                xs.push_back(coord[a]);
                have.push_back(idx[a]);
            }
        if (have.size() < 2 || have.size() == idx.size()) return;
        SplineWeights sw(xs);
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (lc.offsets_[idx[a]].size() > 0) continue;
            std::vector<double> w = sw.weights(coord[a]);
            Matrix6X acc = Matrix6X::Zero(6, lc.offsets_[have[0]].cols());
            for (std::size_t b = 0; b < have.size(); ++b) acc += w[b] * lc.offsets_[have[b]];
            lc.offsets_[idx[a]] = std::move(acc);
        }
    };
    for (int i = 0; i < n; ++i) {
        std::vector<std::size_t> idx;
        for (int j = 0; j < m; ++j) idx.push_back(std::size_t(i) * m + j);
        fill_line(idx, lc.E_nodes_);
    }
    for (int j = 0; j < m; ++j) {
        std::vector<std::size_t> idx;
        for (int i = 0; i < n; ++i) idx.push_back(std::size_t(i) * m + j);
        fill_line(idx, lc.I_nodes_);
    }
    for (std::size_t k = 0; k < total; ++k)
        if (lc.offsets_[k].size() == 0) {
            const EMValue v = lc.grid_.nodes[k].value;
            throw DomainError(fmt::format("chart {}: too few Diophantine tori to interpolate at ({:.6g}, {:.6g})",
                                          chart.id, v.I, v.E));
        }
    return lc;
}

}  // namespace torus_atlas
