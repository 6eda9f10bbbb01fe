#include "torus_atlas/freq_verify.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/fourier.hpp"
#include "torus_atlas/simd/kernels.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Signal {
    std::vector<double> re, im;  // im empty for real input
    double dt = 0.0;
    double t0 = 0.0;     // centered time origin
    double scale = 0.0;  // max modulus before the mean was removed
    bool complex() const { return !im.empty(); }
    std::size_t size() const { return re.size(); }
    double time(std::size_t k) const { return t0 + double(k) * dt; }
};

std::vector<double> hann(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 0.5 * (1.0 - std::cos(kTwoPi * double(k) / double(n - 1)));
    return w;
}

// Basis columns for the fitted model: e^{i nu t} for complex input, cos and
// sin for real input.
int columns_per(const Signal& s) { return s.complex() ? 1 : 2; }

cplx basis(const Signal& s, int col, double nu, double t) {
    if (s.complex()) return std::polar(1.0, nu * t);
    return col == 0 ? cplx(std::cos(nu * t)) : cplx(std::sin(nu * t));
}

// Window-weighted least squares for the amplitudes of the given frequencies.
Eigen::VectorXcd fit(const Signal& s, const std::vector<double>& w, const std::vector<double>& nus) {
    const int cp = columns_per(s);
    const int nc = cp * int(nus.size());
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(nc, nc);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nc);
    Eigen::VectorXcd phi(nc);
    for (std::size_t k = 0; k < s.size(); ++k) {
        double t = s.time(k);
        for (std::size_t f = 0; f < nus.size(); ++f)
            for (int c = 0; c < cp; ++c) phi[int(f) * cp + c] = basis(s, c, nus[f], t);
        cplx x(s.re[k], s.complex() ? s.im[k] : 0.0);
        G.noalias() += w[k] * phi.conjugate() * phi.transpose();
        b.noalias() += w[k] * x * phi.conjugate();
    }
    return G.ldlt().solve(b);
}

// Signal minus every fitted component except `skip`.
Signal residual(const Signal& s, const std::vector<double>& nus, const Eigen::VectorXcd& amp, int skip) {
    Signal r = s;
    const int cp = columns_per(s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        double t = s.time(k);
        cplx m(0.0);
        for (std::size_t f = 0; f < nus.size(); ++f) {
            if (int(f) == skip) continue;
            for (int c = 0; c < cp; ++c) m += amp[int(f) * cp + c] * basis(s, c, nus[f], t);
        }
        r.re[k] -= m.real();
        if (s.complex()) r.im[k] -= m.imag();
    }
    return r;
}

double amplitude(const Signal& s, const Eigen::VectorXcd& amp, int f) {
    if (s.complex()) return std::abs(amp[f]);
    return std::hypot(std::abs(amp[2 * f]), std::abs(amp[2 * f + 1]));
}

// Zero-padded windowed spectrum peak; real input searches positive frequencies.
double coarse_peak(const Signal& s, const std::vector<double>& w) {
    const std::size_t n = s.size();
    std::size_t P = 1;
    while (P < n) P <<= 1;
    P *= 4;
    std::vector<cplx> buf(P, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) buf[k] = w[k] * cplx(s.re[k], s.complex() ? s.im[k] : 0.0);
    fft_forward(buf);
    const long guard = long(2 * P / n) + 1;  // skip the window main lobe around 0
    long best = 0;
    double best_mag = -1.0;
    const long lo = s.complex() ? -long(P / 2) + 1 : guard;
    for (long b = lo; b < long(P / 2); ++b) {
        if (std::labs(b) < guard) continue;
        double m = std::norm(buf[std::size_t((b + long(P)) % long(P))]);
        if (m > best_mag) {
            best_mag = m;
            best = b;
        }
    }
    auto mag = [&](long b) { return std::sqrt(std::norm(buf[std::size_t((b + long(P)) % long(P))])); };
    double ym = mag(best - 1), y0 = mag(best), yp = mag(best + 1);
    double denom = ym - 2.0 * y0 + yp;
    double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
    return kTwoPi * (double(best) + std::clamp(shift, -0.5, 0.5)) / (double(P) * s.dt);
}

// Newton on |S(nu)|^2 from nu.
double refine_peak(const Signal& s, const std::vector<double>& w, double nu) {
    const auto& ker = simd::active();
    const double* im = s.complex() ? s.im.data() : nullptr;
    const double bin = kTwoPi / (double(s.size()) * s.dt);
    double out[6];
    for (int it = 0; it < 30; ++it) {
        ker.dft_moments(s.re.data(), im, w.data(), s.size(), nu, s.t0, s.dt, out);
        cplx S(out[0], out[1]), M1(out[2], out[3]), M2(out[4], out[5]);
        cplx d1 = cplx(0.0, -1.0) * M1, d2 = -M2;
        double f1 = 2.0 * (std::conj(S) * d1).real();
        double f2 = 2.0 * (std::norm(d1) + (std::conj(S) * d2).real());
        if (!(f2 < 0.0)) break;
        double step = std::clamp(-f1 / f2, -0.5 * bin, 0.5 * bin);
        nu += step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(nu))) break;
    }
    return nu;
}

FrequencyEstimate extract(const Signal& s, int n_freq, const ExtractOptions& opt) {
    FrequencyEstimate est;
    est.window_length = double(s.size()) * s.dt;
    std::vector<double> w = hann(s.size());

    std::vector<double> nus;
    Eigen::VectorXcd amp;
    double lead = 0.0;
    for (int m = 0; m < n_freq; ++m) {
        Signal r = nus.empty() ? s : residual(s, nus, amp, -1);
        double nu = refine_peak(r, w, coarse_peak(r, w));
        std::vector<double> trial = nus;
        trial.push_back(nu);
        Eigen::VectorXcd a = fit(s, w, trial);
        double am = amplitude(s, a, int(trial.size()) - 1);
        if (m == 0) {
            if (!(am > 1e-12 * std::max(s.scale, 1e-300))) break;
            lead = am;
        } else if (am < opt.min_relative_amplitude * lead) {
            break;
        }
        nus = std::move(trial);
        amp = std::move(a);
    }
    if (nus.empty()) {
        est.empty = true;
        return est;
    }
    for (int pass = 0; pass < opt.refinement_passes; ++pass) {
        for (std::size_t f = 0; f < nus.size(); ++f) nus[f] = refine_peak(residual(s, nus, amp, int(f)), w, nus[f]);
        amp = fit(s, w, nus);
    }
    for (std::size_t f = 0; f < nus.size(); ++f) {
        double nu = nus[f];
        if (!s.complex()) nu = std::abs(nu);
        est.components.push_back({nu, amplitude(s, amp, int(f))});
    }
    std::stable_sort(est.components.begin(), est.components.end(),
                     [](const FrequencyComponent& a, const FrequencyComponent& b) { return a.amplitude > b.amplitude; });
    return est;
}

Signal make_signal(const std::vector<double>& re, const std::vector<double>* im, double dt) {
    Signal s;
    s.re = re;
    if (im) s.im = *im;
    s.dt = dt;
    s.t0 = -0.5 * double(re.size() - 1) * dt;
    for (std::size_t k = 0; k < re.size(); ++k) s.scale = std::max(s.scale, std::hypot(re[k], im ? (*im)[k] : 0.0));
    double mr = 0.0, mi = 0.0;
    for (double v : s.re) mr += v;
    for (double v : s.im) mi += v;
    mr /= double(s.re.size());
    for (double& v : s.re) v -= mr;
    if (im) {
        mi /= double(s.im.size());
        for (double& v : s.im) v -= mi;
    }
    return s;
}

}  // namespace

Observable parse_observable(std::string_view name) {
    if (name == "height" || name == "z" || name == "q3") return Observable::Height;
    if (name == "q1") return Observable::Q1;
    if (name == "azimuthal" || name == "q1+iq2") return Observable::Azimuthal;
    throw ValidationError(fmt::format("unknown observable '{}'", name));
}

FrequencyEstimate extract_frequencies(const std::vector<double>& re, const std::vector<double>* im, double dt,
                                      int n_freq, const ExtractOptions& opt) {
    if (re.size() < kMinSignalLength)
        throw ValidationError(fmt::format("signal has {} samples, at least {} are needed", re.size(), kMinSignalLength));
    if (im && im->size() != re.size()) throw ValidationError("real and imaginary parts differ in length");
    if (!(dt > 0.0)) throw ValidationError("sample spacing must be positive");
    if (n_freq < 1) throw ValidationError("n_freq must be at least 1");
    for (double v : re)
        if (!std::isfinite(v)) throw ValidationError("signal has non-finite samples");
    Signal s = make_signal(re, im, dt);
    FrequencyEstimate est = extract(s, n_freq, opt);
    if (opt.estimate_error && !est.empty) {
        std::size_t h = re.size() / 2;
        std::vector<double> re_h(re.begin(), re.begin() + std::ptrdiff_t(h));
        std::vector<double> im_h;
        if (im) im_h.assign(im->begin(), im->begin() + std::ptrdiff_t(h));
        ExtractOptions o = opt;
        o.estimate_error = false;
        FrequencyEstimate half = extract(make_signal(re_h, im ? &im_h : nullptr, dt), n_freq, o);
        double nu = est.components.front().frequency, best = std::numeric_limits<double>::infinity();
        for (const auto& c : half.components) best = std::min(best, std::abs(c.frequency - nu));
        est.error_estimate = best;
    }
    return est;
}

FrequencyEstimate extract_frequencies(const Trajectory& tr, Observable obs, int n_freq, const ExtractOptions& opt) {
    if (tr.size() < 2) throw ValidationError("trajectory is too short");
    const double dt = tr.time[1] - tr.time[0];
    for (std::size_t k = 1; k < tr.size(); ++k)
        if (std::abs((tr.time[k] - tr.time[k - 1]) - dt) > 1e-9 * dt) {
            if (k + 1 == tr.size()) break;  // a shortened final step is dropped below
            throw ValidationError("trajectory is not uniformly sampled");
        }
    std::size_t n = tr.size();
    if (n > 2 && std::abs((tr.time[n - 1] - tr.time[n - 2]) - dt) > 1e-9 * dt) --n;
    std::vector<double> re(n), im;
    if (obs == Observable::Azimuthal) im.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const PhasePoint& x = tr.points[k];
        switch (obs) {
        case Observable::Height: re[k] = x.q[2]; break;
        case Observable::Q1: re[k] = x.q[0]; break;
        case Observable::Azimuthal:
            re[k] = x.q[0];
            im[k] = x.q[1];
            break;
        }
    }
    return extract_frequencies(re, obs == Observable::Azimuthal ? &im : nullptr, dt, n_freq, opt);
}

TrajectoryFrequencies trajectory_frequencies(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h,
                                             int stride) {
    Trajectory tr = integrate(x0, spec, t_end, h, {Scheme::Composition6, stride});
    TrajectoryFrequencies out;
    out.height = extract_frequencies(tr, Observable::Height, 4);
    out.azimuthal = extract_frequencies(tr, Observable::Azimuthal, 6);
    if (out.height.empty || out.azimuthal.empty)
        throw NumericalError("no significant spectral line in the trajectory");
    double w1 = out.height.components.front().frequency;
    double nu = out.azimuthal.components.front().frequency;
    double w2 = nu - w1 * std::ceil(nu / w1 - 1.0);
    out.omega = {w1, w2};
    return out;
}

}  // namespace torus_atlas
