#include "torus_atlas/torus_io.hpp"

#include "torus_atlas/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace torus_atlas {

namespace {

constexpr const char* kFormat = "torus_atlas.tori";

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("torus file is truncated");
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= std::uint64_t(b[k]) << (8 * k);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_tori(const std::string& path, const std::vector<SolvedTorus>& tori) {
    nlohmann::ordered_json h;
    h["format"] = kFormat;
    h["version"] = 1;
    h["byte_order"] = "little";
    h["tori"] = nlohmann::ordered_json::array();
    for (const auto& t : tori) {
        nlohmann::ordered_json e;
        e["N"] = t.K.n();
        e["omega"] = {t.omega.omega1, t.omega.omega2};
        e["epsilon"] = t.epsilon;
        e["perturbation"] = perturbation_name(t.perturbation);
        e["residual"] = t.residual;
        e["I"] = t.value.I;
        e["E"] = t.value.E;
        e["phase_offset"] = {t.K.phase_offset.theta1, t.K.phase_offset.theta2};
        h["tori"].push_back(e);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + path);
    os << h.dump() << '\n';
    for (const auto& t : tori)
        for (int c = 0; c < 6; ++c)
            for (const cplx& z : t.K.spectrum(c)) {
                put_f64(os, z.real());
                put_f64(os, z.imag());
            }
    if (!os) throw ValidationError("failed writing " + path);
}

std::vector<SolvedTorus> read_tori(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot read " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad torus file header: ") + e.what());
    }
    if (h.value("format", "") != kFormat || h.value("version", 0) != 1)
        throw ValidationError("not a torus file of a supported version");
    std::vector<SolvedTorus> out;
    for (const auto& e : h.at("tori")) {
        SolvedTorus t;
        const int n = e.at("N").get<int>();
        if (n < 32 || (n & (n - 1)) != 0) throw ValidationError("torus file has a bad grid order");
        t.omega = {e.at("omega")[0].get<double>(), e.at("omega")[1].get<double>()};
        t.epsilon = e.at("epsilon").get<double>();
        t.perturbation = parse_perturbation(e.at("perturbation").get<std::string>());
        t.residual = e.at("residual").get<double>();
        t.value = {e.at("I").get<double>(), e.at("E").get<double>()};
        Fft2 fft(n);
        std::vector<cplx> spec(fft.spectrum_size());
        std::vector<double> grid(std::size_t(n) * n);
        Matrix6X vals(6, Eigen::Index(n) * n);
        for (int c = 0; c < 6; ++c) {
            for (auto& z : spec) {
                double re = get_f64(is);
                z = cplx(re, get_f64(is));
            }
            fft.backward(spec.data(), grid.data());
            for (std::size_t k = 0; k < grid.size(); ++k) vals(c, Eigen::Index(k)) = grid[k];
        }
        t.K = TorusEmbedding(n, t.omega, std::move(vals));
        t.K.phase_offset = {e.at("phase_offset")[0].get<double>(), e.at("phase_offset")[1].get<double>()};
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace torus_atlas
