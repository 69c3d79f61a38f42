#include "apes/io.hpp"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "apes/errors.hpp"

namespace apes::io {

using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for checksum: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (in.eof()) break;
    }
    return h;
}

namespace {

void write_field_doubles(std::ofstream& out, const SpectralField3D& f) {
    const Grid& g = f.grid();
    for (int kx = 0; kx < g.nkx(); ++kx)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int m = 0; m <= g.nz; ++m) {
                const cplx c = f.at(kx, iy, m);
                const double re = c.real(), im = c.imag();
                out.write(reinterpret_cast<const char*>(&re), sizeof(double));
                out.write(reinterpret_cast<const char*>(&im), sizeof(double));
            }
}

void read_field_doubles(std::ifstream& in, SpectralField3D& f) {
    const Grid& g = f.grid();
    for (int kx = 0; kx < g.nkx(); ++kx)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int m = 0; m <= g.nz; ++m) {
                double re, im;
                in.read(reinterpret_cast<char*>(&re), sizeof(double));
                in.read(reinterpret_cast<char*>(&im), sizeof(double));
                f.at(kx, iy, m) = cplx(re, im);
            }
    if (!in) throw IoError("snapshot truncated while reading coefficients");
}

bool machine_is_little_endian() {
    const std::uint16_t probe = 0x0102;
    unsigned char b[2];
    std::memcpy(b, &probe, 2);
    return b[0] == 0x02;
}

} // namespace

void write_snapshot(const std::string& path, const State& s, const Tendency* ab2,
                    long step_index) {
    if (!machine_is_little_endian())
        throw IoError("snapshot format requires a little-endian host");
    const Grid& g = s.grid();
    json hdr;
    hdr["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"h", g.h}};
    hdr["time"] = s.t;
    hdr["endianness"] = "little";
    hdr["fields"] = json::array({json{{"name", "v1"}, {"parity", "even"}},
                                 json{{"name", "v2"}, {"parity", "even"}},
                                 json{{"name", "T"}, {"parity", "odd"}}});
    hdr["step_index"] = step_index;
    hdr["ab2_memory"] = (ab2 != nullptr);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot for writing: " + path);
    out << "APES1\n" << hdr.dump() << "\n\n";
    write_field_doubles(out, s.v1);
    write_field_doubles(out, s.v2);
    write_field_doubles(out, s.T);
    if (ab2) {
        write_field_doubles(out, ab2->dv1);
        write_field_doubles(out, ab2->dv2);
        write_field_doubles(out, ab2->dT);
    }
    if (!out) throw IoError("failed writing snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot: " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != "APES1") throw IoError("bad snapshot magic in " + path);
    std::string header, line;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        header += line;
        header += '\n';
    }
    json hdr;
    try {
        hdr = json::parse(header);
    } catch (const std::exception& e) {
        throw IoError(std::string("bad snapshot header: ") + e.what());
    }
    if (hdr.value("endianness", "little") != "little")
        throw IoError("snapshot written on an incompatible host");

    Grid g(hdr["grid"]["nx"].get<int>(), hdr["grid"]["ny"].get<int>(),
           hdr["grid"]["nz"].get<int>(), hdr["grid"]["h"].get<double>());
    Snapshot snap;
    snap.state = State(g);
    snap.state.t = hdr["time"].get<double>();
    snap.step_index = hdr.value("step_index", 0L);
    read_field_doubles(in, snap.state.v1);
    read_field_doubles(in, snap.state.v2);
    read_field_doubles(in, snap.state.T);
    if (hdr.value("ab2_memory", false)) {
        Tendency t;
        t.dv1 = SpectralField3D(g, Parity::Even);
        t.dv2 = SpectralField3D(g, Parity::Even);
        t.dT = SpectralField3D(g, Parity::Odd);
        read_field_doubles(in, t.dv1);
        read_field_doubles(in, t.dv2);
        read_field_doubles(in, t.dT);
        snap.ab2 = std::move(t);
    }
    return snap;
}

// Used by make_initial_data for init_kind = file.
State read_state_for_init(const std::string& path, const Grid& expected) {
    Snapshot snap = read_snapshot(path);
    if (snap.state.grid() != expected)
        throw ValidationError("initial-data snapshot grid does not match config");
    return snap.state;
}

namespace {

std::vector<int> parse_q_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw ValidationError("q_list must not be empty");
    return out;
}

} // namespace

Params apply_config_pairs(Params p,
                          const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "nx") p.nx = std::stoi(value);
            else if (key == "ny") p.ny = std::stoi(value);
            else if (key == "nz") p.nz = std::stoi(value);
            else if (key == "h") p.h = std::stod(value);
            else if (key == "epsilon") p.epsilon = std::stod(value);
            else if (key == "f0") p.f0 = std::stod(value);
            else if (key == "nu_h") p.nu_h = std::stod(value);
            else if (key == "kappa_z") p.kappa_z = std::stod(value);
            else if (key == "dt") p.dt = std::stod(value);
            else if (key == "t_final") p.t_final = std::stod(value);
            else if (key == "scheme") p.scheme = scheme_from_string(value);
            else if (key == "monitor_stride") p.monitor_stride = std::stoi(value);
            else if (key == "q_list") p.q_list = parse_q_list(value);
            else if (key == "seed") p.seed = std::stoull(value);
            else if (key == "init_kind") p.init_kind = init_kind_from_string(value);
            else if (key == "init_amplitude") p.init_amplitude = std::stod(value);
            else if (key == "init_slope") p.init_slope = std::stod(value);
            else if (key == "init_tmax") p.init_tmax = std::stod(value);
            else if (key == "init_file") p.init_file = value;
            else if (key == "output_dir") p.output_dir = value;
            else if (key == "checkpoint_every") p.checkpoint_every = std::stoi(value);
            else if (key == "snapshot_every") p.snapshot_every = std::stoi(value);
            else throw ValidationError("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw ValidationError("bad value for config key " + key + ": " + value);
        } catch (const std::out_of_range&) {
            throw ValidationError("out-of-range value for config key " + key);
        }
    }
    return p;
}

Params read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const char* ws = " \t\r\n";
            const auto b = s.find_first_not_of(ws);
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(ws);
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return apply_config_pairs(Params{}, kv);
}

std::map<std::string, std::string> params_to_kv(const Params& p) {
    auto d = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::map<std::string, std::string> kv;
    kv["nx"] = std::to_string(p.nx);
    kv["ny"] = std::to_string(p.ny);
    kv["nz"] = std::to_string(p.nz);
    kv["h"] = d(p.h);
    kv["epsilon"] = d(p.epsilon);
    kv["f0"] = d(p.f0);
    kv["nu_h"] = d(p.nu_h);
    kv["kappa_z"] = d(p.kappa_z);
    kv["dt"] = d(p.dt);
    kv["t_final"] = d(p.t_final);
    kv["scheme"] = scheme_to_string(p.scheme);
    kv["monitor_stride"] = std::to_string(p.monitor_stride);
    std::string ql;
    for (std::size_t i = 0; i < p.q_list.size(); ++i)
        ql += (i ? "," : "") + std::to_string(p.q_list[i]);
    kv["q_list"] = ql;
    kv["seed"] = std::to_string(p.seed);
    kv["init_kind"] = init_kind_to_string(p.init_kind);
    kv["init_amplitude"] = d(p.init_amplitude);
    kv["init_slope"] = d(p.init_slope);
    kv["init_tmax"] = d(p.init_tmax);
    kv["init_file"] = p.init_file;
    kv["output_dir"] = p.output_dir;
    kv["checkpoint_every"] = std::to_string(p.checkpoint_every);
    kv["snapshot_every"] = std::to_string(p.snapshot_every);
    return kv;
}

void write_monitor_csv(const std::string& path, const std::vector<int>& q_list,
                       const std::vector<MonitorRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open monitor CSV for writing: " + path);
    out << MonitorRecord::csv_header(q_list) << "\n";
    for (const auto& r : records) out << r.csv_row() << "\n";
    if (!out) throw IoError("failed writing monitor CSV: " + path);
}

void write_manifest(const std::string& path, const Manifest& m) {
    json j;
    j["code_version"] = kCodeVersion;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["status"] = m.status;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["fitted_constants"] = {{"energy_exponent", m.fitted_energy_exponent},
                             {"scheme_constant", m.fitted_scheme_constant}};
    if (m.status == "blowup") j["blowup_time"] = m.blowup_time;
    json files = json::array();
    namespace fs = std::filesystem;
    for (const auto& f : m.files) {
        json e;
        e["name"] = fs::path(f).filename().string();
        std::error_code ec;
        const auto sz = fs::file_size(f, ec);
        e["bytes"] = ec ? 0 : static_cast<std::uint64_t>(sz);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(f)));
        e["fnv1a64"] = buf;
        files.push_back(e);
    }
    j["files"] = files;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open manifest for writing: " + path);
    out << j.dump(2) << "\n";
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace apes::io
