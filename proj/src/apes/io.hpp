#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apes/dynamics.hpp"
#include "apes/state.hpp"

namespace apes::io {

inline constexpr const char* kCodeVersion = "1.0.0";

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path); // throws IoError

// Snapshot / checkpoint format: the magic line "APES1\n", a JSON header
// terminated by a blank line, then raw little-endian doubles holding each
// field's complex coefficients in (kx, ky, m, re/im) order (kx slowest, ky
// in FFT storage order, m = 0..nz). Checkpoints additionally carry the AB2
// tendency memory so restarts continue bit-exactly.
void write_snapshot(const std::string& path, const State& s,
                    const Tendency* ab2 = nullptr, long step_index = 0);

struct Snapshot {
    State state;
    std::optional<Tendency> ab2;
    long step_index = 0;
};

Snapshot read_snapshot(const std::string& path);

// Plain-text key = value configuration; '#' starts a comment. Unknown keys
// are hard errors. Returns the defaults overlaid with the file's values.
Params read_config(const std::string& path);
Params apply_config_pairs(Params base,
                          const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> params_to_kv(const Params& p);

void write_monitor_csv(const std::string& path, const std::vector<int>& q_list,
                       const std::vector<MonitorRecord>& records);

struct Manifest {
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    std::string status = "ok"; // ok | blowup | error
    std::string start_time, end_time;
    double fitted_energy_exponent = 0.0;
    double fitted_scheme_constant = 0.0;
    double blowup_time = 0.0;
    std::vector<std::string> files; // emitted files, checksummed on write
};

void write_manifest(const std::string& path, const Manifest& m);

std::string iso8601_now();

} // namespace apes::io
