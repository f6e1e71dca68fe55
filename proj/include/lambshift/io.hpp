#ifndef LAMBSHIFT_IO_HPP
#define LAMBSHIFT_IO_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambshift/errors.hpp"
#include "lambshift/numerics.hpp"
#include "lambshift/spectra.hpp"
#include "lambshift/version.hpp"

namespace lambshift::io {

/// Fixed numeric formatting so that repeated runs emit byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string hex_checksum(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failure: " + path.string());
    return ss.str();
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    const auto dir = path.parent_path();
    if (!dir.empty()) {
        std::filesystem::create_directories(dir, ec);
        if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw io_error("write failure: " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                           ec.message());
}

/// Minimal RFC-4180-style CSV assembly: comma separated, header row, '.'
/// decimal separator; none of the emitted fields ever needs quoting.
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header) {
        append_row(header);
    }

    void row(const std::vector<std::string>& cells) { append_row(cells); }

    const std::string& str() const { return buffer_; }

private:
    void append_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buffer_ += ',';
            buffer_ += cells[i];
        }
        buffer_ += '\n';
    }
    std::string buffer_;
};

/// One entry per emitted file; checksums cover the exact bytes written.
struct RunManifest {
    std::string config_fingerprint;
    std::uint64_t seed = 0;
    int jobs = 1;
    double wall_time_s = 0.0;
    std::vector<std::pair<std::string, std::string>> outputs;  // (filename, checksum)

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = manifest_schema_version;
        j["tool_version"] = version;
        j["config_fingerprint"] = config_fingerprint;
        j["seed"] = seed;
        j["jobs"] = jobs;
        j["wall_time_s"] = wall_time_s;
        j["outputs"] = nlohmann::json::array();
        for (const auto& [name, checksum] : outputs) {
            j["outputs"].push_back({{"path", name}, {"checksum", checksum}});
        }
        return j;
    }
};

/// Collects output files for a run directory, checksums them and emits the
/// manifest on finish().
class OutputSink {
public:
    OutputSink(std::filesystem::path out_dir, std::string config_fingerprint, std::uint64_t seed,
               int jobs)
        : out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
        manifest_.config_fingerprint = std::move(config_fingerprint);
        manifest_.seed = seed;
        manifest_.jobs = jobs;
    }

    void write(const std::string& filename, const std::string& content) {
        write_file_atomic(out_dir_ / filename, content);
        manifest_.outputs.emplace_back(filename, hex_checksum(numerics::fnv1a64(content)));
    }

    const std::filesystem::path& dir() const { return out_dir_; }

    void finish() {
        manifest_.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file_atomic(out_dir_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
    }

private:
    std::filesystem::path out_dir_;
    std::chrono::steady_clock::time_point start_;
    RunManifest manifest_;
};

/// Spectrum CSV: columns omega_eV, intensity.
inline std::string spectrum_csv(const Spectrum& s) {
    CsvBuilder csv({"omega_eV", "intensity"});
    for (std::size_t i = 0; i < s.omegas.size(); ++i) {
        csv.row({format_double(s.omegas[i]), format_double(s.values[i])});
    }
    return csv.str();
}

/// Loads a spectrum written by spectrum_csv (used by the inversion CLI).
inline Spectrum load_spectrum_csv(const std::filesystem::path& path, SpectrumKind kind) {
    const std::string text = read_file(path);
    Spectrum s;
    s.kind = kind;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty spectrum CSV: " + path.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("malformed spectrum CSV row: " + line);
        try {
            s.omegas.push_back(std::stod(line.substr(0, comma)));
            s.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw io_error("malformed spectrum CSV row: " + line);
        }
    }
    s.validate();
    return s;
}

} // namespace lambshift::io

#endif
