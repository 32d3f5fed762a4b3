#include "ccfoe/iqfile.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace ccfoe {

static_assert(std::endian::native == std::endian::little,
              "capture format is little-endian; byte swapping is not implemented");
static_assert(sizeof(float) == 4, "capture format assumes 32-bit floats");

namespace {
constexpr std::size_t kQuad = 4 * sizeof(float);  // one [XI, XQ, YI, YQ] record
}

void write_capture(const std::string& path, const DualPolSignal& sig,
                   const CaptureMeta& meta) {
    validate(sig);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open capture for writing: " + path);
    std::vector<float> buf(4 * sig.size());
    for (std::size_t n = 0; n < sig.size(); ++n) {
        buf[4 * n + 0] = static_cast<float>(sig.x[n].real());
        buf[4 * n + 1] = static_cast<float>(sig.x[n].imag());
        buf[4 * n + 2] = static_cast<float>(sig.y[n].real());
        buf[4 * n + 3] = static_cast<float>(sig.y[n].imag());
    }
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!f) throw IoError("short write on capture: " + path);
    write_capture_meta(sidecar_path(path), meta);
}

DualPolSignal read_capture(const std::string& path, const CaptureMeta& meta) {
    if (meta.format_version != 1)
        throw ConfigError("capture metadata: unsupported format_version " +
                          std::to_string(meta.format_version));
    if (!(meta.sample_rate_hz > 0.0) || !(meta.symbol_rate_hz > 0.0))
        throw ConfigError("capture metadata: rates must be positive");

    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw IoError("cannot open capture: " + path);
    const std::streamoff size = f.tellg();
    if (size <= 0) throw IoError("capture is empty: " + path);
    if (static_cast<std::size_t>(size) % kQuad != 0) {
        std::size_t offset =
            static_cast<std::size_t>(size) - static_cast<std::size_t>(size) % kQuad;
        throw IoError("capture truncated mid-quadruple at byte offset " +
                      std::to_string(offset) + ": " + path);
    }
    f.seekg(0);

    const std::size_t n = static_cast<std::size_t>(size) / kQuad;
    std::vector<float> buf(4 * n);
    f.read(reinterpret_cast<char*>(buf.data()), size);
    if (!f) throw IoError("short read on capture: " + path);

    DualPolSignal sig;
    sig.sample_rate_hz = meta.sample_rate_hz;
    sig.x.resize(n);
    sig.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sig.x[i] = cplx(buf[4 * i + 0], buf[4 * i + 1]);
        sig.y[i] = cplx(buf[4 * i + 2], buf[4 * i + 3]);
    }
    return sig;
}

CaptureMeta read_capture_meta(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open capture metadata: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("capture metadata is not valid JSON (" + path + "): " + e.what());
    }
    CaptureMeta m;
    try {
        m.format_version = j.at("format_version").get<int>();
        m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        m.symbol_rate_hz = j.at("symbol_rate_hz").get<double>();
        m.rolloff = j.at("rolloff").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("capture metadata missing required field (" + path + "): " +
                          e.what());
    }
    return m;
}

void write_capture_meta(const std::string& path, const CaptureMeta& meta) {
    nlohmann::json j{
        {"format_version", meta.format_version},
        {"sample_rate_hz", meta.sample_rate_hz},
        {"symbol_rate_hz", meta.symbol_rate_hz},
        {"rolloff", meta.rolloff},
    };
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open capture metadata for writing: " + path);
    f << j.dump(2) << "\n";
    if (!f) throw IoError("short write on capture metadata: " + path);
}

std::string sidecar_path(const std::string& capture_path) {
    return capture_path + ".json";
}

}  // namespace ccfoe
