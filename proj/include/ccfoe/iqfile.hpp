#pragma once

#include <string>

#include "ccfoe/types.hpp"

namespace ccfoe {

// Companion description of a raw capture. Lives in a JSON sidecar next to the
// sample file (default: "<capture>.json").
struct CaptureMeta {
    int format_version = 1;
    double sample_rate_hz = 0.0;
    double symbol_rate_hz = 0.0;
    double rolloff = 0.1;
};

// Raw capture layout: headerless little-endian float32 quadruples
// [XI, XQ, YI, YQ], one quadruple per sampling instant.
void write_capture(const std::string& path, const DualPolSignal& sig,
                   const CaptureMeta& meta);

// Reads capture + sidecar. A file whose size is not a multiple of one
// quadruple is malformed (IoError naming the offending byte offset); an empty
// file is malformed too.
DualPolSignal read_capture(const std::string& path, const CaptureMeta& meta);

CaptureMeta read_capture_meta(const std::string& path);
void write_capture_meta(const std::string& path, const CaptureMeta& meta);

// Default sidecar path for a capture file.
std::string sidecar_path(const std::string& capture_path);

}  // namespace ccfoe
