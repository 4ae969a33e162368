#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "qrlock/errors.hpp"
#include "qrlock/version.hpp"
#include "qrlock/waveform.hpp"

namespace qrlock {

namespace detail {

inline std::uint64_t bswap64(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffULL);
    return r;
}

inline std::uint64_t to_le64(std::uint64_t v) {
    return std::endian::native == std::endian::little ? v : bswap64(v);
}

inline std::uint32_t to_le32(std::uint32_t v) {
    if (std::endian::native == std::endian::little) return v;
    return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
}

inline void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    bits = to_le64(bits);
    char b[8];
    std::memcpy(b, &bits, 8);
    out.append(b, 8);
}

inline double get_f64(const char* p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, 8);
    bits = to_le64(bits);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

inline std::uint64_t get_u64(const char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return to_le64(v);
}

inline std::uint32_t get_u32(const char* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return to_le32(v);
}

}  // namespace detail

inline constexpr char kWaveformMagic[4] = {'Q', 'R', 'W', '1'};
inline constexpr std::string_view kWaveformTextHeader = "time_s,i0_v,i90_v";

/// Result of reading a waveform file of either format.
struct WaveformFileInfo {
    WaveformPair waveform;
    int schema = 0;
    std::string config_hash;  // empty when the format does not carry one
    bool binary = false;
};

/// Text format: '#' comment lines carrying schema and config hash, a fixed
/// column header, then one "%.17g" triple per sample (lossless round trip).
inline void write_waveform_text(const std::string& path, const WaveformPair& wf,
                                const std::string& config_hash) {
    wf.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot open for writing: " + path);

    std::string buf;
    buf.reserve(1 << 20);
    buf += "# ";
    buf += kToolName;
    buf += " waveform schema=" + std::to_string(kWaveformSchemaVersion);
    buf += " config=" + (config_hash.empty() ? "none" : config_hash) + "\n";
    buf += kWaveformTextHeader;
    buf += "\n";

    char line[128];
    for (std::size_t k = 0; k < wf.size(); ++k) {
        double t = wf.t0_s + static_cast<double>(k) * wf.sample_period_s;
        int len = std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", t, wf.i0_v[k], wf.i90_v[k]);
        buf.append(line, static_cast<std::size_t>(len));
        if (buf.size() > (1 << 20) - 128) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ParameterError("write failed: " + path);
}

/// Binary format, little-endian throughout: magic "QRW1", u32 schema, f64
/// sample period, u64 sample count, then (i0, i90) f64 pairs.
inline void write_waveform_binary(const std::string& path, const WaveformPair& wf) {
    wf.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot open for writing: " + path);

    std::string buf;
    buf.reserve(24 + 16 * wf.size());
    buf.append(kWaveformMagic, 4);
    std::uint32_t schema = detail::to_le32(static_cast<std::uint32_t>(kWaveformSchemaVersion));
    char tmp[8];
    std::memcpy(tmp, &schema, 4);
    buf.append(tmp, 4);
    detail::put_f64(buf, wf.sample_period_s);
    std::uint64_t count = detail::to_le64(static_cast<std::uint64_t>(wf.size()));
    std::memcpy(tmp, &count, 8);
    buf.append(tmp, 8);
    for (std::size_t k = 0; k < wf.size(); ++k) {
        detail::put_f64(buf, wf.i0_v[k]);
        detail::put_f64(buf, wf.i90_v[k]);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ParameterError("write failed: " + path);
}

namespace detail {

inline WaveformFileInfo read_waveform_binary(const std::string& content) {
    if (content.size() < 24)
        throw ParseError("binary waveform truncated before header end", content.size());
    std::uint32_t schema = get_u32(content.data() + 4);
    if (schema != static_cast<std::uint32_t>(kWaveformSchemaVersion))
        throw ParseError("unsupported binary waveform schema " + std::to_string(schema), 4);

    WaveformFileInfo info;
    info.binary = true;
    info.schema = static_cast<int>(schema);
    info.waveform.sample_period_s = get_f64(content.data() + 8);
    if (!(info.waveform.sample_period_s > 0.0))
        throw ParseError("non-positive sample period", 8);
    std::uint64_t count = get_u64(content.data() + 16);
    std::size_t expected = 24 + static_cast<std::size_t>(count) * 16;
    if (content.size() < expected)
        throw ParseError("binary waveform truncated: expected " + std::to_string(expected) +
                             " bytes for " + std::to_string(count) + " samples",
                         content.size());
    if (content.size() > expected)
        throw ParseError("trailing bytes after waveform data", expected);

    info.waveform.i0_v.resize(count);
    info.waveform.i90_v.resize(count);
    const char* p = content.data() + 24;
    for (std::uint64_t k = 0; k < count; ++k) {
        info.waveform.i0_v[k] = get_f64(p);
        info.waveform.i90_v[k] = get_f64(p + 8);
        p += 16;
    }
    return info;
}

inline WaveformFileInfo read_waveform_text(const std::string& content) {
    WaveformFileInfo info;
    info.binary = false;
    info.schema = kWaveformSchemaVersion;

    std::size_t pos = 0;
    bool saw_header = false;
    std::vector<double> times;

    while (pos < content.size()) {
        std::size_t line_start = pos;
        std::size_t eol = content.find('\n', pos);
        std::size_t end = eol == std::string::npos ? content.size() : eol;
        pos = eol == std::string::npos ? content.size() : eol + 1;

        std::size_t len = end - line_start;
        if (len > 0 && content[line_start + len - 1] == '\r') --len;
        if (len == 0) continue;
        std::string_view line(content.data() + line_start, len);

        if (line[0] == '#') {
            auto at = line.find("config=");
            if (at != std::string_view::npos) {
                auto rest = line.substr(at + 7);
                auto stop = rest.find(' ');
                info.config_hash = std::string(rest.substr(0, stop));
                if (info.config_hash == "none") info.config_hash.clear();
            }
            continue;
        }
        if (!saw_header) {
            if (line != kWaveformTextHeader)
                throw ParseError("expected column header '" + std::string(kWaveformTextHeader) + "'",
                                 line_start);
            saw_header = true;
            continue;
        }

        double vals[3];
        const char* cursor = content.data() + line_start;
        const char* line_end = cursor + len;
        for (int f = 0; f < 3; ++f) {
            char* after = nullptr;
            // strtod would skip past the newline; keep it inside the line.
            if (cursor >= line_end)
                throw ParseError("expected a number",
                                 static_cast<std::size_t>(cursor - content.data()));
            vals[f] = std::strtod(cursor, &after);
            if (after == cursor || after > line_end)
                throw ParseError("expected a number",
                                 static_cast<std::size_t>(cursor - content.data()));
            cursor = after;
            if (f < 2) {
                if (cursor >= line_end || *cursor != ',')
                    throw ParseError("expected ','",
                                     static_cast<std::size_t>(cursor - content.data()));
                ++cursor;
            }
        }
        if (cursor != line_end)
            throw ParseError("trailing characters after third column",
                             static_cast<std::size_t>(cursor - content.data()));

        times.push_back(vals[0]);
        info.waveform.i0_v.push_back(vals[1]);
        info.waveform.i90_v.push_back(vals[2]);

        if (times.size() >= 2) {
            double dt = times[1] - times[0];
            double expect = times[0] + dt * static_cast<double>(times.size() - 1);
            if (!(dt > 0.0))
                throw ParseError("time column must be strictly increasing", line_start);
            if (std::abs(times.back() - expect) > 0.5 * dt)
                throw ParseError("time column is not uniformly sampled", line_start);
        }
    }
    if (!saw_header) throw ParseError("missing column header", content.size());
    if (times.size() < 2) throw ParseError("need at least 2 samples", content.size());
    info.waveform.t0_s = times[0];
    info.waveform.sample_period_s = times[1] - times[0];
    return info;
}

}  // namespace detail

/// Read either waveform format, detected by the leading magic bytes.
inline WaveformFileInfo read_waveform(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (content.size() >= 4 && std::memcmp(content.data(), kWaveformMagic, 4) == 0)
        return detail::read_waveform_binary(content);
    return detail::read_waveform_text(content);
}

}  // namespace qrlock
