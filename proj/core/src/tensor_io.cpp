#include "mcam/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mcam/error.hpp"

namespace mcam {

namespace {

constexpr char kMagic[4] = {'T', '3', 'B', '1'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 8;

[[noreturn]] void format_error(const std::filesystem::path& path,
                               std::size_t offset, const std::string& what) {
    throw Error(ErrorKind::Format, path.string() + ": " + what +
                                       " (byte offset " +
                                       std::to_string(offset) + ")");
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void save_tensor(const Tensor3& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Format, "cannot open " + path.string() + " for writing");
    }
    out.write(kMagic, 4);
    for (std::size_t d : t.dims()) put_u64_le(out, d);
    for (double v : t.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        put_u64_le(out, bits);
    }
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Format, "write failed for " + path.string());
    }
}

Tensor3 load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open " + path.string());
    }

    unsigned char header[kHeaderBytes];
    in.read(reinterpret_cast<char*>(header), kHeaderBytes);
    const auto header_read = static_cast<std::size_t>(in.gcount());
    if (header_read < 4 || std::memcmp(header, kMagic, 4) != 0) {
        format_error(path, 0, "bad magic, expected T3B1");
    }
    if (header_read < kHeaderBytes) {
        format_error(path, header_read, "truncated header");
    }

    std::uint64_t dims[3];
    for (int d = 0; d < 3; ++d) {
        dims[d] = get_u64_le(header + 4 + 8 * d);
        if (dims[d] == 0) {
            format_error(path, 4 + 8 * static_cast<std::size_t>(d), "zero dimension");
        }
    }
    const std::uint64_t count = dims[0] * dims[1] * dims[2];
    if (dims[0] != 0 && count / dims[0] / dims[1] != dims[2]) {
        format_error(path, 4, "dims product overflows");
    }

    std::vector<double> values(count);
    std::vector<unsigned char> payload(count * 8);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    const auto payload_read = static_cast<std::size_t>(in.gcount());
    if (payload_read < payload.size()) {
        format_error(path, kHeaderBytes + payload_read,
                     "truncated payload, expected " + std::to_string(count) +
                         " values");
    }
    char probe;
    in.read(&probe, 1);
    if (in.gcount() != 0) {
        format_error(path, kHeaderBytes + payload.size(),
                     "trailing bytes after payload");
    }

    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_u64_le(payload.data() + 8 * i);
        values[i] = std::bit_cast<double>(bits);
        if (!std::isfinite(values[i])) {
            format_error(path, kHeaderBytes + 8 * i, "non-finite value");
        }
    }
    return Tensor3(dims[0], dims[1], dims[2], std::move(values));
}

Tensor3 load_tensor_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open " + path.string());
    }

    auto parse_fields = [&](const std::string& line, std::size_t lineno,
                            std::size_t expected) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != expected) {
            throw Error(ErrorKind::Format,
                        path.string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(expected) +
                            " comma-separated fields, got " +
                            std::to_string(fields.size()));
        }
        return fields;
    };

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Format, path.string() + ": empty file");
    }
    std::size_t dims[3];
    try {
        const auto fields = parse_fields(line, 1, 3);
        for (int d = 0; d < 3; ++d) dims[d] = std::stoull(fields[d]);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Format, path.string() + ":1: bad header, expected m1,m2,m3");
    }
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
        throw Error(ErrorKind::Format, path.string() + ":1: zero dimension");
    }

    std::vector<double> values(dims[0] * dims[1] * dims[2], 0.0);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t idx[3];
        double value;
        try {
            const auto fields = parse_fields(line, lineno, 4);
            for (int d = 0; d < 3; ++d) idx[d] = std::stoull(fields[d]);
            value = std::stod(fields[3]);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Format, path.string() + ":" +
                                               std::to_string(lineno) +
                                               ": bad triple line");
        }
        for (int d = 0; d < 3; ++d) {
            if (idx[d] >= dims[d]) {
                throw Error(ErrorKind::Format,
                            path.string() + ":" + std::to_string(lineno) +
                                ": index " + std::to_string(idx[d]) +
                                " out of range for mode " + std::to_string(d + 1));
            }
        }
        if (!std::isfinite(value)) {
            throw Error(ErrorKind::Format, path.string() + ":" +
                                               std::to_string(lineno) +
                                               ": non-finite value");
        }
        values[(idx[0] * dims[1] + idx[1]) * dims[2] + idx[2]] = value;
    }
    return Tensor3(dims[0], dims[1], dims[2], std::move(values));
}

Tensor3 load_tensor_any(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return load_tensor_csv(path);
    return load_tensor(path);
}

}  // namespace mcam
