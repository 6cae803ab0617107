#include "mmpos/io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mmpos {

namespace {
constexpr char kMagic[8] = {'M', 'M', 'P', 'O', 'S', 'S', 'I', 'G'};

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
}  // namespace

void write_signal_dump(const std::string& path, const DemodulatedSignal& sig) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 8);
    put_u64(out, sig.num_paths);
    put_u64(out, sig.num_rx);
    put_u64(out, sig.num_freq);
    for (const auto& c : sig.sfcw) {
        const float re = static_cast<float>(c.real()), im = static_cast<float>(c.imag());
        out.write(reinterpret_cast<const char*>(&re), 4);
        out.write(reinterpret_cast<const char*>(&im), 4);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DemodulatedSignal read_signal_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("bad signal dump magic: " + path);
    DemodulatedSignal sig;
    sig.num_paths = get_u64(in);
    sig.num_rx = get_u64(in);
    sig.num_freq = get_u64(in);
    sig.sfcw.resize(sig.num_paths * sig.num_rx * sig.num_freq);
    for (auto& c : sig.sfcw) {
        float re = 0.0f, im = 0.0f;
        in.read(reinterpret_cast<char*>(&re), 4);
        in.read(reinterpret_cast<char*>(&im), 4);
        c = {re, im};
    }
    if (!in) throw std::runtime_error("truncated signal dump: " + path);
    return sig;
}

void write_point_cloud(const std::string& path, const std::vector<Vec3>& pts,
                       const std::vector<double>& values) {
    if (pts.size() != values.size())
        throw std::invalid_argument("point/value count mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(9);
    for (std::size_t i = 0; i < pts.size(); ++i)
        out << pts[i].x << ' ' << pts[i].y << ' ' << pts[i].z << ' ' << values[i] << '\n';
}

void write_point_cloud(const std::string& path, const std::vector<Vec3>& pts, double value) {
    std::vector<double> values(pts.size(), value);
    write_point_cloud(path, pts, values);
}

}  // namespace mmpos
