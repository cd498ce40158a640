#include "gpad/core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gpad {

namespace {

constexpr char kMagic[8] = {'G', 'P', 'A', 'D', 'C', 'K', 'P', 'T'};

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_u8(std::ostream& os, std::uint8_t v) { os.write(reinterpret_cast<const char*>(&v), 1); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_tensor(std::ostream& os, const Tensor& t) {
    write_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (int i = 0; i < t.rank(); ++i) write_i64(os, t.dim(i));
    os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * 8));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::int64_t read_i64(std::istream& is) {
    std::int64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::uint8_t read_u8(std::istream& is) {
    std::uint8_t v;
    is.read(reinterpret_cast<char*>(&v), 1);
    return v;
}
double read_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

std::string read_string(std::istream& is) {
    const std::uint64_t n = read_u64(is);
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

Tensor read_tensor(std::istream& is) {
    const std::uint32_t rank = read_u32(is);
    std::vector<std::int64_t> shape(rank);
    for (auto& d : shape) d = read_i64(is);
    Tensor t(shape);
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * 8));
    return t;
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

void Checkpoint::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 8);
    write_u32(os, kVersion);
    write_string(os, meta_json);
    write_u64(os, tensors.size());
    for (const auto& [name, t] : tensors) {
        write_string(os, name);
        write_tensor(os, t);
    }
    write_u8(os, opt_step.has_value() ? 1 : 0);
    if (opt_step.has_value()) {
        write_i64(os, *opt_step);
        write_u64(os, opt_moments.size());
        for (const auto& [name, mom] : opt_moments) {
            write_string(os, name);
            write_tensor(os, mom.m);
            write_tensor(os, mom.v);
        }
    }
    write_u8(os, rng.has_value() ? 1 : 0);
    if (rng.has_value()) {
        write_u64(os, rng->seed);
        write_u64(os, rng->counter);
        write_u8(os, rng->has_cached ? 1 : 0);
        write_f64(os, rng->cached);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    const std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    ck.meta_json = read_string(is);
    const std::uint64_t n_tensors = read_u64(is);
    ck.tensors.reserve(n_tensors);
    for (std::uint64_t i = 0; i < n_tensors; ++i) {
        std::string name = read_string(is);
        ck.tensors.emplace_back(std::move(name), read_tensor(is));
    }
    if (read_u8(is)) {
        ck.opt_step = read_i64(is);
        const std::uint64_t n_mom = read_u64(is);
        for (std::uint64_t i = 0; i < n_mom; ++i) {
            std::string name = read_string(is);
            AdamW::Moments mom;
            mom.m = read_tensor(is);
            mom.v = read_tensor(is);
            ck.opt_moments.emplace_back(std::move(name), std::move(mom));
        }
    }
    if (read_u8(is)) {
        RngState rs;
        rs.seed = read_u64(is);
        rs.counter = read_u64(is);
        rs.has_cached = read_u8(is) != 0;
        rs.cached = read_f64(is);
        ck.rng = rs;
    }
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    return ck;
}

}  // namespace gpad
