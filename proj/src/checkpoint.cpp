#include "segline/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "segline/error.hpp"

namespace segline {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'G', 'L', 'N', 'C', 'K', 'P'};

template <class T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("checkpoint truncated");
    return v;
}

}  // namespace

void write_named_tensors(std::ostream& out, const std::map<std::string, Tensor>& tensors,
                         const std::string& meta_json) {
    out.write(kMagic, sizeof(kMagic));
    write_pod<uint32_t>(out, kCheckpointVersion);
    write_pod<uint8_t>(out, std::endian::native == std::endian::little ? 1 : 0);
    write_pod<uint64_t>(out, meta_json.size());
    out.write(meta_json.data(), static_cast<std::streamsize>(meta_json.size()));
    write_pod<uint64_t>(out, tensors.size());
    for (const auto& [name, t] : tensors) {
        if (name.size() > 65535) throw Error("tensor name too long: " + name);
        write_pod<uint16_t>(out, static_cast<uint16_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod<uint8_t>(out, static_cast<uint8_t>(t.ndim()));
        for (size_t d : t.shape()) write_pod<uint64_t>(out, d);
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw Error("checkpoint write failed");
}

NamedTensorFile read_named_tensors(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a checkpoint file (bad magic)");
    const auto version = read_pod<uint32_t>(in);
    if (version != kCheckpointVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    const auto endian = read_pod<uint8_t>(in);
    const uint8_t here = std::endian::native == std::endian::little ? 1 : 0;
    if (endian != here) throw DataError("checkpoint endianness does not match this machine");

    NamedTensorFile file;
    const auto meta_len = read_pod<uint64_t>(in);
    file.meta_json.resize(meta_len);
    in.read(file.meta_json.data(), static_cast<std::streamsize>(meta_len));
    if (!in) throw DataError("checkpoint truncated in metadata");

    const auto count = read_pod<uint64_t>(in);
    for (uint64_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<uint16_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto ndim = read_pod<uint8_t>(in);
        std::vector<size_t> shape(ndim);
        for (auto& d : shape) d = static_cast<size_t>(read_pod<uint64_t>(in));
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw DataError("checkpoint truncated in tensor " + name);
        if (!t.all_finite()) throw DataError("checkpoint tensor " + name + " has non-finite values");
        file.tensors.emplace(std::move(name), std::move(t));
    }
    return file;
}

void save_named_tensors(const std::string& path, const std::map<std::string, Tensor>& tensors,
                        const std::string& meta_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open checkpoint for writing: " + path);
    write_named_tensors(out, tensors, meta_json);
}

NamedTensorFile load_named_tensors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + path);
    return read_named_tensors(in);
}

}  // namespace segline
