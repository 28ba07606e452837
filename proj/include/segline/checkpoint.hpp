#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "segline/tensor.hpp"

namespace segline {

// Named-tensor container with a versioned header plus an opaque JSON metadata
// block. Tensor payloads are raw little-endian float64, so values round-trip
// bit-exactly.
//
// Layout: magic "SEGLNCKP" | u32 version | u8 endian(1=little)
//         u64 meta_len | meta bytes
//         u64 tensor count | per tensor: u16 name_len | name |
//         u8 ndim | u64 dims... | f64 data...
inline constexpr uint32_t kCheckpointVersion = 1;

void write_named_tensors(std::ostream& out, const std::map<std::string, Tensor>& tensors,
                         const std::string& meta_json);

struct NamedTensorFile {
    std::map<std::string, Tensor> tensors;
    std::string meta_json;
};

NamedTensorFile read_named_tensors(std::istream& in);

void save_named_tensors(const std::string& path, const std::map<std::string, Tensor>& tensors,
                        const std::string& meta_json);
NamedTensorFile load_named_tensors(const std::string& path);

}  // namespace segline
