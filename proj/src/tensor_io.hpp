#pragma once

#include <iosfwd>
#include <string>

#include "tensor.hpp"

namespace mtcs {

// TEN1 binary format: magic "TEN1", u32 little-endian order N, N x u64
// little-endian dims, then prod(dims) f64 little-endian values in
// first-index-fastest order.  Round trips are bit exact.
void write_ten1(const DenseTensor& t, std::ostream& os);
DenseTensor read_ten1(std::istream& is);

void write_ten1_file(const DenseTensor& t, const std::string& path);
DenseTensor read_ten1_file(const std::string& path);

}  // namespace mtcs
